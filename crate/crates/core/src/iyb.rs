//! 1-cocycles `π: Q → Â` for the diagonal action, the cocycle `c_π` on
//! `A ⋊ Q`, the inverse extraction `π_c`, and the cup-product obstruction.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::cocycle::{alternating_form, is_nondegenerate, isotropy_test, ScanMode, TwoCocycle};
use crate::cohomology::{degree3_coboundary, Coefficients, Degree3Outcome};
use crate::error::{Error, Result};
use crate::group::{digits, is_normal, quotient_group, undigits, Elem, FiniteGroup, Limits, Quotient, SubgroupSet, IDENTITY};
use crate::linalg::{solve_linear, LinearSolution, ModMatrix};
use crate::modular::{add_mod, lcm, mul_mod, sub_mod};

/// A finite abelian group `⊕ Z/dᵢ` with `Q` acting by automorphisms.
///
/// `action[q][i][j]` is the `i`-th coordinate of `q·eⱼ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianModule {
    pub invariants: Vec<u32>,
    pub action: Vec<Vec<Vec<u32>>>,
}

impl AbelianModule {
    pub fn trivial_action(invariants: Vec<u32>, q_order: usize) -> Self {
        let r = invariants.len();
        let id: Vec<Vec<u32>> = (0..r).map(|i| (0..r).map(|j| (i == j) as u32).collect()).collect();
        AbelianModule {
            invariants,
            action: vec![id; q_order],
        }
    }

    pub fn rank(&self) -> usize {
        self.invariants.len()
    }

    pub fn order(&self) -> u64 {
        self.invariants.iter().map(|&d| d as u64).product()
    }

    pub fn exponent(&self) -> u64 {
        self.invariants.iter().fold(1, |acc, &d| lcm(acc, d as u64))
    }

    pub fn element(&self, idx: u64) -> Vec<u32> {
        digits(idx as Elem, &self.invariants)
    }

    pub fn index(&self, a: &[u32]) -> Elem {
        undigits(a, &self.invariants)
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).zip(&self.invariants).map(|((&x, &y), &d)| (x + y) % d).collect()
    }

    pub fn neg(&self, a: &[u32]) -> Vec<u32> {
        a.iter().zip(&self.invariants).map(|(&x, &d)| (d - x % d) % d).collect()
    }

    /// `q·a`.
    pub fn act(&self, q: Elem, a: &[u32]) -> Vec<u32> {
        let m = &self.action[q as usize];
        (0..self.rank())
            .map(|i| {
                let d = self.invariants[i] as u64;
                (0..self.rank()).fold(0u64, |acc, j| (acc + m[i][j] as u64 * a[j] as u64) % d) as u32
            })
            .collect()
    }

    /// `⟨χ, a⟩ ∈ Z/exp(A)` for a character with exponent vector `u`.
    pub fn pairing(&self, u: &[u32], a: &[u32]) -> u64 {
        let e = self.exponent();
        (0..self.rank()).fold(0, |acc, i| {
            let w = e / self.invariants[i] as u64;
            add_mod(acc, mul_mod(u[i] as u64 * a[i] as u64 % e, w, e), e)
        })
    }

    fn basis(&self, j: usize) -> Vec<u32> {
        (0..self.rank()).map(|i| (i == j) as u32).collect()
    }

    /// The diagonal action on characters: `⟨q(χ), a⟩ = ⟨χ, q⁻¹(a)⟩`.
    pub fn act_dual(&self, q_inv: Elem, u: &[u32]) -> Vec<u32> {
        let e = self.exponent();
        (0..self.rank())
            .map(|j| {
                let v = self.pairing(u, &self.act(q_inv, &self.basis(j)));
                (v / (e / self.invariants[j] as u64)) as u32
            })
            .collect()
    }

    /// Checks that each matrix is a well-defined endomorphism and that
    /// `q ↦ action[q]` is a homomorphism `Q → Aut(A)`.
    pub fn validate(&self, q: &FiniteGroup) -> Result<()> {
        if self.invariants.iter().any(|&d| d < 2) {
            return Err(Error::Parameter("module invariants must be at least 2".into()));
        }
        if self.action.len() as u64 != q.order() {
            return Err(Error::Parameter(format!(
                "action has {} matrices, expected one per element of Q ({})",
                self.action.len(),
                q.order()
            )));
        }
        let r = self.rank();
        for (qi, m) in self.action.iter().enumerate() {
            if m.len() != r || m.iter().any(|row| row.len() != r) {
                return Err(Error::Parameter(format!("action matrix {qi} has the wrong shape")));
            }
            for j in 0..r {
                // d_j·eⱼ = 0 must map to 0.
                let dj = self.invariants[j] as u64;
                for i in 0..r {
                    if m[i][j] as u64 * dj % self.invariants[i] as u64 != 0 {
                        return Err(Error::Parameter(format!("action matrix {qi} is not well defined on Z/{dj}")));
                    }
                }
            }
        }
        for j in 0..r {
            if self.act(IDENTITY, &self.basis(j)) != self.basis(j) {
                return Err(Error::Parameter("identity of Q must act trivially".into()));
            }
        }
        for a in q.elements() {
            for b in q.elements() {
                for j in 0..r {
                    let e = self.basis(j);
                    if self.act(q.mul(a, b), &e) != self.act(a, &self.act(b, &e)) {
                        return Err(Error::Parameter(format!("action is not multiplicative at ({a}, {b})")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A 1-cocycle `π: Q → Â`, `π(q₁q₂) = π(q₁) + q₁(π(q₂))`.
#[derive(Clone, Debug, Serialize)]
pub struct OneCocycle {
    #[serde(skip)]
    pub q: Arc<FiniteGroup>,
    pub module: AbelianModule,
    /// Character exponent vector per element of `Q`.
    pub values: Vec<Vec<u32>>,
    /// Modulus used for `c_π`; a multiple of `exp(A)`.
    pub modulus: u64,
}

impl OneCocycle {
    pub fn new(q: Arc<FiniteGroup>, module: AbelianModule, values: Vec<Vec<u32>>, modulus: Option<u64>) -> Result<Self> {
        module.validate(&q)?;
        if values.len() as u64 != q.order() {
            return Err(Error::Parameter(format!("π has {} values, expected {}", values.len(), q.order())));
        }
        let values: Vec<Vec<u32>> = values
            .into_iter()
            .map(|v| {
                if v.len() != module.rank() {
                    return Err(Error::Parameter("π value has the wrong length".into()));
                }
                Ok(v.iter().zip(&module.invariants).map(|(&x, &d)| x % d).collect())
            })
            .collect::<Result<_>>()?;
        let e = module.exponent();
        let modulus = modulus.unwrap_or(e);
        if modulus % e != 0 {
            return Err(Error::Parameter(format!("modulus {modulus} is not a multiple of exp(A) = {e}")));
        }
        let pi = OneCocycle {
            q,
            module,
            values,
            modulus,
        };
        pi.validate()?;
        Ok(pi)
    }

    pub fn zero(q: Arc<FiniteGroup>, module: AbelianModule) -> Result<Self> {
        let v = vec![vec![0; module.rank()]; q.order() as usize];
        Self::new(q, module, v, None)
    }

    pub fn value(&self, q: Elem) -> &[u32] {
        &self.values[q as usize]
    }

    /// `q(χ)` under the diagonal action.
    pub fn act_dual(&self, q: Elem, u: &[u32]) -> Vec<u32> {
        self.module.act_dual(self.q.inv(q), u)
    }

    /// Exhaustive check of the cocycle law and of the dual action law.
    pub fn validate(&self) -> Result<()> {
        let q = &self.q;
        let md = &self.module;
        if self.values[0].iter().any(|&x| x != 0) {
            return Err(Error::OneCocycleLaw(IDENTITY, IDENTITY));
        }
        let bad = q.elements().into_par_iter().find_map_first(|a| {
            q.elements().find_map(|b| {
                let lhs = &self.values[q.mul(a, b) as usize];
                let rhs = md.add(&self.values[a as usize], &self.act_dual(a, &self.values[b as usize]));
                (lhs != &rhs).then_some((a, b))
            })
        });
        if let Some((a, b)) = bad {
            return Err(Error::OneCocycleLaw(a, b));
        }
        // ⟨q(χ), q(a)⟩ = ⟨χ, a⟩ on basis characters and basis elements.
        for g in q.elements() {
            for i in 0..md.rank() {
                for j in 0..md.rank() {
                    let (u, a) = (md.basis(i), md.basis(j));
                    if md.pairing(&self.act_dual(g, &u), &md.act(g, &a)) != md.pairing(&u, &a) {
                        return Err(Error::Verification("dual action does not preserve the pairing".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// `π` is a bijection `Q → Â`.
    pub fn is_bijective(&self) -> bool {
        if self.q.order() != self.module.order() {
            return false;
        }
        let mut seen = std::collections::HashSet::new();
        self.values.iter().all(|v| seen.insert(v.clone()))
    }
}

/// `G = A ⋊ Q` with element `(a, q)` at index `a·|Q| + q`; `(a₁,q₁)(a₂,q₂) =
/// (a₁ + q₁(a₂), q₁q₂)`.
#[derive(Clone, Debug)]
pub struct Semidirect {
    pub group: Arc<FiniteGroup>,
    pub module: AbelianModule,
    pub q: Arc<FiniteGroup>,
}

impl Semidirect {
    pub fn build(module: &AbelianModule, q: &Arc<FiniteGroup>, limits: &Limits) -> Result<Self> {
        module.validate(q)?;
        let na = module.order();
        let nq = q.order();
        let n = na * nq;
        if n > limits.cayley {
            return Err(Error::Threshold {
                what: "semidirect product",
                size: n,
                limit: limits.cayley,
            });
        }
        let elems: Vec<Vec<u32>> = (0..na).map(|i| module.element(i)).collect();
        let n = n as usize;
        let nq = nq as usize;
        let table: Vec<Elem> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (x, y) = (idx / n, idx % n);
                let (a1, q1) = (x / nq, x % nq);
                let (a2, q2) = (y / nq, y % nq);
                let a = module.add(&elems[a1], &module.act(q1 as Elem, &elems[a2]));
                module.index(&a) * nq as Elem + q.mul(q1 as Elem, q2 as Elem)
            })
            .collect();
        let group = FiniteGroup::from_table(n, table, format!("A⋊{}", q.label()))?;
        Ok(Semidirect {
            group: Arc::new(group),
            module: module.clone(),
            q: q.clone(),
        })
    }

    pub fn split(&self, g: Elem) -> (Vec<u32>, Elem) {
        let nq = self.q.order() as Elem;
        (self.module.element((g / nq) as u64), g % nq)
    }

    pub fn a_subgroup(&self) -> SubgroupSet {
        let nq = self.q.order() as Elem;
        SubgroupSet::from_elements(&self.group, (0..self.module.order() as Elem).map(|a| a * nq))
            .expect("A is a subgroup")
    }
}

/// `c_π(a₁q₁, a₂q₂) = −⟨π(q₁), q₁(a₂)⟩` on `A ⋊ Q`.
pub fn cocycle_from_one_cocycle(pi: &OneCocycle, limits: &Limits) -> Result<(Semidirect, TwoCocycle)> {
    let sd = Semidirect::build(&pi.module, &pi.q, limits)?;
    let n = sd.group.order() as usize;
    let m = pi.modulus;
    let e = pi.module.exponent();
    let table: Vec<i64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (x, y) = ((idx / n) as Elem, (idx % n) as Elem);
            let (_, q1) = sd.split(x);
            let (a2, _) = sd.split(y);
            let v = pi.module.pairing(pi.value(q1), &pi.module.act(q1, &a2)) * (m / e);
            -(v as i64)
        })
        .collect();
    let c = TwoCocycle::from_table(sd.group.clone(), m, &table)?;
    Ok((sd, c))
}

/// Checks `α_{c_π}(a₁q₁, a₂q₂) = ⟨π(q₁), q₁(a₂)⟩ − ⟨π(q₂), q₂(a₁)⟩` on all
/// pairs whose `Q`-parts commute.
pub fn check_form_display(pi: &OneCocycle, sd: &Semidirect, c: &TwoCocycle) -> Result<()> {
    let g = &sd.group;
    let m = pi.modulus;
    let scale = m / pi.module.exponent();
    let bad = g.elements().into_par_iter().find_map_first(|x| {
        g.elements().find_map(|y| {
            let (a1, q1) = sd.split(x);
            let (a2, q2) = sd.split(y);
            if !pi.q.commute(q1, q2) {
                return None;
            }
            let lhs = alternating_form(c, x, y);
            let t1 = pi.module.pairing(pi.value(q1), &pi.module.act(q1, &a2)) * scale;
            let t2 = pi.module.pairing(pi.value(q2), &pi.module.act(q2, &a1)) * scale;
            (lhs != sub_mod(t1 % m, t2 % m, m)).then_some((x, y))
        })
    });
    match bad {
        Some((x, y)) => Err(Error::Verification(format!("form display fails at ({x}, {y})"))),
        None => Ok(()),
    }
}

/// Coordinates on a finite abelian subgroup: a basis with invariants.
#[derive(Clone, Debug)]
pub struct AbelianCoordinates {
    pub invariants: Vec<u32>,
    pub basis: Vec<Elem>,
    coords: HashMap<Elem, Vec<u32>>,
}

impl AbelianCoordinates {
    /// Greedy basis: repeatedly adjoin an element of maximal order whose
    /// cyclic subgroup meets the current span trivially; verified to span.
    pub fn compute(g: &FiniteGroup, a: &SubgroupSet) -> Result<Self> {
        if !a.is_abelian(g) {
            return Err(Error::Precondition("subgroup is not abelian".into()));
        }
        let mut span: HashMap<Elem, Vec<u32>> = HashMap::from([(IDENTITY, Vec::new())]);
        let mut basis = Vec::new();
        let mut invariants = Vec::new();
        let mut by_order: Vec<(u64, Elem)> = a.elements().iter().map(|&x| (g.elem_order(x), x)).collect();
        by_order.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
        while (span.len() as u64) < a.order() {
            let pick = by_order.iter().find(|&&(o, x)| {
                o > 1 && (1..o).all(|k| !span.contains_key(&g.pow(x, k)))
            });
            let Some(&(o, x)) = pick else {
                return Err(Error::Unsupported("could not find a direct-sum basis".into()));
            };
            let mut next = HashMap::with_capacity(span.len() * o as usize);
            for (&y, v) in &span {
                let mut z = y;
                for k in 0..o {
                    let mut w = v.clone();
                    w.push(k as u32);
                    next.insert(z, w);
                    z = g.mul(z, x);
                }
            }
            if next.len() != span.len() * o as usize {
                return Err(Error::Unsupported("greedy basis is not a direct sum".into()));
            }
            span = next;
            basis.push(x);
            invariants.push(o as u32);
        }
        Ok(AbelianCoordinates {
            invariants,
            basis,
            coords: span,
        })
    }

    pub fn coords(&self, x: Elem) -> Option<&[u32]> {
        self.coords.get(&x).map(|v| v.as_slice())
    }
}

/// Output of [`one_cocycle_from_class`].
#[derive(Clone, Debug, Serialize)]
pub struct ClassExtraction {
    pub pi: OneCocycle,
    #[serde(skip)]
    pub quotient: Quotient,
    /// Basis of `A` in `G` defining the coordinates of `Â`.
    pub basis: Vec<Elem>,
    pub bijective: bool,
    /// Present when `|A| = |Q|` and the comparison was requested.
    pub nondegenerate: Option<bool>,
}

/// `⟨π_c(q), b⟩ = c(b, s) − c(s, s⁻¹bs)` with `s` the minimal element of
/// the coset `q`. This is the scalar by which `U_s` conjugates `U_b` in
/// the twisted group algebra; it agrees with `α_c(s, b)` whenever `s` and
/// `b` commute.
pub fn one_cocycle_from_class(
    c: &TwoCocycle,
    a: &SubgroupSet,
    compare_nondegeneracy: bool,
    limits: &Limits,
) -> Result<ClassExtraction> {
    let g = c.group();
    if !is_normal(g, a) {
        return Err(Error::Precondition("A is not normal".into()));
    }
    let coords = AbelianCoordinates::compute(g, a)?;
    if !isotropy_test(c, a, limits)?.isotropic {
        return Err(Error::Precondition("A is not isotropic".into()));
    }
    let quotient = quotient_group(g, a, limits)?;
    let q = Arc::new(quotient.group.clone());
    let m = c.modulus();
    let inv = coords.invariants.clone();
    let module_exp = inv.iter().fold(1u64, |acc, &d| lcm(acc, d as u64));
    let r = inv.len();
    // Conjugation action in coordinates.
    let action: Vec<Vec<Vec<u32>>> = (0..q.order() as Elem)
        .map(|qe| {
            let s = quotient.section(qe);
            let mut mat = vec![vec![0u32; r]; r];
            for (j, &b) in coords.basis.iter().enumerate() {
                let img = coords.coords(g.conj(s, b)).expect("A is normal");
                for i in 0..r {
                    mat[i][j] = img[i];
                }
            }
            mat
        })
        .collect();
    let module = AbelianModule {
        invariants: inv.clone(),
        action,
    };
    let scalar = |s: Elem, b: Elem| sub_mod(c.eval(b, s), c.eval(s, g.mul(g.mul(g.inv(s), b), s)), m);
    let to_exponent = |v: u64, d: u32| -> Result<u32> {
        // v/m as an element of (1/d)Z/Z.
        let num = v as u128 * d as u128;
        if num % m as u128 != 0 {
            return Err(Error::Precondition("pairing value is not a character of A".into()));
        }
        Ok((num / m as u128) as u32 % d)
    };
    let mut values = Vec::with_capacity(q.order() as usize);
    for qe in 0..q.order() as Elem {
        let s = quotient.section(qe);
        let v: Vec<u32> = coords
            .basis
            .iter()
            .zip(&inv)
            .map(|(&b, &d)| to_exponent(scalar(s, b), d))
            .collect::<Result<_>>()?;
        // The value must not depend on the section.
        for &t in &coords.basis {
            let s2 = g.mul(s, t);
            for (&b, &val) in coords.basis.iter().zip(&v) {
                let d = inv[coords.basis.iter().position(|&x| x == b).unwrap()];
                if to_exponent(scalar(s2, b), d)? != val {
                    return Err(Error::Verification(format!("π_c depends on the section at coset {qe}")));
                }
            }
        }
        values.push(v);
    }
    let modulus = lcm(m, module_exp);
    let pi = OneCocycle::new(q.clone(), module, values, Some(modulus))?;
    let bijective = pi.is_bijective();
    let nondegenerate = if compare_nondegeneracy && a.order() == q.order() {
        let v = is_nondegenerate(c, limits, ScanMode::ClassRepresentatives)?;
        if v.nondegenerate != bijective {
            return Err(Error::Verification(format!(
                "bijectivity ({bijective}) disagrees with nondegeneracy ({})",
                v.nondegenerate
            )));
        }
        Some(v.nondegenerate)
    } else {
        None
    };
    Ok(ClassExtraction {
        pi,
        quotient,
        basis: coords.basis,
        bijective,
        nondegenerate,
    })
}

/// Result of comparing `c` with `c_{π_c}` on a split extension.
#[derive(Clone, Debug, Serialize)]
pub struct RoundTrip {
    pub pi_recovered: Vec<Vec<u32>>,
    /// `c − c_{π_c}` is cohomologous to a cocycle inflated from `Q`.
    pub residual_inflated: bool,
    /// The residual is itself a coboundary.
    pub residual_trivial: bool,
}

const ROUNDTRIP_LIMIT: u64 = 81;

/// For `G = A ⋊ Q` (as built by [`Semidirect`]) and `c` with `A` isotropic,
/// checks that `c − c_{π_c}` is inflated from `Q` up to a coboundary.
pub fn roundtrip_residual(sd: &Semidirect, c: &TwoCocycle, limits: &Limits) -> Result<RoundTrip> {
    let g = &sd.group;
    if g.order() > ROUNDTRIP_LIMIT {
        return Err(Error::Threshold {
            what: "round-trip residual solve",
            size: g.order(),
            limit: ROUNDTRIP_LIMIT,
        });
    }
    let a = sd.a_subgroup();
    let ex = one_cocycle_from_class(c, &a, false, limits)?;
    // Express π_c in the module's own coordinates: the extraction used a
    // greedy basis of A, so translate by evaluating characters on the
    // module basis.
    let nq = sd.q.order() as Elem;
    let m = lcm(c.modulus(), sd.module.exponent());
    let coords = AbelianCoordinates::compute(g, &a)?;
    // ⟨π_c(q), a⟩ in Z/m via the extraction's coordinates.
    let char_value = |qe: Elem, a_vec: &[u32]| -> u64 {
        let x = sd.module.index(a_vec) * nq;
        let cv = coords.coords(x).unwrap();
        let eq = ex.quotient.project(qe).unwrap();
        ex.pi.module.pairing(ex.pi.value(eq), cv) * (m / ex.pi.module.exponent())
    };
    let pi_values: Vec<Vec<u32>> = (0..nq)
        .map(|qe| {
            (0..sd.module.rank())
                .map(|j| {
                    let ej: Vec<u32> = (0..sd.module.rank()).map(|i| (i == j) as u32).collect();
                    let v = char_value(qe, &ej);
                    (v as u128 * sd.module.invariants[j] as u128 / m as u128) as u32
                })
                .collect()
        })
        .collect();
    let pi = OneCocycle::new(sd.q.clone(), sd.module.clone(), pi_values.clone(), Some(m))?;
    let (_, cpi) = cocycle_from_one_cocycle(&pi, limits)?;
    let c_m = c.lift(m / c.modulus());
    let d = c_m.sub(&cpi)?;
    // Solve d + δf = inf(e') over Z/(m·|Q|·exp G).
    let n = g.order() as usize;
    let qn = nq as usize;
    let expg = g.exponent(limits)?;
    let scale = qn as u64 * expg;
    let big = m * scale;
    let fvar = |x: usize| (x != 0).then(|| x - 1);
    let evar = |u: usize, v: usize| (u != 0 && v != 0).then(|| (n - 1) + (u - 1) * (qn - 1) + (v - 1));
    let cols = (n - 1) + (qn - 1) * (qn - 1);
    let build = |with_inflation: bool| {
        let mut mat = ModMatrix::new(cols.max(1), big);
        let mut rhs = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let xy = g.mul(x as Elem, y as Elem) as usize;
                let mut row: Vec<(usize, i64)> = Vec::new();
                // f(x) + f(y) − f(xy) − e'(q(x), q(y)) = −scale·d(x, y)
                for (v, s) in [(fvar(x), 1i64), (fvar(y), 1), (fvar(xy), -1)] {
                    if let Some(v) = v {
                        row.push((v, s));
                    }
                }
                if with_inflation {
                    if let Some(v) = evar(x % qn, y % qn) {
                        row.push((v, -1));
                    }
                }
                mat.push_row(row);
                rhs.push(crate::modular::neg_mod(mul_mod(scale, d.eval(x as Elem, y as Elem), big), big));
            }
        }
        (mat, rhs)
    };
    let (mat, rhs) = build(true);
    let inflated = matches!(solve_linear(&mat, &rhs), LinearSolution::Solved(_));
    let (mat, rhs) = build(false);
    let trivial = matches!(solve_linear(&mat, &rhs), LinearSolution::Solved(_));
    Ok(RoundTrip {
        pi_recovered: pi_values,
        residual_inflated: inflated,
        residual_trivial: trivial,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CupOrientation {
    /// `⟨(q₁q₂)·π(q₃), β(q₁, q₂)⟩`.
    BetaFirst,
    /// `⟨π(q₁), q₁·β(q₂, q₃)⟩`.
    PiFirst,
}

#[derive(Clone, Debug, Serialize)]
pub struct CupVerdict {
    pub vanishes: bool,
    pub orientation: CupOrientation,
    pub coefficients: Coefficients,
    pub cochain_modulus: u64,
    pub solve: Degree3Outcome,
}

/// Checks the twisted 2-cocycle law for an `A`-valued `β` on `Q`
/// (row-major table of module elements).
pub fn validate_beta(q: &FiniteGroup, module: &AbelianModule, beta: &[Vec<u32>]) -> Result<()> {
    let n = q.order() as usize;
    if beta.len() != n * n {
        return Err(Error::Parameter("β table has the wrong size".into()));
    }
    let b = |x: Elem, y: Elem| &beta[x as usize * n + y as usize];
    for x in q.elements() {
        for y in q.elements() {
            for z in q.elements() {
                let lhs = module.add(&module.act(x, b(y, z)), b(x, q.mul(y, z)));
                let rhs = module.add(b(q.mul(x, y), z), b(x, y));
                if lhs != rhs {
                    return Err(Error::CocycleIdentity(x, y, z));
                }
            }
        }
    }
    Ok(())
}

/// Decides whether `[β] ∪ [π]` vanishes in `H³(Q, ·)`.
pub fn cup_product_obstruction(
    beta: &[Vec<u32>],
    pi: &OneCocycle,
    orientation: CupOrientation,
    coefficients: Coefficients,
    limits: &Limits,
) -> Result<CupVerdict> {
    let q = &*pi.q;
    let md = &pi.module;
    if q.order() > limits.cup {
        return Err(Error::Threshold {
            what: "cup product",
            size: q.order(),
            limit: limits.cup,
        });
    }
    validate_beta(q, md, beta)?;
    let n = q.order() as usize;
    let m = md.exponent();
    let mut z = vec![0u64; n * n * n];
    for x in 0..n {
        for y in 0..n {
            for w in 0..n {
                let (xe, ye, we) = (x as Elem, y as Elem, w as Elem);
                z[(x * n + y) * n + w] = match orientation {
                    CupOrientation::BetaFirst => {
                        md.pairing(&pi.act_dual(q.mul(xe, ye), pi.value(we)), &beta[x * n + y])
                    }
                    CupOrientation::PiFirst => md.pairing(pi.value(xe), &md.act(xe, &beta[y * n + w])),
                };
            }
        }
    }
    let solve = degree3_coboundary(q, &z, m, coefficients, limits)?;
    Ok(CupVerdict {
        vanishes: solve.vanishes,
        orientation,
        coefficients,
        cochain_modulus: m,
        solve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{abelian_group, cyclic_group};

    fn elementary(p: u32, n: usize) -> Arc<FiniteGroup> {
        Arc::new(abelian_group(&vec![p; n]).unwrap())
    }

    /// Identity π on (Z_p)^n with trivial action: Q = A = (Z_p)^n.
    fn identity_pi(p: u32, n: usize) -> OneCocycle {
        let q = elementary(p, n);
        let module = AbelianModule::trivial_action(vec![p; n], q.order() as usize);
        let values = (0..q.order()).map(|x| digits(x as Elem, &vec![p; n])).collect();
        OneCocycle::new(q, module, values, None).unwrap()
    }

    #[test]
    fn zero_and_identity_are_valid() {
        let q = elementary(3, 2);
        let md = AbelianModule::trivial_action(vec![3, 3], 9);
        assert!(!OneCocycle::zero(q, md).unwrap().is_bijective());
        assert!(identity_pi(3, 2).is_bijective());
    }

    #[test]
    fn z4_canonical_and_doubling() {
        let q = Arc::new(cyclic_group(4).unwrap());
        let md = AbelianModule::trivial_action(vec![4], 4);
        let canon = OneCocycle::new(q.clone(), md.clone(), (0..4).map(|x| vec![x]).collect(), None).unwrap();
        assert!(canon.is_bijective());
        let double = OneCocycle::new(q, md, (0..4).map(|x| vec![2 * x % 4]).collect(), None).unwrap();
        assert!(!double.is_bijective());
    }

    #[test]
    fn law_violation_reports_pair() {
        let q = Arc::new(cyclic_group(3).unwrap());
        let md = AbelianModule::trivial_action(vec![3], 3);
        let err = OneCocycle::new(q, md, vec![vec![0], vec![1], vec![1]], None).unwrap_err();
        assert!(matches!(err, Error::OneCocycleLaw(..)));
    }

    #[test]
    fn identity_pi_gives_nondegenerate_standard_cocycle() {
        let limits = Limits::default();
        let pi = identity_pi(3, 1);
        let (sd, c) = cocycle_from_one_cocycle(&pi, &limits).unwrap();
        check_form_display(&pi, &sd, &c).unwrap();
        assert!(is_nondegenerate(&c, &limits, ScanMode::Exhaustive).unwrap().nondegenerate);
        assert!(isotropy_test(&c, &sd.a_subgroup(), &limits).unwrap().isotropic);
        let back = one_cocycle_from_class(&c, &sd.a_subgroup(), true, &limits).unwrap();
        assert!(back.bijective);
    }

    #[test]
    fn nontrivial_action_round_trip() {
        // Q = Z3 acting on A = (Z3)² by the unipotent matrix [[1,1],[0,1]].
        let limits = Limits::default();
        let q = Arc::new(cyclic_group(3).unwrap());
        let mats: Vec<Vec<Vec<u32>>> = (0..3u32).map(|k| vec![vec![1, k], vec![0, 1]]).collect();
        let md = AbelianModule {
            invariants: vec![3, 3],
            action: mats,
        };
        // π(q^k) = Σ_{i<k} q^i(χ) for a fixed χ solves the cocycle law when
        // Σ_{i<3} q^i(χ) = 0.
        let mut checked = 0;
        for chi in [[0u32, 0], [1, 0], [0, 1], [1, 2]] {
            let mut vals = vec![vec![0u32, 0]];
            for k in 1..3 {
                let prev: Vec<u32> = vals[k - 1].clone();
                let moved = md.act_dual(q.inv((k - 1) as Elem), &chi);
                vals.push(md.add(&prev, &moved));
            }
            let Ok(pi) = OneCocycle::new(q.clone(), md.clone(), vals, None) else { continue };
            let (sd, c) = cocycle_from_one_cocycle(&pi, &limits).unwrap();
            let rt = roundtrip_residual(&sd, &c, &limits).unwrap();
            assert_eq!(rt.pi_recovered, pi.values, "chi = {chi:?}");
            assert!(rt.residual_trivial);
            checked += 1;
        }
        assert!(checked >= 2);
    }

    #[test]
    fn cup_on_z4_extension_is_obstructed_both_ways() {
        let limits = Limits::default();
        let q = Arc::new(cyclic_group(2).unwrap());
        let md = AbelianModule::trivial_action(vec![2], 2);
        let pi = OneCocycle::new(q.clone(), md.clone(), vec![vec![0], vec![1]], None).unwrap();
        // β(1, 1) = 1: the extension Z2 → Z4 → Z2.
        let beta = vec![vec![0], vec![0], vec![0], vec![1]];
        for o in [CupOrientation::BetaFirst, CupOrientation::PiFirst] {
            for coeff in [Coefficients::Exact, Coefficients::RootsOfUnity] {
                let v = cup_product_obstruction(&beta, &pi, o, coeff, &limits).unwrap();
                assert!(!v.vanishes);
            }
        }
        let zero_beta = vec![vec![0]; 4];
        assert!(cup_product_obstruction(&zero_beta, &pi, CupOrientation::BetaFirst, Coefficients::RootsOfUnity, &limits)
            .unwrap()
            .vanishes);
    }
}
