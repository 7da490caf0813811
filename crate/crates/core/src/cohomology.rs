//! Coboundary membership, H²(G, Z/m), deflation through central elements
//! and degree-3 coboundary decisions.
//!
//! Two coefficient semantics are supported. `Exact` works in Z/m itself.
//! `RootsOfUnity` asks the question in C^*: a Z/m-valued cocycle on `H` is
//! a C^*-coboundary iff its image in Z/(m·exp H) is an ordinary coboundary
//! (if `δf = c` with `f` Q/Z-valued then `m·f` is a character, so `f` takes
//! values in `(1/(m·exp H))Z/Z`). Degree 3 lifts by `|Q|` for the same
//! reason: `H²(Q, Q/Z)` is killed by `|Q|`.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocycle::TwoCocycle;
use crate::error::{Error, Result};
use crate::group::{quotient_of_subgroup, Elem, FiniteGroup, Limits, Quotient, SubgroupSet, IDENTITY};
use crate::linalg::{solve_linear, verify_certificate, LinearSolution, LocalKernel, ModMatrix, StreamingEchelon};
use crate::modular::{add_mod, factor, gcd, inv_mod, lcm, mul_mod, neg_mod, pow_u64, sub_mod};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coefficients {
    /// Z/m as given.
    Exact,
    /// The roots of unity inside C^*.
    RootsOfUnity,
}

/// A 1-cochain `f` on a subgroup with `scale·c = δf (mod modulus)`, i.e.
/// `c(a, b) = f(a) + f(b) − f(ab)` after the lift `Z/m → Z/modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoboundaryWitness {
    pub modulus: u64,
    pub scale: u64,
    pub elements: Vec<Elem>,
    pub values: Vec<u64>,
}

impl CoboundaryWitness {
    pub fn value(&self, x: Elem) -> Option<u64> {
        self.elements.binary_search(&x).ok().map(|i| self.values[i])
    }

    /// Checks `scale·c = δf` on all pairs (or on 10⁶ sampled pairs when
    /// the subgroup is large).
    pub fn verify(&self, c: &TwoCocycle) -> bool {
        let g = c.group();
        let m = self.modulus;
        let n = self.elements.len();
        let check = |i: usize, j: usize| {
            let (a, b) = (self.elements[i], self.elements[j]);
            let Some(fab) = self.value(g.mul(a, b)) else { return false };
            let lhs = mul_mod(self.scale, c.eval(a, b), m);
            lhs == sub_mod(add_mod(self.values[i], self.values[j], m), fab, m)
        };
        if (n as u64).pow(2) <= 4_000_000 {
            (0..n).into_par_iter().all(|i| (0..n).all(|j| check(i, j)))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let pairs: Vec<(usize, usize)> = (0..1_000_000).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
            pairs.par_iter().all(|&(i, j)| check(i, j))
        }
    }
}

/// Weights on the defining equations `f(h) + f(s) − f(hs) = c(h, s)` whose
/// combination is formally zero on the left and nonzero on the right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonCoboundaryCertificate {
    pub modulus: u64,
    pub scale: u64,
    pub weights: Vec<((Elem, Elem), u64)>,
}

#[derive(Clone, Debug, Serialize)]
pub enum CoboundaryOutcome {
    Coboundary(CoboundaryWitness),
    NotCoboundary(NonCoboundaryCertificate),
}

impl CoboundaryOutcome {
    pub fn is_coboundary(&self) -> bool {
        matches!(self, CoboundaryOutcome::Coboundary(_))
    }
}

fn subgroup_exponent(g: &FiniteGroup, h: &SubgroupSet) -> u64 {
    h.elements().par_iter().map(|&x| g.elem_order(x)).reduce(|| 1, lcm)
}

fn lift_parameters(g: &FiniteGroup, h: &SubgroupSet, m: u64, mode: Coefficients) -> (u64, u64) {
    match mode {
        Coefficients::Exact => (m, 1),
        Coefficients::RootsOfUnity => {
            let e = subgroup_exponent(g, h);
            (m * e, e)
        }
    }
}

/// Unknowns are `f(s)` on the generators; every other value is propagated
/// along a BFS tree by `f(hs) = f(h) + f(s) − c(h, s)`. Each non-tree edge
/// becomes one linear equation. Edges over generators suffice because `c`
/// satisfies the cocycle identity.
struct EdgeSystem {
    elements: Vec<Elem>,
    gens: Vec<Elem>,
    modulus: u64,
    scale: u64,
    /// Per element: coefficients on the generator unknowns and a constant.
    forms: Vec<(Vec<u64>, u64)>,
    matrix: ModMatrix,
    rhs: Vec<u64>,
    labels: Vec<(Elem, Elem)>,
}

fn build_edge_system(c: &TwoCocycle, h: &SubgroupSet, mode: Coefficients) -> EdgeSystem {
    let g = c.group();
    let (modulus, scale) = lift_parameters(g, h, c.modulus(), mode);
    let elements = h.elements().to_vec();
    let mut gens: Vec<Elem> = h.generators().iter().copied().filter(|&s| s != IDENTITY).collect();
    gens.sort_unstable();
    gens.dedup();
    let k = gens.len();
    let idx = |x: Elem| elements.binary_search(&x).expect("closed subgroup");
    let cv = |a: Elem, b: Elem| mul_mod(scale, c.eval(a, b), modulus);
    let mut forms: Vec<Option<(Vec<u64>, u64)>> = vec![None; elements.len()];
    forms[idx(IDENTITY)] = Some((vec![0; k], 0));
    let mut queue = VecDeque::from([IDENTITY]);
    let mut matrix = ModMatrix::new(k, modulus);
    let mut rhs = Vec::new();
    let mut labels = Vec::new();
    while let Some(x) = queue.pop_front() {
        let (lx, kx) = forms[idx(x)].clone().unwrap();
        for (si, &s) in gens.iter().enumerate() {
            let xs = g.mul(x, s);
            let j = idx(xs);
            let mut l = lx.clone();
            l[si] = add_mod(l[si], 1, modulus);
            let kk = sub_mod(kx, cv(x, s), modulus);
            match &forms[j] {
                None => {
                    forms[j] = Some((l, kk));
                    queue.push_back(xs);
                }
                Some((lt, kt)) => {
                    // l·y + kk = lt·y + kt
                    let row: Vec<(usize, i64)> = (0..k)
                        .map(|t| (t, sub_mod(l[t], lt[t], modulus) as i64))
                        .filter(|&(_, v)| v != 0)
                        .collect();
                    let b = sub_mod(*kt, kk, modulus);
                    if row.is_empty() && b == 0 {
                        continue;
                    }
                    matrix.push_row(row);
                    rhs.push(b);
                    labels.push((x, s));
                }
            }
        }
    }
    EdgeSystem {
        elements,
        gens,
        modulus,
        scale,
        forms: forms.into_iter().map(|f| f.expect("generators reach every element")).collect(),
        matrix,
        rhs,
        labels,
    }
}

/// Decides whether `c` restricted to `h` is a coboundary.
pub fn coboundary_witness(c: &TwoCocycle, h: &SubgroupSet, mode: Coefficients, limits: &Limits) -> Result<CoboundaryOutcome> {
    if h.order() > limits.solver {
        return Err(Error::Threshold {
            what: "coboundary solver",
            size: h.order(),
            limit: limits.solver,
        });
    }
    let sys = build_edge_system(c, h, mode);
    let m = sys.modulus;
    match solve_linear(&sys.matrix, &sys.rhs) {
        LinearSolution::Solved(y) => {
            let values: Vec<u64> = sys
                .forms
                .iter()
                .map(|(l, k)| l.iter().zip(&y).fold(*k, |acc, (&a, &b)| add_mod(acc, mul_mod(a, b, m), m)))
                .collect();
            let w = CoboundaryWitness {
                modulus: m,
                scale: sys.scale,
                elements: sys.elements,
                values,
            };
            debug_assert!(w.verify(c));
            Ok(CoboundaryOutcome::Coboundary(w))
        }
        LinearSolution::Inconsistent { certificate } => {
            debug_assert!(verify_certificate(&sys.matrix, &sys.rhs, &certificate));
            let weights = sys
                .labels
                .iter()
                .zip(certificate)
                .filter(|(_, w)| *w != 0)
                .map(|(&l, w)| (l, w))
                .collect();
            let _ = &sys.gens;
            Ok(CoboundaryOutcome::NotCoboundary(NonCoboundaryCertificate {
                modulus: m,
                scale: sys.scale,
                weights,
            }))
        }
    }
}

/// Re-checks a certificate by rebuilding the equation system.
pub fn verify_non_coboundary(c: &TwoCocycle, h: &SubgroupSet, mode: Coefficients, cert: &NonCoboundaryCertificate) -> bool {
    let sys = build_edge_system(c, h, mode);
    if sys.modulus != cert.modulus {
        return false;
    }
    let mut w = vec![0u64; sys.labels.len()];
    for (label, weight) in &cert.weights {
        match sys.labels.iter().position(|l| l == label) {
            Some(i) => w[i] = *weight,
            None => return false,
        }
    }
    verify_certificate(&sys.matrix, &sys.rhs, &w)
}

/// Representatives and elementary divisors of `H²(G, Z/m)`.
#[derive(Clone, Debug)]
pub struct CohomologyBasis {
    pub group: Arc<FiniteGroup>,
    pub modulus: u64,
    pub representatives: Vec<TwoCocycle>,
    /// Order of each representative's class (prime powers).
    pub orders: Vec<u64>,
}

impl CohomologyBasis {
    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn invariants(&self) -> Vec<u64> {
        let mut v = self.orders.clone();
        v.sort_unstable();
        v
    }

    /// The class `Σ aᵢ·repᵢ`.
    pub fn class(&self, coeffs: &[u64]) -> TwoCocycle {
        assert_eq!(coeffs.len(), self.representatives.len());
        if coeffs.is_empty() {
            return TwoCocycle::zero(self.group.clone(), self.modulus);
        }
        TwoCocycle::combination(
            coeffs
                .iter()
                .zip(&self.representatives)
                .map(|(&a, r)| (a, r.clone()))
                .collect(),
        )
        .expect("representatives share group and modulus")
    }

    /// Coefficient vectors of every class, in lexicographic order.
    pub fn all_coefficients(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &o in &self.orders {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..o).map(move |a| {
                        let mut w = v.clone();
                        w.push(a);
                        w
                    })
                })
                .collect();
        }
        out
    }
}

/// Linear model of normalized 2-cocycles on a Cayley group determined by
/// their values `c(g, s)` on generators `s`.
struct GeneratorModel {
    n: usize,
    gens: Vec<Elem>,
    /// `forms[g·n + h]` expresses `c(g, h)` in the unknowns.
    forms: Vec<Vec<u64>>,
    cols: usize,
    /// BFS parent edge of each element.
    parent: Vec<Option<(Elem, usize)>>,
}

impl GeneratorModel {
    fn var(&self, x: Elem, si: usize) -> Option<usize> {
        (x != IDENTITY).then(|| (x as usize - 1) * self.gens.len() + si)
    }

    fn build(g: &FiniteGroup, m: u64) -> Self {
        let n = g.order() as usize;
        let mut gens: Vec<Elem> = g.generators().iter().copied().filter(|&s| s != IDENTITY).collect();
        gens.sort_unstable();
        gens.dedup();
        let k = gens.len();
        let cols = (n - 1) * k;
        let mut parent: Vec<Option<(Elem, usize)>> = vec![None; n];
        let mut order = vec![IDENTITY];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for (si, &s) in gens.iter().enumerate() {
                let y = g.mul(x, s);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    parent[y as usize] = Some((x, si));
                    order.push(y);
                }
            }
            i += 1;
        }
        let mut model = GeneratorModel {
            n,
            gens,
            forms: Vec::new(),
            cols,
            parent,
        };
        let forms: Vec<Vec<Vec<u64>>> = (0..n as Elem)
            .into_par_iter()
            .map(|a| {
                let mut row: Vec<Vec<u64>> = vec![Vec::new(); n];
                row[0] = vec![0; cols];
                for &h in &order[1..] {
                    let (hp, si) = model.parent[h as usize].unwrap();
                    // c(a, hp·s) = c(a·hp, s) + c(a, hp) − c(hp, s)
                    let mut v = row[hp as usize].clone();
                    if let Some(j) = model.var(g.mul(a, hp), si) {
                        v[j] = add_mod(v[j], 1, m);
                    }
                    if let Some(j) = model.var(hp, si) {
                        v[j] = sub_mod(v[j], 1, m);
                    }
                    row[h as usize] = v;
                }
                row
            })
            .collect();
        model.forms = forms.into_iter().flatten().collect();
        model
    }

    fn form(&self, a: Elem, b: Elem) -> &[u64] {
        &self.forms[a as usize * self.n + b as usize]
    }

    /// `δc(a, h, s) = c(h, s) − c(ah, s) + c(a, hs) − c(a, h)` as a row.
    fn constraint(&self, g: &FiniteGroup, a: Elem, h: Elem, si: usize, q: u64) -> Vec<u64> {
        let s = self.gens[si];
        let mut v: Vec<u64> = self
            .form(a, g.mul(h, s))
            .iter()
            .zip(self.form(a, h))
            .map(|(&x, &y)| sub_mod(x % q, y % q, q))
            .collect();
        if let Some(j) = self.var(h, si) {
            v[j] = add_mod(v[j], 1, q);
        }
        if let Some(j) = self.var(g.mul(a, h), si) {
            v[j] = sub_mod(v[j], 1, q);
        }
        v
    }

    /// Coordinates of `δf` for the indicator 1-cochain of `x`.
    fn coboundary_of_indicator(&self, g: &FiniteGroup, x: Elem, q: u64) -> Vec<u64> {
        let mut v = vec![0; self.cols];
        for a in 1..self.n as Elem {
            for (si, &s) in self.gens.iter().enumerate() {
                let val = (a == x) as i64 + (s == x) as i64 - (g.mul(a, s) == x) as i64;
                v[self.var(a, si).unwrap()] = crate::modular::reduce(val, q);
            }
        }
        v
    }

    fn table_from(&self, coords: &[u64], m: u64) -> Vec<u32> {
        self.forms
            .par_iter()
            .map(|f| f.iter().zip(coords).fold(0, |acc, (&a, &b)| add_mod(acc, mul_mod(a, b, m), m)) as u32)
            .collect()
    }
}

/// Homomorphisms `G → Z/E` (E = exponent) as value tables, one per cyclic
/// generator of `Hom(G, Z/E)`.
fn hom_generators(group: &Arc<FiniteGroup>, limits: &Limits) -> Result<Vec<Vec<u64>>> {
    let g = &**group;
    let e = g.exponent(limits)?;
    let whole = SubgroupSet::whole(g, limits)?;
    let sys = build_edge_system(&TwoCocycle::zero(group.clone(), e), &whole, Coefficients::Exact);
    let mut out = Vec::new();
    for (p, k) in factor(e) {
        let q = pow_u64(p, k);
        let local = ModMatrix::from_dense(
            &(0..sys.matrix.rows())
                .map(|i| {
                    let mut r = vec![0; sys.matrix.cols()];
                    for &(j, v) in sys.matrix.row(i) {
                        r[j] = v % q;
                    }
                    r
                })
                .collect::<Vec<_>>(),
            sys.matrix.cols(),
            q,
        );
        let ker = LocalKernel::compute(&local, p, k);
        for i in 0..ker.weights.len() {
            if ker.weights[i] == 0 {
                continue;
            }
            let y: Vec<u64> = ker.generator(i).iter().map(|&v| v * (e / q)).collect();
            let chi: Vec<u64> = sys
                .forms
                .iter()
                .map(|(l, _)| l.iter().zip(&y).fold(0, |acc, (&a, &b)| add_mod(acc, mul_mod(a, b, e), e)))
                .collect();
            // Stored by element (elements of the whole group are 0..n).
            out.push(chi);
        }
    }
    Ok(out.into_iter().map(|v| {
        let mut w = v;
        w.push(e);
        w
    }).collect())
}

/// Computes representatives of `H²(G, Z/m)` (`Exact`) or of its image in
/// `H²(G, C^*)`, the m-torsion of the Schur multiplier (`RootsOfUnity`).
///
/// The kernel of `H²(G, Z/m) → H²(G, C^*)` is spanned by the carry
/// cocycles `(χ̃(g) + χ̃(h) − χ̃(gh))/E` of homomorphisms `χ: G → Z/E`.
pub fn h2_representatives(group: Arc<FiniteGroup>, m: u64, mode: Coefficients, limits: &Limits) -> Result<CohomologyBasis> {
    let g = &*group;
    if g.order() > limits.h2 {
        return Err(Error::Threshold {
            what: "H² computation",
            size: g.order(),
            limit: limits.h2,
        });
    }
    if !g.is_cayley() {
        return Err(Error::Unsupported("H² requires a Cayley-backed group".into()));
    }
    if m == 0 {
        return Err(Error::Parameter("modulus must be positive".into()));
    }
    let n = g.order() as usize;
    let model = GeneratorModel::build(g, m);
    let homs = match mode {
        Coefficients::Exact => Vec::new(),
        Coefficients::RootsOfUnity => hom_generators(&group, limits)?,
    };
    let mut reps = Vec::new();
    let mut orders = Vec::new();
    for (p, e) in factor(m) {
        let q = pow_u64(p, e);
        let mut ech = StreamingEchelon::new(model.cols, p, e);
        for a in 1..n as Elem {
            for h in 0..n as Elem {
                for si in 0..model.gens.len() {
                    if model.parent[g.mul(h, model.gens[si]) as usize] == Some((h, si)) {
                        continue;
                    }
                    ech.push(model.constraint(g, a, h, si, q));
                }
            }
        }
        let kernel = LocalKernel::from_rows(&ech.rows(), model.cols, p, e);
        let mut boundaries: Vec<Vec<u64>> = (1..n as Elem).map(|x| model.coboundary_of_indicator(g, x, q)).collect();
        for chi in &homs {
            let e = chi[n];
            let mut v = vec![0; model.cols];
            for a in 1..n as Elem {
                for (si, &s) in model.gens.iter().enumerate() {
                    let carry = (chi[a as usize] + chi[s as usize] - chi[g.mul(a, s) as usize]) / e;
                    v[model.var(a, si).unwrap()] = carry % q;
                }
            }
            boundaries.push(v);
        }
        let classes = kernel
            .quotient(&boundaries)
            .ok_or_else(|| Error::Verification("a coboundary failed the cocycle equations".into()))?;
        let embed = m / q;
        for (v, w) in classes {
            let coords: Vec<u64> = v.iter().map(|&x| mul_mod(x, embed, m)).collect();
            let table = model.table_from(&coords, m);
            let c = TwoCocycle::from_table_unchecked(group.clone(), m, table);
            c.validate(0)?;
            reps.push(c);
            orders.push(pow_u64(p, w));
        }
    }
    Ok(CohomologyBasis {
        group,
        modulus: m,
        representatives: reps,
        orders,
    })
}

/// Result of deflating a cocycle through a central regular element `x`.
#[derive(Clone, Debug)]
pub struct Deflation {
    /// `K/⟨x⟩` with minimal coset representatives.
    pub quotient: Quotient,
    /// Cocycle on `quotient.group`, valued in Z/`modulus`.
    pub cocycle: TwoCocycle,
    pub modulus: u64,
    /// `scale·c + δf` is inflated from `cocycle` (pointwise on `K`).
    pub scale: u64,
    pub elements: Vec<Elem>,
    pub adjust: Vec<u64>,
}

pub fn deflate_through_central(c: &TwoCocycle, k: &SubgroupSet, x: Elem, limits: &Limits) -> Result<Deflation> {
    let g = c.group();
    if !k.contains(x) {
        return Err(Error::Precondition(format!("{x} is not in K")));
    }
    if let Some(&s) = k.generators().iter().find(|&&s| !g.commute(s, x)) {
        return Err(Error::Precondition(format!("{x} does not commute with {s}")));
    }
    let p = g.elem_order(x);
    if !crate::modular::is_prime(p) {
        return Err(Error::Precondition(format!("{x} has non-prime order {p}")));
    }
    if let Some(&y) = k.elements().par_iter().find_first(|&&y| c.eval(x, y) != c.eval(y, x)) {
        return Err(Error::Precondition(format!("{x} is not regular in K: pairs nontrivially with {y}")));
    }
    if k.order() > limits.solver {
        return Err(Error::Threshold {
            what: "deflation",
            size: k.order(),
            limit: limits.solver,
        });
    }
    let m0 = c.modulus();
    let powers: Vec<Elem> = (0..p).map(|i| g.pow(x, i)).collect();
    let sigma = powers.iter().fold(0, |acc, &y| add_mod(acc, c.eval(y, x), m0));
    // Solve p·t ≡ −scale·σ (mod scale·m).
    let (scale, t) = if gcd(p, m0) == 1 {
        (1, mul_mod(neg_mod(sigma, m0), inv_mod(p % m0, m0).unwrap_or(0), m0))
    } else if sigma % p == 0 {
        (1, neg_mod(sigma, m0) / p)
    } else {
        (p, neg_mod(sigma, m0))
    };
    let m = m0 * scale;
    let cs = |a: Elem, b: Elem| mul_mod(scale, c.eval(a, b), m);
    let elements = k.elements().to_vec();
    let idx = |y: Elem| elements.binary_search(&y).expect("closed subgroup");
    let mut f = vec![u64::MAX; elements.len()];
    for (i, &s) in elements.iter().enumerate() {
        if f[i] != u64::MAX {
            continue;
        }
        // s is the minimal element of its coset.
        let mut cur = s;
        let mut val = 0u64;
        f[i] = 0;
        for _ in 1..p {
            let next = g.mul(cur, x);
            val = add_mod(add_mod(val, t, m), cs(cur, x), m);
            f[idx(next)] = val;
            cur = next;
        }
    }
    let adjusted = |a: Elem, b: Elem| {
        let d = sub_mod(add_mod(f[idx(a)], f[idx(b)], m), f[idx(g.mul(a, b))], m);
        add_mod(cs(a, b), d, m)
    };
    if let Some(&y) = elements.iter().find(|&&y| adjusted(y, x) != 0) {
        return Err(Error::Verification(format!("deflation left c({y}, x) nonzero")));
    }
    let cyc = SubgroupSet::from_elements(g, powers.iter().copied())?;
    let quotient = quotient_of_subgroup(g, k, &cyc, limits)?;
    let qn = quotient.group.order() as usize;
    let table: Vec<u32> = (0..qn * qn)
        .into_par_iter()
        .map(|i| adjusted(quotient.reps[i / qn], quotient.reps[i % qn]) as u32)
        .collect();
    let qgroup = Arc::new(quotient.group.clone());
    let cocycle = TwoCocycle::from_table_unchecked(qgroup, m, table);
    // Inflation must reproduce the adjusted cocycle pointwise.
    let check = |a: Elem, b: Elem| {
        let (qa, qb) = (quotient.project(a).unwrap(), quotient.project(b).unwrap());
        cocycle.eval(qa, qb) == adjusted(a, b)
    };
    let n = elements.len();
    let ok = if (n as u64).pow(2) <= 4_000_000 {
        elements.par_iter().all(|&a| elements.iter().all(|&b| check(a, b)))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pairs: Vec<(Elem, Elem)> = (0..1_000_000)
            .map(|_| (elements[rng.gen_range(0..n)], elements[rng.gen_range(0..n)]))
            .collect();
        pairs.par_iter().all(|&(a, b)| check(a, b))
    };
    if !ok {
        return Err(Error::Verification("deflated cocycle does not inflate back".into()));
    }
    Ok(Deflation {
        quotient,
        cocycle,
        modulus: m,
        scale,
        elements,
        adjust: f,
    })
}

/// `δ` on 1-cochains: `f(g) + f(h) − f(gh)`.
pub fn delta1(g: &FiniteGroup, f: &[u64], m: u64) -> Vec<u64> {
    let n = g.order() as usize;
    let mut out = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            let ab = g.mul(a as Elem, b as Elem) as usize;
            out[a * n + b] = sub_mod(add_mod(f[a], f[b], m), f[ab], m);
        }
    }
    out
}

/// `δ` on 2-cochains: `c(h,k) − c(gh,k) + c(g,hk) − c(g,h)`.
pub fn delta2(g: &FiniteGroup, c: &[u64], m: u64) -> Vec<u64> {
    let n = g.order() as usize;
    let at = |a: usize, b: usize| c[a * n + b];
    let mut out = vec![0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            let ab = g.mul(a as Elem, b as Elem) as usize;
            for k in 0..n {
                let bk = g.mul(b as Elem, k as Elem) as usize;
                let v = add_mod(sub_mod(at(b, k), at(ab, k), m), sub_mod(at(a, bk), at(a, b), m), m);
                out[(a * n + b) * n + k] = v;
            }
        }
    }
    out
}

/// `δ` on 3-cochains.
pub fn delta3(g: &FiniteGroup, z: &[u64], m: u64) -> Vec<u64> {
    let n = g.order() as usize;
    let at = |a: usize, b: usize, c: usize| z[(a * n + b) * n + c];
    let mut out = vec![0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            let ab = g.mul(a as Elem, b as Elem) as usize;
            for c in 0..n {
                let bc = g.mul(b as Elem, c as Elem) as usize;
                for d in 0..n {
                    let cd = g.mul(c as Elem, d as Elem) as usize;
                    let mut v = sub_mod(at(b, c, d), at(ab, c, d), m);
                    v = add_mod(v, at(a, bc, d), m);
                    v = sub_mod(v, at(a, b, cd), m);
                    v = add_mod(v, at(a, b, c), m);
                    out[((a * n + b) * n + c) * n + d] = v;
                }
            }
        }
    }
    out
}

/// Outcome of the degree-3 coboundary decision.
#[derive(Clone, Debug, Serialize)]
pub struct Degree3Outcome {
    pub vanishes: bool,
    pub modulus: u64,
    pub scale: u64,
    /// Normalized 2-cochain `b` (row-major) with `δb = scale·z`.
    pub witness: Option<Vec<u64>>,
}

/// Decides whether a normalized 3-cocycle `z` (row-major `|Q|³`, in Z/m)
/// is a coboundary.
pub fn degree3_coboundary(q: &FiniteGroup, z: &[u64], m: u64, mode: Coefficients, limits: &Limits) -> Result<Degree3Outcome> {
    let n = q.order() as usize;
    if q.order() > limits.cup {
        return Err(Error::Threshold {
            what: "degree-3 solve",
            size: q.order(),
            limit: limits.cup,
        });
    }
    if z.len() != n * n * n {
        return Err(Error::Parameter("3-cochain has the wrong length".into()));
    }
    if delta3(q, z, m).iter().any(|&v| v != 0) {
        return Err(Error::Precondition("obstruction cochain is not a 3-cocycle".into()));
    }
    let (modulus, scale) = match mode {
        Coefficients::Exact => (m, 1),
        Coefficients::RootsOfUnity => (m * q.order(), q.order()),
    };
    let var = |a: usize, b: usize| (a != 0 && b != 0).then(|| (a - 1) * (n - 1) + (b - 1));
    let cols = (n - 1) * (n - 1);
    let mut gens: Vec<Elem> = q.generators().iter().copied().filter(|&s| s != IDENTITY).collect();
    gens.sort_unstable();
    gens.dedup();
    let mut a_mat = ModMatrix::new(cols.max(1), modulus);
    let mut rhs = Vec::new();
    // δb(a, h, s) = b(h,s) − b(ah,s) + b(a,hs) − b(a,h); generator s suffices.
    for a in 1..n {
        for h in 1..n {
            for &s in &gens {
                let s = s as usize;
                let ah = q.mul(a as Elem, h as Elem) as usize;
                let hs = q.mul(h as Elem, s as Elem) as usize;
                let terms = [(var(h, s), 1i64), (var(ah, s), -1), (var(a, hs), 1), (var(a, h), -1)];
                a_mat.push_row(terms.into_iter().filter_map(|(v, c)| v.map(|v| (v, c))));
                rhs.push(mul_mod(scale, z[(a * n + h) * n + s], modulus));
            }
        }
    }
    match solve_linear(&a_mat, &rhs) {
        LinearSolution::Solved(x) => {
            let mut b = vec![0u64; n * n];
            for a in 1..n {
                for h in 1..n {
                    b[a * n + h] = x[var(a, h).unwrap()];
                }
            }
            let d = delta2(q, &b, modulus);
            if d.iter().zip(z).any(|(&u, &v)| u != mul_mod(scale, v, modulus)) {
                return Err(Error::Verification("degree-3 witness fails δb = z".into()));
            }
            Ok(Degree3Outcome {
                vanishes: true,
                modulus,
                scale,
                witness: Some(b),
            })
        }
        LinearSolution::Inconsistent { .. } => Ok(Degree3Outcome {
            vanishes: false,
            modulus,
            scale,
            witness: None,
        }),
    }
}
