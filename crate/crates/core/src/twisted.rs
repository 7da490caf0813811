//! Twisted group algebra diagnostics, the monomial module for `A × Â`, the
//! intertwiner obstruction, and the transgression / extension / induction
//! pipeline for Heisenberg groups.

use std::collections::VecDeque;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cocycle::{alternating_form, TwoCocycle};
use crate::cohomology::{coboundary_witness, Coefficients};
use crate::error::{Error, Result};
use crate::family::FamilyGroup;
use crate::group::{
    conjugacy_classes, is_normal, quotient_group, subgroup_generated, Elem, FiniteGroup, Limits, Quotient,
    SubgroupSet, IDENTITY,
};
use crate::iyb::AbelianCoordinates;
use crate::linalg::{local_echelon_rows, solve_linear, LinearSolution, LocalKernel, ModMatrix};
use crate::modular::{add_mod, crt, factor, gcd, is_prime, mul_mod, pow_u64, sub_mod};
use crate::search::{search_lagrangian, LagrangianOptions, SearchStatus, Strategy};

const NORM_TOLERANCE: f64 = 1e-6;

// ---------------------------------------------------------------------------
// Homomorphisms from subgroups

/// A homomorphism `N → Z/m` on a subgroup, stored on its sorted elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupCharacter {
    pub elements: Vec<Elem>,
    pub values: Vec<u64>,
    pub modulus: u64,
}

impl SubgroupCharacter {
    pub fn value(&self, x: Elem) -> Option<u64> {
        self.elements.binary_search(&x).ok().map(|i| self.values[i])
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Builds the homomorphism determined by images of `n`'s generators.
    pub fn from_generator_images(g: &FiniteGroup, n: &SubgroupSet, images: &[(Elem, u64)], m: u64) -> Result<Self> {
        let sols = homomorphisms(g, n, m, images, 1)?;
        sols.particular
            .ok_or_else(|| Error::Parameter("generator images do not define a homomorphism".into()))
    }

    /// Checks the homomorphism law exhaustively.
    pub fn validate(&self, g: &FiniteGroup) -> Result<()> {
        for (i, &x) in self.elements.iter().enumerate() {
            for (j, &y) in self.elements.iter().enumerate() {
                let xy = self.value(g.mul(x, y)).ok_or_else(|| Error::NotSubgroup("N is not closed".into()))?;
                if xy != add_mod(self.values[i], self.values[j], self.modulus) {
                    return Err(Error::Parameter(format!("not a homomorphism at ({x}, {y})")));
                }
            }
        }
        Ok(())
    }
}

/// All homomorphisms `H → Z/m` agreeing with `constraints`.
#[derive(Clone, Debug, Serialize)]
pub struct HomSolutions {
    pub particular: Option<SubgroupCharacter>,
    /// Number of solutions (0 when inconsistent).
    pub count: u64,
    /// Up to `cap` solutions, the particular one first.
    pub enumerated: Vec<SubgroupCharacter>,
}

/// Solves for `f: H → Z/m` with `f(xy) = f(x) + f(y)` and `f(n) = v` for
/// each `(n, v)` in `constraints`. Unknowns are the generator images;
/// values propagate along a BFS tree and each non-tree edge is an equation.
pub fn homomorphisms(g: &FiniteGroup, h: &SubgroupSet, m: u64, constraints: &[(Elem, u64)], cap: usize) -> Result<HomSolutions> {
    let elements = h.elements().to_vec();
    let mut gens: Vec<Elem> = h.generators().iter().copied().filter(|&s| s != IDENTITY).collect();
    gens.sort_unstable();
    gens.dedup();
    let k = gens.len();
    let idx = |x: Elem| elements.binary_search(&x).map_err(|_| Error::NotSubgroup(format!("{x} outside H")));
    let mut forms: Vec<Option<Vec<u64>>> = vec![None; elements.len()];
    forms[idx(IDENTITY)?] = Some(vec![0; k]);
    let mut queue = VecDeque::from([IDENTITY]);
    let mut a = ModMatrix::new(k.max(1), m);
    let mut b = Vec::new();
    while let Some(x) = queue.pop_front() {
        let lx = forms[idx(x)?].clone().unwrap();
        for (si, &s) in gens.iter().enumerate() {
            let xs = g.mul(x, s);
            let j = idx(xs)?;
            let mut l = lx.clone();
            l[si] = add_mod(l[si], 1, m);
            match &forms[j] {
                None => {
                    forms[j] = Some(l);
                    queue.push_back(xs);
                }
                Some(lt) => {
                    let row: Vec<(usize, i64)> = (0..k)
                        .map(|t| (t, sub_mod(l[t], lt[t], m) as i64))
                        .filter(|&(_, v)| v != 0)
                        .collect();
                    if !row.is_empty() {
                        a.push_row(row);
                        b.push(0);
                    }
                }
            }
        }
    }
    let forms: Vec<Vec<u64>> = forms.into_iter().map(|f| f.expect("generators reach every element")).collect();
    for &(x, v) in constraints {
        let l = &forms[idx(x)?];
        a.push_row(l.iter().enumerate().map(|(t, &c)| (t, c as i64)).filter(|&(_, c)| c != 0));
        b.push(v % m);
    }
    let eval = |y: &[u64]| -> SubgroupCharacter {
        let values = forms
            .iter()
            .map(|l| l.iter().zip(y).fold(0, |acc, (&c, &v)| add_mod(acc, mul_mod(c, v, m), m)))
            .collect();
        SubgroupCharacter {
            elements: elements.clone(),
            values,
            modulus: m,
        }
    };
    let y0 = match solve_linear(&a, &b) {
        LinearSolution::Solved(y) => y,
        LinearSolution::Inconsistent { .. } => {
            return Ok(HomSolutions {
                particular: None,
                count: 0,
                enumerated: Vec::new(),
            })
        }
    };
    // Kernel per prime power, combined by CRT.
    let mut per_prime: Vec<(u64, Vec<Vec<u64>>)> = Vec::new();
    let mut count = 1u64;
    for (p, e) in factor(m) {
        let q = pow_u64(p, e);
        let ker = LocalKernel::from_rows(&local_echelon_rows(&a, p, e), a.cols(), p, e);
        let gens: Vec<(Vec<u64>, u64)> = (0..a.cols())
            .filter(|&i| ker.weights[i] > 0)
            .map(|i| (ker.generator(i), pow_u64(p, ker.weights[i])))
            .collect();
        count = count.saturating_mul(gens.iter().map(|(_, o)| *o).product::<u64>());
        let mut vecs = vec![vec![0u64; a.cols()]];
        for (v, o) in &gens {
            if vecs.len() >= cap {
                break;
            }
            let mut next = Vec::new();
            for base in &vecs {
                for t in 0..*o {
                    next.push(base.iter().zip(v).map(|(&x, &y)| add_mod(x, mul_mod(t, y, q), q)).collect());
                }
            }
            vecs = next;
        }
        vecs.truncate(cap);
        per_prime.push((q, vecs));
    }
    // Cartesian product over primes: combine kernel components by CRT.
    let mut kernel: Vec<(Vec<u64>, u64)> = vec![(vec![0; a.cols()], 1)];
    for (q, vecs) in &per_prime {
        let mut next = Vec::new();
        'outer: for (base, n) in &kernel {
            for v in vecs {
                let combined = base.iter().zip(v).map(|(&x, &y)| crt(&[(x, *n), (y, *q)]).0).collect();
                next.push((combined, n * q));
                if next.len() >= cap {
                    break 'outer;
                }
            }
        }
        kernel = next;
    }
    let combos: Vec<Vec<u64>> = kernel
        .iter()
        .map(|(kv, _)| y0.iter().zip(kv).map(|(&x, &y)| add_mod(x, y, m)).collect())
        .collect();
    let particular = eval(&y0);
    let enumerated: Vec<SubgroupCharacter> = combos.iter().take(cap).map(|y| eval(y)).collect();
    Ok(HomSolutions {
        particular: Some(particular),
        count,
        enumerated,
    })
}

// ---------------------------------------------------------------------------
// Conjugation action

#[derive(Clone, Debug, Serialize)]
pub struct ConjugationActionReport {
    pub a: SubgroupSet,
    pub kernel: SubgroupSet,
    /// Elementwise centralizer of `A`.
    pub centralizer_order: u64,
    /// Basis of `A` used for character coordinates.
    pub a_basis: Vec<Elem>,
    pub a_invariants: Vec<u32>,
    /// Values of `α_c(bᵢ, g)` on the basis, one vector per generator of `B`.
    pub b_generators: Vec<Vec<u64>>,
    pub b_order: u64,
    pub a_in_kernel: bool,
}

/// `ker η = {g : gag⁻¹ = a and α_c(a, g) = 0 for all a ∈ A}` and the group
/// `B ≤ Â` of restrictions `α_c(−, g)|_A` for `g` centralizing `A`.
pub fn conjugation_action(c: &TwoCocycle, a: &SubgroupSet, limits: &Limits) -> Result<ConjugationActionReport> {
    let g = c.group();
    g.require_scan(limits)?;
    if !is_normal(g, a) {
        return Err(Error::NotNormal("A".into()));
    }
    let coords = AbelianCoordinates::compute(g, a)?;
    let cent: Vec<Elem> = g
        .elements()
        .into_par_iter()
        .filter(|&x| a.generators().iter().all(|&s| g.commute(x, s)))
        .collect();
    let restriction = |x: Elem| -> Vec<u64> { coords.basis.iter().map(|&b| alternating_form(c, b, x)).collect() };
    let rows: Vec<(Elem, Vec<u64>)> = cent.par_iter().map(|&x| (x, restriction(x))).collect();
    let kernel_elems: Vec<Elem> = rows.iter().filter(|(_, v)| v.iter().all(|&t| t == 0)).map(|(x, _)| *x).collect();
    let kernel = SubgroupSet::from_elements(g, kernel_elems)?;
    let mut distinct: Vec<Vec<u64>> = rows.into_iter().map(|(_, v)| v).collect();
    distinct.sort();
    distinct.dedup();
    let b_order = distinct.len() as u64;
    // Greedy generators of B under pointwise addition.
    let m = c.modulus();
    let mut span: Vec<Vec<u64>> = vec![vec![0; coords.basis.len()]];
    let mut b_generators = Vec::new();
    for v in &distinct {
        if span.contains(v) {
            continue;
        }
        b_generators.push(v.clone());
        let mut next = span.clone();
        let mut frontier = span.clone();
        while !frontier.is_empty() {
            let mut nf = Vec::new();
            for s in &frontier {
                let t: Vec<u64> = s.iter().zip(v).map(|(&x, &y)| add_mod(x, y, m)).collect();
                if !next.contains(&t) {
                    next.push(t.clone());
                    nf.push(t);
                }
            }
            frontier = nf;
        }
        span = next;
    }
    if span.len() as u64 != b_order {
        return Err(Error::Verification("B is not closed under addition".into()));
    }
    let a_in_kernel = a.is_subset_of(&kernel);
    Ok(ConjugationActionReport {
        a: a.clone(),
        kernel,
        centralizer_order: cent.len() as u64,
        a_basis: coords.basis,
        a_invariants: coords.invariants,
        b_generators,
        b_order,
        a_in_kernel,
    })
}

// ---------------------------------------------------------------------------
// Monomial module

/// Monomial matrix: column `b` has `ζ^{phase[b]}` in row `target[b]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialMatrix {
    pub target: Vec<u32>,
    pub phase: Vec<u32>,
    pub modulus: u32,
}

impl MonomialMatrix {
    pub fn identity(dim: usize, modulus: u32) -> Self {
        MonomialMatrix {
            target: (0..dim as u32).collect(),
            phase: vec![0; dim],
            modulus,
        }
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    /// `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        let m = self.modulus;
        let (target, phase) = (0..other.dim())
            .map(|b| {
                let t = other.target[b] as usize;
                (self.target[t], (other.phase[b] + self.phase[t]) % m)
            })
            .unzip();
        MonomialMatrix { target, phase, modulus: m }
    }

    pub fn inverse(&self) -> Self {
        let m = self.modulus;
        let mut target = vec![0; self.dim()];
        let mut phase = vec![0; self.dim()];
        for b in 0..self.dim() {
            let t = self.target[b] as usize;
            target[t] = b as u32;
            phase[t] = (m - self.phase[b]) % m;
        }
        MonomialMatrix { target, phase, modulus: m }
    }

    pub fn scaled(&self, k: u32) -> Self {
        let m = self.modulus;
        MonomialMatrix {
            target: self.target.clone(),
            phase: self.phase.iter().map(|&x| (x + k) % m).collect(),
            modulus: m,
        }
    }

    pub fn is_monomial(&self) -> bool {
        let mut seen = vec![false; self.dim()];
        self.target.iter().all(|&t| (t as usize) < seen.len() && !std::mem::replace(&mut seen[t as usize], true))
    }

    /// Trace as a sum of roots of unity: counts per exponent.
    pub fn trace(&self) -> Cyclotomic {
        let mut coeffs = vec![0i64; self.modulus as usize];
        for b in 0..self.dim() {
            if self.target[b] as usize == b {
                coeffs[self.phase[b] as usize] += 1;
            }
        }
        Cyclotomic { coeffs }
    }
}

/// `Σ a_k ζ_m^k` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cyclotomic {
    pub coeffs: Vec<i64>,
}

impl Cyclotomic {
    pub fn zero(m: usize) -> Self {
        Cyclotomic { coeffs: vec![0; m] }
    }

    pub fn modulus(&self) -> usize {
        self.coeffs.len()
    }

    pub fn to_complex(&self) -> Complex64 {
        let m = self.modulus() as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &a)| Complex64::from_polar(a as f64, 2.0 * std::f64::consts::PI * k as f64 / m))
            .sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.modulus();
        let mut out = vec![0i64; m];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[(i + j) % m] += a * b;
            }
        }
        Cyclotomic { coeffs: out }
    }

    pub fn conj(&self) -> Self {
        let m = self.modulus();
        let mut out = vec![0i64; m];
        for (k, &a) in self.coeffs.iter().enumerate() {
            out[(m - k) % m] += a;
        }
        Cyclotomic { coeffs: out }
    }

    /// The rational value, when `m` is prime (or 1) and the element is
    /// rational: modulo `1 + ζ + … + ζ^{m−1}` that means all non-constant
    /// coefficients agree.
    pub fn rational_value(&self) -> Option<i64> {
        let m = self.modulus();
        if m == 1 {
            return Some(self.coeffs[0]);
        }
        if !is_prime(m as u64) {
            return None;
        }
        let c1 = self.coeffs[1];
        self.coeffs[1..].iter().all(|&x| x == c1).then(|| self.coeffs[0] - c1)
    }
}

/// Projective representation of a subgroup by monomial matrices.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectiveModule {
    /// Basis labels: `w_a` for `a` in this list of group elements.
    pub basis: Vec<Elem>,
    /// Elements `h` of the represented subgroup and their matrices.
    pub elements: Vec<Elem>,
    #[serde(skip)]
    pub matrices: Vec<MonomialMatrix>,
    pub modulus: u64,
    pub law_checked_pairs: u64,
    pub character_norm: f64,
    pub character_norm_exact: Option<(i64, u64)>,
}

impl ProjectiveModule {
    pub fn matrix(&self, h: Elem) -> Option<&MonomialMatrix> {
        self.elements.binary_search(&h).ok().map(|i| &self.matrices[i])
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_irreducible(&self) -> bool {
        (self.character_norm - 1.0).abs() < NORM_TOLERANCE
    }
}

const NU_DIM_LIMIT: u64 = 3125;
const LAW_EXHAUSTIVE_LIMIT: u64 = 1_000_000;
const LAW_SAMPLES: usize = 200_000;

/// `ν: C^{c_π}H → End(W)` for `H = A × Â` inside the family group:
/// `ν(aχ) w_b = ζ^{−⟨χ, b⟩} w_{a+b}`.
pub fn build_module_nu(c: &TwoCocycle, seed: u64) -> Result<ProjectiveModule> {
    let g = c.group();
    let fam = g.as_family().ok_or_else(|| Error::Unsupported("module ν needs the family group".into()))?;
    let (p, n) = (fam.p, fam.n);
    let dim = (p as u64).pow(n as u32);
    if dim > NU_DIM_LIMIT {
        return Err(Error::Threshold {
            what: "module ν dimension",
            size: dim,
            limit: NU_DIM_LIMIT,
        });
    }
    let m = c.modulus();
    if m != p as u64 {
        return Err(Error::Parameter("family cocycle modulus must equal p".into()));
    }
    let vec_of = |idx: u64| -> Vec<u32> { crate::group::digits(idx as Elem, &vec![p; n]) };
    let basis: Vec<Elem> = (0..dim).map(|i| h_elem(fam, &vec_of(i), &vec![0; n])).collect();
    let index_of = |a: &[u32]| -> u32 { a.iter().fold(0u64, |acc, &d| acc * p as u64 + d as u64) as u32 };
    let mut elements = Vec::with_capacity((dim * dim) as usize);
    for ai in 0..dim {
        for ui in 0..dim {
            elements.push(h_elem(fam, &vec_of(ai), &vec_of(ui)));
        }
    }
    elements.sort_unstable();
    let matrices: Vec<MonomialMatrix> = elements
        .par_iter()
        .map(|&h| {
            let e = fam.decode(h);
            let (target, phase) = (0..dim)
                .map(|bi| {
                    let b = vec_of(bi);
                    let sum: Vec<u32> = b.iter().zip(&e.a).map(|(&x, &y)| (x + y) % p).collect();
                    let pair = e.u.iter().zip(&b).map(|(&x, &y)| x as u64 * y as u64).sum::<u64>() % p as u64;
                    (index_of(&sum), ((p as u64 - pair) % p as u64) as u32)
                })
                .unzip();
            MonomialMatrix {
                target,
                phase,
                modulus: p,
            }
        })
        .collect();
    let mut module = ProjectiveModule {
        basis,
        elements,
        matrices,
        modulus: m,
        law_checked_pairs: 0,
        character_norm: 0.0,
        character_norm_exact: None,
    };
    module.law_checked_pairs = check_projective_law(&module, c, seed)?;
    let (norm, exact) = projective_character_norm(&module);
    module.character_norm = norm;
    module.character_norm_exact = exact;
    Ok(module)
}

fn h_elem(fam: &FamilyGroup, a: &[u32], u: &[u32]) -> Elem {
    fam.encode(&crate::family::FamilyElem {
        a: a.to_vec(),
        u: u.to_vec(),
        i: 0,
        j: 0,
    })
}

/// `ν(g)ν(h) = ζ^{c(g,h)} ν(gh)`; exhaustive up to 10⁶ pairs, else sampled.
pub fn check_projective_law(module: &ProjectiveModule, c: &TwoCocycle, seed: u64) -> Result<u64> {
    use rand::{Rng, SeedableRng};
    let g = c.group();
    let n = module.elements.len();
    for mat in &module.matrices {
        if !mat.is_monomial() {
            return Err(Error::Verification("matrix is not monomial".into()));
        }
    }
    let idn = module.matrix(IDENTITY).ok_or_else(|| Error::NotSubgroup("identity missing".into()))?;
    if *idn != MonomialMatrix::identity(module.dim(), idn.modulus) {
        return Err(Error::Verification("U_e is not the identity".into()));
    }
    let check = |i: usize, j: usize| -> Option<(Elem, Elem)> {
        let (x, y) = (module.elements[i], module.elements[j]);
        let lhs = module.matrices[i].mul(&module.matrices[j]);
        let rhs = module.matrix(g.mul(x, y))?.scaled(c.eval(x, y) as u32);
        (lhs != rhs).then_some((x, y))
    };
    let pairs = (n as u64) * (n as u64);
    let (bad, checked) = if pairs <= LAW_EXHAUSTIVE_LIMIT {
        ((0..n).into_par_iter().find_map_first(|i| (0..n).find_map(|j| check(i, j))), pairs)
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<(usize, usize)> = (0..LAW_SAMPLES).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        (samples.par_iter().find_map_first(|&(i, j)| check(i, j)), LAW_SAMPLES as u64)
    };
    match bad {
        Some((x, y)) => Err(Error::Verification(format!("projective law fails at ({x}, {y})"))),
        None => Ok(checked),
    }
}

/// `(1/|H|) Σ |tr ν(h)|²` as a float and, when exact, as a reduced fraction.
pub fn projective_character_norm(module: &ProjectiveModule) -> (f64, Option<(i64, u64)>) {
    let traces: Vec<Cyclotomic> = module.matrices.par_iter().map(|m| m.trace()).collect();
    let order = module.elements.len() as u64;
    let float: f64 = traces.iter().map(|t| t.to_complex().norm_sqr()).sum::<f64>() / order as f64;
    let exact = traces
        .iter()
        .map(|t| t.mul(&t.conj()).rational_value())
        .sum::<Option<i64>>()
        .map(|s| reduce_fraction(s, order));
    (float, exact)
}

fn reduce_fraction(num: i64, den: u64) -> (i64, u64) {
    let g = gcd(num.unsigned_abs(), den).max(1);
    (num / g as i64, den / g)
}

// ---------------------------------------------------------------------------
// Intertwiners

#[derive(Clone, Debug, Serialize)]
pub struct IntertwinerReport {
    pub p: u32,
    pub n: usize,
    pub r: u32,
    pub module_dim: usize,
    pub m_r_m_s_commute: bool,
    /// `M_R ν(h) M_R⁻¹ = ζ^{c(R,h) − c(RhR⁻¹,R)} ν(RhR⁻¹)` for all `h ∈ H` (and for `S`).
    pub conjugation_compatible: bool,
    /// `α_c(R, S)`: the exponent of the forced scalar.
    pub alpha_r_s: u64,
    /// Exponent `e` with `U_R U_S U_R⁻¹ U_S⁻¹ = ζ^e` in the twisted algebra.
    pub commutator_exponent: u64,
    /// Whether ν extends to a `p^n`-dimensional projective representation of `G`.
    pub extension_exists: bool,
    /// Dimension of the irreducible projective representations when no
    /// extension exists (`√|G|`).
    pub forced_dimension: Option<u64>,
}

/// Builds `M_R w_a = w_{R(a)}`, `M_S w_a = w_{S(a)}` and reports the scalar
/// that any extension of ν would force on the commutator of `U_R`, `U_S`.
pub fn intertwiner_obstruction(c: &TwoCocycle, seed: u64) -> Result<IntertwinerReport> {
    let g = c.group();
    let fam = g.as_family().ok_or_else(|| Error::Unsupported("intertwiners need the family group".into()))?;
    let r = c
        .family_parameter()
        .ok_or_else(|| Error::Unsupported("intertwiners need a family cocycle".into()))?;
    let module = build_module_nu(c, seed)?;
    let (p, n) = (fam.p, fam.n);
    let dim = module.dim();
    let perm = |i: u32, j: u32| -> MonomialMatrix {
        let mat = fam.action_on_a(i, j);
        let target = (0..dim as u64)
            .map(|bi| {
                let b = crate::group::digits(bi as Elem, &vec![p; n]);
                let mut out = vec![0u32; n];
                mat.apply(&b, &mut out);
                out.iter().fold(0u64, |acc, &d| acc * p as u64 + d as u64) as u32
            })
            .collect();
        MonomialMatrix {
            target,
            phase: vec![0; dim],
            modulus: p,
        }
    };
    let (mr, ms) = (perm(1, 0), perm(0, 1));
    let commute = mr.mul(&ms) == ms.mul(&mr);
    let (re, se) = (fam.r_elem(), fam.s_elem());
    let m = c.modulus();
    let compatible = [(re, &mr), (se, &ms)].iter().all(|&(x, mx)| {
        let mx_inv = mx.inverse();
        module.elements.par_iter().all(|&h| {
            let conj = g.conj(x, h);
            let scalar = sub_mod(c.eval(x, h), c.eval(conj, x), m);
            let lhs = mx.mul(module.matrix(h).unwrap()).mul(&mx_inv);
            module.matrix(conj).map(|rhs| lhs == rhs.scaled(scalar as u32)).unwrap_or(false)
        })
    });
    let alpha = alternating_form(c, re, se);
    // U_R U_S = ζ^{c(R,S)} U_{RS}, U_S U_R = ζ^{c(S,R)} U_{SR}, RS = SR.
    let commutator = sub_mod(c.eval(re, se), c.eval(se, re), m);
    let extension_exists = commutator == 0;
    Ok(IntertwinerReport {
        p,
        n,
        r,
        module_dim: dim,
        m_r_m_s_commute: commute,
        conjugation_compatible: compatible,
        alpha_r_s: alpha,
        commutator_exponent: commutator,
        extension_exists,
        forced_dimension: (!extension_exists).then(|| (p as u64).pow(n as u32 + 1)),
    })
}

// ---------------------------------------------------------------------------
// Transgression, extension, induction

#[derive(Clone, Debug)]
pub struct Transgression {
    pub quotient: Quotient,
    pub cocycle: TwoCocycle,
    /// The alternative-section cocycle differs by a coboundary.
    pub section_independent: bool,
}

/// `tra(η)(q₁, q₂) = η(s(q₁)s(q₂)s(q₁q₂)⁻¹)` for minimal coset representatives.
pub fn transgression(g: &Arc<FiniteGroup>, eta: &SubgroupCharacter, limits: &Limits) -> Result<Transgression> {
    let n = SubgroupSet::from_elements(g, eta.elements.iter().copied())?;
    if !is_normal(g, &n) {
        return Err(Error::NotNormal("N".into()));
    }
    eta.validate(g)?;
    for &s in g.generators() {
        for &x in &eta.elements {
            if eta.value(g.conj(s, x)) != eta.value(x) {
                return Err(Error::Precondition(format!("η is not G-invariant at ({s}, {x})")));
            }
        }
    }
    let quotient = quotient_group(g, &n, limits)?;
    let q = Arc::new(quotient.group.clone());
    let qn = q.order() as usize;
    // Alternative section: the largest element of each coset.
    let mut alt = vec![IDENTITY; qn];
    for x in g.elements() {
        let t = quotient.project(x).expect("quotient covers G") as usize;
        if t != 0 && x > alt[t] {
            alt[t] = x;
        }
    }
    let build = |sec: &dyn Fn(Elem) -> Elem| -> Result<TwoCocycle> {
        let mut table = vec![0i64; qn * qn];
        for a in 0..qn as Elem {
            for b in 0..qn as Elem {
                let x = g.mul(g.mul(sec(a), sec(b)), g.inv(sec(q.mul(a, b))));
                let v = eta
                    .value(x)
                    .ok_or_else(|| Error::Verification("s(q₁)s(q₂)s(q₁q₂)⁻¹ left N".into()))?;
                table[a as usize * qn + b as usize] = v as i64;
            }
        }
        TwoCocycle::from_table(q.clone(), eta.modulus, &table)
    };
    let cocycle = build(&|a| quotient.section(a))?;
    let other = build(&|a| alt[a as usize])?;
    let whole = SubgroupSet::whole(&q, limits)?;
    let diff = cocycle.sub(&other)?;
    let section_independent = coboundary_witness(&diff, &whole, Coefficients::RootsOfUnity, limits)?.is_coboundary();
    if !section_independent {
        return Err(Error::Verification("transgression depends on the section".into()));
    }
    Ok(Transgression {
        quotient,
        cocycle,
        section_independent,
    })
}

/// Extensions of `η` from `N` to `H ≥ N` as homomorphisms `H → Z/m`.
pub fn extend_character(g: &FiniteGroup, h: &SubgroupSet, eta: &SubgroupCharacter, cap: usize) -> Result<HomSolutions> {
    let n = SubgroupSet::from_elements(g, eta.elements.iter().copied())?;
    if !n.is_subset_of(h) {
        return Err(Error::Precondition("N is not contained in H".into()));
    }
    let constraints: Vec<(Elem, u64)> = n
        .generators()
        .iter()
        .map(|&x| (x, eta.value(x).unwrap()))
        .collect();
    let sols = homomorphisms(g, h, eta.modulus, &constraints, cap)?;
    if sols.particular.is_none() {
        return Err(Error::Precondition("η does not extend to H".into()));
    }
    for s in &sols.enumerated {
        if eta.elements.iter().any(|&x| s.value(x) != eta.value(x)) {
            return Err(Error::Verification("extension does not restrict to η".into()));
        }
    }
    Ok(sols)
}

/// A class function stored on conjugacy-class representatives.
#[derive(Clone, Debug, Serialize)]
pub struct ClassCharacter {
    pub class_representatives: Vec<Elem>,
    pub class_sizes: Vec<u64>,
    /// `|H| · χ(g)` as exact cyclotomic integers.
    pub scaled_values: Vec<Cyclotomic>,
    pub denominator: u64,
    pub dimension: u64,
    pub norm: f64,
    pub norm_exact: Option<(i64, u64)>,
    pub irreducible: bool,
    pub induced_from_order: u64,
    pub subgroup_normal: bool,
}

impl ClassCharacter {
    pub fn values(&self) -> Vec<Complex64> {
        self.scaled_values.iter().map(|v| v.to_complex() / self.denominator as f64).collect()
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.values()
            .iter()
            .zip(other.values())
            .all(|(a, b)| (a - b).norm() < NORM_TOLERANCE)
    }
}

/// `ind_H^G(η₀)(g) = (1/|H|) Σ_{x∈G} η̇₀(xgx⁻¹)` and its norm.
pub fn induce_and_certify(g: &FiniteGroup, eta0: &SubgroupCharacter, limits: &Limits) -> Result<ClassCharacter> {
    let h = SubgroupSet::from_elements(g, eta0.elements.iter().copied())?;
    let classes = conjugacy_classes(g, limits)?;
    let m = eta0.modulus as usize;
    let scaled_values: Vec<Cyclotomic> = classes
        .par_iter()
        .map(|cls| {
            let rep = cls[0];
            let mut acc = Cyclotomic::zero(m);
            for x in g.elements() {
                if let Some(v) = eta0.value(g.conj(x, rep)) {
                    acc.coeffs[v as usize] += 1;
                }
            }
            acc
        })
        .collect();
    let denom = h.order();
    let order = g.order();
    let sizes: Vec<u64> = classes.iter().map(|c| c.len() as u64).collect();
    let norm = sizes
        .iter()
        .zip(&scaled_values)
        .map(|(&s, v)| s as f64 * v.to_complex().norm_sqr())
        .sum::<f64>()
        / (order as f64 * (denom * denom) as f64);
    let exact = sizes
        .iter()
        .zip(&scaled_values)
        .map(|(&s, v)| v.mul(&v.conj()).rational_value().map(|r| r * s as i64))
        .sum::<Option<i64>>()
        .map(|num| reduce_fraction(num, order * denom * denom));
    let dim_scaled = scaled_values[classes.iter().position(|c| c[0] == IDENTITY).unwrap()].coeffs[0] as u64;
    Ok(ClassCharacter {
        class_representatives: classes.iter().map(|c| c[0]).collect(),
        class_sizes: sizes,
        scaled_values,
        denominator: denom,
        dimension: dim_scaled / denom,
        norm,
        norm_exact: exact,
        irreducible: (norm - 1.0).abs() < NORM_TOLERANCE,
        induced_from_order: denom,
        subgroup_normal: is_normal(g, &h),
    })
}

/// The Heisenberg group `H_p`: `(x, y, z)` with `(x₁,y₁,z₁)(x₂,y₂,z₂) =
/// (x₁+x₂, y₁+y₂, z₁+z₂+x₁y₂)`, index `(x·p + y)·p + z`.
pub fn heisenberg_group(p: u32) -> Result<FiniteGroup> {
    if !is_prime(p as u64) || p == 2 {
        return Err(Error::Parameter(format!("Heisenberg group needs an odd prime, got {p}")));
    }
    let p = p as usize;
    let n = p * p * p;
    let split = |i: usize| (i / (p * p), (i / p) % p, i % p);
    let table = (0..n * n)
        .map(|idx| {
            let (a, b) = (split(idx / n), split(idx % n));
            let z = (a.2 + b.2 + a.0 * b.1) % p;
            (((a.0 + b.0) % p * p + (a.1 + b.1) % p) * p + z) as Elem
        })
        .collect();
    FiniteGroup::from_table(n, table, format!("H_{p}"))
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftedRepresentation {
    /// Exponent `k` of the central character `z ↦ k·z`.
    pub central_exponent: u64,
    pub transgression_trivial: bool,
    /// Order of the subgroup `H` (preimage of an isotropic subgroup of `G/N`).
    pub subgroup_order: u64,
    pub extensions_available: u64,
    pub character: ClassCharacter,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeisenbergReport {
    pub p: u32,
    pub group_order: u64,
    pub representations: Vec<LiftedRepresentation>,
    pub dimension_one: usize,
    pub dimension_p: usize,
    pub sum_of_squares: u64,
    pub pairwise_distinct: bool,
    pub all_irreducible: bool,
}

/// For each central character η of `H_p`: transgress, find a Lagrangian
/// of `G/N`, extend η over its preimage in every way, induce, and keep the
/// distinct irreducible characters.
pub fn heisenberg_pipeline(p: u32, limits: &Limits) -> Result<HeisenbergReport> {
    let g = Arc::new(heisenberg_group(p)?);
    let centre = subgroup_generated(&g, &[1], limits)?; // (0,0,1)
    let mut reps: Vec<LiftedRepresentation> = Vec::new();
    for k in 0..p as u64 {
        let eta = SubgroupCharacter::from_generator_images(&g, &centre, &[(1, k)], p as u64)?;
        let tra = transgression(&g, &eta, limits)?;
        let whole_q = SubgroupSet::whole(&tra.quotient.group, limits)?;
        let trivial = coboundary_witness(&tra.cocycle, &whole_q, Coefficients::RootsOfUnity, limits)?.is_coboundary();
        let h = if trivial {
            SubgroupSet::whole(&g, limits)?
        } else {
            let found = search_lagrangian(&tra.cocycle, &LagrangianOptions::default(), Strategy::Exhaustive, limits)?;
            if found.status != SearchStatus::Found {
                return Err(Error::Verification("no Lagrangian for a nondegenerate transgression".into()));
            }
            let l = found.found.unwrap();
            let pre = tra.quotient.preimage(l.elements());
            SubgroupSet::from_elements(&g, pre)?
        };
        let cap = (p * p) as usize;
        let exts = extend_character(&g, &h, &eta, cap)?;
        for eta0 in &exts.enumerated {
            let ch = induce_and_certify(&g, eta0, limits)?;
            if !reps.iter().any(|r| r.character.approx_eq(&ch)) {
                reps.push(LiftedRepresentation {
                    central_exponent: k,
                    transgression_trivial: trivial,
                    subgroup_order: h.order(),
                    extensions_available: exts.count,
                    character: ch,
                });
            }
        }
    }
    let dimension_one = reps.iter().filter(|r| r.character.dimension == 1).count();
    let dimension_p = reps.iter().filter(|r| r.character.dimension == p as u64).count();
    let sum_of_squares = reps.iter().map(|r| r.character.dimension.pow(2)).sum();
    let pairwise_distinct = reps
        .iter()
        .enumerate()
        .all(|(i, a)| reps[i + 1..].iter().all(|b| !a.character.approx_eq(&b.character)));
    let all_irreducible = reps.iter().all(|r| r.character.irreducible);
    Ok(HeisenbergReport {
        p,
        group_order: g.order(),
        representations: reps,
        dimension_one,
        dimension_p,
        sum_of_squares,
        pairwise_distinct,
        all_irreducible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{is_nondegenerate, ScanMode};
    use crate::group::{center, cyclic_group, direct_product};

    #[test]
    fn heisenberg_center_has_order_p() {
        let limits = Limits::default();
        let g = heisenberg_group(3).unwrap();
        assert_eq!(g.order(), 27);
        assert_eq!(center(&g, &limits).unwrap().order(), 3);
    }

    #[test]
    fn transgression_trivial_and_faithful() {
        let limits = Limits::default();
        let g = Arc::new(heisenberg_group(3).unwrap());
        let z = subgroup_generated(&g, &[1], &limits).unwrap();
        let zero = SubgroupCharacter::from_generator_images(&g, &z, &[(1, 0)], 3).unwrap();
        let t0 = transgression(&g, &zero, &limits).unwrap();
        let whole = SubgroupSet::whole(&t0.quotient.group, &limits).unwrap();
        assert!(coboundary_witness(&t0.cocycle, &whole, Coefficients::RootsOfUnity, &limits)
            .unwrap()
            .is_coboundary());
        let faithful = SubgroupCharacter::from_generator_images(&g, &z, &[(1, 1)], 3).unwrap();
        let t1 = transgression(&g, &faithful, &limits).unwrap();
        assert!(is_nondegenerate(&t1.cocycle, &limits, ScanMode::Exhaustive).unwrap().nondegenerate);
    }

    #[test]
    fn direct_product_transgression_is_trivial() {
        let limits = Limits::default();
        let a = cyclic_group(3).unwrap();
        let b = cyclic_group(9).unwrap();
        let g = Arc::new(direct_product(&a, &b, &limits).unwrap());
        // N = first factor.
        let n = SubgroupSet::from_elements(&g, (0..3).map(|i| i * 9)).unwrap();
        let eta = SubgroupCharacter::from_generator_images(&g, &n, &[(9, 1)], 3).unwrap();
        let t = transgression(&g, &eta, &limits).unwrap();
        let whole = SubgroupSet::whole(&t.quotient.group, &limits).unwrap();
        assert!(coboundary_witness(&t.cocycle, &whole, Coefficients::RootsOfUnity, &limits)
            .unwrap()
            .is_coboundary());
    }

    #[test]
    fn extension_count_matches_index() {
        let limits = Limits::default();
        let g = heisenberg_group(3).unwrap();
        let z = subgroup_generated(&g, &[1], &limits).unwrap();
        let eta = SubgroupCharacter::from_generator_images(&g, &z, &[(1, 1)], 3).unwrap();
        // Preimage of the line x = 0: {(0, y, z)}.
        let h = subgroup_generated(&g, &[1, 3], &limits).unwrap();
        assert_eq!(h.order(), 9);
        let ext = extend_character(&g, &h, &eta, 100).unwrap();
        assert_eq!(ext.count, 3);
        assert_eq!(ext.enumerated.len(), 3);
        // H = N: the only extension is η itself.
        let same = extend_character(&g, &z, &eta, 100).unwrap();
        assert_eq!(same.count, 1);
        assert_eq!(same.particular.unwrap(), eta);
    }

    #[test]
    fn homomorphisms_composite_modulus() {
        let g = cyclic_group(6).unwrap();
        let whole = SubgroupSet::whole(&g, &Limits::default()).unwrap();
        let sols = homomorphisms(&g, &whole, 12, &[], 100).unwrap();
        // Hom(Z6, Z12) ≅ Z6.
        assert_eq!(sols.count, 6);
        let mut vals: Vec<u64> = sols.enumerated.iter().map(|s| s.value(1).unwrap()).collect();
        vals.sort_unstable();
        assert_eq!(vals, vec![0, 2, 4, 6, 8, 10]);
    }

    #[test]
    fn induction_from_whole_group_is_the_character() {
        let limits = Limits::default();
        let g = cyclic_group(5).unwrap();
        let whole = SubgroupSet::whole(&g, &limits).unwrap();
        let eta = SubgroupCharacter::from_generator_images(&g, &whole, &[(1, 2)], 5).unwrap();
        let ch = induce_and_certify(&g, &eta, &limits).unwrap();
        assert_eq!(ch.dimension, 1);
        assert!(ch.irreducible);
        assert_eq!(ch.norm_exact, Some((1, 1)));
    }

    #[test]
    fn heisenberg_pipeline_p3() {
        let rep = heisenberg_pipeline(3, &Limits::default()).unwrap();
        assert_eq!(rep.representations.len(), 9 + 2);
        assert_eq!(rep.dimension_one, 9);
        assert_eq!(rep.dimension_p, 2);
        assert_eq!(rep.sum_of_squares, 27);
        assert!(rep.pairwise_distinct && rep.all_irreducible);
    }

    #[test]
    fn module_nu_and_intertwiners_p3() {
        for r in 0..3u64 {
            let g = Arc::new(FiniteGroup::family(3, 3).unwrap());
            let c = TwoCocycle::family(g, r).unwrap();
            let rep = intertwiner_obstruction(&c, 0).unwrap();
            assert_eq!(rep.module_dim, 27);
            assert!(rep.m_r_m_s_commute && rep.conjugation_compatible);
            assert_eq!(rep.alpha_r_s, r);
            assert_eq!(rep.extension_exists, r == 0);
        }
        let g = Arc::new(FiniteGroup::family(3, 3).unwrap());
        let c = TwoCocycle::family(g, 1).unwrap();
        let nu = build_module_nu(&c, 0).unwrap();
        assert!(nu.is_irreducible());
        assert_eq!(nu.character_norm_exact, Some((1, 1)));
    }

    #[test]
    fn monomial_inverse() {
        let m = MonomialMatrix {
            target: vec![1, 2, 0],
            phase: vec![1, 0, 2],
            modulus: 3,
        };
        assert_eq!(m.mul(&m.inverse()), MonomialMatrix::identity(3, 3));
    }
}
