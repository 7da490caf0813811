//! Normalized 2-cocycles valued in Z/m and their alternating forms.
//!
//! A residue `k` stands for the root of unity `exp(2πik/m)`. Every cocycle
//! is normalized: `c(e, g) = c(g, e) = 0`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cohomology::{coboundary_witness, CoboundaryOutcome, CoboundaryWitness, Coefficients};
use crate::error::{Error, Result};
use crate::group::{conjugacy_classes, Elem, FiniteGroup, Limits, Quotient, SubgroupSet, DEFAULT_SEED, IDENTITY};
use crate::modular::{add_mod, mul_mod, neg_mod, reduce, sub_mod};

const EXHAUSTIVE_TRIPLES: u64 = 100_000_000;
const SAMPLED_TRIPLES: usize = 1_000_000;

#[derive(Clone)]
pub struct TwoCocycle {
    group: Arc<FiniteGroup>,
    modulus: u64,
    kind: Arc<Kind>,
}

enum Kind {
    Zero,
    Table(Vec<u32>),
    Family { r: u32 },
    /// `c(g, h) = inner(φ(g), φ(h))` for a homomorphism `φ` given pointwise.
    Pullback { map: Vec<Elem>, inner: TwoCocycle },
    /// `Σ kᵢ·cᵢ`, all terms sharing the modulus.
    Sum(Vec<(u64, TwoCocycle)>),
    /// Image under `Z/m → Z/(m·factor)`, `x ↦ factor·x`.
    Lift { factor: u64, inner: TwoCocycle },
    /// `base + δf` with `f(e) = 0`.
    Adjusted { base: TwoCocycle, f: Vec<u64> },
}

impl fmt::Debug for TwoCocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoCocycle")
            .field("group", &self.group.label())
            .field("modulus", &self.modulus)
            .field("kind", &self.kind_name())
            .finish()
    }
}

impl TwoCocycle {
    pub fn zero(group: Arc<FiniteGroup>, modulus: u64) -> Self {
        Self::raw(group, modulus, Kind::Zero)
    }

    fn raw(group: Arc<FiniteGroup>, modulus: u64, kind: Kind) -> Self {
        assert!(modulus >= 1);
        TwoCocycle {
            group,
            modulus,
            kind: Arc::new(kind),
        }
    }

    /// Builds a cocycle from a row-major `|G|²` table, normalizing by a
    /// constant shift and validating the cocycle identity.
    pub fn from_table(group: Arc<FiniteGroup>, modulus: u64, values: &[i64]) -> Result<Self> {
        let n = group.order() as usize;
        if modulus == 0 {
            return Err(Error::Parameter("modulus must be at least 1".into()));
        }
        if values.len() != n * n {
            return Err(Error::Parameter(format!("table has {} entries, expected {}", values.len(), n * n)));
        }
        let shift = reduce(values[0], modulus);
        let table: Vec<u32> = values
            .iter()
            .map(|&v| sub_mod(reduce(v, modulus), shift, modulus) as u32)
            .collect();
        let c = Self::raw(group, modulus, Kind::Table(table));
        c.validate(DEFAULT_SEED)?;
        Ok(c)
    }

    pub(crate) fn from_table_unchecked(group: Arc<FiniteGroup>, modulus: u64, table: Vec<u32>) -> Self {
        Self::raw(group, modulus, Kind::Table(table))
    }

    /// The family cocycle `c^{(r)}` on `G_n`, valued in Z/p.
    pub fn family(group: Arc<FiniteGroup>, r: u64) -> Result<Self> {
        let Some(fam) = group.as_family() else {
            return Err(Error::Unsupported("family cocycle requires the structured family backend".into()));
        };
        let p = fam.p as u64;
        Ok(Self::raw(group, p, Kind::Family { r: (r % p) as u32 }))
    }

    /// The coboundary `δf(g, h) = f(g) + f(h) − f(gh)`, normalized.
    pub fn coboundary(group: Arc<FiniteGroup>, modulus: u64, f: &[i64]) -> Result<Self> {
        if f.len() as u64 != group.order() {
            return Err(Error::Parameter(format!("1-cochain has {} values, expected {}", f.len(), group.order())));
        }
        let f0 = reduce(f[0], modulus);
        let f: Vec<u64> = f.iter().map(|&v| sub_mod(reduce(v, modulus), f0, modulus)).collect();
        let zero = Self::zero(group, modulus);
        Ok(zero.adjust(f))
    }

    /// Pullback along a homomorphism `G → H` given as the image of each
    /// element of `G`.
    pub fn pullback(group: Arc<FiniteGroup>, map: Vec<Elem>, inner: TwoCocycle) -> Result<Self> {
        if map.len() as u64 != group.order() {
            return Err(Error::Parameter("pullback map must cover every element".into()));
        }
        if map[0] != IDENTITY {
            return Err(Error::Parameter("pullback map must send identity to identity".into()));
        }
        let m = inner.modulus;
        Ok(Self::raw(group, m, Kind::Pullback { map, inner }))
    }

    /// Inflation of a cocycle on `K/N` to `K`, where `group` is the Cayley
    /// copy of `K` whose element `i` is `embedding[i]` in the parent.
    pub fn inflate(group: Arc<FiniteGroup>, embedding: &[Elem], quotient: &Quotient, inner: TwoCocycle) -> Result<Self> {
        let map = embedding
            .iter()
            .map(|&x| quotient.project(x).ok_or_else(|| Error::Precondition(format!("{x} outside quotient domain"))))
            .collect::<Result<Vec<_>>>()?;
        Self::pullback(group, map, inner)
    }

    /// Restriction to a subgroup, realized on its Cayley copy.
    pub fn restrict(&self, copy: &Quotient) -> Result<Self> {
        Self::pullback(Arc::new(copy.group.clone()), copy.reps.clone(), self.clone())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn kind_name(&self) -> &'static str {
        match &*self.kind {
            Kind::Zero => "trivial",
            Kind::Table(_) => "table",
            Kind::Family { .. } => "family_cr",
            Kind::Pullback { .. } => "pullback",
            Kind::Sum(_) => "sum",
            Kind::Lift { .. } => "lift",
            Kind::Adjusted { .. } => "adjusted",
        }
    }

    /// Family parameter `r` when this is a family cocycle.
    pub fn family_parameter(&self) -> Option<u32> {
        match &*self.kind {
            Kind::Family { r } => Some(*r),
            _ => None,
        }
    }

    #[inline]
    pub fn eval(&self, g: Elem, h: Elem) -> u64 {
        let m = self.modulus;
        match &*self.kind {
            Kind::Zero => 0,
            Kind::Table(t) => t[g as usize * self.group.order() as usize + h as usize] as u64,
            Kind::Family { r } => {
                let fam = self.group.as_family().expect("family backend");
                fam.cocycle_value(*r, g, h) as u64
            }
            Kind::Pullback { map, inner } => inner.eval(map[g as usize], map[h as usize]),
            Kind::Sum(terms) => terms
                .iter()
                .fold(0, |acc, (k, c)| add_mod(acc, mul_mod(*k, c.eval(g, h), m), m)),
            Kind::Lift { factor, inner } => mul_mod(*factor, inner.eval(g, h), m),
            Kind::Adjusted { base, f } => {
                let gh = self.group.mul(g, h);
                let d = sub_mod(add_mod(f[g as usize], f[h as usize], m), f[gh as usize], m);
                add_mod(base.eval(g, h), d, m)
            }
        }
    }

    fn same_domain(&self, other: &TwoCocycle) -> Result<()> {
        if !Arc::ptr_eq(&self.group, &other.group) && self.group.order() != other.group.order() {
            return Err(Error::Parameter("cocycles live on different groups".into()));
        }
        if self.modulus != other.modulus {
            return Err(Error::Parameter(format!("modulus mismatch: {} vs {}", self.modulus, other.modulus)));
        }
        Ok(())
    }

    /// `Σ kᵢ·cᵢ` over cocycles on the same group with the same modulus.
    pub fn combination(terms: Vec<(u64, TwoCocycle)>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Parameter("empty combination".into()))?
            .1
            .clone();
        for (_, c) in &terms {
            first.same_domain(c)?;
        }
        Ok(Self::raw(first.group.clone(), first.modulus, Kind::Sum(terms)))
    }

    pub fn add(&self, other: &TwoCocycle) -> Result<Self> {
        Self::combination(vec![(1, self.clone()), (1, other.clone())])
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::raw(self.group.clone(), self.modulus, Kind::Sum(vec![(k % self.modulus, self.clone())]))
    }

    pub fn neg(&self) -> Self {
        self.scale(neg_mod(1, self.modulus))
    }

    pub fn sub(&self, other: &TwoCocycle) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Reinterprets the values in Z/(m·factor) via `x ↦ factor·x`; the root
    /// of unity each value denotes is unchanged.
    pub fn lift(&self, factor: u64) -> Self {
        if factor == 1 {
            return self.clone();
        }
        Self::raw(
            self.group.clone(),
            self.modulus * factor,
            Kind::Lift {
                factor,
                inner: self.clone(),
            },
        )
    }

    /// `c + δf`; `f` is indexed by element and must vanish at the identity.
    pub fn adjust(&self, f: Vec<u64>) -> Self {
        assert_eq!(f.len() as u64, self.group.order());
        assert_eq!(f[0] % self.modulus, 0, "adjusting cochain must vanish at e");
        let m = self.modulus;
        let f = f.into_iter().map(|v| v % m).collect();
        Self::raw(
            self.group.clone(),
            m,
            Kind::Adjusted {
                base: self.clone(),
                f,
            },
        )
    }

    /// Dense row-major table (requires `|G|² ≤ limit`).
    pub fn to_table(&self, limit: u64) -> Result<Vec<u32>> {
        let n = self.group.order();
        if n * n > limit {
            return Err(Error::Threshold {
                what: "cocycle table",
                size: n * n,
                limit,
            });
        }
        let n = n as usize;
        Ok((0..n * n)
            .into_par_iter()
            .map(|i| self.eval((i / n) as Elem, (i % n) as Elem) as u32)
            .collect())
    }

    /// Materializes into a table backend when small enough, which speeds
    /// up repeated evaluation of composite cocycles.
    pub fn materialized(&self, limit: u64) -> Self {
        if matches!(&*self.kind, Kind::Table(_) | Kind::Zero | Kind::Family { .. }) {
            return self.clone();
        }
        match self.to_table(limit) {
            Ok(t) => Self::from_table_unchecked(self.group.clone(), self.modulus, t),
            Err(_) => self.clone(),
        }
    }

    #[inline]
    fn defect(&self, g: Elem, h: Elem, k: Elem) -> bool {
        let m = self.modulus;
        let gr = &self.group;
        let lhs = add_mod(self.eval(g, h), self.eval(gr.mul(g, h), k), m);
        let rhs = add_mod(self.eval(h, k), self.eval(g, gr.mul(h, k)), m);
        lhs != rhs
    }

    /// Checks normalization and the cocycle identity: exhaustively when
    /// `|G|³ ≤ 10⁸`, otherwise on 10⁶ triples drawn from `seed`.
    pub fn validate(&self, seed: u64) -> Result<()> {
        let g = &self.group;
        let n = g.order();
        if n <= 10_000_000 {
            if let Some(x) = g.elements().into_par_iter().find_first(|&x| self.eval(IDENTITY, x) != 0 || self.eval(x, IDENTITY) != 0) {
                return Err(Error::Precondition(format!("cocycle not normalized at element {x}")));
            }
        }
        if n.saturating_pow(3) <= EXHAUSTIVE_TRIPLES {
            let found = (0..n as Elem).into_par_iter().find_map_first(|a| {
                for b in 0..n as Elem {
                    for c in 0..n as Elem {
                        if self.defect(a, b, c) {
                            return Some((a, b, c));
                        }
                    }
                }
                None
            });
            if let Some((a, b, c)) = found {
                return Err(Error::CocycleIdentity(a, b, c));
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let triples: Vec<(Elem, Elem, Elem)> = (0..SAMPLED_TRIPLES)
                .map(|_| {
                    let n = n as Elem;
                    (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))
                })
                .collect();
            if let Some(&(a, b, c)) = triples.par_iter().find_first(|&&(a, b, c)| self.defect(a, b, c)) {
                return Err(Error::CocycleIdentity(a, b, c));
            }
        }
        Ok(())
    }
}

/// `α_c(g, h) = c(h, g) − c(hgh⁻¹, h)`.
#[inline]
pub fn alternating_form(c: &TwoCocycle, g: Elem, h: Elem) -> u64 {
    let gr = c.group();
    sub_mod(c.eval(h, g), c.eval(gr.conj(h, g), h), c.modulus())
}

/// How an [`AlternatingFormView`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CachePolicy {
    /// Evaluate through the cocycle every time.
    None,
    /// Precompute all `|G|²` values (falls back to `None` above the limit).
    Dense { limit: u64 },
}

/// The alternating form of a cocycle, optionally cached.
pub struct AlternatingFormView<'a> {
    cocycle: &'a TwoCocycle,
    cache: Option<Vec<u32>>,
}

impl<'a> AlternatingFormView<'a> {
    pub fn new(cocycle: &'a TwoCocycle, policy: CachePolicy) -> Self {
        let cache = match policy {
            CachePolicy::None => None,
            CachePolicy::Dense { limit } => {
                let n = cocycle.group().order();
                (n * n <= limit).then(|| {
                    let n = n as usize;
                    (0..n * n)
                        .into_par_iter()
                        .map(|i| alternating_form(cocycle, (i / n) as Elem, (i % n) as Elem) as u32)
                        .collect()
                })
            }
        };
        AlternatingFormView { cocycle, cache }
    }

    pub fn eval(&self, g: Elem, h: Elem) -> u64 {
        match &self.cache {
            Some(t) => t[g as usize * self.cocycle.group().order() as usize + h as usize] as u64,
            None => alternating_form(self.cocycle, g, h),
        }
    }

    pub fn is_cached(&self) -> bool {
        self.cache.is_some()
    }
}

/// Both alternating conditions, which differ only in the presence of
/// 2-torsion: antisymmetry on commuting pairs, and vanishing on the
/// diagonal (the stronger one).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlternatingReport {
    pub antisymmetric: bool,
    pub vanishes_on_diagonal: bool,
    pub antisymmetry_failure: Option<(Elem, Elem)>,
    pub diagonal_failure: Option<Elem>,
}

pub fn alternating_report(c: &TwoCocycle, limits: &Limits) -> Result<AlternatingReport> {
    let g = c.group();
    g.require_scan(limits)?;
    let m = c.modulus();
    let diagonal_failure = g.elements().into_par_iter().find_first(|&x| alternating_form(c, x, x) != 0);
    let antisymmetry_failure = if g.order().saturating_mul(g.order()) <= limits.scan {
        g.elements().into_par_iter().find_map_first(|x| {
            g.elements()
                .filter(|&y| g.commute(x, y))
                .find(|&y| add_mod(alternating_form(c, x, y), alternating_form(c, y, x), m) != 0)
                .map(|y| (x, y))
        })
    } else {
        // Generator pairs against all elements.
        g.generators().par_iter().find_map_first(|&x| {
            g.elements()
                .filter(|&y| g.commute(x, y))
                .find(|&y| add_mod(alternating_form(c, x, y), alternating_form(c, y, x), m) != 0)
                .map(|y| (x, y))
        })
    };
    Ok(AlternatingReport {
        antisymmetric: antisymmetry_failure.is_none(),
        vanishes_on_diagonal: diagonal_failure.is_none(),
        antisymmetry_failure,
        diagonal_failure,
    })
}

/// `x` is regular when `α(x, g) = 0` for all `g` commuting with `x`. For
/// commuting pairs this is `c(x, g) = c(g, x)`.
pub fn is_regular(c: &TwoCocycle, x: Elem) -> bool {
    let g = c.group();
    g.elements().all(|y| !g.commute(x, y) || c.eval(x, y) == c.eval(y, x))
}

fn first_irregular_partner(c: &TwoCocycle, x: Elem) -> Option<Elem> {
    let g = c.group();
    g.elements().find(|&y| g.commute(x, y) && c.eval(x, y) != c.eval(y, x))
}

/// `K_x = {g ∈ C_G(x) : α(g, x) = α(x, g) = 0}`, verified to be a subgroup.
pub fn k_set(c: &TwoCocycle, x: Elem, limits: &Limits) -> Result<SubgroupSet> {
    let g = c.group();
    g.require_scan(limits)?;
    let els: Vec<Elem> = g
        .elements()
        .into_par_iter()
        .filter(|&y| g.commute(x, y) && alternating_form(c, y, x) == 0 && alternating_form(c, x, y) == 0)
        .collect();
    SubgroupSet::from_elements(g, els)
}

/// How [`is_nondegenerate`] covers the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ScanMode {
    /// Test every element against every element.
    Exhaustive,
    /// Test one representative per conjugacy class (regularity is a class
    /// function).
    ClassRepresentatives,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NondegeneracyVerdict {
    pub nondegenerate: bool,
    /// Smallest regular element other than the identity.
    pub witness: Option<Elem>,
    pub regular_elements: u64,
    pub regular_classes: usize,
    pub class_count: usize,
    pub order_is_square: bool,
    pub mode: ScanMode,
}

pub fn is_nondegenerate(c: &TwoCocycle, limits: &Limits, mode: ScanMode) -> Result<NondegeneracyVerdict> {
    let g = c.group();
    g.require_scan(limits)?;
    let classes = conjugacy_classes(g, limits)?;
    let (regular_elements, regular_classes, witness) = match mode {
        ScanMode::Exhaustive => {
            let flags: Vec<bool> = g.elements().into_par_iter().map(|x| is_regular(c, x)).collect();
            let mut reg_classes = 0;
            for cls in &classes {
                let f = flags[cls[0] as usize];
                if let Some(&bad) = cls.iter().find(|&&y| flags[y as usize] != f) {
                    return Err(Error::Verification(format!(
                        "regularity not constant on the class of {}: element {bad} differs",
                        cls[0]
                    )));
                }
                reg_classes += f as usize;
            }
            let witness = g.elements().skip(1).find(|&x| flags[x as usize]);
            (flags.iter().filter(|&&f| f).count() as u64, reg_classes, witness)
        }
        ScanMode::ClassRepresentatives => {
            let flags: Vec<bool> = classes.par_iter().map(|cls| is_regular(c, cls[0])).collect();
            let mut count = 0u64;
            let mut reg = 0;
            let mut witness: Option<Elem> = None;
            for (cls, &f) in classes.iter().zip(&flags) {
                if f {
                    reg += 1;
                    count += cls.len() as u64;
                    let w = *cls.iter().min().unwrap();
                    if w != IDENTITY && witness.map_or(true, |x| w < x) {
                        witness = Some(w);
                    }
                }
            }
            (count, reg, witness)
        }
    };
    let n = g.order();
    let root = (n as f64).sqrt().round() as u64;
    let order_is_square = root * root == n;
    let nondegenerate = witness.is_none();
    if nondegenerate && !order_is_square {
        return Err(Error::Verification(format!(
            "nondegenerate verdict on a group of non-square order {n}"
        )));
    }
    Ok(NondegeneracyVerdict {
        nondegenerate,
        witness,
        regular_elements,
        regular_classes,
        class_count: classes.len(),
        order_is_square,
        mode,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IsotropyMethod {
    /// Abelian subgroup: isotropic iff the form vanishes on it.
    AbelianShortcut,
    Solver,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsotropyVerdict {
    pub isotropic: bool,
    pub method: IsotropyMethod,
    /// `f` with `scale·c = δf` on `H` (mod `witness.modulus`).
    pub witness: Option<CoboundaryWitness>,
    /// A pair in `H` on which the form is nonzero.
    pub form_obstruction: Option<(Elem, Elem)>,
    /// Present when the solver certified insolvability.
    pub certified_nonvanishing: bool,
}

/// Decides whether `[c]` restricts to zero on `h` (with C^* coefficients).
pub fn isotropy_test(c: &TwoCocycle, h: &SubgroupSet, limits: &Limits) -> Result<IsotropyVerdict> {
    let g = c.group();
    if h.is_abelian(g) {
        let gens = h.generators();
        // α is bimultiplicative on an abelian subgroup, so generators suffice.
        let pair = gens.iter().enumerate().find_map(|(i, &a)| {
            gens[i + 1..]
                .iter()
                .find(|&&b| alternating_form(c, a, b) != 0)
                .map(|&b| (a, b))
        });
        if let Some(pair) = pair {
            return Ok(IsotropyVerdict {
                isotropic: false,
                method: IsotropyMethod::AbelianShortcut,
                witness: None,
                form_obstruction: Some(pair),
                certified_nonvanishing: false,
            });
        }
        let witness = if h.order() <= limits.solver {
            match coboundary_witness(c, h, Coefficients::RootsOfUnity, limits)? {
                CoboundaryOutcome::Coboundary(w) => Some(w),
                CoboundaryOutcome::NotCoboundary(_) => {
                    return Err(Error::Verification(
                        "abelian shortcut and solver disagree on isotropy".into(),
                    ))
                }
            }
        } else {
            None
        };
        return Ok(IsotropyVerdict {
            isotropic: true,
            method: IsotropyMethod::AbelianShortcut,
            witness,
            form_obstruction: None,
            certified_nonvanishing: false,
        });
    }
    if h.order() > limits.solver {
        return Err(Error::Threshold {
            what: "isotropy solver",
            size: h.order(),
            limit: limits.solver,
        });
    }
    Ok(match coboundary_witness(c, h, Coefficients::RootsOfUnity, limits)? {
        CoboundaryOutcome::Coboundary(w) => IsotropyVerdict {
            isotropic: true,
            method: IsotropyMethod::Solver,
            witness: Some(w),
            form_obstruction: None,
            certified_nonvanishing: false,
        },
        CoboundaryOutcome::NotCoboundary(_) => {
            let els = h.elements();
            let pair = els.iter().find_map(|&a| {
                els.iter()
                    .find(|&&b| g.commute(a, b) && alternating_form(c, a, b) != 0)
                    .map(|&b| (a, b))
            });
            IsotropyVerdict {
                isotropic: false,
                method: IsotropyMethod::Solver,
                witness: None,
                form_obstruction: pair,
                certified_nonvanishing: true,
            }
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DistinguishedVerdict {
    FormTrivialClassTrivial,
    /// Form vanishes on commuting pairs yet the class is nonzero.
    Distinguished,
    FormNontrivial { g: Elem, h: Elem },
}

pub fn distinguished_class_test(c: &TwoCocycle, limits: &Limits) -> Result<DistinguishedVerdict> {
    let g = c.group();
    g.require_scan(limits)?;
    if g.order() > limits.solver {
        return Err(Error::Threshold {
            what: "distinguished-class solver",
            size: g.order(),
            limit: limits.solver,
        });
    }
    if let Some(x) = g.elements().find(|&x| !is_regular_wrt_all(c, x)) {
        let y = first_irregular_partner(c, x).expect("irregular element has a partner");
        return Ok(DistinguishedVerdict::FormNontrivial { g: x, h: y });
    }
    let whole = SubgroupSet::whole(g, limits)?;
    Ok(match coboundary_witness(c, &whole, Coefficients::RootsOfUnity, limits)? {
        CoboundaryOutcome::Coboundary(_) => DistinguishedVerdict::FormTrivialClassTrivial,
        CoboundaryOutcome::NotCoboundary(_) => DistinguishedVerdict::Distinguished,
    })
}

fn is_regular_wrt_all(c: &TwoCocycle, x: Elem) -> bool {
    first_irregular_partner(c, x).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::abelian_group;

    fn symplectic(p: u32) -> TwoCocycle {
        // (Z_p)², element (a, b) ↦ index a·p + b, c = b₁a₂.
        let g = Arc::new(abelian_group(&[p, p]).unwrap());
        let n = (p * p) as usize;
        let mut vals = vec![0i64; n * n];
        for x in 0..n {
            for y in 0..n {
                let (_a1, b1) = (x as u32 / p, x as u32 % p);
                let (a2, _b2) = (y as u32 / p, y as u32 % p);
                vals[x * n + y] = (b1 * a2) as i64;
            }
        }
        TwoCocycle::from_table(g, p as u64, &vals).unwrap()
    }

    #[test]
    fn trivial_form_is_zero() {
        let g = Arc::new(abelian_group(&[2, 4]).unwrap());
        let c = TwoCocycle::zero(g.clone(), 4);
        for x in g.elements() {
            for y in g.elements() {
                assert_eq!(alternating_form(&c, x, y), 0);
            }
        }
    }

    #[test]
    fn symplectic_form_matches_formula() {
        let p = 3;
        let c = symplectic(p);
        for x in 0..9u32 {
            for y in 0..9u32 {
                let (a1, b1) = (x / p, x % p);
                let (a2, b2) = (y / p, y % p);
                let expect = reduce((b2 * a1) as i64 - (b1 * a2) as i64, 3);
                assert_eq!(alternating_form(&c, x, y), expect);
            }
        }
    }

    #[test]
    fn symplectic_k_set_and_nondegeneracy() {
        let c = symplectic(3);
        let limits = Limits::default();
        // (1, 0) has index 3.
        let k = k_set(&c, 3, &limits).unwrap();
        assert_eq!(k.elements(), &[0, 3, 6]);
        let v = is_nondegenerate(&c, &limits, ScanMode::Exhaustive).unwrap();
        assert!(v.nondegenerate);
        assert_eq!(v.regular_classes, 1);
    }

    #[test]
    fn trivial_cocycle_is_degenerate_everywhere_regular() {
        let g = Arc::new(abelian_group(&[3, 3]).unwrap());
        let c = TwoCocycle::zero(g, 3);
        let v = is_nondegenerate(&c, &Limits::default(), ScanMode::Exhaustive).unwrap();
        assert!(!v.nondegenerate);
        assert_eq!(v.regular_classes, 9);
        assert_eq!(v.class_count, 9);
        assert_eq!(v.witness, Some(1));
    }

    #[test]
    fn identity_violation_reports_triple() {
        let g = Arc::new(abelian_group(&[3]).unwrap());
        let mut vals = vec![0i64; 9];
        vals[4] = 1; // c(1,1) = 1 only
        assert!(matches!(
            TwoCocycle::from_table(g, 3, &vals),
            Err(Error::CocycleIdentity(..))
        ));
    }

    #[test]
    fn arithmetic_backends_agree_with_tables() {
        let c = symplectic(3);
        let d = c.add(&c).unwrap();
        let l = c.lift(4);
        for x in 0..9 {
            for y in 0..9 {
                assert_eq!(d.eval(x, y), 2 * c.eval(x, y) % 3);
                assert_eq!(l.eval(x, y), 4 * c.eval(x, y));
                assert_eq!(c.neg().eval(x, y), neg_mod(c.eval(x, y), 3));
            }
        }
        d.validate(0).unwrap();
        l.validate(0).unwrap();
    }

    #[test]
    fn alternating_report_on_symplectic() {
        let r = alternating_report(&symplectic(2), &Limits::default()).unwrap();
        assert!(r.antisymmetric && r.vanishes_on_diagonal);
    }
}
