//! Isotropic and Lagrangian subgroup search: central reduction, the normal
//! abelian tower, exhaustive and backtracking Lagrangian search, and the
//! containment obstruction.

use std::collections::HashSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocycle::{alternating_form, isotropy_test, IsotropyVerdict, TwoCocycle};
use crate::cohomology::deflate_through_central;
use crate::error::{Error, Result};
use crate::group::{
    center, centralizer_of_subgroup, closure, enumerate_subgroups_of_order, is_normal, Elem, FiniteGroup, Limits,
    SubgroupSet, IDENTITY,
};
use crate::modular::factor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Constructive,
    Tower,
    Exhaustive,
    Backtracking,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Found,
    /// Exhaustive search proved there is none.
    CertifiedNone,
    /// A heuristic strategy gave up; nothing is claimed.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum TraceStep {
    /// Central-reduction level: `x` (in that level's labelling) was chosen,
    /// `K_x` had the given order and the quotient `K_x/⟨x⟩` was recursed on.
    Central { level: usize, x: Elem, k_order: u64, quotient_order: u64, lift: u64 },
    /// Tower level: `A_i = ⟨A_{i−1}, g⟩`.
    Extend { level: usize, g: Elem, order: u64 },
    /// Search began from this subgroup.
    Seed { generators: Vec<Elem> },
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificates {
    pub order: u64,
    pub normal: bool,
    pub abelian: bool,
    pub isotropy: IsotropyVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub strategy: Strategy,
    pub status: SearchStatus,
    pub found: Option<SubgroupSet>,
    pub trace: Vec<TraceStep>,
    pub certificates: Option<Certificates>,
    /// Number of matching subgroups (exhaustive strategy only).
    pub matches: Option<usize>,
    pub candidates_examined: u64,
    /// Branching completeness is never assumed.
    pub branching_completeness_assumed: bool,
}

impl SearchOutcome {
    fn empty(strategy: Strategy, status: SearchStatus) -> Self {
        SearchOutcome {
            strategy,
            status,
            found: None,
            trace: Vec::new(),
            certificates: None,
            matches: None,
            candidates_examined: 0,
            branching_completeness_assumed: false,
        }
    }
}

fn prime_of_p_group(g: &FiniteGroup) -> Result<(u64, u32)> {
    match factor(g.order()).as_slice() {
        [] => Ok((1, 0)),
        [(p, m)] => Ok((*p, *m)),
        _ => Err(Error::Precondition(format!("order {} is not a prime power", g.order()))),
    }
}

fn exact_sqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u64;
    (r * r == n).then_some(r)
}

/// Re-verifies a found subgroup from scratch.
fn certify(c: &TwoCocycle, h: &SubgroupSet, limits: &Limits) -> Result<Certificates> {
    let g = c.group();
    let check = SubgroupSet::from_elements(g, h.elements().iter().copied())?;
    let isotropy = isotropy_test(c, &check, limits)?;
    if !isotropy.isotropic {
        return Err(Error::Verification("reported subgroup is not isotropic".into()));
    }
    let normal = is_normal(g, &check);
    let abelian = check.is_abelian(g);
    Ok(Certificates {
        order: check.order(),
        normal,
        abelian,
        isotropy,
    })
}

/// Builds an isotropic subgroup of order `p^k` by repeatedly deflating
/// through central elements of order `p`.
///
/// With `branching`, every central element of order `p` is tried (in
/// element order) at each level until one succeeds.
pub fn find_isotropic_central_reduction(c: &TwoCocycle, k: u32, branching: bool, limits: &Limits) -> Result<SearchOutcome> {
    let g = c.group();
    let (p, m) = prime_of_p_group(g)?;
    if 2 * k > m {
        return Err(Error::Precondition(format!("target p^{k} needs |G| ≥ p^{}", 2 * k)));
    }
    let mut trace = Vec::new();
    let found = reduce_level(c, p, k, 0, branching, limits, &mut trace)?;
    let Some(els) = found else {
        let mut out = SearchOutcome::empty(Strategy::Constructive, SearchStatus::Inconclusive);
        out.trace = trace;
        return Ok(out);
    };
    let h = SubgroupSet::from_elements(g, els)?;
    if h.order() != p.pow(k) {
        return Err(Error::Verification(format!("central reduction produced order {}", h.order())));
    }
    let certs = certify(c, &h, limits)?;
    if let Some(r) = exact_sqrt(g.order()) {
        if r % h.order() != 0 {
            return Err(Error::Verification("isotropic order does not divide √|G|".into()));
        }
    }
    Ok(SearchOutcome {
        strategy: Strategy::Constructive,
        status: SearchStatus::Found,
        found: Some(h),
        trace,
        certificates: Some(certs),
        matches: None,
        candidates_examined: 0,
        branching_completeness_assumed: false,
    })
}

fn reduce_level(
    c: &TwoCocycle,
    p: u64,
    k: u32,
    level: usize,
    branching: bool,
    limits: &Limits,
    trace: &mut Vec<TraceStep>,
) -> Result<Option<Vec<Elem>>> {
    if k == 0 {
        return Ok(Some(vec![IDENTITY]));
    }
    let g = c.group();
    let z = center(g, limits)?;
    let candidates: Vec<Elem> = z
        .elements()
        .iter()
        .copied()
        .filter(|&x| x != IDENTITY && g.elem_order(x) == p)
        .collect();
    for &x in &candidates {
        let kx = crate::cocycle::k_set(c, x, limits)?;
        let d = match deflate_through_central(c, &kx, x, limits) {
            Ok(d) => d,
            Err(e @ Error::Threshold { .. }) if !branching => return Err(e),
            Err(Error::Threshold { .. }) => continue,
            Err(e) => return Err(e),
        };
        let mark = trace.len();
        trace.push(TraceStep::Central {
            level,
            x,
            k_order: kx.order(),
            quotient_order: d.quotient.group.order(),
            lift: d.scale,
        });
        let sub = reduce_level(&d.cocycle, p, k - 1, level + 1, branching, limits, trace)?;
        if let Some(qs) = sub {
            return Ok(Some(d.quotient.preimage(&qs)));
        }
        trace.truncate(mark);
        if !branching {
            return Ok(None);
        }
    }
    Ok(None)
}

/// The chain `{e} = A₀ < A₁ < …` of normal abelian isotropic subgroups.
#[derive(Clone, Debug, Serialize)]
pub struct TowerOutcome {
    pub prime: u64,
    /// `|G| = p^m`.
    pub m: u32,
    pub chain: Vec<SubgroupSet>,
    pub trace: Vec<TraceStep>,
    /// Largest `i` with `(i² + i − 2)/2 < m`.
    pub guaranteed_depth: u32,
    pub reached_depth: u32,
}

impl TowerOutcome {
    pub fn top(&self) -> &SubgroupSet {
        self.chain.last().expect("chain starts at the trivial subgroup")
    }

    pub fn meets_guarantee(&self) -> bool {
        self.reached_depth >= self.guaranteed_depth
    }
}

pub fn guaranteed_tower_depth(m: u32) -> u32 {
    // i² + i is even, so the halving is exact.
    let mut i = 0u64;
    while (i + 1) * (i + 1) + (i + 1) < 2 * m as u64 + 2 {
        i += 1;
    }
    i as u32
}

/// Grows the tower greedily: `A_i = ⟨A_{i−1}, g⟩` for the smallest
/// `g ∉ A_{i−1}` that centralizes `A_{i−1}` with `α(a, g) = α(g, a) = 0`,
/// whose coset is central in `G/A_{i−1}`, and with `g^p ∈ A_{i−1}`.
pub fn isotropic_tower(c: &TwoCocycle, limits: &Limits) -> Result<TowerOutcome> {
    let g = c.group();
    g.require_scan(limits)?;
    let (p, m) = prime_of_p_group(g)?;
    let mut chain = vec![SubgroupSet::trivial()];
    let mut trace = Vec::new();
    loop {
        let a = chain.last().unwrap();
        let agens = a.generators().to_vec();
        let next = g.elements().into_par_iter().find_first(|&x| {
            !a.contains(x)
                && agens.iter().all(|&y| {
                    g.commute(x, y) && alternating_form(c, y, x) == 0 && alternating_form(c, x, y) == 0
                })
                && g
                    .generators()
                    .iter()
                    .all(|&s| a.contains(g.mul(g.mul(x, s), g.mul(g.inv(x), g.inv(s)))))
                && a.contains(g.pow(x, p))
        });
        let Some(x) = next else { break };
        let mut gens = agens.clone();
        gens.push(x);
        let els = closure(g, &gens, limits.scan)?;
        let next = SubgroupSet::from_elements(g, els)?;
        if next.order() != a.order() * p {
            return Err(Error::Verification("tower step did not grow by p".into()));
        }
        if !is_normal(g, &next) || !next.is_abelian(g) {
            return Err(Error::Verification("tower level is not normal abelian".into()));
        }
        let iso = isotropy_test(c, &next, limits)?;
        if !iso.isotropic {
            return Err(Error::Verification("tower level is not isotropic".into()));
        }
        trace.push(TraceStep::Extend {
            level: chain.len(),
            g: x,
            order: next.order(),
        });
        chain.push(next);
    }
    let reached = chain.len() as u32 - 1;
    Ok(TowerOutcome {
        prime: p,
        m,
        chain,
        trace,
        guaranteed_depth: guaranteed_tower_depth(m),
        reached_depth: reached,
    })
}

#[derive(Clone, Debug, Default)]
pub struct LagrangianOptions {
    pub normal_only: bool,
    pub must_contain: Option<SubgroupSet>,
    /// Node budget for backtracking.
    pub budget: Option<u64>,
}

const DEFAULT_BUDGET: u64 = 200_000;

/// Searches for a Lagrangian (isotropic of order `√|G|`).
pub fn search_lagrangian(c: &TwoCocycle, options: &LagrangianOptions, strategy: Strategy, limits: &Limits) -> Result<SearchOutcome> {
    let g = c.group();
    let target = exact_sqrt(g.order())
        .ok_or_else(|| Error::Precondition(format!("|G| = {} is not a perfect square", g.order())))?;
    let seed = options.must_contain.clone().unwrap_or_else(SubgroupSet::trivial);
    if target % seed.order() != 0 {
        return Ok(SearchOutcome::empty(strategy, SearchStatus::CertifiedNone));
    }
    let accept = |h: &SubgroupSet| -> Result<Option<Certificates>> {
        if !seed.is_subset_of(h) {
            return Ok(None);
        }
        if options.normal_only && !is_normal(g, h) {
            return Ok(None);
        }
        let iso = isotropy_test(c, h, limits)?;
        if !iso.isotropic {
            return Ok(None);
        }
        Ok(Some(certify(c, h, limits)?))
    };
    let mut out = SearchOutcome::empty(strategy, SearchStatus::Inconclusive);
    if !seed.generators().is_empty() {
        out.trace.push(TraceStep::Seed {
            generators: seed.generators().to_vec(),
        });
    }
    match strategy {
        Strategy::Exhaustive => {
            let all = enumerate_subgroups_of_order(g, target, limits)?;
            let mut matches = 0;
            for h in &all {
                out.candidates_examined += 1;
                if let Some(cert) = accept(h)? {
                    matches += 1;
                    if out.found.is_none() {
                        out.found = Some(h.clone());
                        out.certificates = Some(cert);
                    }
                }
            }
            out.matches = Some(matches);
            out.status = if out.found.is_some() {
                SearchStatus::Found
            } else {
                SearchStatus::CertifiedNone
            };
        }
        Strategy::Constructive => {
            let (p, _) = prime_of_p_group(g)?;
            let k = target.trailing_zeros_base(p);
            let r = find_isotropic_central_reduction(c, k, true, limits)?;
            out.trace.extend(r.trace);
            if let Some(h) = r.found {
                if let Some(cert) = accept(&h)? {
                    out.found = Some(h);
                    out.certificates = Some(cert);
                    out.status = SearchStatus::Found;
                }
            }
        }
        Strategy::Tower => {
            let t = isotropic_tower(c, limits)?;
            out.trace.extend(t.trace.clone());
            let top = t.top().clone();
            if top.order() == target {
                if let Some(cert) = accept(&top)? {
                    out.found = Some(top);
                    out.certificates = Some(cert);
                    out.status = SearchStatus::Found;
                }
            }
        }
        Strategy::Backtracking => {
            g.require_scan(limits)?;
            let mut state = Backtrack {
                c,
                target,
                normal_only: options.normal_only,
                budget: options.budget.unwrap_or(DEFAULT_BUDGET),
                visited: HashSet::new(),
                examined: 0,
                exhausted_budget: false,
            };
            let hit = state.run(&seed, &accept)?;
            out.candidates_examined = state.examined;
            if let Some((h, cert)) = hit {
                out.found = Some(h);
                out.certificates = Some(cert);
                out.status = SearchStatus::Found;
            }
        }
    }
    Ok(out)
}

trait LogBase {
    fn trailing_zeros_base(self, p: u64) -> u32;
}

impl LogBase for u64 {
    fn trailing_zeros_base(mut self, p: u64) -> u32 {
        let mut k = 0;
        while p > 1 && self % p == 0 {
            self /= p;
            k += 1;
        }
        k
    }
}

struct Backtrack<'a> {
    c: &'a TwoCocycle,
    target: u64,
    normal_only: bool,
    budget: u64,
    visited: HashSet<Vec<Elem>>,
    examined: u64,
    exhausted_budget: bool,
}

impl Backtrack<'_> {
    fn run(
        &mut self,
        start: &SubgroupSet,
        accept: &dyn Fn(&SubgroupSet) -> Result<Option<Certificates>>,
    ) -> Result<Option<(SubgroupSet, Certificates)>> {
        let g = self.c.group().clone();
        self.dfs(&g, start, accept)
    }

    /// Commuting pairs inside `h` must pair trivially (necessary for isotropy).
    fn form_vanishes(&self, g: &FiniteGroup, h: &SubgroupSet) -> bool {
        let els = h.elements();
        els.par_iter().all(|&a| {
            els.iter()
                .all(|&b| !g.commute(a, b) || alternating_form(self.c, a, b) == 0)
        })
    }

    fn normal_closure_within(&self, g: &FiniteGroup, h: &SubgroupSet) -> Option<SubgroupSet> {
        let mut gens = h.generators().to_vec();
        loop {
            let els = closure(g, &gens, self.target).ok()?;
            let set: HashSet<Elem> = els.iter().copied().collect();
            let extra: Vec<Elem> = g
                .generators()
                .iter()
                .flat_map(|&s| gens.iter().map(move |&x| (s, x)))
                .map(|(s, x)| g.conj(s, x))
                .filter(|y| !set.contains(y))
                .collect();
            if extra.is_empty() {
                return SubgroupSet::from_elements(g, els).ok();
            }
            gens.extend(extra);
            gens.sort_unstable();
            gens.dedup();
        }
    }

    fn dfs(
        &mut self,
        g: &FiniteGroup,
        h: &SubgroupSet,
        accept: &dyn Fn(&SubgroupSet) -> Result<Option<Certificates>>,
    ) -> Result<Option<(SubgroupSet, Certificates)>> {
        if self.examined >= self.budget {
            self.exhausted_budget = true;
            return Ok(None);
        }
        self.examined += 1;
        if h.order() == self.target {
            return Ok(accept(h)?.map(|c| (h.clone(), c)));
        }
        let members: HashSet<Elem> = h.elements().iter().copied().collect();
        for x in g.elements() {
            if members.contains(&x) {
                continue;
            }
            let mut gens = h.generators().to_vec();
            gens.push(x);
            let Ok(els) = closure(g, &gens, self.target) else { continue };
            if self.target % els.len() as u64 != 0 || !self.visited.insert(els.clone()) {
                continue;
            }
            let next = SubgroupSet::from_elements(g, els)?;
            if !self.form_vanishes(g, &next) {
                continue;
            }
            let next = if self.normal_only {
                match self.normal_closure_within(g, &next) {
                    Some(n) if self.target % n.order() == 0 => {
                        if n.order() != next.order() && !self.visited.insert(n.elements().to_vec()) {
                            continue;
                        }
                        n
                    }
                    _ => continue,
                }
            } else {
                next
            };
            if let Some(hit) = self.dfs(g, &next, accept)? {
                return Ok(Some(hit));
            }
            if self.exhausted_budget {
                return Ok(None);
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainmentVerdict {
    /// `|M| < √|G|`: no normal Lagrangian contains `A`.
    NotContainedInAnyNormalLagrangian,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContainmentCertificate {
    /// `M = {g ∈ C_G(A) : α(a, g) = α(g, a) = 0 for all a ∈ A}`.
    pub m_set: SubgroupSet,
    pub m_order: u64,
    pub sqrt_order: Option<u64>,
    pub verdict: ContainmentVerdict,
}

/// Every abelian isotropic subgroup containing `A` lies in `M`, and normal
/// Lagrangians are abelian, so `|M| < √|G|` rules them all out.
pub fn containment_obstruction(c: &TwoCocycle, a: &SubgroupSet, limits: &Limits) -> Result<ContainmentCertificate> {
    let g = c.group();
    if !is_normal(g, a) {
        return Err(Error::Precondition("A is not normal".into()));
    }
    if !a.is_abelian(g) {
        return Err(Error::Precondition("A is not abelian".into()));
    }
    if !isotropy_test(c, a, limits)?.isotropic {
        return Err(Error::Precondition("A is not isotropic".into()));
    }
    let cent = centralizer_of_subgroup(g, a, limits)?;
    let agens = a.generators().to_vec();
    let els: Vec<Elem> = cent
        .elements()
        .par_iter()
        .copied()
        .filter(|&x| {
            agens
                .iter()
                .all(|&y| alternating_form(c, y, x) == 0 && alternating_form(c, x, y) == 0)
        })
        .collect();
    let m_set = SubgroupSet::from_elements(g, els)?;
    let sqrt_order = exact_sqrt(g.order());
    let verdict = match sqrt_order {
        Some(r) if m_set.order() < r => ContainmentVerdict::NotContainedInAnyNormalLagrangian,
        _ => ContainmentVerdict::Inconclusive,
    };
    Ok(ContainmentCertificate {
        m_order: m_set.order(),
        m_set,
        sqrt_order,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::group::abelian_group;

    /// Standard symplectic cocycle on (Z_p)^{2n}: coordinates (a₁..a_n,
    /// b₁..b_n), c = Σ b₁ᵢ·a₂ᵢ.
    fn symplectic(p: u32, n: usize) -> TwoCocycle {
        let g = Arc::new(abelian_group(&vec![p; 2 * n]).unwrap());
        let radices = vec![p; 2 * n];
        let size = g.order() as usize;
        let digits: Vec<Vec<u32>> = (0..size as Elem).map(|x| crate::group::digits(x, &radices)).collect();
        let vals: Vec<i64> = (0..size * size)
            .map(|i| {
                let (x, y) = (&digits[i / size], &digits[i % size]);
                (0..n).map(|t| (x[n + t] * y[t]) as i64).sum()
            })
            .collect();
        TwoCocycle::from_table(g, p as u64, &vals).unwrap()
    }

    #[test]
    fn tower_depth_bound() {
        assert_eq!(guaranteed_tower_depth(2), 1);
        assert_eq!(guaranteed_tower_depth(4), 2);
        assert_eq!(guaranteed_tower_depth(6), 3);
        assert_eq!(guaranteed_tower_depth(8), 3);
        // i = 4 needs 9 < m.
        assert_eq!(guaranteed_tower_depth(10), 4);
    }

    #[test]
    fn exhaustive_counts_lagrangians_of_symplectic_plane() {
        let c = symplectic(3, 1);
        let out = search_lagrangian(&c, &LagrangianOptions::default(), Strategy::Exhaustive, &Limits::default()).unwrap();
        assert_eq!(out.status, SearchStatus::Found);
        assert_eq!(out.matches, Some(4));
    }

    #[test]
    fn central_reduction_trivial_target() {
        let c = symplectic(3, 1);
        let out = find_isotropic_central_reduction(&c, 0, false, &Limits::default()).unwrap();
        assert_eq!(out.found.unwrap().order(), 1);
    }

    #[test]
    fn central_reduction_on_symplectic_space() {
        let c = symplectic(3, 2);
        let out = find_isotropic_central_reduction(&c, 2, false, &Limits::default()).unwrap();
        let h = out.found.unwrap();
        assert_eq!(h.order(), 9);
        assert_eq!(out.trace.len(), 2);
    }

    #[test]
    fn tower_on_symplectic_space_reaches_lagrangian() {
        let c = symplectic(3, 2);
        let t = isotropic_tower(&c, &Limits::default()).unwrap();
        assert_eq!(t.m, 4);
        assert!(t.meets_guarantee());
        assert_eq!(t.top().order(), 9);
    }

    #[test]
    fn backtracking_agrees_with_exhaustive() {
        let c = symplectic(2, 2);
        let limits = Limits::default();
        let ex = search_lagrangian(&c, &LagrangianOptions::default(), Strategy::Exhaustive, &limits).unwrap();
        let bt = search_lagrangian(&c, &LagrangianOptions::default(), Strategy::Backtracking, &limits).unwrap();
        assert_eq!(ex.status, SearchStatus::Found);
        assert_eq!(bt.status, SearchStatus::Found);
        assert!(bt.certificates.unwrap().isotropy.isotropic);
    }

    #[test]
    fn containment_of_lagrangian_is_itself() {
        let c = symplectic(3, 1);
        let limits = Limits::default();
        // (1, 0) in coordinates (a, b) has index 1.
        let a = SubgroupSet::from_elements(c.group(), [0, 1, 2]).unwrap();
        let cert = containment_obstruction(&c, &a, &limits).unwrap();
        assert_eq!(cert.m_set, a);
        assert_eq!(cert.verdict, ContainmentVerdict::Inconclusive);
    }
}
