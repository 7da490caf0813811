//! Finite groups with a dense Cayley-table backend and a structured backend
//! for the semidirect family, plus subgroup machinery.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::FamilyGroup;

/// Group element: an index in `0..order`, with 0 the identity.
pub type Elem = u32;

pub const IDENTITY: Elem = 0;

/// Size thresholds guarding scans and exact solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Limits {
    /// Largest group that may be scanned element by element.
    pub scan: u64,
    /// Largest group for exhaustive subgroup enumeration.
    pub enumeration: u64,
    /// Largest subgroup handed to the coboundary solver.
    pub solver: u64,
    /// Largest group for the H² computation.
    pub h2: u64,
    /// Largest quotient for the degree-3 cup-product solve.
    pub cup: u64,
    /// Largest Cayley table that may be built.
    pub cayley: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            scan: 10_000_000,
            enumeration: 4096,
            solver: 4096,
            h2: 64,
            cup: 32,
            cayley: 1 << 16,
        }
    }
}

/// Seed for every randomized check unless a caller overrides it.
pub const DEFAULT_SEED: u64 = 0;

const EXHAUSTIVE_ASSOCIATIVITY: u64 = 512;
const SAMPLED_TRIPLES: usize = 1_000_000;

#[derive(Clone, Debug)]
enum Backend {
    Cayley { table: Vec<Elem>, inv: Vec<Elem> },
    Family(FamilyGroup),
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    backend: Backend,
    order: u64,
    label: String,
    gens: Vec<Elem>,
}

impl FiniteGroup {
    /// Builds a Cayley-backed group from a row-major table, validating the
    /// Latin-square property, the identity at index 0 and associativity.
    pub fn from_table(order: usize, table: Vec<Elem>, label: impl Into<String>) -> Result<Self> {
        Self::from_table_with_limits(order, table, label, &Limits::default())
    }

    pub fn from_table_with_limits(
        order: usize,
        table: Vec<Elem>,
        label: impl Into<String>,
        limits: &Limits,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::MalformedTable("order must be positive".into()));
        }
        if order as u64 > limits.cayley {
            return Err(Error::Threshold {
                what: "cayley order",
                size: order as u64,
                limit: limits.cayley,
            });
        }
        if table.len() != order * order {
            return Err(Error::MalformedTable(format!(
                "expected {} entries, found {}",
                order * order,
                table.len()
            )));
        }
        validate_latin(order, &table)?;
        let group = Self::from_table_unchecked(order, table, label);
        group.check_associativity(DEFAULT_SEED)?;
        Ok(group)
    }

    /// Builds a table from a multiplication closure and validates it.
    pub fn from_fn(
        order: usize,
        label: impl Into<String>,
        mul: impl Fn(Elem, Elem) -> Elem + Sync,
    ) -> Result<Self> {
        let table: Vec<Elem> = (0..order * order)
            .into_par_iter()
            .map(|k| mul((k / order) as Elem, (k % order) as Elem))
            .collect();
        Self::from_table(order, table, label)
    }

    /// Trusted constructor for tables produced by this crate (quotients,
    /// subgroup tables); still debug-checks the Latin property.
    pub(crate) fn from_table_unchecked(order: usize, table: Vec<Elem>, label: impl Into<String>) -> Self {
        debug_assert!(validate_latin(order, &table).is_ok());
        let mut inv = vec![0; order];
        for g in 0..order {
            let row = &table[g * order..(g + 1) * order];
            let h = row.iter().position(|&x| x == IDENTITY).expect("Latin row");
            inv[g] = h as Elem;
        }
        let mut group = FiniteGroup {
            backend: Backend::Cayley { table, inv },
            order: order as u64,
            label: label.into(),
            gens: Vec::new(),
        };
        group.gens = greedy_generators(&group, &(0..order as Elem).collect::<Vec<_>>())
            .expect("a group generates itself");
        group
    }

    pub fn family(p: u32, n: usize) -> Result<Self> {
        let fam = FamilyGroup::new(p, n)?;
        let gens = fam.generators();
        Ok(FiniteGroup {
            order: fam.order(),
            backend: Backend::Family(fam),
            label: format!("G_{n}(p={p})"),
            gens,
        })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_cayley(&self) -> bool {
        matches!(self.backend, Backend::Cayley { .. })
    }

    pub fn as_family(&self) -> Option<&FamilyGroup> {
        match &self.backend {
            Backend::Family(f) => Some(f),
            Backend::Cayley { .. } => None,
        }
    }

    /// Dense table, when Cayley-backed.
    pub fn table(&self) -> Option<&[Elem]> {
        match &self.backend {
            Backend::Cayley { table, .. } => Some(table),
            Backend::Family(_) => None,
        }
    }

    pub fn identity(&self) -> Elem {
        IDENTITY
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order as Elem
    }

    pub fn generators(&self) -> &[Elem] {
        &self.gens
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.backend {
            Backend::Cayley { table, .. } => table[a as usize * self.order as usize + b as usize],
            Backend::Family(f) => f.mul(a, b),
        }
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        match &self.backend {
            Backend::Cayley { inv, .. } => inv[a as usize],
            Backend::Family(f) => f.inv(a),
        }
    }

    /// `h g h⁻¹`.
    #[inline]
    pub fn conj(&self, h: Elem, g: Elem) -> Elem {
        self.mul(self.mul(h, g), self.inv(h))
    }

    #[inline]
    pub fn commute(&self, a: Elem, b: Elem) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn pow(&self, a: Elem, k: u64) -> Elem {
        let mut acc = IDENTITY;
        let mut base = a;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn elem_order(&self, a: Elem) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != IDENTITY {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.gens
            .iter()
            .enumerate()
            .all(|(i, &a)| self.gens[i + 1..].iter().all(|&b| self.commute(a, b)))
    }

    pub fn require_scan(&self, limits: &Limits) -> Result<()> {
        if self.order > limits.scan {
            return Err(Error::Threshold {
                what: "element scan",
                size: self.order,
                limit: limits.scan,
            });
        }
        Ok(())
    }

    /// Least common multiple of element orders.
    pub fn exponent(&self, limits: &Limits) -> Result<u64> {
        self.require_scan(limits)?;
        Ok(self
            .elements()
            .map(|g| self.elem_order(g))
            .fold(1, crate::modular::lcm))
    }

    /// Associativity: exhaustive up to order 512, otherwise a million
    /// uniformly sampled triples from a seeded generator.
    pub fn check_associativity(&self, seed: u64) -> Result<()> {
        let n = self.order;
        let bad = |a: Elem, b: Elem, c: Elem| self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c));
        if n <= EXHAUSTIVE_ASSOCIATIVITY {
            let witness = (0..n as Elem).into_par_iter().find_first(|&a| {
                (0..n as Elem).any(|b| (0..n as Elem).any(|c| bad(a, b, c)))
            });
            if let Some(a) = witness {
                return Err(Error::MalformedTable(format!("associativity fails for element {a}")));
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..SAMPLED_TRIPLES {
                let (a, b, c) = (
                    rng.gen_range(0..n) as Elem,
                    rng.gen_range(0..n) as Elem,
                    rng.gen_range(0..n) as Elem,
                );
                if bad(a, b, c) {
                    return Err(Error::MalformedTable(format!(
                        "associativity fails at ({a}, {b}, {c})"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn validate_latin(order: usize, table: &[Elem]) -> Result<()> {
    for g in 0..order {
        if table[g] != g as Elem || table[g * order] != g as Elem {
            return Err(Error::MalformedTable(format!(
                "index 0 is not a two-sided identity (element {g})"
            )));
        }
    }
    let mut seen = vec![0u32; order];
    for r in 0..order {
        for c in 0..order {
            let v = table[r * order + c] as usize;
            if v >= order {
                return Err(Error::MalformedTable(format!("entry ({r},{c}) = {v} out of range")));
            }
            if seen[v] == r as u32 + 1 {
                return Err(Error::MalformedTable(format!("row {r} repeats {v}")));
            }
            seen[v] = r as u32 + 1;
        }
    }
    seen.iter_mut().for_each(|s| *s = 0);
    for c in 0..order {
        for r in 0..order {
            let v = table[r * order + c] as usize;
            if seen[v] == c as u32 + 1 {
                return Err(Error::MalformedTable(format!("column {c} repeats {v}")));
            }
            seen[v] = c as u32 + 1;
        }
    }
    Ok(())
}

/// Closure of `gens` under multiplication, sorted. Fails once more than
/// `limit` elements have been reached.
pub fn closure(g: &FiniteGroup, gens: &[Elem], limit: u64) -> Result<Vec<Elem>> {
    let mut seen: HashSet<Elem> = HashSet::new();
    seen.insert(IDENTITY);
    let mut queue = VecDeque::from([IDENTITY]);
    while let Some(x) = queue.pop_front() {
        for &s in gens {
            let y = g.mul(x, s);
            if seen.insert(y) {
                if seen.len() as u64 > limit {
                    return Err(Error::Threshold {
                        what: "subgroup closure",
                        size: seen.len() as u64,
                        limit,
                    });
                }
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<Elem> = seen.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

/// Picks generators of a sorted element set by adding the smallest element
/// not yet reached; errors if the set is not closed.
fn greedy_generators(g: &FiniteGroup, sorted: &[Elem]) -> Result<Vec<Elem>> {
    let mut gens = Vec::new();
    let mut reached: Vec<Elem> = vec![IDENTITY];
    for &s in sorted {
        if reached.binary_search(&s).is_ok() {
            continue;
        }
        gens.push(s);
        reached = closure(g, &gens, sorted.len() as u64)?;
        if let Some(bad) = reached.iter().find(|x| sorted.binary_search(x).is_err()) {
            return Err(Error::NotSubgroup(format!("product {bad} escapes the set")));
        }
    }
    if reached.len() != sorted.len() {
        return Err(Error::NotSubgroup("set does not contain the identity".into()));
    }
    Ok(gens)
}

/// A materialized subgroup: sorted element list plus generators.
#[derive(Clone, Debug)]
pub struct SubgroupSet {
    elements: Vec<Elem>,
    generators: Vec<Elem>,
    normal: OnceLock<bool>,
    abelian: OnceLock<bool>,
}

impl PartialEq for SubgroupSet {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for SubgroupSet {}

impl serde::Serialize for SubgroupSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SubgroupSet", 3)?;
        st.serialize_field("order", &self.order())?;
        st.serialize_field("generators", &self.generators)?;
        st.serialize_field("elements", &self.elements)?;
        st.end()
    }
}

impl SubgroupSet {
    pub fn trivial() -> Self {
        Self::from_parts(vec![IDENTITY], Vec::new())
    }

    pub(crate) fn from_parts(elements: Vec<Elem>, generators: Vec<Elem>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        SubgroupSet {
            elements,
            generators,
            normal: OnceLock::new(),
            abelian: OnceLock::new(),
        }
    }

    /// Validates that `elements` form a subgroup of `g` (closure, identity,
    /// Lagrange) and derives a generator list.
    pub fn from_elements(g: &FiniteGroup, elements: impl IntoIterator<Item = Elem>) -> Result<Self> {
        let mut els: Vec<Elem> = elements.into_iter().collect();
        els.sort_unstable();
        els.dedup();
        if els.first() != Some(&IDENTITY) {
            return Err(Error::NotSubgroup("missing identity".into()));
        }
        if g.order() % els.len() as u64 != 0 {
            return Err(Error::NotSubgroup(format!(
                "order {} does not divide {}",
                els.len(),
                g.order()
            )));
        }
        let gens = greedy_generators(g, &els)?;
        Ok(Self::from_parts(els, gens))
    }

    pub fn whole(g: &FiniteGroup, limits: &Limits) -> Result<Self> {
        g.require_scan(limits)?;
        Ok(Self::from_parts(g.elements().collect(), g.generators().to_vec()))
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_subset_of(&self, other: &SubgroupSet) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn is_abelian(&self, g: &FiniteGroup) -> bool {
        *self.abelian.get_or_init(|| {
            let gens = &self.generators;
            gens.iter()
                .enumerate()
                .all(|(i, &a)| gens[i + 1..].iter().all(|&b| g.commute(a, b)))
        })
    }

    /// Cached normality flag; see [`is_normal`].
    pub fn is_normal_in(&self, g: &FiniteGroup) -> bool {
        *self.normal.get_or_init(|| {
            g.generators().iter().all(|&s| {
                self.generators
                    .iter()
                    .all(|&h| self.contains(g.conj(s, h)))
            })
        })
    }

    /// Flags computed so far (normal, abelian).
    pub fn cached_flags(&self) -> (Option<bool>, Option<bool>) {
        (self.normal.get().copied(), self.abelian.get().copied())
    }
}

pub fn subgroup_generated(g: &FiniteGroup, gens: &[Elem], limits: &Limits) -> Result<SubgroupSet> {
    for &x in gens {
        if x as u64 >= g.order() {
            return Err(Error::Precondition(format!("generator {x} is not in the group")));
        }
    }
    let elements = closure(g, gens, limits.scan)?;
    Ok(SubgroupSet::from_parts(elements, gens.to_vec()))
}

/// Normality test: `gHg⁻¹ ⊆ H` for `g` over generators of the group and
/// `h` over generators of `H`, which suffices for finite groups.
pub fn is_normal(g: &FiniteGroup, h: &SubgroupSet) -> bool {
    h.is_normal_in(g)
}

pub fn centralizer(g: &FiniteGroup, x: Elem, limits: &Limits) -> Result<SubgroupSet> {
    g.require_scan(limits)?;
    let els: Vec<Elem> = g
        .elements()
        .into_par_iter()
        .filter(|&y| g.commute(x, y))
        .collect();
    let gens = greedy_generators(g, &els)?;
    Ok(SubgroupSet::from_parts(els, gens))
}

/// Elements commuting with every element of `a`.
pub fn centralizer_of_subgroup(g: &FiniteGroup, a: &SubgroupSet, limits: &Limits) -> Result<SubgroupSet> {
    g.require_scan(limits)?;
    let els: Vec<Elem> = g
        .elements()
        .into_par_iter()
        .filter(|&y| a.generators().iter().all(|&s| g.commute(s, y)))
        .collect();
    let gens = greedy_generators(g, &els)?;
    Ok(SubgroupSet::from_parts(els, gens))
}

pub fn center(g: &FiniteGroup, limits: &Limits) -> Result<SubgroupSet> {
    g.require_scan(limits)?;
    let els: Vec<Elem> = g
        .elements()
        .into_par_iter()
        .filter(|&y| g.generators().iter().all(|&s| g.commute(s, y)))
        .collect();
    let gens = greedy_generators(g, &els)?;
    Ok(SubgroupSet::from_parts(els, gens))
}

/// Conjugacy classes as sorted element lists, ordered by least element.
pub fn conjugacy_classes(g: &FiniteGroup, limits: &Limits) -> Result<Vec<Vec<Elem>>> {
    g.require_scan(limits)?;
    let n = g.order() as usize;
    let mut class_of = vec![u32::MAX; n];
    let mut classes = Vec::new();
    for x in g.elements() {
        if class_of[x as usize] != u32::MAX {
            continue;
        }
        let id = classes.len() as u32;
        class_of[x as usize] = id;
        let mut members = vec![x];
        let mut head = 0;
        while head < members.len() {
            let y = members[head];
            head += 1;
            for &s in g.generators() {
                let z = g.conj(s, y);
                if class_of[z as usize] == u32::MAX {
                    class_of[z as usize] = id;
                    members.push(z);
                }
            }
        }
        members.sort_unstable();
        classes.push(members);
    }
    Ok(classes)
}

/// Smallest normal subgroup containing `gens`.
pub fn normal_closure(g: &FiniteGroup, gens: &[Elem], limits: &Limits) -> Result<SubgroupSet> {
    let mut current = gens.to_vec();
    loop {
        let h = subgroup_generated(g, &current, limits)?;
        let mut extra = Vec::new();
        for &s in g.generators() {
            for &x in h.generators() {
                let y = g.conj(s, x);
                if !h.contains(y) && !extra.contains(&y) {
                    extra.push(y);
                }
            }
        }
        if extra.is_empty() {
            let _ = h.normal.set(true);
            return Ok(h);
        }
        current.extend(extra);
    }
}

/// The quotient `K/N` for `N ◁ K ≤ G` as a Cayley group on cosets, with the
/// minimal element of each coset as its representative.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: FiniteGroup,
    /// Coset representatives, indexed by quotient element.
    pub reps: Vec<Elem>,
    domain: HashMap<Elem, Elem>,
}

impl Quotient {
    /// Image of `x ∈ K` in the quotient.
    pub fn project(&self, x: Elem) -> Option<Elem> {
        self.domain.get(&x).copied()
    }

    /// Canonical section: minimal coset representative.
    pub fn section(&self, q: Elem) -> Elem {
        self.reps[q as usize]
    }

    /// Full preimage of a set of quotient elements, sorted.
    pub fn preimage(&self, qs: &[Elem]) -> Vec<Elem> {
        let wanted: HashSet<Elem> = qs.iter().copied().collect();
        let mut out: Vec<Elem> = self
            .domain
            .iter()
            .filter(|(_, q)| wanted.contains(q))
            .map(|(&x, _)| x)
            .collect();
        out.sort_unstable();
        out
    }

    /// Checks that projection is a homomorphism on all pairs of `K`
    /// (when `|K| ≤ 512`) or on generator pairs otherwise.
    pub fn verify_homomorphism(&self, parent: &FiniteGroup, k: &SubgroupSet) -> Result<()> {
        let check = |a: Elem, b: Elem| -> Result<()> {
            let lhs = self.project(parent.mul(a, b));
            let rhs = self.group.mul(self.project(a).unwrap(), self.project(b).unwrap());
            if lhs != Some(rhs) {
                return Err(Error::Verification(format!("projection not multiplicative at ({a}, {b})")));
            }
            Ok(())
        };
        if k.order() <= 512 {
            for &a in k.elements() {
                for &b in k.elements() {
                    check(a, b)?;
                }
            }
        } else {
            for &a in k.elements() {
                for &b in k.generators() {
                    check(a, b)?;
                }
            }
        }
        Ok(())
    }
}

pub fn quotient_group(g: &FiniteGroup, n: &SubgroupSet, limits: &Limits) -> Result<Quotient> {
    let whole = SubgroupSet::whole(g, limits)?;
    quotient_of_subgroup(g, &whole, n, limits)
}

pub fn quotient_of_subgroup(
    g: &FiniteGroup,
    k: &SubgroupSet,
    n: &SubgroupSet,
    limits: &Limits,
) -> Result<Quotient> {
    if !n.is_subset_of(k) {
        return Err(Error::Precondition("N is not contained in K".into()));
    }
    for &s in k.generators() {
        for &x in n.generators() {
            if !n.contains(g.conj(s, x)) {
                return Err(Error::NotNormal(format!("conjugate of {x} by {s} leaves N")));
            }
        }
    }
    let q_order = (k.order() / n.order()) as usize;
    if q_order as u64 > limits.cayley {
        return Err(Error::Threshold {
            what: "quotient cayley order",
            size: q_order as u64,
            limit: limits.cayley,
        });
    }
    let mut domain: HashMap<Elem, Elem> = HashMap::with_capacity(k.elements().len());
    let mut reps = Vec::with_capacity(q_order);
    for &x in k.elements() {
        if domain.contains_key(&x) {
            continue;
        }
        let id = reps.len() as Elem;
        reps.push(x);
        for &m in n.elements() {
            domain.insert(g.mul(x, m), id);
        }
    }
    let table: Vec<Elem> = (0..q_order * q_order)
        .into_par_iter()
        .map(|idx| domain[&g.mul(reps[idx / q_order], reps[idx % q_order])])
        .collect();
    let group = FiniteGroup::from_table_unchecked(q_order, table, format!("{}/N", g.label()));
    Ok(Quotient { group, reps, domain })
}

/// Every subgroup of order `k`, each once, ordered by sorted element list.
///
/// Subgroups are grown from `{e}` by adjoining one element at a time; only
/// intermediate subgroups whose order divides `k` are kept, which is sound
/// because every subgroup of order `k` arises through such a chain.
pub fn enumerate_subgroups_of_order(g: &FiniteGroup, k: u64, limits: &Limits) -> Result<Vec<SubgroupSet>> {
    if g.order() > limits.enumeration {
        return Err(Error::Threshold {
            what: "subgroup enumeration",
            size: g.order(),
            limit: limits.enumeration,
        });
    }
    if k == 0 || g.order() % k != 0 {
        return Err(Error::Precondition(format!("{k} does not divide |G| = {}", g.order())));
    }
    let mut seen: HashSet<Vec<Elem>> = HashSet::new();
    let mut layer = vec![SubgroupSet::trivial()];
    seen.insert(vec![IDENTITY]);
    let mut found: Vec<SubgroupSet> = Vec::new();
    if k == 1 {
        return Ok(layer);
    }
    while !layer.is_empty() {
        let mut next = Vec::new();
        for h in &layer {
            let mut covered: HashSet<Elem> = h.elements().iter().copied().collect();
            for x in g.elements() {
                if covered.contains(&x) {
                    continue;
                }
                // ⟨H, x⟩ = ⟨H, xh⟩, so skip the rest of the coset xH.
                for &y in h.elements() {
                    covered.insert(g.mul(x, y));
                }
                let mut gens = h.generators().to_vec();
                gens.push(x);
                let els = match closure(g, &gens, k) {
                    Ok(e) => e,
                    Err(Error::Threshold { .. }) => continue,
                    Err(e) => return Err(e),
                };
                if k % els.len() as u64 != 0 || !seen.insert(els.clone()) {
                    continue;
                }
                let sub = SubgroupSet::from_parts(els, gens);
                if sub.order() == k {
                    found.push(sub);
                } else {
                    next.push(sub);
                }
            }
        }
        layer = next;
    }
    found.sort_by(|a, b| a.elements().cmp(b.elements()));
    Ok(found)
}

/// Cayley copy of a subgroup together with the embedding into the parent.
pub fn subgroup_as_group(g: &FiniteGroup, k: &SubgroupSet, limits: &Limits) -> Result<Quotient> {
    quotient_of_subgroup(g, k, &SubgroupSet::trivial(), limits)
}

pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup, limits: &Limits) -> Result<FiniteGroup> {
    let (na, nb) = (a.order() as usize, b.order() as usize);
    let n = na * nb;
    if n as u64 > limits.cayley {
        return Err(Error::Threshold {
            what: "cayley order",
            size: n as u64,
            limit: limits.cayley,
        });
    }
    let table: Vec<Elem> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (x, y) = (idx / n, idx % n);
            let p = a.mul((x / nb) as Elem, (y / nb) as Elem) as usize;
            let q = b.mul((x % nb) as Elem, (y % nb) as Elem) as usize;
            (p * nb + q) as Elem
        })
        .collect();
    Ok(FiniteGroup::from_table_unchecked(
        n,
        table,
        format!("{}×{}", a.label(), b.label()),
    ))
}

/// Abelian group `Z/d_1 × … × Z/d_k` with mixed-radix indexing (first
/// factor most significant).
pub fn abelian_group(invariants: &[u32]) -> Result<FiniteGroup> {
    if invariants.iter().any(|&d| d == 0) {
        return Err(Error::Parameter("invariants must be positive".into()));
    }
    let order: u64 = invariants.iter().map(|&d| d as u64).product();
    if order > Limits::default().cayley {
        return Err(Error::Threshold {
            what: "cayley order",
            size: order,
            limit: Limits::default().cayley,
        });
    }
    let inv = invariants.to_vec();
    let label = if inv.is_empty() {
        "1".to_string()
    } else {
        inv.iter().map(|d| format!("Z{d}")).collect::<Vec<_>>().join("×")
    };
    FiniteGroup::from_fn(order as usize, label, move |x, y| {
        let (dx, dy) = (digits(x, &inv), digits(y, &inv));
        let sum: Vec<u32> = dx.iter().zip(&dy).zip(&inv).map(|((a, b), d)| (a + b) % d).collect();
        undigits(&sum, &inv)
    })
}

pub fn cyclic_group(n: u32) -> Result<FiniteGroup> {
    abelian_group(&[n])
}

/// Mixed-radix digits of `x` (first radix most significant).
pub fn digits(mut x: Elem, radices: &[u32]) -> Vec<u32> {
    let mut out = vec![0; radices.len()];
    for k in (0..radices.len()).rev() {
        out[k] = x % radices[k];
        x /= radices[k];
    }
    out
}

pub fn undigits(ds: &[u32], radices: &[u32]) -> Elem {
    ds.iter().zip(radices).fold(0, |acc, (&d, &r)| acc * r + d % r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u32) -> FiniteGroup {
        cyclic_group(n).unwrap()
    }

    #[test]
    fn trivial_group_from_table() {
        let g = FiniteGroup::from_table(1, vec![0], "1").unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.generators().is_empty());
    }

    #[test]
    fn rejects_non_latin_and_bad_identity() {
        assert!(matches!(
            FiniteGroup::from_table(2, vec![0, 1, 1, 1], "bad"),
            Err(Error::MalformedTable(_))
        ));
        assert!(matches!(
            FiniteGroup::from_table(2, vec![1, 0, 0, 1], "bad"),
            Err(Error::MalformedTable(_))
        ));
        // Latin square with identity but not associative (order 5 loop).
        let t = vec![
            0, 1, 2, 3, 4, 1, 0, 3, 4, 2, 2, 4, 0, 1, 3, 3, 2, 4, 0, 1, 4, 3, 1, 2, 0,
        ];
        assert!(FiniteGroup::from_table(5, t, "loop").is_err());
    }

    #[test]
    fn rejects_oversized_cayley() {
        let limits = Limits { cayley: 4, ..Limits::default() };
        let err = FiniteGroup::from_table_with_limits(5, vec![0; 25], "big", &limits).unwrap_err();
        assert!(matches!(err, Error::Threshold { .. }));
    }

    #[test]
    fn cyclic_generated_subgroups() {
        let g = abelian_group(&[3, 3]).unwrap();
        let l = Limits::default();
        assert_eq!(subgroup_generated(&g, &[], &l).unwrap().order(), 1);
        let x = undigits(&[1, 0], &[3, 3]);
        assert_eq!(subgroup_generated(&g, &[x], &l).unwrap().order(), 3);
    }

    #[test]
    fn abelian_centralizer_is_everything() {
        let g = abelian_group(&[2, 6]).unwrap();
        let l = Limits::default();
        for x in g.elements() {
            assert_eq!(centralizer(&g, x, &l).unwrap().order(), 12);
        }
        assert_eq!(conjugacy_classes(&g, &l).unwrap().len(), 12);
    }

    #[test]
    fn quotient_of_z4_by_two() {
        let g = z(4);
        let l = Limits::default();
        let n = subgroup_generated(&g, &[2], &l).unwrap();
        let q = quotient_group(&g, &n, &l).unwrap();
        assert_eq!(q.group.order(), 2);
        q.verify_homomorphism(&g, &SubgroupSet::whole(&g, &l).unwrap()).unwrap();
        let triv = quotient_group(&g, &SubgroupSet::trivial(), &l).unwrap();
        assert_eq!(triv.group.table(), g.table());
    }

    #[test]
    fn quotient_requires_normality() {
        // S3 via permutations of {0,1,2}.
        let perms: Vec<[u8; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [u8; 3]| perms.iter().position(|q| *q == p).unwrap() as Elem;
        let s3 = FiniteGroup::from_fn(6, "S3", |a, b| {
            let (pa, pb) = (perms[a as usize], perms[b as usize]);
            idx([pa[pb[0] as usize], pa[pb[1] as usize], pa[pb[2] as usize]])
        })
        .unwrap();
        let l = Limits::default();
        let h = subgroup_generated(&s3, &[1], &l).unwrap();
        assert!(!is_normal(&s3, &h));
        assert!(matches!(quotient_group(&s3, &h, &l), Err(Error::NotNormal(_))));
        let a3 = subgroup_generated(&s3, &[3], &l).unwrap();
        assert!(is_normal(&s3, &a3));
        assert_eq!(conjugacy_classes(&s3, &l).unwrap().len(), 3);
    }

    #[test]
    fn enumerate_in_elementary_abelian() {
        let g = abelian_group(&[3, 3]).unwrap();
        let l = Limits::default();
        assert_eq!(enumerate_subgroups_of_order(&g, 1, &l).unwrap().len(), 1);
        assert_eq!(enumerate_subgroups_of_order(&g, 3, &l).unwrap().len(), 4);
        assert_eq!(enumerate_subgroups_of_order(&g, 9, &l).unwrap().len(), 1);
        assert!(enumerate_subgroups_of_order(&g, 2, &l).is_err());
        // (Z2)^3 has 7 subgroups of order 2 and 7 of order 4.
        let v = abelian_group(&[2, 2, 2]).unwrap();
        assert_eq!(enumerate_subgroups_of_order(&v, 2, &l).unwrap().len(), 7);
        assert_eq!(enumerate_subgroups_of_order(&v, 4, &l).unwrap().len(), 7);
    }

    #[test]
    fn from_elements_rejects_non_subgroups() {
        let g = z(6);
        assert!(SubgroupSet::from_elements(&g, [0, 1]).is_err());
        assert!(SubgroupSet::from_elements(&g, [2, 4]).is_err());
        let h = SubgroupSet::from_elements(&g, [0, 2, 4]).unwrap();
        assert_eq!(h.generators(), &[2]);
    }

    #[test]
    fn direct_product_orders() {
        let l = Limits::default();
        let g = direct_product(&z(2), &z(3), &l).unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.elements().any(|x| g.elem_order(x) == 6));
        assert_eq!(g.exponent(&l).unwrap(), 6);
    }
}
