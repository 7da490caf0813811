use isotropy_core::cocycle::{alternating_form, is_nondegenerate, is_regular, ScanMode, TwoCocycle};
use isotropy_core::cohomology::{verify_non_coboundary, CoboundaryWitness, Coefficients, NonCoboundaryCertificate};
use isotropy_core::group::{closure, is_normal, SubgroupSet};
use isotropy_core::{Elem, FiniteGroup, Limits};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::input::InputRecord;

pub const SCHEMA: &str = "isotropy-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Affirmative,
    Negative,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Affirmative => 0,
            Verdict::Negative => 3,
            Verdict::Inconclusive => 4,
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Affirmative
        } else {
            Verdict::Negative
        }
    }
}

/// A claim that `verify` re-checks from scratch against the rebuilt inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Witness {
    /// `⟨generators⟩` has exactly `order` elements.
    SubgroupClosure { name: String, generators: Vec<Elem>, order: u64 },
    Normal { name: String, generators: Vec<Elem> },
    /// `scale·c = δf` on `⟨generators⟩`, with `f` listed over its elements.
    IsotropyCochain {
        name: String,
        generators: Vec<Elem>,
        modulus: u64,
        scale: u64,
        elements: Vec<Elem>,
        values: Vec<u64>,
    },
    /// Commuting pair with nonzero alternating form.
    FormNonzero { name: String, g: Elem, h: Elem, value: u64 },
    NonCoboundary {
        name: String,
        generators: Vec<Elem>,
        modulus: u64,
        scale: u64,
        weights: Vec<((Elem, Elem), u64)>,
    },
    /// A non-identity element on which the form vanishes identically.
    RegularElement { name: String, x: Elem },
    RegularClasses { name: String, exhaustive: bool, count: usize },
}

impl Witness {
    pub fn name(&self) -> &str {
        match self {
            Witness::SubgroupClosure { name, .. }
            | Witness::Normal { name, .. }
            | Witness::IsotropyCochain { name, .. }
            | Witness::FormNonzero { name, .. }
            | Witness::NonCoboundary { name, .. }
            | Witness::RegularElement { name, .. }
            | Witness::RegularClasses { name, .. } => name,
        }
    }

    pub fn isotropy(name: &str, h: &SubgroupSet, w: &CoboundaryWitness) -> Self {
        Witness::IsotropyCochain {
            name: name.into(),
            generators: h.generators().to_vec(),
            modulus: w.modulus,
            scale: w.scale,
            elements: w.elements.clone(),
            values: w.values.clone(),
        }
    }

    pub fn closure(name: &str, h: &SubgroupSet) -> Self {
        Witness::SubgroupClosure { name: name.into(), generators: h.generators().to_vec(), order: h.order() }
    }

    /// Replays the claim; `Err` carries a human-readable reason.
    pub fn replay(&self, g: Option<&FiniteGroup>, c: Option<&TwoCocycle>, limits: &Limits) -> Result<(), String> {
        let g = g.ok_or("no group available to replay against")?;
        let span = |gens: &[Elem]| -> Result<SubgroupSet, String> {
            if let Some(&bad) = gens.iter().find(|&&x| x as u64 >= g.order()) {
                return Err(format!("generator {bad} out of range"));
            }
            let els = closure(g, gens, limits.scan).map_err(|e| e.to_string())?;
            SubgroupSet::from_elements(g, els).map_err(|e| e.to_string())
        };
        let cocycle = || c.ok_or_else(|| "no cocycle available to replay against".to_string());
        match self {
            Witness::SubgroupClosure { generators, order, .. } => {
                let h = span(generators)?;
                (h.order() == *order).then_some(()).ok_or(format!("closure has order {} not {order}", h.order()))
            }
            Witness::Normal { generators, .. } => {
                let h = span(generators)?;
                is_normal(g, &h).then_some(()).ok_or("subgroup is not normal".into())
            }
            Witness::IsotropyCochain { generators, modulus, scale, elements, values, .. } => {
                let c = cocycle()?;
                let h = span(generators)?;
                if h.elements() != elements.as_slice() || values.len() != elements.len() {
                    return Err("cochain support differs from the subgroup".into());
                }
                let w = CoboundaryWitness {
                    modulus: *modulus,
                    scale: *scale,
                    elements: elements.clone(),
                    values: values.clone(),
                };
                w.verify(c).then_some(()).ok_or("scale·c ≠ δf".into())
            }
            Witness::FormNonzero { g: a, h: b, value, .. } => {
                let c = cocycle()?;
                if !g.commute(*a, *b) {
                    return Err("pair does not commute".into());
                }
                let v = alternating_form(c, *a, *b);
                (v == *value && v != 0).then_some(()).ok_or(format!("form value is {v}"))
            }
            Witness::NonCoboundary { generators, modulus, scale, weights, .. } => {
                let c = cocycle()?;
                let h = span(generators)?;
                let cert = NonCoboundaryCertificate { modulus: *modulus, scale: *scale, weights: weights.clone() };
                verify_non_coboundary(c, &h, Coefficients::RootsOfUnity, &cert)
                    .then_some(())
                    .ok_or("certificate does not refute a coboundary".into())
            }
            Witness::RegularElement { x, .. } => {
                let c = cocycle()?;
                (*x != 0 && (*x as u64) < g.order() && is_regular(c, *x))
                    .then_some(())
                    .ok_or(format!("element {x} is not a non-identity regular element"))
            }
            Witness::RegularClasses { exhaustive, count, .. } => {
                let c = cocycle()?;
                let mode = if *exhaustive { ScanMode::Exhaustive } else { ScanMode::ClassRepresentatives };
                let v = is_nondegenerate(c, limits, mode).map_err(|e| e.to_string())?;
                (v.regular_classes == *count)
                    .then_some(())
                    .ok_or(format!("recount gives {} regular classes", v.regular_classes))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Parameters {
    pub seed: u64,
    pub limits: Limits,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool: Tool,
    pub command: String,
    /// The parsed command line, enough to replay it.
    pub invocation: Value,
    pub inputs: Vec<InputRecord>,
    pub parameters: Parameters,
    pub verdict: Verdict,
    pub exit_code: i32,
    pub results: Value,
    pub witnesses: Vec<Witness>,
}

/// First JSON pointer at which two values differ.
pub fn first_difference(a: &Value, b: &Value, path: &str) -> Option<String> {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for k in x.keys().chain(y.keys()) {
                let p = format!("{path}/{k}");
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => {
                        if let Some(d) = first_difference(u, v, &p) {
                            return Some(d);
                        }
                    }
                    _ => return Some(p),
                }
            }
            None
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                return Some(path.to_string());
            }
            x.iter()
                .zip(y)
                .enumerate()
                .find_map(|(i, (u, v))| first_difference(u, v, &format!("{path}/{i}")))
        }
        _ => (a != b).then(|| path.to_string()),
    }
}
