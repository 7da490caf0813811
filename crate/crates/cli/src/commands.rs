use clap::{Args, Subcommand, ValueEnum};
use isotropy_core::cocycle::{is_nondegenerate, isotropy_test, ScanMode, TwoCocycle};
use isotropy_core::cohomology::{coboundary_witness, h2_representatives, CoboundaryOutcome, Coefficients};
use isotropy_core::gallery::{order36_report, verify_rank_obstruction};
use isotropy_core::group::{is_normal, subgroup_generated, SubgroupSet};
use isotropy_core::iyb::{
    cocycle_from_one_cocycle, cup_product_obstruction, one_cocycle_from_class, roundtrip_residual, CupOrientation,
};
use isotropy_core::search::{
    containment_obstruction, find_isotropic_central_reduction, isotropic_tower, search_lagrangian,
    ContainmentVerdict, LagrangianOptions, SearchOutcome, SearchStatus, Strategy,
};
use isotropy_core::twisted::{
    build_module_nu, heisenberg_pipeline, induce_and_certify, intertwiner_obstruction, transgression,
    SubgroupCharacter,
};
use isotropy_core::{Elem, FiniteGroup, Limits};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::input::{absolutize, Ctx};
use crate::report::{Verdict, Witness};
use crate::CliError;

/// Largest group whose cocycle table is embedded in a report.
const TABLE_EXPORT_LIMIT: u64 = 256;
/// Largest semidirect product for which `iyb-build` runs the round trip.
const ROUNDTRIP_EXPORT_LIMIT: u64 = 81;

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct Instance {
    /// Group spec file or shorthand (family_gn:p,n, heisenberg:p, order36, symplectic_std:p,n, abelian:a,b,..).
    #[arg(long)]
    pub group: String,
    /// Cocycle spec file or shorthand (trivial[:m], family_cr:r, fixture, standard).
    #[arg(long)]
    pub cocycle: String,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct Tuning {
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub scan_limit: Option<u64>,
    #[arg(long)]
    pub solver_limit: Option<u64>,
    #[arg(long)]
    pub enumeration_limit: Option<u64>,
    #[arg(long)]
    pub h2_limit: Option<u64>,
    #[arg(long)]
    pub cup_limit: Option<u64>,
}

impl Tuning {
    pub fn limits(&self) -> Limits {
        let mut l = Limits::default();
        if let Some(v) = self.scan_limit {
            l.scan = v;
        }
        if let Some(v) = self.solver_limit {
            l.solver = v;
        }
        if let Some(v) = self.enumeration_limit {
            l.enumeration = v;
        }
        if let Some(v) = self.h2_limit {
            l.h2 = v;
        }
        if let Some(v) = self.cup_limit {
            l.cup = v;
        }
        l
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyArg {
    Constructive,
    Tower,
    Exhaustive,
    Backtracking,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Constructive => Strategy::Constructive,
            StrategyArg::Tower => Strategy::Tower,
            StrategyArg::Exhaustive => Strategy::Exhaustive,
            StrategyArg::Backtracking => Strategy::Backtracking,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientsArg {
    Exact,
    Roots,
}

impl From<CoefficientsArg> for Coefficients {
    fn from(c: CoefficientsArg) -> Self {
        match c {
            CoefficientsArg::Exact => Coefficients::Exact,
            CoefficientsArg::Roots => Coefficients::RootsOfUnity,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationArg {
    BetaFirst,
    PiFirst,
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Nondegeneracy and regular-class count.
    Analyze {
        #[command(flatten)]
        inst: Instance,
        /// Test every element instead of class representatives.
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Does the class restrict to zero on ⟨subgroup⟩?
    Isotropy {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, value_delimiter = ',', required = true)]
        subgroup: Vec<Elem>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Search for a Lagrangian subgroup.
    Lagrangian {
        #[command(flatten)]
        inst: Instance,
        #[arg(long)]
        normal_only: bool,
        /// Generators of a subgroup the Lagrangian must contain.
        #[arg(long, value_delimiter = ',')]
        contains: Option<Vec<Elem>>,
        #[arg(long, value_enum, default_value = "exhaustive")]
        strategy: StrategyArg,
        #[arg(long)]
        budget: Option<u64>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Chain of normal abelian isotropic subgroups.
    Tower {
        #[command(flatten)]
        inst: Instance,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Isotropic subgroup of order p^k by central reduction.
    Construct {
        #[command(flatten)]
        inst: Instance,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        branching: bool,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Certificate that no normal Lagrangian contains ⟨subgroup⟩.
    Obstruct {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, value_delimiter = ',', required = true)]
        subgroup: Vec<Elem>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// H²(G, Z/m).
    H2 {
        #[arg(long)]
        group: String,
        #[arg(long)]
        modulus: u64,
        #[arg(long, value_enum, default_value = "roots")]
        coefficients: CoefficientsArg,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// 1-cocycle Q → Â from a class with A normal abelian isotropic.
    IybExtract {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, value_delimiter = ',', required = true)]
        subgroup: Vec<Elem>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// 2-cocycle on A⋊Q from a 1-cocycle file.
    IybBuild {
        #[arg(long)]
        pi: String,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Cup-product obstruction in H³(Q, C^*).
    Cup {
        #[arg(long)]
        pi: String,
        /// JSON file: A-valued 2-cocycle on Q, row-major list of coordinate vectors.
        #[arg(long)]
        beta: String,
        #[arg(long, value_enum, default_value = "beta-first")]
        orientation: OrientationArg,
        #[arg(long, value_enum, default_value = "roots")]
        coefficients: CoefficientsArg,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Induce a linear character and certify irreducibility; with --heisenberg, run the full lifting pipeline.
    Lift {
        #[arg(long, conflicts_with_all = ["group", "subgroup", "images"])]
        heisenberg: Option<u32>,
        #[arg(long, requires_all = ["subgroup", "images", "modulus"])]
        group: Option<String>,
        #[arg(long, value_delimiter = ',')]
        subgroup: Option<Vec<Elem>>,
        /// Generator images `x:v,y:w` defining η on the subgroup.
        #[arg(long)]
        images: Option<String>,
        #[arg(long)]
        modulus: Option<u64>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Transgression of a G-invariant character of a normal subgroup.
    Transgress {
        #[arg(long)]
        group: String,
        #[arg(long, value_delimiter = ',', required = true)]
        subgroup: Vec<Elem>,
        #[arg(long)]
        images: String,
        #[arg(long)]
        modulus: u64,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Projective module ν for a family cocycle.
    Nu {
        #[command(flatten)]
        inst: Instance,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Scalar obstructing an extension of ν to the whole family group.
    ObstructionScalar {
        #[command(flatten)]
        inst: Instance,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Rank table of R^l₁S^l₂ − I over F_p.
    RankLemma {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
    },
    /// List gallery instances, or export one as explicit tables.
    Gallery {
        #[arg(long, requires = "cocycle")]
        group: Option<String>,
        #[arg(long)]
        cocycle: Option<String>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Replay every witness in a report.
    Verify {
        #[arg(long)]
        report: String,
    },
}

pub struct Outcome {
    pub verdict: Verdict,
    pub results: Value,
    pub witnesses: Vec<Witness>,
}

fn js<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn parse_images(s: &str) -> Result<Vec<(Elem, u64)>, CliError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (a, b) = t
                .split_once(':')
                .ok_or_else(|| CliError::Input(format!("image '{t}' is not of the form element:value")))?;
            let a = a.trim().parse().map_err(|_| CliError::Input(format!("bad element '{a}'")))?;
            let b = b.trim().parse().map_err(|_| CliError::Input(format!("bad value '{b}'")))?;
            Ok((a, b))
        })
        .collect()
}

fn check_elements(g: &FiniteGroup, xs: &[Elem]) -> Result<(), CliError> {
    match xs.iter().find(|&&x| x as u64 >= g.order()) {
        Some(x) => Err(CliError::Input(format!("element {x} is outside a group of order {}", g.order()))),
        None => Ok(()),
    }
}

fn span(ctx: &Ctx, g: &FiniteGroup, gens: &[Elem]) -> Result<SubgroupSet, CliError> {
    check_elements(g, gens)?;
    Ok(subgroup_generated(g, gens, &ctx.limits)?)
}

fn table_doc(c: &TwoCocycle) -> Option<Value> {
    let n = c.group().order();
    if n > TABLE_EXPORT_LIMIT {
        return None;
    }
    let t = c.to_table(n * n).ok()?;
    Some(json!({"kind": "table", "modulus": c.modulus(), "values": t}))
}

fn group_doc(g: &FiniteGroup) -> Option<Value> {
    let n = g.order();
    if n > TABLE_EXPORT_LIMIT {
        return None;
    }
    let rows: Vec<Vec<Elem>> = g.elements().map(|a| g.elements().map(|b| g.mul(a, b)).collect()).collect();
    Some(json!({"kind": "cayley", "order": n, "label": g.label(), "table": rows}))
}

/// Witnesses for a subgroup claimed isotropic (and normal when asked).
fn subgroup_witnesses(ctx: &Ctx, c: &TwoCocycle, name: &str, h: &SubgroupSet, normal: bool) -> Result<Vec<Witness>, CliError> {
    let mut out = vec![Witness::closure(name, h)];
    if normal {
        out.push(Witness::Normal { name: format!("{name} normal"), generators: h.generators().to_vec() });
    }
    if let Some(w) = isotropy_test(c, h, &ctx.limits)?.witness {
        out.push(Witness::isotropy(&format!("{name} isotropy cochain"), h, &w));
    }
    Ok(out)
}

fn search_outcome(ctx: &Ctx, c: &TwoCocycle, out: &SearchOutcome, normal: bool) -> Result<Outcome, CliError> {
    let verdict = match out.status {
        SearchStatus::Found => Verdict::Affirmative,
        SearchStatus::CertifiedNone => Verdict::Negative,
        SearchStatus::Inconclusive => Verdict::Inconclusive,
    };
    let witnesses = match &out.found {
        Some(h) => subgroup_witnesses(ctx, c, "found subgroup", h, normal)?,
        None => Vec::new(),
    };
    Ok(Outcome { verdict, results: js(out), witnesses })
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Isotropy { .. } => "isotropy",
            Command::Lagrangian { .. } => "lagrangian",
            Command::Tower { .. } => "tower",
            Command::Construct { .. } => "construct",
            Command::Obstruct { .. } => "obstruct",
            Command::H2 { .. } => "h2",
            Command::IybExtract { .. } => "iyb-extract",
            Command::IybBuild { .. } => "iyb-build",
            Command::Cup { .. } => "cup",
            Command::Lift { .. } => "lift",
            Command::Transgress { .. } => "transgress",
            Command::Nu { .. } => "nu",
            Command::ObstructionScalar { .. } => "obstruction-scalar",
            Command::RankLemma { .. } => "rank-lemma",
            Command::Gallery { .. } => "gallery",
            Command::Verify { .. } => "verify",
        }
    }

    pub fn tuning(&self) -> Tuning {
        match self {
            Command::Analyze { tuning, .. }
            | Command::Isotropy { tuning, .. }
            | Command::Lagrangian { tuning, .. }
            | Command::Tower { tuning, .. }
            | Command::Construct { tuning, .. }
            | Command::Obstruct { tuning, .. }
            | Command::H2 { tuning, .. }
            | Command::IybExtract { tuning, .. }
            | Command::IybBuild { tuning, .. }
            | Command::Cup { tuning, .. }
            | Command::Lift { tuning, .. }
            | Command::Transgress { tuning, .. }
            | Command::Nu { tuning, .. }
            | Command::ObstructionScalar { tuning, .. }
            | Command::Gallery { tuning, .. } => tuning.clone(),
            Command::RankLemma { .. } | Command::Verify { .. } => Tuning::default(),
        }
    }

    /// Rewrites file arguments as absolute paths so a report replays from anywhere.
    pub fn absolutize_paths(&mut self) {
        match self {
            Command::Analyze { inst, .. }
            | Command::Isotropy { inst, .. }
            | Command::Lagrangian { inst, .. }
            | Command::Tower { inst, .. }
            | Command::Construct { inst, .. }
            | Command::Obstruct { inst, .. }
            | Command::IybExtract { inst, .. }
            | Command::Nu { inst, .. }
            | Command::ObstructionScalar { inst, .. } => {
                absolutize(&mut inst.group);
                absolutize(&mut inst.cocycle);
            }
            Command::H2 { group, .. } | Command::Transgress { group, .. } => absolutize(group),
            Command::IybBuild { pi, .. } => absolutize(pi),
            Command::Cup { pi, beta, .. } => {
                absolutize(pi);
                absolutize(beta);
            }
            Command::Lift { group, .. } | Command::Gallery { group, cocycle: _, .. } => {
                if let Some(g) = group {
                    absolutize(g);
                }
            }
            Command::Verify { report } => absolutize(report),
            Command::RankLemma { .. } => {}
        }
        if let Command::Gallery { cocycle: Some(c), .. } = self {
            absolutize(c);
        }
    }

    pub fn run(&self, ctx: &mut Ctx) -> Result<Outcome, CliError> {
        match self {
            Command::Analyze { inst, exhaustive, .. } => {
                let (g, c) = ctx.instance(&inst.group, &inst.cocycle)?;
                let mode = if *exhaustive { ScanMode::Exhaustive } else { ScanMode::ClassRepresentatives };
                let v = is_nondegenerate(&c, &ctx.limits, mode)?;
                let mut witnesses = vec![Witness::RegularClasses {
                    name: "regular-class count".into(),
                    exhaustive: *exhaustive,
                    count: v.regular_classes,
                }];
                if let Some(x) = v.witness {
                    witnesses.push(Witness::RegularElement { name: "degeneracy witness".into(), x });
                }
                let results = json!({
                    "group": {"label": g.label(), "order": g.order()},
                    "modulus": c.modulus(),
                    "cocycle_kind": c.kind_name(),
                    "nondegeneracy": js(&v),
                });
                Ok(Outcome { verdict: Verdict::from_bool(v.nondegenerate), results, witnesses })
            }
            Command::Isotropy { inst, subgroup, .. } => {
                let (g, c) = ctx.instance(&inst.group, &inst.cocycle)?;
                let h = span(ctx, &g, subgroup)?;
                let v = isotropy_test(&c, &h, &ctx.limits)?;
                let mut witnesses = vec![Witness::closure("subgroup", &h)];
                if let Some(w) = &v.witness {
                    witnesses.push(Witness::isotropy("isotropy cochain", &h, w));
                }
                if let Some((a, b)) = v.form_obstruction {
                    let value = isotropy_core::cocycle::alternating_form(&c, a, b);
                    witnesses.push(Witness::FormNonzero { name: "form obstruction".into(), g: a, h: b, value });
                } else if !v.isotropic {
                    if let CoboundaryOutcome::NotCoboundary(cert) =
                        coboundary_witness(&c, &h, Coefficients::RootsOfUnity, &ctx.limits)?
                    {
                        witnesses.push(Witness::NonCoboundary {
                            name: "non-coboundary certificate".into(),
                            generators: h.generators().to_vec(),
                            modulus: cert.modulus,
                            scale: cert.scale,
                            weights: cert.weights,
                        });
                    }
                }
                let results = json!({"subgroup": js(&h), "normal": is_normal(&g, &h), "verdict": js(&v)});
                Ok(Outcome { verdict: Verdict::from_bool(v.isotropic), results, witnesses })
            }
            Command::Lagrangian { inst, normal_only, contains, strategy, budget, .. } => {
                let (g, c) = ctx.instance(&inst.group, &inst.cocycle)?;
                let must_contain = match contains {
                    Some(gens) => Some(span(ctx, &g, gens)?),
                    None => None,
                };
                let opts = LagrangianOptions { normal_only: *normal_only, must_contain, budget: *budget };
                let out = search_lagrangian(&c, &opts, (*strategy).into(), &ctx.limits)?;
                search_outcome(ctx, &c, &out, *normal_only)
            }
            Command::Construct { inst, k, branching, .. } => {
                let (_, c) = ctx.instance(&inst.group, &inst.cocycle)?;
                let out = find_isotropic_central_reduction(&c, *k, *branching, &ctx.limits)?;
                search_outcome(ctx, &c, &out, false)
            }
            Command::Tower { inst, .. } => {
                let (_, c) = ctx.instance(&inst.group, &inst.cocycle)?;
                let t = isotropic_tower(&c, &ctx.limits)?;
                let mut witnesses = Vec::new();
                for (i, level) in t.chain.iter().enumerate().skip(1) {
                    witnesses.push(Witness::closure(&format!("level {i}"), level));
                    witnesses.push(Witness::Normal { name: format!("level {i} normal"), generators: level.generators().to_vec() });
                }
                if t.chain.len() > 1 {
                    witnesses.extend(subgroup_witnesses(ctx, &c, "top", t.top(), false)?.into_iter().skip(1));
                }
                let results = json!({
                    "prime": t.prime,
                    "m": t.m,
                    "guaranteed_depth": t.guaranteed_depth,
                    "reached_depth": t.reached_depth,
                    "meets_guarantee": t.meets_guarantee(),
                    "chain": t.chain.iter().map(|h| json!({"order": h.order(), "generators": h.generators()})).collect::<Vec<_>>(),
                    "trace": js(&t.trace),
                });
                Ok(Outcome { verdict: Verdict::from_bool(t.meets_guarantee()), results, witnesses })
            }
            Command::Obstruct { inst, subgroup, .. } => {
                let (_, c) = ctx.instance(&inst.group, &inst.cocycle)?;
                let a = span(ctx, c.group(), subgroup)?;
                let cert = containment_obstruction(&c, &a, &ctx.limits)?;
                let witnesses = vec![
                    Witness::closure("A", &a),
                    Witness::Normal { name: "A normal".into(), generators: a.generators().to_vec() },
                    Witness::closure("M", &cert.m_set),
                ];
                let verdict = match cert.verdict {
                    ContainmentVerdict::NotContainedInAnyNormalLagrangian => Verdict::Affirmative,
                    ContainmentVerdict::Inconclusive => Verdict::Inconclusive,
                };
                Ok(Outcome { verdict, results: js(&cert), witnesses })
            }
            Command::H2 { group, modulus, coefficients, .. } => {
                let g = ctx.group(group)?;
                let b = h2_representatives(g.clone(), *modulus, (*coefficients).into(), &ctx.limits)?;
                let reps: Vec<Value> = b.representatives.iter().map(|r| table_doc(r).unwrap_or(Value::Null)).collect();
                let results = json!({
                    "group": {"label": g.label(), "order": g.order()},
                    "modulus": modulus,
                    "coefficients": js(&Coefficients::from(*coefficients)),
                    "invariants": b.invariants(),
                    "order": b.order(),
                    "generator_orders": b.orders,
                    "representatives": reps,
                });
                Ok(Outcome { verdict: Verdict::Affirmative, results, witnesses: Vec::new() })
            }
            Command::IybExtract { inst, subgroup, .. } => {
                let (g, c) = ctx.instance(&inst.group, &inst.cocycle)?;
                let a = span(ctx, &g, subgroup)?;
                let compare = a.order() * a.order() == g.order();
                let ex = one_cocycle_from_class(&c, &a, compare, &ctx.limits)?;
                let mut witnesses = subgroup_witnesses(ctx, &c, "A", &a, true)?;
                witnesses.retain(|w| !matches!(w, Witness::IsotropyCochain { .. }) || a.order() <= ctx.limits.solver);
                let results = json!({"extraction": js(&ex), "quotient_order": ex.quotient.group.order()});
                Ok(Outcome { verdict: Verdict::from_bool(ex.bijective), results, witnesses })
            }
            Command::IybBuild { pi, .. } => {
                let pi = ctx.one_cocycle(pi)?;
                let (sd, c) = cocycle_from_one_cocycle(&pi, &ctx.limits)?;
                let v = is_nondegenerate(&c, &ctx.limits, ScanMode::ClassRepresentatives)?;
                let roundtrip = if sd.group.order() <= ROUNDTRIP_EXPORT_LIMIT {
                    Some(roundtrip_residual(&sd, &c, &ctx.limits)?)
                } else {
                    None
                };
                if let Some(rt) = &roundtrip {
                    if rt.pi_recovered != pi.values {
                        return Err(CliError::Core(isotropy_core::Error::Verification(
                            "round trip did not recover π".into(),
                        )));
                    }
                }
                ctx.group = Some(sd.group.clone());
                ctx.cocycle = Some(c.clone());
                let a = sd.a_subgroup();
                let mut witnesses = subgroup_witnesses(ctx, &c, "A", &a, true)?;
                witnesses.push(Witness::RegularClasses {
                    name: "regular-class count".into(),
                    exhaustive: false,
                    count: v.regular_classes,
                });
                let results = json!({
                    "semidirect_order": sd.group.order(),
                    "bijective": pi.is_bijective(),
                    "nondegeneracy": js(&v),
                    "roundtrip": roundtrip.as_ref().map(js),
                    "export": {"group": group_doc(&sd.group), "cocycle": table_doc(&c)},
                });
                Ok(Outcome { verdict: Verdict::from_bool(v.nondegenerate), results, witnesses })
            }
            Command::Cup { pi, beta, orientation, coefficients, .. } => {
                let pi = ctx.one_cocycle(pi)?;
                let doc = ctx.raw("beta", beta)?;
                let beta: Vec<Vec<u32>> = serde_json::from_value(doc.get("values").cloned().unwrap_or(doc))
                    .map_err(|e| CliError::Input(format!("beta: expected a list of coordinate vectors: {e}")))?;
                let o = match orientation {
                    OrientationArg::BetaFirst => CupOrientation::BetaFirst,
                    OrientationArg::PiFirst => CupOrientation::PiFirst,
                };
                let v = cup_product_obstruction(&beta, &pi, o, (*coefficients).into(), &ctx.limits)?;
                Ok(Outcome { verdict: Verdict::from_bool(v.vanishes), results: js(&v), witnesses: Vec::new() })
            }
            Command::Lift { heisenberg: Some(p), .. } => {
                let rep = heisenberg_pipeline(*p, &ctx.limits)?;
                let p = *p as u64;
                let ok = rep.all_irreducible
                    && rep.pairwise_distinct
                    && rep.representations.len() as u64 == p * p + p - 1
                    && rep.sum_of_squares == p * p * p;
                Ok(Outcome { verdict: Verdict::from_bool(ok), results: js(&rep), witnesses: Vec::new() })
            }
            Command::Lift { group: Some(group), subgroup: Some(gens), images: Some(images), modulus: Some(m), .. } => {
                let g = ctx.group(group)?;
                let h = span(ctx, &g, gens)?;
                let images = parse_images(images)?;
                check_elements(&g, &images.iter().map(|x| x.0).collect::<Vec<_>>())?;
                let eta = SubgroupCharacter::from_generator_images(&g, &h, &images, *m)?;
                let ch = induce_and_certify(&g, &eta, &ctx.limits)?;
                let witnesses = vec![Witness::closure("H", &h)];
                let results = json!({"eta": js(&eta), "character": js(&ch)});
                Ok(Outcome { verdict: Verdict::from_bool(ch.irreducible), results, witnesses })
            }
            Command::Lift { .. } => Err(CliError::Input(
                "lift needs either --heisenberg p or --group, --subgroup, --images and --modulus".into(),
            )),
            Command::Transgress { group, subgroup, images, modulus, .. } => {
                let g = ctx.group(group)?;
                let n = span(ctx, &g, subgroup)?;
                let images = parse_images(images)?;
                check_elements(&g, &images.iter().map(|x| x.0).collect::<Vec<_>>())?;
                let eta = SubgroupCharacter::from_generator_images(&g, &n, &images, *modulus)?;
                let t = transgression(&g, &eta, &ctx.limits)?;
                let q = &t.quotient;
                let witnesses = vec![
                    Witness::closure("N", &n),
                    Witness::Normal { name: "N normal".into(), generators: n.generators().to_vec() },
                ];
                let results = json!({
                    "eta": js(&eta),
                    "quotient": {"order": q.group.order(), "representatives": q.reps},
                    "cocycle": table_doc(&t.cocycle),
                    "section_independent": t.section_independent,
                });
                Ok(Outcome { verdict: Verdict::from_bool(t.section_independent), results, witnesses })
            }
            Command::Nu { inst, .. } => {
                let (_, c) = ctx.instance(&inst.group, &inst.cocycle)?;
                let m = build_module_nu(&c, ctx.seed)?;
                let results = json!({
                    "dimension": m.dim(),
                    "subgroup_order": m.elements.len(),
                    "modulus": m.modulus,
                    "law_checked_pairs": m.law_checked_pairs,
                    "character_norm": m.character_norm,
                    "character_norm_exact": m.character_norm_exact,
                    "irreducible": m.is_irreducible(),
                });
                Ok(Outcome { verdict: Verdict::from_bool(m.is_irreducible()), results, witnesses: Vec::new() })
            }
            Command::ObstructionScalar { inst, .. } => {
                let (_, c) = ctx.instance(&inst.group, &inst.cocycle)?;
                let rep = intertwiner_obstruction(&c, ctx.seed)?;
                Ok(Outcome { verdict: Verdict::from_bool(rep.extension_exists), results: js(&rep), witnesses: Vec::new() })
            }
            Command::RankLemma { p, n } => {
                let rep = verify_rank_obstruction(*p, *n)?;
                Ok(Outcome { verdict: Verdict::from_bool(rep.obstruction_holds), results: js(&rep), witnesses: Vec::new() })
            }
            Command::Gallery { group: None, .. } => Ok(Outcome {
                verdict: Verdict::Affirmative,
                results: json!({"instances": gallery_listing()}),
                witnesses: Vec::new(),
            }),
            Command::Gallery { group: Some(group), cocycle, .. } => {
                let cocycle = cocycle.as_deref().unwrap_or("trivial");
                let (g, c) = ctx.instance(group, cocycle)?;
                let mut results = json!({
                    "label": g.label(),
                    "order": g.order(),
                    "modulus": c.modulus(),
                    "group": group_doc(&g),
                    "cocycle": table_doc(&c),
                });
                if g.label() == "order36" {
                    results["order36"] = js(&order36_report(&c, &ctx.limits)?);
                }
                Ok(Outcome { verdict: Verdict::Affirmative, results, witnesses: Vec::new() })
            }
            Command::Verify { .. } => unreachable!("verify is dispatched separately"),
        }
    }
}

fn gallery_listing() -> Value {
    json!([
        {"group": "family_gn:3,3", "cocycle": "family_cr:1", "note": "order 6561, nondegenerate for r ≠ 0"},
        {"group": "family_gn:3,3", "cocycle": "family_cr:0", "note": "r = 0, degenerate"},
        {"group": "order36", "cocycle": "fixture", "note": "nonnilpotent, nondegenerate, no normal subgroup of order 6"},
        {"group": "heisenberg:3", "cocycle": "trivial:3", "note": "Heisenberg group of order 27"},
        {"group": "symplectic_std:3,2", "cocycle": "standard", "note": "(Z3)^4 with the standard symplectic cocycle"},
        {"group": "symplectic_std:3,3", "cocycle": "standard", "note": "(Z3)^6 with the standard symplectic cocycle"},
        {"group": "abelian:3,3", "cocycle": "trivial:3", "note": "Z3 × Z3"}
    ])
}
