//! JSON documents describing groups, cocycles and 1-cocycles, plus the
//! `kind:args` shorthand accepted on the command line.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::cocycle::TwoCocycle;
use crate::error::{Error, Result};
use crate::gallery::{make_order36, make_order36_group, make_standard_symplectic};
use crate::group::{abelian_group, normal_closure, quotient_group, Elem, FiniteGroup, Limits};
use crate::iyb::{cocycle_from_one_cocycle, AbelianModule, OneCocycle};
use crate::twisted::heisenberg_group;

fn obj<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::spec(path, "expected an object"))
}

fn field<'a>(o: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    o.get(key).ok_or_else(|| Error::spec(format!("{path}.{key}"), "missing field"))
}

fn uint(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| Error::spec(path, "expected a non-negative integer"))
}

fn int(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| Error::spec(path, "expected an integer"))
}

fn uint_field(o: &Map<String, Value>, key: &str, path: &str) -> Result<u64> {
    uint(field(o, key, path)?, &format!("{path}.{key}"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::spec(path, "expected an array"))
}

fn int_list(v: &Value, path: &str) -> Result<Vec<i64>> {
    array(v, path)?.iter().enumerate().map(|(i, x)| int(x, &format!("{path}[{i}]"))).collect()
}

fn uint_list(v: &Value, path: &str) -> Result<Vec<u64>> {
    array(v, path)?.iter().enumerate().map(|(i, x)| uint(x, &format!("{path}[{i}]"))).collect()
}

fn kind<'a>(o: &'a Map<String, Value>, path: &str) -> Result<&'a str> {
    field(o, "kind", path)?
        .as_str()
        .ok_or_else(|| Error::spec(format!("{path}.kind"), "expected a string"))
}

fn small(v: u64, path: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::spec(path, "value too large"))
}

/// Builds a group from a group-spec document.
pub fn build_group(doc: &Value, limits: &Limits) -> Result<Arc<FiniteGroup>> {
    build_group_at(doc, "$", limits)
}

fn build_group_at(doc: &Value, path: &str, limits: &Limits) -> Result<Arc<FiniteGroup>> {
    let o = obj(doc, path)?;
    let g = match kind(o, path)? {
        "cayley" => {
            let order = uint_field(o, "order", path)? as usize;
            if order as u64 > limits.cayley {
                return Err(Error::Threshold {
                    what: "cayley order",
                    size: order as u64,
                    limit: limits.cayley,
                });
            }
            let tp = format!("{path}.table");
            let rows = array(field(o, "table", path)?, &tp)?;
            if rows.len() != order {
                return Err(Error::spec(&tp, format!("expected {order} rows, found {}", rows.len())));
            }
            let mut table = Vec::with_capacity(order * order);
            for (i, row) in rows.iter().enumerate() {
                let rp = format!("{tp}[{i}]");
                let row = uint_list(row, &rp)?;
                if row.len() != order {
                    return Err(Error::spec(&rp, format!("expected {order} entries, found {}", row.len())));
                }
                for (j, &x) in row.iter().enumerate() {
                    if x as usize >= order {
                        return Err(Error::spec(format!("{rp}[{j}]"), format!("entry {x} out of range")));
                    }
                    table.push(x as Elem);
                }
            }
            let label = o.get("label").and_then(Value::as_str).unwrap_or("cayley").to_string();
            FiniteGroup::from_table_with_limits(order, table, label, limits)?
        }
        "family_gn" => {
            let p = small(uint_field(o, "p", path)?, path)?;
            let n = uint_field(o, "n", path)? as usize;
            FiniteGroup::family(p, n)?
        }
        "heisenberg" => heisenberg_group(small(uint_field(o, "p", path)?, path)?)?
            .with_label(format!("heisenberg({})", uint_field(o, "p", path)?)),
        "order36" => make_order36_group()?,
        "symplectic_std" => {
            let p = small(uint_field(o, "p", path)?, path)?;
            let n = uint_field(o, "n", path)? as usize;
            return Ok(make_standard_symplectic(p, n, limits)?.0);
        }
        "abelian" => {
            let ip = format!("{path}.invariants");
            let inv = uint_list(field(o, "invariants", path)?, &ip)?;
            let inv: Vec<u32> = inv.iter().map(|&d| small(d, &ip)).collect::<Result<_>>()?;
            abelian_group(&inv)?
        }
        other => return Err(Error::spec(format!("{path}.kind"), format!("unknown group kind {other:?}"))),
    };
    Ok(Arc::new(g))
}

/// Builds a cocycle on `g` from a cocycle-spec document.
pub fn build_cocycle(g: &Arc<FiniteGroup>, doc: &Value, limits: &Limits) -> Result<TwoCocycle> {
    build_cocycle_at(g, doc, "$", limits)
}

fn build_cocycle_at(g: &Arc<FiniteGroup>, doc: &Value, path: &str, limits: &Limits) -> Result<TwoCocycle> {
    let o = obj(doc, path)?;
    let modulus = |default: u64| -> Result<u64> {
        match o.get("modulus") {
            Some(v) => {
                let m = uint(v, &format!("{path}.modulus"))?;
                if m == 0 {
                    return Err(Error::spec(format!("{path}.modulus"), "modulus must be at least 1"));
                }
                Ok(m)
            }
            None => Ok(default),
        }
    };
    match kind(o, path)? {
        "trivial" => Ok(TwoCocycle::zero(g.clone(), modulus(1)?)),
        "table" => {
            let m = modulus(0).and_then(|m| {
                if m == 0 {
                    Err(Error::spec(format!("{path}.modulus"), "missing field"))
                } else {
                    Ok(m)
                }
            })?;
            let vp = format!("{path}.values");
            let values = int_list(field(o, "values", path)?, &vp)?;
            let n = g.order();
            if values.len() as u64 != n * n {
                return Err(Error::spec(&vp, format!("expected {} values, found {}", n * n, values.len())));
            }
            TwoCocycle::from_table(g.clone(), m, &values)
        }
        "family_cr" => {
            if g.as_family().is_none() {
                return Err(Error::spec(format!("{path}.kind"), "family_cr needs a family_gn group"));
            }
            TwoCocycle::family(g.clone(), uint_field(o, "r", path)?)
        }
        "coboundary" => {
            let fp = format!("{path}.f");
            let f = int_list(field(o, "f", path)?, &fp)?;
            let m = modulus(g.exponent(limits)?)?;
            TwoCocycle::coboundary(g.clone(), m, &f)
        }
        "inflate" => {
            let qp = format!("{path}.quotient_by");
            let gens: Vec<Elem> = uint_list(field(o, "quotient_by", path)?, &qp)?
                .into_iter()
                .map(|x| {
                    if x >= g.order() {
                        Err(Error::spec(&qp, format!("element {x} out of range")))
                    } else {
                        Ok(x as Elem)
                    }
                })
                .collect::<Result<_>>()?;
            let n = normal_closure(g, &gens, limits)?;
            let q = quotient_group(g, &n, limits)?;
            let qg = Arc::new(q.group.clone());
            let inner = build_cocycle_at(&qg, field(o, "inner", path)?, &format!("{path}.inner"), limits)?;
            let embedding: Vec<Elem> = g.elements().collect();
            TwoCocycle::inflate(g.clone(), &embedding, &q, inner)
        }
        "eg_from_pi" => {
            let pi = build_one_cocycle_at(field(o, "pi", path)?, &format!("{path}.pi"), limits)?;
            let (sd, c) = cocycle_from_one_cocycle(&pi, limits)?;
            if sd.group.order() != g.order() || !g.elements().all(|x| g.elements().all(|y| g.mul(x, y) == sd.group.mul(x, y))) {
                return Err(Error::spec(
                    format!("{path}.pi"),
                    "the group is not A ⋊ Q in the (a·|Q| + q) indexing",
                ));
            }
            TwoCocycle::pullback(g.clone(), g.elements().collect(), c)
        }
        "fixture" => {
            if g.label() != "order36" {
                return Err(Error::spec(format!("{path}.kind"), "the pinned fixture belongs to the order36 group"));
            }
            let (g36, c) = make_order36(limits)?;
            TwoCocycle::pullback(g.clone(), g36.elements().collect(), c)
        }
        "standard" => {
            let (p, n) = parse_symplectic_label(g.label())
                .ok_or_else(|| Error::spec(format!("{path}.kind"), "standard needs a symplectic_std group"))?;
            let (g2, c) = make_standard_symplectic(p, n, limits)?;
            TwoCocycle::pullback(g.clone(), g2.elements().collect(), c)
        }
        other => Err(Error::spec(format!("{path}.kind"), format!("unknown cocycle kind {other:?}"))),
    }
}

fn parse_symplectic_label(label: &str) -> Option<(u32, usize)> {
    let inner = label.strip_prefix("symplectic_std(")?.strip_suffix(')')?;
    let (p, n) = inner.split_once(',')?;
    Some((p.trim().parse().ok()?, n.trim().parse().ok()?))
}

/// Builds a 1-cocycle from `{"Q": …, "A": {...}, "pi": [...], "modulus": M}`.
pub fn build_one_cocycle(doc: &Value, limits: &Limits) -> Result<OneCocycle> {
    build_one_cocycle_at(doc, "$", limits)
}

fn build_one_cocycle_at(doc: &Value, path: &str, limits: &Limits) -> Result<OneCocycle> {
    let o = obj(doc, path)?;
    let q = build_group_at(field(o, "Q", path)?, &format!("{path}.Q"), limits)?;
    let ap = format!("{path}.A");
    let a = obj(field(o, "A", path)?, &ap)?;
    let ip = format!("{ap}.invariants");
    let invariants: Vec<u32> = uint_list(field(a, "invariants", &ap)?, &ip)?
        .into_iter()
        .map(|d| small(d, &ip))
        .collect::<Result<_>>()?;
    let module = match a.get("action").map(|v| array(v, &format!("{ap}.action"))).transpose()? {
        None => AbelianModule::trivial_action(invariants, q.order() as usize),
        Some(mats) if mats.is_empty() => AbelianModule::trivial_action(invariants, q.order() as usize),
        Some(mats) => {
            let action = mats
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    let mp = format!("{ap}.action[{k}]");
                    array(m, &mp)?
                        .iter()
                        .enumerate()
                        .map(|(i, row)| {
                            uint_list(row, &format!("{mp}[{i}]"))?
                                .into_iter()
                                .map(|x| small(x, &mp))
                                .collect::<Result<Vec<u32>>>()
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            AbelianModule { invariants, action }
        }
    };
    let pp = format!("{path}.pi");
    let values: Vec<Vec<u32>> = array(field(o, "pi", path)?, &pp)?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            uint_list(v, &format!("{pp}[{i}]"))?
                .into_iter()
                .map(|x| small(x, &pp))
                .collect()
        })
        .collect::<Result<_>>()?;
    let modulus = o.get("modulus").map(|v| uint(v, &format!("{path}.modulus"))).transpose()?;
    OneCocycle::new(q, module, values, modulus)
}

/// Turns `kind:a,b` shorthand into a group-spec document; anything that
/// is not shorthand is returned as `None`.
pub fn group_shorthand(s: &str) -> Option<Value> {
    let (k, args) = s.split_once(':').unwrap_or((s, ""));
    let nums: Vec<u64> = if args.is_empty() {
        Vec::new()
    } else {
        args.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()?
    };
    Some(match (k, nums.as_slice()) {
        ("family_gn", [p, n]) => json!({"kind": "family_gn", "p": p, "n": n}),
        ("heisenberg", [p]) => json!({"kind": "heisenberg", "p": p}),
        ("order36", []) => json!({"kind": "order36"}),
        ("symplectic_std", [p, n]) => json!({"kind": "symplectic_std", "p": p, "n": n}),
        ("abelian", inv) if !inv.is_empty() => json!({"kind": "abelian", "invariants": inv}),
        _ => return None,
    })
}

/// Cocycle shorthand: `trivial[:m]`, `family_cr:r`, `fixture`, `standard`.
pub fn cocycle_shorthand(s: &str) -> Option<Value> {
    let (k, args) = s.split_once(':').unwrap_or((s, ""));
    let nums: Vec<u64> = if args.is_empty() {
        Vec::new()
    } else {
        args.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()?
    };
    Some(match (k, nums.as_slice()) {
        ("trivial", []) => json!({"kind": "trivial"}),
        ("trivial", [m]) => json!({"kind": "trivial", "modulus": m}),
        ("family_cr", [r]) => json!({"kind": "family_cr", "r": r}),
        ("fixture", []) => json!({"kind": "fixture"}),
        ("standard", []) => json!({"kind": "standard"}),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{is_nondegenerate, ScanMode};

    #[test]
    fn trivial_cayley() {
        let g = build_group(&json!({"kind": "cayley", "order": 1, "table": [[0]]}), &Limits::default()).unwrap();
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn malformed_table_cites_path() {
        let err = build_group(&json!({"kind": "cayley", "order": 2, "table": [[0, 1], [1]]}), &Limits::default())
            .unwrap_err();
        match err {
            Error::Spec { path, .. } => assert_eq!(path, "$.table[1]"),
            e => panic!("unexpected {e}"),
        }
        let err = build_group(&json!({"kind": "cayley", "order": 2, "table": [[0, 1], [1, 1]]}), &Limits::default())
            .unwrap_err();
        assert!(matches!(err, Error::MalformedTable(_)));
    }

    #[test]
    fn family_parameters() {
        let limits = Limits::default();
        assert_eq!(build_group(&json!({"kind": "family_gn", "p": 3, "n": 3}), &limits).unwrap().order(), 6561);
        assert!(build_group(&json!({"kind": "family_gn", "p": 3, "n": 2}), &limits).is_err());
        assert!(build_group(&json!({"kind": "family_gn", "p": 4, "n": 3}), &limits).is_err());
    }

    #[test]
    fn shorthand_round_trip() {
        let limits = Limits::default();
        let g = build_group(&group_shorthand("symplectic_std:3,1").unwrap(), &limits).unwrap();
        let c = build_cocycle(&g, &cocycle_shorthand("standard").unwrap(), &limits).unwrap();
        assert!(is_nondegenerate(&c, &limits, ScanMode::Exhaustive).unwrap().nondegenerate);
        let g = build_group(&group_shorthand("order36").unwrap(), &limits).unwrap();
        let c = build_cocycle(&g, &cocycle_shorthand("fixture").unwrap(), &limits).unwrap();
        assert!(is_nondegenerate(&c, &limits, ScanMode::Exhaustive).unwrap().nondegenerate);
        assert!(group_shorthand("nonsense:1").is_none());
    }

    #[test]
    fn inflate_and_eg_from_pi() {
        let limits = Limits::default();
        let g = build_group(&json!({"kind": "abelian", "invariants": [3, 3, 3]}), &limits).unwrap();
        let doc = json!({"kind": "inflate", "quotient_by": [1], "inner": {"kind": "trivial", "modulus": 3}});
        build_cocycle(&g, &doc, &limits).unwrap();
        // Q = Z3, A = Z3 trivially, π = identity: A ⋊ Q = Z3 × Z3 indexed a·3 + q.
        let pi = json!({"Q": {"kind": "abelian", "invariants": [3]}, "A": {"invariants": [3]}, "pi": [[0], [1], [2]]});
        let g = build_group(&json!({"kind": "abelian", "invariants": [3, 3]}), &limits).unwrap();
        let c = build_cocycle(&g, &json!({"kind": "eg_from_pi", "pi": pi}), &limits).unwrap();
        assert!(is_nondegenerate(&c, &limits, ScanMode::Exhaustive).unwrap().nondegenerate);
        let bad = json!({"Q": {"kind": "abelian", "invariants": [3]}, "A": {"invariants": [3]}, "pi": [[0], [1], [1]]});
        assert!(matches!(build_one_cocycle(&bad, &limits).unwrap_err(), Error::OneCocycleLaw(..)));
    }

    #[test]
    fn table_modulus_required() {
        let limits = Limits::default();
        let g = build_group(&json!({"kind": "abelian", "invariants": [2]}), &limits).unwrap();
        let err = build_cocycle(&g, &json!({"kind": "table", "values": [0, 0, 0, 0]}), &limits).unwrap_err();
        assert!(matches!(err, Error::Spec { .. }));
        let err = build_cocycle(&g, &json!({"kind": "table", "modulus": 2, "values": [0, 0, 0]}), &limits).unwrap_err();
        match err {
            Error::Spec { path, .. } => assert_eq!(path, "$.values"),
            e => panic!("unexpected {e}"),
        }
    }
}
