//! JSON report documents and their canonical text form.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::blaschke::{ThinnessProfile, ZeroSequence};
use crate::error::Error;
use crate::mobius::DiskPoint;
use crate::monodromy::{ComponentReport, ConditionReport, GluingGraph};
use crate::roots::CriticalData;
use crate::thinprod::{ConstructionState, Extraction, GateResult};

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn opt(x: Option<f64>) -> Value {
    x.filter(|v| v.is_finite()).map_or(Value::Null, Value::from)
}

/// Indented JSON with sorted keys and every float written as `{:.16e}`.
pub fn canonical(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("f64");
                if x.is_finite() {
                    let _ = write!(out, "{x:.16e}");
                } else {
                    out.push_str("null");
                }
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            let flat = items.iter().all(|x| !x.is_array() && !x.is_object());
            if flat {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push_str(": ");
                write_value(&map[*k], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Distinct document shape for numerical failures.
pub fn failure(command: &str, err: &Error) -> Value {
    json!({
        "failure": {
            "command": command,
            "gate": err.gate(),
            "message": err.to_string(),
        }
    })
}

pub fn critical(data: &CriticalData) -> Value {
    json!({
        "points": data.critical_points.iter().map(|(p, m)| json!({"z": complex(*p), "multiplicity": m})).collect::<Vec<_>>(),
        "values": data.critical_values.iter().map(|&v| complex(v)).collect::<Vec<_>>(),
        "second_derivative_moduli": data.second_derivatives,
        "count": data.count(),
        "warnings": data.warnings,
    })
}

pub fn components(r: &ComponentReport) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("degree".into(), json!(r.fiber.len()));
    m.insert("basepoint".into(), complex(r.basepoint));
    m.insert("w0".into(), complex(r.w0));
    m.insert(
        "fiber".into(),
        Value::Array(r.fiber.points.iter().map(|&z| complex(z)).collect()),
    );
    m.insert(
        "critical_values".into(),
        Value::Array(r.critical_values.iter().map(|&v| complex(v)).collect()),
    );
    m.insert(
        "generators".into(),
        json!(r
            .generators
            .iter()
            .map(|g| g.images().to_vec())
            .collect::<Vec<_>>()),
    );
    m.insert("group_order".into(), group_order(r.group_order));
    m.insert("q".into(), json!(r.q));
    m.insert("orbits".into(), json!(r.orbits));
    m.insert("multiplicities".into(), json!(r.multiplicities));
    m.insert("inverse_pairing".into(), json!(r.inverse_pairing));
    m.insert("precision".into(), json!(r.precision));
    m
}

/// Exact order; written as a string once it exceeds `u64`.
pub fn group_order(order: u128) -> Value {
    u64::try_from(order).map_or_else(|_| json!(order.to_string()), |o| json!(o))
}

pub fn glue_edges(g: &GluingGraph) -> Value {
    Value::Array(
        g.edges
            .iter()
            .map(|&(i, j, v)| json!([i, j, complex(v)]))
            .collect(),
    )
}

pub fn gluing(g: &GluingGraph) -> Value {
    json!({
        "vertices": g.vertices,
        "glue_edges": glue_edges(g),
        "connected": g.connected,
        "w0": complex(g.w0),
    })
}

pub fn conditions(c: &ConditionReport) -> Value {
    json!({
        "pass": c.pass,
        "simple_margin": opt(c.simple_margin),
        "injectivity_margin": opt(c.injectivity_margin),
        "exempt": c.exempt,
    })
}

pub fn point(p: &DiskPoint) -> Value {
    json!({"z": complex(p.approx), "decrement": p.decrement})
}

pub fn sequence(s: &ZeroSequence) -> Value {
    json!({
        "source_tag": s.source_tag,
        "points": s.points.iter().map(point).collect::<Vec<_>>(),
    })
}

pub fn thinness(p: &ThinnessProfile) -> Value {
    json!({
        "rows": p.rows.iter().map(|r| json!({"k": r.k, "delta": r.delta, "cross_check": r.cross_check})).collect::<Vec<_>>(),
        "max_identity_gap": p.max_identity_gap,
        "nondecreasing_from": p.nondecreasing_from,
        "blaschke_sum": p.blaschke_sum,
    })
}

pub fn extraction(e: &Extraction) -> Value {
    json!({
        "sequence": sequence(&e.sequence),
        "certificate": e.certificate.iter().map(|r| json!({
            "k": r.k,
            "pool_index": r.pool_index,
            "product": r.product,
            "bound": r.bound,
        })).collect::<Vec<_>>(),
    })
}

fn gate(g: &GateResult) -> Value {
    json!({"pass": g.pass, "margin": opt(g.margin), "detail": g.detail})
}

pub fn stage(s: &ConstructionState) -> Value {
    json!({
        "m": s.m,
        "degree": s.product.degree(),
        "lambda": complex(s.lambda.approx),
        "lambda_decrement": s.lambda.decrement,
        "pool_index": s.pool_index,
        "r_m": s.r_m,
        "k_tilde": s.k_tilde,
        "k_radius": s.k_radius,
        "delta": s.delta,
        "scanned": s.scanned,
        "gates": {
            "a": gate(&s.audit.a),
            "b": gate(&s.audit.b),
            "c": gate(&s.audit.c),
            "d": gate(&s.audit.d),
            "budget": gate(&s.audit.budget),
        },
        "q": s.q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_floats_and_key_order() {
        let v = json!({"b": 1, "a": [0.5, 2], "c": {"z": null, "y": true}});
        assert_eq!(
            canonical(&v),
            "{\n  \"a\": [5.0000000000000000e-1, 2],\n  \"b\": 1,\n  \"c\": {\n    \"y\": true,\n    \"z\": null\n  }\n}\n"
        );
    }
}
