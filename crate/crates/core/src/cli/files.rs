//! JSON forms of progressions and Meyer expressions.

use std::path::Path;

use serde_json::{json, Value};

use crate::aprank::{Branch, MeyerExpr, Translate};
use crate::cps::io::{
    cps_from_json, cps_to_json, load_cps, quad_vec_from_json, quad_vec_to_json, rat_vec_from_json, rat_vec_to_json,
    window_from_json, window_to_json,
};
use crate::error::{Error, Result};
use crate::progression::{ArithmeticProgression, CoordinateKind};

/// `{ "base", "ratios", "length", "coordinate_kind" }`
pub fn ap_to_json(ap: &ArithmeticProgression) -> Value {
    json!({
        "base": rat_vec_to_json(&ap.base),
        "ratios": ap.ratios.iter().map(|r| rat_vec_to_json(r)).collect::<Vec<_>>(),
        "length": ap.length,
        "coordinate_kind": ap.kind,
    })
}

pub fn ap_from_json(v: &Value) -> Result<ArithmeticProgression> {
    let bad = |m: &str| Error::Input(format!("progression: {m}"));
    let base = rat_vec_from_json(v.get("base").ok_or_else(|| bad("missing `base`"))?)?;
    let ratios = v
        .get("ratios")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("`ratios` must be an array"))?
        .iter()
        .map(rat_vec_from_json)
        .collect::<Result<Vec<_>>>()?;
    let length = v.get("length").and_then(Value::as_u64).ok_or_else(|| bad("`length` must be a natural number"))?;
    let kind = match v.get("coordinate_kind") {
        None => CoordinateKind::Lattice,
        Some(k) => serde_json::from_value(k.clone()).map_err(|_| bad("unknown `coordinate_kind`"))?,
    };
    ArithmeticProgression::new(base, ratios, length, kind)
}

/// `{ "cps": name | path | object, "branches": [{ "translate", "window" }] }`.
/// Relative scheme paths are resolved against `dir`.
pub fn expr_from_json(v: &Value, dir: Option<&Path>) -> Result<MeyerExpr> {
    let bad = |m: &str| Error::Input(format!("expression: {m}"));
    let cps = match v.get("cps").ok_or_else(|| bad("missing `cps`"))? {
        Value::String(s) => match (load_cps(s), dir) {
            (Err(Error::UnknownBuiltin(_)), Some(dir)) if dir.join(s).exists() => {
                load_cps(dir.join(s).to_str().ok_or_else(|| bad("non-UTF-8 path"))?)?
            }
            (r, _) => r?,
        },
        obj => cps_from_json(obj)?,
    };
    let branches = v
        .get("branches")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("`branches` must be an array"))?
        .iter()
        .map(|b| {
            let translate = match b.get("translate").ok_or_else(|| bad("branch is missing `translate`"))? {
                Value::Object(o) => Translate::Symbolic {
                    tag: o.get("symbolic").and_then(Value::as_str).ok_or_else(|| bad("symbolic translate needs a tag"))?.to_string(),
                    approx: match o.get("approx") {
                        None => Vec::new(),
                        Some(Value::String(s)) => vec![s.clone()],
                        Some(Value::Array(a)) => a.iter().map(|x| x.as_str().unwrap_or_default().to_string()).collect(),
                        Some(_) => return Err(bad("`approx` must be a string or list of strings")),
                    },
                },
                t => Translate::Rational(quad_vec_from_json(t)?),
            };
            let window = window_from_json(b.get("window").ok_or_else(|| bad("branch is missing `window`"))?)?;
            Ok(Branch { translate, window })
        })
        .collect::<Result<Vec<_>>>()?;
    MeyerExpr::new(cps, branches)
}

pub fn expr_to_json(expr: &MeyerExpr) -> Value {
    let branches: Vec<Value> = expr
        .branches()
        .iter()
        .map(|b| {
            let translate = match &b.translate {
                Translate::Rational(t) => quad_vec_to_json(t),
                Translate::Symbolic { tag, approx } => json!({"symbolic": tag, "approx": approx}),
            };
            json!({"translate": translate, "window": window_to_json(&b.window)})
        })
        .collect();
    let cps = match expr.cps().name() {
        Some(n) if crate::cps::builtin(n).is_ok_and(|b| &b == expr.cps()) => Value::String(n.to_string()),
        _ => cps_to_json(expr.cps()),
    };
    json!({"cps": cps, "branches": branches})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aprank::rank_gap_example;
    use crate::cps::builtin;

    #[test]
    fn ap_round_trip() {
        let ap = ArithmeticProgression::from_lattice(&[1, 1], &[vec![3, 5], vec![5, 8]], 4).unwrap();
        let v = ap_to_json(&ap);
        assert_eq!(v["coordinate_kind"], "lattice");
        assert_eq!(ap_from_json(&v).unwrap(), ap);
        assert!(ap_from_json(&json!({"base": ["1/2"], "ratios": [["1"]], "length": 1})).is_err());
    }

    #[test]
    fn expr_round_trip() {
        let e = rank_gap_example(&builtin("fibonacci").unwrap(), 2).unwrap();
        let v = expr_to_json(&e);
        assert_eq!(v["cps"], "fibonacci");
        let back = expr_from_json(&v, None).unwrap();
        assert_eq!(back.branches(), e.branches());
        let inline = json!({"cps": "fibonacci", "branches": [{"translate": ["1/3"], "window": "[0,1/2]"}]});
        assert_eq!(expr_from_json(&inline, None).unwrap().branches().len(), 1);
    }
}
