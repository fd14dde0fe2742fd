//! Text formats: scheme and window JSON, inline windows and regions, and
//! point lists.

use std::path::Path;

use serde_json::{json, Map, Value};

use super::{builtin, CutProjectScheme, DensityStatus, Generator, Interval, LatticePoint, Region, Window};
use crate::error::{Error, Result};
use crate::exact::{parse_quad, parse_rational, QuadScalar, RatVector, Rational};

/// Significant digits of informative decimals.
pub const DECIMAL_DIGITS: usize = 20;

fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))
}

pub(crate) fn parse_json(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| input(format!("{what}: {e}")))
}

/// A quad literal given as a JSON string or integer.
pub fn quad_from_json(v: &Value) -> Result<QuadScalar> {
    match v {
        Value::String(s) => parse_quad(s),
        Value::Number(n) if n.is_i64() => Ok(QuadScalar::from_int(n.as_i64().expect("checked"))),
        other => Err(input(format!("expected a number literal, found {other}"))),
    }
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().expect("checked").into())),
        other => Err(input(format!("expected a rational literal, found {other}"))),
    }
}

pub fn quad_vec_from_json(v: &Value) -> Result<Vec<QuadScalar>> {
    v.as_array().ok_or_else(|| input("expected an array of literals"))?.iter().map(quad_from_json).collect()
}

pub fn rat_vec_from_json(v: &Value) -> Result<RatVector> {
    v.as_array().ok_or_else(|| input("expected an array of literals"))?.iter().map(rational_from_json).collect()
}

pub fn quad_vec_to_json(v: &[QuadScalar]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

pub fn rat_vec_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| input(format!("{what} is missing `{key}`")))
}

fn usize_field(obj: &Map<String, Value>, key: &str, what: &str) -> Result<usize> {
    field(obj, key, what)?.as_u64().map(|n| n as usize).ok_or_else(|| input(format!("{what}: `{key}` must be a natural number")))
}

// ---- schemes ----

/// `{ "d", "m", "D", "generators": [[physical…, internal…]], "density", "name"? }`
pub fn cps_from_json(v: &Value) -> Result<CutProjectScheme> {
    let obj = v.as_object().ok_or_else(|| input("scheme must be a JSON object"))?;
    let d = usize_field(obj, "d", "scheme")?;
    let m = usize_field(obj, "m", "scheme")?;
    let radicand = field(obj, "D", "scheme")?.as_u64().ok_or_else(|| input("scheme: `D` must be a natural number"))?;
    let rows = field(obj, "generators", "scheme")?.as_array().ok_or_else(|| input("scheme: `generators` must be an array"))?;
    let mut generators = Vec::with_capacity(rows.len());
    for (j, row) in rows.iter().enumerate() {
        let entries = quad_vec_from_json(row)?;
        if entries.len() != d + m {
            return Err(input(format!("generator {j} has {} entries, expected {}", entries.len(), d + m)));
        }
        let internal = entries[d..].to_vec();
        generators.push(Generator::new(entries[..d].to_vec(), internal));
    }
    let density = match obj.get("density") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            serde_json::from_value::<DensityStatus>(v.clone())
                .map_err(|_| input(format!("scheme: unknown density status {v}")))?,
        ),
    };
    let cps = CutProjectScheme::new(d, m, radicand, generators, density)?;
    Ok(match obj.get("name").and_then(Value::as_str) {
        Some(n) => cps.with_name(n),
        None => cps,
    })
}

pub fn cps_to_json(cps: &CutProjectScheme) -> Value {
    let generators: Vec<Value> = cps
        .generators()
        .iter()
        .map(|g| quad_vec_to_json(&[g.physical.clone(), g.internal.clone()].concat()))
        .collect();
    let mut obj = json!({
        "d": cps.phys_dim(),
        "m": cps.int_dim(),
        "D": cps.radicand(),
        "generators": generators,
    });
    if let Some(c) = cps.density_claim() {
        obj["density"] = serde_json::to_value(c).expect("plain enum");
    }
    if let Some(n) = cps.name() {
        obj["name"] = Value::String(n.to_string());
    }
    obj
}

/// A built-in name, or a path to a scheme file.
pub fn load_cps(spec: &str) -> Result<CutProjectScheme> {
    match builtin(spec) {
        Err(Error::UnknownBuiltin(_)) if Path::new(spec).exists() => {
            cps_from_json(&parse_json(&read_text(Path::new(spec))?, spec)?)
        }
        other => other,
    }
}

// ---- windows ----

/// Tagged by `kind`: `box` (`axes` of `[lo, hi]` or objects with closedness
/// flags), `ball` (`center`, `radius`) or `union` (`parts` of `shift` and `window`).
/// A string is read with the inline grammar.
pub fn window_from_json(v: &Value) -> Result<Window> {
    if let Value::String(s) = v {
        return parse_window(s);
    }
    let obj = v.as_object().ok_or_else(|| input("window must be a JSON object or inline string"))?;
    let kind = field(obj, "kind", "window")?.as_str().unwrap_or("");
    match kind {
        "box" => {
            let axes = field(obj, "axes", "box window")?.as_array().ok_or_else(|| input("box window: `axes` must be an array"))?;
            let axes = axes
                .iter()
                .map(|a| match a {
                    Value::Array(pair) if pair.len() == 2 => {
                        Ok(Interval::closed(quad_from_json(&pair[0])?, quad_from_json(&pair[1])?))
                    }
                    Value::Object(o) => Ok(Interval {
                        lo: quad_from_json(field(o, "lo", "interval")?)?,
                        hi: quad_from_json(field(o, "hi", "interval")?)?,
                        lo_closed: o.get("lo_closed").and_then(Value::as_bool).unwrap_or(true),
                        hi_closed: o.get("hi_closed").and_then(Value::as_bool).unwrap_or(true),
                    }),
                    other => Err(input(format!("bad box axis {other}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            Window::boxed(axes)
        }
        "ball" => {
            let center = quad_vec_from_json(field(obj, "center", "ball window")?)?;
            let r = rational_from_json(field(obj, "radius", "ball window")?)?;
            Window::ball(center, &r * &r)
        }
        "union" => {
            let parts = field(obj, "parts", "union window")?.as_array().ok_or_else(|| input("union window: `parts` must be an array"))?;
            let parts = parts
                .iter()
                .map(|p| {
                    let o = p.as_object().ok_or_else(|| input("union part must be an object"))?;
                    Ok((quad_vec_from_json(field(o, "shift", "union part")?)?, window_from_json(field(o, "window", "union part")?)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Window::union(parts)
        }
        other => Err(input(format!("unknown window kind {other:?}"))),
    }
}

pub fn window_to_json(w: &Window) -> Value {
    match w {
        Window::Box(axes) => json!({
            "kind": "box",
            "axes": axes.iter().map(|iv| json!({
                "lo": iv.lo.to_string(),
                "hi": iv.hi.to_string(),
                "lo_closed": iv.lo_closed,
                "hi_closed": iv.hi_closed,
            })).collect::<Vec<_>>(),
        }),
        Window::Ball { center, radius_sq } => json!({
            "kind": "ball",
            "center": quad_vec_to_json(center),
            "radius_sq": radius_sq.to_string(),
        }),
        Window::ShiftedUnion(parts) => json!({
            "kind": "union",
            "parts": parts.iter().map(|(s, w)| json!({"shift": quad_vec_to_json(s), "window": window_to_json(w)})).collect::<Vec<_>>(),
        }),
    }
}

/// Inline windows: products of intervals such as `[0,1]`, `(1/4,3/4]` or
/// `[0,1]x[0,1]`; `{0}` or `trivial` is the window of a scheme with `m = 0`.
pub fn parse_window(text: &str) -> Result<Window> {
    let t = text.trim();
    if t == "{0}" || t == "trivial" {
        return Ok(Window::trivial());
    }
    let axes = split_product(t)?
        .into_iter()
        .map(|(open_l, body, open_r)| {
            let (lo, hi) = split_pair(body)?;
            Ok(Interval { lo: parse_quad(lo)?, hi: parse_quad(hi)?, lo_closed: !open_l, hi_closed: !open_r })
        })
        .collect::<Result<Vec<_>>>()?;
    Window::boxed(axes)
}

// `[a,b]x(c,d)` → [(open?, "a,b", open?), …]
fn split_product(t: &str) -> Result<Vec<(bool, &str, bool)>> {
    let mut out = Vec::new();
    let mut rest = t;
    loop {
        let open_l = match rest.chars().next() {
            Some('[') => false,
            Some('(') => true,
            _ => return Err(input(format!("expected `[` or `(` in {t:?}"))),
        };
        let end = closing(rest).ok_or_else(|| input(format!("unclosed interval in {t:?}")))?;
        let open_r = rest.as_bytes()[end] == b')';
        out.push((open_l, &rest[1..end], open_r));
        rest = rest[end + 1..].trim_start();
        if rest.is_empty() {
            return Ok(out);
        }
        rest = rest.strip_prefix('x').ok_or_else(|| input(format!("expected `x` between intervals in {t:?}")))?.trim_start();
    }
}

// index of the `]` or `)` closing the interval opened at byte 0, skipping `sqrt(…)`
fn closing(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices().skip(1) {
        match c {
            '(' => depth += 1,
            ')' if depth > 0 => depth -= 1,
            ']' | ')' => return Some(i),
            _ => {}
        }
    }
    None
}

fn split_pair(body: &str) -> Result<(&str, &str)> {
    let parts: Vec<&str> = body.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok((a.trim(), b.trim())),
        _ => Err(input(format!("interval {body:?} needs exactly two ends"))),
    }
}

/// A window given inline or as a path to a window file.
pub fn load_window(spec: &str) -> Result<Window> {
    let t = spec.trim();
    if t.starts_with(['[', '(', '{']) || t == "trivial" {
        if t.starts_with('{') && t != "{0}" {
            return window_from_json(&parse_json(t, "window")?);
        }
        return parse_window(t);
    }
    window_from_json(&parse_json(&read_text(Path::new(t))?, t)?)
}

// ---- regions ----

/// `|x|<=r`, `|x-c|<=r` (`c` a literal or a tuple `(c1,…)`), or a box
/// `[lo,hi]x…`. `dim` fills in the centre of `|x|<=r`.
pub fn parse_region(text: &str, dim: usize) -> Result<Region> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(rest) = t.strip_prefix("|x") {
        let (centre, radius) = rest.split_once("|<=").ok_or_else(|| input(format!("region {text:?} needs `|<=`")))?;
        let radius = parse_rational(radius)?;
        let center = if centre.is_empty() {
            vec![QuadScalar::zero(); dim]
        } else {
            let c = centre.strip_prefix('-').ok_or_else(|| input(format!("region {text:?}: expected `|x-c|`")))?;
            let c = c.strip_prefix('(').and_then(|c| c.strip_suffix(')')).unwrap_or(c);
            let center = c.split(',').map(parse_quad).collect::<Result<Vec<_>>>()?;
            if center.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: center.len() });
            }
            center
        };
        return Region::ball(center, radius);
    }
    let bounds = split_product(&t)?
        .into_iter()
        .map(|(_, body, _)| {
            let (lo, hi) = split_pair(body)?;
            Ok((parse_quad(lo)?, parse_quad(hi)?))
        })
        .collect::<Result<Vec<_>>>()?;
    if bounds.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: bounds.len() });
    }
    Region::boxed(bounds)
}

// ---- point lists ----

/// One point per line: tab-separated lattice coordinates, then decimal
/// physical coordinates.
pub fn format_points(points: &[LatticePoint]) -> String {
    let mut out = String::new();
    for p in points {
        let cols: Vec<String> = p
            .coords
            .iter()
            .map(ToString::to_string)
            .chain(p.physical.iter().map(|x| x.to_decimal(DECIMAL_DIGITS)))
            .collect();
        out.push_str(&cols.join("\t"));
        out.push('\n');
    }
    out
}

/// Reads the coordinate columns of a point list. Columns with a decimal
/// point are informative and skipped; `#` starts a comment.
pub fn parse_points(text: &str) -> Result<Vec<RatVector>> {
    let mut out: Vec<RatVector> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let coords = line
            .split_whitespace()
            .filter(|tok| !tok.contains('.'))
            .map(parse_rational)
            .collect::<Result<RatVector>>()
            .map_err(|e| input(format!("line {}: {e}", no + 1)))?;
        if let Some(first) = out.first() {
            if first.len() != coords.len() {
                return Err(input(format!("line {}: expected {} coordinates, found {}", no + 1, first.len(), coords.len())));
            }
        }
        out.push(coords);
    }
    Ok(out)
}
