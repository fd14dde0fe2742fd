//! wasm-bindgen entry points for the static page in `www/`.
//!
//! Every function returns a JSON string. Failures come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use meyer_ap::aprank::{li_ap_in_model_set_with, Settings};
use meyer_ap::cps::io::{load_cps, parse_window};
use meyer_ap::cps::{enumerate_model_set_with_budget, LatticePoint, Region};
use meyer_ap::exact::{QuadScalar, Rational};
use meyer_ap::progression::ap_points;
use meyer_ap::vdw::{find_mono_grid, grid_points, CubeColoring};

// keeps a single click from freezing the tab
const BUDGET: u64 = 200_000;

fn finish(r: meyer_ap::Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn approx(v: &[QuadScalar]) -> Vec<f64> {
    v.iter().map(QuadScalar::to_f64).collect()
}

fn point_json(p: &LatticePoint) -> Value {
    json!({ "coords": p.coords, "physical": approx(&p.physical), "internal": approx(&p.internal) })
}

/// Points of `Λ(window)` with `|x| <= radius`.
#[wasm_bindgen]
pub fn model_set(scheme: &str, window: &str, radius: u32) -> String {
    finish((|| {
        let cps = load_cps(scheme)?;
        let w = parse_window(window)?;
        let region = Region::centered(cps.phys_dim(), radius.into());
        let pts = enumerate_model_set_with_budget(&cps, &w, &region, BUDGET)?;
        Ok(json!({
            "phys_dim": cps.phys_dim(),
            "int_dim": cps.int_dim(),
            "points": pts.iter().map(point_json).collect::<Vec<_>>(),
        }))
    })())
}

/// A full-rank progression of the given length near `center`, a
/// comma-separated list of exact literals.
#[wasm_bindgen]
pub fn li_progression(scheme: &str, window: &str, length: u32, center: &str) -> String {
    finish((|| {
        let cps = load_cps(scheme)?;
        let w = parse_window(window)?;
        let y = center.split(',').map(|s| s.trim().parse()).collect::<meyer_ap::Result<Vec<QuadScalar>>>()?;
        let settings = Settings { budget: BUDGET, ..Settings::default() };
        let c = li_ap_in_model_set_with(&cps, &w, length.into(), &y, &settings)?;
        let pts: Vec<Value> = ap_points(&c.ap, BUDGET)?
            .iter()
            .map(|z| {
                let phys = cps.physical_of_rational(z);
                let int = cps.internal_of_rational(z);
                json!({
                    "coords": z.iter().map(Rational::to_string).collect::<Vec<_>>(),
                    "physical": approx(&phys),
                    "internal": approx(&int),
                })
            })
            .collect();
        Ok(json!({
            "rank": c.ap.dimension(),
            "base": c.ap.base.iter().map(Rational::to_string).collect::<Vec<_>>(),
            "ratios": c.ap.ratios.iter().map(|r| r.iter().map(Rational::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "radius": c.radius.to_string(),
            "points": pts,
        }))
    })())
}

/// Monochromatic grid of the given depth in a colouring of `{0..N}^d`,
/// written as `"N d r"` followed by the colours.
#[wasm_bindgen]
pub fn mono_grid(coloring: &str, depth: u32) -> String {
    finish((|| {
        let c: CubeColoring = coloring.parse()?;
        Ok(match find_mono_grid(&c, depth.into()) {
            Some(g) => json!({
                "found": true,
                "offsets": g.offsets,
                "steps": g.steps,
                "color": c.color(&g.offsets),
                "points": grid_points(&g),
            }),
            None => json!({ "found": false }),
        })
    })())
}
