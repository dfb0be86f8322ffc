//! Three operations for the static demo page. Each returns a JSON string;
//! failures come back as `{"error": "..."}`.

use isosine::bodies::{polar_volume, sine_body_any, volume, VolumeMethod};
use isosine::measures::random_isotropic_measure;
use isosine::numerics::{build_sphere_quadrature, constants};
use isosine::suites::asymptotic_ratios;
use isosine::tomography::{minimal_surface_position, polar_projection_body_volume_3d, projection_body_volume, Polytope};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn finish(r: isosine::Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

/// Volumes of `S_μ` and its polar for a seeded random isotropic measure in
/// `ℝ³`, with the two-sided bounds they must respect.
#[wasm_bindgen]
pub fn sine_body_volumes(blocks: u32, seed: u32, even: bool, resolution: u32) -> String {
    finish((|| {
        let n = 3;
        let mu = random_isotropic_measure(n, blocks.max(1) as usize, seed as u64, even)?;
        let body = sine_body_any(&mu)?;
        let quad = build_sphere_quadrature(n, resolution as usize)?;
        let v = volume(&body, VolumeMethod::ExpIntegral, &quad, 0, 0)?;
        let pv = polar_volume(&body, &quad)?;
        let c = constants(n)?;
        let g3 = c.gamma.powi(3);
        Ok(json!({
            "atoms": mu.len(),
            "even": mu.is_even(),
            "volume": v,
            "polarVolume": pv,
            "volumeBounds": [c.kappa * c.alpha / g3, c.kappa * g3],
            "polarBounds": [c.kappa / g3, c.kappa * g3 / c.alpha],
            "polarTimesAlphaOverVolume": pv.value * c.alpha / v.value,
        }))
    })())
}

/// The two ratios whose limit is 1 as the dimension grows.
#[wasm_bindgen]
pub fn asymptotic_ratio(n: u32) -> String {
    finish((|| {
        let t = asymptotic_ratios(n as usize)?;
        let last = t.rows.last().expect("n >= 3 gives one row");
        Ok(json!({ "n": last.n, "r1": last.r1, "r2": last.r2 }))
    })())
}

/// Put the box with sides `a, b, c` into surface isotropic position and
/// report the projection-body quantities before and after.
#[wasm_bindgen]
pub fn position_box(a: f64, b: f64, c: f64) -> String {
    finish((|| {
        let p = Polytope::boxed(&[a, b, c])?;
        let r = minimal_surface_position(&p, 200, 1e-12)?;
        let q = &r.positioned;
        let d3 = q.surface_area().powi(3);
        Ok(json!({
            "surfaceBefore": p.surface_area(),
            "surfaceAfter": q.surface_area(),
            "iterations": r.iterations,
            "defect": r.defect,
            "projectionOverSurfaceCubed": projection_body_volume(q) / d3,
            "polarProjectionTimesSurfaceCubed": polar_projection_body_volume_3d(q)? * d3,
        }))
    })())
}
