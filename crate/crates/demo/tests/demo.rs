use isosine_demo::{asymptotic_ratio, position_box, sine_body_volumes};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn volumes_respect_bounds() {
    let v = parse(sine_body_volumes(3, 5, true, 16));
    let pv = v["polarVolume"]["value"].as_f64().unwrap();
    let b = &v["polarBounds"];
    assert!(pv > b[0].as_f64().unwrap() && pv < b[1].as_f64().unwrap());
    assert!(v["polarTimesAlphaOverVolume"].as_f64().unwrap() < 1.0);
    let odd = parse(sine_body_volumes(2, 5, false, 16));
    assert_eq!(odd["even"], false);
}

#[test]
fn ratio_and_errors() {
    let r = parse(asymptotic_ratio(200));
    assert!((r["r1"].as_f64().unwrap() - 1.0).abs() < 0.05);
    assert!(parse(asymptotic_ratio(2)).get("error").is_some());
    assert!(parse(position_box(1.0, -1.0, 1.0)).get("error").is_some());
}

#[test]
fn box_becomes_cube() {
    let r = parse(position_box(2.0, 0.5, 1.0));
    assert!((r["surfaceAfter"].as_f64().unwrap() - 6.0).abs() < 1e-9);
    assert!((r["projectionOverSurfaceCubed"].as_f64().unwrap() - 1.0 / 27.0).abs() < 1e-12);
    assert!((r["polarProjectionTimesSurfaceCubed"].as_f64().unwrap() - 288.0).abs() < 1e-8);
}
