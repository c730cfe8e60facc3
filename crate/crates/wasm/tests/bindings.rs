use serde_json::Value;

use rf_wasm::{convergence_json, rectangles_json, sandwich_json, MAX_RECTANGLES};

fn json(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn rectangles_for_t_squared() {
    let v = json(rectangles_json("t^2", 0.0, 1.0, 4, "left"));
    let points: Vec<f64> = serde_json::from_value(v["points"].clone()).unwrap();
    assert_eq!(points, [0.0, 0.25, 0.5, 0.75, 1.0]);
    let heights: Vec<f64> = serde_json::from_value(v["heights"].clone()).unwrap();
    assert_eq!(heights, [0.0, 0.0625, 0.25, 0.5625]);
    assert_eq!(v["sum"].as_f64().unwrap(), 0.21875);
    assert!((v["integral"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    assert_eq!(v["curve"].as_array().unwrap().len(), 401);
    assert_eq!(v["expr"], "t^2");
}

#[test]
fn rectangles_reject_bad_input() {
    assert!(rectangles_json("sec(", 0.0, 1.0, 4, "left")
        .unwrap_err()
        .contains("offset 4"));
    assert!(rectangles_json("t", 0.0, 1.0, 0, "left").is_err());
    assert!(rectangles_json("t", 0.0, 1.0, MAX_RECTANGLES + 1, "left").is_err());
    assert!(rectangles_json("t", 1.0, 0.0, 4, "left").is_err());
    assert!(rectangles_json("t", 0.0, 1.0, 4, "simpson").is_err());
}

#[test]
fn rectangles_tolerate_poles_in_the_curve() {
    let v = json(rectangles_json("1/t", -1.0, 1.0, 3, "midpoint"));
    assert!(v["curve"][200][1].is_null());
    assert!(v["sum"].is_number());
}

#[test]
fn convergence_orders() {
    let exact = std::f64::consts::E - 1.0;
    let order = |rule: &str| {
        let v = json(convergence_json("exp(t)", 0.0, 1.0, rule, 4096, exact));
        assert_eq!(v["rows"].as_array().unwrap().len(), 12);
        v["estimated_order"].as_f64().unwrap()
    };
    assert!((order("left") - 1.0).abs() < 0.05);
    assert!((order("midpoint") - 2.0).abs() < 0.05);
    let v = json(convergence_json("t", 0.0, 1.0, "left", 64, f64::NAN));
    assert!(v["rows"][0]["diff"].is_null());
    assert!(convergence_json("t", 0.0, 1.0, "left", 1, f64::NAN).is_err());
}

#[test]
fn sandwich_rows_enclose_log() {
    let v = json(sandwich_json(10.0, 20));
    let log = v["log"].as_f64().unwrap();
    assert!((log - 10f64.ln()).abs() < 1e-14);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 21);
    for r in rows {
        let (lo, hi) = (r["lower"].as_f64().unwrap(), r["upper"].as_f64().unwrap());
        assert!(lo <= log + 1e-13 && log <= hi + 1e-13);
        assert!(r["gap"].as_f64().unwrap() <= r["bernoulli"].as_f64().unwrap());
    }
    assert!(sandwich_json(0.5, 4).is_err());
    assert!(sandwich_json(2.0, 99).is_err());
}
