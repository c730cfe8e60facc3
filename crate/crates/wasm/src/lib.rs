//! Browser bindings for the demo page in `www/`.
//!
//! Each export returns a JSON string; the `*_json` functions behind them are
//! plain Rust so they can be tested natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use rf_core::direct_eval::log_limit_bounds;
use rf_core::elementary::log_construct;
use rf_core::expr::{parse, Expr};
use rf_core::integrator::{convergence_report, Integrator};
use rf_core::{riemann_sum, uniform_partition, Interval, TagRule};

pub const MAX_RECTANGLES: usize = 2048;
pub const MAX_CONVERGENCE_N: usize = 1 << 20;
pub const MAX_HALVINGS: u32 = 40;
const CURVE_SAMPLES: usize = 400;

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn parse_rule(rule: &str) -> Result<TagRule, String> {
    rule.parse().map_err(|e: rf_core::Error| e.to_string())
}

fn parse_expr(text: &str) -> Result<Expr, String> {
    parse(text).map_err(|e| e.to_string())
}

/// The rectangles of one Riemann sum of `expr` on `[a, b]`, the curve they
/// approximate, and the converged integral for comparison.
pub fn rectangles_json(expr: &str, a: f64, b: f64, n: usize, rule: &str) -> Result<String, String> {
    let f = parse_expr(expr)?;
    let rule = parse_rule(rule)?;
    if n == 0 || n > MAX_RECTANGLES {
        return Err(format!("n must be between 1 and {MAX_RECTANGLES}"));
    }
    let iv = Interval::new(a, b).map_err(|e| e.to_string())?;
    let p = uniform_partition(iv, n, &rule).map_err(|e| e.to_string())?;
    let heights: Vec<Value> = p
        .tags()
        .iter()
        .map(|&t| f.eval(t).map_or(Value::Null, num))
        .collect();
    let sum = riemann_sum(&f, &p).map_err(|e| e.to_string())?;
    let curve: Vec<Value> = (0..=CURVE_SAMPLES)
        .map(|i| {
            let t = a + (b - a) * i as f64 / CURVE_SAMPLES as f64;
            json!([t, f.eval(t).map_or(Value::Null, num)])
        })
        .collect();
    let integral = Integrator::default()
        .max_n(1 << 18)
        .integrate(&f, a, b, 1e-10)
        .map_or(Value::Null, |r| num(r.value));
    Ok(json!({
        "expr": f.to_string(),
        "points": p.points(),
        "tags": p.tags(),
        "heights": heights,
        "sum": num(sum),
        "integral": integral,
        "curve": curve,
    })
    .to_string())
}

/// Riemann sums for `n = 2, 4, ..., n_to` with their errors and observed
/// order. `exact` may be NaN, in which case successive differences are used.
pub fn convergence_json(
    expr: &str,
    a: f64,
    b: f64,
    rule: &str,
    n_to: usize,
    exact: f64,
) -> Result<String, String> {
    let f = parse_expr(expr)?;
    let rule = parse_rule(rule)?;
    if !(2..=MAX_CONVERGENCE_N).contains(&n_to) {
        return Err(format!("n_to must be between 2 and {MAX_CONVERGENCE_N}"));
    }
    let ns: Vec<usize> = std::iter::successors(Some(2usize), |&n| Some(2 * n))
        .take_while(|&n| n <= n_to)
        .collect();
    let exact = exact.is_finite().then_some(exact);
    let report = convergence_report(&f, a, b, &rule, &ns, exact).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| json!({"n": r.n, "value": num(r.value), "diff": r.diff.map_or(Value::Null, num)}))
        .collect();
    Ok(json!({
        "rule": rule.name(),
        "rows": rows,
        "estimated_order": num(report.estimated_order),
    })
    .to_string())
}

/// The lower and upper sums `n (x^(1/n) - 1) / x^(1/n)` and `n (x^(1/n) - 1)`
/// for `n = 2^j`, `j <= j_max`, next to the certified `log x`.
pub fn sandwich_json(x: f64, j_max: u32) -> Result<String, String> {
    if j_max > MAX_HALVINGS {
        return Err(format!("j_max must be at most {MAX_HALVINGS}"));
    }
    let log = log_construct(x, 1e-15).map_err(|e| e.to_string())?;
    let rows = (0..=j_max)
        .map(|j| {
            let n = 1u64 << j;
            let p = log_limit_bounds(x, n).map_err(|e| e.to_string())?;
            Ok(json!({
                "j": j,
                "n": n,
                "lower": num(p.lower),
                "upper": num(p.upper),
                "gap": num(p.gap()),
                "bernoulli": num((x - 1.0) * (x - 1.0) / n as f64),
            }))
        })
        .collect::<Result<Vec<Value>, String>>()?;
    Ok(json!({"x": x, "log": num(log.value), "bound": num(log.bound), "rows": rows}).to_string())
}

#[wasm_bindgen]
pub fn rectangles(expr: &str, a: f64, b: f64, n: usize, rule: &str) -> Result<String, JsValue> {
    rectangles_json(expr, a, b, n, rule).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn convergence(
    expr: &str,
    a: f64,
    b: f64,
    rule: &str,
    n_to: usize,
    exact: f64,
) -> Result<String, JsValue> {
    convergence_json(expr, a, b, rule, n_to, exact).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sandwich(x: f64, j_max: u32) -> Result<String, JsValue> {
    sandwich_json(x, j_max).map_err(|e| JsValue::from_str(&e))
}
