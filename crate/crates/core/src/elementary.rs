//! The logarithm as the integral of `1/t`, and everything built on top of it.
//!
//! `log` is enclosed between the lower and upper Riemann sums of `1/t` over
//! the geometric partition of `[1, m]`, which collapse to
//! `n (m^(1/n) - 1) / m^(1/n) <= log m <= n (m^(1/n) - 1)`. `n` runs over
//! powers of two so the roots come from square roots alone. Everything else
//! here (`exp`, `e`, real powers, hyperbolics, inverse functions) is obtained
//! by inverting or combining that `log`; no platform `ln`/`exp` is called.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;

use crate::dd::{Dd, OP_REL_ERR_U2};
use crate::error::{Error, Result};

/// A value with a certified absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxValue {
    pub value: f64,
    pub bound: f64,
}

impl ApproxValue {
    pub fn exact(value: f64) -> Self {
        Self { value, bound: 0.0 }
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.bound
    }
}

impl fmt::Display for ApproxValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:e}", self.value, self.bound)
    }
}

/// Deepest square-root chain the sandwich will run (n = 2^62).
const MAX_HALVINGS: u32 = 62;

const U: f64 = f64::EPSILON / 2.0;

/// Midpoint of the geometric-partition sandwich for `log m`, `m` in `[1, 2]`,
/// carried in double-double so the square-root chain adds almost no rounding.
///
/// Refines `n = 2^j` until half the gap plus the rounding budget is within
/// `eps`, or until the gap falls below what a double can resolve. The bound
/// covers the double-double value, not its final rounding to `f64`.
fn sandwich(m: f64, eps: f64) -> (Dd, f64) {
    debug_assert!((1.0..=2.0).contains(&m));
    if m == 1.0 {
        return (Dd::new(0.0), 0.0);
    }
    let mut s = Dd::new(m - 1.0); // exact on [1, 2]
    let mut n = 1.0f64;
    let mut j = 0u32;
    loop {
        let upper = s.mul_f64(n);
        let gap = upper.hi * s.hi / (1.0 + s.hi);
        let value = upper.add_f64(-0.5 * gap);
        let rounding = (f64::from(4 * j + 4) * OP_REL_ERR_U2 * U * U + 4.0 * U * s.hi) * upper.hi;
        let bound = (0.5 * gap + rounding) * (1.0 + 8.0 * U);
        let resolved = 0.5 * gap <= 0.125 * U * upper.hi;
        if bound <= eps || resolved || j == MAX_HALVINGS {
            return (value, bound);
        }
        s = s.root_step();
        n *= 2.0;
        j += 1;
    }
}

/// `log 2` in double-double with its bound. Computed once.
fn ln2_dd() -> (Dd, f64) {
    static L2: OnceLock<(Dd, f64)> = OnceLock::new();
    *L2.get_or_init(|| sandwich(2.0, 0.0))
}

/// `log 2`, refined as far as double precision allows. Computed once.
pub fn ln2() -> ApproxValue {
    let (v, b) = ln2_dd();
    let value = v.to_f64();
    ApproxValue {
        value,
        bound: b + U * value,
    }
}

/// `log x` with a certified bound.
///
/// `x` is written as `2^k m` with `m` in `[1, 2)` by exact halving/doubling,
/// and `log x = k log 2 + log m`. If `eps` lies below what double precision
/// can certify, the tightest achievable bound is returned instead.
pub fn log_construct(x: f64, eps: f64) -> Result<ApproxValue> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::domain(format!(
            "log requires a finite x > 0, got {x}"
        )));
    }
    if x == 1.0 {
        return Ok(ApproxValue::exact(0.0));
    }
    let mut m = x;
    let mut k: i32 = 0;
    while m >= 2.0 {
        m *= 0.5;
        k += 1;
    }
    while m < 1.0 {
        m *= 2.0;
        k -= 1;
    }
    let (lm, lm_bound) = sandwich(m, 0.5 * eps);
    if k == 0 {
        let value = lm.to_f64();
        return Ok(ApproxValue {
            value,
            bound: lm_bound + U * value.abs(),
        });
    }
    let (l2, l2_bound) = ln2_dd();
    let kf = f64::from(k);
    let scaled = l2.mul_f64(kf);
    let value = scaled.add(lm).to_f64();
    let bound = kf.abs() * l2_bound
        + lm_bound
        + 2.0 * OP_REL_ERR_U2 * U * U * scaled.hi.abs()
        + U * value.abs();
    Ok(ApproxValue {
        value,
        bound: bound * (1.0 + 4.0 * U),
    })
}

/// Shorthand for callers that only need the value and have already checked
/// the domain.
pub(crate) fn ln(x: f64) -> f64 {
    log_construct(x, 1e-15).map(|v| v.value).unwrap_or(f64::NAN)
}

/// Bisects `log z = y` on `[lo, hi]` (requires `log lo <= y <= log hi`)
/// until the bracket is narrower than `eps * max(1, z)`.
fn bisect_log(y: f64, mut lo: f64, mut hi: f64, eps: f64) -> f64 {
    let log_eps = 0.5 * eps;
    for _ in 0..4096 {
        if hi - lo <= eps * lo.max(1.0) {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let lm = log_construct(mid, log_eps)
            .map(|v| v.value)
            .unwrap_or(f64::NAN);
        if lm < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + 0.5 * (hi - lo)
}

fn log_value(z: f64, eps: f64) -> f64 {
    log_construct(z, eps).map(|v| v.value).unwrap_or(f64::NAN)
}

/// `exp y`: the `z` with `log z = y`.
///
/// Writes `y = k log 2 + r` and solves `log w = r` for `w` in `[1, 2]`, then
/// scales by `2^k`. The starting bracket for `w` comes from inverting the two
/// sandwich bounds: `n (w^(1/n) - 1) = r` and `n (w^(1/n) - 1) / w^(1/n) = r`
/// give `(1 + r/n)^n <= e^r <= (1 - r/n)^(-n)` because `log` is increasing.
/// Newton steps on `log` then refine it to `eps * max(1, z)`.
///
/// Saturates to `+inf` / `0` outside the range of doubles. Non-positive `eps`
/// is treated as the smallest useful width.
pub fn exp_construct(y: f64, eps: f64) -> f64 {
    if y.is_nan() {
        return f64::NAN;
    }
    if y == 0.0 {
        return 1.0;
    }
    let eps = if eps > 0.0 { eps } else { f64::EPSILON };
    let (l2, _) = ln2_dd();
    if y > 1100.0 * l2.hi {
        return f64::INFINITY;
    }
    if y < -1100.0 * l2.hi {
        return 0.0;
    }
    let k = (y / l2.hi).floor();
    let r = Dd::new(y).sub(l2.mul_f64(k)).to_f64();
    let (lo, hi) = exp_bracket(r);
    let w = newton_log(r, lo, hi, eps);
    scale_pow2(w, k as i32)
}

/// Solves `log w = r` from the bracket `[lo, hi]` by Newton steps
/// `w <- w (1 + r - log w)`, each one squaring the relative error, so a
/// single step usually suffices from the certified bracket. Steps that
/// would leave the bracket fall back to bisection.
fn newton_log(r: f64, mut lo: f64, mut hi: f64, eps: f64) -> f64 {
    let mut w = lo + 0.5 * (hi - lo);
    if hi - lo <= eps * w.max(1.0) {
        return w;
    }
    let log_eps = 0.5 * eps;
    for _ in 0..8 {
        let d = r - log_value(w, log_eps);
        if d > 0.0 {
            lo = lo.max(w);
        } else {
            hi = hi.min(w);
        }
        let next = w + w * d;
        // the step leaves a relative error of about d^2 / 2
        if w * d * d <= 0.25 * eps * w.max(1.0) && next >= lo && next <= hi {
            return next;
        }
        w = if next > lo && next < hi {
            next
        } else {
            lo + 0.5 * (hi - lo)
        };
    }
    w
}

/// Certified bracket for `e^r`, `|r| <= 1`, from `n = 2^52`.
fn exp_bracket(r: f64) -> (f64, f64) {
    const HALVINGS: i32 = 52;
    // (1 + s)^(2^j) - 1 by repeated squaring carried on s.
    let raise = |s0: f64| {
        let mut s = s0;
        for _ in 0..HALVINGS {
            s *= 2.0 + s;
        }
        s
    };
    let scale = 2f64.powi(-HALVINGS);
    let lower = 1.0 + raise(r * scale);
    let upper = 1.0 / (1.0 + raise(-r * scale));
    let slack = (2.0 * HALVINGS as f64 + 4.0) * U;
    (lower * (1.0 - slack), upper * (1.0 + slack))
}

/// `w * 2^k`, in steps so intermediate values neither overflow nor flush.
fn scale_pow2(mut w: f64, k: i32) -> f64 {
    let mut k = k;
    while k > 0 {
        let step = k.min(1000);
        w *= pow2(step);
        k -= step;
    }
    while k < 0 {
        let step = (-k).min(1000);
        w *= pow2(-step);
        k += step;
    }
    w
}

/// `2^k` by repeated doubling/halving; saturates.
fn pow2(k: i32) -> f64 {
    let mut v = 1.0f64;
    if k >= 0 {
        for _ in 0..k {
            v *= 2.0;
            if v.is_infinite() {
                break;
            }
        }
    } else {
        for _ in 0..(-k) {
            v *= 0.5;
            if v == 0.0 {
                break;
            }
        }
    }
    v
}

const EULER_EPS: f64 = 1e-16;

/// `e`, the number with `log e = 1`, bisected on `[2, 3]` until the bracket
/// is narrower than `eps`. Requests no finer than working precision reuse
/// the value cached by [`euler`].
pub fn e_const(eps: f64) -> f64 {
    if eps >= EULER_EPS {
        euler()
    } else {
        bisect_e(eps)
    }
}

fn bisect_e(eps: f64) -> f64 {
    let eps = if eps > 0.0 { eps } else { f64::EPSILON };
    let log_eps = 0.5 * eps;
    let (lo, hi) = (2.0, 3.0);
    // log is increasing; the bracket is valid because log 2 < 1 < log 3.
    assert!(
        log_value(lo, log_eps) < 1.0 && log_value(hi, log_eps) > 1.0,
        "log 2 < 1 < log 3 failed"
    );
    bisect_log(1.0, lo, hi, eps)
}

/// `e` to working precision, computed once.
pub fn euler() -> f64 {
    static E: OnceLock<f64> = OnceLock::new();
    *E.get_or_init(|| bisect_e(EULER_EPS))
}

/// `b^x = exp(x log b)`. Half of `eps` goes to the logarithm (scaled by
/// `|x|`), half to the exponential.
pub fn pow_construct(b: f64, x: f64, eps: f64) -> Result<f64> {
    if !(b > 0.0) || b.is_infinite() {
        return Err(Error::domain(format!(
            "b^x requires a finite b > 0, got b = {b}"
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    if x == 0.0 || b == 1.0 {
        return Ok(1.0);
    }
    let lb = log_construct(b, 0.5 * eps / x.abs().max(1.0))?;
    Ok(exp_construct(x * lb.value, 0.5 * eps))
}

/// Precision used for the exponentials behind the hyperbolic functions.
pub const HYPERBOLIC_EPS: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Hyperbolic {
    Sinh,
    Cosh,
    Tanh,
    Sech2,
    Csch2,
    Coth,
}

/// Hyperbolic functions as quotients of `e^|x|` and its reciprocal.
pub fn hyperbolic(kind: Hyperbolic, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("hyperbolic function of NaN"));
    }
    if x == 0.0 && matches!(kind, Hyperbolic::Csch2 | Hyperbolic::Coth) {
        return Err(Error::domain(format!("{kind:?} has a pole at 0")));
    }
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let big = exp_construct(x.abs(), HYPERBOLIC_EPS);
    let small = 1.0 / big;
    let v = match kind {
        Hyperbolic::Sinh => sign * 0.5 * (big - small),
        Hyperbolic::Cosh => 0.5 * (big + small),
        Hyperbolic::Tanh => {
            let q = small * small;
            sign * (1.0 - q) / (1.0 + q)
        }
        Hyperbolic::Coth => {
            let q = small * small;
            sign * (1.0 + q) / (1.0 - q)
        }
        Hyperbolic::Sech2 => {
            let r = 2.0 / (big + small);
            r * r
        }
        Hyperbolic::Csch2 => {
            let r = 2.0 / (big - small);
            r * r
        }
    };
    Ok(v)
}

pub fn sinh(x: f64) -> f64 {
    hyperbolic(Hyperbolic::Sinh, x).unwrap_or(f64::NAN)
}

pub fn cosh(x: f64) -> f64 {
    hyperbolic(Hyperbolic::Cosh, x).unwrap_or(f64::NAN)
}

pub fn tanh(x: f64) -> f64 {
    hyperbolic(Hyperbolic::Tanh, x).unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Inverse {
    Arcsin,
    Arctan,
    Arsinh,
    Arcosh,
    Artanh,
}

impl FromStr for Inverse {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "arcsin" | "asin" => Inverse::Arcsin,
            "arctan" | "atan" => Inverse::Arctan,
            "arsinh" | "asinh" => Inverse::Arsinh,
            "arcosh" | "acosh" => Inverse::Arcosh,
            "artanh" | "atanh" => Inverse::Artanh,
            other => {
                return Err(Error::invalid(format!(
                    "unknown inverse function '{other}'"
                )))
            }
        })
    }
}

/// Bisects an increasing `forward` on `[lo, hi]` for `forward(x) = y`.
fn bisect_increasing(
    forward: impl Fn(f64) -> f64,
    y: f64,
    mut lo: f64,
    mut hi: f64,
    eps: f64,
) -> f64 {
    for _ in 0..4096 {
        if hi - lo <= eps * lo.abs().max(hi.abs()).max(1.0) {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if forward(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + 0.5 * (hi - lo)
}

fn arctan(y: f64, eps: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    bisect_increasing(f64::tan, y, -FRAC_PI_2, FRAC_PI_2, eps)
}

fn arsinh(y: f64, eps: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let target = y.abs();
    let mut hi = 1.0f64;
    while sinh(hi) < target {
        hi *= 2.0;
        if hi > 1024.0 {
            break;
        }
    }
    let x = bisect_increasing(sinh, target, 0.0, hi, eps);
    x.copysign(y)
}

/// Principal-branch inverses.
///
/// `arctan` and `arsinh` bisect their forward maps (`tan` on
/// `(-pi/2, pi/2)`, constructive `sinh` on the reals). The others are
/// reduced to those two through `arcsin y = arctan(y / sqrt(1 - y^2))`,
/// `arcosh y = arsinh(sqrt(y^2 - 1))` and `artanh y = arsinh(y / sqrt(1 - y^2))`,
/// which keeps the bisection away from the flat ends of `sin`, `cosh`, `tanh`.
pub fn inverse_fn(kind: Inverse, y: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    if y.is_nan() {
        return Err(Error::domain(format!("{kind:?} of NaN")));
    }
    match kind {
        Inverse::Arctan => Ok(arctan(y, eps)),
        Inverse::Arcsin => {
            if !(-1.0..=1.0).contains(&y) {
                return Err(Error::domain(format!("arcsin requires |y| <= 1, got {y}")));
            }
            if y.abs() == 1.0 {
                return Ok(FRAC_PI_2.copysign(y));
            }
            let c = ((1.0 - y) * (1.0 + y)).sqrt();
            Ok(arctan(y / c, eps))
        }
        Inverse::Arsinh => {
            if y.is_infinite() {
                return Err(Error::domain("arsinh of an infinite value"));
            }
            Ok(arsinh(y, eps))
        }
        Inverse::Arcosh => {
            if !(y >= 1.0) || y.is_infinite() {
                return Err(Error::domain(format!(
                    "arcosh requires finite y >= 1, got {y}"
                )));
            }
            Ok(arsinh(((y - 1.0) * (y + 1.0)).sqrt(), eps))
        }
        Inverse::Artanh => {
            if !(y > -1.0 && y < 1.0) {
                return Err(Error::domain(format!("artanh requires |y| < 1, got {y}")));
            }
            let c = ((1.0 - y) * (1.0 + y)).sqrt();
            Ok(arsinh(y / c, eps))
        }
    }
}
