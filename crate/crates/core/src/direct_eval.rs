//! Riemann sums for the classical integrands, evaluated the way they are
//! summed by hand: geometric series, Faulhaber sums, powers of `cos + i sin`,
//! and telescoping quotients of trigonometric differences.
//!
//! Each telescoping evaluator comes with its plain left Riemann sum so that
//! the two can be compared as `n` grows.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Sub};

use serde::Serialize;

use crate::elementary::pow_construct;
use crate::error::{Error, Result};
use crate::roots::root_minus_one;
use crate::sum::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ONE: Complex = Complex { re: 1.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    /// `cos θ + i sin θ`.
    pub fn cis(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.re * k, self.im * k)
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, w: Complex) -> Complex {
        Complex::new(self.re + w.re, self.im + w.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, w: Complex) -> Complex {
        Complex::new(self.re - w.re, self.im - w.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, w: Complex) -> Complex {
        Complex::new(
            self.re * w.re - self.im * w.im,
            self.re * w.im + self.im * w.re,
        )
    }
}

/// Lower and upper bounds enclosing a limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichPair {
    pub lower: f64,
    pub upper: f64,
}

impl SandwichPair {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Lower and upper Riemann sums of `1/t` over the `n`-cell geometric
/// partition of `[1, x]`: `n (x^(1/n) - 1) / x^(1/n)` and `n (x^(1/n) - 1)`.
///
/// Only `x > 1` is accepted; for `x < 1` use `log x = -log(1/x)`.
pub fn log_limit_bounds(x: f64, n: u64) -> Result<SandwichPair> {
    if !(x > 1.0) || x.is_infinite() {
        return Err(Error::invalid(format!(
            "log_limit_bounds needs finite x > 1, got {x}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let s = root_minus_one(x, n);
    let upper = n as f64 * s;
    Ok(SandwichPair {
        lower: upper / (1.0 + s),
        upper,
    })
}

/// Both evaluations of the left Riemann sum of `b^t` on `[p, q]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricSumForms {
    /// `Δ Σ b^(p + kΔ)` summed term by term.
    pub direct: f64,
    /// `b^p Δ (w^n - 1) / (w - 1)` with `w = b^Δ`; `None` when `w` is too
    /// close to 1 for the quotient to be trusted.
    pub closed: Option<f64>,
}

/// Left Riemann sum of `b^t` over `n` equal cells of `[p, q]`, summed
/// directly. See [`exp_geometric_sum_forms`] for the closed form.
pub fn exp_geometric_sum(b: f64, p: f64, q: f64, n: u64) -> Result<f64> {
    exp_geometric_sum_forms(b, p, q, n).map(|f| f.direct)
}

pub fn exp_geometric_sum_forms(b: f64, p: f64, q: f64, n: u64) -> Result<GeometricSumForms> {
    if !(b > 0.0) || b.is_infinite() {
        return Err(Error::domain(format!(
            "base must be finite and positive, got {b}"
        )));
    }
    if b == 1.0 {
        return Err(Error::invalid(
            "base 1 gives a constant integrand; integrate it directly",
        ));
    }
    if !(p < q) || !p.is_finite() || !q.is_finite() {
        return Err(Error::invalid(format!("need finite p < q, got [{p}, {q}]")));
    }
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let delta = (q - p) / n as f64;
    let w = pow_construct(b, delta, 1e-15)?;
    let start = pow_construct(b, p, 1e-15)?;

    let mut acc = CompensatedSum::new();
    let mut term = start;
    for _ in 0..n {
        acc += term;
        term *= w;
    }
    let direct = delta * acc.value();

    let closed =
        ((w - 1.0).abs() > 2f64.powi(-26)).then(|| start * delta * (powu(w, n) - 1.0) / (w - 1.0));
    Ok(GeometricSumForms { direct, closed })
}

fn powu(mut base: f64, mut e: u64) -> f64 {
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// `Σ_{k=0}^{N-1} k^n` as an exact integer.
pub fn power_sum(n_exp: u32, count: u64) -> Result<u128> {
    let overflow = || {
        Error::eval(
            count as f64,
            format!("sum of k^{n_exp} for k < {count} overflows"),
        )
    };
    let mut total: u128 = 0;
    for k in 1..count {
        let term = (k as u128).checked_pow(n_exp).ok_or_else(overflow)?;
        total = total.checked_add(term).ok_or_else(overflow)?;
    }
    if n_exp == 0 && count > 0 {
        // 0^0 = 1 for the k = 0 term
        total += 1;
    }
    Ok(total)
}

/// Left Riemann sum of `t^n` over `N` equal cells of `[0, x]`, computed as
/// `x^(n+1) · power_sum(n, N) / N^(n+1)` with the integer parts exact.
pub fn faulhaber_left_sum(n_exp: u32, x: f64, count: u64) -> Result<f64> {
    if n_exp > 20 {
        return Err(Error::invalid(format!("exponent {n_exp} exceeds 20")));
    }
    if count == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    if !x.is_finite() {
        return Err(Error::invalid(format!("x must be finite, got {x}")));
    }
    let sum = power_sum(n_exp, count)?;
    let denom = (count as u128)
        .checked_pow(n_exp + 1)
        .ok_or_else(|| Error::eval(x, format!("{count}^{} overflows", n_exp + 1)))?;
    let ratio = if sum == denom {
        1.0
    } else {
        sum as f64 / denom as f64
    };
    Ok(x.powi(n_exp as i32 + 1) * ratio)
}

/// `(cos θ + i sin θ)^n` by repeated multiplication.
pub fn demoivre_pow(theta: f64, n: u64) -> Complex {
    let z = Complex::cis(theta);
    let mut acc = Complex::ONE;
    for _ in 0..n {
        acc = acc * z;
    }
    acc
}

/// `(x/n) Σ_{k<n} z^k` with `z = cos(x/n) + i sin(x/n)`: the left Riemann
/// sums of `cos` (real part) and `sin` (imaginary part) on `[0, x]`.
pub fn demoivre_riemann_sum(x: f64, n: u64) -> Result<Complex> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if !x.is_finite() {
        return Err(Error::invalid(format!("x must be finite, got {x}")));
    }
    if x == 0.0 {
        return Ok(Complex::default());
    }
    let h = x / n as f64;
    let z = Complex::cis(h);
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    let mut w = Complex::ONE;
    for _ in 0..n {
        re += w.re;
        im += w.im;
        w = w * z;
    }
    Ok(Complex::new(re.value(), im.value()).scale(h))
}

/// `t_k = x0 + (x1 - x0) k / n`, with `t_n = x1` exactly.
fn grid_point(x0: f64, x1: f64, k: u64, n: u64) -> f64 {
    if k == n {
        x1
    } else {
        x0 + (x1 - x0) * (k as f64 / n as f64)
    }
}

fn check_half_period(x: f64) -> Result<()> {
    if x.is_finite() && x.abs() < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::domain(format!("need |x| < pi/2, got {x}")))
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::invalid("n must be positive"))
    } else {
        Ok(())
    }
}

/// Telescoping sum for `∫_0^x sec^2`:
/// `Σ sin(t_{k+1} - t_k) / (cos t_{k+1} cos t_k)`, each term being
/// `tan t_{k+1} - tan t_k`.
pub fn telescope_sec2(x: f64, n: u64) -> Result<f64> {
    check_half_period(x)?;
    check_n(n)?;
    let mut acc = CompensatedSum::new();
    let mut prev = 0.0f64;
    for k in 1..=n {
        let t = grid_point(0.0, x, k, n);
        acc += (t - prev).sin() / (t.cos() * prev.cos());
        prev = t;
    }
    Ok(acc.value())
}

/// `(x/n) Σ_{k<n} sec^2(t_k)`.
pub fn sec2_left_sum(x: f64, n: u64) -> Result<f64> {
    check_half_period(x)?;
    check_n(n)?;
    Ok(left_sum(0.0, x, n, |t| {
        let c = t.cos();
        1.0 / (c * c)
    }))
}

fn check_csc_interval(a: f64, b: f64) -> Result<()> {
    if a > 0.0 && a < b && b < PI {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "need 0 < a < b < pi, got [{a}, {b}]"
        )))
    }
}

/// Telescoping sum for `∫_a^b csc^2`: terms
/// `sin(t_{k+1} - t_k) / (sin t_k sin t_{k+1}) = cot t_k - cot t_{k+1}`.
pub fn telescope_csc2(a: f64, b: f64, n: u64) -> Result<f64> {
    check_csc_interval(a, b)?;
    check_n(n)?;
    let mut acc = CompensatedSum::new();
    let mut prev = a;
    for k in 1..=n {
        let t = grid_point(a, b, k, n);
        acc += (t - prev).sin() / (prev.sin() * t.sin());
        prev = t;
    }
    Ok(acc.value())
}

/// `((b - a)/n) Σ_{k<n} csc^2(t_k)`.
pub fn csc2_left_sum(a: f64, b: f64, n: u64) -> Result<f64> {
    check_csc_interval(a, b)?;
    check_n(n)?;
    Ok(left_sum(a, b, n, |t| {
        let s = t.sin();
        1.0 / (s * s)
    }))
}

/// Telescoping sum for `∫_0^x sec t tan t`: terms
/// `sec t_{k+1} - sec t_k = (cos t_k - cos t_{k+1}) / (cos t_k cos t_{k+1})`
/// with the numerator written `2 sin((t_k + t_{k+1})/2) sin((t_{k+1} - t_k)/2)`.
pub fn sectan_telescope(x: f64, n: u64) -> Result<f64> {
    check_half_period(x)?;
    check_n(n)?;
    let mut acc = CompensatedSum::new();
    let mut prev = 0.0f64;
    for k in 1..=n {
        let t = grid_point(0.0, x, k, n);
        let num = 2.0 * (0.5 * (t + prev)).sin() * (0.5 * (t - prev)).sin();
        acc += num / (prev.cos() * t.cos());
        prev = t;
    }
    Ok(acc.value())
}

/// `(x/n) Σ_{k<n} sec(t_k) tan(t_k)`.
pub fn sectan_left_sum(x: f64, n: u64) -> Result<f64> {
    check_half_period(x)?;
    check_n(n)?;
    Ok(left_sum(0.0, x, n, |t| {
        let c = t.cos();
        t.sin() / (c * c)
    }))
}

fn left_sum(a: f64, b: f64, n: u64, f: impl Fn(f64) -> f64) -> f64 {
    let acc: CompensatedSum = (0..n).map(|k| f(grid_point(a, b, k, n))).collect();
    acc.value() * ((b - a) / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_4, FRAC_PI_6, LN_2};

    fn sec(x: f64) -> f64 {
        1.0 / x.cos()
    }

    #[test]
    fn log_bounds_enclose_ln2() {
        let p = log_limit_bounds(2.0, 1 << 20).unwrap();
        assert!(p.lower <= LN_2 && LN_2 <= p.upper);
        assert!((p.upper - LN_2).abs() < 1e-5 && (p.lower - LN_2).abs() < 1e-5);
    }

    #[test]
    fn log_bounds_gap_within_bernoulli_bound() {
        for x in [1.5, 2.0, 3.0, 10.0] {
            for j in 0..=20 {
                let n = 1u64 << j;
                let p = log_limit_bounds(x, n).unwrap();
                assert!(p.gap() >= 0.0);
                assert!(
                    p.gap() <= (x - 1.0) * (x - 1.0) / n as f64 * (1.0 + 1e-12),
                    "x={x} n={n}"
                );
            }
        }
        let tiny = log_limit_bounds(1.0 + 2f64.powi(-30), 1).unwrap();
        assert!(tiny.gap() <= 2f64.powi(-60) * 1.0001);
    }

    #[test]
    fn log_bounds_reject_x_at_most_one() {
        assert!(matches!(
            log_limit_bounds(1.0, 4),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            log_limit_bounds(0.5, 4),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn geometric_sum_examples() {
        assert_eq!(exp_geometric_sum(E, 0.0, 1.0, 1).unwrap(), 1.0);
        let s = exp_geometric_sum(E, 0.0, 1.0, 1 << 18).unwrap();
        assert!((s - (E - 1.0)).abs() < 1e-5, "{s}");
        let s = exp_geometric_sum(2.0, 0.0, 1.0, 1 << 18).unwrap();
        assert!((s - 1.0 / LN_2).abs() < 1e-5, "{s}");
        assert!(matches!(
            exp_geometric_sum(1.0, 0.0, 1.0, 4),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn geometric_closed_form_agrees_with_direct_sum() {
        for (b, p, q) in [
            (E, 0.0, 1.0),
            (2.0, -1.0, 3.0),
            (0.5, 0.0, 2.0),
            (10.0, 0.0, 0.5),
        ] {
            for n in [3u64, 64, 1000, 1 << 12] {
                let f = exp_geometric_sum_forms(b, p, q, n).unwrap();
                let closed = f.closed.expect("quotient usable");
                let scale = f.direct.abs().max(1.0);
                let tol = n as f64 * 8.0 * f64::EPSILON * scale;
                assert!((f.direct - closed).abs() <= tol, "b={b} n={n}");
            }
        }
        assert!(exp_geometric_sum_forms(1.0 + 1e-9, 0.0, 1.0, 16)
            .unwrap()
            .closed
            .is_none());
    }

    #[test]
    fn power_sums() {
        assert_eq!(power_sum(2, 10).unwrap(), 285);
        assert_eq!(power_sum(0, 7).unwrap(), 7);
        assert_eq!(power_sum(1, 101).unwrap(), 5050);
        assert!(matches!(
            power_sum(20, 1_000_000),
            Err(Error::Evaluation { .. })
        ));
    }

    #[test]
    fn faulhaber_sums() {
        assert_eq!(faulhaber_left_sum(0, 1.7, 13).unwrap(), 1.7);
        for n_exp in [1u32, 2, 3, 5] {
            for x in [1.0f64, 2.0] {
                let exact = x.powi(n_exp as i32 + 1) / f64::from(n_exp + 1);
                let scaled: Vec<f64> = [100u64, 1000, 10_000, 100_000]
                    .iter()
                    .map(|&n| (faulhaber_left_sum(n_exp, x, n).unwrap() - exact).abs() * n as f64)
                    .collect();
                let (lo, hi) = scaled
                    .iter()
                    .fold((f64::MAX, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
                assert!(
                    hi <= 1.1 * lo && hi <= x.powi(n_exp as i32 + 1),
                    "n={n_exp} x={x} {scaled:?}"
                );
            }
        }
    }

    #[test]
    fn demoivre_powers() {
        assert_eq!(demoivre_pow(0.3, 0), Complex::ONE);
        let z = demoivre_pow(FRAC_PI_2, 2);
        assert!((z.re + 1.0).abs() < 1e-15 && z.im.abs() < 1e-15);
        let z = demoivre_pow(FRAC_PI_6, 3);
        assert!(z.re.abs() < 1e-15 && (z.im - 1.0).abs() < 1e-15);
        for n in [1u64, 10, 100, 1000] {
            let z = demoivre_pow(0.7, n);
            let t = 0.7 * n as f64;
            assert!((z.re - t.cos()).abs() < 1e-10 && (z.im - t.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn demoivre_sums_reach_sin_and_one_minus_cos() {
        assert_eq!(demoivre_riemann_sum(0.0, 9).unwrap(), Complex::default());
        for x in [FRAC_PI_4, FRAC_PI_2, PI, 2.0] {
            let s = demoivre_riemann_sum(x, 1 << 18).unwrap();
            assert!((s.re - x.sin()).abs() < 1e-4, "x={x}");
            assert!((s.im - (1.0 - x.cos())).abs() < 1e-4, "x={x}");
        }
    }

    #[test]
    fn sec2_telescopes_to_tan() {
        assert_eq!(telescope_sec2(0.0, 5).unwrap(), 0.0);
        assert!((telescope_sec2(FRAC_PI_4, 1).unwrap() - 1.0).abs() < 1e-15);
        for x in [0.3, 0.8, 1.2, -1.0] {
            for n in [1u64, 2, 7, 64, 1 << 10] {
                let scale = sec(x).powi(2);
                let tol = n as f64 * 16.0 * f64::EPSILON * scale;
                assert!(
                    (telescope_sec2(x, n).unwrap() - x.tan()).abs() <= tol.max(1e-15),
                    "x={x} n={n}"
                );
            }
        }
        assert!((sec2_left_sum(1.0, 1 << 16).unwrap() - 1f64.tan()).abs() < 1e-3);
        assert!(matches!(
            telescope_sec2(FRAC_PI_2, 3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn csc2_telescopes_to_cot_difference() {
        assert!((telescope_csc2(FRAC_PI_4, FRAC_PI_2, 9).unwrap() - 1.0).abs() < 1e-14);
        let target = 3f64.sqrt() - 1.0 / 3f64.sqrt();
        let r = csc2_left_sum(FRAC_PI_6, PI / 3.0, 1 << 16).unwrap();
        assert!((r - target).abs() < 1e-3);
        let a = 0.9;
        let w = 2f64.powi(-20);
        let one = telescope_csc2(a, a + w, 1).unwrap();
        assert!((one / (w / (a.sin() * a.sin())) - 1.0).abs() < 1e-5);
        assert!(matches!(telescope_csc2(0.0, 1.0, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn sectan_telescopes_to_sec_minus_one() {
        assert_eq!(sectan_telescope(0.0, 4).unwrap(), 0.0);
        let target = sec(1.0) - 1.0;
        assert!((sectan_telescope(1.0, 7).unwrap() - target).abs() < 1e-14);
        assert!((sectan_left_sum(1.0, 1 << 16).unwrap() - target).abs() < 1e-3);
    }

    #[test]
    fn riemann_forms_converge_at_first_order() {
        let forms: [(&str, Box<dyn Fn(u64) -> f64>); 3] = [
            (
                "sec2",
                Box::new(|n| sec2_left_sum(1.0, n).unwrap() - telescope_sec2(1.0, n).unwrap()),
            ),
            (
                "csc2",
                Box::new(|n| {
                    csc2_left_sum(0.5, 2.0, n).unwrap() - telescope_csc2(0.5, 2.0, n).unwrap()
                }),
            ),
            (
                "sectan",
                Box::new(|n| sectan_left_sum(1.0, n).unwrap() - sectan_telescope(1.0, n).unwrap()),
            ),
        ];
        for (name, diff) in &forms {
            for j in 8..14 {
                let n = 1u64 << j;
                let ratio = diff(n) / diff(2 * n);
                assert!((1.7..=2.3).contains(&ratio), "{name} n={n} ratio={ratio}");
            }
        }
    }
}
