//! Numerical checks of the substitution rules, both directions of the
//! fundamental theorem, the derivative table, and a catalog of closed-form
//! integrals.
//!
//! Every check produces a [`CheckReport`] comparing a left-hand side with a
//! right-hand side; a report passes when the two agree within its tolerance.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::elementary::{
    exp_construct, hyperbolic, inverse_fn, log_construct, pow_construct, Hyperbolic, Inverse,
};
use crate::error::{Error, Result};
use crate::format::csv_num;
use crate::integrator::{Integrator, SingularEnd};
use crate::partitions::Interval;

/// Accuracy requested from constructive functions inside checks.
const FN_EPS: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub tol: f64,
    pub pass: bool,
    pub anchor: String,
    /// Set when the check could not be carried out.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckReport {
    pub fn new(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tol: f64,
        anchor: impl Into<String>,
    ) -> Self {
        Self::with_diff(name, lhs, rhs, (lhs - rhs).abs(), tol, anchor)
    }

    /// A report whose deviation is measured elsewhere (e.g. a maximum over a grid).
    pub fn with_diff(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        abs_diff: f64,
        tol: f64,
        anchor: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            abs_diff,
            tol,
            pass: abs_diff <= tol,
            anchor: anchor.into(),
            error: None,
        }
    }

    pub fn failed(
        name: impl Into<String>,
        tol: f64,
        anchor: impl Into<String>,
        err: &Error,
    ) -> Self {
        Self {
            name: name.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_diff: f64::INFINITY,
            tol,
            pass: false,
            anchor: anchor.into(),
            error: Some(err.to_string()),
        }
    }

    pub fn named(mut self, name: impl Into<String>, anchor: impl Into<String>) -> Self {
        self.name = name.into();
        self.anchor = anchor.into();
        self
    }
}

pub const CSV_HEADER: [&str; 7] = ["name", "lhs", "rhs", "abs_diff", "tol", "pass", "anchor"];

/// `name,lhs,rhs,abs_diff,tol,pass,anchor` with 17 significant digits.
pub fn reports_to_csv(reports: &[CheckReport]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in reports {
        w.write_record([
            r.name.as_str(),
            &csv_num(r.lhs),
            &csv_num(r.rhs),
            &csv_num(r.abs_diff),
            &csv_num(r.tol),
            if r.pass { "true" } else { "false" },
            r.anchor.as_str(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Five Chebyshev-spaced points of `[a, b]`.
fn chebyshev_points(a: f64, b: f64) -> [f64; 5] {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    std::array::from_fn(|i| mid + half * ((2 * i + 1) as f64 * PI / 10.0).cos())
}

/// The integrating checks, run with a chosen [`Integrator`] (tag rule and
/// partition cap). The free functions below use the default one.
#[derive(Debug, Clone, Default)]
pub struct Verifier {
    integrator: Integrator,
}

impl Verifier {
    pub fn new(integrator: Integrator) -> Self {
        Self { integrator }
    }

    fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
        Ok(self.integrator.integrate(&f, a, b, tol)?.value)
    }

    /// Checks `G(x) - G(a) = ∫_a^x g` at five points.
    fn check_antiderivative(
        &self,
        big_g: &impl Fn(f64) -> f64,
        g: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        tol: f64,
    ) -> Result<()> {
        let ga = big_g(a);
        for x in chebyshev_points(a, b) {
            let integral = self.integrate(g, a, x, 0.25 * tol)?;
            let deviation = (big_g(x) - ga - integral).abs();
            if !(deviation <= tol) {
                return Err(Error::HypothesisViolation { x, deviation, tol });
            }
        }
        Ok(())
    }

    /// `∫_a^b f(G(t)) g(t) dt` against `∫_{G(a)}^{G(b)} f(u) du`, after
    /// spot-checking that `G` is an antiderivative of `g`.
    pub fn u_sub(
        &self,
        f: impl Fn(f64) -> f64,
        big_g: impl Fn(f64) -> f64,
        g: impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        tol: f64,
    ) -> Result<CheckReport> {
        self.check_antiderivative(&big_g, &g, a, b, tol)?;
        let lhs = self.integrate(|t| f(big_g(t)) * g(t), a, b, 0.25 * tol)?;
        let rhs = self.integrate(&f, big_g(a), big_g(b), 0.25 * tol)?;
        Ok(CheckReport::new(
            "u_sub",
            lhs,
            rhs,
            tol,
            "∫_a^b f(G(t)) g(t) dt = ∫_{G(a)}^{G(b)} f(u) du",
        ))
    }

    /// `∫ p v + ∫ u q` against `u(b) v(b) - u(a) v(a)`, where `p` and `q` are
    /// the integrands of `u` and `v`.
    pub fn parts(
        &self,
        u: impl Fn(f64) -> f64,
        p: impl Fn(f64) -> f64,
        v: impl Fn(f64) -> f64,
        q: impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        tol: f64,
    ) -> Result<CheckReport> {
        self.check_antiderivative(&u, &p, a, b, tol)?;
        self.check_antiderivative(&v, &q, a, b, tol)?;
        let lhs = self.integrate(|t| p(t) * v(t), a, b, 0.25 * tol)?
            + self.integrate(|t| u(t) * q(t), a, b, 0.25 * tol)?;
        let rhs = u(b) * v(b) - u(a) * v(a);
        Ok(CheckReport::new(
            "parts",
            lhs,
            rhs,
            tol,
            "∫ p v dt + ∫ u q dt = u(b)v(b) - u(a)v(a)",
        ))
    }

    /// Builds `F(x) = ∫_a^x f` with [`Integrator::cumulative`] and compares the
    /// central difference `(F(x+h) - F(x-h)) / 2h` with `f(x)` at `grid_n`
    /// interior points. The report carries the worst point.
    pub fn ftc_forward(
        &self,
        f: impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        grid_n: usize,
        h: f64,
        tol: f64,
    ) -> Result<CheckReport> {
        if !(h > 0.0) || !(b - a > 2.0 * h) || grid_n == 0 {
            return Err(Error::invalid(format!(
                "need h > 0, b - a > 2h and grid_n >= 1 (h = {h}, [{a}, {b}], grid_n = {grid_n})"
            )));
        }
        let inner = (a + h, b - h);
        let xs: Vec<f64> = (0..grid_n)
            .map(|i| inner.0 + (inner.1 - inner.0) * (i as f64 + 0.5) / grid_n as f64)
            .collect();
        let mut grid: Vec<f64> = xs.iter().flat_map(|&x| [x - h, x + h]).collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let big_f = self.integrator.cumulative(&f, a, &grid, tol * (b - a))?;
        let at = |x: f64| big_f[grid.partition_point(|&g| g < x)];

        let mut worst = (f64::NAN, f64::NAN, -1.0f64);
        for &x in &xs {
            let slope = (at(x + h) - at(x - h)) / (2.0 * h);
            let fx = f(x);
            let dev = (slope - fx).abs();
            if !(dev <= worst.2) {
                worst = (slope, fx, dev);
            }
        }
        Ok(CheckReport::with_diff(
            "ftc_forward",
            worst.0,
            worst.1,
            worst.2,
            tol,
            "d/dx ∫_a^x f(t) dt = f(x)",
        ))
    }

    /// `∫_a^b G'` against `G(b) - G(a)`.
    pub fn ftc_reverse(
        &self,
        big_g: impl Fn(f64) -> f64,
        dg: impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        tol: f64,
    ) -> Result<CheckReport> {
        let lhs = self.integrate(dg, a, b, 0.5 * tol)?;
        Ok(CheckReport::new(
            "ftc_reverse",
            lhs,
            big_g(b) - big_g(a),
            tol,
            "∫_a^b G'(t) dt = G(b) - G(a)",
        ))
    }

    /// Spread of `F(x) - G(x) + G(a)` over `grid_n + 1` equally spaced points,
    /// where `F` is the cumulative integral of `dG`. Zero if `G` is an
    /// antiderivative of `dG`, up to quadrature error.
    pub fn constant_criterion_range(
        &self,
        big_g: impl Fn(f64) -> f64,
        dg: impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        grid_n: usize,
        tol: f64,
    ) -> Result<f64> {
        let grid: Vec<f64> = (0..=grid_n)
            .map(|i| {
                if i == grid_n {
                    b
                } else {
                    a + (b - a) * i as f64 / grid_n as f64
                }
            })
            .collect();
        let big_f = self.integrator.cumulative(&dg, a, &grid, tol)?;
        let ga = big_g(a);
        let (lo, hi) = grid
            .iter()
            .zip(&big_f)
            .map(|(&x, &fx)| fx - big_g(x) + ga)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), d| {
                (l.min(d), h.max(d))
            });
        Ok(hi - lo)
    }
}

/// `∫_a^b f(G(t)) g(t) dt` against `∫_{G(a)}^{G(b)} f(u) du`; see [`Verifier::u_sub`].
pub fn check_u_sub(
    f: impl Fn(f64) -> f64,
    big_g: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<CheckReport> {
    Verifier::default().u_sub(f, big_g, g, a, b, tol)
}

/// Integration by parts; see [`Verifier::parts`].
pub fn check_parts(
    u: impl Fn(f64) -> f64,
    p: impl Fn(f64) -> f64,
    v: impl Fn(f64) -> f64,
    q: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<CheckReport> {
    Verifier::default().parts(u, p, v, q, a, b, tol)
}

/// See [`Verifier::ftc_forward`].
pub fn ftc_forward_check(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    grid_n: usize,
    h: f64,
    tol: f64,
) -> Result<CheckReport> {
    Verifier::default().ftc_forward(f, a, b, grid_n, h, tol)
}

/// See [`Verifier::ftc_reverse`].
pub fn ftc_reverse_check(
    big_g: impl Fn(f64) -> f64,
    dg: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<CheckReport> {
    Verifier::default().ftc_reverse(big_g, dg, a, b, tol)
}

/// See [`Verifier::constant_criterion_range`].
pub fn constant_criterion_range(
    big_g: impl Fn(f64) -> f64,
    dg: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    grid_n: usize,
    tol: f64,
) -> Result<f64> {
    Verifier::default().constant_criterion_range(big_g, dg, a, b, grid_n, tol)
}

/// Central-difference step `2^-13 max(1, |x|)`.
pub fn fd_step(x: f64) -> f64 {
    2f64.powi(-13) * x.abs().max(1.0)
}

fn central_difference(f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let h = fd_step(x);
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Compares central differences of `f` with `df` at 16 interior points of
/// `[lo, hi]`; the report carries the worst point.
fn derivative_report(
    name: &str,
    anchor: &str,
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    (lo, hi): (f64, f64),
    tol: f64,
) -> CheckReport {
    const POINTS: usize = 16;
    let mut worst = (f64::NAN, f64::NAN, -1.0f64);
    for i in 1..=POINTS {
        let x = lo + (hi - lo) * i as f64 / (POINTS + 1) as f64;
        let (num, exact) = (central_difference(f, x), df(x));
        let dev = (num - exact).abs();
        if !(dev <= worst.2) {
            worst = (num, exact, dev);
        }
    }
    CheckReport::with_diff(name, worst.0, worst.1, worst.2, tol, anchor)
}

fn ln(x: f64) -> f64 {
    log_construct(x, FN_EPS).map_or(f64::NAN, |v| v.value)
}

fn exp(x: f64) -> f64 {
    exp_construct(x, FN_EPS)
}

fn pow(b: f64, x: f64) -> f64 {
    pow_construct(b, x, FN_EPS).unwrap_or(f64::NAN)
}

fn hyp(kind: Hyperbolic, x: f64) -> f64 {
    hyperbolic(kind, x).unwrap_or(f64::NAN)
}

fn inv(kind: Inverse, y: f64) -> f64 {
    inverse_fn(kind, y, FN_EPS).unwrap_or(f64::NAN)
}

type RowFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

struct DerivativeRow {
    name: &'static str,
    anchor: &'static str,
    f: RowFn,
    df: RowFn,
    domain: (f64, f64),
}

fn derivative_rows() -> Vec<DerivativeRow> {
    let a = std::f64::consts::SQRT_2;
    let b = 3.0;
    let row = |name, anchor, f: RowFn, df: RowFn, domain| DerivativeRow {
        name,
        anchor,
        f,
        df,
        domain,
    };
    vec![
        row(
            "deriv_exp",
            "d/dx exp(x) = exp(x)",
            Box::new(exp),
            Box::new(exp),
            (-2.0, 2.0),
        ),
        row(
            "deriv_log",
            "d/dx log(x) = 1/x",
            Box::new(ln),
            Box::new(|x| 1.0 / x),
            (0.5, 4.0),
        ),
        row(
            "deriv_power",
            "d/dx x^a = a x^(a-1), a = sqrt 2",
            Box::new(move |x| pow(x, a)),
            Box::new(move |x| a * pow(x, a - 1.0)),
            (0.5, 3.0),
        ),
        row(
            "deriv_base_power",
            "d/dx b^x = b^x log(b), b = 3",
            Box::new(move |x| pow(b, x)),
            Box::new(move |x| pow(b, x) * ln(b)),
            (-1.0, 2.0),
        ),
        row(
            "deriv_sin",
            "d/dx sin(x) = cos(x)",
            Box::new(f64::sin),
            Box::new(f64::cos),
            (-3.0, 3.0),
        ),
        row(
            "deriv_cos",
            "d/dx cos(x) = -sin(x)",
            Box::new(f64::cos),
            Box::new(|x| -x.sin()),
            (-3.0, 3.0),
        ),
        row(
            "deriv_tan",
            "d/dx tan(x) = sec^2(x)",
            Box::new(f64::tan),
            Box::new(|x| 1.0 / (x.cos() * x.cos())),
            (-1.2, 1.2),
        ),
        row(
            "deriv_cot",
            "d/dx cot(x) = -csc^2(x)",
            Box::new(|x| 1.0 / x.tan()),
            Box::new(|x| -1.0 / (x.sin() * x.sin())),
            (0.3, 2.8),
        ),
        row(
            "deriv_arctan",
            "d/dx arctan(x) = 1/(1+x^2)",
            Box::new(|x| inv(Inverse::Arctan, x)),
            Box::new(|x| 1.0 / (1.0 + x * x)),
            (-3.0, 3.0),
        ),
        row(
            "deriv_arcsin",
            "d/dx arcsin(x) = 1/sqrt(1-x^2)",
            Box::new(|x| inv(Inverse::Arcsin, x)),
            Box::new(|x| 1.0 / (1.0 - x * x).sqrt()),
            (-0.9, 0.9),
        ),
        row(
            "deriv_sinh",
            "d/dx sinh(x) = cosh(x)",
            Box::new(|x| hyp(Hyperbolic::Sinh, x)),
            Box::new(|x| hyp(Hyperbolic::Cosh, x)),
            (-2.0, 2.0),
        ),
        row(
            "deriv_cosh",
            "d/dx cosh(x) = sinh(x)",
            Box::new(|x| hyp(Hyperbolic::Cosh, x)),
            Box::new(|x| hyp(Hyperbolic::Sinh, x)),
            (-2.0, 2.0),
        ),
        row(
            "deriv_tanh",
            "d/dx tanh(x) = sech^2(x)",
            Box::new(|x| hyp(Hyperbolic::Tanh, x)),
            Box::new(|x| hyp(Hyperbolic::Sech2, x)),
            (-2.0, 2.0),
        ),
        row(
            "deriv_arsinh",
            "d/dx arsinh(x) = 1/sqrt(1+x^2)",
            Box::new(|x| inv(Inverse::Arsinh, x)),
            Box::new(|x| 1.0 / (1.0 + x * x).sqrt()),
            (-3.0, 3.0),
        ),
    ]
}

/// One report per row of the standard derivative table, using the
/// constructive `exp`, `log`, powers, hyperbolics and inverse functions.
pub fn derivative_table_check(tol: f64) -> Vec<CheckReport> {
    derivative_rows()
        .iter()
        .map(|r| derivative_report(r.name, r.anchor, &r.f, &r.df, r.domain, tol))
        .collect()
}

/// Product rule on `sin(x) exp(x)` and chain rule on `sin(x^2)`.
pub fn product_chain_check(tol: f64) -> Vec<CheckReport> {
    vec![
        derivative_report(
            "product_rule(sin, exp)",
            "d/dx(u v) = u' v + u v'",
            &|x| x.sin() * exp(x),
            &|x| x.cos() * exp(x) + x.sin() * exp(x),
            (-1.0, 2.0),
            tol,
        ),
        derivative_report(
            "chain_rule(sin, t^2)",
            "d/dx F(G(x)) = f(G(x)) g(x)",
            &|x| (x * x).sin(),
            &|x| (x * x).cos() * 2.0 * x,
            (-2.0, 2.0),
            tol,
        ),
    ]
}

pub type IntegrandFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ClosedForm = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A closed-form integral: `∫_a^b integrand = closed_form(a, b)` on `domain`.
pub struct CatalogEntry {
    pub name: &'static str,
    pub anchor: &'static str,
    pub integrand: IntegrandFn,
    pub closed_form: ClosedForm,
    pub domain: Interval,
    pub improper_end: Option<SingularEnd>,
}

impl CatalogEntry {
    pub fn check(&self, tol: f64) -> CheckReport {
        Verifier::default().check_entry(self, tol)
    }
}

/// Closed form given as an antiderivative `G`: `G(b) - G(a)`.
fn anti(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ClosedForm {
    Box::new(move |a, b| g(b) - g(a))
}

pub fn catalog() -> Vec<CatalogEntry> {
    fn entry(
        name: &'static str,
        anchor: &'static str,
        integrand: impl Fn(f64) -> f64 + Send + Sync + 'static,
        closed_form: ClosedForm,
        (a, b): (f64, f64),
    ) -> CatalogEntry {
        CatalogEntry {
            name,
            anchor,
            integrand: Box::new(integrand),
            closed_form,
            domain: Interval { a, b },
            improper_end: None,
        }
    }
    fn improper(mut e: CatalogEntry, end: SingularEnd) -> CatalogEntry {
        e.improper_end = Some(end);
        e
    }
    let real_power = |a: f64| anti(move |x| pow(x, a + 1.0) / (a + 1.0));
    let sec = |t: f64| 1.0 / t.cos();
    let csc = |t: f64| 1.0 / t.sin();
    let cot = |t: f64| 1.0 / t.tan();

    vec![
        entry(
            "log",
            "∫_1^x dt/t = log(x)",
            |t| 1.0 / t,
            anti(ln),
            (1.0, 3.0),
        ),
        entry(
            "exp",
            "∫_p^q e^t dt = e^q - e^p",
            exp,
            anti(exp),
            (0.0, 1.0),
        ),
        entry(
            "exp_base2",
            "∫_p^q b^t dt = (b^q - b^p)/log(b)",
            |t| pow(2.0, t),
            anti(|x| pow(2.0, x) / ln(2.0)),
            (0.0, 1.0),
        ),
        entry(
            "power_3",
            "∫_0^x t^n dt = x^(n+1)/(n+1)",
            |t| t * t * t,
            anti(|x| x.powi(4) / 4.0),
            (0.0, 2.0),
        ),
        entry(
            "power_5",
            "∫_0^x t^n dt = x^(n+1)/(n+1)",
            |t| t.powi(5),
            anti(|x| x.powi(6) / 6.0),
            (0.0, 1.0),
        ),
        entry(
            "cos",
            "∫_0^x cos(t) dt = sin(x)",
            f64::cos,
            anti(f64::sin),
            (0.0, 2.0),
        ),
        entry(
            "sin",
            "∫_0^x sin(t) dt = 1 - cos(x)",
            f64::sin,
            anti(|x| -x.cos()),
            (0.0, 2.0),
        ),
        entry(
            "sec2",
            "∫_0^x sec^2(t) dt = tan(x)",
            move |t| sec(t) * sec(t),
            anti(f64::tan),
            (0.0, 1.0),
        ),
        entry(
            "csc2",
            "∫_a^b csc^2(t) dt = cot(a) - cot(b)",
            move |t| csc(t) * csc(t),
            anti(move |x| -cot(x)),
            (0.5, 2.0),
        ),
        entry(
            "real_power_half",
            "∫_p^q t^a dt = (q^(a+1) - p^(a+1))/(a+1)",
            |t| pow(t, 0.5),
            real_power(0.5),
            (1.0, 4.0),
        ),
        entry(
            "real_power_sqrt2",
            "∫_p^q t^a dt = (q^(a+1) - p^(a+1))/(a+1)",
            |t| pow(t, std::f64::consts::SQRT_2),
            real_power(std::f64::consts::SQRT_2),
            (0.5, 2.0),
        ),
        improper(
            entry(
                "real_power_neg_half",
                "∫_p^q t^a dt = (q^(a+1) - p^(a+1))/(a+1), p -> 0",
                |t| pow(t, -0.5),
                Box::new(|_, b| 2.0 * pow(b, 0.5)),
                (0.0, 1.0),
            ),
            SingularEnd::Lower,
        ),
        entry(
            "arctan",
            "∫_0^y dt/(1+t^2) = arctan(y)",
            |t| 1.0 / (1.0 + t * t),
            anti(|y| inv(Inverse::Arctan, y)),
            (0.0, 2.0),
        ),
        entry(
            "arcsin",
            "∫_0^y dt/sqrt(1-t^2) = arcsin(y)",
            |t| 1.0 / (1.0 - t * t).sqrt(),
            anti(|y| inv(Inverse::Arcsin, y)),
            (0.0, 0.5),
        ),
        improper(
            entry(
                "arcsin_improper",
                "∫_0^1 dt/sqrt(1-t^2) = pi/2",
                |t| 1.0 / (1.0 - t * t).sqrt(),
                Box::new(|_, _| FRAC_PI_2),
                (0.0, 1.0),
            ),
            SingularEnd::Upper,
        ),
        entry(
            "tan",
            "∫ tan(t) dt = -log|cos(t)| + C",
            f64::tan,
            anti(|x| -ln(x.cos().abs())),
            (0.2, 1.2),
        ),
        entry(
            "cot",
            "∫ cot(t) dt = log|sin(t)| + C",
            cot,
            anti(|x| ln(x.sin().abs())),
            (0.3, 1.2),
        ),
        entry(
            "sec",
            "∫_0^x sec(t) dt = log|sec(x) + tan(x)|",
            sec,
            anti(move |x| ln((sec(x) + x.tan()).abs())),
            (0.0, 1.0),
        ),
        entry(
            "csc",
            "∫ csc(t) dt via G(t) = -(csc(t) + cot(t))",
            csc,
            anti(move |x| -ln((csc(x) + cot(x)).abs())),
            (0.5, 1.5),
        ),
        entry(
            "sectan",
            "∫_0^x sec(t) tan(t) dt = sec(x) - 1",
            move |t| sec(t) * t.tan(),
            anti(sec),
            (0.0, 1.0),
        ),
        entry(
            "cosh",
            "∫_0^x cosh(t) dt = sinh(x)",
            |t| hyp(Hyperbolic::Cosh, t),
            anti(|x| hyp(Hyperbolic::Sinh, x)),
            (0.0, 1.5),
        ),
        entry(
            "sinh",
            "∫_0^x sinh(t) dt = cosh(x) - 1",
            |t| hyp(Hyperbolic::Sinh, t),
            anti(|x| hyp(Hyperbolic::Cosh, x)),
            (0.0, 1.5),
        ),
        entry(
            "sech2",
            "∫_0^x sech^2(t) dt = tanh(x)",
            |t| hyp(Hyperbolic::Sech2, t),
            anti(|x| hyp(Hyperbolic::Tanh, x)),
            (0.0, 1.5),
        ),
        entry(
            "csch2",
            "∫_a^b csch^2(t) dt = coth(a) - coth(b)",
            |t| hyp(Hyperbolic::Csch2, t),
            anti(|x| -hyp(Hyperbolic::Coth, x)),
            (0.5, 2.0),
        ),
        entry(
            "arsinh",
            "∫_0^y dt/sqrt(1+t^2) = arsinh(y)",
            |t| 1.0 / (1.0 + t * t).sqrt(),
            anti(|y| inv(Inverse::Arsinh, y)),
            (0.0, 2.0),
        ),
        improper(
            entry(
                "arcosh",
                "∫_1^y dt/sqrt(t^2-1) = arcosh(y)",
                |t| 1.0 / ((t - 1.0) * (t + 1.0)).sqrt(),
                anti(|y| inv(Inverse::Arcosh, y)),
                (1.0, 2.0),
            ),
            SingularEnd::Lower,
        ),
        entry(
            "artanh",
            "∫_0^y dt/(1-t^2) = artanh(y)",
            |t| 1.0 / ((1.0 - t) * (1.0 + t)),
            anti(|y| inv(Inverse::Artanh, y)),
            (0.0, 0.5),
        ),
        entry(
            "int_log",
            "∫_1^x log(t) dt = x log(x) - x + 1",
            ln,
            anti(|x| x * ln(x) - x),
            (1.0, 3.0),
        ),
        entry(
            "int_arctan",
            "∫_0^x arctan(t) dt = x arctan(x) - log(1+x^2)/2",
            |t| inv(Inverse::Arctan, t),
            anti(|x| x * inv(Inverse::Arctan, x) - 0.5 * ln(1.0 + x * x)),
            (0.0, 1.0),
        ),
    ]
}

/// Checks every catalog entry; reports are sorted by name.
pub fn run_catalog(tol: f64) -> Vec<CheckReport> {
    run_entries(&catalog(), tol)
}

impl Verifier {
    pub fn check_entry(&self, entry: &CatalogEntry, tol: f64) -> CheckReport {
        let Interval { a, b } = entry.domain;
        let quad_tol = 0.25 * tol;
        let result = match entry.improper_end {
            Some(end) => self
                .integrator
                .integrate_improper(&entry.integrand, a, b, end, quad_tol),
            None => self.integrator.integrate(&entry.integrand, a, b, quad_tol),
        };
        match result {
            Ok(r) => CheckReport::new(
                entry.name,
                r.value,
                (entry.closed_form)(a, b),
                tol,
                entry.anchor,
            ),
            Err(e) => CheckReport::failed(entry.name, tol, entry.anchor, &e),
        }
    }

    /// Checks `entries`; reports are sorted by name.
    pub fn run_entries(&self, entries: &[CatalogEntry], tol: f64) -> Vec<CheckReport> {
        #[cfg(feature = "parallel")]
        let mut reports: Vec<CheckReport> = {
            use rayon::prelude::*;
            entries
                .par_iter()
                .map(|e| self.check_entry(e, tol))
                .collect()
        };
        #[cfg(not(feature = "parallel"))]
        let mut reports: Vec<CheckReport> =
            entries.iter().map(|e| self.check_entry(e, tol)).collect();
        reports.sort_by(|a, b| a.name.cmp(&b.name));
        reports
    }

    /// The substitution and parts showcases, as reports.
    pub fn substitution_showcases(&self, tol: f64) -> Vec<CheckReport> {
        let sec2 = |t: f64| 1.0 / (t.cos() * t.cos());
        let atan = |t: f64| inv(Inverse::Arctan, t);
        let cases: Vec<(&str, &str, Result<CheckReport>)> = vec![
            (
                "u_sub(f=1/(1+u^2), G=tan(t))",
                "∫_0^(pi/4) sec^2(t)/(1+tan^2(t)) dt = ∫_0^1 du/(1+u^2)",
                self.u_sub(|u| 1.0 / (1.0 + u * u), f64::tan, sec2, 0.0, PI / 4.0, tol),
            ),
            (
                "u_sub(f=1/(2u), G=1+t^2)",
                "∫_0^x t/(1+t^2) dt = log(1+x^2)/2",
                self.u_sub(|u| 0.5 / u, |t| 1.0 + t * t, |t| 2.0 * t, 0.0, 1.0, tol),
            ),
            (
                "u_sub(G=t)",
                "G = identity",
                self.u_sub(exp, |t| t, |_| 1.0, 0.0, 1.0, tol),
            ),
            (
                "parts(u=log(t), v=t)",
                "∫_1^x log(t) dt = x log(x) - x + 1",
                self.parts(
                    ln,
                    |t| 1.0 / t,
                    |t| t,
                    |_| 1.0,
                    1.0,
                    std::f64::consts::E,
                    tol,
                ),
            ),
            (
                "parts(u=t, v=t)",
                "2 ∫_0^1 t dt = 1",
                self.parts(|t| t, |_| 1.0, |t| t, |_| 1.0, 0.0, 1.0, tol),
            ),
            (
                "parts(u=atan(t), v=t)",
                "∫_0^x arctan(t) dt = x arctan(x) - log(1+x^2)/2",
                self.parts(atan, |t| 1.0 / (1.0 + t * t), |t| t, |_| 1.0, 0.0, 1.0, tol),
            ),
        ];
        cases
            .into_iter()
            .map(|(name, anchor, r)| match r {
                Ok(r) => r.named(name, anchor),
                Err(e) => CheckReport::failed(name, tol, anchor, &e),
            })
            .collect()
    }

    /// Both directions of the fundamental theorem on the standard examples.
    pub fn ftc_showcases(&self, tol: f64) -> Vec<CheckReport> {
        let h = 2f64.powi(-13);
        let forward = |name: &str, r: Result<CheckReport>| match r {
            Ok(r) => {
                let anchor = r.anchor.clone();
                r.named(name, anchor)
            }
            Err(e) => CheckReport::failed(name, tol, "d/dx ∫_a^x f(t) dt = f(x)", &e),
        };
        vec![
            forward(
                "ftc_forward(cos)",
                self.ftc_forward(f64::cos, 0.0, 3.0, 32, h, tol),
            ),
            forward(
                "ftc_forward(1/t)",
                self.ftc_forward(|t| 1.0 / t, 1.0, 4.0, 32, h, tol),
            ),
            forward(
                "ftc_forward(exp)",
                self.ftc_forward(exp, 0.0, 1.0, 32, h, tol),
            ),
            forward(
                "ftc_reverse(t^2)",
                self.ftc_reverse(|t| t * t, |t| 2.0 * t, 0.0, 1.0, tol),
            ),
            forward(
                "ftc_reverse(sin)",
                self.ftc_reverse(f64::sin, f64::cos, 0.0, FRAC_PI_2, tol),
            ),
            forward(
                "ftc_reverse(exp)",
                self.ftc_reverse(exp, exp, 0.0, 1.0, tol),
            ),
        ]
    }
}

pub fn run_entries(entries: &[CatalogEntry], tol: f64) -> Vec<CheckReport> {
    Verifier::default().run_entries(entries, tol)
}

/// The substitution and parts showcases, as reports.
pub fn substitution_showcases(tol: f64) -> Vec<CheckReport> {
    Verifier::default().substitution_showcases(tol)
}

/// Both directions of the fundamental theorem on the standard examples.
pub fn ftc_showcases(tol: f64) -> Vec<CheckReport> {
    Verifier::default().ftc_showcases(tol)
}

/// `max |log(xy) - log x - log y|` over `pairs` seeded random pairs drawn
/// log-uniformly from `[2^-8, 2^8]`.
pub fn log_functional_equation_check(seed: u64, pairs: usize, tol: f64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (f64::NAN, f64::NAN, -1.0f64);
    for _ in 0..pairs {
        let x = pow(2.0, rng.gen_range(-8.0..=8.0));
        let y = pow(2.0, rng.gen_range(-8.0..=8.0));
        let (lhs, rhs) = (ln(x * y), ln(x) + ln(y));
        let dev = (lhs - rhs).abs();
        if !(dev <= worst.2) {
            worst = (lhs, rhs, dev);
        }
    }
    CheckReport::with_diff(
        "log_functional_equation",
        worst.0,
        worst.1,
        worst.2,
        tol,
        "log(xy) = log(x) + log(y)",
    )
}
