//! Riemann integration by refinement of uniform tagged partitions.
//!
//! The limit over partitions of vanishing mesh is realised as a doubling
//! schedule `n = n0, 2 n0, 4 n0, ...` with a Cauchy stopping rule. Improper
//! integrals approach the singular endpoint geometrically and finish with
//! one Aitken extrapolation.

use std::fmt::Write as _;

use serde::Serialize;

use crate::elementary;
use crate::error::{Error, Result};
use crate::format::csv_num;
use crate::partitions::{uniform_sum_with_magnitude, Integrand, Interval, TagRule};
use crate::sum::CompensatedSum;

pub const DEFAULT_MAX_N: usize = 1 << 22;
pub const DEFAULT_N0: usize = 8;

/// Successive differences at or below this multiple of `sum |f| dt` are
/// treated as rounding noise.
const NOISE_FACTOR: f64 = 1e3 * f64::EPSILON;

/// Deepest endpoint offset tried by improper integration, `delta = (b - a) 2^-j`.
const MAX_IMPROPER_STEPS: u32 = 60;
/// Consecutive growing refinements required before declaring divergence.
const DIVERGENCE_RUN: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrationResult {
    pub value: f64,
    pub error_estimate: f64,
    pub n_final: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// `(n, S_n)` per refinement. For improper integrals the pairs are
    /// `(j, I_j)`, the proper integral with endpoint offset `(b - a) 2^-j`.
    pub trace: Vec<(usize, f64)>,
}

impl IntegrationResult {
    fn zero() -> Self {
        Self {
            value: 0.0,
            error_estimate: 0.0,
            n_final: 0,
            evaluations: 0,
            converged: true,
            trace: Vec::new(),
        }
    }

    fn negated(mut self) -> Self {
        self.value = -self.value;
        for entry in &mut self.trace {
            entry.1 = -entry.1;
        }
        self
    }
}

/// Which endpoint of `[a, b]` carries the singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SingularEnd {
    Lower,
    Upper,
}

impl std::str::FromStr for SingularEnd {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lower" => Ok(SingularEnd::Lower),
            "upper" => Ok(SingularEnd::Upper),
            other => Err(Error::invalid(format!(
                "singular end must be 'lower' or 'upper', got '{other}'"
            ))),
        }
    }
}

/// Refinement settings.
#[derive(Debug, Clone)]
pub struct Integrator {
    pub rule: TagRule,
    pub n0: usize,
    pub max_n: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            rule: TagRule::Midpoint,
            n0: DEFAULT_N0,
            max_n: DEFAULT_MAX_N,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "tolerance must be positive and finite, got {tol}"
        )))
    }
}

fn check_finite(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "endpoints must be finite, got {a} and {b}"
        )))
    }
}

impl Integrator {
    pub fn with_rule(rule: TagRule) -> Self {
        Self {
            rule,
            ..Self::default()
        }
    }

    pub fn max_n(mut self, max_n: usize) -> Self {
        self.max_n = max_n;
        self
    }

    /// Oriented integral of `f` from `a` to `b`.
    ///
    /// Doubles `n` from `n0` until two successive Riemann sums differ by at
    /// most `tol`. Hitting `max_n`, or successive differences stalling at
    /// rounding level, ends the refinement with `converged = false`.
    pub fn integrate<F: Integrand + ?Sized>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
    ) -> Result<IntegrationResult> {
        check_tol(tol)?;
        check_finite(a, b)?;
        if a == b {
            return Ok(IntegrationResult::zero());
        }
        if a > b {
            return self.integrate(f, b, a, tol).map(IntegrationResult::negated);
        }
        let iv = Interval { a, b };
        let mut n = self.n0.max(1);
        let mut evaluations = 0;
        let mut trace: Vec<(usize, f64)> = Vec::new();
        let mut last_diff: Option<f64> = None;
        let mut converged = false;
        loop {
            let s = uniform_sum_with_magnitude(f, iv, n, &self.rule)?;
            evaluations += n;
            if let Some(&(_, prev)) = trace.last() {
                let diff = (s.value - prev).abs();
                trace.push((n, s.value));
                if diff <= tol {
                    converged = true;
                    last_diff = Some(diff);
                    break;
                }
                let noise = NOISE_FACTOR * s.magnitude;
                // Below the rounding floor further doubling cannot reach tol.
                let floor_reached = tol < noise && diff <= noise;
                let stalled = matches!(last_diff, Some(d) if diff <= noise && diff > 0.5 * d);
                last_diff = Some(diff);
                if stalled || floor_reached {
                    break;
                }
            } else {
                trace.push((n, s.value));
            }
            match n.checked_mul(2) {
                Some(next) if next <= self.max_n => n = next,
                _ => break,
            }
        }
        let &(n_final, value) = trace.last().expect("at least one refinement");
        Ok(IntegrationResult {
            value,
            error_estimate: last_diff.unwrap_or(f64::INFINITY),
            n_final,
            evaluations,
            converged,
            trace,
        })
    }

    /// Improper integral with a singularity at one endpoint, as the limit of
    /// proper integrals whose endpoint offset halves each step.
    ///
    /// Each proper integral is the previous one plus the integral over the
    /// newly uncovered sliver, so every step integrates only a short piece on
    /// which `f` varies by a bounded factor. Stops when successive values, or
    /// successive Aitken extrapolations of the last three values, agree to
    /// `tol`. Values that grow monotonically past `1/tol` for five
    /// consecutive steps are reported as divergence.
    pub fn integrate_improper<F: Integrand + ?Sized>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        end: SingularEnd,
        tol: f64,
    ) -> Result<IntegrationResult> {
        check_tol(tol)?;
        check_finite(a, b)?;
        if !(a < b) {
            return Err(Error::invalid(format!(
                "improper integration needs a < b, got [{a}, {b}]"
            )));
        }
        let width = b - a;
        let piece_tol = 0.01 * tol;
        // Interval between offsets delta_hi > delta_lo on the singular side.
        let span = |delta_far: f64, delta_near: f64| match end {
            SingularEnd::Lower => (a + delta_near, a + delta_far),
            SingularEnd::Upper => (b - delta_far, b - delta_near),
        };
        let mut delta = 0.25 * width;
        let (lo, hi) = match end {
            SingularEnd::Lower => (a + delta, b),
            SingularEnd::Upper => (a, b - delta),
        };
        let first = self.piece(f, lo, hi, piece_tol)?;
        let mut evaluations = first.evaluations;
        let mut n_final = first.n_final;
        let mut total = CompensatedSum::new();
        total += first.value;
        let mut values = vec![total.value()];
        let mut trace = vec![(2usize, total.value())];
        let mut extrapolated: Vec<f64> = Vec::new();

        for j in 3..=MAX_IMPROPER_STEPS {
            let near = 0.5 * delta;
            let (lo, hi) = span(delta, near);
            if !(lo < hi) {
                break;
            }
            let piece = self.piece(f, lo, hi, piece_tol)?;
            evaluations += piece.evaluations;
            n_final = piece.n_final;
            total += piece.value;
            delta = near;
            let current = total.value();
            let previous = *values.last().expect("nonempty");
            values.push(current);
            trace.push((j as usize, current));

            if diverging(&values, tol) {
                return Err(Error::Divergence(format!(
                    "integral over [{a}, {b}] grows without bound toward the {} endpoint \
                     (|I| = {:e} at offset {:e})",
                    match end {
                        SingularEnd::Lower => "lower",
                        SingularEnd::Upper => "upper",
                    },
                    current.abs(),
                    delta
                )));
            }

            if let [.., x0, x1, x2] = values[..] {
                if let Some(acc) = aitken(x0, x1, x2) {
                    extrapolated.push(acc);
                }
            }
            let raw_diff = (current - previous).abs();
            let ext_diff = match extrapolated[..] {
                [.., p, q] => (q - p).abs(),
                _ => f64::INFINITY,
            };
            if raw_diff <= tol || ext_diff <= tol {
                let value = extrapolated.last().copied().unwrap_or(current);
                return Ok(IntegrationResult {
                    value,
                    error_estimate: raw_diff.min(ext_diff),
                    n_final,
                    evaluations,
                    converged: true,
                    trace,
                });
            }
        }
        let value = extrapolated
            .last()
            .copied()
            .unwrap_or_else(|| *values.last().expect("nonempty"));
        let error_estimate = match extrapolated[..] {
            [.., p, q] => (q - p).abs(),
            _ => f64::INFINITY,
        };
        Ok(IntegrationResult {
            value,
            error_estimate,
            n_final,
            evaluations,
            converged: false,
            trace,
        })
    }

    /// A proper integral whose tolerance is relaxed to a relative 1e-10 of a
    /// coarse estimate when the piece is large.
    fn piece<F: Integrand + ?Sized>(
        &self,
        f: &F,
        lo: f64,
        hi: f64,
        tol: f64,
    ) -> Result<IntegrationResult> {
        let coarse =
            uniform_sum_with_magnitude(f, Interval { a: lo, b: hi }, self.n0.max(1), &self.rule)?;
        let tol = tol.max(1e-10 * coarse.magnitude);
        let mut r = self.integrate(f, lo, hi, tol)?;
        r.evaluations += self.n0.max(1);
        Ok(r)
    }

    /// `F(x) = integral of f from a to x` at each grid point.
    ///
    /// Every grid cell is integrated once and the results prefix-summed, so
    /// `F(x_{i+1}) - F(x_i)` is exactly the integral over that cell up to the
    /// rounding of the running sum. The tolerance is shared among cells in
    /// proportion to their width.
    pub fn cumulative<F: Integrand + ?Sized>(
        &self,
        f: &F,
        a: f64,
        grid: &[f64],
        tol: f64,
    ) -> Result<Vec<f64>> {
        check_tol(tol)?;
        if let Some(w) = grid.windows(2).find(|w| !(w[0] <= w[1])) {
            return Err(Error::invalid(format!(
                "grid must be sorted ({} precedes {})",
                w[0], w[1]
            )));
        }
        let Some(&last) = grid.last() else {
            return Ok(Vec::new());
        };
        if !(grid[0] >= a) {
            return Err(Error::invalid(format!(
                "grid starts at {} which is below a = {a}",
                grid[0]
            )));
        }
        check_finite(a, last)?;
        let total_width = last - a;
        let mut acc = CompensatedSum::new();
        let mut prev = a;
        let mut out = Vec::with_capacity(grid.len());
        for &x in grid {
            if x > prev {
                let cell_tol = tol * (x - prev) / total_width;
                acc += self
                    .integrate(f, prev, x, cell_tol.max(f64::MIN_POSITIVE))?
                    .value;
                prev = x;
            }
            out.push(acc.value());
        }
        Ok(out)
    }
}

/// Aitken's delta-squared acceleration of three successive terms.
pub fn aitken(x0: f64, x1: f64, x2: f64) -> Option<f64> {
    let d1 = x1 - x0;
    let d2 = x2 - x1;
    let denom = d2 - d1;
    if denom == 0.0 || !denom.is_finite() {
        return None;
    }
    let v = x2 - d2 * d2 / denom;
    v.is_finite().then_some(v)
}

fn diverging(values: &[f64], tol: f64) -> bool {
    if values.len() < DIVERGENCE_RUN + 1 {
        return false;
    }
    let tail = &values[values.len() - DIVERGENCE_RUN - 1..];
    let growing = tail.windows(2).all(|w| w[1].abs() > w[0].abs());
    growing && tail[DIVERGENCE_RUN].abs() > 1.0 / tol
}

/// Oriented integral with the default refinement settings and the given rule.
pub fn integrate<F: Integrand + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    rule: TagRule,
) -> Result<IntegrationResult> {
    Integrator::with_rule(rule).integrate(f, a, b, tol)
}

pub fn integrate_improper<F: Integrand + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    end: SingularEnd,
    tol: f64,
) -> Result<IntegrationResult> {
    Integrator::default().integrate_improper(f, a, b, end, tol)
}

pub fn cumulative<F: Integrand + ?Sized>(
    f: &F,
    a: f64,
    grid: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    Integrator::default().cumulative(f, a, grid, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub value: f64,
    /// `|S_n - exact|` when the exact value is known, otherwise
    /// `|S_n - S_prev|` (absent on the first row).
    pub diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Mean observed order over the last three row pairs. `+inf` when the
    /// differences vanish; NaN when there are too few rows.
    pub estimated_order: f64,
}

impl ConvergenceReport {
    /// CSV with header `n,value,diff` and a trailing `# estimated_order=` line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,value,diff\n");
        for row in &self.rows {
            let diff = row.diff.map(csv_num).unwrap_or_default();
            let _ = writeln!(out, "{},{},{}", row.n, csv_num(row.value), diff);
        }
        let _ = writeln!(out, "# estimated_order={}", csv_num(self.estimated_order));
        out
    }
}

/// Riemann sums at each `n` in `n_list` with their errors and the observed
/// order of convergence.
pub fn convergence_report<F: Integrand + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    rule: &TagRule,
    n_list: &[usize],
    exact: Option<f64>,
) -> Result<ConvergenceReport> {
    if n_list.is_empty() {
        return Err(Error::invalid("n_list is empty"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("n_list must be strictly increasing"));
    }
    let iv = Interval::new(a, b)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let value = uniform_sum_with_magnitude(f, iv, n, rule)?.value;
        let diff = match exact {
            Some(x) => Some((value - x).abs()),
            None => rows.last().map(|r| (value - r.value).abs()),
        };
        rows.push(ConvergenceRow { n, value, diff });
    }
    let estimated_order = estimate_order(&rows);
    Ok(ConvergenceReport {
        rows,
        estimated_order,
    })
}

fn estimate_order(rows: &[ConvergenceRow]) -> f64 {
    let pairs: Vec<(usize, f64)> = rows
        .iter()
        .filter_map(|r| r.diff.map(|d| (r.n, d)))
        .collect();
    let orders: Vec<f64> = pairs
        .windows(2)
        .filter_map(|w| {
            let ((n0, d0), (n1, d1)) = (w[0], w[1]);
            if d1 == 0.0 {
                return Some(f64::INFINITY);
            }
            if d0 == 0.0 {
                return None;
            }
            let ratio = n1 as f64 / n0 as f64;
            Some(elementary::ln(d0 / d1) / elementary::ln(ratio))
        })
        .collect();
    let tail = &orders[orders.len().saturating_sub(3)..];
    if tail.is_empty() {
        return f64::NAN;
    }
    tail.iter().sum::<f64>() / tail.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2, LN_2};

    #[test]
    fn square_on_unit_interval() {
        let r = integrate(&|t: f64| t * t, 0.0, 1.0, 1e-9, TagRule::Midpoint).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-9);
        let [.., (_, p), (_, q)] = r.trace[..] else {
            panic!()
        };
        assert!((q - p).abs() <= 1e-9);
        assert_eq!(r.evaluations, r.trace.iter().map(|(n, _)| n).sum::<usize>());
    }

    #[test]
    fn empty_interval_is_exactly_zero() {
        let r = integrate(&|t: f64| 1.0 / t, 3.0, 3.0, 1e-6, TagRule::Left).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn reversed_orientation_negates() {
        let r = integrate(&|t: f64| t, 1.0, 0.0, 1e-9, TagRule::Midpoint).unwrap();
        assert!((r.value + 0.5).abs() < 1e-12);
    }

    #[test]
    fn bad_tolerance_rejected() {
        for tol in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                integrate(&|t: f64| t, 0.0, 1.0, tol, TagRule::Midpoint),
                Err(Error::InvalidArgument(_))
            ));
        }
    }

    #[test]
    fn non_finite_sample_is_evaluation_error() {
        let err = integrate(&|t: f64| 1.0 / t, -1.0, 1.0, 1e-6, TagRule::Right).unwrap_err();
        assert!(matches!(err, Error::Evaluation { .. }));
    }

    #[test]
    fn cap_reached_is_not_an_error() {
        let integ = Integrator::with_rule(TagRule::Left).max_n(64);
        let r = integ.integrate(&|t: f64| t.exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!(!r.converged);
        assert_eq!(r.n_final, 64);
        assert_eq!(r.evaluations, 8 + 16 + 32 + 64);
    }

    #[test]
    fn stalled_refinement_stops_early() {
        let r = integrate(&|t: f64| t.cos(), 0.0, 1.0, 1e-18, TagRule::Midpoint).unwrap();
        assert!(!r.converged);
        assert!(r.n_final < DEFAULT_MAX_N);
        assert!((r.value - 1f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn improper_arcsin_endpoint() {
        let f = |t: f64| 1.0 / (1.0 - t * t).sqrt();
        let r = integrate_improper(&f, 0.0, 1.0, SingularEnd::Upper, 1e-6).unwrap();
        assert!(r.converged);
        assert!((r.value - FRAC_PI_2).abs() < 1e-5, "{}", r.value);
    }

    #[test]
    fn improper_inverse_sqrt() {
        let r = integrate_improper(&|t: f64| 1.0 / t.sqrt(), 0.0, 1.0, SingularEnd::Lower, 1e-6)
            .unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn improper_csc_squared_diverges() {
        let f = |t: f64| 1.0 / (t.sin() * t.sin());
        let err = integrate_improper(&f, 0.0, 1.0, SingularEnd::Lower, 1e-6).unwrap_err();
        assert!(matches!(err, Error::Divergence(_)), "{err:?}");
    }

    #[test]
    fn improper_log_divergence_is_not_converged() {
        // Grows only logarithmically, so never passes 1/tol; it must still
        // not claim convergence.
        let r = integrate_improper(&|t: f64| 1.0 / t, 0.0, 1.0, SingularEnd::Lower, 1e-3).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn aitken_exact_on_geometric_tail() {
        let x = |j: i32| 2.0 - 3.0 * 0.5f64.powi(j);
        assert!((aitken(x(1), x(2), x(3)).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(aitken(1.0, 2.0, 3.0), None);
    }

    #[test]
    fn cumulative_examples() {
        let c = cumulative(&|_t: f64| 2.5, 1.0, &[1.0, 2.0], 1e-10).unwrap();
        assert_eq!(c, vec![0.0, 2.5]);

        let c = cumulative(&|t: f64| 1.0 / t, 1.0, &[1.0, 2.0, 4.0], 1e-10).unwrap();
        assert_eq!(c[0], 0.0);
        assert!((c[1] - LN_2).abs() < 1e-10);
        assert!((c[2] - 2.0 * LN_2).abs() < 1e-10);
        assert!((c[2] - 2.0 * c[1]).abs() < 1e-10);

        let c = cumulative(&f64::cos, 0.0, &[0.0, FRAC_PI_2], 1e-10).unwrap();
        assert!((c[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cumulative_rejects_bad_grids() {
        assert!(cumulative(&f64::cos, 0.0, &[1.0, 0.5], 1e-6).is_err());
        assert!(cumulative(&f64::cos, 0.0, &[-1.0, 0.5], 1e-6).is_err());
        assert!(cumulative(&f64::cos, 0.0, &[], 1e-6).unwrap().is_empty());
    }

    fn doubling(from: usize, to: usize) -> Vec<usize> {
        std::iter::successors(Some(from), |n| Some(n * 2))
            .take_while(|&n| n <= to)
            .collect()
    }

    #[test]
    fn convergence_orders() {
        let ns = doubling(8, 4096);
        let left =
            convergence_report(&f64::exp, 0.0, 1.0, &TagRule::Left, &ns, Some(E - 1.0)).unwrap();
        assert!(
            (left.estimated_order - 1.0).abs() < 0.05,
            "{}",
            left.estimated_order
        );
        let mid = convergence_report(&f64::exp, 0.0, 1.0, &TagRule::Midpoint, &ns, Some(E - 1.0))
            .unwrap();
        assert!(
            (mid.estimated_order - 2.0).abs() < 0.05,
            "{}",
            mid.estimated_order
        );
        let succ = convergence_report(&f64::exp, 0.0, 1.0, &TagRule::Midpoint, &ns, None).unwrap();
        assert!(succ.rows[0].diff.is_none());
        assert!((succ.estimated_order - 2.0).abs() < 0.05);
    }

    #[test]
    fn constant_integrand_has_infinite_order() {
        let ns = doubling(8, 1024);
        let r =
            convergence_report(&|_t: f64| 1.0, 0.0, 1.0, &TagRule::Midpoint, &ns, None).unwrap();
        assert!(r.rows.iter().all(|row| row.value == 1.0));
        assert_eq!(r.estimated_order, f64::INFINITY);
        assert!(r.to_csv().ends_with("# estimated_order=inf\n"));
    }

    #[test]
    fn convergence_csv_layout() {
        let r =
            convergence_report(&|t: f64| t, 0.0, 1.0, &TagRule::Left, &[1, 2], Some(0.5)).unwrap();
        assert_eq!(
            r.to_csv(),
            "n,value,diff\n1,0,0.5\n2,0.25,0.25\n# estimated_order=1\n"
        );
        assert!(convergence_report(&|t: f64| t, 0.0, 1.0, &TagRule::Left, &[4, 2], None).is_err());
    }
}
