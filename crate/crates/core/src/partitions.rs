//! Tagged partitions of real intervals and the Riemann sum over them.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::roots::nth_root;
use crate::sum::CompensatedSum;

/// Upper bound on the number of points a partition may hold.
pub const MAX_POINTS: usize = 1 << 24;

/// Anything that can be sampled as an integrand.
///
/// Plain closures `Fn(f64) -> f64` implement this; a non-finite sample is
/// reported as an evaluation error carrying the offending point.
pub trait Integrand {
    fn sample(&self, t: f64) -> Result<f64>;
}

impl<F> Integrand for F
where
    F: Fn(f64) -> f64,
{
    #[inline]
    fn sample(&self, t: f64) -> Result<f64> {
        let y = self(t);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::eval(t, format!("integrand is not finite ({y})")))
        }
    }
}

/// A closed interval `[a, b]` with `a <= b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::invalid(format!(
                "interval endpoints must be finite, got [{a}, {b}]"
            )));
        }
        if a > b {
            return Err(Error::invalid(format!("interval [{a}, {b}] has a > b")));
        }
        Ok(Self { a, b })
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }
}

pub type TagFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// How each cell `[lo, hi]` picks its tag.
#[derive(Clone, Default)]
pub enum TagRule {
    Left,
    Right,
    #[default]
    Midpoint,
    /// Receives the cell endpoints and must return a point inside them.
    Custom(TagFn),
}

impl TagRule {
    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        TagRule::Custom(Arc::new(f))
    }

    pub fn name(&self) -> &'static str {
        match self {
            TagRule::Left => "left",
            TagRule::Right => "right",
            TagRule::Midpoint => "midpoint",
            TagRule::Custom(_) => "custom",
        }
    }

    #[inline]
    fn tag(&self, lo: f64, hi: f64) -> Result<f64> {
        let xi = match self {
            TagRule::Left => lo,
            TagRule::Right => hi,
            TagRule::Midpoint => 0.5 * (lo + hi),
            TagRule::Custom(f) => {
                let xi = f(lo, hi);
                if !(lo <= xi && xi <= hi) {
                    return Err(Error::invalid(format!(
                        "custom tag {xi} lies outside its cell [{lo}, {hi}]"
                    )));
                }
                xi
            }
        };
        Ok(xi)
    }
}

impl fmt::Debug for TagRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl PartialEq for TagRule {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (TagRule::Custom(a), TagRule::Custom(b)) => Arc::ptr_eq(a, b),
            (a, b) => std::mem::discriminant(a) == std::mem::discriminant(b),
        }
    }
}

impl FromStr for TagRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "left" => Ok(TagRule::Left),
            "right" => Ok(TagRule::Right),
            "midpoint" | "mid" => Ok(TagRule::Midpoint),
            other => Err(Error::invalid(format!(
                "unknown tag rule '{other}' (expected left, right or midpoint)"
            ))),
        }
    }
}

/// Points `t_0 < ... < t_n` and one tag per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedPartition {
    points: Vec<f64>,
    tags: Vec<f64>,
}

impl TaggedPartition {
    /// Builds a partition from explicit points, validating order and tags.
    pub fn from_points(points: Vec<f64>, rule: &TagRule) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("a partition needs at least two points"));
        }
        if points.len() > MAX_POINTS {
            return Err(Error::invalid(format!(
                "{} points exceeds the cap of {MAX_POINTS}",
                points.len()
            )));
        }
        if let Some(w) = points.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::invalid(format!(
                "partition points must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        let tags = points
            .windows(2)
            .map(|w| rule.tag(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { points, tags })
    }

    /// Builds a partition from explicit points and tags.
    pub fn with_tags(points: Vec<f64>, tags: Vec<f64>) -> Result<Self> {
        if tags.len() + 1 != points.len() {
            return Err(Error::invalid(format!(
                "{} points need {} tags, got {}",
                points.len(),
                points.len().saturating_sub(1),
                tags.len()
            )));
        }
        let p = Self::from_points(points, &TagRule::Left)?;
        for (k, (&xi, w)) in tags.iter().zip(p.points.windows(2)).enumerate() {
            if !(w[0] <= xi && xi <= w[1]) {
                return Err(Error::invalid(format!(
                    "tag {k} = {xi} lies outside its cell [{}, {}]",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { tags, ..p })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn tags(&self) -> &[f64] {
        &self.tags
    }

    pub fn cells(&self) -> usize {
        self.tags.len()
    }

    pub fn interval(&self) -> Interval {
        Interval {
            a: self.points[0],
            b: self.points[self.points.len() - 1],
        }
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.windows(2).map(|w| w[1] - w[0])
    }
}

fn check_cells(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("number of cells must be at least 1"));
    }
    if n >= MAX_POINTS {
        return Err(Error::invalid(format!(
            "{n} cells exceeds the cap of {} cells",
            MAX_POINTS - 1
        )));
    }
    Ok(())
}

fn check_proper(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid(format!(
            "endpoints must be finite, got [{a}, {b}]"
        )));
    }
    if !(a < b) {
        return Err(Error::invalid(format!("need a < b, got [{a}, {b}]")));
    }
    Ok(())
}

#[inline]
fn uniform_point(a: f64, b: f64, h: f64, k: usize, n: usize) -> f64 {
    if k == n {
        b
    } else {
        a + k as f64 * h
    }
}

/// `t_k = a + k (b - a) / n`, with `t_n = b` exactly.
pub fn uniform_partition(iv: Interval, n: usize, rule: &TagRule) -> Result<TaggedPartition> {
    check_cells(n)?;
    check_proper(iv.a, iv.b)?;
    let h = (iv.b - iv.a) / n as f64;
    let points = (0..=n)
        .map(|k| uniform_point(iv.a, iv.b, h, k, n))
        .collect();
    TaggedPartition::from_points(points, rule)
}

/// `t_k = p (q/p)^(k/n)`: consecutive points share the ratio `(q/p)^(1/n)`.
/// The last point is pinned to `q`.
pub fn geometric_partition(p: f64, q: f64, n: usize, rule: &TagRule) -> Result<TaggedPartition> {
    check_cells(n)?;
    if !(p > 0.0) {
        return Err(Error::invalid(format!(
            "geometric partition needs p > 0, got {p}"
        )));
    }
    check_proper(p, q)?;
    let ratio = nth_root(q / p, n as u64);
    let mut points = Vec::with_capacity(n + 1);
    let mut t = p;
    points.push(t);
    for _ in 1..n {
        t *= ratio;
        points.push(t);
    }
    points.push(q);
    TaggedPartition::from_points(points, rule)
}

/// Widest cell.
pub fn mesh(p: &TaggedPartition) -> f64 {
    p.widths().fold(0.0, f64::max)
}

/// `S(f, P) = sum_k f(xi_k) (t_{k+1} - t_k)`, accumulated left to right with
/// compensation.
pub fn riemann_sum<F: Integrand + ?Sized>(f: &F, p: &TaggedPartition) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for (&xi, w) in p.tags.iter().zip(p.points.windows(2)) {
        acc += f.sample(xi)? * (w[1] - w[0]);
    }
    Ok(acc.value())
}

/// Riemann sum together with `sum_k |f(xi_k)| (t_{k+1} - t_k)`, used by the
/// integrator to judge when differences have reached rounding noise.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SumWithMagnitude {
    pub value: f64,
    pub magnitude: f64,
}

/// Riemann sum over `uniform_partition(iv, n, rule)` without materialising
/// the partition. Performs the same arithmetic as building the partition and
/// calling [`riemann_sum`], so the two agree bit for bit.
pub fn uniform_riemann_sum<F: Integrand + ?Sized>(
    f: &F,
    iv: Interval,
    n: usize,
    rule: &TagRule,
) -> Result<f64> {
    uniform_sum_with_magnitude(f, iv, n, rule).map(|s| s.value)
}

pub(crate) fn uniform_sum_with_magnitude<F: Integrand + ?Sized>(
    f: &F,
    iv: Interval,
    n: usize,
    rule: &TagRule,
) -> Result<SumWithMagnitude> {
    check_cells(n)?;
    check_proper(iv.a, iv.b)?;
    let h = (iv.b - iv.a) / n as f64;
    let mut acc = CompensatedSum::new();
    let mut mag = 0.0;
    let mut lo = iv.a;
    for k in 0..n {
        let hi = uniform_point(iv.a, iv.b, h, k + 1, n);
        if !(lo < hi) {
            return Err(Error::invalid(format!(
                "[{}, {}] is too narrow for {n} distinct cells",
                iv.a, iv.b
            )));
        }
        let xi = rule.tag(lo, hi)?;
        let term = f.sample(xi)? * (hi - lo);
        acc += term;
        mag += term.abs();
        lo = hi;
    }
    Ok(SumWithMagnitude {
        value: acc.value(),
        magnitude: mag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn uniform_midpoint_quarters() {
        let p = uniform_partition(unit(), 4, &TagRule::Midpoint).unwrap();
        assert_eq!(p.points(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(p.tags(), &[0.125, 0.375, 0.625, 0.875]);
        assert_eq!(mesh(&p), 0.25);
    }

    #[test]
    fn uniform_single_left_cell() {
        let p = uniform_partition(unit(), 1, &TagRule::Left).unwrap();
        assert_eq!(p.points(), &[0.0, 1.0]);
        assert_eq!(p.tags(), &[0.0]);
        assert_eq!(mesh(&p), 1.0);
    }

    #[test]
    fn uniform_right_on_symmetric_interval() {
        let iv = Interval::new(-2.0, 2.0).unwrap();
        let p = uniform_partition(iv, 4, &TagRule::Right).unwrap();
        assert_eq!(p.tags(), &[-1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn uniform_rejects_bad_arguments() {
        assert!(matches!(
            uniform_partition(unit(), 0, &TagRule::Left),
            Err(Error::InvalidArgument(_))
        ));
        let degenerate = Interval { a: 1.0, b: 1.0 };
        assert!(matches!(
            uniform_partition(degenerate, 3, &TagRule::Left),
            Err(Error::InvalidArgument(_))
        ));
        assert!(Interval::new(2.0, 1.0).is_err());
    }

    #[test]
    fn geometric_powers_of_two() {
        let p = geometric_partition(1.0, 16.0, 4, &TagRule::Left).unwrap();
        assert_eq!(p.points(), &[1.0, 2.0, 4.0, 8.0, 16.0]);
        assert_eq!(mesh(&p), 8.0);
    }

    #[test]
    fn geometric_widths_match_closed_form() {
        let (x, n) = (5.0f64, 12usize);
        let p = geometric_partition(1.0, x, n, &TagRule::Left).unwrap();
        let r = x.powf(1.0 / n as f64);
        for (k, w) in p.widths().enumerate() {
            let expect = x.powf(k as f64 / n as f64) * (r - 1.0);
            assert!((w - expect).abs() < 1e-14 * x, "cell {k}: {w} vs {expect}");
        }
    }

    #[test]
    fn geometric_degenerate_single_cell() {
        let p = geometric_partition(2.0, 2.0000001, 1, &TagRule::Left).unwrap();
        assert_eq!(p.points(), &[2.0, 2.0000001]);
    }

    #[test]
    fn geometric_rejects_bad_arguments() {
        for (p, q) in [(0.0, 1.0), (-1.0, 2.0), (3.0, 3.0), (4.0, 2.0)] {
            assert!(matches!(
                geometric_partition(p, q, 4, &TagRule::Left),
                Err(Error::InvalidArgument(_))
            ));
        }
    }

    #[test]
    fn riemann_sum_examples() {
        let p = uniform_partition(unit(), 7, &TagRule::Midpoint).unwrap();
        assert_eq!(riemann_sum(&|_t: f64| 1.0, &p).unwrap(), 1.0);

        let p = uniform_partition(unit(), 4, &TagRule::Left).unwrap();
        assert_eq!(riemann_sum(&|t: f64| t, &p).unwrap(), 0.375);

        let p = uniform_partition(unit(), 2, &TagRule::Midpoint).unwrap();
        assert_eq!(riemann_sum(&|t: f64| t * t, &p).unwrap(), 0.3125);
    }

    #[test]
    fn non_finite_sample_reports_tag() {
        let p = uniform_partition(Interval::new(-1.0, 1.0).unwrap(), 2, &TagRule::Right).unwrap();
        let err = riemann_sum(&|t: f64| 1.0 / t, &p).unwrap_err();
        assert!(
            matches!(err, Error::Evaluation { t, .. } if t == 0.0),
            "{err:?}"
        );
    }

    #[test]
    fn custom_tags_validated_at_construction() {
        let outside = TagRule::custom(|_lo, hi| hi + 1.0);
        assert!(uniform_partition(unit(), 3, &outside).is_err());
        let quarter = TagRule::custom(|lo, hi| lo + 0.25 * (hi - lo));
        let p = uniform_partition(unit(), 2, &quarter).unwrap();
        assert_eq!(p.tags(), &[0.125, 0.625]);
    }

    #[test]
    fn explicit_tags_checked() {
        assert!(TaggedPartition::with_tags(vec![0.0, 1.0, 2.0], vec![0.5, 1.5]).is_ok());
        assert!(TaggedPartition::with_tags(vec![0.0, 1.0, 2.0], vec![0.5, 2.5]).is_err());
        assert!(TaggedPartition::with_tags(vec![0.0, 1.0, 2.0], vec![0.5]).is_err());
        assert!(TaggedPartition::from_points(vec![0.0, 1.0, 1.0], &TagRule::Left).is_err());
    }

    #[test]
    fn streaming_sum_matches_materialised_partition() {
        let iv = Interval::new(-0.3, 2.9).unwrap();
        let f = |t: f64| t.sin() * t;
        for rule in [TagRule::Left, TagRule::Right, TagRule::Midpoint] {
            for n in [1, 3, 8, 100, 1001] {
                let p = uniform_partition(iv, n, &rule).unwrap();
                let a = riemann_sum(&f, &p).unwrap();
                let b = uniform_riemann_sum(&f, iv, n, &rule).unwrap();
                assert_eq!(a.to_bits(), b.to_bits(), "{rule:?} n={n}");
            }
        }
    }

    #[test]
    fn rule_names_parse() {
        assert_eq!("left".parse::<TagRule>().unwrap(), TagRule::Left);
        assert_eq!("Midpoint".parse::<TagRule>().unwrap(), TagRule::Midpoint);
        assert!("simpson".parse::<TagRule>().is_err());
    }
}
