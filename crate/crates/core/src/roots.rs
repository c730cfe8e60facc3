//! n-th roots built from square roots and integer powers only.

/// Returns `x^(1/n) - 1` for `x > 0`.
///
/// When `n` is a power of two the root is taken by repeated square roots,
/// carried on `s = r - 1` through `sqrt(1 + s) - 1 = s / (sqrt(1 + s) + 1)`
/// so that no cancellation occurs as the root approaches 1. Each halving
/// contributes at most [`ROOT_STEP_REL_ERR`] relative error to `s`.
pub fn root_minus_one(x: f64, n: u64) -> f64 {
    debug_assert!(x > 0.0 && n >= 1);
    if n.is_power_of_two() {
        let mut s = x - 1.0;
        for _ in 0..n.trailing_zeros() {
            s /= (1.0 + s).sqrt() + 1.0;
        }
        s
    } else {
        nth_root(x, n) - 1.0
    }
}

/// Relative error contributed to `s` by one halving step of [`root_minus_one`],
/// in units of the unit roundoff.
pub const ROOT_STEP_REL_ERR: f64 = 3.0 * f64::EPSILON / 2.0;

/// `x^(1/n)` for `x > 0`.
///
/// Powers of two use repeated square roots. Other `n` bisect over the bit
/// patterns of positive doubles (monotone in value) against `r.powi(n)`, so
/// the search finishes in at most 64 steps.
pub fn nth_root(x: f64, n: u64) -> f64 {
    debug_assert!(x > 0.0 && n >= 1);
    if n == 1 || x == 1.0 {
        return x;
    }
    if n.is_power_of_two() {
        let mut r = x;
        for _ in 0..n.trailing_zeros() {
            r = r.sqrt();
        }
        return r;
    }
    let exp = i32::try_from(n).unwrap_or(i32::MAX);
    let (mut lo, mut hi) = if x > 1.0 { (1.0f64, x) } else { (x, 1.0f64) };
    let (mut lo_bits, mut hi_bits) = (lo.to_bits(), hi.to_bits());
    while hi_bits - lo_bits > 1 {
        let mid_bits = lo_bits + (hi_bits - lo_bits) / 2;
        let mid = f64::from_bits(mid_bits);
        if mid.powi(exp) < x {
            lo_bits = mid_bits;
            lo = mid;
        } else {
            hi_bits = mid_bits;
            hi = mid;
        }
    }
    if (x - lo.powi(exp)).abs() <= (hi.powi(exp) - x).abs() {
        lo
    } else {
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_of_two_roots_are_exact_on_perfect_powers() {
        assert_eq!(nth_root(16.0, 4), 2.0);
        assert_eq!(root_minus_one(16.0, 4), 1.0);
        assert_eq!(root_minus_one(256.0, 8), 1.0);
    }

    #[test]
    fn general_roots() {
        assert_eq!(nth_root(27.0, 3), 3.0);
        assert!((nth_root(2.0, 5).powi(5) - 2.0).abs() < 1e-15);
        assert!((nth_root(0.3, 7).powi(7) - 0.3).abs() < 1e-15);
        assert!((nth_root(1e300, 3) - 1e100).abs() / 1e100 < 1e-15);
    }

    #[test]
    fn root_minus_one_keeps_relative_precision_near_one() {
        // (1 + 2^-30)^(1/2^20) - 1 ~ 2^-50; naive sqrt chains lose it all.
        let x = 1.0 + 2f64.powi(-30);
        let s = root_minus_one(x, 1 << 20);
        let expect = 2f64.powi(-50);
        assert!(((s - expect) / expect).abs() < 1e-8, "{s:e}");
    }

    #[test]
    fn below_one_gives_negative_offset() {
        let s = root_minus_one(0.25, 2);
        assert_eq!(s, -0.5);
    }
}
