//! Double-double arithmetic: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
//!
//! Error-free transformations follow Dekker and Knuth; products split operands
//! instead of relying on a fused multiply-add, which is a slow libm call on
//! targets without hardware FMA.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Relative error of one `Dd` operation, as a multiple of `u^2`.
pub(crate) const OP_REL_ERR_U2: f64 = 16.0;

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn split(a: f64) -> (f64, f64) {
    let c = 134_217_729.0 * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn norm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Self::norm(s, e + f)
    }

    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        Self::norm(s, e + self.lo)
    }

    pub fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        Self::norm(p, e + self.lo * b)
    }

    /// `sqrt(1 + s) - 1` evaluated as `s / (sqrt(1 + s) + 1)`, for `s > -1`.
    pub fn root_step(self) -> Self {
        let (a, b) = two_sum(1.0, self.hi);
        let b = b + self.lo;
        let r = a.sqrt();
        let (p, e) = two_prod(r, r);
        let r_lo = (((a - p) - e) + b) / (2.0 * r);
        let (c, f) = two_sum(r, 1.0);
        let f = f + r_lo;
        let q1 = self.hi / c;
        let (p, e) = two_prod(q1, c);
        let rem = (((self.hi - p) - e) + self.lo) - q1 * f;
        Self::norm(q1, rem / c)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const U2: f64 = (f64::EPSILON / 2.0) * (f64::EPSILON / 2.0);

    #[test]
    fn products_are_error_free() {
        let (p, e) = two_prod(0.1, 0.3);
        let a = 0.1f64;
        let b = 0.3f64;
        assert_eq!(p, a * b);
        assert!(e != 0.0 && e.abs() <= p.abs() * f64::EPSILON);
    }

    #[test]
    fn root_step_squares_back() {
        for x in [1e-9, 0.3, 1.0, 7.5] {
            let t = Dd::new(x).root_step();
            // t (2 + t) = 2t + hi^2 + 2 hi lo, dropping lo^2
            let back = t
                .mul_f64(2.0)
                .add(Dd::new(t.hi).mul_f64(t.hi))
                .add_f64(2.0 * t.hi * t.lo);
            assert!(
                back.sub(Dd::new(x)).to_f64().abs() <= OP_REL_ERR_U2 * U2 * x,
                "{x}"
            );
        }
    }
}
