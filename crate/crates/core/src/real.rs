//! Double-double reals.
//!
//! θ is carried as an unevaluated sum `hi + lo` so that phases e(θ·k) stay
//! accurate for monomial degrees in the tens of thousands and so that
//! α = qθ − p does not lose digits to cancellation for deep convergents.

use num_complex::Complex64;
use std::f64::consts::TAU;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Clone, Copy, Debug, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Real2 {
    pub hi: f64,
    pub lo: f64,
}

impl Real2 {
    pub const ZERO: Real2 = Real2 { hi: 0.0, lo: 0.0 };
    pub const ONE: Real2 = Real2 { hi: 1.0, lo: 0.0 };

    pub const fn new(x: f64) -> Self {
        Real2 { hi: x, lo: 0.0 }
    }

    pub fn from_int(k: i64) -> Self {
        let hi = k as f64;
        let lo = (k - hi as i64) as f64;
        Real2 { hi, lo }
    }

    /// Exact-as-possible p/q.
    pub fn ratio(p: i64, q: i64) -> Self {
        Real2::from_int(p).div(Real2::from_int(q))
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Real2) -> Real2 {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Real2 { hi, lo }
    }

    pub fn neg(self) -> Real2 {
        Real2 { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Real2) -> Real2 {
        self.add(o.neg())
    }

    pub fn mul(self, o: Real2) -> Real2 {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Real2 { hi, lo }
    }

    pub fn mul_int(self, k: i64) -> Real2 {
        self.mul(Real2::from_int(k))
    }

    pub fn div(self, o: Real2) -> Real2 {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Real2::new(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Real2::new(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Real2 { hi, lo }.add(Real2::new(q3))
    }

    pub fn sqrt(self) -> Real2 {
        if self.hi <= 0.0 {
            return Real2::ZERO;
        }
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = self.sub(Real2 { hi: p, lo: e });
        let corr = r.hi / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, corr);
        Real2 { hi, lo }
    }

    pub fn half(self) -> Real2 {
        Real2 { hi: self.hi * 0.5, lo: self.lo * 0.5 }
    }

    pub fn floor(self) -> Real2 {
        let f = self.hi.floor();
        if f == self.hi {
            Real2::new(f).add(Real2::new(self.lo.floor()))
        } else {
            Real2::new(f)
        }
    }

    /// Fractional part in [0, 1).
    pub fn fract(self) -> Real2 {
        let r = self.sub(self.floor());
        if r.to_f64() >= 1.0 {
            r.sub(Real2::ONE)
        } else if r.to_f64() < 0.0 {
            r.add(Real2::ONE)
        } else {
            r
        }
    }

    /// Representative of self mod 1 in [−½, ½], as an f64.
    pub fn centered_mod1(self) -> f64 {
        let r = self.hi - self.hi.round();
        let x = r + self.lo;
        x - x.round()
    }

    /// self·k mod 1, centred, for integer k with |k| < 2^53.
    #[inline]
    pub fn turns_times(self, k: i64) -> f64 {
        let kf = k as f64;
        let (p, e) = two_prod(self.hi, kf);
        let r = p - p.round();
        let x = r + (e + self.lo * kf);
        x - x.round()
    }

    /// e(self·k) = exp(2πi·self·k).
    #[inline]
    pub fn phase(self, k: i64) -> Complex64 {
        cis_turns(self.turns_times(k))
    }
}

/// exp(2πi·x).
#[inline]
pub fn cis_turns(x: f64) -> Complex64 {
    let (s, c) = (TAU * x).sin_cos();
    Complex64::new(c, s)
}

/// Distance between two reals modulo 1.
pub fn dist_mod1(a: Real2, b: Real2) -> f64 {
    a.sub(b).centered_mod1().abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_is_accurate_beyond_double() {
        let third = Real2::ratio(1, 3);
        let back = third.mul_int(3).sub(Real2::ONE);
        assert!(back.to_f64().abs() < 1e-30);
    }

    #[test]
    fn sqrt_of_five() {
        let s = Real2::from_int(5).sqrt();
        let err = s.mul(s).sub(Real2::from_int(5));
        assert!(err.to_f64().abs() < 1e-30);
    }

    #[test]
    fn phases_for_large_degrees() {
        // golden θ; compare e(θk) against a mod-1 reduction done in double-double
        let g = Real2::from_int(5).sqrt().sub(Real2::ONE).half();
        for &k in &[1i64, 97, 12345, 987_654_321] {
            let direct = g.mul_int(k).centered_mod1();
            assert!((g.turns_times(k) - direct).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn fract_range() {
        let x = Real2::new(-2.25);
        assert!((x.fract().to_f64() - 0.75).abs() < 1e-16);
        assert_eq!(Real2::new(3.0).fract().to_f64(), 0.0);
    }
}
