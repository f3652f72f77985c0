use std::cmp::Ordering;
use std::ops::{Div, Mul, Neg};

use serde::{Deserialize, Serialize};

/// A real number stored as `sign * exp(log_abs)`.
///
/// `sign == 0` marks an exact zero, in which case `log_abs` is `-inf` and is
/// otherwise ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogScaleReal {
    pub sign: i8,
    pub log_abs: f64,
}

impl LogScaleReal {
    pub const ZERO: Self = Self { sign: 0, log_abs: f64::NEG_INFINITY };
    pub const ONE: Self = Self { sign: 1, log_abs: 0.0 };

    pub fn new(sign: i8, log_abs: f64) -> Self {
        if sign == 0 || log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { sign: sign.signum(), log_abs }
        }
    }

    /// `exp(log_abs)` with positive sign.
    pub fn from_ln(log_abs: f64) -> Self {
        Self::new(1, log_abs)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self { sign: if x > 0.0 { 1 } else { -1 }, log_abs: x.abs().ln() }
        }
    }

    /// Converts back; saturates to `0` or `inf` outside the double range.
    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_abs.exp()
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        if self.sign == 0 {
            self
        } else {
            Self { sign: 1, log_abs: self.log_abs }
        }
    }

    /// Natural log of the magnitude (`-inf` for zero).
    pub fn ln_abs(self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.log_abs
        }
    }

    pub fn powf(self, p: f64) -> Self {
        assert!(self.sign >= 0, "real power of a negative log-scale value");
        if self.sign == 0 {
            return if p > 0.0 { Self::ZERO } else { Self::new(1, f64::INFINITY) };
        }
        Self::from_ln(self.log_abs * p)
    }

    /// Signed addition by factoring out the larger magnitude.
    pub fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_abs >= other.log_abs { (self, other) } else { (other, self) };
        let r = (small.log_abs - big.log_abs).exp();
        let factor = if big.sign == small.sign { 1.0 + r } else { 1.0 - r };
        if factor == 0.0 {
            return Self::ZERO;
        }
        Self::new(big.sign, big.log_abs + factor.ln())
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(-other)
    }

    /// Magnitude comparison ignoring sign.
    pub fn cmp_abs(self, other: Self) -> Ordering {
        self.ln_abs().partial_cmp(&other.ln_abs()).unwrap_or(Ordering::Equal)
    }

    /// Sums a slice by shifting all terms by the largest magnitude.
    pub fn sum(terms: &[Self]) -> Self {
        let max = terms.iter().map(|t| t.ln_abs()).fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        if max == f64::INFINITY {
            return Self::new(1, f64::INFINITY);
        }
        let scaled: Vec<f64> = terms
            .iter()
            .filter(|t| t.sign != 0)
            .map(|t| f64::from(t.sign) * (t.log_abs - max).exp())
            .collect();
        let s = super::pairwise_sum(&scaled);
        if s == 0.0 {
            Self::ZERO
        } else {
            Self::new(if s > 0.0 { 1 } else { -1 }, max + s.abs().ln())
        }
    }
}

impl Mul for LogScaleReal {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        Self { sign: self.sign * rhs.sign, log_abs: self.log_abs + rhs.log_abs }
    }
}

impl Div for LogScaleReal {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.sign != 0, "division by log-scale zero");
        if self.sign == 0 {
            return Self::ZERO;
        }
        Self { sign: self.sign * rhs.sign, log_abs: self.log_abs - rhs.log_abs }
    }
}

impl Neg for LogScaleReal {
    type Output = Self;
    fn neg(self) -> Self {
        Self { sign: -self.sign, log_abs: self.log_abs }
    }
}

impl From<f64> for LogScaleReal {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_and_sign() {
        assert_eq!(LogScaleReal::from_f64(0.0).sign, 0);
        assert_eq!(LogScaleReal::from_f64(-3.0).sign, -1);
        assert!((LogScaleReal::from_f64(-3.0).to_f64() + 3.0).abs() < 1e-15);
        assert_eq!((LogScaleReal::from_f64(2.0) * LogScaleReal::ZERO).sign, 0);
    }

    #[test]
    fn huge_powers_do_not_overflow() {
        let y = LogScaleReal::from_f64(50.0);
        let p = y.powf(1.0e4);
        assert!(p.log_abs.is_finite());
        let q = p / y.powf(1.0e4 - 1.0);
        assert!((q.to_f64() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn signed_addition() {
        let a = LogScaleReal::from_f64(5.0);
        let b = LogScaleReal::from_f64(-3.0);
        assert!((a.add(b).to_f64() - 2.0).abs() < 1e-15);
        assert!((b.add(a).to_f64() - 2.0).abs() < 1e-15);
        assert_eq!(a.add(-a).sign, 0);
        let s = LogScaleReal::sum(&[a, b, LogScaleReal::from_f64(0.5)]);
        assert!((s.to_f64() - 2.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn round_trip_positive(x in 1e-300f64..1e300) {
            let back = LogScaleReal::from_f64(x).to_f64();
            // exp(ln x) loses at most a few ulps scaled by |ln x|.
            prop_assert!((back - x).abs() <= x * 1e-15 * (1.0 + x.ln().abs()));
        }

        #[test]
        fn multiplication_adds_logs(a in 1e-100f64..1e100, b in 1e-100f64..1e100) {
            let p = LogScaleReal::from_f64(a) * LogScaleReal::from_f64(b);
            prop_assert!((p.to_f64() - a * b).abs() <= (a * b) * 1e-12);
        }
    }
}
