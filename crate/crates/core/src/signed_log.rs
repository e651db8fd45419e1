//! Sign/log-magnitude scalars.
//!
//! Normalizing constants and gamma values for moderate dimensions leave the
//! range of `f64` long before the densities themselves do, so every quantity
//! that flows through the permutation sums is carried as `(sign, ln|x|)`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A real number stored as a sign in `{-1, 0, +1}` and a natural-log magnitude.
///
/// The zero value is the only one with sign 0 and it always has
/// `logmag == -inf`.
#[derive(Clone, Copy, PartialEq)]
pub struct SignedLog {
    sign: i8,
    logmag: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        logmag: f64::NEG_INFINITY,
    };
    pub const ONE: SignedLog = SignedLog {
        sign: 1,
        logmag: 0.0,
    };

    /// Builds a value from its parts. A zero sign or a `-inf` magnitude
    /// collapses to [`SignedLog::ZERO`].
    pub fn from_parts(sign: i8, logmag: f64) -> Self {
        if sign == 0 || logmag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLog {
                sign: sign.signum(),
                logmag,
            }
        }
    }

    /// `e^logmag` with positive sign.
    pub fn exp(logmag: f64) -> Self {
        Self::from_parts(1, logmag)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x.is_nan() {
            SignedLog {
                sign: 1,
                logmag: f64::NAN,
            }
        } else {
            SignedLog {
                sign: if x > 0.0 { 1 } else { -1 },
                logmag: x.abs().ln(),
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.logmag.exp(),
        }
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn logmag(self) -> f64 {
        self.logmag
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn is_nan(self) -> bool {
        self.logmag.is_nan()
    }

    pub fn abs(self) -> Self {
        Self::from_parts(self.sign.abs(), self.logmag)
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        SignedLog {
            sign: self.sign,
            logmag: -self.logmag,
        }
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        if self.sign == 0 {
            return Self::ZERO;
        }
        let sign = if self.sign < 0 && n % 2 != 0 { -1 } else { 1 };
        SignedLog {
            sign,
            logmag: self.logmag * f64::from(n),
        }
    }

    /// Scales by `e^shift`.
    pub fn scale_exp(self, shift: f64) -> Self {
        Self::from_parts(self.sign, self.logmag + shift)
    }

    /// Relative distance `|a - b| / max(|a|, |b|)`, 0 when both are zero.
    pub fn rel_diff(self, other: Self) -> f64 {
        if self.is_zero() && other.is_zero() {
            return 0.0;
        }
        let scale = self.logmag.max(other.logmag);
        let a = self.scale_exp(-scale).to_f64();
        let b = other.scale_exp(-scale).to_f64();
        (a - b).abs()
    }
}

impl Default for SignedLog {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Debug for SignedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignedLog({:+}, {})", self.sign, self.logmag)
    }
}

impl fmt::Display for SignedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.logmag.abs() < 700.0 || self.sign == 0 {
            write!(f, "{}", self.to_f64())
        } else {
            let s = if self.sign < 0 { "-" } else { "" };
            write!(f, "{s}exp({})", self.logmag)
        }
    }
}

impl From<f64> for SignedLog {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for SignedLog {
    type Output = SignedLog;
    fn neg(self) -> SignedLog {
        SignedLog {
            sign: -self.sign,
            logmag: self.logmag,
        }
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;
    fn mul(self, rhs: SignedLog) -> SignedLog {
        if self.sign == 0 || rhs.sign == 0 {
            return SignedLog::ZERO;
        }
        SignedLog {
            sign: self.sign * rhs.sign,
            logmag: self.logmag + rhs.logmag,
        }
    }
}

impl Div for SignedLog {
    type Output = SignedLog;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: SignedLog) -> SignedLog {
        self * rhs.recip()
    }
}

impl Add for SignedLog {
    type Output = SignedLog;
    fn add(self, rhs: SignedLog) -> SignedLog {
        if rhs.sign == 0 {
            return self;
        }
        if self.sign == 0 {
            return rhs;
        }
        let (big, small) = match self.logmag.partial_cmp(&rhs.logmag) {
            Some(Ordering::Less) => (rhs, self),
            _ => (self, rhs),
        };
        let ratio = (small.logmag - big.logmag).exp();
        if big.sign == small.sign {
            SignedLog {
                sign: big.sign,
                logmag: big.logmag + ratio.ln_1p(),
            }
        } else if ratio >= 1.0 {
            SignedLog::ZERO
        } else {
            SignedLog {
                sign: big.sign,
                logmag: big.logmag + (-ratio).ln_1p(),
            }
        }
    }
}

impl Sub for SignedLog {
    type Output = SignedLog;
    fn sub(self, rhs: SignedLog) -> SignedLog {
        self + (-rhs)
    }
}

impl Sum for SignedLog {
    fn sum<I: Iterator<Item = SignedLog>>(iter: I) -> SignedLog {
        let terms: Vec<SignedLog> = iter.collect();
        compensated_sum(&terms)
    }
}

/// Sums signed-log terms by rescaling to the largest magnitude and running
/// Neumaier-compensated summation on the mantissas.
pub fn compensated_sum(terms: &[SignedLog]) -> SignedLog {
    let max = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.logmag)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return SignedLog::ZERO;
    }
    if max.is_nan() {
        return SignedLog::from_f64(f64::NAN);
    }
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for t in terms {
        let v = t.scale_exp(-max).to_f64();
        let s = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - s) + v;
        } else {
            comp += (v - s) + sum;
        }
        sum = s;
    }
    SignedLog::from_f64(sum + comp).scale_exp(max)
}

/// `ln n!` for small integer `n`, summed directly.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_invariant() {
        assert_eq!(SignedLog::from_f64(0.0), SignedLog::ZERO);
        assert_eq!(SignedLog::from_parts(1, f64::NEG_INFINITY).sign(), 0);
        assert_eq!(SignedLog::from_parts(0, 3.0).logmag(), f64::NEG_INFINITY);
        let x = SignedLog::from_f64(2.5);
        assert!((x - x).is_zero());
    }

    #[test]
    fn huge_products_do_not_overflow() {
        let big = SignedLog::exp(1000.0);
        let p = big * big * SignedLog::from_f64(-1.0);
        assert_eq!(p.sign(), -1);
        assert!((p.logmag() - 2000.0).abs() < 1e-12);
        let q = p / big;
        assert!((q.logmag() - 1000.0).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_cancels() {
        let terms = [1e16, 1.0, -1e16, 1.0].map(SignedLog::from_f64);
        // exact up to the rounding of the log-domain rescaling
        assert!((compensated_sum(&terms).to_f64() - 2.0).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn add_mul_match_f64(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let (sa, sb) = (SignedLog::from_f64(a), SignedLog::from_f64(b));
            let sum = (sa + sb).to_f64();
            prop_assert!((sum - (a + b)).abs() <= 1e-9 * (a.abs() + b.abs()).max(1e-300));
            let prod = (sa * sb).to_f64();
            prop_assert!((prod - a * b).abs() <= 1e-12 * (a * b).abs());
            prop_assert_eq!((sa * sb).sign(), ((a * b).signum() as i8) * i8::from(a * b != 0.0));
        }
    }
}
