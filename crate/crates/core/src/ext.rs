//! Extended real values: finite | +∞ | −∞.
//!
//! Divergences and conjugates legitimately take the value +∞ (a posterior
//! that is not absolutely continuous, an argument past the conjugate's
//! domain threshold), so infinity is a first-class value here rather than
//! an error. Arithmetic follows the measure-theoretic conventions:
//!
//! - `0 · (±∞) = 0` (weighted sums skip zero-mass cells),
//! - `x + ∞ = ∞` for finite `x`,
//! - `∞ − ∞` is a programming error and panics.
//!
//! NaN is banned at construction; every operation preserves that.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// A real number extended with the two infinities. Never NaN.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const INF: ExtReal = ExtReal(f64::INFINITY);
    pub const NEG_INF: ExtReal = ExtReal(f64::NEG_INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    /// Wraps a finite value. Panics on NaN or infinity.
    pub fn finite(x: f64) -> ExtReal {
        assert!(x.is_finite(), "ExtReal::finite called with {x}");
        ExtReal(x)
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_pos_inf(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_neg_inf(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// The underlying float: finite, `f64::INFINITY` or `f64::NEG_INFINITY`.
    pub fn raw(self) -> f64 {
        self.0
    }

    /// The finite value, or None for either infinity.
    pub fn finite_value(self) -> Option<f64> {
        self.0.is_finite().then_some(self.0)
    }

    /// Unwraps a value the caller knows is finite.
    pub fn expect_finite(self, what: &str) -> f64 {
        assert!(self.0.is_finite(), "{what} is not finite: {self}");
        self.0
    }

    /// `w · x` with the convention `0 · (±∞) = 0`.
    pub fn weighted(self, w: f64) -> ExtReal {
        assert!(!w.is_nan(), "weight is NaN");
        if w == 0.0 {
            ExtReal::ZERO
        } else {
            ExtReal::from(w * self.0)
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        assert!(!x.is_nan(), "ExtReal cannot hold NaN");
        ExtReal(x)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        let s = self.0 + rhs.0;
        assert!(!s.is_nan(), "ExtReal addition of opposite infinities: {self} + {rhs}");
        ExtReal(s)
    }
}

impl Sub for ExtReal {
    type Output = ExtReal;
    fn sub(self, rhs: ExtReal) -> ExtReal {
        let s = self.0 - rhs.0;
        assert!(!s.is_nan(), "ExtReal subtraction of like infinities: {self} - {rhs}");
        ExtReal(s)
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal(-self.0)
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: f64) -> ExtReal {
        self + ExtReal::from(rhs)
    }
}

impl Sub<f64> for ExtReal {
    type Output = ExtReal;
    fn sub(self, rhs: f64) -> ExtReal {
        self - ExtReal::from(rhs)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            write!(f, "inf")
        } else if self.0 == f64::NEG_INFINITY {
            write!(f, "-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else if self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

/// Neumaier-compensated sum; tighter than naive accumulation at long lengths.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
