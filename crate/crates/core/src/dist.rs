//! Probability vectors and real-valued functions on a common finite support.
//!
//! Supports are index-aligned: position `i` of a distribution, a function and
//! any second distribution all refer to the same atom. There is no label
//! matching here; that belongs to whatever layer reads files.

use crate::error::{Error, Result};
use crate::ext::{kahan_sum, ExtReal};
use serde::{Deserialize, Serialize};

const MASS_TOL: f64 = 1e-12;

/// A probability vector over support indices `0..n`.
///
/// Plays both the reference/prior role and the posterior role.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDistribution {
    weights: Vec<f64>,
}

impl FiniteDistribution {
    /// Validates nonnegativity and that the mass sums to one within 1e-12.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDistribution(format!("weight {w} is not a probability mass")));
        }
        let total = kahan_sum(weights.iter().copied());
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!("mass sums to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    /// Rescales arbitrary nonnegative weights to total mass one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDistribution(format!("weight {w} is not a valid mass")));
        }
        let total = kahan_sum(weights.iter().copied());
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("total mass is zero".into()));
        }
        let mut weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        // Push residual rounding into the largest cell so the sum is exact enough.
        let drift = 1.0 - kahan_sum(weights.iter().copied());
        let argmax = (0..weights.len())
            .max_by(|&a, &b| weights[a].total_cmp(&weights[b]))
            .unwrap();
        weights[argmax] += drift;
        Self::new(weights)
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1);
        let mut weights = vec![1.0 / n as f64; n];
        let drift = 1.0 - kahan_sum(weights.iter().copied());
        weights[0] += drift;
        Self { weights }
    }

    /// Point mass on `at`.
    pub fn dirac(n: usize, at: usize) -> Self {
        assert!(at < n);
        let mut weights = vec![0.0; n];
        weights[at] = 1.0;
        Self { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_full_support(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }

    /// `E[h]` under this distribution (compensated sum).
    pub fn expect(&self, h: &MeasurableFunction) -> f64 {
        debug_assert_eq!(self.len(), h.len());
        kahan_sum(self.weights.iter().zip(h.values()).map(|(w, v)| w * v))
    }

    /// `E[term(i)]` where terms may be infinite; zero-mass cells contribute
    /// nothing regardless of the term value.
    pub fn expect_ext(&self, term: impl Fn(usize) -> ExtReal) -> ExtReal {
        let mut finite = Vec::with_capacity(self.len());
        let mut pos_inf = false;
        let mut neg_inf = false;
        for (i, &w) in self.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let t = term(i);
            if t.is_pos_inf() {
                pos_inf = true;
            } else if t.is_neg_inf() {
                neg_inf = true;
            } else {
                finite.push(w * t.raw());
            }
        }
        assert!(
            !(pos_inf && neg_inf),
            "expectation mixes +inf and -inf terms"
        );
        if pos_inf {
            ExtReal::INF
        } else if neg_inf {
            ExtReal::NEG_INF
        } else {
            ExtReal::finite(kahan_sum(finite))
        }
    }

    pub fn require_same_support(&self, other: &FiniteDistribution) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::SupportMismatch { left: self.len(), right: other.len() });
        }
        Ok(())
    }
}

/// A real-valued function on the same finite support, stored as its value table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurableFunction {
    values: Vec<f64>,
}

impl MeasurableFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty function table".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("function value {v} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self { values: vec![value; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `h + a` pointwise.
    pub fn shifted(&self, a: f64) -> Self {
        Self { values: self.values.iter().map(|v| v + a).collect() }
    }

    /// `s · (h − c)` pointwise.
    pub fn scaled_shifted(&self, s: f64, c: f64) -> Self {
        Self { values: self.values.iter().map(|v| s * (v - c)).collect() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn require_support(&self, dist: &FiniteDistribution) -> Result<()> {
        if self.len() != dist.len() {
            return Err(Error::SupportMismatch { left: self.len(), right: dist.len() });
        }
        Ok(())
    }
}
