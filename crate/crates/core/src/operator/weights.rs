use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tabulated weights `log w_k` of a bilateral backward shift, with the bounds
/// over the tabulated range. Finite bounds make the shift invertible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence {
    k_min: i64,
    log_weights: Vec<f64>,
    log_lower: f64,
    log_upper: f64,
}

impl WeightSequence {
    pub fn new(k_min: i64, log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.is_empty() {
            return Err(Error::invalid("weight sequence has no entries"));
        }
        if let Some(i) = log_weights.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("log-weight at k = {} is not finite", k_min + i as i64)));
        }
        let log_lower = log_weights.iter().copied().fold(f64::INFINITY, f64::min);
        let log_upper = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self { k_min, log_weights, log_lower, log_upper })
    }

    pub fn from_fn<F: FnMut(i64) -> f64>(range: RangeInclusive<i64>, f: F) -> Result<Self> {
        let k_min = *range.start();
        Self::new(k_min, range.map(f).collect())
    }

    /// `w_k = e^{log_w}` for every `k` in `range`.
    pub fn constant(range: RangeInclusive<i64>, log_w: f64) -> Result<Self> {
        Self::from_fn(range, |_| log_w)
    }

    pub fn k_range(&self) -> RangeInclusive<i64> {
        self.k_min..=self.k_max()
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.log_weights.len() as i64 - 1
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.log_lower, self.log_upper)
    }

    pub fn log_weight(&self, k: i64) -> Result<f64> {
        if k < self.k_min || k > self.k_max() {
            return Err(Error::WeightOutOfRange { index: k, lo: self.k_min, hi: self.k_max() });
        }
        Ok(self.log_weights[(k - self.k_min) as usize])
    }

    /// `Σ_{k=lo}^{hi} log w_k`; zero when `lo > hi`.
    pub fn log_product(&self, lo: i64, hi: i64) -> Result<f64> {
        if lo > hi {
            return Ok(0.0);
        }
        self.log_weight(lo)?;
        self.log_weight(hi)?;
        let a = (lo - self.k_min) as usize;
        let b = (hi - self.k_min) as usize;
        Ok(self.log_weights[a..=b].iter().copied().collect::<crate::numerics::KahanSum>().value())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.log_weights.iter().enumerate().map(move |(i, &v)| (self.k_min + i as i64, v))
    }
}
