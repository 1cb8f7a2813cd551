use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Behaviour of [`MeasureProfile::log_mass`] outside the tabulated range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtensionRule {
    Reject,
    /// Continue the log-slope between the last two tabulated entries of the nearer tail.
    #[serde(rename = "geometric")]
    GeometricExtrapolate,
}

/// The bilateral sequence `k ↦ log μ(f^k(W))` over a contiguous range containing 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureProfile {
    k_min: i64,
    log_mass: Vec<f64>,
    extension: ExtensionRule,
}

impl MeasureProfile {
    pub fn new(k_min: i64, log_mass: Vec<f64>, extension: ExtensionRule) -> Result<Self> {
        if log_mass.is_empty() {
            return Err(Error::invalid("measure profile has no entries"));
        }
        let k_max = k_min + log_mass.len() as i64 - 1;
        if k_min > 0 || k_max < 0 {
            return Err(Error::invalid(format!("profile range {k_min}..={k_max} must contain 0")));
        }
        if let Some((i, v)) = log_mass.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!("log-mass at k = {} is {v}", k_min + i as i64)));
        }
        if extension == ExtensionRule::GeometricExtrapolate && log_mass.len() < 2 {
            return Err(Error::invalid("geometric extension needs at least two tabulated entries"));
        }
        Ok(Self { k_min, log_mass, extension })
    }

    pub fn from_fn<F>(range: RangeInclusive<i64>, extension: ExtensionRule, f: F) -> Result<Self>
    where
        F: FnMut(i64) -> f64,
    {
        let k_min = *range.start();
        Self::new(k_min, range.map(f).collect(), extension)
    }

    pub fn k_range(&self) -> RangeInclusive<i64> {
        self.k_min..=self.k_max()
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.log_mass.len() as i64 - 1
    }

    pub fn extension(&self) -> ExtensionRule {
        self.extension
    }

    pub fn with_extension(mut self, extension: ExtensionRule) -> Result<Self> {
        if extension == ExtensionRule::GeometricExtrapolate && self.log_mass.len() < 2 {
            return Err(Error::invalid("geometric extension needs at least two tabulated entries"));
        }
        self.extension = extension;
        Ok(self)
    }

    /// Tabulated `(k, log μ(f^k(W)))` pairs in ascending `k`.
    pub fn tabulated(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.log_mass.iter().enumerate().map(move |(i, &v)| (self.k_min + i as i64, v))
    }

    /// `log μ(W)`.
    pub fn log_mu_w(&self) -> f64 {
        self.log_mass[(-self.k_min) as usize]
    }

    /// `log μ(f^k(W))`, extrapolated according to the extension rule.
    pub fn log_mass(&self, k: i64) -> Result<f64> {
        let k_max = self.k_max();
        if (self.k_min..=k_max).contains(&k) {
            return Ok(self.log_mass[(k - self.k_min) as usize]);
        }
        match self.extension {
            ExtensionRule::Reject => Err(Error::OutOfRange { index: k, lo: self.k_min, hi: k_max }),
            ExtensionRule::GeometricExtrapolate => {
                let n = self.log_mass.len();
                if k > k_max {
                    let slope = self.log_mass[n - 1] - self.log_mass[n - 2];
                    Ok(self.log_mass[n - 1] + slope * (k - k_max) as f64)
                } else {
                    let slope = self.log_mass[1] - self.log_mass[0];
                    Ok(self.log_mass[0] - slope * (self.k_min - k) as f64)
                }
            }
        }
    }

    /// A tabulated copy over `range` (which must contain 0) with `Reject` extension.
    pub fn retabulate(&self, range: RangeInclusive<i64>) -> Result<Self> {
        let k_min = *range.start();
        let values = range.map(|k| self.log_mass(k)).collect::<Result<Vec<_>>>()?;
        Self::new(k_min, values, ExtensionRule::Reject)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_tables() {
        assert!(MeasureProfile::new(1, vec![0.0], ExtensionRule::Reject).is_err());
        assert!(MeasureProfile::new(-1, vec![0.0, f64::NAN], ExtensionRule::Reject).is_err());
        assert!(MeasureProfile::new(0, vec![], ExtensionRule::Reject).is_err());
        assert!(MeasureProfile::new(0, vec![0.0], ExtensionRule::GeometricExtrapolate).is_err());
    }

    #[test]
    fn lookup_and_reject() {
        let p = MeasureProfile::new(-2, vec![0.5, 1.0, 2.0, 4.0], ExtensionRule::Reject).unwrap();
        assert_eq!(p.log_mass(1).unwrap(), 4.0);
        assert_eq!(p.log_mu_w(), 2.0);
        assert_eq!(p.log_mass(2), Err(Error::OutOfRange { index: 2, lo: -2, hi: 1 }));
    }

    #[test]
    fn geometric_tail() {
        // slope -1 on the upper tail ending at k = 10
        let p = MeasureProfile::from_fn(0..=10, ExtensionRule::GeometricExtrapolate, |k| 3.0 - k as f64).unwrap();
        let at10 = p.log_mass(10).unwrap();
        assert_eq!(p.log_mass(12).unwrap(), at10 - 2.0);
        // lower tail: slope between k = 0 and k = 1 is also -1
        assert_eq!(p.log_mass(-3).unwrap(), 6.0);
    }

    #[test]
    fn retabulate_extends() {
        let p = MeasureProfile::new(-1, vec![0.0, 0.0, -1.0], ExtensionRule::GeometricExtrapolate).unwrap();
        let t = p.retabulate(-4..=4).unwrap();
        assert_eq!(t.k_range(), -4..=4);
        assert_eq!(t.log_mass(4).unwrap(), -4.0);
        assert_eq!(t.log_mass(-4).unwrap(), 0.0);
        assert_eq!(t.extension(), ExtensionRule::Reject);
    }
}
