//! Extrema of the Radon-Nikodym ratios `ρ_k(x) = h(x+k)/h(x)` over `W`.
//!
//! On every sub-interval of `W` where both `h(x)` and `h(x+k)` stay inside one
//! exponential piece, `log ρ_k` is affine in `x`, so its extrema over `W` are
//! attained at the sub-interval endpoints (as one-sided limits). Grid samples
//! are evaluated as well; they can only confirm those extrema.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::DensityLineSystem;
use crate::error::{Error, Result};

/// Fraction of the scan used as the stabilisation prefix.
pub const STABILIZATION_PREFIX: f64 = 0.5;
/// Relative growth across the scan needed to call the ratios an upward trend.
pub const TREND_REL_GROWTH: f64 = 0.01;
const MAX_EQUALITY_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionRecord {
    pub k: i64,
    pub log_rho_inf: f64,
    pub log_rho_sup: f64,
    /// `ess sup ρ_k / ess inf ρ_k` over `W`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundedVerdict {
    BoundedAtHorizon,
    UnboundedTrend,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub records: Vec<DistortionRecord>,
    pub bound_estimate: f64,
    pub bounded_verdict: BoundedVerdict,
}

impl DensityLineSystem {
    /// Per-`k` essential extrema of `ρ_k` over `W`, scanned over `k_range`.
    pub fn distortion_scan(&self, k_range: RangeInclusive<i64>, sample_grid_size: usize) -> Result<DistortionReport> {
        if sample_grid_size == 0 {
            return Err(Error::invalid("sample grid size must be positive"));
        }
        let ks: Vec<i64> = k_range.collect();
        if ks.is_empty() {
            return Err(Error::invalid("empty distortion scan range"));
        }
        let records = ks
            .par_iter()
            .map(|&k| self.distortion_at(k, sample_grid_size))
            .collect::<Result<Vec<_>>>()?;
        let ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
        let bound_estimate = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(DistortionReport { bounded_verdict: classify(&ratios), bound_estimate, records })
    }

    fn distortion_at(&self, k: i64, grid: usize) -> Result<DistortionRecord> {
        let h = self.density();
        let shift = k as f64;
        let mut cuts = vec![0.0, 1.0];
        for b in h.breakpoints() {
            for x in [b, b - shift] {
                if x > 0.0 && x < 1.0 {
                    cuts.push(x);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut push = |v: f64| {
            lo = lo.min(v);
            hi = hi.max(v);
        };
        for w in cuts.windows(2) {
            let (s, t) = (w[0], w[1]);
            let mid = 0.5 * (s + t);
            for x in [s, t] {
                let base = h.log_piece_value(mid, x).ok_or(Error::ZeroDensity { shift: 0 })?;
                let moved = h.log_piece_value(mid + shift, x + shift).ok_or(Error::ZeroDensity { shift: k })?;
                push(moved - base);
            }
        }
        for i in 0..grid {
            let x = i as f64 / grid as f64;
            let (base, moved) = (h.value(x), h.value(x + shift));
            if base <= 0.0 {
                return Err(Error::ZeroDensity { shift: 0 });
            }
            if moved <= 0.0 {
                return Err(Error::ZeroDensity { shift: k });
            }
            push(moved.ln() - base.ln());
        }
        Ok(DistortionRecord { k, log_rho_inf: lo, log_rho_sup: hi, ratio: (hi - lo).exp() })
    }
}

fn classify(ratios: &[f64]) -> BoundedVerdict {
    let max_all = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let prefix_len = ((ratios.len() as f64 * STABILIZATION_PREFIX).floor() as usize).max(1);
    let max_prefix = ratios[..prefix_len].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if (max_all - max_prefix).abs() <= MAX_EQUALITY_REL * max_all {
        return BoundedVerdict::BoundedAtHorizon;
    }
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let first = ratios[0];
    let last = ratios[ratios.len() - 1];
    if increasing && last > first * (1.0 + TREND_REL_GROWTH) {
        BoundedVerdict::UnboundedTrend
    } else {
        BoundedVerdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::density::{ExpPiece, PiecewiseExpDensity, QuadratureConfig};
    use std::f64::consts::E;

    fn sys(pieces: Vec<ExpPiece>) -> DensityLineSystem {
        DensityLineSystem::new(PiecewiseExpDensity::new(pieces).unwrap(), QuadratureConfig::default()).unwrap()
    }

    #[test]
    fn two_rate_ratios() {
        let s = DensityLineSystem::two_rate_example();
        let rep = s.distortion_scan(-2..=3, 16).unwrap();
        let at = |k: i64| rep.records.iter().find(|r| r.k == k).unwrap().ratio;
        assert!((at(3) - 1.0).abs() < 1e-12);
        assert!((at(-2) - E).abs() < 1e-12);
        assert!((at(0) - 1.0).abs() < 1e-12);
        assert!((at(-1) - E).abs() < 1e-12);
        assert_eq!(rep.bounded_verdict, BoundedVerdict::BoundedAtHorizon);
        assert!((rep.bound_estimate - E).abs() < 1e-12);
    }

    #[test]
    fn constant_density_ratio_one() {
        let s = sys(vec![ExpPiece::new(f64::NEG_INFINITY, f64::INFINITY, 2.0, 0.0)]);
        let rep = s.distortion_scan(-5..=5, 8).unwrap();
        assert!(rep.records.iter().all(|r| r.ratio == 1.0));
    }

    #[test]
    fn misaligned_kinks_give_growing_ratios() {
        // log h has slope i on [i - 0.5, i + 0.5): ratio over W grows like e^{k}
        let mut pieces = Vec::new();
        let mut log_c = 0.0f64;
        for i in -2..40 {
            let from = i as f64 - 0.5;
            let a = i as f64;
            // continuity at `from`: previous piece slope i-1
            if i > -2 {
                log_c += -(a - (a - 1.0)) * from;
            }
            pieces.push(ExpPiece::new(from, from + 1.0, log_c.exp(), a));
        }
        let s = sys(pieces);
        let rep = s.distortion_scan(1..=20, 4).unwrap();
        assert_eq!(rep.bounded_verdict, BoundedVerdict::UnboundedTrend);
    }

    #[test]
    fn vanishing_density_detected() {
        let s = sys(vec![ExpPiece::new(-1.0, 2.0, 1.0, 0.0)]);
        assert_eq!(s.distortion_scan(0..=3, 4).unwrap_err(), Error::ZeroDensity { shift: 2 });
        assert!(s.distortion_scan(0..=1, 4).is_ok());
    }

    #[test]
    fn flat_ratios_bounded() {
        assert_eq!(classify(&[1.0, 2.0, 2.0, 2.0]), BoundedVerdict::BoundedAtHorizon);
        assert_eq!(classify(&[1.0, 1.001, 1.002, 1.003]), BoundedVerdict::Inconclusive);
        assert_eq!(classify(&[1.0, 1.5, 1.2, 3.0]), BoundedVerdict::Inconclusive);
    }
}
