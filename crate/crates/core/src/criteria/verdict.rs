//! Horizon-stamped three-valued verdicts for liminf-type criteria.
//!
//! A liminf cannot be decided from finitely many terms, so a verdict only
//! states what the first `horizon` terms show.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::products::{dissipative_product_sequence, shift_product_sequence};
use crate::error::{Error, Result};
use crate::numerics::least_squares_slope;
use crate::operator::WeightSequence;
use crate::system::MeasureProfile;

/// `log(1e-12)`.
pub const DEFAULT_LOG_TOL: f64 = -27.631_021_115_928_547;
pub const DEFAULT_Q_MAX: u32 = 8;
pub const DEFAULT_HORIZON: u32 = 1000;
/// Shortest sequence for which a tail slope is defined.
pub const MIN_HORIZON: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictStatus {
    SatisfiedAtHorizon,
    NotSatisfiedAtHorizon,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub status: VerdictStatus,
    pub log_inf_product: f64,
    pub argmin_n: u32,
    pub horizon: u32,
    pub q: i64,
    /// Least-squares slope of the log-product against `n` over the last half of the terms.
    pub decay_slope: f64,
    pub log_tol: f64,
}

/// Verdict for a log-product sequence whose index `i` holds term `n = i + 1`.
pub fn verdict_from_series(series: &[f64], q: i64, log_tol: f64) -> Result<CriterionVerdict> {
    if series.len() < MIN_HORIZON as usize {
        return Err(Error::invalid(format!("horizon {} is below the minimum {MIN_HORIZON}", series.len())));
    }
    if !log_tol.is_finite() {
        return Err(Error::invalid("log tolerance must be finite"));
    }
    if let Some(i) = series.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("log-product at n = {} is not finite", i + 1)));
    }
    let (argmin, &log_inf_product) = series
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty series");
    let tail_start = series.len() / 2;
    let xs: Vec<f64> = (tail_start + 1..=series.len()).map(|n| n as f64).collect();
    let decay_slope = least_squares_slope(&xs, &series[tail_start..]);
    let status = if log_inf_product <= log_tol {
        VerdictStatus::SatisfiedAtHorizon
    } else if decay_slope >= 0.0 {
        VerdictStatus::NotSatisfiedAtHorizon
    } else {
        VerdictStatus::Inconclusive
    };
    Ok(CriterionVerdict {
        status,
        log_inf_product,
        argmin_n: argmin as u32 + 1,
        horizon: series.len() as u32,
        q,
        decay_slope,
        log_tol,
    })
}

/// Per-`q` verdicts for `q = 0..=q_max` and their conjunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateVerdict {
    pub per_q: Vec<CriterionVerdict>,
    /// Satisfied iff every `q` is; not satisfied if some `q` is not; otherwise inconclusive.
    pub aggregate: VerdictStatus,
    pub horizon: u32,
    pub log_tol: f64,
}

impl AggregateVerdict {
    fn from_per_q(per_q: Vec<CriterionVerdict>, horizon: u32, log_tol: f64) -> Self {
        let aggregate = if per_q.iter().all(|v| v.status == VerdictStatus::SatisfiedAtHorizon) {
            VerdictStatus::SatisfiedAtHorizon
        } else if per_q.iter().any(|v| v.status == VerdictStatus::NotSatisfiedAtHorizon) {
            VerdictStatus::NotSatisfiedAtHorizon
        } else {
            VerdictStatus::Inconclusive
        };
        Self { per_q, aggregate, horizon, log_tol }
    }
}

/// Shift criterion: `liminf (w_1⋯w_{n+q})^{-1}(w_0⋯w_{q−n+1}) = 0` for every `q ≤ q_max`.
pub fn shift_supercyclicity_verdict(w: &WeightSequence, q_max: u32, horizon: u32, log_tol: f64) -> Result<AggregateVerdict> {
    let per_q = (0..=q_max as i64)
        .into_par_iter()
        .map(|q| verdict_from_series(&shift_product_sequence(w, q, horizon)?, q, log_tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(AggregateVerdict::from_per_q(per_q, horizon, log_tol))
}

/// Dissipative criterion: `liminf μ(f^{q−n}(W))·μ(f^{q+n}(W)) = 0` for every `q ≤ q_max`.
pub fn dissipative_supercyclicity_verdict(
    profile: &MeasureProfile,
    q_max: u32,
    horizon: u32,
    log_tol: f64,
) -> Result<AggregateVerdict> {
    let per_q = (0..=q_max as i64)
        .into_par_iter()
        .map(|q| verdict_from_series(&dissipative_product_sequence(profile, q, horizon)?, q, log_tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(AggregateVerdict::from_per_q(per_q, horizon, log_tol))
}
