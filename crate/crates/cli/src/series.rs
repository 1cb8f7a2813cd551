use clap::{Args, ValueEnum};
use shiftlike_core::correspondence::weights_from_profile_over;
use shiftlike_core::criteria::{dissipative_product_sequence, shift_product_sequence};
use shiftlike_core::SystemModel;

use crate::common::{self, CliError};
use crate::CommonArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesKind {
    /// `n ↦ log[(w_1⋯w_{n+q})^{-1}(w_0⋯w_{q−n+1})]`, `n = 1..=horizon`.
    ShiftProducts,
    /// `n ↦ log μ(f^{q+n}(W)) + log μ(f^{q−n}(W))`, `n = 1..=horizon`.
    DissipativeProducts,
    /// `k ↦ log(M_k/m_k)`, `k = −horizon..=horizon`.
    Distortion,
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    #[arg(long, value_enum)]
    pub what: SeriesKind,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub q: i64,
}

pub fn run(common: &CommonArgs, args: &SeriesArgs) -> Result<(), CliError> {
    common::check_p(common.p)?;
    let system = common::resolve_system(&common.system, common.p)?;
    let csv = common::to_csv(rows(&system.model, common, args)?);
    common::write_output(common.out.as_ref(), &csv)
}

fn rows(model: &SystemModel, common: &CommonArgs, args: &SeriesArgs) -> Result<Vec<(i64, f64)>, CliError> {
    let (h, q) = (common.horizon as i64, args.q);
    if h == 0 {
        return Ok(Vec::new());
    }
    let numbered = |series: Vec<f64>| series.into_iter().enumerate().map(|(i, v)| (i as i64 + 1, v)).collect();
    Ok(match args.what {
        SeriesKind::ShiftProducts => {
            let profile = model.profile((q - h).min(0)..=(q + h).max(0))?;
            let weights = weights_from_profile_over(&profile, common.p, (q - h + 1).min(1)..=(q + h).max(0))?;
            numbered(shift_product_sequence(&weights, q, common.horizon)?)
        }
        SeriesKind::DissipativeProducts => {
            let profile = model.profile((q - h).min(0)..=(q + h).max(0))?;
            numbered(dissipative_product_sequence(&profile, q, common.horizon)?)
        }
        SeriesKind::Distortion => match model {
            SystemModel::Density(d) => {
                d.distortion_scan(-h..=h, 64)?.records.iter().map(|r| (r.k, r.log_rho_sup - r.log_rho_inf)).collect()
            }
            // profile systems are homogeneous: ρ_k is constant on W
            SystemModel::Profile(_) => (-h..=h).map(|k| (k, 0.0)).collect(),
        },
    })
}
