use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use shiftlike_core::correspondence::{
    factor_map_gain, nu_from_weights, semiconjugacy_residual, weights_from_profile_over, weights_roundtrip_check,
};
use shiftlike_core::criteria::{
    dissipative_product_sequence, dissipative_supercyclicity_verdict, equivalence_identity_check,
    general_condition_search, invertible_simplified_products, shift_product_sequence, shift_supercyclicity_verdict,
    sufficient_condition_check, verdict_from_series, verify_witness, AggregateVerdict, CellSet, CriterionVerdict,
    SearchOptions, SufficientWitness, VerdictStatus, WitnessCheck, WitnessTriple, MIN_HORIZON, SCHEMA,
};
use shiftlike_core::numerics::least_squares_slope;
use shiftlike_core::system::{BoundedVerdict, DistortionReport};
use shiftlike_core::{Complex64, Error, MeasureProfile, StepFunction, SystemModel, WeightSequence};

use crate::common::{self, CliError, SystemSource};
use crate::CommonArgs;

/// Cells `|k| ≤` this (and `≤` the horizon) carry the quadrature cross-check;
/// beyond it the linear-domain quadrature would overflow.
const QUADRATURE_CHECK_SPAN: i64 = 60;
const DISTORTION_GRID: usize = 64;
/// Random step functions are supported on cells `|k| ≤` this.
const RANDOM_SUPPORT_SPAN: i64 = 10;

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Sub-cell refinement `r` (2^r parts per cell) of the random step functions.
    #[arg(long, default_value_t = 4)]
    pub refinement: u32,
    /// Number of random step functions for the semi-conjugacy check.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Also search for witnesses at this ε.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Cell range of B for the witness search, e.g. -3..=3.
    #[arg(long, default_value = "-3..=3", allow_hyphen_values = true, value_parser = common::parse_cell_range)]
    pub cells: (i64, i64),
    #[arg(long, default_value_t = 200)]
    pub k_max: u32,
    /// Write per-q product series as CSV files into this directory.
    #[arg(long)]
    pub series_dir: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub system_id: String,
    pub generated_at: Option<String>,
    pub sections: Sections,
    pub config_echo: ConfigEcho,
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub command: &'static str,
    pub system: SystemSource,
    pub p: f64,
    pub horizon: u32,
    pub q_max: u32,
    pub log_tol: f64,
    pub seed: u64,
    pub refinement: u32,
    pub samples: usize,
    pub epsilon: Option<f64>,
    pub cells: [i64; 2],
    pub k_max: u32,
    pub series_dir: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Sections {
    pub profile_summary: ProfileSummary,
    pub distortion: DistortionSection,
    pub weights: WeightsSummary,
    pub nu_roundtrip_error: NuRoundtrip,
    pub semiconjugacy_residuals: SemiconjugacySection,
    pub criterion_verdicts: VerdictSection,
    pub equivalence_discrepancy: EquivalenceSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<WitnessSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_series: Option<Vec<SeriesRef>>,
}

#[derive(Debug, Serialize)]
pub struct ProfileSummary {
    pub model: &'static str,
    pub k_min: i64,
    pub k_max: i64,
    pub log_mu_w: f64,
    /// Least-squares slope of `log μ(f^k(W))` over the last half of each tail.
    pub forward_log_slope: f64,
    pub backward_log_slope: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_cross_check: Option<QuadratureCheck>,
}

#[derive(Debug, Serialize)]
pub struct QuadratureCheck {
    pub k_min: i64,
    pub k_max: i64,
    pub max_abs_log_error: f64,
}

#[derive(Debug, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum DistortionSection {
    /// Profile systems are homogeneous within each cell, so `K = 1` exactly.
    Homogeneous { bound_estimate: f64, bounded_verdict: BoundedVerdict },
    Density {
        k_min: i64,
        k_max: i64,
        sample_grid_size: usize,
        #[serde(flatten)]
        report: DistortionReport,
    },
}

#[derive(Debug, Serialize)]
pub struct WeightsSummary {
    pub k_min: i64,
    pub k_max: i64,
    pub log_lower: f64,
    pub log_upper: f64,
}

#[derive(Debug, Serialize)]
pub struct NuRoundtrip {
    /// `max |log ŵ − log w|` after weights → ν → weights.
    pub weights_nu_weights: f64,
    /// `max |log ν(i) − log(m_i/m_0)|`.
    pub nu_vs_mass_ratio: f64,
    pub i_min: i64,
    pub i_max: i64,
}

#[derive(Debug, Serialize)]
pub struct SemiconjugacySection {
    pub samples: usize,
    pub refinement: u32,
    pub seed: u64,
    pub max_residual: f64,
    pub mean_residual: f64,
    /// Largest observed `‖Π φ‖ / ‖φ‖` among the samples.
    pub max_factor_gain: f64,
}

#[derive(Debug, Serialize)]
pub struct VerdictSection {
    pub schema: &'static str,
    pub shift: AggregateVerdict,
    pub dissipative: AggregateVerdict,
    /// The `q`-free form for invertible shifts.
    pub invertible_simplified: CriterionVerdict,
    pub shift_and_dissipative_agree: bool,
    pub aggregate: VerdictStatus,
}

#[derive(Debug, Serialize)]
pub struct EquivalenceSection {
    pub max_abs_log_discrepancy: f64,
    pub per_q: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct WitnessSection {
    pub schema: &'static str,
    pub epsilon: f64,
    pub cells: [i64; 2],
    pub k_max: u32,
    pub general: SearchOutcome<GeneralWitness>,
    pub sufficient: SearchOutcome<SufficientWitness>,
}

#[derive(Debug, Serialize)]
pub struct GeneralWitness {
    pub witness: WitnessTriple,
    pub verification: WitnessCheck,
}

#[derive(Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome<T> {
    Found {
        #[serde(flatten)]
        result: T,
    },
    NotFound { k_max: u32 },
}

#[derive(Debug, Serialize)]
pub struct SeriesRef {
    pub what: &'static str,
    pub q: i64,
    pub file: String,
}

pub fn run(common: &CommonArgs, args: &AnalyzeArgs) -> Result<(), CliError> {
    let report = build_report(common, args)?;
    common::write_output(common.out.as_ref(), &common::to_json(&report))
}

fn build_report(common: &CommonArgs, args: &AnalyzeArgs) -> Result<AnalysisReport, CliError> {
    common::check_p(common.p)?;
    if common.horizon < MIN_HORIZON {
        return Err(CliError::usage(format!("--horizon must be at least {MIN_HORIZON}")));
    }
    if let Some(eps) = args.epsilon {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(CliError::usage(format!("--epsilon must be positive, got {eps}")));
        }
    }
    let system = common::resolve_system(&common.system, common.p)?;
    let model = &system.model;
    let (p, h, q_max) = (common.p, common.horizon as i64, common.q_max as i64);

    let profile = model.profile(-h..=q_max + h)?;
    let weights = weights_from_profile_over(&profile, p, 1 - h..=q_max + h)?;

    let sections = Sections {
        profile_summary: profile_summary(model, &profile, h)?,
        distortion: distortion(model, h)?,
        weights: {
            let (log_lower, log_upper) = weights.bounds();
            WeightsSummary { k_min: weights.k_min(), k_max: weights.k_max(), log_lower, log_upper }
        },
        nu_roundtrip_error: nu_roundtrip(&weights, &profile, p)?,
        semiconjugacy_residuals: semiconjugacy(model, p, args.refinement, args.samples, common.seed, h)?,
        criterion_verdicts: verdicts(model, &weights, &profile, common)?,
        equivalence_discrepancy: {
            let per_q = (0..=q_max)
                .into_par_iter()
                .map(|q| equivalence_identity_check(&profile, p, q, common.horizon))
                .collect::<Result<Vec<_>, Error>>()?;
            EquivalenceSection { max_abs_log_discrepancy: per_q.iter().copied().fold(0.0, f64::max), per_q }
        },
        witnesses: args.epsilon.map(|eps| witnesses(model, p, eps, args)).transpose()?,
        product_series: args
            .series_dir
            .as_ref()
            .map(|dir| write_series(dir, &weights, &profile, common))
            .transpose()?,
    };
    Ok(AnalysisReport {
        system_id: system.id,
        generated_at: common::timestamp(common),
        sections,
        config_echo: ConfigEcho {
            command: "analyze",
            system: system.source,
            p,
            horizon: common.horizon,
            q_max: common.q_max,
            log_tol: common.log_tol,
            seed: common.seed,
            refinement: args.refinement,
            samples: args.samples,
            epsilon: args.epsilon,
            cells: [args.cells.0, args.cells.1],
            k_max: args.k_max,
            series_dir: args.series_dir.as_ref().map(|d| d.display().to_string()),
        },
    })
}

fn tail_slope(points: &[(i64, f64)]) -> f64 {
    let tail = &points[points.len() / 2..];
    let xs: Vec<f64> = tail.iter().map(|&(k, _)| k as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|&(_, v)| v).collect();
    least_squares_slope(&xs, &ys)
}

fn profile_summary(model: &SystemModel, profile: &MeasureProfile, h: i64) -> Result<ProfileSummary, CliError> {
    let forward: Vec<(i64, f64)> = profile.tabulated().filter(|&(k, _)| k >= 0).collect();
    let mut backward: Vec<(i64, f64)> = profile.tabulated().filter(|&(k, _)| k <= 0).map(|(k, v)| (-k, v)).collect();
    backward.reverse();
    let quadrature_cross_check = match model {
        SystemModel::Density(d) => {
            let span = h.min(QUADRATURE_CHECK_SPAN);
            let mut worst = 0.0f64;
            for k in -span..=span {
                let quad = d.quadrature_mass(k as f64, k as f64 + 1.0).value;
                worst = worst.max((quad.ln() - d.log_cell_mass(k)?).abs());
            }
            Some(QuadratureCheck { k_min: -span, k_max: span, max_abs_log_error: worst })
        }
        SystemModel::Profile(_) => None,
    };
    Ok(ProfileSummary {
        model: if model.is_homogeneous() { "profile" } else { "density" },
        k_min: profile.k_min(),
        k_max: profile.k_max(),
        log_mu_w: profile.log_mu_w(),
        forward_log_slope: tail_slope(&forward),
        // slope in n of log μ(f^{-n}(W))
        backward_log_slope: tail_slope(&backward),
        quadrature_cross_check,
    })
}

fn distortion(model: &SystemModel, h: i64) -> Result<DistortionSection, CliError> {
    Ok(match model {
        SystemModel::Density(d) => DistortionSection::Density {
            k_min: -h,
            k_max: h,
            sample_grid_size: DISTORTION_GRID,
            report: d.distortion_scan(-h..=h, DISTORTION_GRID)?,
        },
        SystemModel::Profile(_) => {
            DistortionSection::Homogeneous { bound_estimate: 1.0, bounded_verdict: BoundedVerdict::BoundedAtHorizon }
        }
    })
}

fn nu_roundtrip(weights: &WeightSequence, profile: &MeasureProfile, p: f64) -> Result<NuRoundtrip, CliError> {
    let (i_min, i_max) = (weights.k_min() - 1, weights.k_max());
    let weights_nu_weights = weights_roundtrip_check(weights, p, i_min..=i_max)?;
    let nu = nu_from_weights(weights, p, i_min..=i_max)?;
    let log_m0 = profile.log_mu_w();
    let mut nu_vs_mass_ratio = 0.0f64;
    for i in i_min..=i_max {
        nu_vs_mass_ratio = nu_vs_mass_ratio.max((nu.log_nu(i)? - (profile.log_mass(i)? - log_m0)).abs());
    }
    Ok(NuRoundtrip { weights_nu_weights, nu_vs_mass_ratio, i_min, i_max })
}

/// Step functions with a few random complex coefficients on cells `|k| ≤ span`.
pub fn random_step_functions(p: f64, refinement: u32, count: usize, seed: u64, span: i64) -> Result<Vec<StepFunction>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts = 1u32 << refinement;
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=8);
            let cells: Vec<_> = (0..n)
                .map(|_| {
                    let cell = (rng.gen_range(-span..=span), rng.gen_range(0..parts));
                    (cell, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                })
                .collect();
            StepFunction::from_cells(p, refinement, cells)
        })
        .collect()
}

fn semiconjugacy(
    model: &SystemModel,
    p: f64,
    refinement: u32,
    samples: usize,
    seed: u64,
    h: i64,
) -> Result<SemiconjugacySection, CliError> {
    if refinement > 12 {
        return Err(CliError::usage("--refinement must be at most 12"));
    }
    // keep the support, and its image under f^{±1}, inside the tabulated profile
    let span = RANDOM_SUPPORT_SPAN.min(h - 2);
    let phis = random_step_functions(p, refinement, samples, seed, span)?;
    let stats = phis
        .par_iter()
        .map(|phi| Ok((semiconjugacy_residual(phi, model)?, factor_map_gain(phi, model)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let max_residual = stats.iter().map(|s| s.0).fold(0.0, f64::max);
    let mean_residual = if stats.is_empty() { 0.0 } else { stats.iter().map(|s| s.0).sum::<f64>() / stats.len() as f64 };
    let max_factor_gain = stats.iter().filter_map(|s| s.1).fold(0.0, f64::max);
    Ok(SemiconjugacySection { samples, refinement, seed, max_residual, mean_residual, max_factor_gain })
}

fn verdicts(
    model: &SystemModel,
    weights: &WeightSequence,
    profile: &MeasureProfile,
    common: &CommonArgs,
) -> Result<VerdictSection, CliError> {
    let (h, tol) = (common.horizon, common.log_tol);
    let shift = shift_supercyclicity_verdict(weights, common.q_max, h, tol)?;
    let dissipative = dissipative_supercyclicity_verdict(profile, common.q_max, h, tol)?;
    // the q-free form reads w_{-h}, one cell below the shared profile
    let hi = h as i64;
    let wider = model.profile(-hi - 1..=hi)?;
    let simplified_weights = weights_from_profile_over(&wider, common.p, -hi..=hi)?;
    let simplified_series = invertible_simplified_products(&simplified_weights, h)?;
    let invertible_simplified = verdict_from_series(&simplified_series, 0, tol)?;
    let agree = shift.aggregate == dissipative.aggregate;
    let aggregate = if agree { shift.aggregate } else { VerdictStatus::Inconclusive };
    Ok(VerdictSection {
        schema: SCHEMA,
        shift,
        dissipative,
        invertible_simplified,
        shift_and_dissipative_agree: agree,
        aggregate,
    })
}

fn witnesses(model: &SystemModel, p: f64, epsilon: f64, args: &AnalyzeArgs) -> Result<WitnessSection, CliError> {
    let b = CellSet::whole_cells(args.cells.0..=args.cells.1, 0)?;
    let general = match general_condition_search(model, &b, epsilon, args.k_max, p, SearchOptions::default()) {
        Ok(witness) => {
            let verification = verify_witness(model, &b, &witness)?;
            SearchOutcome::Found { result: GeneralWitness { witness, verification } }
        }
        Err(Error::NotFound { k_max }) => SearchOutcome::NotFound { k_max },
        Err(e) => return Err(e.into()),
    };
    let n = args.cells.0.unsigned_abs().max(args.cells.1.unsigned_abs()) as u32;
    let sufficient = match sufficient_condition_check(model, epsilon, n, args.k_max, p) {
        Ok(result) => SearchOutcome::Found { result },
        Err(Error::NotFound { k_max }) => SearchOutcome::NotFound { k_max },
        Err(e) => return Err(e.into()),
    };
    Ok(WitnessSection { schema: SCHEMA, epsilon, cells: [args.cells.0, args.cells.1], k_max: args.k_max, general, sufficient })
}

fn write_series(
    dir: &PathBuf,
    weights: &WeightSequence,
    profile: &MeasureProfile,
    common: &CommonArgs,
) -> Result<Vec<SeriesRef>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))?;
    let mut refs = Vec::new();
    for q in 0..=common.q_max as i64 {
        for (what, series) in [
            ("shift-products", shift_product_sequence(weights, q, common.horizon)?),
            ("dissipative-products", dissipative_product_sequence(profile, q, common.horizon)?),
        ] {
            let file = format!("{what}-q{q}.csv");
            let csv = common::to_csv(series.into_iter().enumerate().map(|(i, v)| (i as i64 + 1, v)));
            common::write_output(Some(&dir.join(&file)), &csv)?;
            refs.push(SeriesRef { what, q, file });
        }
    }
    Ok(refs)
}
