use clap::{Args, ValueEnum};
use serde::Serialize;
use shiftlike_core::criteria::{
    build_transitivity_witness, general_condition_search, sufficient_condition_check, verify_witness, CellSet,
    SearchOptions, SufficientWitness, TransitivityWitness, WitnessCheck, WitnessTriple, SCHEMA,
};
use shiftlike_core::{Complex64, StepFunction};

use crate::common::{self, CliError, SystemSource};
use crate::CommonArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessMode {
    /// Greedy search for `(B', k, λ)` over the given cells.
    Search,
    /// Smallest `k` for the union `U_N` of cells `|j| ≤ N`.
    Sufficient,
    /// Builds `v` with `g = h = χ_B` and reports both residuals.
    Transitivity,
}

#[derive(Debug, Clone, Args)]
pub struct WitnessArgs {
    #[arg(long, value_enum, default_value_t = WitnessMode::Search)]
    pub mode: WitnessMode,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Cell range of B, e.g. -3..=3.
    #[arg(long, default_value = "-3..=3", allow_hyphen_values = true, value_parser = common::parse_cell_range)]
    pub cells: (i64, i64),
    /// Sub-cell refinement `r` of B (2^r parts per cell).
    #[arg(long, default_value_t = 0)]
    pub refinement: u32,
    #[arg(long, default_value_t = 200)]
    pub k_max: u32,
    /// `N` for the sufficient mode.
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    /// Accept a `B'` of measure zero.
    #[arg(long)]
    pub allow_degenerate: bool,
}

#[derive(Debug, Serialize)]
struct WitnessReport {
    schema: &'static str,
    system_id: String,
    generated_at: Option<String>,
    result: WitnessResult,
    config_echo: WitnessEcho,
}

#[derive(Debug, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
enum WitnessResult {
    Search { witness: WitnessTriple, verification: WitnessCheck },
    Sufficient { witness: SufficientWitness },
    Transitivity { witness: TransitivityWitness, verification: Option<WitnessCheck> },
}

#[derive(Debug, Serialize)]
struct WitnessEcho {
    command: &'static str,
    system: SystemSource,
    p: f64,
    mode: WitnessMode,
    epsilon: f64,
    cells: [i64; 2],
    refinement: u32,
    k_max: u32,
    n: u32,
    allow_degenerate: bool,
}

pub fn run(common: &CommonArgs, args: &WitnessArgs) -> Result<(), CliError> {
    common::check_p(common.p)?;
    let system = common::resolve_system(&common.system, common.p)?;
    let model = &system.model;
    let p = common.p;
    let b = CellSet::whole_cells(args.cells.0..=args.cells.1, args.refinement)?;
    let result = match args.mode {
        WitnessMode::Search => {
            let options = SearchOptions { allow_degenerate: args.allow_degenerate };
            let witness = general_condition_search(model, &b, args.epsilon, args.k_max, p, options)?;
            let verification = verify_witness(model, &b, &witness)?;
            WitnessResult::Search { witness, verification }
        }
        WitnessMode::Sufficient => {
            WitnessResult::Sufficient { witness: sufficient_condition_check(model, args.epsilon, args.n, args.k_max, p)? }
        }
        WitnessMode::Transitivity => {
            let one = Complex64::new(1.0, 0.0);
            let chi_b = StepFunction::from_cells(p, args.refinement, b.cells().iter().map(|&c| (c, one)))?;
            let witness = build_transitivity_witness(&chi_b, &chi_b, model, args.epsilon, args.k_max)?;
            let verification = witness.triple.as_ref().map(|t| verify_witness(model, &b, t)).transpose()?;
            WitnessResult::Transitivity { witness, verification }
        }
    };
    let report = WitnessReport {
        schema: SCHEMA,
        system_id: system.id,
        generated_at: common::timestamp(common),
        result,
        config_echo: WitnessEcho {
            command: "witness",
            system: system.source,
            p,
            mode: args.mode,
            epsilon: args.epsilon,
            cells: [args.cells.0, args.cells.1],
            refinement: args.refinement,
            k_max: args.k_max,
            n: args.n,
            allow_degenerate: args.allow_degenerate,
        },
    };
    common::write_output(common.out.as_ref(), &common::to_json(&report))
}
