//! Finite-horizon deciders for the liminf product criteria and constructive
//! witnesses for the measure-theoretic ℝ-supercyclicity condition.

pub mod products;
pub mod verdict;
pub mod witness;

pub use products::{
    dissipative_product_sequence, equivalence_identity_check, invertible_simplified_products, shift_product_sequence,
};
pub use verdict::{
    dissipative_supercyclicity_verdict, shift_supercyclicity_verdict, verdict_from_series, AggregateVerdict,
    CriterionVerdict, VerdictStatus, DEFAULT_HORIZON, DEFAULT_LOG_TOL, DEFAULT_Q_MAX, MIN_HORIZON,
};
pub use witness::{
    build_transitivity_witness, general_condition_search, sufficient_condition_check, verify_witness, AchievedBounds,
    CellSet, SearchOptions, SufficientWitness, TransitivityWitness, WitnessCheck, WitnessTriple,
};

/// Schema tag carried by serialized verdicts and witnesses.
pub const SCHEMA: &str = "criteria/v1";
