//! Dissipative composition operators on `L^p`, their bilateral weighted
//! backward shift factors on `ℓ^p(ℤ)`, and finite-horizon deciders for the
//! ℝ- and ℂ-supercyclicity criteria of such operators.
//!
//! All masses, weights and products are carried in the log domain; products
//! like `μ(f^{q−n}(W))·μ(f^{q+n}(W))` underflow `f64` within a few hundred terms.

pub mod correspondence;
pub mod criteria;
pub mod error;
pub mod numerics;
pub mod operator;
pub mod system;

pub use correspondence::{
    factor_map, factor_map_gain, nu_from_weights, semiconjugacy_residual, weights_from_profile,
    weights_from_profile_over, weights_roundtrip_check, NuMeasure,
};
pub use criteria::{
    AggregateVerdict, CellSet, CriterionVerdict, SufficientWitness, TransitivityWitness, VerdictStatus, WitnessTriple,
};
pub use error::{Error, Result};
pub use operator::{LambdaMode, SeqVector, StepFunction, WeightSequence};
pub use system::{BuiltinSystem, DensityLineSystem, DistortionReport, ExtensionRule, MeasureProfile, SystemConfig, SystemModel};

pub use num_complex::Complex64;
