//! Finite representations of `ℓ^p(ℤ)` and `L^p(X)` vectors, the bilateral
//! weighted backward shift, the composition operator and orbit probes.

pub mod probe;
pub mod shift;
pub mod vector;
pub mod weights;

pub use probe::{best_scalar, projective_distance, CompositionOperator, LambdaMode, OrbitOperator, OrbitProbe};
pub use shift::{
    apply_backward_shift, apply_composition, apply_inverse_shift, log_lp_norm_seq, log_lp_norm_step, lp_norm_seq,
    lp_norm_step,
};
pub use vector::{Cell, SeqVector, StepFunction};
pub use weights::WeightSequence;
