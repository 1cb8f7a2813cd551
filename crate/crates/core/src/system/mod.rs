//! Dissipative measure systems: measure profiles, piecewise-exponential
//! densities on the line, distortion diagnostics and configuration.
//!
//! Dissipativity is structural: every system is given by its cells
//! `f^k(W)`, `k ∈ ℤ`, so non-dissipative systems cannot be represented.

pub mod builtin;
pub mod config;
pub mod density;
pub mod distortion;
pub mod model;
pub mod profile;

pub use builtin::BuiltinSystem;
pub use config::SystemConfig;
pub use density::{DensityLineSystem, ExpPiece, PiecewiseExpDensity, QuadratureConfig, QuadratureMethod};
pub use distortion::{BoundedVerdict, DistortionRecord, DistortionReport};
pub use model::{CellMasses, SystemModel};
pub use profile::{ExtensionRule, MeasureProfile};
