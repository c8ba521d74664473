//! Quantum kicked top: Floquet dynamics of a spin-J system, generalized
//! entanglement relative to su(2) and so(2), extents, fidelity decay, and the
//! classical map on the sphere.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the documented
//! tolerances assume.

pub mod classical;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod measures;
pub mod scalar;
pub mod spin;

pub use classical::{
    chaotic_fraction, classical_step, classify, fibonacci_sphere, lyapunov_estimate,
    quantum_classical_correspondence_check, ChaosLabel, ClassicalState, Classification,
};
pub use dynamics::{evolve, fidelity_series, fidelity_series_with, EvolutionRecord, FloquetOperator, QuarterTurn};
pub use error::{Error, Result};
pub use measures::{
    axis_extent, extent, ge_extent_identity_residual, haar_baseline, haar_random_state,
    haar_random_state_with,
    invariant_uncertainty, meyer_wallach, meyer_wallach_crosscheck, purity_so2, purity_su2,
    rmt_average_ge, GeRecord, RmtBaseline,
};
pub use scalar::Real;
pub use spin::{build_gcs, expectation, Axis, GcsParams, Spin, SpinSystem, StateVector};

pub use num_complex::Complex;

pub type SpinSystem64 = SpinSystem<f64>;
pub type StateVector64 = StateVector<f64>;
pub type GcsParams64 = GcsParams<f64>;
pub type FloquetOperator64 = FloquetOperator<f64>;
pub type QuarterTurn64 = QuarterTurn<f64>;
pub type GeRecord64 = GeRecord<f64>;
pub type ClassicalState64 = ClassicalState<f64>;
pub type RmtBaseline64 = RmtBaseline<f64>;

pub type SpinSystem32 = SpinSystem<f32>;
pub type StateVector32 = StateVector<f32>;
pub type FloquetOperator32 = FloquetOperator<f32>;
