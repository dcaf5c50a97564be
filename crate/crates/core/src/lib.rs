//! Symplectic quantum tomograms of one-dimensional wavefunctions.
//!
//! - [`transform`]: the transform `F_{μ,ν}`, numeric and closed-form Gaussian
//!   tomograms, Fresnel tomograms.
//! - [`reconstruct`]: phase recovery for piecewise states from a position
//!   tomogram plus a few extra directions.
//! - [`dynamics`]: free and driven-oscillator evolution, and recovery of
//!   initial tomograms from position-only histories.
//! - [`completeness`]: Holevo χ and Gaussian information-completeness regimes.
//!
//! Batch entry points take an [`Execution`] policy. With the default
//! `parallel` feature they fan out over rayon; without it everything runs
//! sequentially.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod completeness;
pub mod density;
pub mod dynamics;
pub mod error;
pub mod numerics;
pub mod parallel;
pub mod reconstruct;
pub mod state;
pub mod transform;

pub use completeness::{
    covariance_from_tomograms, g_function, gaussian_completeness, gaussian_entropy, holevo_chi, CompletenessReport,
    CompletenessValue, Ensemble, MeasurementSet, RecoveredCovariances, Regime,
};
pub use density::{density_matrix, von_neumann_entropy, DensityMatrix};
pub use dynamics::{
    evolve_distribution, free_propagate, harmonic_evolve, initial_tomogram_from_oscillator,
    initial_tomogram_from_position_history, solve_epsilon_delta, OscillatorSpec, OscillatorTrajectory, PositionHistory,
    TimeProfile,
};
pub use error::{Error, Result};
pub use parallel::Execution;
pub use reconstruct::{
    assemble_state, detect_nodes, four_segment_benchmark, node_benchmark, quasi_uniform_angles, recover_phases_nodes,
    recover_phases_piecewise, segment_transforms, PhaseRecoveryResult, PiecewiseSpec, PiecewiseState, RecoveryStatus,
    SegmentTransformSet,
};
pub use state::{make_grid, sample_state, SpatialGrid, StatePreset, WaveFunction};
pub use transform::{
    fractional_transform, fresnel_tomogram, tomogram, tomogram_gaussian, GaussianState, TomogramSlice,
};
