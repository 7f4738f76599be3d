//! Simulation and spectral analysis of a quantum particle on a dot-chain
//! lattice under repeated projective measurements of the dot occupancy.
//!
//! The crate covers the full pipeline:
//!
//! - [`model`]: the dot-chain Hamiltonian and the chain band structure;
//! - [`propagator`]: dense eigendecomposition and the stroboscopic unitary
//!   `U(tau)`;
//! - [`channel`]: the nonselective measurement map, trajectory iteration,
//!   and observables (survival probability, diagonal profile, off-diagonal
//!   average, population-front speed);
//! - [`spectral`]: the vectorized superoperator, its biorthogonal
//!   eigensystem, the survival-probability mode expansion, decay-rate scans,
//!   and the invariant-chain-state test for fixed-point uniqueness;
//! - [`twolevel`]: the exact closed form for a single-site chain, kept
//!   independent of the numerical pipeline so it can act as an oracle.

pub mod channel;
pub mod error;
pub mod linalg;
pub mod model;
pub mod propagator;
pub mod spectral;
pub mod twolevel;

pub use channel::{
    evolve, evolve_recording, front_velocity, front_velocity_in_window, initial_state,
    measure_reduce, step, DensityMatrix, RecordedTrajectory, TrajectoryRecord,
};
pub use error::{Error, Result};
pub use linalg::C64;
pub use model::{
    build_hamiltonian, chain_dispersion, group_velocity, max_group_velocity, Hamiltonian,
    ModelSpec,
};
pub use propagator::{diagonalize, propagate, spectral_width, tau_star, EigenSystem, Propagator};
pub use spectral::{
    build_superoperator, chain_invariant_check, decay_info, decay_rate, decompose, rate_scan,
    stationary_state, survival_spectral, ChainInvariantReport, RateInfo, RatePoint,
    SpectralDecomposition, Superoperator,
};
pub use twolevel::{survival_closed_form, transition_matrix, TwoLevelParams};
