//! Shared setup for the pipeline benchmarks: prebuilt propagators and
//! superoperators for the standard scenarios.

use zenosim_core::{
    build_hamiltonian, build_superoperator, diagonalize, propagate, ModelSpec, Propagator,
    Superoperator,
};

/// Propagator for a uniform chain at the given size and interval.
pub fn uniform_propagator(n_chain: usize, gamma: f64, tau: f64) -> Propagator {
    let spec = ModelSpec::uniform(n_chain, gamma);
    let h = build_hamiltonian(&spec).expect("valid spec");
    let eig = diagonalize(&h).expect("symmetric matrix diagonalizes");
    propagate(&eig, tau)
}

/// Superoperator for the same scenario.
pub fn uniform_superoperator(n_chain: usize, gamma: f64, tau: f64) -> Superoperator {
    build_superoperator(&uniform_propagator(n_chain, gamma, tau))
}
