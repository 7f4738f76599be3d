//! Dot–chain lattice definition.
//!
//! A single particle hops on a lattice made of one dot site (position 0) and
//! an open chain of `N` sites (positions 1..=N). The chain hopping `gamma_c`
//! sets the energy unit (1 by convention), the dot couples to the first chain
//! site with strength `gamma`, and each chain site may carry an on-site
//! energy relative to the dot energy, which is pinned to zero.

use crate::error::{Error, Result};
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Lattice definition: chain length, couplings, and on-site energies.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    /// Number of chain sites `N` (the total dimension is `D = N + 1`).
    pub n_chain: usize,
    /// Dot–chain coupling, in units of `gamma_c`.
    pub gamma: f64,
    /// Chain hopping; the energy unit, 1 unless explicitly overridden.
    pub gamma_c: f64,
    /// On-site energies of the chain sites, relative to the dot at 0.
    pub epsilons: Vec<f64>,
    /// Seed used when `epsilons` were drawn at random, kept for provenance.
    pub epsilon_seed: Option<u64>,
}

impl ModelSpec {
    /// Uniform chain: all on-site energies zero.
    pub fn uniform(n_chain: usize, gamma: f64) -> Self {
        Self {
            n_chain,
            gamma,
            gamma_c: 1.0,
            epsilons: vec![0.0; n_chain],
            epsilon_seed: None,
        }
    }

    /// Explicit on-site energies.
    pub fn with_epsilons(n_chain: usize, gamma: f64, epsilons: Vec<f64>) -> Self {
        Self {
            n_chain,
            gamma,
            gamma_c: 1.0,
            epsilons,
            epsilon_seed: None,
        }
    }

    /// On-site energies drawn once from uniform [-0.5, 0.5], reproducibly.
    ///
    /// The same seed always yields bit-identical energies.
    pub fn with_random_epsilons(n_chain: usize, gamma: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let epsilons = (0..n_chain).map(|_| rng.random_range(-0.5..=0.5)).collect();
        Self {
            n_chain,
            gamma,
            gamma_c: 1.0,
            epsilons,
            epsilon_seed: Some(seed),
        }
    }

    /// Total Hilbert-space dimension `D = N + 1`.
    pub fn dim(&self) -> usize {
        self.n_chain + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_chain < 1 {
            return Err(Error::InvalidModel("n_chain must be at least 1".into()));
        }
        if self.epsilons.len() != self.n_chain {
            return Err(Error::InvalidModel(format!(
                "expected {} on-site energies, got {}",
                self.n_chain,
                self.epsilons.len()
            )));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::InvalidModel(format!(
                "gamma must be finite and >= 0, got {}",
                self.gamma
            )));
        }
        if !self.gamma_c.is_finite() || self.gamma_c <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "gamma_c must be finite and > 0, got {}",
                self.gamma_c
            )));
        }
        if self.epsilons.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidModel("on-site energies must be finite".into()));
        }
        Ok(())
    }
}

/// Real symmetric lattice Hamiltonian in the position basis (dot first).
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    dim: usize,
    matrix: Mat<f64>,
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> faer::MatRef<'_, f64> {
        self.matrix.as_ref()
    }
}

/// Assemble the dense `D x D` Hamiltonian for a lattice spec.
///
/// Position ordering is (dot = 0, chain sites 1..=N): the dot couples only to
/// site 1 with hopping `-gamma`, neighboring chain sites couple with
/// `-gamma_c`, and the chain diagonal carries the on-site energies.
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<Hamiltonian> {
    spec.validate()?;
    let d = spec.dim();
    let mut m = Mat::<f64>::zeros(d, d);
    m[(0, 1)] = -spec.gamma;
    m[(1, 0)] = -spec.gamma;
    for (l, &eps) in spec.epsilons.iter().enumerate() {
        m[(l + 1, l + 1)] = eps;
    }
    for l in 1..spec.n_chain {
        m[(l, l + 1)] = -spec.gamma_c;
        m[(l + 1, l)] = -spec.gamma_c;
    }
    Ok(Hamiltonian { dim: d, matrix: m })
}

/// Band dispersion of the decoupled uniform chain, `E(k) = -2 cos k`.
pub fn chain_dispersion(k: f64) -> f64 {
    -2.0 * k.cos()
}

/// Group velocity `dE/dk = 2 sin k`.
pub fn group_velocity(k: f64) -> f64 {
    2.0 * k.sin()
}

/// Largest group velocity on the chain band; reached at `k = pi/2`.
pub fn max_group_velocity() -> f64 {
    2.0
}
