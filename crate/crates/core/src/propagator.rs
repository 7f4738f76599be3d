//! Spectral route to the stroboscopic propagator `U(tau) = exp(-i H tau)`.
//!
//! The Hamiltonian is real symmetric, so one dense eigendecomposition gives
//! `U(tau)` exactly (to solver precision) for every `tau`, which makes
//! tau-sweeps cheap: diagonalize once, exponentiate phases per grid point.

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::model::Hamiltonian;
use faer::{Mat, Side};

/// Eigendecomposition of the lattice Hamiltonian.
///
/// Energies are sorted ascending; eigenvectors are the matching columns of an
/// orthogonal matrix with a fixed sign convention (first component of
/// non-negligible magnitude is positive), so repeated runs are bit-identical.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    energies: Vec<f64>,
    vectors: Mat<f64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Orthogonal matrix whose columns are the eigenvectors.
    pub fn vectors(&self) -> faer::MatRef<'_, f64> {
        self.vectors.as_ref()
    }
}

pub fn diagonalize(h: &Hamiltonian) -> Result<EigenSystem> {
    let d = h.dim();
    let evd = h
        .matrix()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;

    let mut order: Vec<usize> = (0..d).collect();
    let raw_energies: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    order.sort_by(|&a, &b| raw_energies[a].total_cmp(&raw_energies[b]));

    let energies: Vec<f64> = order.iter().map(|&n| raw_energies[n]).collect();
    let mut vectors = Mat::<f64>::zeros(d, d);
    for (col, &n) in order.iter().enumerate() {
        // sign convention: first component larger than noise is positive
        let mut sign = 1.0;
        for i in 0..d {
            let v = evd.U()[(i, n)];
            if v.abs() > 1e-12 {
                if v < 0.0 {
                    sign = -1.0;
                }
                break;
            }
        }
        for i in 0..d {
            vectors[(i, col)] = sign * evd.U()[(i, n)];
        }
    }
    Ok(EigenSystem { energies, vectors })
}

/// Unitary time-evolution operator over one measurement interval.
#[derive(Debug, Clone)]
pub struct Propagator {
    tau: f64,
    matrix: Mat<C64>,
}

impl Propagator {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> faer::MatRef<'_, C64> {
        self.matrix.as_ref()
    }

    /// `max |U†U - I|`, for invariant checks.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim();
        let gram = self.matrix.adjoint() * &self.matrix;
        let id = Mat::<C64>::identity(d, d);
        linalg::max_abs_diff(gram.as_ref(), id.as_ref())
    }
}

/// Build `U(tau) = V diag(exp(-i E_n tau)) V^T` from the eigensystem.
///
/// `tau = 0` gives the identity.
pub fn propagate(eig: &EigenSystem, tau: f64) -> Propagator {
    assert!(tau.is_finite() && tau >= 0.0, "tau must be finite and >= 0");
    let d = eig.dim();
    // columns of V scaled by their phase, then contracted against V^T
    let mut phased = Mat::<C64>::zeros(d, d);
    for n in 0..d {
        let phase = C64::from_polar(1.0, -eig.energies[n] * tau);
        for i in 0..d {
            phased[(i, n)] = phase * eig.vectors[(i, n)];
        }
    }
    let vt = linalg::to_complex(eig.vectors()).transpose().to_owned();
    let matrix = phased * vt;
    Propagator { tau, matrix }
}

/// Width of the Hamiltonian spectrum, `E_max - E_min`.
pub fn spectral_width(eig: &EigenSystem) -> Result<f64> {
    if eig.dim() < 2 {
        return Err(Error::SpectralWidthUndefined { dim: eig.dim() });
    }
    Ok(eig.energies[eig.dim() - 1] - eig.energies[0])
}

/// Shortest time scale of the unitary motion, `tau* = 2 pi / (E_max - E_min)`.
pub fn tau_star(eig: &EigenSystem) -> Result<f64> {
    let width = spectral_width(eig)?;
    if width <= 0.0 {
        return Err(Error::SpectralWidthUndefined { dim: eig.dim() });
    }
    Ok(2.0 * std::f64::consts::PI / width)
}
