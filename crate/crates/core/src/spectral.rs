//! Vectorized superoperator of the measurement map and its spectrum.
//!
//! The channel `rho -> sum_a Pi_a U rho U† Pi_a` becomes a `D^2 x D^2` matrix
//! `S = sum_a (Pi_a U) ⊗ conj(Pi_a U)` acting on row-stacked density matrices
//! (`index(i, j) = i*D + j`; the Kronecker factor order depends on this
//! convention). Its biorthogonal eigensystem yields the survival expansion
//! `p_M = 1/(N+1) + sum_{n>=1} lambda_n^M <0|phi_n|0><0|Phi_n|0>`, the
//! asymptotic decay rate from the subunit eigenvalue closest to the unit
//! circle, and the uniqueness test for the maximally mixed fixed point.

use crate::channel::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::model::{build_hamiltonian, ModelSpec};
use crate::propagator::{diagonalize, propagate, tau_star, Propagator};
use faer::linalg::solvers::Solve;
use faer::{Col, Mat};
use rayon::prelude::*;

/// Eigenvalues within this distance of 1 count as the unit eigenspace, and
/// moduli above `1 - UNIT_TOL` count as non-decaying. Eigensolver accuracy at
/// these dimensions is ~1e-12, three orders below the threshold.
pub const UNIT_TOL: f64 = 1e-9;

/// Eigenvalues closer than this are treated as one degenerate cluster when
/// pairing left and right modes.
const CLUSTER_TOL: f64 = 1e-8;

/// Right-eigenvector condition numbers above this flag the decomposition as
/// near-defective; consumers of the mode expansion must fall back to direct
/// iteration.
const CONDITION_LIMIT: f64 = 1e8;

/// Tolerated residual of `Tr(phi_n Phi_m) - delta_nm` after normalization.
const BIORTHOGONALITY_TOL: f64 = 1e-8;

/// The measurement map as a dense matrix over vectorized density matrices.
#[derive(Debug, Clone)]
pub struct Superoperator {
    dim_rho: usize,
    matrix: Mat<C64>,
}

impl Superoperator {
    /// Dimension `D` of the density matrices the map acts on.
    pub fn dim_rho(&self) -> usize {
        self.dim_rho
    }

    /// Dimension `D^2` of the vectorized representation.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> faer::MatRef<'_, C64> {
        self.matrix.as_ref()
    }

    /// Apply the map to a (not necessarily Hermitian) matrix.
    pub fn apply(&self, m: faer::MatRef<'_, C64>) -> Mat<C64> {
        let v = linalg::vectorize(m);
        let out = &self.matrix * &v;
        linalg::unvectorize(out.as_ref(), self.dim_rho)
    }

    /// Apply the dual (Heisenberg-picture) map `phi -> sum_a U† Pi_a phi Pi_a U`.
    ///
    /// In the vectorized picture this is the transpose acting on `vec(phi^T)`.
    pub fn apply_dual(&self, m: faer::MatRef<'_, C64>) -> Mat<C64> {
        let v = linalg::vectorize(m.transpose());
        let out = self.matrix.transpose() * &v;
        linalg::unvectorize(out.as_ref(), self.dim_rho)
            .transpose()
            .to_owned()
    }
}

/// Assemble `S = (Pi_d U) ⊗ conj(Pi_d U) + (Pi_c U) ⊗ conj(Pi_c U)`.
pub fn build_superoperator(u: &Propagator) -> Superoperator {
    let d = u.dim();
    let um = u.matrix();
    let mut dot_part = Mat::<C64>::zeros(d, d); // Pi_d U keeps only row 0
    for j in 0..d {
        dot_part[(0, j)] = um[(0, j)];
    }
    let mut chain_part = um.to_owned(); // Pi_c U zeroes row 0
    for j in 0..d {
        chain_part[(0, j)] = C64::new(0.0, 0.0);
    }
    let matrix = linalg::kron(dot_part.as_ref(), linalg::conj_mat(dot_part.as_ref()).as_ref())
        + linalg::kron(
            chain_part.as_ref(),
            linalg::conj_mat(chain_part.as_ref()).as_ref(),
        );
    Superoperator { dim_rho: d, matrix }
}

/// Biorthogonal eigensystem of the measurement map.
///
/// Eigenvalues are sorted by descending modulus, ties by descending real then
/// imaginary part. Right modes `Phi_n` and left modes `phi_n` are normalized
/// to `Tr(phi_n Phi_m) = delta_nm`; the stationary mode is scaled to unit
/// trace so that generically `Phi_0 = I/(N+1)` and `phi_0 = I`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    dim_rho: usize,
    eigenvalues: Vec<C64>,
    right_modes: Vec<Mat<C64>>,
    left_modes: Vec<Mat<C64>>,
    condition_number: f64,
    unit_eigenspace_dim: usize,
    biorthogonality_error: f64,
    near_defective: bool,
    pairing_ambiguous: bool,
}

impl SpectralDecomposition {
    pub fn dim_rho(&self) -> usize {
        self.dim_rho
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn right_modes(&self) -> &[Mat<C64>] {
        &self.right_modes
    }

    pub fn left_modes(&self) -> &[Mat<C64>] {
        &self.left_modes
    }

    /// 2-norm condition number of the right-eigenvector matrix.
    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    /// Count of eigenvalues within [`UNIT_TOL`] of 1.
    pub fn unit_eigenspace_dim(&self) -> usize {
        self.unit_eigenspace_dim
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.first().map_or(0.0, |l| l.norm())
    }

    /// Measured `max |Tr(phi_n Phi_m) - delta_nm|`.
    pub fn biorthogonality_error(&self) -> f64 {
        self.biorthogonality_error
    }

    /// Why the mode expansion must not be trusted, if anything.
    pub fn flag_description(&self) -> Option<String> {
        let mut reasons = Vec::new();
        if self.near_defective {
            reasons.push(format!(
                "near-defective (condition number {:.3e})",
                self.condition_number
            ));
        }
        if self.pairing_ambiguous {
            reasons.push("left/right eigenvalue pairing ambiguous".into());
        }
        if self.biorthogonality_error.is_nan() || self.biorthogonality_error > BIORTHOGONALITY_TOL
        {
            reasons.push(format!(
                "biorthogonality residual {:.3e}",
                self.biorthogonality_error
            ));
        }
        if reasons.is_empty() {
            None
        } else {
            Some(reasons.join("; "))
        }
    }

    pub fn is_flagged(&self) -> bool {
        self.flag_description().is_some()
    }
}

fn sort_order(vals: &[C64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| {
        vals[b]
            .norm()
            .total_cmp(&vals[a].norm())
            .then(vals[b].re.total_cmp(&vals[a].re))
            .then(vals[b].im.total_cmp(&vals[a].im))
    });
    idx
}

/// Contiguous ranges of near-equal eigenvalues in an already sorted list.
fn build_clusters(sorted_vals: &[C64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..sorted_vals.len() {
        if (sorted_vals[i] - sorted_vals[start]).norm() > tol {
            clusters.push(start..i);
            start = i;
        }
    }
    if !sorted_vals.is_empty() {
        clusters.push(start..sorted_vals.len());
    }
    clusters
}

/// Bilinear pairing `vec(phi^T) . vec(Phi)`, which equals `Tr(phi Phi)`.
fn pair(w: &Col<C64>, u: &Col<C64>) -> C64 {
    (0..w.nrows()).map(|i| w[i] * u[i]).sum()
}

/// Scale a right eigenvector canonically: unit trace when the trace is
/// substantial (the stationary mode), otherwise unit Frobenius norm with the
/// largest entry rotated to the positive real axis.
fn canonicalize_right(v: &mut Col<C64>, d: usize) {
    let frob: f64 = (0..v.nrows()).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
    if frob == 0.0 {
        return;
    }
    let tr: C64 = (0..d).map(|i| v[i * d + i]).sum();
    let scale = if tr.norm() > 1e-6 * frob {
        tr.inv()
    } else {
        let mut lead = C64::new(0.0, 0.0);
        for i in 0..v.nrows() {
            if v[i].norm() > lead.norm() {
                lead = v[i];
            }
        }
        (lead / lead.norm()).conj() / frob
    };
    for i in 0..v.nrows() {
        v[i] *= scale;
    }
}

/// Compute the biorthogonal eigensystem of the map and of its dual, pair the
/// two by eigenvalue, and resolve degenerate clusters through their Gram
/// matrix. Unresolvable structure is flagged, not silently patched.
pub fn decompose(s: &Superoperator) -> Result<SpectralDecomposition> {
    let d = s.dim_rho;
    let d2 = s.dim();

    let right = s
        .matrix
        .eigen()
        .map_err(|e| Error::Eigensolver(format!("superoperator: {e:?}")))?;
    let dual = s
        .matrix
        .transpose()
        .to_owned()
        .eigen()
        .map_err(|e| Error::Eigensolver(format!("dual superoperator: {e:?}")))?;

    let condition_number = match right.U().svd() {
        Ok(svd) => {
            let smax = svd.S()[0].re;
            let smin = svd.S()[d2 - 1].re;
            if smin > 0.0 {
                smax / smin
            } else {
                f64::INFINITY
            }
        }
        Err(_) => f64::INFINITY,
    };
    let mut near_defective = condition_number.is_nan() || condition_number > CONDITION_LIMIT;
    let mut pairing_ambiguous = false;

    let raw_right_vals: Vec<C64> = right.S().column_vector().iter().copied().collect();
    let raw_dual_vals: Vec<C64> = dual.S().column_vector().iter().copied().collect();
    let right_order = sort_order(&raw_right_vals);
    let dual_order = sort_order(&raw_dual_vals);

    let eigenvalues: Vec<C64> = right_order.iter().map(|&n| raw_right_vals[n]).collect();
    let dual_vals: Vec<C64> = dual_order.iter().map(|&n| raw_dual_vals[n]).collect();

    let mut right_vecs: Vec<Col<C64>> = Vec::with_capacity(d2);
    for &n in &right_order {
        let mut v = right.U().col(n).to_owned();
        canonicalize_right(&mut v, d);
        right_vecs.push(v);
    }
    let dual_vecs: Vec<Col<C64>> = dual_order
        .iter()
        .map(|&n| dual.U().col(n).to_owned())
        .collect();

    // The transpose has the same spectrum, but fp noise in norm ties (e.g.
    // conjugate pairs) can shuffle the two sorted orders, so left vectors are
    // assigned to right clusters by eigenvalue proximity, nearest first.
    let right_clusters = build_clusters(&eigenvalues, CLUSTER_TOL);
    let mut consumed = vec![false; d2];
    let mut cluster_partners: Vec<Vec<usize>> = Vec::with_capacity(right_clusters.len());
    for cluster in &right_clusters {
        let repr = eigenvalues[cluster.start];
        let mut candidates: Vec<(f64, usize)> = (0..d2)
            .filter(|&i| !consumed[i])
            .map(|i| ((dual_vals[i] - repr).norm(), i))
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let chosen: Vec<usize> = candidates
            .iter()
            .take(cluster.len())
            .map(|&(_, i)| i)
            .collect();
        if chosen.len() < cluster.len()
            || candidates[..cluster.len()].iter().any(|&(dist, _)| dist > CLUSTER_TOL)
        {
            pairing_ambiguous = true;
        }
        for &i in &chosen {
            consumed[i] = true;
        }
        cluster_partners.push(chosen);
    }

    let mut left_vecs: Vec<Col<C64>> = vec![Col::zeros(d2); d2];
    for (cluster, partners) in right_clusters.iter().zip(&cluster_partners) {
        let k = cluster.len();
        if partners.len() != k {
            // ambiguous assignment already flagged; keep raw vectors in place
            for (slot, &p) in cluster.clone().zip(partners) {
                left_vecs[slot] = dual_vecs[p].clone();
            }
        } else if k == 1 {
            let n = cluster.start;
            let mut w = dual_vecs[partners[0]].clone();
            let g = pair(&w, &right_vecs[n]);
            if g.norm() < 1e-12 {
                near_defective = true;
            } else {
                let scale = g.inv();
                for i in 0..d2 {
                    w[i] *= scale;
                }
            }
            left_vecs[n] = w;
        } else {
            // replace the cluster's left vectors by G^{-1}-combinations so
            // the pairing within the degenerate subspace becomes exact
            let gram = Mat::from_fn(k, k, |a, b| {
                pair(&dual_vecs[partners[a]], &right_vecs[cluster.start + b])
            });
            let rhs = Mat::from_fn(k, d2, |a, i| dual_vecs[partners[a]][i]);
            let solved = gram.full_piv_lu().solve(&rhs);
            for a in 0..k {
                let mut w = Col::zeros(d2);
                for i in 0..d2 {
                    w[i] = solved[(a, i)];
                }
                left_vecs[cluster.start + a] = w;
            }
        }
    }

    // measure what the pairing actually achieved
    let left_mat = Mat::from_fn(d2, d2, |i, n| left_vecs[n][i]);
    let right_mat = Mat::from_fn(d2, d2, |i, n| right_vecs[n][i]);
    let overlap = left_mat.transpose() * &right_mat;
    let mut biorthogonality_error = 0.0_f64;
    for a in 0..d2 {
        for b in 0..d2 {
            let expect = if a == b { 1.0 } else { 0.0 };
            let dev = (overlap[(a, b)] - C64::new(expect, 0.0)).norm();
            if dev.is_nan() {
                biorthogonality_error = f64::NAN;
            } else if !biorthogonality_error.is_nan() {
                biorthogonality_error = biorthogonality_error.max(dev);
            }
        }
    }

    let unit_eigenspace_dim = eigenvalues
        .iter()
        .filter(|l| (*l - C64::new(1.0, 0.0)).norm() <= UNIT_TOL)
        .count();

    let right_modes: Vec<Mat<C64>> = right_vecs
        .iter()
        .map(|v| linalg::unvectorize(v.as_ref(), d))
        .collect();
    let left_modes: Vec<Mat<C64>> = left_vecs
        .iter()
        .map(|v| linalg::unvectorize(v.as_ref(), d).transpose().to_owned())
        .collect();

    Ok(SpectralDecomposition {
        dim_rho: d,
        eigenvalues,
        right_modes,
        left_modes,
        condition_number,
        unit_eigenspace_dim,
        biorthogonality_error,
        near_defective,
        pairing_ambiguous,
    })
}

/// Survival probabilities `p_0..=p_M` from the spectral expansion.
///
/// Refuses flagged decompositions; callers fall back to direct iteration.
pub fn survival_spectral(dec: &SpectralDecomposition, m_steps: usize) -> Result<Vec<f64>> {
    if let Some(reason) = dec.flag_description() {
        return Err(Error::FlaggedDecomposition(reason));
    }
    let n_modes = dec.eigenvalues.len();
    let weights: Vec<C64> = (0..n_modes)
        .map(|n| dec.left_modes[n][(0, 0)] * dec.right_modes[n][(0, 0)])
        .collect();
    let mut powers = vec![C64::new(1.0, 0.0); n_modes];
    let mut out = Vec::with_capacity(m_steps + 1);
    for _ in 0..=m_steps {
        let p: C64 = weights
            .iter()
            .zip(&powers)
            .map(|(w, pw)| w * pw)
            .sum();
        out.push(p.re);
        for (pw, l) in powers.iter_mut().zip(&dec.eigenvalues) {
            *pw *= l;
        }
    }
    Ok(out)
}

/// The subunit eigenvalue closest to the unit circle and the raw rate
/// `-ln |lambda_1|` it implies.
#[derive(Debug, Clone, Copy)]
pub struct RateInfo {
    pub lambda1: Option<C64>,
    pub lambda1_modulus: f64,
    /// `-ln |lambda_1|`; infinite when the subunit spectrum is empty or zero.
    pub raw_rate: f64,
}

/// Locate `lambda_1` (largest modulus strictly inside the unit disk) and the
/// raw decay rate. Requires a unique stationary state.
pub fn decay_info(dec: &SpectralDecomposition) -> Result<RateInfo> {
    if dec.unit_eigenspace_dim > 1 {
        return Err(Error::DegenerateUnitEigenspace {
            dim: dec.unit_eigenspace_dim,
        });
    }
    let lambda1 = dec
        .eigenvalues
        .iter()
        .find(|l| l.norm() < 1.0 - UNIT_TOL)
        .copied();
    match lambda1 {
        Some(l) if l.norm() > 0.0 => Ok(RateInfo {
            lambda1: Some(l),
            lambda1_modulus: l.norm(),
            raw_rate: -l.norm().ln(),
        }),
        Some(l) => Ok(RateInfo {
            lambda1: Some(l),
            lambda1_modulus: 0.0,
            raw_rate: f64::INFINITY,
        }),
        None => Ok(RateInfo {
            lambda1: None,
            lambda1_modulus: 0.0,
            raw_rate: f64::INFINITY,
        }),
    }
}

/// Decay rate scaled by the coupling, `Gamma = -ln(|lambda_1|) / gamma^2`.
pub fn decay_rate(dec: &SpectralDecomposition, gamma: f64) -> Result<f64> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "gamma must be > 0 to scale the rate, got {gamma}"
        )));
    }
    Ok(decay_info(dec)?.raw_rate / (gamma * gamma))
}

/// One row of a rate scan.
#[derive(Debug, Clone)]
pub struct RatePoint {
    pub tau: f64,
    /// `tau / tau*` with `tau* = 2 pi / spectral width`.
    pub tau_tilde: f64,
    pub lambda1_modulus: Option<f64>,
    /// `-ln(|lambda_1|) / gamma^2`.
    pub gamma_rate: Option<f64>,
    /// `-ln(|lambda_1|)` without the coupling scaling.
    pub raw_rate: Option<f64>,
    /// Per-point diagnostics; empty means the row is clean.
    pub flags: Vec<String>,
}

/// Scan the decay rate over a grid of measurement intervals.
///
/// Grid points are independent and run in parallel; output order follows the
/// input grid. Degenerate or otherwise troubled points are flagged in their
/// row instead of aborting the scan. Rates use eigenvalues only, so a
/// near-defective eigenbasis does not block them.
pub fn rate_scan(spec: &ModelSpec, tau_grid: &[f64]) -> Result<Vec<RatePoint>> {
    if tau_grid.is_empty() {
        return Err(Error::InvalidArgument("empty tau grid".into()));
    }
    if tau_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidArgument(
            "tau grid entries must be finite and > 0".into(),
        ));
    }
    let h = build_hamiltonian(spec)?;
    let eig = diagonalize(&h)?;
    let t_star = tau_star(&eig)?;
    let gamma = spec.gamma;

    let points: Vec<RatePoint> = tau_grid
        .par_iter()
        .map(|&tau| {
            let u = propagate(&eig, tau);
            let s = build_superoperator(&u);
            let mut flags = Vec::new();
            let vals = match s.matrix.eigenvalues() {
                Ok(v) => v,
                Err(e) => {
                    flags.push(format!("eigensolver: {e:?}"));
                    return RatePoint {
                        tau,
                        tau_tilde: tau / t_star,
                        lambda1_modulus: None,
                        gamma_rate: None,
                        raw_rate: None,
                        flags,
                    };
                }
            };
            let unit_dim = vals
                .iter()
                .filter(|l| (*l - C64::new(1.0, 0.0)).norm() <= UNIT_TOL)
                .count();
            if unit_dim > 1 {
                flags.push(format!("degenerate_unit_eigenspace:{unit_dim}"));
                return RatePoint {
                    tau,
                    tau_tilde: tau / t_star,
                    lambda1_modulus: None,
                    gamma_rate: None,
                    raw_rate: None,
                    flags,
                };
            }
            let lambda1_modulus = vals
                .iter()
                .map(|l| l.norm())
                .filter(|m| *m < 1.0 - UNIT_TOL)
                .fold(0.0_f64, f64::max);
            let raw = if lambda1_modulus > 0.0 {
                -lambda1_modulus.ln()
            } else {
                flags.push("subunit_spectrum_empty".into());
                f64::INFINITY
            };
            let gamma_rate = if gamma > 0.0 {
                Some(raw / (gamma * gamma))
            } else {
                flags.push("gamma_zero_rate_unscaled".into());
                None
            };
            RatePoint {
                tau,
                tau_tilde: tau / t_star,
                lambda1_modulus: Some(lambda1_modulus),
                gamma_rate,
                raw_rate: Some(raw),
                flags,
            }
        })
        .collect();
    Ok(points)
}

/// The unique fixed point of the map, Hermitized and trace-normalized.
///
/// Refuses a degenerate unit eigenspace (then "the" stationary state is
/// meaningless); for generic parameters the result equals `I/(N+1)`.
pub fn stationary_state(dec: &SpectralDecomposition) -> Result<DensityMatrix> {
    if dec.unit_eigenspace_dim != 1 {
        return Err(Error::DegenerateUnitEigenspace {
            dim: dec.unit_eigenspace_dim,
        });
    }
    let top = &dec.right_modes[0];
    let herm = linalg::hermitize(top.as_ref());
    let tr = linalg::trace(herm.as_ref()).re;
    if tr.abs() < 1e-12 {
        return Err(Error::Eigensolver(
            "stationary mode has vanishing trace".into(),
        ));
    }
    let normalized = faer::Scale(C64::new(1.0 / tr, 0.0)) * &herm;
    DensityMatrix::try_new(normalized)
}

/// Existence test for invariant chain states.
#[derive(Debug, Clone, Copy)]
pub struct ChainInvariantReport {
    /// Whether `y = Pi_c U y U† Pi_c` has a nontrivial solution.
    pub has_invariant_chain_state: bool,
    /// Largest eigenvalue modulus of the chain-restricted superoperator.
    pub top_chain_eigenvalue_modulus: f64,
    /// Multiplicity of eigenvalue 1 of the full map.
    pub unit_eigenspace_dimension_of_full_map: usize,
}

/// Probe the chain-restricted superoperator `z -> Pi_c U z U† Pi_c` for a
/// unit-modulus eigenvalue, and cross-report the unit-eigenspace dimension of
/// the full map. The two agree: the maximally mixed state is the unique fixed
/// point exactly when no invariant chain state exists.
pub fn chain_invariant_check(u: &Propagator) -> Result<ChainInvariantReport> {
    let d = u.dim();
    let n = d - 1;
    let chain_block = u.matrix().submatrix(1, 1, n, n).to_owned();
    let restricted = linalg::kron(
        chain_block.as_ref(),
        linalg::conj_mat(chain_block.as_ref()).as_ref(),
    );
    let top_chain_eigenvalue_modulus = restricted
        .eigenvalues()
        .map_err(|e| Error::Eigensolver(format!("chain-restricted map: {e:?}")))?
        .iter()
        .map(|l| l.norm())
        .fold(0.0_f64, f64::max);

    let full = build_superoperator(u);
    let unit_eigenspace_dimension_of_full_map = full
        .matrix
        .eigenvalues()
        .map_err(|e| Error::Eigensolver(format!("full map: {e:?}")))?
        .iter()
        .filter(|l| (*l - C64::new(1.0, 0.0)).norm() <= UNIT_TOL)
        .count();

    Ok(ChainInvariantReport {
        has_invariant_chain_state: top_chain_eigenvalue_modulus >= 1.0 - UNIT_TOL,
        top_chain_eigenvalue_modulus,
        unit_eigenspace_dimension_of_full_map,
    })
}
