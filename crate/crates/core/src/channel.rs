//! The measurement-reduction channel and its iteration.
//!
//! One cycle evolves the state unitarily over `tau` and then performs a
//! nonselective projective measurement of the dot occupancy, which erases the
//! dot-chain coherences. Iterating the cycle drives any initial state toward
//! the maximally mixed state `I / (N + 1)` except at exceptional parameter
//! points where the chain supports its own invariant state.

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::model::{build_hamiltonian, ModelSpec};
use crate::propagator::{diagonalize, propagate, Propagator};
use faer::Mat;

/// Hermitian, positive-semidefinite, trace-one state of the dot-chain system.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: Mat<C64>,
}

impl DensityMatrix {
    /// Validate Hermiticity and unit trace of a raw matrix; the stored state
    /// is the exactly Hermitian part.
    pub fn try_new(matrix: Mat<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let herm_err = linalg::max_abs_diff(matrix.as_ref(), linalg::hermitize(matrix.as_ref()).as_ref());
        if herm_err > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "matrix is not Hermitian (deviation {herm_err:.3e})"
            )));
        }
        let tr = linalg::trace(matrix.as_ref());
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidArgument(format!("trace is {tr}, not 1")));
        }
        Ok(Self {
            matrix: linalg::hermitize(matrix.as_ref()),
        })
    }

    pub(crate) fn from_hermitized(matrix: Mat<C64>) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> faer::MatRef<'_, C64> {
        self.matrix.as_ref()
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(self.matrix.as_ref()).re
    }

    /// Dot occupancy `<0|rho|0>`.
    pub fn survival(&self) -> f64 {
        self.matrix[(0, 0)].re
    }

    /// Diagonal in the position basis (dot first).
    pub fn diag_profile(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// Average absolute value of the off-diagonal elements,
    /// `sum_{i != j} |rho_ij| / [N (N + 1)]` with `N + 1 = D`.
    ///
    /// The normalization is exactly the number of off-diagonal entries.
    pub fn offdiag_avg(&self) -> f64 {
        let d = self.dim();
        let mut sum = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    sum += self.matrix[(i, j)].norm();
                }
            }
        }
        sum / ((d * (d - 1)) as f64)
    }

    /// `max |rho - rho†|`, zero by construction up to rounding.
    pub fn hermiticity_error(&self) -> f64 {
        linalg::max_abs_diff(
            self.matrix.as_ref(),
            linalg::hermitize(self.matrix.as_ref()).as_ref(),
        )
    }

    /// Smallest eigenvalue; for positivity checks.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let evd = self
            .matrix
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        Ok(evd
            .S()
            .column_vector()
            .iter()
            .map(|c| c.re)
            .fold(f64::INFINITY, f64::min))
    }
}

/// The particle starts on the dot: `rho_0 = |0><0|`.
pub fn initial_state(dim: usize) -> DensityMatrix {
    assert!(dim >= 2, "need a dot and at least one chain site");
    let mut m = Mat::<C64>::zeros(dim, dim);
    m[(0, 0)] = C64::new(1.0, 0.0);
    DensityMatrix::from_hermitized(m)
}

/// Nonselective measurement of the dot occupancy.
///
/// Zeroes row 0 and column 0 except the (0,0) element, leaving the diagonal
/// (and hence the trace) untouched. Idempotent.
pub fn measure_reduce(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    let mut m = rho.matrix.clone();
    for l in 1..d {
        m[(0, l)] = C64::new(0.0, 0.0);
        m[(l, 0)] = C64::new(0.0, 0.0);
    }
    DensityMatrix::from_hermitized(m)
}

/// One measurement cycle: unitary stretch, then reduction, then exact
/// re-Hermitization to stop floating-point drift.
///
/// The trace is asserted, never renormalized, so a violation surfaces loudly
/// instead of being hidden.
pub fn step(rho: &DensityMatrix, u: &Propagator) -> Result<DensityMatrix> {
    if rho.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: rho.dim(),
        });
    }
    let trace_in = rho.trace();
    let evolved = u.matrix() * rho.matrix() * u.matrix().adjoint();
    let reduced = measure_reduce(&DensityMatrix {
        matrix: linalg::hermitize(evolved.as_ref()),
    });
    let trace_out = reduced.trace();
    assert!(
        (trace_out - trace_in).abs() <= 1e-10,
        "trace drifted by {:.3e} in one step",
        (trace_out - trace_in).abs()
    );
    Ok(reduced)
}

/// Per-measurement observables of a trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    /// Measurement count `M` (0 is the initial state).
    pub step: usize,
    /// Elapsed time `T = M tau`.
    pub time: f64,
    /// Dot occupancy `p_M`.
    pub survival: f64,
    /// Position-basis diagonal of `rho_M`.
    pub diag_profile: Vec<f64>,
    /// Mean absolute off-diagonal element.
    pub offdiag_avg: f64,
}

impl TrajectoryRecord {
    fn from_state(step: usize, tau: f64, rho: &DensityMatrix) -> Self {
        Self {
            step,
            time: step as f64 * tau,
            survival: rho.survival(),
            diag_profile: rho.diag_profile(),
            offdiag_avg: rho.offdiag_avg(),
        }
    }
}

/// Iterate the channel for `n_steps` measurements from `|0><0|`.
///
/// Returns `n_steps + 1` records, the initial state included.
pub fn evolve(spec: &ModelSpec, tau: f64, n_steps: usize) -> Result<Vec<TrajectoryRecord>> {
    let (records, _) = evolve_recording(spec, tau, n_steps, &[])?;
    Ok(records)
}

/// Per-step observables plus full density-matrix snapshots at chosen steps.
pub type RecordedTrajectory = (Vec<TrajectoryRecord>, Vec<(usize, DensityMatrix)>);

/// Like [`evolve`], additionally returning full density-matrix snapshots at
/// the requested step indices (observables are cheap, snapshots are not).
pub fn evolve_recording(
    spec: &ModelSpec,
    tau: f64,
    n_steps: usize,
    snapshot_steps: &[usize],
) -> Result<RecordedTrajectory> {
    if n_steps < 1 {
        return Err(Error::InvalidArgument("n_steps must be at least 1".into()));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tau must be finite and > 0, got {tau}"
        )));
    }
    let h = build_hamiltonian(spec)?;
    let eig = diagonalize(&h)?;
    let u = propagate(&eig, tau);

    let mut rho = initial_state(spec.dim());
    let mut records = Vec::with_capacity(n_steps + 1);
    let mut snapshots = Vec::new();
    records.push(TrajectoryRecord::from_state(0, tau, &rho));
    if snapshot_steps.contains(&0) {
        snapshots.push((0, rho.clone()));
    }
    for m in 1..=n_steps {
        rho = step(&rho, &u)?;
        records.push(TrajectoryRecord::from_state(m, tau, &rho));
        if snapshot_steps.contains(&m) {
            snapshots.push((m, rho.clone()));
        }
    }
    Ok((records, snapshots))
}

/// Population-front speed from threshold crossing times.
///
/// Each record yields an interpolated front position (the outermost chain
/// site whose occupation reaches the threshold). For each chain site in the
/// fit window, the first time `T_site` at which the front passed that site is
/// read off the front trajectory, and the slope of the least-squares line of
/// site index versus `T_site` is returned. Sites the front had already passed
/// at the first measurement cannot be located in time and are skipped;
/// locating crossings on the front trajectory rather than on raw per-site
/// series keeps sparse measurement grids (crossings quantized to multiples of
/// `tau`) and the speckled region behind the front from biasing the fit.
/// The default window `[5, N/2]` avoids dot-boundary effects and far-end
/// reflections.
pub fn front_velocity(records: &[TrajectoryRecord], threshold: f64) -> Result<f64> {
    let n = records
        .first()
        .map(|r| r.diag_profile.len().saturating_sub(1))
        .unwrap_or(0);
    front_velocity_in_window(records, threshold, 5, n / 2)
}

/// Outermost chain site at threshold occupation, linearly interpolated.
fn front_position(diag_profile: &[f64], threshold: f64) -> Option<f64> {
    let n = diag_profile.len() - 1;
    let site = (1..=n).rev().find(|&s| diag_profile[s] >= threshold)?;
    if site == n {
        return Some(n as f64);
    }
    let (p0, p1) = (diag_profile[site], diag_profile[site + 1]);
    Some(site as f64 + (p0 - threshold) / (p0 - p1))
}

/// [`front_velocity`] with an explicit site window `site_lo..=site_hi`.
pub fn front_velocity_in_window(
    records: &[TrajectoryRecord],
    threshold: f64,
    site_lo: usize,
    site_hi: usize,
) -> Result<f64> {
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
    let n = first.diag_profile.len() - 1;
    if n < 20 {
        return Err(Error::InvalidArgument(format!(
            "front fits need N >= 20 chain sites, got {n}"
        )));
    }
    if site_lo < 1 || site_hi > n || site_lo > site_hi {
        return Err(Error::InvalidArgument(format!(
            "bad fit window [{site_lo}, {site_hi}] for N = {n}"
        )));
    }

    let trajectory: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| front_position(&r.diag_profile, threshold).map(|pos| (r.time, pos)))
        .collect();

    let mut points: Vec<(f64, f64)> = Vec::new(); // (crossing time, site)
    for site in site_lo..=site_hi {
        let target = site as f64;
        for w in trajectory.windows(2) {
            let ((t0, pos0), (t1, pos1)) = (w[0], w[1]);
            if pos0 < target && pos1 >= target {
                points.push((t0 + (t1 - t0) * (target - pos0) / (pos1 - pos0), target));
                break;
            }
        }
    }
    if points.len() < 5 {
        return Err(Error::FrontNotDetected {
            crossed: points.len(),
        });
    }

    // least-squares slope of site (y) against crossing time (x)
    let m = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_l = points.iter().map(|p| p.1).sum::<f64>() / m;
    let mut cov = 0.0;
    let mut var = 0.0;
    for &(t, l) in &points {
        cov += (t - mean_t) * (l - mean_l);
        var += (t - mean_t) * (t - mean_t);
    }
    if var == 0.0 {
        return Err(Error::FrontNotDetected {
            crossed: points.len(),
        });
    }
    Ok(cov / var)
}
