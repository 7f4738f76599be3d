//! Closed-form solution for the single-site chain (N = 1).
//!
//! With one chain level the measurement erases all coherence, so the dot
//! population follows a two-state Markov chain with the doubly stochastic
//! transition matrix `T_ij = |<i|U(tau)|j>|^2`, and the survival probability
//! has the closed form `p_M = (1 + (2 T_00 - 1)^M) / 2`.
//!
//! This module intentionally shares no code with the numerical pipeline
//! (its own 2x2 trigonometry only) so it can serve as a genuine
//! cross-implementation oracle.

/// Parameters of the dot plus single-level chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelParams {
    /// Dot-chain coupling, > 0.
    pub gamma: f64,
    /// Chain on-site energy relative to the dot.
    pub epsilon: f64,
    /// Time between measurements, > 0.
    pub tau: f64,
}

impl TwoLevelParams {
    /// Oscillation frequency `Omega = sqrt(gamma^2 + epsilon^2 / 4)`.
    pub fn omega(&self) -> f64 {
        (self.gamma * self.gamma + self.epsilon * self.epsilon / 4.0).sqrt()
    }

    /// Return probability `T_00 = 1 - (gamma/Omega)^2 sin^2(Omega tau)`.
    pub fn t00(&self) -> f64 {
        let omega = self.omega();
        if omega == 0.0 {
            return 1.0; // decoupled resonant limit
        }
        let ratio = self.gamma / omega;
        1.0 - ratio * ratio * (omega * self.tau).sin().powi(2)
    }
}

/// Survival probability after `m` measurements, `p_M = (1 + (2 T_00 - 1)^M) / 2`.
pub fn survival_closed_form(params: &TwoLevelParams, m: usize) -> f64 {
    let base = 2.0 * params.t00() - 1.0;
    0.5 * (1.0 + base.powi(m as i32))
}

/// The doubly stochastic 2x2 transition matrix of the measured populations.
pub fn transition_matrix(params: &TwoLevelParams) -> [[f64; 2]; 2] {
    let t00 = params.t00();
    [[t00, 1.0 - t00], [1.0 - t00, t00]]
}
