//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).

mod common;

use common::{criterion, linear_fit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use zenosim_core::*;

#[test]
fn criterion_01_infinite_temperature_convergence() {
    criterion(1, "infinite-temperature convergence", || {
        let spec = ModelSpec::uniform(9, 1.0);
        let (records, snapshots) = evolve_recording(&spec, 1.0, 200, &[200]).unwrap();

        let at_50 = &records[50];
        assert!((at_50.time - 50.0).abs() < 1e-12);
        for (site, &d) in at_50.diag_profile.iter().enumerate() {
            assert!(
                (d - 0.1).abs() <= 2e-2,
                "site {site}: diagonal {d} at T=50 outside 0.1 +- 2e-2"
            );
        }
        assert!(
            at_50.offdiag_avg < 1e-2,
            "offdiag average {} at T=50",
            at_50.offdiag_avg
        );

        let (_, rho_200) = &snapshots[0];
        let mixed = faer::Scale(C64::new(0.1, 0.0)) * faer::Mat::<C64>::identity(10, 10);
        let dev = linalg::max_abs_diff(rho_200.matrix(), mixed.as_ref());
        assert!(dev < 1e-3, "deviation from I/10 at T=200 is {dev:.3e}");
    });
}

#[test]
fn criterion_02_random_chain_convergence() {
    criterion(2, "random-chain convergence", || {
        let spec = ModelSpec::with_random_epsilons(4, 1.0, 7);
        let records = evolve(&spec, 1.0, 60).unwrap();

        for &d in &records.last().unwrap().diag_profile {
            assert!((d - 0.2).abs() <= 1e-2, "diagonal {d} did not reach 0.2");
        }

        // exponential decay of the off-diagonal average over the decaying
        // window: from the post-step peak down to the noise floor
        let peak = records
            .iter()
            .skip(1)
            .enumerate()
            .max_by(|a, b| a.1.offdiag_avg.total_cmp(&b.1.offdiag_avg))
            .unwrap()
            .0
            + 1;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for r in &records[peak..] {
            if r.offdiag_avg > 1e-13 {
                xs.push(r.time);
                ys.push(r.offdiag_avg.ln());
            }
        }
        let fit = linear_fit(&xs, &ys);
        assert!(fit.slope < 0.0, "off-diagonals must decay");
        assert!(
            fit.r_squared > 0.95,
            "exponential fit R^2 = {} over {} points",
            fit.r_squared,
            xs.len()
        );
    });
}

#[test]
fn criterion_03_front_velocity() {
    criterion(3, "front velocity", || {
        let spec = ModelSpec::uniform(50, 1.0);
        for (tau, n_steps) in [(0.2, 150), (5.0, 12)] {
            let records = evolve(&spec, tau, n_steps).unwrap();
            let v = front_velocity(&records, 1e-3).unwrap();
            assert!(
                (v - 2.0).abs() <= 0.2,
                "tau={tau}: front velocity {v} outside 2.0 +- 0.2"
            );
        }
    });
}

#[test]
fn criterion_04_zeno_regime() {
    criterion(4, "Zeno regime", || {
        let spec = ModelSpec::uniform(9, 1.0);
        let records = evolve(&spec, 0.01, 1000).unwrap();
        let p = records.last().unwrap().survival;
        assert!(p > 0.9, "survival {p} after 1000 measurements at tau=0.01");

        // survival at fixed T=5 decreases monotonically with tau
        let mut previous = f64::INFINITY;
        for tau in [0.01_f64, 0.02, 0.05, 0.1, 0.2, 0.5] {
            let steps = (5.0 / tau).round() as usize;
            let records = evolve(&spec, tau, steps).unwrap();
            let last = records.last().unwrap();
            assert!((last.time - 5.0).abs() < 1e-9);
            assert!(
                last.survival < previous,
                "tau={tau}: survival {} broke monotone ordering",
                last.survival
            );
            previous = last.survival;
        }
    });
}

#[test]
fn criterion_05_asymptote() {
    criterion(5, "survival asymptote", || {
        let spec = ModelSpec::uniform(9, 1.0);
        let records = evolve(&spec, 0.5, 1000).unwrap();
        // converged: the whole late tail sits on P* = 0.1
        for r in &records[900..] {
            assert!(
                (r.survival - 0.1).abs() < 1e-3,
                "survival {} at T={} off the 0.1 asymptote",
                r.survival,
                r.time
            );
        }
    });
}

#[test]
fn criterion_06_two_level_oracle() {
    criterion(6, "two-level closed form vs pipeline", || {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for case in 0..200 {
            let gamma = rng.random_range(0.1..2.0);
            let epsilon = rng.random_range(-2.0..2.0);
            let tau = rng.random_range(0.05..4.0);
            let params = TwoLevelParams { gamma, epsilon, tau };
            let spec = ModelSpec::with_epsilons(1, gamma, vec![epsilon]);
            let records = evolve(&spec, tau, 50).unwrap();
            for r in &records {
                let closed = survival_closed_form(&params, r.step);
                assert!(
                    (r.survival - closed).abs() <= 1e-12,
                    "case {case} (gamma={gamma}, eps={epsilon}, tau={tau}) step {}: \
                     pipeline {} vs closed {}",
                    r.step,
                    r.survival,
                    closed
                );
            }
        }

        // exceptional point: Omega tau = 2 pi means T00 = 1 and p_M = 1 forever
        let params = TwoLevelParams {
            gamma: 1.0,
            epsilon: 0.0,
            tau: 2.0 * PI,
        };
        let spec = ModelSpec::uniform(1, 1.0);
        let records = evolve(&spec, 2.0 * PI, 50).unwrap();
        for r in &records {
            assert!((survival_closed_form(&params, r.step) - 1.0).abs() <= 1e-12);
            assert!(
                (r.survival - 1.0).abs() <= 1e-12,
                "step {}: survival {} at the matched period",
                r.step,
                r.survival
            );
        }
    });
}

#[test]
fn criterion_07_spectral_expansion() {
    criterion(7, "spectral expansion vs direct iteration", || {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for n in 1..=5 {
            for case in 0..20 {
                let gamma = rng.random_range(0.2..1.5);
                let tau = rng.random_range(0.1..3.0);
                let spec = ModelSpec::uniform(n, gamma);
                let h = build_hamiltonian(&spec).unwrap();
                let eig = diagonalize(&h).unwrap();
                let u = propagate(&eig, tau);
                let dec = decompose(&build_superoperator(&u)).unwrap();
                assert!(
                    !dec.is_flagged(),
                    "N={n} case {case} (gamma={gamma}, tau={tau}) flagged: {:?}",
                    dec.flag_description()
                );
                let expansion = survival_spectral(&dec, 100).unwrap();
                let iteration = evolve(&spec, tau, 100).unwrap();
                for (p, r) in expansion.iter().zip(&iteration) {
                    assert!(
                        (p - r.survival).abs() <= 1e-8,
                        "N={n} case {case} (gamma={gamma}, tau={tau}) step {}: {} vs {}",
                        r.step,
                        p,
                        r.survival
                    );
                }
            }
        }
    });
}

#[test]
fn criterion_08_rate_universality() {
    criterion(8, "rate universality and erratic regime", || {
        // universal tau^2 growth: log-log slope 2 +- 0.1 per coupling, and the
        // four scaled curves collapse within 15% over the fit window
        let tau_tilde_grid: Vec<f64> = (0..12)
            .map(|i| {
                let f = i as f64 / 11.0;
                (0.05_f64.ln() * (1.0 - f) + 0.3_f64.ln() * f).exp()
            })
            .collect();
        let mut curves: Vec<Vec<f64>> = Vec::new();
        for gamma in [0.25, 0.5, 0.75, 1.0] {
            let spec = ModelSpec::uniform(9, gamma);
            let h = build_hamiltonian(&spec).unwrap();
            let eig = diagonalize(&h).unwrap();
            let t_star = tau_star(&eig).unwrap();
            let grid: Vec<f64> = tau_tilde_grid.iter().map(|tt| tt * t_star).collect();
            let points = rate_scan(&spec, &grid).unwrap();
            let rates: Vec<f64> = points
                .iter()
                .map(|p| p.gamma_rate.expect("clean point in the Zeno window"))
                .collect();
            let log_tt: Vec<f64> = points.iter().map(|p| p.tau_tilde.ln()).collect();
            let log_rate: Vec<f64> = rates.iter().map(|g| g.ln()).collect();
            let fit = linear_fit(&log_tt, &log_rate);
            assert!(
                (fit.slope - 2.0).abs() <= 0.1,
                "gamma={gamma}: log-log slope {}",
                fit.slope
            );
            curves.push(rates);
        }
        for a in 0..curves.len() {
            for b in (a + 1)..curves.len() {
                for (i, (x, y)) in curves[a].iter().zip(&curves[b]).enumerate() {
                    let rel = (x - y).abs() / x.max(*y);
                    assert!(
                        rel <= 0.15,
                        "curves {a} and {b} deviate {rel:.3} at grid point {i}"
                    );
                }
            }
        }

        // beyond tau*: erratic, non-monotone rate
        let spec = ModelSpec::uniform(9, 1.0);
        let h = build_hamiltonian(&spec).unwrap();
        let eig = diagonalize(&h).unwrap();
        let t_star = tau_star(&eig).unwrap();
        let grid: Vec<f64> = (0..100)
            .map(|i| (1.0 + 2.0 * i as f64 / 99.0) * t_star)
            .collect();
        let points = rate_scan(&spec, &grid).unwrap();
        let rates: Vec<f64> = points.iter().filter_map(|p| p.gamma_rate).collect();
        let mut sign_changes = 0;
        let diffs: Vec<f64> = rates.windows(2).map(|w| w[1] - w[0]).collect();
        for w in diffs.windows(2) {
            if w[0] * w[1] < 0.0 {
                sign_changes += 1;
            }
        }
        assert!(
            sign_changes >= 10,
            "only {sign_changes} sign changes of the discrete derivative over tau_tilde in [1, 3]"
        );
    });
}

#[test]
fn criterion_09_uniqueness_equivalence() {
    criterion(9, "fixed-point uniqueness vs chain invariants", || {
        let check = |spec: &ModelSpec, tau: f64, label: &str| {
            let h = build_hamiltonian(spec).unwrap();
            let eig = diagonalize(&h).unwrap();
            let u = propagate(&eig, tau);
            let report = chain_invariant_check(&u).unwrap();
            assert_eq!(
                report.has_invariant_chain_state,
                report.unit_eigenspace_dimension_of_full_map > 1,
                "{label}: chain invariant {} vs unit eigenspace dim {}",
                report.has_invariant_chain_state,
                report.unit_eigenspace_dimension_of_full_map
            );
            report
        };

        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        for case in 0..50 {
            let n = rng.random_range(1..=6);
            let gamma = rng.random_range(0.3..1.5);
            let tau = rng.random_range(0.2..3.0);
            let epsilons: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
            let spec = ModelSpec::with_epsilons(n, gamma, epsilons);
            check(&spec, tau, &format!("random case {case}"));
        }

        // constructed exceptional cases
        let decoupled = check(&ModelSpec::uniform(3, 0.0), 1.1, "gamma = 0");
        assert!(decoupled.has_invariant_chain_state);

        let matched = check(&ModelSpec::uniform(1, 1.0), 2.0 * PI, "Omega tau = 2 pi");
        assert!(matched.has_invariant_chain_state);
    });
}

#[test]
fn criterion_10_channel_invariants() {
    criterion(10, "channel invariant suites", || {
        // long-trajectory trace conservation
        let spec = ModelSpec::with_random_epsilons(6, 0.8, 31);
        let (records, snapshots) =
            evolve_recording(&spec, 0.9, 10_000, &[10, 1_000, 10_000]).unwrap();
        for r in &records {
            let trace: f64 = r.diag_profile.iter().sum();
            assert!((trace - 1.0).abs() <= 1e-10, "trace at step {}", r.step);
        }

        // hermiticity, positivity, dead coherences at sampled steps
        for (step, rho) in &snapshots {
            assert!(rho.hermiticity_error() <= 1e-12, "hermiticity at {step}");
            assert!(
                rho.min_eigenvalue().unwrap() >= -1e-9,
                "positivity at {step}"
            );
            for l in 1..rho.dim() {
                assert_eq!(rho.matrix()[(0, l)], C64::new(0.0, 0.0));
                assert_eq!(rho.matrix()[(l, 0)], C64::new(0.0, 0.0));
            }
        }

        // unitarity of produced propagators
        let h = build_hamiltonian(&spec).unwrap();
        let eig = diagonalize(&h).unwrap();
        for tau in [0.05, 0.9, 3.7, 12.0] {
            assert!(propagate(&eig, tau).unitarity_error() <= 1e-10, "tau={tau}");
        }

        // unit-disk spectrum and biorthogonality of the decomposition
        for (n, gamma, tau, seed) in [(4, 1.0, 1.0, 5), (3, 0.6, 2.2, 8), (5, 1.3, 0.4, 2)] {
            let spec = ModelSpec::with_random_epsilons(n, gamma, seed);
            let h = build_hamiltonian(&spec).unwrap();
            let eig = diagonalize(&h).unwrap();
            let u = propagate(&eig, tau);
            let dec = decompose(&build_superoperator(&u)).unwrap();
            assert!(dec.spectral_radius() <= 1.0 + 1e-9);
            assert!(dec.biorthogonality_error() <= 1e-8);
            assert!((dec.eigenvalues()[0] - C64::new(1.0, 0.0)).norm() <= 1e-9);
        }
    });
}
