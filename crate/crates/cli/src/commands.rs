//! The six subcommands. Each resolves its inputs from a validated
//! [`RunConfig`], writes its files through an [`OutputSession`], and returns
//! the process exit code.

use crate::config::{meta_for, Command, RunConfig};
use crate::output::{csv_line, fmt_float, OutputSession};
use anyhow::Context;
use serde::Serialize;
use zenosim_core as core;
use zenosim_core::{C64, DensityMatrix, TrajectoryRecord};

pub fn execute(cfg: &RunConfig) -> anyhow::Result<i32> {
    let mut session = OutputSession::create(&cfg.out_dir)?;
    let outcome = match cfg.command {
        Command::Evolve | Command::Tomography => run_evolve(cfg, &mut session),
        Command::Spectrum => run_spectrum(cfg, &mut session),
        Command::RateScan => run_rate_scan(cfg, &mut session),
        Command::TwoLevel => run_two_level(cfg, &mut session),
        Command::CheckStationary => run_check_stationary(cfg, &mut session),
    };
    match outcome {
        Ok(code) => Ok(code),
        Err(e) => {
            session.discard();
            Err(e)
        }
    }
}

fn write_meta(
    cfg: &RunConfig,
    session: &mut OutputSession,
    notes: Option<String>,
) -> anyhow::Result<()> {
    let meta = meta_for(cfg, notes);
    let text = serde_json::to_string_pretty(&meta).context("serializing meta.json")?;
    session.write("meta.json", &(text + "\n"))?;
    Ok(())
}

fn trajectory_csv(records: &[TrajectoryRecord]) -> String {
    let n_sites = records[0].diag_profile.len();
    let mut header = vec!["step".into(), "time".into(), "survival".into(), "offdiag_avg".into()];
    header.extend((0..n_sites).map(|i| format!("diag_{i}")));
    let mut out = csv_line(&header) + "\n";
    for r in records {
        let mut cells = vec![
            r.step.to_string(),
            fmt_float(r.time),
            fmt_float(r.survival),
            fmt_float(r.offdiag_avg),
        ];
        cells.extend(r.diag_profile.iter().map(|&d| fmt_float(d)));
        out.push_str(&csv_line(&cells));
        out.push('\n');
    }
    out
}

/// D rows by 2D columns: real parts, then imaginary parts, row-major.
fn snapshot_csv(rho: &DensityMatrix) -> String {
    let d = rho.dim();
    let m = rho.matrix();
    let mut out = String::new();
    for i in 0..d {
        let mut cells = Vec::with_capacity(2 * d);
        for j in 0..d {
            cells.push(fmt_float(m[(i, j)].re));
        }
        for j in 0..d {
            cells.push(fmt_float(m[(i, j)].im));
        }
        out.push_str(&csv_line(&cells));
        out.push('\n');
    }
    out
}

fn run_evolve(cfg: &RunConfig, session: &mut OutputSession) -> anyhow::Result<i32> {
    let tau = cfg.tau.expect("validated");
    let n_steps = cfg.n_steps.expect("validated");
    let (records, snapshots) =
        core::evolve_recording(&cfg.spec, tau, n_steps, &cfg.snapshots)?;
    write_meta(cfg, session, None)?;
    session.write("trajectory.csv", &trajectory_csv(&records))?;
    for (step, rho) in &snapshots {
        session.write(&format!("rho_snapshot_{step}.csv"), &snapshot_csv(rho))?;
    }
    println!(
        "{}: wrote trajectory.csv ({} records) and {} snapshot(s) to {}",
        cfg.command.name(),
        records.len(),
        snapshots.len(),
        session.dir().display()
    );
    Ok(0)
}

fn run_spectrum(cfg: &RunConfig, session: &mut OutputSession) -> anyhow::Result<i32> {
    let tau = cfg.tau.expect("validated");
    let h = core::build_hamiltonian(&cfg.spec)?;
    let eig = core::diagonalize(&h)?;
    let u = core::propagate(&eig, tau);
    let dec = core::decompose(&core::build_superoperator(&u))?;

    let flagged = dec.flag_description();
    let mut out = String::from("index,lambda_re,lambda_im,lambda_modulus,weight_re,weight_im\n");
    for (n, lambda) in dec.eigenvalues().iter().enumerate() {
        let weight = if flagged.is_none() {
            dec.left_modes()[n][(0, 0)] * dec.right_modes()[n][(0, 0)]
        } else {
            C64::new(f64::NAN, f64::NAN)
        };
        out.push_str(&csv_line(&[
            n.to_string(),
            fmt_float(lambda.re),
            fmt_float(lambda.im),
            fmt_float(lambda.norm()),
            fmt_float(weight.re),
            fmt_float(weight.im),
        ]));
        out.push('\n');
    }
    let notes = flagged.clone().map(|f| format!("mode weights suppressed: {f}"));
    write_meta(cfg, session, notes)?;
    session.write("spectrum.csv", &out)?;
    if let Some(f) = flagged {
        eprintln!("warning: decomposition flagged ({f}); weight columns are nan");
    }
    println!(
        "spectrum: wrote {} eigenvalues (condition number {:.3e}) to {}",
        dec.eigenvalues().len(),
        dec.condition_number(),
        session.dir().display()
    );
    Ok(0)
}

fn run_rate_scan(cfg: &RunConfig, session: &mut OutputSession) -> anyhow::Result<i32> {
    let grid = cfg.tau_values.as_ref().expect("validated");
    let points = core::rate_scan(&cfg.spec, grid)?;
    let mut out = String::from("tau,tau_tilde,lambda1_modulus,gamma_rate,raw_rate,flags\n");
    let mut flagged_rows = 0usize;
    for p in &points {
        if !p.flags.is_empty() {
            flagged_rows += 1;
        }
        out.push_str(&csv_line(&[
            fmt_float(p.tau),
            fmt_float(p.tau_tilde),
            p.lambda1_modulus.map_or("nan".into(), fmt_float),
            p.gamma_rate.map_or("nan".into(), fmt_float),
            p.raw_rate.map_or("nan".into(), fmt_float),
            p.flags.join(";"),
        ]));
        out.push('\n');
    }
    write_meta(cfg, session, None)?;
    session.write("rates.csv", &out)?;
    println!(
        "rate-scan: wrote {} rows ({} flagged) to {}",
        points.len(),
        flagged_rows,
        session.dir().display()
    );
    Ok(0)
}

fn run_two_level(cfg: &RunConfig, session: &mut OutputSession) -> anyhow::Result<i32> {
    let tau = cfg.tau.expect("validated");
    let n_steps = cfg.n_steps.expect("validated");
    let params = core::TwoLevelParams {
        gamma: cfg.spec.gamma,
        epsilon: cfg.spec.epsilons[0],
        tau,
    };
    let records = core::evolve(&cfg.spec, tau, n_steps)?;
    let mut out = String::from("step,time,survival_closed,survival_iterated\n");
    for r in &records {
        out.push_str(&csv_line(&[
            r.step.to_string(),
            fmt_float(r.time),
            fmt_float(core::survival_closed_form(&params, r.step)),
            fmt_float(r.survival),
        ]));
        out.push('\n');
    }
    write_meta(cfg, session, None)?;
    session.write("two_level.csv", &out)?;
    println!(
        "two-level: T00 = {}, wrote {} rows to {}",
        fmt_float(params.t00()),
        records.len(),
        session.dir().display()
    );
    Ok(0)
}

#[derive(Serialize)]
struct StationarityReport {
    has_invariant_chain_state: bool,
    top_chain_eigenvalue_modulus: f64,
    unit_eigenspace_dimension_of_full_map: usize,
    unique_stationary_state: bool,
    /// Largest deviation of the unit eigenstate from I/(N+1); null when the
    /// unit eigenspace is degenerate.
    max_deviation_from_uniform: Option<f64>,
}

fn run_check_stationary(cfg: &RunConfig, session: &mut OutputSession) -> anyhow::Result<i32> {
    let tau = cfg.tau.expect("validated");
    let h = core::build_hamiltonian(&cfg.spec)?;
    let eig = core::diagonalize(&h)?;
    let u = core::propagate(&eig, tau);
    let report = core::chain_invariant_check(&u)?;

    let unique = report.unit_eigenspace_dimension_of_full_map == 1;
    let max_deviation_from_uniform = if unique {
        let dec = core::decompose(&core::build_superoperator(&u))?;
        let stationary = core::stationary_state(&dec)?;
        let d = cfg.spec.dim();
        let m = stationary.matrix();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { 1.0 / d as f64 } else { 0.0 };
                worst = worst.max((m[(i, j)] - C64::new(expect, 0.0)).norm());
            }
        }
        Some(worst)
    } else {
        None
    };

    let json = StationarityReport {
        has_invariant_chain_state: report.has_invariant_chain_state,
        top_chain_eigenvalue_modulus: report.top_chain_eigenvalue_modulus,
        unit_eigenspace_dimension_of_full_map: report.unit_eigenspace_dimension_of_full_map,
        unique_stationary_state: unique,
        max_deviation_from_uniform,
    };
    write_meta(cfg, session, None)?;
    session.write(
        "stationarity.json",
        &(serde_json::to_string_pretty(&json)? + "\n"),
    )?;
    println!(
        "check-stationary: unit eigenspace dimension {}, chain invariant: {} -> {}",
        report.unit_eigenspace_dimension_of_full_map,
        report.has_invariant_chain_state,
        if unique { "unique (exit 0)" } else { "non-unique (exit 3)" },
    );
    Ok(if unique { 0 } else { 3 })
}
