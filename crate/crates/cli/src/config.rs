//! Run configuration: JSON schema, validation, and resolution into the
//! concrete parameters a command needs.
//!
//! The emitted `meta.json` is itself a valid configuration (the resolved
//! extras live under `resolved`/`version`, which are ignored on input), so a
//! run can always be reproduced from its metadata.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use zenosim_core::ModelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Evolve,
    Tomography,
    Spectrum,
    RateScan,
    TwoLevel,
    CheckStationary,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Tomography => "tomography",
            Command::Spectrum => "spectrum",
            Command::RateScan => "rate-scan",
            Command::TwoLevel => "two-level",
            Command::CheckStationary => "check-stationary",
        }
    }

    fn wants_grid(self) -> bool {
        matches!(self, Command::RateScan)
    }

    fn wants_steps(self) -> bool {
        matches!(self, Command::Evolve | Command::Tomography | Command::TwoLevel)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    pub model: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_grid: Option<TauGridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<usize>,
    /// Fallback seed for random on-site energies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Written by the tool into `meta.json`; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved: Option<ResolvedMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Number of chain sites N; the total dimension is N + 1.
    pub n_chain: usize,
    /// Dot-chain coupling, in units of the chain hopping.
    pub gamma: f64,
    /// Chain hopping; the energy unit. Defaults to 1.
    #[serde(default = "default_gamma_c")]
    pub gamma_c: f64,
    /// Either an explicit list of N energies, or "zero" (default), or
    /// "random" for a seeded uniform [-0.5, 0.5] draw.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<EpsilonConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_seed: Option<u64>,
}

fn default_gamma_c() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonConfig {
    Values(Vec<f64>),
    Mode(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauGridConfig {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

fn default_spacing() -> Spacing {
    Spacing::Linear
}

/// Resolved values recorded back into `meta.json` for provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolvedMeta {
    pub epsilons: Vec<f64>,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_seed_used: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// A validated run: the lattice spec plus everything the command needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub spec: ModelSpec,
    pub tau: Option<f64>,
    pub tau_values: Option<Vec<f64>>,
    pub n_steps: Option<usize>,
    pub snapshots: Vec<usize>,
    pub out_dir: PathBuf,
    /// The configuration as given, reused when emitting `meta.json`.
    pub file: ConfigFile,
}

pub fn load(path: &Path) -> anyhow::Result<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
}

pub fn resolve(
    file: ConfigFile,
    command: Command,
    out_override: Option<PathBuf>,
) -> anyhow::Result<RunConfig> {
    if let Some(declared) = &file.command {
        if declared != command.name() {
            bail!(
                "config declares command '{declared}' but '{}' was invoked",
                command.name()
            );
        }
    }

    let model = &file.model;
    let mut epsilon_seed = model.epsilon_seed;
    let epsilons = match &model.epsilons {
        None => vec![0.0; model.n_chain],
        Some(EpsilonConfig::Values(v)) => {
            epsilon_seed = None;
            v.clone()
        }
        Some(EpsilonConfig::Mode(mode)) => match mode.as_str() {
            "zero" => vec![0.0; model.n_chain],
            "random" => {
                let seed = model
                    .epsilon_seed
                    .or(file.seed)
                    .context("epsilons = \"random\" needs model.epsilon_seed or a top-level seed")?;
                epsilon_seed = Some(seed);
                ModelSpec::with_random_epsilons(model.n_chain, model.gamma, seed).epsilons
            }
            other => bail!("unknown epsilons mode '{other}' (expected \"zero\" or \"random\")"),
        },
    };
    let spec = ModelSpec {
        n_chain: model.n_chain,
        gamma: model.gamma,
        gamma_c: model.gamma_c,
        epsilons,
        epsilon_seed,
    };
    spec.validate().map_err(|e| anyhow::anyhow!("{e}"))?;

    let tau = file.tau;
    let tau_values = match (&file.tau, &file.tau_grid, command.wants_grid()) {
        (Some(_), Some(_), _) => bail!("config must set exactly one of tau / tau_grid, not both"),
        (None, None, _) => bail!("config must set one of tau / tau_grid"),
        (Some(t), None, false) => {
            if !(t.is_finite() && *t > 0.0) {
                bail!("tau must be finite and > 0, got {t}");
            }
            None
        }
        (None, Some(grid), true) => Some(materialize_grid(grid)?),
        (Some(_), None, true) => bail!("'{}' needs tau_grid, not a single tau", command.name()),
        (None, Some(_), false) => bail!("'{}' needs a single tau, not tau_grid", command.name()),
    };

    let n_steps = match (file.n_steps, command.wants_steps()) {
        (Some(0), _) => bail!("n_steps must be at least 1"),
        (Some(n), _) => Some(n),
        (None, true) => bail!("'{}' needs n_steps", command.name()),
        (None, false) => None,
    };

    let mut snapshots = file.snapshots.clone();
    snapshots.sort_unstable();
    snapshots.dedup();
    if !snapshots.is_empty() {
        if !matches!(command, Command::Evolve | Command::Tomography) {
            bail!("snapshots are only meaningful for evolve/tomography");
        }
        let max = n_steps.unwrap_or(0);
        if let Some(&bad) = snapshots.iter().find(|&&s| s > max) {
            bail!("snapshot step {bad} exceeds n_steps = {max}");
        }
    }
    if command == Command::Tomography && snapshots.is_empty() {
        bail!("tomography needs at least one snapshot step");
    }
    if command == Command::TwoLevel && spec.n_chain != 1 {
        bail!("two-level requires n_chain = 1, got {}", spec.n_chain);
    }

    let out_dir = out_override
        .or_else(|| file.output_dir.clone())
        .context("no output directory: set output_dir in the config or pass --out")?;

    Ok(RunConfig {
        command,
        spec,
        tau,
        tau_values,
        n_steps,
        snapshots,
        out_dir,
        file,
    })
}

fn materialize_grid(grid: &TauGridConfig) -> anyhow::Result<Vec<f64>> {
    if grid.count == 0 {
        bail!("tau_grid.count must be at least 1");
    }
    if !(grid.start.is_finite() && grid.stop.is_finite() && grid.start > 0.0) {
        bail!("tau_grid endpoints must be finite with start > 0");
    }
    if grid.stop < grid.start {
        bail!("tau_grid.stop must be >= tau_grid.start");
    }
    if grid.count == 1 {
        return Ok(vec![grid.start]);
    }
    let n = (grid.count - 1) as f64;
    let values = match grid.spacing {
        Spacing::Linear => (0..grid.count)
            .map(|i| grid.start + (grid.stop - grid.start) * i as f64 / n)
            .collect(),
        Spacing::Log => {
            let (a, b) = (grid.start.ln(), grid.stop.ln());
            (0..grid.count)
                .map(|i| (a + (b - a) * i as f64 / n).exp())
                .collect()
        }
    };
    Ok(values)
}

/// The `meta.json` contents for a resolved run.
pub fn meta_for(cfg: &RunConfig, notes: Option<String>) -> ConfigFile {
    let mut meta = cfg.file.clone();
    meta.command = Some(cfg.command.name().to_string());
    meta.output_dir = Some(cfg.out_dir.clone());
    meta.resolved = Some(ResolvedMeta {
        epsilons: cfg.spec.epsilons.clone(),
        dim: cfg.spec.dim(),
        epsilon_seed_used: cfg.spec.epsilon_seed,
        tau_values: cfg.tau_values.clone(),
        notes,
    });
    meta.version = Some(env!("CARGO_PKG_VERSION").to_string());
    meta
}
