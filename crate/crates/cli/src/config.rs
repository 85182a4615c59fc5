//! Flags, the optional JSON config file, and their merge into a
//! [`RunConfig`]. Flags override the file; the file overrides defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use zslab_core::flows::FlowField;
use zslab_core::verify::Tolerances;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Discriminant,
    Spectrum,
    Actions,
    Verify,
    Flow,
    Hamiltonians,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    /// Zakharov-Shabat operator of the pair `(phi_-, phi_+)`.
    #[default]
    Zs,
    /// Hill operator with the Miura potential of `phi_-`; needs a diagonal input.
    Hill,
}

/// Tolerance overrides are given as `--tol.<name> <value>` or
/// `--tol.<name>=<value>`; see `--help` for the names.
#[derive(Debug, Default, Parser)]
#[command(name = "zslab", version, about = "Spectral numerics for periodic ZS/Hill operators and the NLS/mKdV hierarchies")]
pub struct Flags {
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    /// Potential JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Result file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON file with any of these settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_modes: Option<usize>,
    /// Spectral clusters `|n| <= n_spec`.
    #[arg(long)]
    pub n_spec: Option<usize>,
    /// Action levels `k`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub levels: Option<Vec<i64>>,
    /// Contour nodes for actions.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, value_enum)]
    pub operator: Option<Operator>,
    /// mkdv_defocusing, mkdv_focusing, nls_system or s4_system.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Trajectory CSV for `flow`.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// Seed of the verification corpus.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Size of each verification corpus family.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_max: Option<f64>,
    /// Sweep points for `discriminant`.
    #[arg(long)]
    pub points: Option<usize>,
}

/// The config-file mirror of [`Flags`].
#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<Command>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub n_modes: Option<usize>,
    pub n_spec: Option<usize>,
    pub levels: Option<Vec<i64>>,
    pub nodes: Option<usize>,
    pub operator: Option<Operator>,
    pub field: Option<String>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub trajectory: Option<PathBuf>,
    pub seed: Option<u64>,
    pub count: Option<usize>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub points: Option<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub tolerances: Tolerances,
    pub n_modes: Option<usize>,
    pub n_spec: usize,
    pub levels: Vec<i64>,
    pub nodes: Option<usize>,
    pub operator: Operator,
    pub field: Option<FlowField>,
    pub t_end: f64,
    pub dt: f64,
    pub trajectory: Option<PathBuf>,
    pub seed: u64,
    pub count: usize,
    pub lambda_range: (f64, f64),
    pub points: usize,
}

/// Pulls `--tol.<name>` overrides out of the argument list.
pub fn split_tolerances(args: Vec<String>) -> Result<(Vec<String>, Vec<(String, f64)>), CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut tols = Vec::new();
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let Some(spec) = arg.strip_prefix("--tol.") else {
            rest.push(arg);
            continue;
        };
        let (name, value) = match spec.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| CliError::Usage(format!("--tol.{spec} needs a value")))?;
                (spec.to_string(), v)
            }
        };
        let value: f64 = value
            .parse()
            .map_err(|_| CliError::Usage(format!("--tol.{name}: {value:?} is not a number")))?;
        tols.push((name, value));
    }
    Ok((rest, tols))
}

fn read_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn from_args(args: Vec<String>) -> Result<Self, CliError> {
        let (args, tol_flags) = split_tolerances(args)?;
        let flags = Flags::try_parse_from(args).map_err(CliError::Clap)?;
        let file = match &flags.config {
            Some(p) => read_file_config(p)?,
            None => FileConfig::default(),
        };
        Self::merge(flags, file, tol_flags)
    }

    pub fn merge(flags: Flags, file: FileConfig, tol_flags: Vec<(String, f64)>) -> Result<Self, CliError> {
        let command = flags
            .command
            .or(file.command)
            .ok_or_else(|| CliError::Usage("no --command given".into()))?;
        let mut tolerances = Tolerances::default();
        for (name, value) in file.tolerances.iter().map(|(k, v)| (k.clone(), *v)).chain(tol_flags) {
            tolerances
                .set(&name, value)
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
        let field = flags
            .field
            .or(file.field)
            .map(|f| FlowField::parse(&f))
            .transpose()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let cfg = RunConfig {
            command,
            input: flags.input.or(file.input),
            output: flags.output.or(file.output),
            tolerances,
            n_modes: flags.n_modes.or(file.n_modes),
            n_spec: flags.n_spec.or(file.n_spec).unwrap_or(4),
            levels: flags.levels.or(file.levels).unwrap_or_else(|| vec![1]),
            nodes: flags.nodes.or(file.nodes),
            operator: flags.operator.or(file.operator).unwrap_or_default(),
            field,
            t_end: flags.t_end.or(file.t_end).unwrap_or(0.05),
            dt: flags.dt.or(file.dt).unwrap_or(1e-5),
            trajectory: flags.trajectory.or(file.trajectory),
            seed: flags.seed.or(file.seed).unwrap_or(zslab_core::corpus::DEFAULT_SEED),
            count: flags.count.or(file.count).unwrap_or(zslab_core::corpus::DEFAULT_COUNT),
            lambda_range: (
                flags.lambda_min.or(file.lambda_min).unwrap_or(-10.0),
                flags.lambda_max.or(file.lambda_max).unwrap_or(10.0),
            ),
            points: flags.points.or(file.points).unwrap_or(201),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let usage = |m: &str| Err(CliError::Usage(m.into()));
        if self.command != Command::Verify {
            match &self.input {
                None => return usage("--input is required for this command"),
                Some(p) if !p.is_file() => {
                    return Err(CliError::Usage(format!("input {} is not a readable file", p.display())))
                }
                _ => {}
            }
        }
        for p in self.output.iter().chain(&self.trajectory) {
            let parent = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            if !parent.is_dir() {
                return Err(CliError::Usage(format!("output directory {} does not exist", parent.display())));
            }
        }
        if self.n_modes == Some(0) {
            return usage("--n-modes must be positive");
        }
        if self.nodes.is_some_and(|n| n < 8 || n % 2 == 1) {
            return usage("--nodes must be even and at least 8");
        }
        if !(self.dt > 0.0 && self.t_end >= 0.0 && self.dt.is_finite() && self.t_end.is_finite()) {
            return usage("--dt must be positive and --t-end non-negative");
        }
        if self.command == Command::Flow && self.field.is_none() {
            return usage("flow needs --field");
        }
        let (lo, hi) = self.lambda_range;
        if !(lo < hi) || self.points < 2 {
            return usage("discriminant sweep needs lambda_min < lambda_max and at least 2 points");
        }
        if self.levels.is_empty() {
            return usage("--levels is empty");
        }
        if self.count == 0 {
            return usage("--count must be positive");
        }
        Ok(())
    }
}
