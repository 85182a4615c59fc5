//! `zslab`: spectra, discriminants, actions, Hamiltonians, flows and the
//! identity-verification suite from the command line.
//!
//! Exit status: 0 success, 1 numerical failure (including a failed
//! verification), 2 usage or input error.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Clap(clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{module}: {source}")]
    Numerical {
        module: &'static str,
        source: zslab_core::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Clap(_) | CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Numerical { .. } => 1,
        }
    }
}

/// The library module a computational error comes from.
fn module_of(e: &zslab_core::Error) -> &'static str {
    use zslab_core::Error::*;
    match e {
        HarmonicOutOfRange { .. } | GridMismatch { .. } => "grid",
        Integration { .. } => "transfer",
        SingularConjugation(_) => "discriminant",
        Bracketing { .. } | OverlappingGaps { .. } => "spectrum",
        Branch { .. } | OnGap(_) | IllConditioned(_) => "abelian",
        ShapeMismatch(_) | BlowUp { .. } => "flows",
        Precondition { .. } => "hierarchy",
        Parse(_) => "input",
        InvalidArgument(_) => "arguments",
        PotentialClass { .. } => "potential",
    }
}

impl From<zslab_core::Error> for CliError {
    fn from(source: zslab_core::Error) -> Self {
        CliError::Numerical {
            module: module_of(&source),
            source,
        }
    }
}

fn main() -> ExitCode {
    let outcome = RunConfig::from_args(std::env::args().collect()).and_then(|cfg| commands::run(&cfg));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Clap(e)) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("zslab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
