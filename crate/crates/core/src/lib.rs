//! Numerics for the periodic Zakharov-Shabat and Hill spectral problems and
//! the mKdV and NLS hierarchies linked by the diagonal embedding `u -> (u, u)`.
//!
//! The crate computes discriminants, periodic spectra, canonical roots,
//! contour-integral actions, hierarchy Hamiltonians with their gradients,
//! and pseudo-spectral flows, then checks the identities that tie them
//! together in [`verify`].

pub mod error;
pub mod grid;
pub mod linalg;
pub mod potential;
pub mod transfer;
pub mod discriminant;
pub mod roots;
pub mod spectrum;
pub mod abelian;
pub mod hierarchy;
pub mod flows;
pub mod corpus;
pub mod verify;

pub use abelian::{ActionKind, ActionRecord, Contour, HillCurve, SpectralCurve, ZsCurve};
pub use discriminant::{hill_delta, zs_delta, DiscriminantSample, GradientField};
pub use error::{Error, Result};
pub use flows::{FlowField, FlowSpec, Trajectory};
pub use grid::GridFunction;
pub use hierarchy::{Family, HamiltonianId, State};
pub use linalg::Mat2;
pub use num_complex::Complex64;
pub use potential::{ClassTag, Potential, PotentialFile, Transform};
pub use spectrum::{hill_spectrum, zs_spectrum, Disc, SpectrumEntry, SpectrumTable};
pub use transfer::{HillSystem, LinearSystem, OperatorKind, TransferConfig, ZsSystem};
pub use verify::{CheckResult, Report, Tolerances, VerifyConfig};
