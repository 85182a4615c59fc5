//! The identity-verification suite: finite-difference and convergence gates
//! followed by residual checks of every identity the library implements, run
//! over seeded potential corpora.
//!
//! Checks never panic on numerical failure. An error inside a check becomes a
//! failed [`CheckResult`] whose detail carries the error message.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian::{HillCurve, ZsCurve};
use crate::corpus;
use crate::discriminant::{delta, xi_identity_residual, zs_gradient};
use crate::error::{Error, Result};
use crate::flows::{self, Conserved, FlowField, FlowSpec, Subspace};
use crate::hierarchy::State;
use crate::grid::GridFunction;
use crate::hierarchy::{
    gradient_symmetry_residuals, identity_residuals, k_gradient, k_value, reflection_gradient_residual,
    s_gradient, s_value, HamiltonianId,
};
use crate::linalg::Mat2;
use crate::potential::{pairing, Potential, Transform};
use crate::transfer::{self, HillSystem, LinearSystem, TransferConfig, ZsSystem};

/// Smallest tolerance a caller may request.
pub const MIN_TOLERANCE: f64 = 1e-12;

/// Accepted observed order ratio of a fourth-order method against a finer
/// reference; the ideal values are 16 (transfer) and 17 (flows).
pub const CONVERGENCE_RANGE: (f64, f64) = (13.0, 21.0);

const FD_STEP: f64 = 1e-4;
const ROTATION: f64 = 0.7;

const DEFAULT_TOLERANCES: [(&str, f64); 18] = [
    ("discriminant_identity", 1e-7),
    ("free_discriminant", 1e-10),
    ("mean_identity", 1e-8),
    ("spectrum_squaring", 1e-6),
    ("spectrum_symmetry", 1e-8),
    ("gradient_relative", 1e-6),
    ("symmetry", 1e-6),
    ("hierarchy", 1e-9),
    ("reflection_identity", 1e-8),
    ("action_correspondence", 1e-6),
    ("zero_mean_action", 1e-8),
    ("trace_formula", 1e-4),
    ("action_parity", 1e-7),
    ("flow_restriction", 1e-6),
    ("diagonal_invariance", 1e-7),
    ("mean_drift", 1e-10),
    ("hamiltonian_drift", 1e-7),
    ("isospectral_drift", 1e-5),
];

/// Named residual bounds; every name has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Self(DEFAULT_TOLERANCES.iter().map(|&(k, v)| (k.to_string(), v)).collect())
    }
}

impl Tolerances {
    pub fn names() -> impl Iterator<Item = &'static str> {
        DEFAULT_TOLERANCES.iter().map(|&(k, _)| k)
    }

    pub fn get(&self, name: &str) -> f64 {
        *self.0.get(name).unwrap_or_else(|| panic!("unknown tolerance {name}"))
    }

    /// Overrides one bound. Unknown names and values below
    /// [`MIN_TOLERANCE`] are rejected.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !self.0.contains_key(name) {
            return Err(Error::InvalidArgument(format!(
                "unknown tolerance '{name}' (known: {})",
                Self::names().collect::<Vec<_>>().join(", ")
            )));
        }
        if !(value >= MIN_TOLERANCE) || !value.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "tolerance {name} = {value:e} is below the floor {MIN_TOLERANCE:e}"
            )));
        }
        self.0.insert(name.to_string(), value);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Size of each corpus family.
    pub count: usize,
    pub n_modes: usize,
    pub tolerances: Tolerances,
    pub flow_t_end: f64,
    pub flow_dt: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: corpus::DEFAULT_SEED,
            count: corpus::DEFAULT_COUNT,
            n_modes: crate::grid::DEFAULT_N_MODES,
            tolerances: Tolerances::default(),
            flow_t_end: 0.05,
            flow_dt: 1e-5,
        }
    }
}

impl VerifyConfig {
    fn real(&self) -> Vec<GridFunction> {
        corpus::real_corpus(self.seed, self.count, self.n_modes)
    }

    fn hermitian(&self) -> Vec<Potential> {
        corpus::hermitian_corpus(self.seed, self.count, self.n_modes)
    }

    fn tol(&self, name: &str) -> Bound {
        Bound::AtMost(self.tolerances.get(name))
    }
}

/// Which part of the suite a check belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    GradientOracle,
    ConvergenceOrder,
    DiscriminantIdentity,
    ClosedForms,
    Spectrum,
    Symmetry,
    Hierarchy,
    Actions,
    Flows,
}

impl Group {
    pub fn is_gate(self) -> bool {
        matches!(self, Group::GradientOracle | Group::ConvergenceOrder)
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::GradientOracle => "finite-difference gradient oracle",
            Group::ConvergenceOrder => "fourth-order convergence",
            Group::DiscriminantIdentity => "ZS/Hill discriminant identity",
            Group::ClosedForms => "closed-form discriminants",
            Group::Spectrum => "spectrum squaring and symmetry",
            Group::Symmetry => "P, T, R_alpha symmetry suite",
            Group::Hierarchy => "hierarchy identities",
            Group::Actions => "action variables",
            Group::Flows => "flow restriction and conservation",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within(f64, f64),
}

impl Bound {
    pub fn admits(self, x: f64) -> bool {
        match self {
            Bound::AtMost(t) => x <= t,
            Bound::AtLeast(t) => x >= t,
            Bound::Within(lo, hi) => (lo..=hi).contains(&x),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(t) => write!(f, "<= {t:e}"),
            Bound::AtLeast(t) => write!(f, ">= {t:e}"),
            Bound::Within(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

/// One verified identity: the worst residual over everything it was run on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub identity: String,
    pub group: Group,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    pub residual: f64,
    pub bound: Bound,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(group: Group, identity: impl Into<String>, m: Option<u32>, residual: Result<f64>, bound: Bound, detail: impl Into<String>) -> Self {
        let identity = identity.into();
        match residual {
            Ok(r) => Self {
                pass: bound.admits(r),
                identity,
                group,
                m,
                residual: r,
                bound,
                detail: detail.into(),
            },
            Err(e) => Self {
                identity,
                group,
                m,
                residual: f64::NAN,
                bound,
                pass: false,
                detail: format!("{}: {e}", detail.into()),
            },
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "pass" } else { "FAIL" };
        write!(f, "{verdict} [{}] {}", self.group, self.identity)?;
        if let Some(m) = self.m {
            write!(f, " (m = {m})")?;
        }
        write!(f, ": {:.3e} {}", self.residual, self.bound)?;
        if !self.detail.is_empty() {
            write!(f, "; {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub gates: Vec<CheckResult>,
    /// Empty when a gate failed: identity suites only run behind passing gates.
    pub checks: Vec<CheckResult>,
    pub gates_passed: bool,
    pub pass: bool,
}

impl Report {
    pub fn all(&self) -> impl Iterator<Item = &CheckResult> {
        self.gates.iter().chain(&self.checks)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.all().filter(|c| !c.pass).collect()
    }

    pub fn group(&self, g: Group) -> Vec<&CheckResult> {
        self.all().filter(|c| c.group == g).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }
}

/// Runs the gates and, if they pass, every identity suite.
pub fn run(cfg: &VerifyConfig) -> Report {
    let gates: Vec<CheckResult> = [gradient_gate(cfg), convergence_gate(cfg)].concat();
    let gates_passed = gates.iter().all(|c| c.pass);
    if !gates_passed {
        return Report {
            gates,
            checks: Vec::new(),
            gates_passed,
            pass: false,
        };
    }
    let suites: [fn(&VerifyConfig) -> Vec<CheckResult>; 7] = [
        discriminant_identity_checks,
        closed_form_checks,
        spectrum_checks,
        symmetry_checks,
        hierarchy_checks,
        action_checks,
        flow_checks,
    ];
    let checks: Vec<CheckResult> = suites.par_iter().map(|suite| suite(cfg)).collect::<Vec<_>>().concat();
    let pass = checks.iter().all(|c| c.pass);
    Report {
        gates,
        checks,
        gates_passed,
        pass,
    }
}

fn worst(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    values.into_iter().try_fold(0.0_f64, |acc, r| Ok(acc.max(r?)))
}

fn par_worst<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<f64> + Sync + Send) -> Result<f64> {
    worst(items.par_iter().map(f).collect::<Vec<_>>())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real_part(f: &GridFunction) -> GridFunction {
    f.map(|z| c(z.re, 0.0))
}

fn pair_norm_l2(p: &Potential) -> f64 {
    p.minus().norm_l2().hypot(p.plus().norm_l2())
}

/// `|FD - <grad, h>| / (|grad|_2 |h|_2)`: the directional-derivative error
/// relative to its Cauchy-Schwarz bound.
fn fd_error(f: impl Fn(&Potential) -> Result<Complex64>, grad: &Potential, phi: &Potential, h: &Potential) -> Result<f64> {
    let up = f(&phi.add(&h.scale(c(FD_STEP, 0.0))))?;
    let down = f(&phi.add(&h.scale(c(-FD_STEP, 0.0))))?;
    let fd = (up - down) / (2.0 * FD_STEP);
    let analytic = pairing(grad, h);
    Ok((fd - analytic).norm() / (pair_norm_l2(grad) * pair_norm_l2(h)))
}

/// Gradients of the discriminant, `K_1, K_2` and `S_1..S_4` against central
/// differences in ten seeded directions.
pub fn gradient_gate(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let n = cfg.n_modes;
    let dirs = corpus::directions(cfg.seed, 10, n);
    let mut pairs: Vec<Potential> = cfg.hermitian().into_iter().take(3).collect();
    pairs.extend(cfg.real().iter().take(2).map(Potential::diagonal));
    pairs.extend(corpus::directions(cfg.seed.wrapping_add(1), 2, n).iter().map(|p| p.scale(c(0.5, 0.0))));
    let scalars: Vec<GridFunction> = cfg.real().into_iter().take(5).collect();
    let bound = cfg.tol("gradient_relative");
    let detail = format!("{} potentials x {} directions, step {FD_STEP:e}", pairs.len(), dirs.len());

    let lambdas = [c(1.3, 0.0), c(0.7, 0.3), c(-2.5, 0.6)];
    let delta_err = par_worst(&pairs, |phi| {
        worst(lambdas.iter().flat_map(|&lam| {
            let grad = zs_gradient(phi, lam).map(|g| g.as_potential());
            dirs.iter().map(move |h| {
                let grad = grad.as_ref().map_err(|e| Error::InvalidArgument(e.to_string()))?;
                fd_error(|p| Ok(delta(&ZsSystem::new(p), lam)?.value), grad, phi, h)
            })
        }))
    });
    let mut out = vec![CheckResult::new(
        Group::GradientOracle,
        "L2 gradient of the ZS discriminant",
        None,
        delta_err,
        bound,
        detail.clone(),
    )];
    for m in 1..=2 {
        let err = par_worst(&scalars, |u| {
            let grad = Potential::new(k_gradient(m, u)?, GridFunction::zeros(n))?;
            let phi = Potential::new(u.clone(), GridFunction::zeros(n))?;
            worst(dirs.iter().map(|h| {
                let h = Potential::new(real_part(h.minus()), GridFunction::zeros(n))?;
                fd_error(|p| k_value(m, p.minus()), &grad, &phi, &h)
            }))
        });
        out.push(CheckResult::new(
            Group::GradientOracle,
            format!("L2 gradient of K_{m}"),
            None,
            err,
            bound,
            format!("{} real potentials x {} real directions", scalars.len(), dirs.len()),
        ));
    }
    for k in 1..=4 {
        let err = par_worst(&pairs, |phi| {
            let grad = s_gradient(k, phi)?;
            worst(dirs.iter().map(|h| fd_error(|p| s_value(k, p), &grad, phi, h)))
        });
        out.push(CheckResult::new(
            Group::GradientOracle,
            format!("L2 gradient of S_{k}"),
            None,
            err,
            bound,
            detail.clone(),
        ));
    }
    out
}

fn ratio_check(identity: &str, ratio: Result<f64>, detail: &str) -> CheckResult {
    let (lo, hi) = CONVERGENCE_RANGE;
    CheckResult::new(Group::ConvergenceOrder, identity, None, ratio, Bound::Within(lo, hi), detail)
}

/// Observed order ratios of the transfer integrator and the flow stepper.
pub fn convergence_gate(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let n = cfg.n_modes;
    let phi = cfg.hermitian().into_iter().next().expect("nonempty corpus");
    let u = cfg.real().into_iter().next().expect("nonempty corpus");
    let zs = transfer::convergence_ratio(|tc| ZsSystem::with_config(&phi, tc), c(3.0, 0.5), 2);
    let hill = transfer::convergence_ratio(|tc| HillSystem::from_miura(&u, tc), c(10.0, 2.0), 2);

    let u0 = GridFunction::from_fn(n, |x| c(0.5 * (2.0 * PI * x).cos(), 0.0));
    let v0 = GridFunction::from_fn(n, |x| Complex64::from_polar(0.4, 2.0 * PI * x) + c(0.1, 0.2) * (4.0 * PI * x).cos());
    let flows: Vec<(FlowField, State)> = vec![
        (FlowField::MkdvDefocusing, State::Scalar(u0.clone())),
        (FlowField::S4System, State::Pair(Potential::diagonal(&u0))),
        (FlowField::NlsSystem, State::Pair(Potential::hermitian(&v0))),
    ];
    let flow_ratios: Vec<Result<f64>> = flows
        .par_iter()
        .map(|(field, s)| flows::convergence_ratio(s, *field, 0.01, 1e-4))
        .collect();

    let mut out = vec![
        ratio_check("transfer order ratio, ZS system", zs, "oversample 2 vs 4 against 32, lambda = 3 + 0.5i"),
        ratio_check("transfer order ratio, Hill system", hill, "oversample 2 vs 4 against 32, mu = 10 + 2i"),
    ];
    for ((field, _), r) in flows.iter().zip(flow_ratios) {
        out.push(ratio_check(
            &format!("time-step order ratio, {}", field.name()),
            r,
            "dt = 1e-4 vs 5e-5 against 2.5e-5 up to t = 0.01",
        ));
    }
    out
}

/// `15 x 15` grid on `[-6, 6]^2`.
pub fn lambda_grid() -> Vec<Complex64> {
    let axis: Vec<f64> = (0..15).map(|j| -6.0 + 12.0 * j as f64 / 14.0).collect();
    axis.iter().flat_map(|&re| axis.iter().map(move |&im| c(re, im))).collect()
}

/// `Delta_mKdV(lambda^2, u) = Delta(lambda, (u, u))` on the corpus.
pub fn discriminant_identity_checks(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let grid = lambda_grid();
    let corpus = cfg.real();
    let err = par_worst(&corpus, |u| {
        let hill = HillSystem::from_miura(u, TransferConfig::default());
        let zs = ZsSystem::new(&Potential::diagonal(u));
        worst(grid.iter().map(|&lam| {
            let a = hill.monodromy(lam * lam, false)?.0.trace();
            let b = zs.monodromy(lam, false)?.0.trace();
            Ok((a - b).norm())
        }))
    });
    vec![CheckResult::new(
        Group::DiscriminantIdentity,
        "Delta_mKdV(lambda^2, u) = Delta(lambda, (u, u))",
        None,
        err,
        cfg.tol("discriminant_identity"),
        format!("{} real potentials on a 15 x 15 grid over [-6, 6]^2", corpus.len()),
    )]
}

/// `Delta(lambda, 0) = 2 cos lambda` and `Delta_mKdV(0, u) = 2 cosh [u]`.
pub fn closed_form_checks(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let zero = ZsSystem::new(&Potential::zero(cfg.n_modes));
    let free = worst(lambda_grid().iter().map(|&lam| Ok((zero.monodromy(lam, false)?.0.trace() - 2.0 * lam.cos()).norm())));
    let corpus = cfg.real();
    let mean = par_worst(&corpus, crate::abelian::mean_identity_residual);
    vec![
        CheckResult::new(
            Group::ClosedForms,
            "Delta(lambda, 0) = 2 cos lambda",
            None,
            free,
            cfg.tol("free_discriminant"),
            "15 x 15 grid over [-6, 6]^2",
        ),
        CheckResult::new(
            Group::ClosedForms,
            "Delta_mKdV(0, u) = 2 cosh(mean u)",
            None,
            mean,
            cfg.tol("mean_identity"),
            format!("{} real potentials", corpus.len()),
        ),
    ]
}

const SPECTRUM_RANGE: i64 = 6;

/// Squaring of the ZS spectrum onto the Hill spectrum and `lambda -> -lambda`
/// symmetry of the diagonal ZS spectrum, `|n| <= 6`.
pub fn spectrum_checks(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let corpus = cfg.real();
    let n_spec = SPECTRUM_RANGE as usize;
    let tables: Vec<Result<(crate::spectrum::SpectrumTable, crate::spectrum::SpectrumTable)>> = corpus
        .par_iter()
        .map(|u| {
            Ok((
                crate::spectrum::zs_spectrum(&Potential::diagonal(u), n_spec)?,
                crate::spectrum::hill_spectrum(u, n_spec)?,
            ))
        })
        .collect();
    let squaring = worst(tables.iter().map(|t| {
        let (zs, hill) = t.as_ref().map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let mut r: f64 = 0.0;
        let zero = zs.entry(0).ok_or_else(|| Error::InvalidArgument("missing ZS cluster 0".into()))?;
        let ground = hill.ground_state.ok_or_else(|| Error::InvalidArgument("missing Hill ground state".into()))?;
        r = r.max((ground - zero.lam_plus * zero.lam_plus).abs());
        for n in 1..=SPECTRUM_RANGE {
            let (a, b) = match (zs.entry(n), hill.entry(n)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::InvalidArgument(format!("missing cluster {n}"))),
            };
            r = r
                .max((b.lam_minus - a.lam_minus * a.lam_minus).abs())
                .max((b.lam_plus - a.lam_plus * a.lam_plus).abs());
        }
        Ok(r)
    }));
    let symmetry = worst(tables.iter().map(|t| {
        let (zs, _) = t.as_ref().map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let mut r: f64 = 0.0;
        for n in 0..=SPECTRUM_RANGE {
            let (a, b) = match (zs.entry(n), zs.entry(-n)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::InvalidArgument(format!("missing cluster {n}"))),
            };
            r = r.max((b.lam_minus + a.lam_plus).abs()).max((b.lam_plus + a.lam_minus).abs());
        }
        Ok(r)
    }));
    let detail = format!("{} real potentials, |n| <= {SPECTRUM_RANGE}", corpus.len());
    vec![
        CheckResult::new(
            Group::Spectrum,
            "mu_n = lambda_n^2 (Hill vs ZS periodic spectrum)",
            None,
            squaring,
            cfg.tol("spectrum_squaring"),
            detail.clone(),
        ),
        CheckResult::new(
            Group::Spectrum,
            "lambda_(-n)^-+ = -lambda_n^+- on the diagonal",
            None,
            symmetry,
            cfg.tol("spectrum_symmetry"),
            detail,
        ),
    ]
}

const SYMMETRY_LAMBDAS: [(f64, f64); 3] = [(1.3, 0.0), (0.7, 0.4), (-2.2, 0.9)];
/// Off-axis points for the canonical root and `F`, away from every gap.
const ROOT_LAMBDAS: [(f64, f64); 3] = [(0.9, 0.5), (2.6, 0.7), (-4.1, 0.6)];
const SYMMETRY_CURVES: usize = 5;

fn mat_distance(a: Mat2, b: Mat2) -> f64 {
    (a - b).norm()
}

/// Residuals of the discriminant, derivative, gradient, xi and fundamental
/// matrix symmetries at one potential.
fn pointwise_symmetries(phi: &Potential) -> Result<[f64; 7]> {
    let p = phi.transform(Transform::P);
    let t = phi.transform(Transform::T);
    let r = phi.transform(Transform::R(ROTATION));
    let (sys, sys_p, sys_t, sys_r) = (ZsSystem::new(phi), ZsSystem::new(&p), ZsSystem::new(&t), ZsSystem::new(&r));
    let mut res = [0.0_f64; 7];
    for &(re, im) in &SYMMETRY_LAMBDAS {
        let lam = c(re, im);
        let d = delta(&sys, lam)?;
        let (dp, dt, dr) = (delta(&sys_p, -lam)?, delta(&sys_t, -lam)?, delta(&sys_r, lam)?);
        res[0] = res[0]
            .max((d.value - dp.value).norm())
            .max((d.value - dt.value).norm())
            .max((d.value - dr.value).norm());
        res[1] = res[1]
            .max((d.dvalue + dp.dvalue).norm())
            .max((d.dvalue + dt.dvalue).norm())
            .max((d.dvalue - dr.dvalue).norm());

        let g = zs_gradient(phi, lam)?.as_potential();
        let gp = zs_gradient(&p, -lam)?.as_potential().transform(Transform::P);
        let gt = zs_gradient(&t, -lam)?.as_potential().transform(Transform::T);
        let gr = zs_gradient(&r, lam)?.as_potential().transform(Transform::R(ROTATION));
        res[2] = res[2].max(g.distance(&gp)).max(g.distance(&gt)).max(g.distance(&gr));

        let xi = xi_identity_residual(phi, lam)?;
        res[3] = res[3].max(xi.residual);
        let xp = xi_identity_residual(&p, -lam)?.xi;
        let xt = xi_identity_residual(&t, -lam)?.xi.reflect();
        let xr = xi_identity_residual(&r, lam)?.xi;
        res[4] = res[4]
            .max(xi.xi.max_abs_diff(&xp.scale(c(-1.0, 0.0))))
            .max(xi.xi.max_abs_diff(&xt.scale(c(-1.0, 0.0))))
            .max(xi.xi.max_abs_diff(&xr));

        let e = Complex64::from_polar(1.0, ROTATION);
        for x in [0.37, 1.0] {
            let m = sys.fundamental(lam, x, false)?.m;
            let mp = sys_p.fundamental(-lam, x, false)?.m;
            let mr = sys_r.fundamental(lam, x, false)?.m;
            let swapped = Mat2::new(m.get(1, 1), -m.get(1, 0), -m.get(0, 1), m.get(0, 0));
            let rotated = Mat2::new(m.get(0, 0), e * m.get(0, 1), e.conj() * m.get(1, 0), m.get(1, 1));
            res[5] = res[5].max(mat_distance(mp, swapped)).max(mat_distance(mr, rotated));
        }
        let m1 = sys.monodromy(lam, false)?.0;
        let mt = sys_t.monodromy(-lam, false)?.0;
        let reflected = Mat2::new(m1.get(1, 1), m1.get(0, 1), m1.get(1, 0), m1.get(0, 0));
        res[6] = res[6].max(mat_distance(mt, reflected));
    }
    Ok(res)
}

fn gap_near(z: Complex64) -> i64 {
    (z.re / PI).round() as i64
}

/// Canonical root and `F` symmetries; needs the spectral curves of the four
/// transformed potentials.
fn curve_symmetries(phi: &Potential) -> Result<[f64; 2]> {
    let n_spec = 4;
    let cfg = TransferConfig::default();
    let curve = ZsCurve::zs(phi, n_spec, cfg)?;
    let cp = ZsCurve::zs(&phi.transform(Transform::P), n_spec, cfg)?;
    let ct = ZsCurve::zs(&phi.transform(Transform::T), n_spec, cfg)?;
    let cr = ZsCurve::zs(&phi.transform(Transform::R(ROTATION)), n_spec, cfg)?;
    let mut res = [0.0_f64; 2];
    for &(re, im) in &ROOT_LAMBDAS {
        let z = c(re, im);
        let n = gap_near(z);
        let w = curve.canonical_root(z, n)?;
        let (wp, wt, wr) = (cp.canonical_root(-z, -n)?, ct.canonical_root(-z, -n)?, cr.canonical_root(z, n)?);
        res[0] = res[0].max((w + wp).norm()).max((w + wt).norm()).max((w - wr).norm());
        let f = curve.f_value(z, n)?;
        let (fp, ft, fr) = (cp.f_value(-z, -n)?, ct.f_value(-z, -n)?, cr.f_value(z, n)?);
        res[1] = res[1].max((f + fp).norm()).max((f + ft).norm()).max((f - fr).norm());
    }
    Ok(res)
}

/// Symmetries under the component swap `P`, the reflection `T` and the
/// rotation `R_alpha`, on the diagonal real and Hermitian corpora.
pub fn symmetry_checks(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut potentials: Vec<Potential> = cfg.real().iter().map(Potential::diagonal).collect();
    potentials.extend(cfg.hermitian());
    let pointwise: Vec<Result<[f64; 7]>> = potentials.par_iter().map(pointwise_symmetries).collect();
    let curve_set: Vec<Potential> = cfg
        .real()
        .iter()
        .take(SYMMETRY_CURVES)
        .map(Potential::diagonal)
        .chain(cfg.hermitian().into_iter().take(SYMMETRY_CURVES))
        .collect();
    let curves: Vec<Result<[f64; 2]>> = curve_set.par_iter().map(curve_symmetries).collect();

    let column = |rows: &[Result<[f64; 7]>], i: usize| worst(rows.iter().map(|r| r.as_ref().map(|a| a[i]).map_err(|e| Error::InvalidArgument(e.to_string()))));
    let column2 = |rows: &[Result<[f64; 2]>], i: usize| worst(rows.iter().map(|r| r.as_ref().map(|a| a[i]).map_err(|e| Error::InvalidArgument(e.to_string()))));
    let bound = cfg.tol("symmetry");
    let detail = format!("{} diagonal real and Hermitian potentials, alpha = {ROTATION}", potentials.len());
    let curve_detail = format!("{} potentials, lambda off the real axis", curve_set.len());
    let names = [
        "Delta(lambda, phi) = Delta(-lambda, P phi) = Delta(-lambda, T phi) = Delta(lambda, R phi)",
        "dDelta/dlambda is odd under P and T, invariant under R",
        "grad Delta(lambda, phi) = P grad Delta(-lambda, P phi) = T grad Delta(-lambda, T phi) = R grad Delta(lambda, R phi)",
        "d/dx grad Delta - 2 lambda R grad Delta = xi J phi",
        "xi(x, lambda, phi) = -xi(x, -lambda, P phi) = -xi(1 - x, -lambda, T phi) = xi(x, lambda, R phi)",
        "M(x, -lambda, P phi) = J M J^-1 and M(x, lambda, R phi) = R M R^-1",
        "M(1, -lambda, T phi) swaps the diagonal of M(1, lambda, phi)",
    ];
    let mut out: Vec<CheckResult> = names
        .iter()
        .enumerate()
        .map(|(i, name)| CheckResult::new(Group::Symmetry, *name, None, column(&pointwise, i), bound, detail.clone()))
        .collect();
    out.push(CheckResult::new(
        Group::Symmetry,
        "canonical root is odd under P and T, invariant under R",
        None,
        column2(&curves, 0),
        bound,
        curve_detail.clone(),
    ));
    out.push(CheckResult::new(
        Group::Symmetry,
        "F(lambda, phi) = -F(-lambda, P phi) = -F(-lambda, T phi) = F(lambda, R phi)",
        None,
        column2(&curves, 1),
        bound,
        curve_detail,
    ));
    out
}

/// Restriction identities between the mKdV and NLS hierarchies on the
/// diagonal, the reflection form of the gradient identity, and gradient
/// covariance of `S_1..S_4`.
pub fn hierarchy_checks(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let corpus = cfg.real();
    let rows: Vec<Result<Vec<crate::hierarchy::IdentityResidual>>> = corpus.par_iter().map(identity_residuals).collect();
    let bound = cfg.tol("hierarchy");
    let detail = format!("{} real potentials, grid max norm", corpus.len());
    let mut out = Vec::new();
    let template = identity_residuals(&GridFunction::zeros(cfg.n_modes)).unwrap_or_default();
    for (i, entry) in template.iter().enumerate() {
        let r = worst(rows.iter().map(|row| {
            row.as_ref()
                .map(|v| v[i].residual)
                .map_err(|e| Error::InvalidArgument(e.to_string()))
        }));
        out.push(CheckResult::new(Group::Hierarchy, entry.identity.clone(), Some(entry.m), r, bound, detail.clone()));
    }

    let reflective = corpus::reflection_symmetric_corpus(cfg.seed, cfg.count, cfg.n_modes);
    for m in 1..=2 {
        out.push(CheckResult::new(
            Group::Hierarchy,
            "R dS_2m = d/dx dS_(2m-1) + 2i (int_0^x R phi . dS_(2m-1)) J phi when T phi = phi",
            Some(m),
            par_worst(&reflective, |phi| reflection_gradient_residual(phi, m)),
            cfg.tol("reflection_identity"),
            format!("{} reflection-symmetric potentials", reflective.len()),
        ));
    }

    let hermitian = cfg.hermitian();
    for k in 1..=4 {
        out.push(CheckResult::new(
            Group::Hierarchy,
            format!("dS_{k} covariant under P, R_alpha and T"),
            None,
            par_worst(&hermitian, |phi| {
                // Relative: dS_4 carries third derivatives, so absolute
                // round-off grows with the grid.
                let scale = s_gradient(k, phi)?.norm_max().max(1.0);
                Ok(gradient_symmetry_residuals(k, phi, ROTATION)?.into_iter().fold(0.0, f64::max) / scale)
            }),
            bound,
            format!("{} Hermitian potentials, relative to max |dS_{k}|", hermitian.len()),
        ));
    }
    out
}

const TRACE_RANGE: i64 = 8;

struct ActionRow {
    correspondence: f64,
    parity: f64,
    i0: f64,
    i0_zero_mean: f64,
    mean: f64,
}

fn action_row(u: &GridFunction) -> Result<ActionRow> {
    let cfg = TransferConfig::default();
    let zs = ZsCurve::zs(&Potential::diagonal(u), 5, cfg)?;
    let hill = HillCurve::hill(u, 4, cfg)?;
    let mut correspondence: f64 = 0.0;
    for n in 1..=2 {
        for k in 0..=2 {
            let j = hill.action(n, k)?.value;
            let i = zs.action(n, 2 * k - 2)?.value;
            correspondence = correspondence.max((2.0 * j - i).norm());
        }
    }
    let mut parity: f64 = 0.0;
    for n in 1..=4 {
        parity = parity.max((zs.action(-n, 1)?.value - zs.action(n, 1)?.value).norm());
    }
    let i0 = zs.action(0, 1)?.value.norm();
    let centred = u.map(|z| z - u.mean());
    let i0_zero_mean = ZsCurve::zs(&Potential::diagonal(&centred), 2, cfg)?.action(0, 1)?.value.norm();
    Ok(ActionRow {
        correspondence,
        parity,
        i0,
        i0_zero_mean,
        mean: u.mean().norm(),
    })
}

/// Contour-integral actions: the ZS/Hill correspondence, `n -> -n` symmetry,
/// the vanishing criterion of `I_0` and the trace formula for `S_1`.
pub fn action_checks(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let corpus = cfg.real();
    let rows: Vec<Result<ActionRow>> = corpus.par_iter().map(action_row).collect();
    let field = |f: fn(&ActionRow) -> f64| worst(rows.iter().map(|r| r.as_ref().map(f).map_err(|e| Error::InvalidArgument(e.to_string()))));
    let detail = format!("{} real potentials", corpus.len());
    let threshold = cfg.tolerances.get("zero_mean_action");

    // I_0 vanishes exactly when the mean does: count disagreements.
    let disagree = |r: &ActionRow| (r.i0 > threshold) != (r.mean > threshold) || r.i0_zero_mean > threshold;
    let mismatches = rows
        .iter()
        .map(|r| r.as_ref().map(disagree).map_err(|e| Error::InvalidArgument(e.to_string())))
        .collect::<Result<Vec<bool>>>()
        .map(|v| v.into_iter().filter(|&b| b).count() as f64);

    let small = corpus::small_amplitude(0.1, cfg.n_modes);
    let trace = (|| -> Result<f64> {
        let phi = Potential::diagonal(&small);
        let curve = ZsCurve::zs(&phi, TRACE_RANGE as usize + 1, TransferConfig::default())?;
        let sum = (-TRACE_RANGE..=TRACE_RANGE)
            .into_par_iter()
            .map(|n| curve.action(n, 1).map(|a| a.value))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum::<Complex64>();
        Ok((sum - s_value(1, &phi)?).norm())
    })();

    vec![
        CheckResult::new(
            Group::Actions,
            "2 J_(n,k) = I_(n,2k-2) on the diagonal, n = 1, 2, k = 0, 1, 2",
            None,
            field(|r| r.correspondence),
            cfg.tol("action_correspondence"),
            detail.clone(),
        ),
        CheckResult::new(
            Group::Actions,
            "I_(-n) = I_n on the diagonal, n = 1..4",
            None,
            field(|r| r.parity),
            cfg.tol("action_parity"),
            detail.clone(),
        ),
        CheckResult::new(
            Group::Actions,
            "I_0 vanishes on the diagonal for zero-mean u",
            None,
            field(|r| r.i0_zero_mean),
            cfg.tol("zero_mean_action"),
            format!("{} centred real potentials", corpus.len()),
        ),
        CheckResult::new(
            Group::Actions,
            "I_0 = 0 exactly when mean u = 0",
            None,
            mismatches,
            Bound::AtMost(0.0),
            format!("count of potentials where the two tests at threshold {threshold:e} disagree"),
        ),
        CheckResult::new(
            Group::Actions,
            "sum_(|n| <= 8) I_n = S_1",
            None,
            trace,
            cfg.tol("trace_formula"),
            "u = 0.1 (cos 2 pi x + sin 4 pi x / 2)",
        ),
    ]
}

/// Dynamical checks on `u0 = 0.5 cos 2 pi x`: restriction of the `S_4` system
/// to mKdV, invariance of the real diagonal, conservation and isospectrality.
pub fn flow_checks(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let (t_end, dt) = (cfg.flow_t_end, cfg.flow_dt);
    let u0 = GridFunction::from_fn(cfg.n_modes, |x| c(0.5 * (2.0 * PI * x).cos(), 0.0));
    let runs: Vec<(FlowField, State)> = vec![
        (FlowField::MkdvDefocusing, State::Scalar(u0.clone())),
        (FlowField::S4System, State::Pair(Potential::diagonal(&u0))),
        (FlowField::NlsSystem, State::Pair(Potential::diagonal(&u0))),
    ];
    let mut trajs: Vec<Result<flows::Trajectory>> = runs
        .par_iter()
        .map(|(f, s)| flows::evolve(s, &FlowSpec::new(*f, t_end, dt)))
        .collect();
    let focusing = flows::restriction_check(&u0, t_end, dt, true);
    let nls = trajs.pop().expect("three runs");
    let s4 = trajs.pop().expect("three runs");
    let mkdv = trajs.pop().expect("three runs");
    let detail = format!("u0 = 0.5 cos 2 pi x, t_end = {t_end}, dt = {dt:e}");
    let lift = |r: &Result<flows::Trajectory>| r.as_ref().map_err(|e| Error::InvalidArgument(e.to_string())).cloned();

    let restriction = (|| -> Result<f64> {
        let (a, b) = (lift(&s4)?, lift(&mkdv)?);
        worst(a.states.iter().zip(&b.states).map(|pair| match pair {
            (State::Pair(p), State::Scalar(u)) => Ok(p.minus().max_abs_diff(u)),
            _ => Err(Error::ShapeMismatch("restriction".into())),
        }))
    })();
    let drift = |traj: &Result<flows::Trajectory>, q: Conserved| -> Result<f64> {
        Ok(flows::conservation_report(&lift(traj)?, &[q])?[0].max_drift)
    };
    let hid = |s: &str| Conserved::Hamiltonian(s.parse::<HamiltonianId>().expect("known id"));
    let ham_bound = cfg.tol("hamiltonian_drift");

    let mut out = vec![
        CheckResult::new(
            Group::Flows,
            "S_4 flow on (u0, u0) restricts to defocusing mKdV",
            None,
            restriction,
            cfg.tol("flow_restriction"),
            detail.clone(),
        ),
        CheckResult::new(
            Group::Flows,
            "S_4 flow on (i u0, i u0) restricts to focusing mKdV",
            None,
            focusing,
            cfg.tol("flow_restriction"),
            detail.clone(),
        ),
        CheckResult::new(
            Group::Flows,
            "S_4 flow keeps the real diagonal invariant",
            None,
            lift(&s4).and_then(|t| flows::subspace_defect(&t, Subspace::DiagonalReal)),
            cfg.tol("diagonal_invariance"),
            detail.clone(),
        ),
        CheckResult::new(
            Group::Flows,
            "mean conserved along mKdV",
            None,
            drift(&mkdv, Conserved::Mean),
            cfg.tol("mean_drift"),
            detail.clone(),
        ),
    ];
    for (traj, name, field) in [
        (&mkdv, "K1", "mKdV"),
        (&mkdv, "K2", "mKdV"),
        (&s4, "S1", "the S_4 system"),
        (&s4, "S3", "the S_4 system"),
        (&nls, "S1", "the NLS system"),
        (&nls, "S3", "the NLS system"),
    ] {
        out.push(CheckResult::new(
            Group::Flows,
            format!("{name} conserved along {field}"),
            None,
            drift(traj, hid(name)),
            ham_bound,
            detail.clone(),
        ));
    }
    out.push(CheckResult::new(
        Group::Flows,
        "ZS spectrum |n| <= 4 constant along mKdV",
        None,
        lift(&mkdv).and_then(|t| flows::isospectrality_probe(&t, 4)),
        cfg.tol("isospectral_drift"),
        detail,
    ));
    out
}
