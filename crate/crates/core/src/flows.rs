//! Pseudo-spectral time integration of the mKdV equation, the NLS system and
//! the `S_4` system, plus the diagnostics run on their trajectories.
//!
//! All fields have the form `u_t = L u + N(u)` with `L` diagonal in Fourier
//! space. The integrating-factor RK4 scheme (Lawson form) treats `L` exactly
//! and `N` explicitly. Products inside `N` are evaluated alias-free on a
//! padded grid and the resulting nonlinear term is filtered by the 2/3 rule.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{wavenumber, GridFunction};
use crate::hierarchy::{k_value, s_value, HamiltonianId, Family, State};
use crate::potential::Potential;
use crate::spectrum::zs_spectrum;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Norm above which a run is declared blown up.
pub const BLOW_UP_NORM: f64 = 1e6;
/// Coefficient size beyond the 2/3 cutoff that triggers a resolution warning.
pub const TAIL_WARNING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowField {
    /// `u_t = -u_xxx + 6 u^2 u_x`.
    MkdvDefocusing,
    /// `u_t = -u_xxx - 6 u^2 u_x`.
    MkdvFocusing,
    /// `i phi_-,t = -phi_-'' + 2 phi_+ phi_-^2`, `i phi_+,t = phi_+'' - 2 phi_- phi_+^2`.
    NlsSystem,
    /// `phi_+-,t = -phi_+-''' + 6 phi_- phi_+ phi_+-'`.
    S4System,
}

impl FlowField {
    pub fn is_scalar(self) -> bool {
        matches!(self, FlowField::MkdvDefocusing | FlowField::MkdvFocusing)
    }

    pub fn name(self) -> &'static str {
        match self {
            FlowField::MkdvDefocusing => "mkdv_defocusing",
            FlowField::MkdvFocusing => "mkdv_focusing",
            FlowField::NlsSystem => "nls_system",
            FlowField::S4System => "s4_system",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [
            FlowField::MkdvDefocusing,
            FlowField::MkdvFocusing,
            FlowField::NlsSystem,
            FlowField::S4System,
        ]
        .into_iter()
        .find(|f| f.name() == s)
        .ok_or_else(|| Error::Parse(format!("unknown flow field '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub field: FlowField,
    pub t_end: f64,
    pub dt: f64,
    /// Record the state every this many steps (the final state is always kept).
    pub record_every: usize,
}

impl FlowSpec {
    pub fn new(field: FlowField, t_end: f64, dt: f64) -> Self {
        Self {
            field,
            t_end,
            dt,
            record_every: ((t_end / dt / 10.0).round() as usize).max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub field: FlowField,
    pub times: Vec<f64>,
    pub states: Vec<State>,
    /// Resolution-loss warnings collected during the run.
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory has the initial state")
    }
}

/// Spectra of the one or two components, FFT order.
type Spectra = Vec<Vec<Complex64>>;

struct Stepper {
    field: FlowField,
    n_modes: usize,
    /// Fourier symbols of `L` per component.
    symbols: Vec<Vec<Complex64>>,
    /// 2/3-rule mask.
    mask: Vec<f64>,
}

impl Stepper {
    fn new(field: FlowField, n_modes: usize) -> Self {
        let len = 2 * n_modes;
        let k = |i: usize| 2.0 * PI * wavenumber(i, len) as f64;
        // -d^3/dx^3 has symbol i k^3; +-i d^2/dx^2 has symbol -+i k^2.
        let third: Vec<Complex64> = (0..len).map(|i| I * k(i).powi(3)).collect();
        let symbols = match field {
            FlowField::MkdvDefocusing | FlowField::MkdvFocusing => vec![third],
            FlowField::S4System => vec![third.clone(), third],
            FlowField::NlsSystem => vec![
                (0..len).map(|i| -I * k(i).powi(2)).collect(),
                (0..len).map(|i| I * k(i).powi(2)).collect(),
            ],
        };
        let cutoff = (2 * n_modes) / 3;
        let mask = (0..len)
            .map(|i| {
                if wavenumber(i, len).unsigned_abs() as usize <= cutoff && i != n_modes {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            field,
            n_modes,
            symbols,
            mask,
        }
    }

    fn functions(&self, spec: &Spectra) -> Vec<GridFunction> {
        spec.iter()
            .map(|s| GridFunction::from_spectrum(self.n_modes, s))
            .collect()
    }

    fn nonlinear(&self, spec: &Spectra) -> Spectra {
        let f = self.functions(spec);
        let prod = GridFunction::product;
        let terms: Vec<GridFunction> = match self.field {
            FlowField::MkdvDefocusing => vec![&prod(&[&f[0], &f[0], &f[0]]).derivative(1) * 2.0],
            FlowField::MkdvFocusing => vec![&prod(&[&f[0], &f[0], &f[0]]).derivative(1) * -2.0],
            FlowField::NlsSystem => vec![
                &prod(&[&f[1], &f[0], &f[0]]) * (-2.0 * I),
                &prod(&[&f[0], &f[1], &f[1]]) * (2.0 * I),
            ],
            FlowField::S4System => {
                let a = &f[0];
                let b = &f[1];
                vec![
                    &prod(&[a, b, &a.derivative(1)]) * 6.0,
                    &prod(&[a, b, &b.derivative(1)]) * 6.0,
                ]
            }
        };
        terms
            .into_iter()
            .map(|t| {
                let mut s = t.spectrum();
                s.iter_mut().zip(&self.mask).for_each(|(c, m)| *c *= m);
                s
            })
            .collect()
    }

    /// One Lawson RK4 step of size `dt`, with the exponentials precomputed.
    fn step(&self, u: &Spectra, dt: f64, e_half: &[Vec<Complex64>], e_full: &[Vec<Complex64>]) -> Spectra {
        let comb = |base: &Spectra, e: &[Vec<Complex64>], add: &Spectra, w: f64| -> Spectra {
            base.iter()
                .zip(e)
                .zip(add)
                .map(|((b, e), a)| {
                    b.iter()
                        .zip(e)
                        .zip(a)
                        .map(|((b, e), a)| e * (b + w * a))
                        .collect()
                })
                .collect()
        };
        let k1 = self.nonlinear(u);
        let k2 = self.nonlinear(&comb(u, e_half, &k1, 0.5 * dt));
        let zero: Spectra = u.iter().map(|c| vec![Complex64::new(0.0, 0.0); c.len()]).collect();
        let u_half = comb(u, e_half, &zero, 0.0);
        let ones: Vec<Vec<Complex64>> = u.iter().map(|c| vec![Complex64::new(1.0, 0.0); c.len()]).collect();
        let k3 = self.nonlinear(&comb(&u_half, &ones, &k2, 0.5 * dt));
        let k4 = self.nonlinear(&comb(&u_half, e_half, &k3, dt));
        (0..u.len())
            .map(|c| {
                (0..u[c].len())
                    .map(|i| {
                        let (eh, ef) = (e_half[c][i], e_full[c][i]);
                        ef * u[c][i]
                            + dt / 6.0 * (ef * k1[c][i] + 2.0 * eh * (k2[c][i] + k3[c][i]) + k4[c][i])
                    })
                    .collect()
            })
            .collect()
    }
}

fn state_spectra(state: &State, field: FlowField) -> Result<(usize, Spectra)> {
    match (state, field.is_scalar()) {
        (State::Scalar(u), true) => Ok((u.n_modes(), vec![u.spectrum()])),
        (State::Pair(p), false) => Ok((p.n_modes(), vec![p.minus().spectrum(), p.plus().spectrum()])),
        _ => Err(Error::ShapeMismatch(format!("flow field {}", field.name()))),
    }
}

fn spectra_state(n_modes: usize, spec: &Spectra) -> State {
    let f: Vec<GridFunction> = spec
        .iter()
        .map(|s| GridFunction::from_spectrum(n_modes, s))
        .collect();
    if f.len() == 1 {
        State::Scalar(f[0].clone())
    } else {
        State::Pair(Potential::new(f[0].clone(), f[1].clone()).expect("same grid"))
    }
}

fn tail_of(spec: &Spectra, n_modes: usize) -> f64 {
    let len = 2 * n_modes;
    let cutoff = (2 * n_modes) / 3;
    spec.iter()
        .flat_map(|s| s.iter().enumerate())
        .filter(|(i, _)| wavenumber(*i, len).unsigned_abs() as usize > cutoff)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max)
}

/// Integrates `state` under `spec.field` up to `spec.t_end`.
///
/// The step is shrunk slightly if needed so that a whole number of steps
/// reaches `t_end`.
pub fn evolve(state: &State, spec: &FlowSpec) -> Result<Trajectory> {
    if !(spec.dt > 0.0 && spec.t_end >= 0.0 && spec.dt.is_finite() && spec.t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and t_end >= 0, got dt = {} t_end = {}",
            spec.dt, spec.t_end
        )));
    }
    let (n_modes, mut u) = state_spectra(state, spec.field)?;
    let steps = ((spec.t_end / spec.dt) - 1e-9).ceil().max(0.0) as usize;
    let dt = if steps == 0 { 0.0 } else { spec.t_end / steps as f64 };
    let stepper = Stepper::new(spec.field, n_modes);
    let exps = |h: f64| -> Vec<Vec<Complex64>> {
        stepper
            .symbols
            .iter()
            .map(|s| s.iter().map(|l| (l * h).exp()).collect())
            .collect()
    };
    let (e_half, e_full) = (exps(0.5 * dt), exps(dt));
    let mut traj = Trajectory {
        field: spec.field,
        times: vec![0.0],
        states: vec![state.clone()],
        warnings: Vec::new(),
    };
    let initial_tail = tail_of(&u, n_modes);
    if initial_tail > 1e-10 {
        traj.warnings.push(format!(
            "initial data not resolved: coefficient {initial_tail:.2e} beyond the 2/3 cutoff"
        ));
    }
    let record_every = spec.record_every.max(1);
    let mut warned = false;
    for n in 1..=steps {
        u = stepper.step(&u, dt, &e_half, &e_full);
        let t = n as f64 * dt;
        if n % record_every == 0 || n == steps {
            let norm = u
                .iter()
                .flat_map(|s| s.iter())
                .map(|c| c.norm())
                .sum::<f64>();
            if !norm.is_finite() || norm > BLOW_UP_NORM {
                return Err(Error::BlowUp { t, norm });
            }
            let tail = tail_of(&u, n_modes);
            if tail > TAIL_WARNING && !warned {
                traj.warnings
                    .push(format!("resolution loss at t = {t}: tail coefficient {tail:.2e}"));
                warned = true;
            }
            traj.times.push(t);
            traj.states.push(spectra_state(n_modes, &u));
        }
    }
    Ok(traj)
}

/// `max_t || phi_-(t) - c u(t) ||` where `phi` evolves under the `S_4` system
/// from `(c u0, c u0)` and `u` under mKdV from `u0`; `c = 1` (defocusing) or
/// `c = i` (focusing).
pub fn restriction_check(u0: &GridFunction, t_end: f64, dt: f64, focusing: bool) -> Result<f64> {
    let (c, field) = if focusing {
        (I, FlowField::MkdvFocusing)
    } else {
        (Complex64::new(1.0, 0.0), FlowField::MkdvDefocusing)
    };
    let cu = u0.scale(c);
    let pair = Potential::new(cu.clone(), cu).expect("same grid");
    let mut spec = FlowSpec::new(FlowField::S4System, t_end, dt);
    let sys = evolve(&State::Pair(pair), &spec)?;
    spec.field = field;
    let scalar = evolve(&State::Scalar(u0.clone()), &spec)?;
    let mut worst: f64 = 0.0;
    for (a, b) in sys.states.iter().zip(&scalar.states) {
        if let (State::Pair(p), State::Scalar(u)) = (a, b) {
            worst = worst.max(p.minus().max_abs_diff(&u.scale(c)));
        }
    }
    Ok(worst)
}

/// Quantities tracked by [`conservation_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conserved {
    Hamiltonian(HamiltonianId),
    /// The mean of the (first) component.
    Mean,
}

impl std::fmt::Display for Conserved {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Conserved::Hamiltonian(id) => write!(f, "{id}"),
            Conserved::Mean => write!(f, "mean"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub quantity: String,
    pub initial: Complex64,
    pub max_drift: f64,
}

fn conserved_value(q: Conserved, state: &State) -> Result<Complex64> {
    match (q, state) {
        (Conserved::Mean, State::Scalar(u)) => Ok(u.mean()),
        (Conserved::Mean, State::Pair(p)) => Ok(p.minus().mean()),
        (Conserved::Hamiltonian(id), State::Scalar(u)) if id.family == Family::K => k_value(id.index, u),
        (Conserved::Hamiltonian(id), State::Pair(p)) if id.family == Family::S => s_value(id.index, p),
        (Conserved::Hamiltonian(id), _) => Err(Error::ShapeMismatch(format!("conserved quantity {id}"))),
    }
}

/// `max_t |H(t) - H(0)|` for each requested quantity.
pub fn conservation_report(traj: &Trajectory, which: &[Conserved]) -> Result<Vec<Drift>> {
    which
        .iter()
        .map(|&q| {
            let initial = conserved_value(q, &traj.states[0])?;
            let mut max_drift: f64 = 0.0;
            for s in &traj.states[1..] {
                max_drift = max_drift.max((conserved_value(q, s)? - initial).norm());
            }
            Ok(Drift {
                quantity: q.to_string(),
                initial,
                max_drift,
            })
        })
        .collect()
}

/// `max_t max_{|n| <= n_max} |lambda_n^+-(t) - lambda_n^+-(0)|` of the ZS
/// spectrum (scalar states are embedded as `(u, u)`).
pub fn isospectrality_probe(traj: &Trajectory, n_max: usize) -> Result<f64> {
    let potentials: Vec<Potential> = traj
        .states
        .iter()
        .map(|s| match s {
            State::Scalar(u) => {
                // Strip round-off imaginary parts so the real class is kept.
                Potential::diagonal(&u.map(|z| Complex64::new(z.re, 0.0)))
            }
            State::Pair(p) => p.clone(),
        })
        .collect();
    let tables = potentials
        .par_iter()
        .map(|p| zs_spectrum(p, n_max))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for t in &tables[1..] {
        for (a, b) in tables[0].entries.iter().zip(&t.entries) {
            worst = worst
                .max((a.lam_minus - b.lam_minus).abs())
                .max((a.lam_plus - b.lam_plus).abs());
        }
    }
    Ok(worst)
}

/// Observed order ratio `|u_dt - u_ref| / |u_{dt/2} - u_ref|` at `t_end`, with
/// the reference computed at `dt/4`. About 16 for a fourth-order scheme.
pub fn convergence_ratio(state: &State, field: FlowField, t_end: f64, dt: f64) -> Result<f64> {
    let run = |h: f64| -> Result<State> {
        let spec = FlowSpec {
            field,
            t_end,
            dt: h,
            record_every: usize::MAX,
        };
        Ok(evolve(state, &spec)?.last().clone())
    };
    let (coarse, mid, fine) = (run(dt)?, run(0.5 * dt)?, run(0.25 * dt)?);
    let dist = |a: &State, b: &State| match (a, b) {
        (State::Scalar(x), State::Scalar(y)) => x.max_abs_diff(y),
        (State::Pair(x), State::Pair(y)) => x.distance(y),
        _ => f64::NAN,
    };
    Ok(dist(&coarse, &fine) / dist(&mid, &fine))
}

/// Largest violation of the subspace relations along a trajectory:
/// `phi_+ = conj(phi_-)` (`Hermitian`), `phi_+ = phi_-` (`Diagonal`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    Hermitian,
    Diagonal,
    /// Diagonal with real components.
    DiagonalReal,
    /// Diagonal with imaginary components.
    DiagonalImaginary,
}

pub fn subspace_defect(traj: &Trajectory, which: Subspace) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in &traj.states {
        let p = match s {
            State::Pair(p) => p,
            State::Scalar(_) => return Err(Error::ShapeMismatch("subspace check needs pairs".into())),
        };
        let (a, b) = (p.minus(), p.plus());
        let d = match which {
            Subspace::Hermitian => b.max_abs_diff(&a.conj()),
            Subspace::Diagonal => b.max_abs_diff(a),
            Subspace::DiagonalReal => b
                .max_abs_diff(a)
                .max(a.values().iter().map(|z| z.im.abs()).fold(0.0, f64::max)),
            Subspace::DiagonalImaginary => b
                .max_abs_diff(a)
                .max(a.values().iter().map(|z| z.re.abs()).fold(0.0, f64::max)),
        };
        worst = worst.max(d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cosine(a: f64) -> GridFunction {
        GridFunction::from_fn(64, |x| c(a * (2.0 * PI * x).cos(), 0.0))
    }

    #[test]
    fn constant_is_a_fixed_point() {
        let u = GridFunction::constant(64, c(0.4, 0.0));
        let traj = evolve(&State::Scalar(u.clone()), &FlowSpec::new(FlowField::MkdvDefocusing, 0.01, 1e-4)).unwrap();
        match traj.last() {
            State::Scalar(v) => assert!(v.max_abs_diff(&u) < 1e-10),
            _ => unreachable!(),
        }
    }

    #[test]
    fn nls_plane_wave() {
        let (a, n) = (0.7, 2.0);
        let v0 = GridFunction::from_fn(64, |x| Complex64::from_polar(a, 2.0 * PI * n * x));
        let t = 0.1;
        let traj = evolve(
            &State::Pair(Potential::hermitian(&v0)),
            &FlowSpec::new(FlowField::NlsSystem, t, 1e-4),
        )
        .unwrap();
        let phase = Complex64::from_polar(1.0, -(4.0 * PI * PI * n * n + 2.0 * a * a) * t);
        match traj.last() {
            State::Pair(p) => {
                assert!(p.minus().max_abs_diff(&v0.scale(phase)) < 1e-7);
                assert!(p.plus().max_abs_diff(&v0.scale(phase).conj()) < 1e-7);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn linear_dispersion_is_exact() {
        // Tiny amplitude: essentially the Airy flow u_t = -u_xxx.
        let eps = 1e-9;
        let u = GridFunction::from_fn(64, |x| c(eps * (2.0 * PI * 3.0 * x).cos(), 0.0));
        let t = 0.01;
        let traj = evolve(&State::Scalar(u), &FlowSpec::new(FlowField::MkdvDefocusing, t, 1e-3)).unwrap();
        let k = 6.0 * PI;
        let expect = GridFunction::from_fn(64, |x| c(eps * (k * x + k.powi(3) * t).cos(), 0.0));
        match traj.last() {
            State::Scalar(v) => assert!(v.max_abs_diff(&expect) < 1e-18 + 1e-9 * eps),
            _ => unreachable!(),
        }
    }

    #[test]
    fn restriction_and_invariant_subspaces() {
        let u0 = cosine(0.5);
        assert!(restriction_check(&u0, 0.01, 1e-5, false).unwrap() < 1e-6);
        assert!(restriction_check(&u0, 0.01, 1e-5, true).unwrap() < 1e-6);
        let traj = evolve(
            &State::Pair(Potential::diagonal(&u0)),
            &FlowSpec::new(FlowField::S4System, 0.01, 1e-5),
        )
        .unwrap();
        assert!(subspace_defect(&traj, Subspace::DiagonalReal).unwrap() < 1e-7);
        let iu = u0.scale(I);
        let traj = evolve(
            &State::Pair(Potential::new(iu.clone(), iu).unwrap()),
            &FlowSpec::new(FlowField::S4System, 0.01, 1e-5),
        )
        .unwrap();
        assert!(subspace_defect(&traj, Subspace::DiagonalImaginary).unwrap() < 1e-7);
    }

    #[test]
    fn hermitian_subspace_preserved_by_nls() {
        let v = GridFunction::from_fn(64, |x| {
            Complex64::from_polar(0.4, 2.0 * PI * x) + c(0.1, 0.2) * (4.0 * PI * x).cos()
        });
        let traj = evolve(
            &State::Pair(Potential::hermitian(&v)),
            &FlowSpec::new(FlowField::NlsSystem, 0.02, 1e-5),
        )
        .unwrap();
        assert!(subspace_defect(&traj, Subspace::Hermitian).unwrap() < 1e-8);
        let report = conservation_report(
            &traj,
            &[Conserved::Hamiltonian(HamiltonianId::S1), Conserved::Hamiltonian(HamiltonianId::S3)],
        )
        .unwrap();
        for d in report {
            assert!(d.max_drift < 1e-7, "{d:?}");
        }
    }

    #[test]
    fn mkdv_conservation() {
        let u0 = GridFunction::from_fn(64, |x| c(0.5 * (2.0 * PI * x).cos() + 0.2, 0.0));
        let traj = evolve(&State::Scalar(u0), &FlowSpec::new(FlowField::MkdvDefocusing, 0.01, 1e-5)).unwrap();
        let report = conservation_report(
            &traj,
            &[
                Conserved::Mean,
                Conserved::Hamiltonian(HamiltonianId::K1),
                Conserved::Hamiltonian(HamiltonianId::K2),
            ],
        )
        .unwrap();
        assert!(report[0].max_drift < 1e-10);
        assert!(report[1].max_drift < 1e-7);
        assert!(report[2].max_drift < 1e-7);
        assert!(traj.warnings.is_empty());
    }

    #[test]
    fn fourth_order_in_time() {
        // With a dt/4 reference the expected ratio is 16 (1 - 1/256) / (1 - 1/16) = 17.
        let u = cosine(0.5);
        let v = GridFunction::from_fn(64, |x| {
            Complex64::from_polar(0.4, 2.0 * PI * x) + c(0.1, 0.2) * (4.0 * PI * x).cos()
        });
        for (state, field) in [
            (State::Scalar(u.clone()), FlowField::MkdvDefocusing),
            (State::Pair(Potential::diagonal(&u)), FlowField::S4System),
            (State::Pair(Potential::hermitian(&v)), FlowField::NlsSystem),
        ] {
            let r = convergence_ratio(&state, field, 0.01, 1e-4).unwrap();
            assert!((13.0..=21.0).contains(&r), "{field:?} ratio {r}");
        }
    }

    #[test]
    fn shape_and_argument_errors() {
        let u = State::Scalar(cosine(0.1));
        assert!(matches!(
            evolve(&u, &FlowSpec::new(FlowField::NlsSystem, 0.01, 1e-4)),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(evolve(&u, &FlowSpec::new(FlowField::MkdvDefocusing, 0.01, 0.0)).is_err());
        assert_eq!(FlowField::parse("s4_system").unwrap(), FlowField::S4System);
        assert!(FlowField::parse("kdv").is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        // A huge focusing state under a crude step diverges.
        let u = State::Scalar(cosine(200.0));
        let spec = FlowSpec {
            field: FlowField::MkdvFocusing,
            t_end: 1.0,
            dt: 1e-2,
            record_every: 1,
        };
        assert!(matches!(evolve(&u, &spec), Err(Error::BlowUp { .. })));
    }
}
