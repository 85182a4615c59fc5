//! Fundamental solutions of the Zakharov-Shabat system and the Hill equation.
//!
//! Both problems are written as linear first-order systems `M' = A(x, s) M`,
//! `M(0) = I`, in the spectral parameter `s` (lambda for ZS, mu for Hill):
//!
//! ```text
//! ZS:   A = [[-i lambda, i phi_-], [-i phi_+, i lambda]],  dA/dlambda = diag(-i, i)
//! Hill: A = [[0, 1], [q - mu, 0]],                         dA/dmu      = [[0, 0], [-1, 0]]
//! ```
//!
//! The integrator is the fourth-order Magnus method with two Gauss nodes,
//!
//! ```text
//! Omega = h/2 (A_1 + A_2) + sqrt(3) h^2 / 12 [A_2, A_1],   M <- exp(Omega) M,
//! ```
//!
//! with a closed-form exponential (every `A` is traceless). It is exact for
//! constant coefficients, so the error does not grow with `|s|` the way an
//! explicit Runge-Kutta error does. The ZS system is stepped in the interaction
//! picture of its constant part (see [`LinearSystem`]). The s-derivative
//! `D = dM/ds` solves the
//! augmented system `D' = A D + (dA/ds) M`; applying the same Magnus step to
//! the augmented system gives `D <- exp(Omega) D + L(Omega, dOmega/ds) M`,
//! where `L` is the Frechet derivative of the exponential, so the jet has the
//! same order as `M`. The potential is pre-sampled at every Gauss node by
//! spectral interpolation, which is exact for band-limited data.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{eval_spectrum, GridFunction};
use crate::linalg::Mat2;
use crate::potential::{miura, Potential};

/// Default number of integrator steps per grid cell.
pub const DEFAULT_OVERSAMPLE: usize = 8;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Gauss-Legendre nodes on `[0, 1]`.
const GAUSS: [f64; 2] = [0.5 - 0.288_675_134_594_812_9, 0.5 + 0.288_675_134_594_812_9];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    #[serde(rename = "ZS")]
    Zs,
    Hill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferConfig {
    /// Steps per grid cell; the step is `1 / (2 N oversample)`.
    pub oversample: usize,
}

impl Default for TransferConfig {
    fn default() -> Self {
        Self {
            oversample: DEFAULT_OVERSAMPLE,
        }
    }
}

/// Fundamental matrix at `x` together with its spectral-parameter derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferJet {
    pub m: Mat2,
    pub dm: Option<Mat2>,
    pub x: f64,
    pub lambda: Complex64,
    pub kind: OperatorKind,
}

/// A linear system `M' = A(x, s) M` with traceless `A`.
///
/// A system may split `A = A_0(s) + B(x)` with a constant free part whose flow
/// `E(x) = exp(x A_0)` is known in closed form. The integrator then steps only
/// the interaction-picture system `N' = E^{-1} B E N` and reassembles
/// `M = E N`, so the free evolution carries no discretisation or accumulated
/// round-off error.
pub trait LinearSystem: Sync {
    fn kind(&self) -> OperatorKind;
    fn n_modes(&self) -> usize;
    fn config(&self) -> TransferConfig;
    /// Stepped coefficient and its s-derivative at Gauss node `node` of step `step`.
    fn coeff_gauss(&self, step: usize, node: usize, s: Complex64) -> (Mat2, Mat2);
    /// Stepped coefficient and its s-derivative at an arbitrary `x`.
    fn coeff_at(&self, x: f64, s: Complex64) -> (Mat2, Mat2);
    /// Free flow `E(x)` and `dE/ds`, for systems stepped in the interaction picture.
    fn frame(&self, _x: f64, _s: Complex64) -> Option<(Mat2, Mat2)> {
        None
    }

    fn steps_per_unit(&self) -> usize {
        2 * self.n_modes() * self.config().oversample
    }

    /// Fundamental matrix at `x` in `[0, 1]`.
    fn fundamental(&self, s: Complex64, x: f64, with_jet: bool) -> Result<TransferJet> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidArgument(format!("x = {x} outside [0, 1]")));
        }
        let (m, dm) = self.propagate(s, 0.0, x, with_jet)?;
        Ok(TransferJet {
            m,
            dm,
            x,
            lambda: s,
            kind: self.kind(),
        })
    }

    /// Monodromy matrix `M(1)` and optionally its derivative.
    fn monodromy(&self, s: Complex64, with_jet: bool) -> Result<(Mat2, Option<Mat2>)> {
        let steps = self.steps_per_unit();
        let mut out = None;
        run_aligned(self, s, 0, steps, with_jet, |_, m, d| out = Some((m, d)))?;
        let (n, dn) = out.expect("at least one step");
        Ok(unframe(self, s, 0.0, 1.0, n, dn))
    }

    /// Solution of `M' = A M`, `M(x0) = I`, evaluated at `x1 >= x0`.
    fn propagate(
        &self,
        s: Complex64,
        x0: f64,
        x1: f64,
        with_jet: bool,
    ) -> Result<(Mat2, Option<Mat2>)> {
        if x1 < x0 {
            return Err(Error::InvalidArgument(format!(
                "propagation backwards from {x0} to {x1}"
            )));
        }
        let steps = self.steps_per_unit() as f64;
        let (a0, a1) = (x0 * steps, x1 * steps);
        let aligned = (a0 - a0.round()).abs() < 1e-9 && (a1 - a1.round()).abs() < 1e-9;
        let zero_jet = with_jet.then_some(Mat2::ZERO);
        if (x1 - x0).abs() < 1e-15 {
            return Ok((Mat2::IDENTITY, zero_jet));
        }
        let (n, dn) = if aligned {
            let mut out = (Mat2::IDENTITY, zero_jet);
            run_aligned(
                self,
                s,
                a0.round() as usize,
                a1.round() as usize,
                with_jet,
                |_, m, d| out = (m, d),
            )?;
            out
        } else {
            // Unaligned endpoints: uniform substeps with interpolated coefficients.
            let count = ((x1 - x0) * steps).ceil().max(1.0) as usize;
            let h = (x1 - x0) / count as f64;
            let mut m = Mat2::IDENTITY;
            let mut d = Mat2::ZERO;
            for i in 0..count {
                let x = x0 + i as f64 * h;
                let c1 = self.coeff_at(x + GAUSS[0] * h, s);
                let c2 = self.coeff_at(x + GAUSS[1] * h, s);
                magnus_step(&mut m, &mut d, c1, c2, h, with_jet);
            }
            check_finite(&m, s)?;
            (m, with_jet.then_some(d))
        };
        Ok(unframe(self, s, x0, x1, n, dn))
    }

    /// Fundamental matrices at every grid point `x_j = j / 2N`, `j = 0..=2N`.
    fn grid_trajectory(&self, s: Complex64, with_jet: bool) -> Result<Vec<(Mat2, Option<Mat2>)>> {
        let os = self.config().oversample;
        let cells = 2 * self.n_modes();
        let mut out = Vec::with_capacity(cells + 1);
        out.push((Mat2::IDENTITY, with_jet.then_some(Mat2::ZERO)));
        run_aligned(self, s, 0, cells * os, with_jet, |k, m, d| {
            if k % os == 0 {
                let x = (k / os) as f64 / cells as f64;
                out.push(unframe(self, s, 0.0, x, m, d));
            }
        })?;
        Ok(out)
    }
}

/// Converts an interaction-picture solution `N` on `[x0, x1]` back to
/// `M = E(x1) N E(x0)^{-1}`, together with the s-derivative.
fn unframe<S: LinearSystem + ?Sized>(
    sys: &S,
    s: Complex64,
    x0: f64,
    x1: f64,
    n: Mat2,
    dn: Option<Mat2>,
) -> (Mat2, Option<Mat2>) {
    let (Some((e1, de1)), Some((e0, de0))) = (sys.frame(x1, s), sys.frame(x0, s)) else {
        return (n, dn);
    };
    // Frames are unimodular, so the adjugate is the inverse.
    let e0_inv = e0.adjugate();
    let m = e1 * n * e0_inv;
    let dm = dn.map(|dn| de1 * n * e0_inv + e1 * dn * e0_inv - m * de0 * e0_inv);
    (m, dm)
}

/// Steps from node `from` to node `to` of the step grid, calling `visit`
/// after each step with the step count and the current state.
fn run_aligned<S: LinearSystem + ?Sized>(
    sys: &S,
    s: Complex64,
    from: usize,
    to: usize,
    with_jet: bool,
    mut visit: impl FnMut(usize, Mat2, Option<Mat2>),
) -> Result<()> {
    let steps = sys.steps_per_unit();
    let h = 1.0 / steps as f64;
    let mut m = Mat2::IDENTITY;
    let mut d = Mat2::ZERO;
    for k in from..to {
        let c1 = sys.coeff_gauss(k % steps, 0, s);
        let c2 = sys.coeff_gauss(k % steps, 1, s);
        magnus_step(&mut m, &mut d, c1, c2, h, with_jet);
        visit(k + 1 - from, m, with_jet.then_some(d));
    }
    check_finite(&m, s)?;
    if with_jet {
        check_finite(&d, s)?;
    }
    Ok(())
}

fn check_finite(m: &Mat2, s: Complex64) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::Integration {
            lambda: s,
            reason: "non-finite fundamental matrix (potential under-resolved)".into(),
        })
    }
}

#[inline]
fn commutator(a: Mat2, b: Mat2) -> Mat2 {
    a * b - b * a
}

#[inline]
fn magnus_step(
    m: &mut Mat2,
    d: &mut Mat2,
    (a1, da1): (Mat2, Mat2),
    (a2, da2): (Mat2, Mat2),
    h: f64,
    with_jet: bool,
) {
    let c1 = Complex64::new(0.5 * h, 0.0);
    let c2 = Complex64::new(3f64.sqrt() * h * h / 12.0, 0.0);
    let omega = (a1 + a2).scale(c1) + commutator(a2, a1).scale(c2);
    let (e, coeffs) = exp_traceless(omega);
    if with_jet {
        let domega = (da1 + da2).scale(c1) + (commutator(da2, a1) + commutator(a2, da1)).scale(c2);
        let l = exp_frechet(omega, domega, coeffs);
        *d = e * *d + l * *m;
    }
    *m = e * *m;
}

/// `g(w) = sinh sqrt w / sqrt w` and `g'(w)` at `w = -det X`, reused by the
/// Frechet derivative; `exp(X) = cosh(sqrt w) I + g(w) X` for traceless `X`.
#[derive(Clone, Copy)]
struct ExpCoeffs {
    g: Complex64,
    dg: Complex64,
}

/// Exponential of a traceless 2x2 matrix, using `X^2 = -det(X) I`.
#[inline]
fn exp_traceless(x: Mat2) -> (Mat2, ExpCoeffs) {
    let w = -x.det();
    let (c, g, dg) = if w.norm() < 0.1 {
        // Series in w; eight terms reach round-off for |w| < 0.1.
        let mut c = Complex64::new(0.0, 0.0);
        let mut g = Complex64::new(0.0, 0.0);
        let mut dg = Complex64::new(0.0, 0.0);
        let mut wk = Complex64::new(1.0, 0.0);
        let mut fact_even = 1.0; // (2k)!
        for k in 0..9 {
            let fact_odd = fact_even * (2 * k + 1) as f64; // (2k+1)!
            c += wk / fact_even;
            g += wk / fact_odd;
            if k < 8 {
                // coefficient of w^k in g' is (k+1) / (2k+3)!
                let f3 = fact_odd * ((2 * k + 2) * (2 * k + 3)) as f64;
                dg += wk * ((k + 1) as f64 / f3);
            }
            wk *= w;
            fact_even = fact_odd * (2 * k + 2) as f64;
        }
        (c, g, dg)
    } else {
        let r = w.sqrt();
        let c = r.cosh();
        let g = r.sinh() / r;
        (c, g, (c - g) / (2.0 * w))
    };
    let e = Mat2::new(c + g * x.get(0, 0), g * x.get(0, 1), g * x.get(1, 0), c + g * x.get(1, 1));
    (e, ExpCoeffs { g, dg })
}

/// Frechet derivative of `exp` at traceless `X` in traceless direction `Y`.
#[inline]
fn exp_frechet(x: Mat2, y: Mat2, k: ExpCoeffs) -> Mat2 {
    // dw = d(-det X)[Y] = tr(X Y) for traceless X, Y; dc/dw = g / 2.
    let dw = (x * y).trace();
    let a = 0.5 * k.g * dw;
    let b = k.dg * dw;
    Mat2::new(
        a + b * x.get(0, 0) + k.g * y.get(0, 0),
        b * x.get(0, 1) + k.g * y.get(0, 1),
        b * x.get(1, 0) + k.g * y.get(1, 0),
        a + b * x.get(1, 1) + k.g * y.get(1, 1),
    )
}

/// Samples of `f` at both Gauss nodes of every step of a unit-length run.
fn gauss_samples(f: &GridFunction, steps: usize) -> Vec<[Complex64; 2]> {
    let first = f.resample_shifted(steps, GAUSS[0]);
    let second = f.resample_shifted(steps, GAUSS[1]);
    first.into_iter().zip(second).map(|(a, b)| [a, b]).collect()
}

/// The Zakharov-Shabat system of a potential, ready for repeated integration.
#[derive(Debug, Clone)]
pub struct ZsSystem {
    n_modes: usize,
    config: TransferConfig,
    minus: Vec<[Complex64; 2]>,
    plus: Vec<[Complex64; 2]>,
    minus_spec: Vec<Complex64>,
    plus_spec: Vec<Complex64>,
}

impl ZsSystem {
    pub fn new(phi: &Potential) -> Self {
        Self::with_config(phi, TransferConfig::default())
    }

    pub fn with_config(phi: &Potential, config: TransferConfig) -> Self {
        assert!(config.oversample >= 1, "oversample must be positive");
        let n = phi.n_modes();
        let steps = 2 * n * config.oversample;
        Self {
            n_modes: n,
            config,
            minus: gauss_samples(phi.minus(), steps),
            plus: gauss_samples(phi.plus(), steps),
            minus_spec: phi.minus().spectrum(),
            plus_spec: phi.plus().spectrum(),
        }
    }
}

impl ZsSystem {
    /// Interaction-picture coefficient `E^{-1} B E` and its lambda-derivative,
    /// with `E = diag(e^{-i lambda x}, e^{i lambda x})`.
    #[inline]
    fn twisted(x: f64, s: Complex64, m: Complex64, p: Complex64) -> (Mat2, Mat2) {
        let e = (2.0 * I * s * x).exp();
        let e_inv = (-2.0 * I * s * x).exp();
        let zero = Complex64::new(0.0, 0.0);
        let upper = I * m * e;
        let lower = -I * p * e_inv;
        let two_ix = 2.0 * I * x;
        (
            Mat2::new(zero, upper, lower, zero),
            Mat2::new(zero, upper * two_ix, -lower * two_ix, zero),
        )
    }
}

impl LinearSystem for ZsSystem {
    fn kind(&self) -> OperatorKind {
        OperatorKind::Zs
    }
    fn n_modes(&self) -> usize {
        self.n_modes
    }
    fn config(&self) -> TransferConfig {
        self.config
    }
    #[inline]
    fn coeff_gauss(&self, step: usize, node: usize, s: Complex64) -> (Mat2, Mat2) {
        let x = (step as f64 + GAUSS[node]) / self.steps_per_unit() as f64;
        Self::twisted(x, s, self.minus[step][node], self.plus[step][node])
    }
    fn coeff_at(&self, x: f64, s: Complex64) -> (Mat2, Mat2) {
        let m = eval_spectrum(&self.minus_spec, self.n_modes, x);
        let p = eval_spectrum(&self.plus_spec, self.n_modes, x);
        Self::twisted(x, s, m, p)
    }
    fn frame(&self, x: f64, s: Complex64) -> Option<(Mat2, Mat2)> {
        let a = (-I * s * x).exp();
        let b = (I * s * x).exp();
        Some((Mat2::diag(a, b), Mat2::diag(-I * x * a, I * x * b)))
    }
}

/// The Hill equation `y'' = (q - mu) y` as a first-order system in `(y, y')`.
#[derive(Debug, Clone)]
pub struct HillSystem {
    n_modes: usize,
    config: TransferConfig,
    q: Vec<[Complex64; 2]>,
    q_spec: Vec<Complex64>,
}

impl HillSystem {
    pub fn new(q: &GridFunction) -> Self {
        Self::with_config(q, TransferConfig::default())
    }

    pub fn with_config(q: &GridFunction, config: TransferConfig) -> Self {
        assert!(config.oversample >= 1, "oversample must be positive");
        let n = q.n_modes();
        Self {
            n_modes: n,
            config,
            q: gauss_samples(q, 2 * n * config.oversample),
            q_spec: q.spectrum(),
        }
    }

    /// The Hill system of the Miura potential `u_x + u^2`.
    pub fn from_miura(u: &GridFunction, config: TransferConfig) -> Self {
        Self::with_config(&miura(u), config)
    }
}

fn hill_matrix(q: Complex64, s: Complex64) -> Mat2 {
    Mat2::new(
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        q - s,
        Complex64::new(0.0, 0.0),
    )
}

const HILL_DMU: Mat2 = Mat2([
    [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)],
]);

impl LinearSystem for HillSystem {
    fn kind(&self) -> OperatorKind {
        OperatorKind::Hill
    }
    fn n_modes(&self) -> usize {
        self.n_modes
    }
    fn config(&self) -> TransferConfig {
        self.config
    }
    #[inline]
    fn coeff_gauss(&self, step: usize, node: usize, s: Complex64) -> (Mat2, Mat2) {
        (hill_matrix(self.q[step][node], s), HILL_DMU)
    }
    fn coeff_at(&self, x: f64, s: Complex64) -> (Mat2, Mat2) {
        (hill_matrix(eval_spectrum(&self.q_spec, self.n_modes, x), s), HILL_DMU)
    }
}

/// Fundamental matrix of the ZS system of `phi` at `x`.
pub fn zs_fundamental(
    phi: &Potential,
    lambda: Complex64,
    x: f64,
    with_jet: bool,
) -> Result<TransferJet> {
    ZsSystem::new(phi).fundamental(lambda, x, with_jet)
}

/// Fundamental matrix of the Hill equation with potential `q` at `x`.
pub fn hill_fundamental(
    q: &GridFunction,
    mu: Complex64,
    x: f64,
    with_jet: bool,
) -> Result<TransferJet> {
    HillSystem::new(q).fundamental(mu, x, with_jet)
}

/// Observed convergence ratio `|M_h - M_ref| / |M_{h/2} - M_ref|` of the
/// monodromy, with `M_ref` from a run at eight times the finest resolution.
///
/// A fourth-order method gives a ratio near 16.
pub fn convergence_ratio<S, F>(build: F, s: Complex64, oversample: usize) -> Result<f64>
where
    S: LinearSystem,
    F: Fn(TransferConfig) -> S,
{
    let m = |os| build(TransferConfig { oversample: os }).monodromy(s, false).map(|r| r.0);
    let coarse = m(oversample)?;
    let fine = m(2 * oversample)?;
    let reference = m(16 * oversample)?;
    Ok((coarse - reference).norm() / (fine - reference).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Transform;
    use std::collections::BTreeMap;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_potential() -> Potential {
        let m: BTreeMap<i64, Complex64> =
            [(0, c(0.2, 0.1)), (1, c(0.3, -0.2)), (-2, c(0.1, 0.15))].into();
        let p: BTreeMap<i64, Complex64> = [(0, c(-0.1, 0.05)), (-1, c(0.25, 0.1)), (3, c(0.05, 0.0))].into();
        Potential::new(
            GridFunction::trig(&m, 16).unwrap(),
            GridFunction::trig(&p, 16).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn zero_potential_at_pi() {
        let jet = zs_fundamental(&Potential::zero(64), c(PI, 0.0), 1.0, true).unwrap();
        assert!((jet.m - Mat2::IDENTITY.scale(c(-1.0, 0.0))).norm() < 1e-12);
        // dM/dlambda = diag(-i e^{-i lambda}, i e^{i lambda}) at lambda = pi.
        let expect = Mat2::diag(c(0.0, 1.0), c(0.0, -1.0));
        assert!((jet.dm.unwrap() - expect).norm() < 1e-12);
    }

    #[test]
    fn constant_potential_matches_exponential() {
        let cst = c(0.7, 0.0);
        let phi = Potential::diagonal(&GridFunction::constant(64, cst));
        for &lambda in &[c(0.3, 0.0), c(2.0, 1.0), c(-4.0, -2.5)] {
            for &x in &[0.25, 0.6180339887, 1.0] {
                let jet = zs_fundamental(&phi, lambda, x, false).unwrap();
                let a = Mat2::new(-I * lambda, I * cst, -I * cst, I * lambda);
                let expect = a.scale(c(x, 0.0)).exp();
                assert!(
                    (jet.m - expect).norm() < 1e-10 * expect.norm(),
                    "lambda {lambda} x {x}"
                );
            }
        }
    }

    #[test]
    fn hill_free_solutions() {
        let q = GridFunction::zeros(64);
        for &mu in &[c(0.0, 0.0), c(9.0, 0.0), c(-4.0, 3.0)] {
            let jet = hill_fundamental(&q, mu, 1.0, false).unwrap();
            let r = mu.sqrt();
            let y1 = r.cos();
            let y2 = if mu.norm() == 0.0 { c(1.0, 0.0) } else { r.sin() / r };
            assert!((jet.m.get(0, 0) - y1).norm() < 1e-10, "mu {mu}");
            assert!((jet.m.get(0, 1) - y2).norm() < 1e-10, "mu {mu}");
        }
    }

    #[test]
    fn hill_constant_shift() {
        let cst = 0.6;
        let q = GridFunction::constant(8, c(cst * cst, 0.0));
        let mu = c(5.0, 1.0);
        let jet = hill_fundamental(&q, mu, 1.0, false).unwrap();
        let r = (mu - cst * cst).sqrt();
        assert!((jet.m.get(0, 0) - r.cos()).norm() < 1e-10);
        assert!((jet.m.get(1, 1) - r.cos()).norm() < 1e-10);
        assert!((jet.m.get(0, 1) - r.sin() / r).norm() < 1e-10);
    }

    #[test]
    fn determinant_is_one() {
        let phi = sample_potential();
        let sys = ZsSystem::new(&phi);
        for &lambda in &[c(1.0, 0.0), c(-3.0, 2.0), c(6.0, -6.0)] {
            let (m, _) = sys.monodromy(lambda, false).unwrap();
            assert!((m.det() - 1.0).norm() < 1e-9);
        }
        let hill = HillSystem::from_miura(phi.minus(), TransferConfig::default());
        for &mu in &[c(1.0, 0.0), c(-3.0, 20.0)] {
            let (m, _) = hill.monodromy(mu, false).unwrap();
            assert!((m.det() - 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn jet_matches_finite_difference() {
        let phi = sample_potential();
        let sys = ZsSystem::new(&phi);
        let h = 1e-5;
        for &lambda in &[c(0.5, 0.0), c(3.0, 1.0), c(-7.0, -2.0)] {
            let (_, d) = sys.monodromy(lambda, true).unwrap();
            let (mp, _) = sys.monodromy(lambda + h, false).unwrap();
            let (mm, _) = sys.monodromy(lambda - h, false).unwrap();
            let fd = (mp - mm).scale(c(0.5 / h, 0.0));
            let d = d.unwrap();
            assert!((fd - d).norm() <= 1e-6 * d.norm().max(1.0), "lambda {lambda}");
        }
    }

    #[test]
    fn flow_property() {
        let phi = sample_potential();
        let sys = ZsSystem::new(&phi);
        let lambda = c(2.0, 0.5);
        for &(x1, x2) in &[(0.25, 0.75), (0.3, 0.9)] {
            let (m1, _) = sys.propagate(lambda, 0.0, x1, false).unwrap();
            let (m2, _) = sys.propagate(lambda, 0.0, x2, false).unwrap();
            let (m12, _) = sys.propagate(lambda, x1, x2, false).unwrap();
            let lhs = m2 * m1.inverse().unwrap();
            assert!((lhs - m12).norm() < 1e-9);
        }
    }

    #[test]
    fn grid_trajectory_matches_fundamental() {
        let phi = sample_potential();
        let sys = ZsSystem::new(&phi);
        let lambda = c(1.2, -0.3);
        let traj = sys.grid_trajectory(lambda, true).unwrap();
        assert_eq!(traj.len(), 33);
        let direct = sys.fundamental(lambda, 0.375, true).unwrap();
        assert!((traj[12].0 - direct.m).norm() < 1e-13);
        let (m1, _) = sys.monodromy(lambda, false).unwrap();
        assert!((traj[32].0 - m1).norm() < 1e-13);
    }

    #[test]
    fn swap_symmetry() {
        let phi = sample_potential();
        let pphi = phi.transform(Transform::P);
        let j = Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0));
        let jinv = j.inverse().unwrap();
        let lambda = c(1.7, 0.4);
        for &x in &[0.5, 1.0] {
            let a = zs_fundamental(&pphi, -lambda, x, false).unwrap().m;
            let b = j * zs_fundamental(&phi, lambda, x, false).unwrap().m * jinv;
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn rotation_symmetry() {
        let phi = sample_potential();
        let alpha = 0.9;
        let r = Mat2::diag(
            Complex64::from_polar(1.0, alpha / 2.0),
            Complex64::from_polar(1.0, -alpha / 2.0),
        );
        let lambda = c(-2.2, 0.7);
        let a = zs_fundamental(&phi.transform(Transform::R(alpha)), lambda, 0.75, false)
            .unwrap()
            .m;
        let b = r * zs_fundamental(&phi, lambda, 0.75, false).unwrap().m * r.inverse().unwrap();
        assert!((a - b).norm() < 1e-8);
    }

    #[test]
    fn reflection_symmetry_of_monodromy() {
        let phi = sample_potential();
        let lambda = c(2.5, 0.3);
        let (m, _) = ZsSystem::new(&phi).monodromy(lambda, false).unwrap();
        let (t, _) = ZsSystem::new(&phi.transform(Transform::T))
            .monodromy(-lambda, false)
            .unwrap();
        let expect = Mat2::new(m.get(1, 1), m.get(0, 1), m.get(1, 0), m.get(0, 0));
        assert!((t - expect).norm() < 1e-8);
    }

    #[test]
    fn fourth_order_convergence() {
        let phi = sample_potential();
        let zs = convergence_ratio(|cfg| ZsSystem::with_config(&phi, cfg), c(3.0, 0.5), 2).unwrap();
        let q = GridFunction::from_fn(16, |x| c((2.0 * PI * x).cos(), 0.0));
        let hill = convergence_ratio(|cfg| HillSystem::with_config(&q, cfg), c(10.0, 2.0), 2).unwrap();
        for r in [zs, hill] {
            assert!((13.0..=21.0).contains(&r), "ratio {r}");
        }
    }
}
