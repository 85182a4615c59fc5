//! Discriminants, their spectral derivatives, the L2-gradient of the ZS
//! discriminant and the identities relating the ZS and Hill problems.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::linalg::Mat2;
use crate::potential::Potential;
use crate::transfer::{HillSystem, LinearSystem, OperatorKind, TransferConfig, ZsSystem};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this `|m_12(1)|` the Floquet-product gradient formula is abandoned.
pub const DEGENERATE_M12: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantSample {
    pub lambda: Complex64,
    pub value: Complex64,
    /// Derivative with respect to the spectral parameter.
    pub dvalue: Complex64,
    pub kind: OperatorKind,
}

/// Discriminant `tr M(1)` and its derivative for any prepared system.
pub fn delta<S: LinearSystem + ?Sized>(sys: &S, s: Complex64) -> Result<DiscriminantSample> {
    let (m, d) = sys.monodromy(s, true)?;
    Ok(DiscriminantSample {
        lambda: s,
        value: m.trace(),
        dvalue: d.expect("jet requested").trace(),
        kind: sys.kind(),
    })
}

/// `Delta(lambda, phi)` of the ZS operator.
pub fn zs_delta(phi: &Potential, lambda: Complex64) -> Result<DiscriminantSample> {
    delta(&ZsSystem::new(phi), lambda)
}

/// `Delta_mKdV(mu, u)` of the Hill operator with the Miura potential of `u`.
pub fn hill_delta(u: &GridFunction, mu: Complex64) -> Result<DiscriminantSample> {
    delta(&HillSystem::from_miura(u, TransferConfig::default()), mu)
}

/// Evaluates the discriminant at many points in parallel.
pub fn sweep<S: LinearSystem>(sys: &S, points: &[Complex64]) -> Result<Vec<DiscriminantSample>> {
    points.par_iter().map(|&s| delta(sys, s)).collect()
}

/// The matrix `[[1, i], [u0 - i lambda, i u0 - lambda]]` that conjugates the
/// ZS fundamental solution of `(u, u)` into the Hill one; `det = -2 lambda`.
pub fn conjugation_matrix(u0: Complex64, lambda: Complex64) -> Mat2 {
    Mat2::new(
        Complex64::new(1.0, 0.0),
        I,
        u0 - I * lambda,
        I * u0 - lambda,
    )
}

/// `|| M_Hill(1, lambda^2) - A M_ZS(1, lambda) A^{-1} ||` for the diagonal potential of `u`.
pub fn conjugation_residual(u: &GridFunction, lambda: Complex64) -> Result<f64> {
    conjugation_residual_with(u, lambda, TransferConfig::default())
}

pub fn conjugation_residual_with(
    u: &GridFunction,
    lambda: Complex64,
    config: TransferConfig,
) -> Result<f64> {
    if lambda.norm() == 0.0 {
        return Err(Error::SingularConjugation(lambda));
    }
    let a = conjugation_matrix(u.values()[0], lambda);
    let a_inv = a.inverse().ok_or(Error::SingularConjugation(lambda))?;
    let (hill, _) = HillSystem::from_miura(u, config).monodromy(lambda * lambda, false)?;
    let (zs, _) = ZsSystem::with_config(&Potential::diagonal(u), config).monodromy(lambda, false)?;
    Ok((hill - a * zs * a_inv).norm())
}

/// How a gradient was assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradientMethod {
    /// Product of the two Floquet solutions, valid when `m_12(1) != 0`.
    FloquetProduct,
    /// Variational integral `K(x) = M(x) M(1) M(x)^{-1}`.
    Variational,
}

/// `(d Delta / d phi_-, d Delta / d phi_+)` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub d_minus: GridFunction,
    pub d_plus: GridFunction,
    pub lambda: Complex64,
    pub method: GradientMethod,
}

impl GradientField {
    pub fn as_potential(&self) -> Potential {
        Potential::new(self.d_minus.clone(), self.d_plus.clone()).expect("same grid")
    }
}

/// Floquet multipliers `(zeta_+, zeta_-)`, the larger one computed directly
/// and the other from `zeta_+ zeta_- = 1`.
pub fn floquet_multipliers(delta: Complex64) -> (Complex64, Complex64) {
    let root = (delta * delta - 4.0).sqrt();
    let a = (delta + root) * 0.5;
    let b = (delta - root) * 0.5;
    if a.norm() >= b.norm() {
        (a, 1.0 / a)
    } else {
        (1.0 / b, b)
    }
}

/// The gradient of `Delta(lambda, .)` at `phi`.
///
/// Uses `i dDelta = m_12 f_+ * f_-`, with `f_pm = M(x) (1, (zeta_pm - m_11) / m_12)`
/// and `(h * k) = (h_2 k_2, h_1 k_1)`, unless `m_12` is degenerate, in which case
/// the variational formula takes over.
pub fn zs_gradient(phi: &Potential, lambda: Complex64) -> Result<GradientField> {
    zs_gradient_with(&ZsSystem::new(phi), lambda)
}

pub fn zs_gradient_with(sys: &ZsSystem, lambda: Complex64) -> Result<GradientField> {
    let traj = sys.grid_trajectory(lambda, false)?;
    let mono = traj.last().expect("nonempty").0;
    if mono.get(0, 1).norm() < DEGENERATE_M12 {
        return Ok(variational_from(sys.n_modes(), &traj, lambda));
    }
    let m12 = mono.get(0, 1);
    let (zp, zm) = floquet_multipliers(mono.trace());
    let vp = [Complex64::new(1.0, 0.0), (zp - mono.get(0, 0)) / m12];
    let vm = [Complex64::new(1.0, 0.0), (zm - mono.get(0, 0)) / m12];
    let cells = 2 * sys.n_modes();
    let mut dm = Vec::with_capacity(cells);
    let mut dp = Vec::with_capacity(cells);
    for (m, _) in &traj[..cells] {
        let fp = m.apply(vp);
        let fm = m.apply(vm);
        dm.push(-I * m12 * fp[1] * fm[1]);
        dp.push(-I * m12 * fp[0] * fm[0]);
    }
    Ok(GradientField {
        d_minus: GridFunction::new(sys.n_modes(), dm)?,
        d_plus: GridFunction::new(sys.n_modes(), dp)?,
        lambda,
        method: GradientMethod::FloquetProduct,
    })
}

/// The gradient from the variational integral, valid for every `lambda`.
pub fn zs_gradient_variational(phi: &Potential, lambda: Complex64) -> Result<GradientField> {
    let sys = ZsSystem::new(phi);
    let traj = sys.grid_trajectory(lambda, false)?;
    Ok(variational_from(sys.n_modes(), &traj, lambda))
}

fn variational_from(n_modes: usize, traj: &[(Mat2, Option<Mat2>)], lambda: Complex64) -> GradientField {
    let mono = traj.last().expect("nonempty").0;
    let cells = 2 * n_modes;
    let (dm, dp): (Vec<_>, Vec<_>) = traj[..cells]
        .iter()
        .map(|(m, _)| {
            let k = *m * mono * m.adjugate();
            (I * k.get(1, 0), -I * k.get(0, 1))
        })
        .unzip();
    GradientField {
        d_minus: GridFunction::new(n_modes, dm).expect("grid"),
        d_plus: GridFunction::new(n_modes, dp).expect("grid"),
        lambda,
        method: GradientMethod::Variational,
    }
}

/// The auxiliary function `xi` and the residual of
/// `dx dDelta - 2 lambda R dDelta = xi J phi`, where `R = diag(i, -i)` and
/// `J phi = (phi_+, -phi_-)`.
#[derive(Debug, Clone)]
pub struct XiIdentity {
    pub xi: GridFunction,
    pub residual: f64,
}

/// Computes `xi(x) = (m_11 - m_22)(1) - 2i int_0^x (R phi . dDelta) dy` and the
/// max-norm residual of the identity.
pub fn xi_identity_residual(phi: &Potential, lambda: Complex64) -> Result<XiIdentity> {
    let sys = ZsSystem::new(phi);
    let (mono, _) = sys.monodromy(lambda, false)?;
    let grad = zs_gradient_with(&sys, lambda)?;
    xi_from_gradient(phi, &grad, mono)
}

pub fn xi_from_gradient(phi: &Potential, grad: &GradientField, mono: Mat2) -> Result<XiIdentity> {
    let n = phi.n_modes();
    let lambda = grad.lambda;
    // R phi . dDelta = i phi_- dDelta_- - i phi_+ dDelta_+.
    let integrand = phi
        .minus()
        .mul_pointwise(&grad.d_minus)
        .zip_with(&phi.plus().mul_pointwise(&grad.d_plus), |a, b| I * (a - b));
    let int = integrand.integral_from_zero();
    let offset = mono.get(0, 0) - mono.get(1, 1);
    let xi = GridFunction::new(n, int.iter().map(|v| offset - 2.0 * I * v).collect())?;

    let dx_m = grad.d_minus.derivative(1);
    let dx_p = grad.d_plus.derivative(1);
    let two_lambda = 2.0 * lambda;
    let mut residual: f64 = 0.0;
    for j in 0..2 * n {
        let lhs_m = dx_m.values()[j] - two_lambda * I * grad.d_minus.values()[j];
        let lhs_p = dx_p.values()[j] + two_lambda * I * grad.d_plus.values()[j];
        let rhs_m = xi.values()[j] * phi.plus().values()[j];
        let rhs_p = -xi.values()[j] * phi.minus().values()[j];
        residual = residual.max((lhs_m - rhs_m).norm()).max((lhs_p - rhs_p).norm());
    }
    Ok(XiIdentity { xi, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{pairing, Transform};
    use std::collections::BTreeMap;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn trig(pairs: &[(i64, Complex64)]) -> GridFunction {
        GridFunction::trig(&pairs.iter().copied().collect::<BTreeMap<_, _>>(), 64).unwrap()
    }

    fn real_u() -> GridFunction {
        trig(&[
            (0, c(0.1, 0.0)),
            (1, c(0.2, -0.1)),
            (-1, c(0.2, 0.1)),
            (2, c(0.05, 0.08)),
            (-2, c(0.05, -0.08)),
        ])
    }

    fn generic_phi() -> Potential {
        Potential::new(
            trig(&[(0, c(0.2, 0.1)), (1, c(0.3, -0.2)), (-2, c(0.1, 0.15))]),
            trig(&[(0, c(-0.1, 0.05)), (-1, c(0.25, 0.1)), (3, c(0.05, 0.0))]),
        )
        .unwrap()
    }

    #[test]
    fn zero_potential_closed_form() {
        let phi = Potential::zero(64);
        for &l in &[c(0.0, 0.0), c(1.0, 0.0), c(-3.0, 2.0), c(5.5, -4.0)] {
            let s = zs_delta(&phi, l).unwrap();
            assert!((s.value - 2.0 * l.cos()).norm() < 1e-10 * l.cos().norm().max(1.0));
            assert!((s.dvalue + 2.0 * l.sin()).norm() < 1e-10 * l.sin().norm().max(1.0));
        }
    }

    #[test]
    fn hill_zero_and_constant() {
        let s = hill_delta(&GridFunction::zeros(64), c(7.0, 0.0)).unwrap();
        assert!((s.value - 2.0 * 7f64.sqrt().cos()).norm() < 1e-10);
        let cst = 0.45;
        let u = GridFunction::constant(64, c(cst, 0.0));
        let s = hill_delta(&u, c(0.0, 0.0)).unwrap();
        assert!((s.value - 2.0 * cst.cosh()).norm() < 1e-10);
        let mu = c(3.0, 1.0);
        let s = hill_delta(&u, mu).unwrap();
        assert!((s.value - 2.0 * (mu - cst * cst).sqrt().cos()).norm() < 1e-10);
    }

    #[test]
    fn mean_value_at_origin() {
        let u = trig(&[(0, c(0.4, 0.0)), (1, c(0.15, 0.0)), (-1, c(0.15, 0.0))]);
        let s = zs_delta(&Potential::diagonal(&u), c(0.0, 0.0)).unwrap();
        assert!((s.value - 2.0 * 0.4f64.cosh()).norm() < 1e-9);
    }

    #[test]
    fn hill_matches_zs_on_diagonal() {
        let u = real_u();
        let phi = Potential::diagonal(&u);
        for &l in &[c(0.7, 0.0), c(2.0, 1.5), c(-4.0, -3.0)] {
            let a = hill_delta(&u, l * l).unwrap().value;
            let b = zs_delta(&phi, l).unwrap().value;
            assert!((a - b).norm() < 1e-8, "lambda {l}: {a} vs {b}");
        }
    }

    #[test]
    fn conjugation_identity() {
        assert!(conjugation_residual(&GridFunction::zeros(64), c(1.0, 0.0)).unwrap() < 1e-9);
        let u = trig(&[(1, c(0.25, 0.0)), (-1, c(0.25, 0.0))]);
        assert!(conjugation_residual(&u, c(2.0, 1.0)).unwrap() < 1e-8);
        assert!(matches!(
            conjugation_residual(&u, c(0.0, 0.0)),
            Err(Error::SingularConjugation(_))
        ));
    }

    #[test]
    fn real_on_real_axis_for_hermitian() {
        let v = trig(&[(1, c(0.3, 0.1)), (-2, c(0.0, 0.2)), (0, c(0.1, -0.1))]);
        let phi = Potential::hermitian(&v);
        for &l in &[-3.3, 0.2, 4.1] {
            assert!(zs_delta(&phi, c(l, 0.0)).unwrap().value.im.abs() < 1e-9);
        }
    }

    #[test]
    fn gradient_of_zero_potential_vanishes() {
        let g = zs_gradient(&Potential::zero(64), c(1.1, 0.2)).unwrap();
        assert_eq!(g.method, GradientMethod::Variational);
        assert!(g.d_minus.norm_max() < 1e-12 && g.d_plus.norm_max() < 1e-12);
    }

    #[test]
    fn gradient_formulas_agree() {
        let phi = generic_phi();
        let lambda = c(1.3, 0.4);
        let a = zs_gradient(&phi, lambda).unwrap();
        assert_eq!(a.method, GradientMethod::FloquetProduct);
        let b = zs_gradient_variational(&phi, lambda).unwrap();
        assert!(a.d_minus.max_abs_diff(&b.d_minus) < 1e-9);
        assert!(a.d_plus.max_abs_diff(&b.d_plus) < 1e-9);
    }

    #[test]
    fn gradient_matches_directional_derivative() {
        let phi = generic_phi();
        let lambda = c(2.1, -0.3);
        let grad = zs_gradient(&phi, lambda).unwrap().as_potential();
        let dir = Potential::new(
            trig(&[(2, c(0.1, 0.3)), (-1, c(-0.2, 0.1))]),
            trig(&[(0, c(0.3, 0.0)), (1, c(0.0, -0.2))]),
        )
        .unwrap();
        let h = 1e-4;
        let fp = zs_delta(&phi.add(&dir.scale(c(h, 0.0))), lambda).unwrap().value;
        let fm = zs_delta(&phi.add(&dir.scale(c(-h, 0.0))), lambda).unwrap().value;
        let fd = (fp - fm) / (2.0 * h);
        let an = pairing(&grad, &dir);
        assert!((fd - an).norm() < 1e-6 * an.norm(), "{fd} vs {an}");
    }

    #[test]
    fn gradient_swap_symmetry() {
        let phi = generic_phi();
        let lambda = c(0.8, 0.25);
        let a = zs_gradient(&phi, lambda).unwrap();
        let b = zs_gradient(&phi.transform(Transform::P), -lambda).unwrap();
        assert!(a.d_minus.max_abs_diff(&b.d_plus) < 1e-8);
        assert!(a.d_plus.max_abs_diff(&b.d_minus) < 1e-8);
    }

    #[test]
    fn xi_identity_holds() {
        let v = trig(&[(1, c(0.3, 0.1)), (-2, c(0.0, 0.2)), (0, c(0.1, -0.1))]);
        let phi = Potential::hermitian(&v);
        let lambda = c(1.3, 0.0);
        let xi = xi_identity_residual(&phi, lambda).unwrap();
        assert!(xi.residual < 1e-6, "residual {}", xi.residual);
        let other = xi_identity_residual(&phi.transform(Transform::P), -lambda).unwrap();
        assert!((&xi.xi + &other.xi).norm_max() < 1e-6);
    }

    #[test]
    fn xi_identity_trivial_at_zero() {
        let xi = xi_identity_residual(&Potential::zero(64), c(1.3, 0.0)).unwrap();
        assert!(xi.residual < 1e-12);
    }

    #[test]
    fn evenness_on_diagonal_and_reflection() {
        let u = real_u();
        let phi = Potential::diagonal(&u);
        let tphi = generic_phi().transform(Transform::T);
        for &l in &[c(1.7, 0.0), c(-2.5, 1.0)] {
            let a = zs_delta(&phi, l).unwrap().value;
            let b = zs_delta(&phi, -l).unwrap().value;
            assert!((a - b).norm() < 1e-8);
            let t = zs_delta(&tphi, -l).unwrap().value;
            let g = zs_delta(&generic_phi(), l).unwrap().value;
            assert!((t - g).norm() < 1e-8);
        }
    }
}
