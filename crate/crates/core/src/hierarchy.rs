//! Closed-form Hamiltonians of the mKdV hierarchy (`K_1`, `K_2`) and the NLS
//! hierarchy (`S_1..S_4`), their L2-gradients, Hamiltonian vector fields and
//! the residuals of the identities linking the two hierarchies.
//!
//! Gradients use the pairing `dF(phi)[h] = int (dF_- h_- + dF_+ h_+) dx`.
//! Vector fields are `Y_G = d/dx grad G` for the Gardner bracket and
//! `X_F = -i J dF = (-i dF_+, i dF_-)` for the NLS bracket.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::potential::Potential;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative tolerance for the symmetry-class checks guarding identities.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    K,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HamiltonianId {
    pub family: Family,
    pub index: u32,
}

impl HamiltonianId {
    pub const K1: Self = Self::k(1);
    pub const K2: Self = Self::k(2);
    pub const S1: Self = Self::s(1);
    pub const S2: Self = Self::s(2);
    pub const S3: Self = Self::s(3);
    pub const S4: Self = Self::s(4);

    const fn k(index: u32) -> Self {
        Self {
            family: Family::K,
            index,
        }
    }

    const fn s(index: u32) -> Self {
        Self {
            family: Family::S,
            index,
        }
    }

    pub fn new(family: Family, index: u32) -> Result<Self> {
        let max = match family {
            Family::K => 2,
            Family::S => 4,
        };
        if index == 0 || index > max {
            return Err(Error::InvalidArgument(format!(
                "{family:?}{index} has no closed form here (supported: 1..={max})"
            )));
        }
        Ok(Self { family, index })
    }

    pub fn all() -> [Self; 6] {
        [Self::K1, Self::K2, Self::S1, Self::S2, Self::S3, Self::S4]
    }
}

impl fmt::Display for HamiltonianId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            Family::K => "K",
            Family::S => "S",
        };
        write!(f, "{fam}{}", self.index)
    }
}

impl FromStr for HamiltonianId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let family = match s.chars().next() {
            Some('K' | 'k') => Family::K,
            Some('S' | 's') => Family::S,
            _ => return Err(Error::Parse(format!("unknown Hamiltonian '{s}'"))),
        };
        let index = s[1..]
            .parse()
            .map_err(|_| Error::Parse(format!("unknown Hamiltonian '{s}'")))?;
        Self::new(family, index)
    }
}

/// A point of either phase space, or a gradient / vector field living there.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Scalar(GridFunction),
    Pair(Potential),
}

impl State {
    pub fn n_modes(&self) -> usize {
        match self {
            State::Scalar(u) => u.n_modes(),
            State::Pair(p) => p.n_modes(),
        }
    }

    fn scalar(&self, id: HamiltonianId) -> Result<&GridFunction> {
        match self {
            State::Scalar(u) => Ok(u),
            State::Pair(_) => Err(Error::ShapeMismatch(format!("{id} (expects a scalar u)"))),
        }
    }

    fn pair(&self, id: HamiltonianId) -> Result<&Potential> {
        match self {
            State::Pair(p) => Ok(p),
            State::Scalar(_) => Err(Error::ShapeMismatch(format!("{id} (expects a pair phi)"))),
        }
    }
}

fn d(f: &GridFunction, order: u32) -> GridFunction {
    f.derivative(order)
}

fn prod(factors: &[&GridFunction]) -> GridFunction {
    GridFunction::product(factors)
}

fn integral(factors: &[&GridFunction]) -> Complex64 {
    GridFunction::integral_of_product(factors)
}

fn pair(minus: GridFunction, plus: GridFunction) -> Potential {
    Potential::new(minus, plus).expect("components share a grid")
}

/// `K_m(u)`, `m` in `1..=2`.
pub fn k_value(m: u32, u: &GridFunction) -> Result<Complex64> {
    match m {
        1 => Ok(0.5 * integral(&[u, u])),
        2 => {
            let ux = d(u, 1);
            Ok(0.5 * (integral(&[&ux, &ux]) + integral(&[u, u, u, u])))
        }
        _ => Err(HamiltonianId::new(Family::K, m).unwrap_err()),
    }
}

/// `grad K_m(u)`: `u` and `-u_xx + 2u^3`.
pub fn k_gradient(m: u32, u: &GridFunction) -> Result<GridFunction> {
    match m {
        1 => Ok(u.clone()),
        2 => Ok(&(&prod(&[u, u, u]) * 2.0) - &d(u, 2)),
        _ => Err(HamiltonianId::new(Family::K, m).unwrap_err()),
    }
}

/// `S_k(phi)`, `k` in `1..=4`.
pub fn s_value(k: u32, phi: &Potential) -> Result<Complex64> {
    let (a, b) = (phi.minus(), phi.plus());
    match k {
        1 => Ok(integral(&[a, b])),
        2 => Ok(0.5 * I * (integral(&[b, &d(a, 1)]) - integral(&[a, &d(b, 1)]))),
        3 => Ok(integral(&[&d(a, 1), &d(b, 1)]) + integral(&[a, a, b, b])),
        4 => Ok(I * (integral(&[a, &d(b, 3)]) - 3.0 * integral(&[a, a, b, &d(b, 1)]))),
        _ => Err(HamiltonianId::new(Family::S, k).unwrap_err()),
    }
}

/// `dS_k(phi) = (dS_k/dphi_-, dS_k/dphi_+)`.
pub fn s_gradient(k: u32, phi: &Potential) -> Result<Potential> {
    let (a, b) = (phi.minus(), phi.plus());
    match k {
        1 => Ok(pair(b.clone(), a.clone())),
        2 => Ok(pair(&d(b, 1) * (-I), &d(a, 1) * I)),
        3 => Ok(pair(
            &(&prod(&[a, b, b]) * 2.0) - &d(b, 2),
            &(&prod(&[b, a, a]) * 2.0) - &d(a, 2),
        )),
        4 => {
            let (ax, bx) = (d(a, 1), d(b, 1));
            Ok(pair(
                &(&d(b, 3) - &(&prod(&[a, b, &bx]) * 6.0)) * I,
                &(&(&prod(&[a, b, &ax]) * 6.0) - &d(a, 3)) * I,
            ))
        }
        _ => Err(HamiltonianId::new(Family::S, k).unwrap_err()),
    }
}

/// `Y_{K_m} = d/dx grad K_m`.
pub fn y_field(m: u32, u: &GridFunction) -> Result<GridFunction> {
    Ok(k_gradient(m, u)?.derivative(1))
}

/// `X_F = -i J dF` for a gradient `dF`.
pub fn x_from_gradient(grad: &Potential) -> Potential {
    pair(grad.plus() * (-I), grad.minus() * I)
}

/// `X_{S_k}(phi)`.
pub fn x_field(k: u32, phi: &Potential) -> Result<Potential> {
    Ok(x_from_gradient(&s_gradient(k, phi)?))
}

pub fn eval_hamiltonian(id: HamiltonianId, state: &State) -> Result<Complex64> {
    match id.family {
        Family::K => k_value(id.index, state.scalar(id)?),
        Family::S => s_value(id.index, state.pair(id)?),
    }
}

pub fn gradient(id: HamiltonianId, state: &State) -> Result<State> {
    match id.family {
        Family::K => Ok(State::Scalar(k_gradient(id.index, state.scalar(id)?)?)),
        Family::S => Ok(State::Pair(s_gradient(id.index, state.pair(id)?)?)),
    }
}

pub fn vector_field(id: HamiltonianId, state: &State) -> Result<State> {
    match id.family {
        Family::K => Ok(State::Scalar(y_field(id.index, state.scalar(id)?)?)),
        Family::S => Ok(State::Pair(x_field(id.index, state.pair(id)?)?)),
    }
}

/// Gardner bracket of two functionals from their gradients.
pub fn gardner_bracket(grad_f: &GridFunction, grad_g: &GridFunction) -> Complex64 {
    integral(&[grad_f, &grad_g.derivative(1)])
}

/// NLS bracket `-i int (dF_- dG_+ - dF_+ dG_-)` from the two gradients.
pub fn nls_bracket(grad_f: &Potential, grad_g: &Potential) -> Complex64 {
    -I * (integral(&[grad_f.minus(), grad_g.plus()]) - integral(&[grad_f.plus(), grad_g.minus()]))
}

/// Bracket of two Hamiltonians of the same family at `state`.
pub fn poisson_bracket(f: HamiltonianId, g: HamiltonianId, state: &State) -> Result<Complex64> {
    match (f.family, g.family) {
        (Family::K, Family::K) => {
            let u = state.scalar(f)?;
            Ok(gardner_bracket(&k_gradient(f.index, u)?, &k_gradient(g.index, u)?))
        }
        (Family::S, Family::S) => {
            let phi = state.pair(f)?;
            Ok(nls_bracket(&s_gradient(f.index, phi)?, &s_gradient(g.index, phi)?))
        }
        _ => Err(Error::ShapeMismatch(format!("bracket of {f} and {g} (different families)"))),
    }
}

/// `R a` with `R = diag(i, -i)`.
pub fn r_apply(a: &Potential) -> Potential {
    pair(a.minus() * I, a.plus() * (-I))
}

/// `J a = (a_+, -a_-)`.
pub fn j_apply(a: &Potential) -> Potential {
    pair(a.plus().clone(), -a.minus())
}

/// The scalar density `R phi . a = i (phi_- a_- - phi_+ a_+)`.
pub fn r_dot(phi: &Potential, a: &Potential) -> GridFunction {
    &(&prod(&[phi.minus(), a.minus()]) - &prod(&[phi.plus(), a.plus()])) * I
}

fn potential_derivative(a: &Potential) -> Potential {
    pair(a.minus().derivative(1), a.plus().derivative(1))
}

fn max_diff(a: &Potential, b: &Potential) -> f64 {
    a.distance(b)
}

/// `alpha` with `P phi = R_alpha phi`, if one exists.
pub fn swap_phase(phi: &Potential) -> Option<f64> {
    let (a, b) = (phi.minus(), phi.plus());
    let scale = phi.norm_max();
    if scale == 0.0 {
        return Some(0.0);
    }
    let (j, _) = a
        .values()
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
    if a.values()[j].norm() < 0.5 * scale && b.norm_max() > 0.0 {
        // phi_- much smaller than phi_+: no unimodular ratio.
        return None;
    }
    let e = b.values()[j] / a.values()[j];
    if (e.norm() - 1.0).abs() > SYMMETRY_TOL {
        return None;
    }
    let ok = a
        .values()
        .iter()
        .zip(b.values())
        .all(|(x, y)| (y - e * x).norm() <= SYMMETRY_TOL * scale);
    ok.then(|| e.arg())
}

/// `+1` or `-1` if `T phi = +-phi`.
pub fn reflection_parity(phi: &Potential) -> Option<f64> {
    let scale = phi.norm_max().max(f64::MIN_POSITIVE);
    let t = phi.transform(crate::potential::Transform::T);
    [1.0, -1.0]
        .into_iter()
        .find(|&s| t.distance(&phi.scale(Complex64::new(s, 0.0))) <= SYMMETRY_TOL * scale)
}

fn diagonal_of(phi: &Potential, identity: &str) -> Result<()> {
    let scale = phi.norm_max();
    if phi.minus().max_abs_diff(phi.plus()) > SYMMETRY_TOL * scale.max(1.0) {
        return Err(Error::Precondition {
            identity: identity.into(),
            reason: "requires a diagonal potential phi_- = phi_+".into(),
        });
    }
    Ok(())
}

fn check_level(m: u32) -> Result<()> {
    if !(1..=2).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "hierarchy level m = {m} outside the closed-form range 1..=2"
        )));
    }
    Ok(())
}

/// `|| X_{S_2m}(u,u) - (Y_{K_m}, Y_{K_m}) ||`.
pub fn restriction_residual(u: &GridFunction, m: u32) -> Result<f64> {
    check_level(m)?;
    let x = x_field(2 * m, &Potential::diagonal(u))?;
    let y = y_field(m, u)?;
    Ok(x.minus().max_abs_diff(&y).max(x.plus().max_abs_diff(&y)))
}

/// `|| -i J dS_2m - d/dx dS_{2m-1} ||` on a diagonal potential.
pub fn swap_gradient_residual(phi: &Potential, m: u32) -> Result<f64> {
    check_level(m)?;
    diagonal_of(phi, "swap gradient identity -iJ dS_2m = d/dx dS_(2m-1)")?;
    let lhs = x_from_gradient(&s_gradient(2 * m, phi)?);
    let rhs = potential_derivative(&s_gradient(2 * m - 1, phi)?);
    Ok(max_diff(&lhs, &rhs))
}

/// `|| R dS_2m - d/dx dS_{2m-1} ||` for `P phi = R_alpha phi`.
pub fn rotation_gradient_residual(phi: &Potential, m: u32) -> Result<f64> {
    check_level(m)?;
    if swap_phase(phi).is_none() {
        return Err(Error::Precondition {
            identity: "rotation gradient identity R dS_2m = d/dx dS_(2m-1)".into(),
            reason: "requires P phi = R_alpha phi for some real alpha".into(),
        });
    }
    let lhs = r_apply(&s_gradient(2 * m, phi)?);
    let rhs = potential_derivative(&s_gradient(2 * m - 1, phi)?);
    Ok(max_diff(&lhs, &rhs))
}

/// Residual of `R dS_2m = d/dx dS_{2m-1} + 2i (int_0^x R phi . dS_{2m-1}) J phi`
/// for `T phi = +-phi`.
pub fn reflection_gradient_residual(phi: &Potential, m: u32) -> Result<f64> {
    check_level(m)?;
    if reflection_parity(phi).is_none() {
        return Err(Error::Precondition {
            identity: "reflection gradient identity with the integral term".into(),
            reason: "requires T phi = +-phi".into(),
        });
    }
    let lower = s_gradient(2 * m - 1, phi)?;
    let lhs = r_apply(&s_gradient(2 * m, phi)?);
    let dlower = potential_derivative(&lower);
    let w = r_dot(phi, &lower).integral_from_zero();
    let jphi = j_apply(phi);
    let mut res: f64 = 0.0;
    for (l, dl, jp) in [
        (lhs.minus(), dlower.minus(), jphi.minus()),
        (lhs.plus(), dlower.plus(), jphi.plus()),
    ] {
        for j in 0..l.len() {
            let r = l.values()[j] - dl.values()[j] - 2.0 * I * w[j] * jp.values()[j];
            res = res.max(r.norm());
        }
    }
    Ok(res)
}

/// `|K_m(u) - S_{2m-1}(u,u) / 2|`.
pub fn odd_restriction_residual(u: &GridFunction, m: u32) -> Result<f64> {
    check_level(m)?;
    Ok((k_value(m, u)? - 0.5 * s_value(2 * m - 1, &Potential::diagonal(u))?).norm())
}

/// `|S_2m(u,u)|`.
pub fn even_restriction_residual(u: &GridFunction, m: u32) -> Result<f64> {
    check_level(m)?;
    Ok(s_value(2 * m, &Potential::diagonal(u))?.norm())
}

/// One named identity residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub identity: String,
    pub m: u32,
    pub residual: f64,
}

/// Vector-field restriction, swap-gradient identity, odd and even Hamiltonian
/// restrictions for `m = 1, 2` at the diagonal potential `(u, u)`.
pub fn identity_residuals(u: &GridFunction) -> Result<Vec<IdentityResidual>> {
    let phi = Potential::diagonal(u);
    let mut out = Vec::new();
    for m in 1..=2 {
        let mut push = |name: &str, r: f64| {
            out.push(IdentityResidual {
                identity: name.into(),
                m,
                residual: r,
            })
        };
        push("X_S2m restricted = (Y_Km, Y_Km)", restriction_residual(u, m)?);
        push("-iJ dS_2m = d/dx dS_(2m-1)", swap_gradient_residual(&phi, m)?);
        push("K_m = S_(2m-1)/2 on the diagonal", odd_restriction_residual(u, m)?);
        push("S_2m = 0 on the diagonal", even_restriction_residual(u, m)?);
    }
    Ok(out)
}

/// Residuals of `dS_k(phi) = (-1)^(k-1) P dS_k(P phi)`, `= R_alpha dS_k(R_alpha phi)`
/// and `= (-1)^(k-1) T dS_k(T phi)`.
pub fn gradient_symmetry_residuals(k: u32, phi: &Potential, alpha: f64) -> Result<[f64; 3]> {
    use crate::potential::Transform;
    let g = s_gradient(k, phi)?;
    let sign = Complex64::new(if k % 2 == 1 { 1.0 } else { -1.0 }, 0.0);
    let p = s_gradient(k, &phi.transform(Transform::P))?
        .transform(Transform::P)
        .scale(sign);
    let r = s_gradient(k, &phi.transform(Transform::R(alpha)))?.transform(Transform::R(alpha));
    let t = s_gradient(k, &phi.transform(Transform::T))?
        .transform(Transform::T)
        .scale(sign);
    Ok([g.distance(&p), g.distance(&r), g.distance(&t)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Transform;
    use proptest::prelude::*;
    use std::collections::BTreeMap;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn trig(pairs: &[(i64, Complex64)]) -> GridFunction {
        GridFunction::trig(&pairs.iter().copied().collect::<BTreeMap<_, _>>(), 32).unwrap()
    }

    fn real_u() -> GridFunction {
        trig(&[
            (0, c(0.2, 0.0)),
            (1, c(0.3, -0.1)),
            (-1, c(0.3, 0.1)),
            (3, c(0.05, 0.1)),
            (-3, c(0.05, -0.1)),
        ])
    }

    fn generic_phi() -> Potential {
        Potential::new(
            trig(&[(0, c(0.1, 0.2)), (1, c(0.3, -0.1)), (-2, c(0.1, 0.05))]),
            trig(&[(0, c(-0.2, 0.1)), (-1, c(0.2, 0.2)), (2, c(0.0, 0.15))]),
        )
        .unwrap()
    }

    #[test]
    fn k2_of_cosine() {
        let a: f64 = 0.7;
        let u = GridFunction::from_fn(32, |x| c(a * (2.0 * PI * x).cos(), 0.0));
        let expect = a * a * PI * PI + 3.0 * a.powi(4) / 16.0;
        assert!((k_value(2, &u).unwrap().re - expect).abs() < 1e-12);
    }

    #[test]
    fn diagonal_values() {
        let u = real_u();
        let phi = Potential::diagonal(&u);
        let s1 = s_value(1, &phi).unwrap();
        assert!((s1 - 2.0 * k_value(1, &u).unwrap()).norm() < 1e-13);
        assert!(s_value(2, &phi).unwrap().norm() < 1e-13);
        assert!(s_value(4, &phi).unwrap().norm() < 1e-12);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let phi = generic_phi();
        let h = Potential::new(
            trig(&[(1, c(0.2, 0.3)), (-3, c(-0.1, 0.2))]),
            trig(&[(2, c(0.1, -0.2)), (0, c(0.3, 0.0))]),
        )
        .unwrap();
        let eps = 1e-5;
        for k in 1..=4 {
            let g = s_gradient(k, &phi).unwrap();
            let analytic = crate::potential::pairing(&g, &h);
            let fp = s_value(k, &phi.add(&h.scale(c(eps, 0.0)))).unwrap();
            let fm = s_value(k, &phi.add(&h.scale(c(-eps, 0.0)))).unwrap();
            let fd = (fp - fm) / (2.0 * eps);
            assert!((fd - analytic).norm() < 1e-7 * analytic.norm().max(1.0), "S{k}");
        }
        let u = real_u();
        let v = trig(&[(2, c(0.1, 0.1)), (-2, c(0.1, -0.1))]);
        for m in 1..=2 {
            let analytic = GridFunction::integral_of_product(&[&k_gradient(m, &u).unwrap(), &v]);
            let fp = k_value(m, &(&u + &(&v * eps))).unwrap();
            let fm = k_value(m, &(&u - &(&v * eps))).unwrap();
            let fd = (fp - fm) / (2.0 * eps);
            assert!((fd - analytic).norm() < 1e-7 * analytic.norm().max(1.0), "K{m}");
        }
    }

    #[test]
    fn vector_fields_reproduce_the_pdes() {
        let u = real_u();
        let phi = Potential::diagonal(&u);
        let x4 = x_field(4, &phi).unwrap();
        let mkdv = &(&prod(&[&u, &u, &d(&u, 1)]) * 6.0) - &d(&u, 3);
        assert!(x4.minus().max_abs_diff(&mkdv) < 1e-10);
        assert!(x4.plus().max_abs_diff(&mkdv) < 1e-10);
        assert!(y_field(1, &u).unwrap().max_abs_diff(&d(&u, 1)) < 1e-13);

        // NLS restriction: i v_t = -v_xx + 2|v|^2 v.
        let v = trig(&[(1, c(0.3, 0.2)), (-2, c(0.1, -0.1))]);
        let x3 = x_field(3, &Potential::hermitian(&v)).unwrap();
        let rhs = &(&prod(&[&v, &v, &v.conj()]) * 2.0) - &d(&v, 2);
        assert!((x3.minus() * I).max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn hierarchy_identities_on_the_diagonal() {
        for r in identity_residuals(&real_u()).unwrap() {
            assert!(r.residual < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn swap_identity_needs_the_diagonal_but_rotation_form_allows_any_phase() {
        let u = real_u();
        let rotated = Potential::diagonal(&u).transform(Transform::R(0.6));
        assert!(swap_phase(&rotated).is_some());
        assert!(matches!(
            swap_gradient_residual(&rotated, 2),
            Err(Error::Precondition { .. })
        ));
        for m in 1..=2 {
            assert!(rotation_gradient_residual(&rotated, m).unwrap() < 1e-9);
        }
        assert!(rotation_gradient_residual(&generic_phi(), 1).is_err());
    }

    #[test]
    fn reflection_identity_with_integral_term() {
        // Even in x - 1/2: cosines only; not diagonal.
        let a = GridFunction::from_fn(32, |x| {
            c(0.3 * (2.0 * PI * x).cos(), 0.1) + c(0.0, 0.2) * (4.0 * PI * x).cos()
        });
        let b = GridFunction::from_fn(32, |x| c(0.1, 0.0) + c(0.25, -0.1) * (2.0 * PI * x).cos());
        let phi = Potential::new(a, b).unwrap();
        assert_eq!(reflection_parity(&phi), Some(1.0));
        for m in 1..=2 {
            assert!(reflection_gradient_residual(&phi, m).unwrap() < 1e-8, "m {m}");
        }
        assert!(reflection_gradient_residual(&generic_phi(), 2).is_err());
    }

    #[test]
    fn brackets_vanish() {
        let u = State::Scalar(real_u());
        let b = poisson_bracket(HamiltonianId::K1, HamiltonianId::K2, &u).unwrap();
        assert!(b.norm() < 1e-10);
        let phi = State::Pair(generic_phi());
        for j in 1..=4 {
            for k in 1..=4 {
                let b = poisson_bracket(HamiltonianId::s(j), HamiltonianId::s(k), &phi).unwrap();
                assert!(b.norm() < 1e-10, "S{j} S{k}: {b}");
            }
        }
    }

    #[test]
    fn casimir_mean_of_y_fields() {
        for m in 1..=2 {
            assert!(y_field(m, &real_u()).unwrap().mean().norm() < 1e-12);
        }
    }

    #[test]
    fn shape_mismatch_and_parsing() {
        let u = State::Scalar(real_u());
        assert!(matches!(
            eval_hamiltonian(HamiltonianId::S1, &u),
            Err(Error::ShapeMismatch(_))
        ));
        assert_eq!("S3".parse::<HamiltonianId>().unwrap(), HamiltonianId::S3);
        assert_eq!(HamiltonianId::K2.to_string(), "K2");
        assert!("S5".parse::<HamiltonianId>().is_err());
        assert!("Q1".parse::<HamiltonianId>().is_err());
    }

    #[test]
    fn real_subspace_tangency() {
        let v = trig(&[(1, c(0.3, 0.2)), (0, c(0.1, -0.3)), (-2, c(0.1, -0.1))]);
        let phi = Potential::hermitian(&v);
        for k in 1..=4 {
            let x = x_field(k, &phi).unwrap();
            assert!(x.plus().max_abs_diff(&x.minus().conj()) < 1e-9, "S{k}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn gradient_symmetries(
            re in proptest::collection::vec(-0.3f64..0.3, 6),
            im in proptest::collection::vec(-0.3f64..0.3, 6),
            alpha in -3.0f64..3.0,
        ) {
            let phi = Potential::new(
                trig(&[(0, c(re[0], im[0])), (1, c(re[1], im[1])), (-2, c(re[2], im[2]))]),
                trig(&[(0, c(re[3], im[3])), (-1, c(re[4], im[4])), (3, c(re[5], im[5]))]),
            ).unwrap();
            for k in 1..=4 {
                for r in gradient_symmetry_residuals(k, &phi, alpha).unwrap() {
                    prop_assert!(r < 1e-9);
                }
            }
        }
    }
}
