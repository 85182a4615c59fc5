//! Canonical square roots of `Delta^2 - 4`, the Abelian primitive `F`, action
//! variables by contour quadrature, and asymptotic extraction of hierarchy
//! Hamiltonians from `F`.
//!
//! The canonical root is fixed on the first band by `i sqrt(Delta^2 - 4) > 0`
//! and continued analytically. On each real band the root is purely
//! imaginary, so its branch there is a sign `b_n`; the signs are propagated
//! from band to band by tracking the root along upper half-plane arcs that
//! pass over each gap. Off the real axis the root is tracked along a path
//! starting from a band point with known sign, choosing at each step the
//! square root closest to the previous value and refining the step when the
//! choice is ambiguous.
//!
//! Near gap `n` the primitive is evaluated by the local formula
//! `F = -i n pi + Log((-1)^n (Delta + sqrt(Delta^2 - 4)) / 2)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discriminant::delta;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::potential::Potential;
use crate::spectrum::{hill_spectrum_with, zs_spectrum_with, SpectrumTable};
use crate::transfer::{HillSystem, LinearSystem, OperatorKind, TransferConfig, ZsSystem};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default quadrature nodes on a contour.
pub const DEFAULT_NODES: usize = 256;
/// Nodes used when the contour radius is below [`SMALL_RADIUS`].
pub const SMALL_RADIUS_NODES: usize = 512;
pub const SMALL_RADIUS: f64 = 0.05;
/// Position of the contour between the gap and the isolating-disc boundary.
pub const CONTOUR_FRACTION: f64 = 0.8;
/// Step length used when tracking the root along a path.
pub const TRACK_STEP: f64 = 0.05;
/// Maximum number of bisections of one tracking step.
const MAX_REFINE: u32 = 12;

/// A counter-clockwise circle used as an integration contour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub center: f64,
    pub radius: f64,
    pub n_points: usize,
    pub encloses_origin: bool,
}

impl Contour {
    pub fn new(center: f64, radius: f64, n_points: usize) -> Self {
        Self {
            center,
            radius,
            n_points,
            encloses_origin: center.abs() < radius,
        }
    }

    pub fn node(&self, j: usize) -> Complex64 {
        let theta = 2.0 * PI * j as f64 / self.n_points as f64;
        self.center + self.radius * Complex64::from_polar(1.0, theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionKind {
    I,
    J,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub n: i64,
    pub k: i64,
    pub value: Complex64,
    /// `|Q_N - Q_{N/2}|`, the change under halving the node count.
    pub quad_error: f64,
    pub kind: ActionKind,
    pub contour: Contour,
}

/// The spectral curve of a real-type potential: the prepared system, its
/// periodic spectrum and the signs of the canonical root on the real bands.
pub struct SpectralCurve<S: LinearSystem> {
    sys: S,
    table: SpectrumTable,
    band_signs: BTreeMap<i64, f64>,
}

pub type ZsCurve = SpectralCurve<ZsSystem>;
pub type HillCurve = SpectralCurve<HillSystem>;

impl ZsCurve {
    pub fn zs(phi: &Potential, n_spec: usize, config: TransferConfig) -> Result<Self> {
        let table = zs_spectrum_with(phi, n_spec, config)?;
        Self::new(ZsSystem::with_config(phi, config), table)
    }
}

impl HillCurve {
    pub fn hill(u: &GridFunction, n_spec: usize, config: TransferConfig) -> Result<Self> {
        let table = hill_spectrum_with(u, n_spec, config)?;
        Self::new(HillSystem::from_miura(u, config), table)
    }
}

/// The square root of `w^2` that makes `i w` have the sign `band_sign` on a band.
fn oriented(w: Complex64, band_sign: f64) -> Complex64 {
    if (I * w).re * band_sign >= 0.0 {
        w
    } else {
        -w
    }
}

impl<S: LinearSystem> SpectralCurve<S> {
    pub fn new(sys: S, table: SpectrumTable) -> Result<Self> {
        if sys.kind() != table.kind {
            return Err(Error::InvalidArgument("spectrum and system kinds differ".into()));
        }
        let mut curve = Self {
            sys,
            table,
            band_signs: BTreeMap::new(),
        };
        curve.propagate_band_signs()?;
        Ok(curve)
    }

    pub fn system(&self) -> &S {
        &self.sys
    }

    pub fn table(&self) -> &SpectrumTable {
        &self.table
    }

    pub fn kind(&self) -> OperatorKind {
        self.sys.kind()
    }

    /// Sign of `i sqrt(Delta^2 - 4)` on band `n`, the interval between gaps
    /// `n` and `n + 1`.
    pub fn band_sign(&self, n: i64) -> Option<f64> {
        self.band_signs.get(&n).copied()
    }

    pub fn band_signs(&self) -> &BTreeMap<i64, f64> {
        &self.band_signs
    }

    /// Midpoint of band `n`, if both bounding gaps are in the table.
    pub fn band_point(&self, n: i64) -> Option<f64> {
        let left = if self.kind() == OperatorKind::Hill && n == 0 {
            self.table.ground_state?
        } else {
            self.table.entry(n)?.lam_plus
        };
        let right = self.table.entry(n + 1)?.lam_minus;
        Some(0.5 * (left + right))
    }

    fn lowest_band(&self) -> i64 {
        match self.kind() {
            OperatorKind::Zs => self.table.n_range().0,
            OperatorKind::Hill => 0,
        }
    }

    fn propagate_band_signs(&mut self) -> Result<()> {
        let (_, top) = self.table.n_range();
        self.band_signs.insert(0, 1.0);
        // Upwards: band n - 1 -> band n over gap n.
        let mut n = 1;
        while n < top {
            let sign = self.arc_transfer(n - 1, n)?;
            self.band_signs.insert(n, sign);
            n += 1;
        }
        // Downwards: band n + 1 -> band n over gap n + 1.
        let mut n = -1;
        while n >= self.lowest_band() {
            let sign = self.arc_transfer(n + 1, n)?;
            self.band_signs.insert(n, sign);
            n -= 1;
        }
        Ok(())
    }

    /// Tracks the root from band `from` to band `to` along an upper arc and
    /// returns the resulting band sign.
    fn arc_transfer(&self, from: i64, to: i64) -> Result<f64> {
        let a = self.band_point(from).expect("band in table");
        let b = self.band_point(to).expect("band in table");
        let sign = self.band_signs[&from];
        let (_, w0) = self.root_with_delta(Complex64::new(a, 0.0))?;
        let start = oriented(w0, sign);
        let center = 0.5 * (a + b);
        let radius = 0.5 * (b - a).abs();
        let steps = ((PI * radius / TRACK_STEP).ceil() as usize).max(8);
        let (t0, t1) = if a < b { (PI, 0.0) } else { (0.0, PI) };
        let path: Vec<Complex64> = (0..=steps)
            .map(|j| {
                let t = t0 + (t1 - t0) * j as f64 / steps as f64;
                center + radius * Complex64::from_polar(1.0, t)
            })
            .collect();
        let (_, end) = self.track(&path, start)?;
        Ok((I * end).re.signum())
    }

    /// `Delta(z)` and the principal square root of `Delta(z)^2 - 4`.
    pub fn root_with_delta(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (m, _) = self.sys.monodromy(z, false)?;
        let d = m.trace();
        Ok((d, (d * d - 4.0).sqrt()))
    }

    /// Continues `start` (a root at `path[0]`) along `path`, returning the
    /// discriminant and the continued root at the last point.
    fn track(&self, path: &[Complex64], start: Complex64) -> Result<(Complex64, Complex64)> {
        let mut w = start;
        let mut d = Complex64::new(0.0, 0.0);
        for pair in path.windows(2) {
            let (dd, ww) = self.track_step(pair[0], pair[1], w, 0)?;
            d = dd;
            w = ww;
        }
        if path.len() == 1 {
            d = self.root_with_delta(path[0])?.0;
        }
        Ok((d, w))
    }

    fn track_step(
        &self,
        p: Complex64,
        q: Complex64,
        w_p: Complex64,
        depth: u32,
    ) -> Result<(Complex64, Complex64)> {
        let (d, w) = self.root_with_delta(q)?;
        let pick = if (w - w_p).norm() <= (w + w_p).norm() { w } else { -w };
        let scale = pick.norm().max(w_p.norm());
        // Landing next to a branch point: both signs are close to zero.
        let near_branch = w.norm() < 0.05 * w_p.norm();
        let ambiguous = scale > 1e-7 && !near_branch && (pick - w_p).norm() > 0.5 * scale;
        if !ambiguous {
            return Ok((d, pick));
        }
        if depth >= MAX_REFINE {
            return Err(Error::Branch {
                lambda: q,
                reason: "square root changes too fast along the path after refinement".into(),
            });
        }
        let mid = 0.5 * (p + q);
        let (_, w_mid) = self.track_step(p, mid, w_p, depth + 1)?;
        self.track_step(mid, q, w_mid, depth + 1)
    }

    fn on_gap(&self, z: Complex64) -> bool {
        if z.im != 0.0 {
            return false;
        }
        if self.kind() == OperatorKind::Hill {
            if let Some(g) = self.table.ground_state {
                if z.re < g {
                    return true;
                }
            }
        }
        self.table
            .entries
            .iter()
            .any(|e| e.gap > 0.0 && z.re > e.lam_minus && z.re < e.lam_plus)
    }

    /// Anchor band adjacent to gap `n`: the band on its right when known,
    /// otherwise the one on its left.
    fn anchor_band(&self, n: i64) -> Result<i64> {
        [n, n - 1]
            .into_iter()
            .find(|b| self.band_signs.contains_key(b) && self.band_point(*b).is_some())
            .ok_or_else(|| Error::InvalidArgument(format!("gap {n} outside the computed spectrum")))
    }

    /// The canonical root at `z`, continued from a band next to gap `anchor`.
    pub fn canonical_root(&self, z: Complex64, anchor: i64) -> Result<Complex64> {
        Ok(self.root_and_delta(z, anchor)?.1)
    }

    fn root_and_delta(&self, z: Complex64, anchor: i64) -> Result<(Complex64, Complex64)> {
        if self.on_gap(z) {
            return Err(Error::OnGap(z));
        }
        let band = self.anchor_band(anchor)?;
        let a = self.band_point(band).expect("anchor band");
        let sign = self.band_signs[&band];
        let (_, w0) = self.root_with_delta(Complex64::new(a, 0.0))?;
        let start = oriented(w0, sign);
        let up = if z.im >= 0.0 { 1.0 } else { -1.0 };
        let height = up * z.im.abs().max(0.5);
        let corners = [
            Complex64::new(a, 0.0),
            Complex64::new(a, height),
            Complex64::new(z.re, height),
            z,
        ];
        let mut path = vec![corners[0]];
        for seg in corners.windows(2) {
            let len = (seg[1] - seg[0]).norm();
            let steps = (len / TRACK_STEP).ceil() as usize;
            for j in 1..=steps {
                path.push(seg[0] + (seg[1] - seg[0]) * (j as f64 / steps as f64));
            }
        }
        let (d, w) = self.track(&path, start)?;
        // At a gap endpoint the root vanishes and its sign is immaterial.
        if (d * d - 4.0).norm() < 1e-14 {
            return Ok((d, Complex64::new(0.0, 0.0)));
        }
        Ok((d, w))
    }

    /// `F(z)` by the local logarithm formula near gap `near_gap`.
    pub fn f_value(&self, z: Complex64, near_gap: i64) -> Result<Complex64> {
        let (d, w) = self.root_and_delta(z, near_gap)?;
        Ok(local_f(d, w, near_gap))
    }

    /// The integration contour around gap `n`.
    pub fn contour(&self, n: i64) -> Result<Contour> {
        let disc = self
            .table
            .disc(n)
            .ok_or_else(|| Error::InvalidArgument(format!("gap {n} outside the computed spectrum")))?;
        let radius = disc.contour_radius(CONTOUR_FRACTION);
        let nodes = if radius < SMALL_RADIUS {
            SMALL_RADIUS_NODES
        } else {
            DEFAULT_NODES
        };
        Ok(Contour::new(disc.center, radius, nodes))
    }

    /// `F` at the contour nodes, tracking the root around the circle.
    pub fn f_on_contour(&self, contour: &Contour, n: i64) -> Result<Vec<(Complex64, Complex64)>> {
        let disc = self.table.disc(n).ok_or_else(|| {
            Error::InvalidArgument(format!("gap {n} outside the computed spectrum"))
        })?;
        if contour.radius <= disc.half_gap || contour.radius >= disc.radius {
            return Err(Error::InvalidArgument(format!(
                "contour radius {} must lie strictly between the half gap {} and the disc radius {}",
                contour.radius, disc.half_gap, disc.radius
            )));
        }
        // Start on the real axis on whichever side has a known band sign.
        let band = self.anchor_band(n)?;
        let sign = self.band_signs[&band];
        let offset = if band == n { 0 } else { contour.n_points / 2 };
        let z0 = contour.node(offset);
        let (d0, w0) = self.root_with_delta(z0)?;
        let mut w = oriented(w0, sign);
        let mut d = d0;
        let mut out = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); contour.n_points];
        out[offset] = (z0, local_f(d, w, n));
        let mut prev = z0;
        for step in 1..=contour.n_points {
            let j = (offset + step) % contour.n_points;
            let z = contour.node(j);
            let (dd, ww) = self.track_step(prev, z, w, 0)?;
            d = dd;
            w = ww;
            if step < contour.n_points {
                out[j] = (z, local_f(d, w, n));
            }
            prev = z;
        }
        // After a full turn the root must return to its starting value.
        let start = oriented(w0, sign);
        if (w - start).norm() > 1e-6 * start.norm().max(1.0) {
            return Err(Error::Branch {
                lambda: z0,
                reason: "root is not single-valued on the contour".into(),
            });
        }
        let _ = d;
        Ok(out)
    }

    /// Action on level `k` around gap `n`: `I_{n,k}` for ZS, `J_{n,k}` for Hill.
    pub fn action(&self, n: i64, k: i64) -> Result<ActionRecord> {
        let contour = self.contour(n)?;
        self.action_on(&contour, n, k)
    }

    pub fn action_on(&self, contour: &Contour, n: i64, k: i64) -> Result<ActionRecord> {
        let samples = self.f_on_contour(contour, n)?;
        Ok(self.integrate_samples(&samples, contour, n, k))
    }

    /// Actions for several levels from one set of contour samples.
    pub fn actions(&self, n: i64, levels: &[i64]) -> Result<Vec<ActionRecord>> {
        let contour = self.contour(n)?;
        let samples = self.f_on_contour(&contour, n)?;
        Ok(levels
            .iter()
            .map(|&k| self.integrate_samples(&samples, &contour, n, k))
            .collect())
    }

    fn integrate_samples(
        &self,
        samples: &[(Complex64, Complex64)],
        contour: &Contour,
        n: i64,
        k: i64,
    ) -> ActionRecord {
        let (kind, power, prefactor) = match self.kind() {
            OperatorKind::Zs => (ActionKind::I, k - 1, -1.0 / PI),
            OperatorKind::Hill => (ActionKind::J, k - 2, -1.0 / (4.0 * PI)),
        };
        let quad = |stride: usize| -> Complex64 {
            let count = contour.n_points / stride;
            let sum: Complex64 = samples
                .iter()
                .step_by(stride)
                .map(|&(z, f)| {
                    let dz = I * (z - contour.center);
                    z.powi(power as i32) * f * dz
                })
                .sum();
            sum * (2.0 * PI / count as f64) * prefactor
        };
        let full = quad(1);
        let half = quad(2);
        ActionRecord {
            n,
            k,
            value: full,
            quad_error: (full - half).norm(),
            kind,
            contour: *contour,
        }
    }

    /// Cross-checks the local formula against direct quadrature of
    /// `F' = Delta' / sqrt(Delta^2 - 4)` along a radial segment in the
    /// annulus around gap `n`; returns the absolute discrepancy.
    pub fn f_path_check(&self, n: i64, angle: f64) -> Result<f64> {
        let disc = self.table.disc(n).ok_or_else(|| {
            Error::InvalidArgument(format!("gap {n} outside the computed spectrum"))
        })?;
        let dir = Complex64::from_polar(1.0, angle);
        let za = disc.center + disc.contour_radius(0.5) * dir;
        let zb = disc.center + disc.contour_radius(0.95) * dir;
        let fa = self.f_value(za, n)?;
        let fb = self.f_value(zb, n)?;
        let wa = self.canonical_root(za, n)?;
        let (nodes, weights) = gauss_legendre_20();
        let half = 0.5 * (zb - za);
        let mid = 0.5 * (za + zb);
        let mut integral = Complex64::new(0.0, 0.0);
        let mut prev = za;
        let mut w = wa;
        for (x, wt) in nodes.iter().zip(weights) {
            let z = mid + half * *x;
            let (_, ww) = self.track_step(prev, z, w, 0)?;
            w = ww;
            prev = z;
            let d = delta(&self.sys, z)?;
            integral += d.dvalue / w * wt;
        }
        Ok((integral * half - (fb - fa)).norm())
    }
}

fn local_f(d: Complex64, w: Complex64, n: i64) -> Complex64 {
    let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    -I * (n as f64) * PI + (sign * (d + w) * 0.5).ln()
}

/// Twenty-point Gauss-Legendre nodes and weights on `[-1, 1]`, from Newton
/// iteration on the Legendre recurrence.
fn gauss_legendre_20() -> (Vec<f64>, Vec<f64>) {
    let n = 20;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

fn default_n_spec(n: i64) -> usize {
    (n.unsigned_abs() as usize + 2).max(4)
}

/// The canonical root `sqrt(Delta^2(lambda, phi) - 4)`, continued from a band
/// adjacent to gap `anchor`.
pub fn canonical_root(phi: &Potential, lambda: Complex64, anchor: i64) -> Result<Complex64> {
    let reach = anchor.abs().max((lambda.re.abs() / PI).round() as i64);
    ZsCurve::zs(phi, default_n_spec(reach), TransferConfig::default())?.canonical_root(lambda, anchor)
}

/// `F(lambda, phi)` by the local formula near gap `near_gap`.
pub fn f_value(phi: &Potential, lambda: Complex64, near_gap: i64) -> Result<Complex64> {
    ZsCurve::zs(phi, default_n_spec(near_gap), TransferConfig::default())?.f_value(lambda, near_gap)
}

/// `F_mKdV(mu, u)` by the local formula near gap `near_gap`.
pub fn f_mkdv_value(u: &GridFunction, mu: Complex64, near_gap: i64) -> Result<Complex64> {
    HillCurve::hill(u, default_n_spec(near_gap), TransferConfig::default())?.f_value(mu, near_gap)
}

/// `I_{n,k}(phi)`.
pub fn action_i(phi: &Potential, n: i64, k: i64) -> Result<ActionRecord> {
    ZsCurve::zs(phi, default_n_spec(n), TransferConfig::default())?.action(n, k)
}

/// `J_{n,k}(u)`, `n >= 1`.
pub fn action_j(u: &GridFunction, n: i64, k: i64) -> Result<ActionRecord> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!(
            "mKdV actions are defined for n >= 1, got {n}"
        )));
    }
    HillCurve::hill(u, default_n_spec(n), TransferConfig::default())?.action(n, k)
}

/// `|Delta_mKdV(0, u) - 2 cosh(mean u)|`.
pub fn mean_identity_residual(u: &GridFunction) -> Result<f64> {
    let sys = HillSystem::from_miura(u, TransferConfig::default());
    let d = delta(&sys, Complex64::new(0.0, 0.0))?;
    Ok((d.value - 2.0 * u.mean().cosh()).norm())
}

/// Least-squares estimates of `S_1..S_max_n` from `F` at large real samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub estimates: Vec<Complex64>,
    /// Condition number of the column-scaled design matrix.
    pub condition: f64,
    /// Largest absolute residual of the fit at the samples.
    pub residual: f64,
}

/// Condition numbers above this make the fit fail.
pub const MAX_CONDITION: f64 = 1e12;

/// Default sample points `+-(m + 1/2) pi`, `m = 6..=20`, all mid-band.
pub fn default_asymptotic_samples() -> Vec<f64> {
    (6..=20)
        .flat_map(|m| {
            let a = (m as f64 + 0.5) * PI;
            [a, -a]
        })
        .collect()
}

/// Fits `F(lambda) + i lambda = i sum_{n=1}^{K} S_n / (2 lambda)^n` at the real
/// `samples`, with `K = max_n + extra` to absorb the truncated tail, and
/// returns the first `max_n` coefficients.
///
/// Samples must lie in bands beyond every open gap of significant size. The
/// band sign there is `(-1)^m` for the band between gaps `m` and `m + 1`.
pub fn asymptotic_hamiltonians(
    phi: &Potential,
    max_n: usize,
    samples: &[f64],
    config: TransferConfig,
) -> Result<AsymptoticFit> {
    let extra = 3;
    let terms = max_n + extra;
    if samples.len() < terms {
        return Err(Error::InvalidArgument(format!(
            "{} samples cannot determine {terms} coefficients",
            samples.len()
        )));
    }
    let sys = ZsSystem::with_config(phi, config);
    let values: Vec<Complex64> = samples
        .iter()
        .map(|&lam| {
            let z = Complex64::new(lam, 0.0);
            let (m, _) = sys.monodromy(z, false)?;
            let d = m.trace();
            if d.re.abs() >= 2.0 {
                return Err(Error::OnGap(z));
            }
            let band = (lam / PI).floor() as i64;
            let sign = if band.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let w = oriented((d * d - 4.0).sqrt(), sign);
            Ok((local_f(d, w, band) + I * lam) / I)
        })
        .collect::<Result<_>>()?;
    let scale = 2.0 * samples.iter().fold(f64::INFINITY, |a, &b| a.min(b.abs()));
    let a = DMatrix::from_fn(samples.len(), terms, |i, j| {
        Complex64::new((scale / (2.0 * samples[i])).powi(j as i32 + 1), 0.0)
    });
    let b = DVector::from_vec(values);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin;
    if !(condition < MAX_CONDITION) {
        return Err(Error::IllConditioned(condition));
    }
    let x = svd
        .solve(&b, smax * 1e-15)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let residual = (&a * &x - &b).iter().map(|r| r.norm()).fold(0.0, f64::max);
    let estimates = (0..max_n)
        .map(|j| x[j] * scale.powi(j as i32 + 1))
        .collect();
    Ok(AsymptoticFit {
        estimates,
        condition,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Transform;
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

    fn cfg() -> TransferConfig {
        TransferConfig::default()
    }

    #[test]
    fn band_signs_alternate() {
        let curve = ZsCurve::zs(&Potential::diagonal(&real_u()), 4, cfg()).unwrap();
        for (&n, &s) in curve.band_signs() {
            assert_eq!(s, if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 }, "band {n}");
        }
        assert_eq!(curve.band_signs().len(), 8);
        let hill = HillCurve::hill(&real_u(), 4, cfg()).unwrap();
        for (&n, &s) in hill.band_signs() {
            assert_eq!(s, if n % 2 == 0 { 1.0 } else { -1.0 }, "hill band {n}");
        }
    }

    #[test]
    fn free_root_and_f() {
        let curve = ZsCurve::zs(&Potential::zero(64), 4, cfg()).unwrap();
        for &z in &[c(1.0, 0.0), c(0.4, 0.9), c(-2.0, -1.5), c(7.0, 0.3)] {
            let w = curve.canonical_root(z, 0).unwrap();
            assert!((w + 2.0 * I * z.sin()).norm() < 1e-9, "root at {z}");
            let near = (z.re / PI).round() as i64;
            let f = curve.f_value(z, near).unwrap();
            assert!((f + I * z).norm() < 1e-9, "F at {z}: {f}");
        }
    }

    #[test]
    fn f_vanishes_at_first_gap_edges() {
        let curve = ZsCurve::zs(&Potential::diagonal(&real_u()), 3, cfg()).unwrap();
        let e = curve.table().entry(0).unwrap();
        for z in [e.lam_minus, e.lam_plus] {
            assert!(curve.f_value(c(z, 0.0), 0).unwrap().norm() < 1e-7);
        }
    }

    #[test]
    fn free_mkdv_f() {
        let curve = HillCurve::hill(&GridFunction::zeros(64), 4, cfg()).unwrap();
        for &mu in &[c(4.0, 0.0), c(12.0, 3.0), c(30.0, -5.0)] {
            let near = (mu.sqrt().re / PI).round() as i64;
            let f = curve.f_value(mu, near).unwrap();
            assert!((f + I * mu.sqrt()).norm() < 1e-8, "F_mKdV at {mu}: {f}");
        }
    }

    #[test]
    fn hill_root_matches_zs_root() {
        let u = real_u();
        let zs = ZsCurve::zs(&Potential::diagonal(&u), 4, cfg()).unwrap();
        let hill = HillCurve::hill(&u, 4, cfg()).unwrap();
        for &z in &[c(1.7, 0.2), c(4.5, -0.6), c(2.0, 1.0)] {
            let a = zs.canonical_root(z, 1).unwrap();
            let b = hill.canonical_root(z * z, 1).unwrap();
            assert!((a - b).norm() < 1e-7, "{z}: {a} vs {b}");
            let fa = zs.f_value(z, (z.re / PI).round() as i64).unwrap();
            let fb = hill.f_value(z * z, (z.re / PI).round() as i64).unwrap();
            assert!((fa - fb).norm() < 1e-7, "{z}: {fa} vs {fb}");
        }
    }

    #[test]
    fn root_and_f_symmetries() {
        let v = trig(&[(1, c(0.3, 0.1)), (-2, c(0.0, 0.2)), (0, c(0.1, -0.1))]);
        let phi = Potential::hermitian(&v);
        let a = ZsCurve::zs(&phi, 3, cfg()).unwrap();
        let p = ZsCurve::zs(&phi.transform(Transform::P), 3, cfg()).unwrap();
        let r = ZsCurve::zs(&phi.transform(Transform::R(1.1)), 3, cfg()).unwrap();
        for &z in &[c(1.6, 0.4), c(-0.8, -0.3)] {
            let n = (z.re / PI).round() as i64;
            let wa = a.canonical_root(z, n).unwrap();
            let wp = p.canonical_root(-z, -n).unwrap();
            assert!((wa + wp).norm() < 1e-8);
            let fa = a.f_value(z, n).unwrap();
            assert!((fa + p.f_value(-z, -n).unwrap()).norm() < 1e-7);
            assert!((fa - r.f_value(z, n).unwrap()).norm() < 1e-7);
        }
    }

    #[test]
    fn actions_of_zero_potential_vanish() {
        let curve = ZsCurve::zs(&Potential::zero(64), 3, cfg()).unwrap();
        for n in -2..=2 {
            for k in 0..=3 {
                assert!(curve.action(n, k).unwrap().value.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn actions_are_real_nonnegative_and_converged() {
        let v = trig(&[(1, c(0.3, 0.1)), (-2, c(0.0, 0.2)), (0, c(0.1, -0.1))]);
        let curve = ZsCurve::zs(&Potential::hermitian(&v), 3, cfg()).unwrap();
        for n in -2..=2 {
            let rec = curve.action(n, 1).unwrap();
            assert!(rec.value.im.abs() < 1e-8, "{rec:?}");
            assert!(rec.value.re >= -1e-9, "{rec:?}");
            assert!(rec.quad_error < 1e-9, "{rec:?}");
        }
    }

    #[test]
    fn contour_independence() {
        let curve = ZsCurve::zs(&Potential::diagonal(&real_u()), 3, cfg()).unwrap();
        let base = curve.contour(1).unwrap();
        let disc = curve.table().disc(1).unwrap();
        let other = Contour::new(base.center, disc.contour_radius(0.4), base.n_points);
        let a = curve.action_on(&base, 1, 1).unwrap().value;
        let b = curve.action_on(&other, 1, 1).unwrap().value;
        assert!((a - b).norm() < 1e-8);
    }

    #[test]
    fn local_formula_matches_path_integral() {
        let curve = ZsCurve::zs(&Potential::diagonal(&real_u()), 3, cfg()).unwrap();
        for angle in [0.7, 2.0, -1.2] {
            assert!(curve.f_path_check(1, angle).unwrap() < 1e-9);
        }
    }

    #[test]
    fn mkdv_and_nls_actions_correspond() {
        let u = real_u();
        let zs = ZsCurve::zs(&Potential::diagonal(&u), 3, cfg()).unwrap();
        let hill = HillCurve::hill(&u, 3, cfg()).unwrap();
        for n in 1..=2 {
            for k in 0..=2 {
                let j = hill.action(n, k).unwrap().value;
                let i = zs.action(n, 2 * k - 2).unwrap().value;
                assert!((2.0 * j - i).norm() < 1e-6, "n {n} k {k}: {j} vs {i}");
            }
        }
    }

    #[test]
    fn mean_identity() {
        assert!(mean_identity_residual(&GridFunction::zeros(64)).unwrap() < 1e-10);
        assert!(mean_identity_residual(&GridFunction::constant(64, c(0.7, 0.0))).unwrap() < 1e-9);
        assert!(mean_identity_residual(&real_u()).unwrap() < 1e-8);
    }

    #[test]
    fn asymptotic_fit_recovers_closed_form_hamiltonians() {
        use crate::hierarchy::s_value;
        let u = GridFunction::from_fn(64, |x| {
            c(0.3 * (2.0 * PI * x).cos() + 0.1 * (4.0 * PI * x).sin(), 0.0)
        });
        let v = trig(&[(1, c(0.2, 0.1)), (-2, c(0.1, 0.0))]);
        let cfg = TransferConfig { oversample: 16 };
        let samples = default_asymptotic_samples();
        let diag = Potential::diagonal(&u);
        let fit = asymptotic_hamiltonians(&diag, 6, &samples, cfg).unwrap();
        let s1 = s_value(1, &diag).unwrap();
        assert!((fit.estimates[0] - s1).norm() < 1e-3 * s1.norm());
        assert!(fit.estimates[1].norm() < 1e-6);
        assert!(fit.estimates[3].norm() < 1e-6);
        let herm = Potential::hermitian(&v);
        let fit = asymptotic_hamiltonians(&herm, 6, &samples, cfg).unwrap();
        for k in 1..=3 {
            let exact = s_value(k, &herm).unwrap();
            assert!((fit.estimates[k as usize - 1] - exact).norm() < 1e-4 * exact.norm(), "S{k}");
        }
    }

    #[test]
    fn asymptotic_fit_of_free_potential() {
        let fit = asymptotic_hamiltonians(
            &Potential::zero(64),
            4,
            &default_asymptotic_samples(),
            TransferConfig { oversample: 32 },
        )
        .unwrap();
        for s in fit.estimates {
            assert!(s.norm() < 1e-6);
        }
    }
}
