//! Periodic spectra of real-type ZS potentials and of Hill operators with a
//! real Miura potential.
//!
//! Eigenvalues come in clusters: `lambda_n^-, lambda_n^+` near `n pi` for ZS
//! and `mu_n^-, mu_n^+` near `n^2 pi^2` for Hill (plus the single ground
//! state `mu_0^+`). In each cluster the relevant function `s Delta - 2`, with
//! `s = (-1)^n`, is negative at the window edges and reaches its maximum at a
//! critical point of `Delta`. The maximum is located first; if it is 2 (to
//! `|Delta^2 - 4| < 1e-10`) the eigenvalue is double, otherwise the two
//! simple roots on either side are found by safeguarded Newton iteration.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discriminant::delta;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::potential::{Potential, CLASS_TOL};
use crate::roots::{illinois, safeguarded_newton};
use crate::transfer::{HillSystem, LinearSystem, OperatorKind, TransferConfig, ZsSystem};

/// Distance kept between a search window and the midpoint between clusters.
pub const WINDOW_MARGIN: f64 = 1e-3;
/// Points of the derivative scan that brackets the critical point.
pub const SCAN_POINTS: usize = 64;
/// A cluster whose peak satisfies `|Delta^2 - 4|` below this is a double root.
pub const DOUBLE_ROOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub n: i64,
    pub lam_minus: f64,
    pub lam_plus: f64,
    pub gap: f64,
    /// Set when the cluster was detected as a double eigenvalue.
    pub double: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub n: i64,
    pub center: f64,
    pub radius: f64,
    /// Half the gap length; the disc radius exceeds it by the free margin.
    pub half_gap: f64,
}

impl Disc {
    /// A circle strictly between the gap and the disc boundary.
    pub fn contour_radius(&self, fraction: f64) -> f64 {
        self.half_gap + fraction * (self.radius - self.half_gap)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub kind: OperatorKind,
    /// Hill only: the bottom eigenvalue `mu_0^+`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_state: Option<f64>,
    pub entries: Vec<SpectrumEntry>,
    pub discs: Vec<Disc>,
}

impl SpectrumTable {
    pub fn entry(&self, n: i64) -> Option<&SpectrumEntry> {
        self.entries.iter().find(|e| e.n == n)
    }

    pub fn disc(&self, n: i64) -> Option<&Disc> {
        self.discs.iter().find(|d| d.n == n)
    }

    pub fn n_range(&self) -> (i64, i64) {
        let first = self.entries.first().map_or(0, |e| e.n);
        let last = self.entries.last().map_or(0, |e| e.n);
        (first, last)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }
}

fn eval_real<S: LinearSystem>(sys: &S, t: f64, sign: f64) -> Result<(f64, f64)> {
    let d = delta(sys, Complex64::new(t, 0.0))?;
    Ok((sign * d.value.re, sign * d.dvalue.re))
}

/// Solves one cluster of roots of `sign * Delta = 2` inside `[lo, hi]`.
fn solve_cluster<S: LinearSystem>(sys: &S, n: i64, sign: f64, lo: f64, hi: f64) -> Result<SpectrumEntry> {
    let fail = |reason: &str| Error::Bracketing {
        n,
        lo,
        hi,
        reason: reason.to_string(),
    };
    let ts: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let scan: Vec<(f64, f64)> = ts
        .iter()
        .map(|&t| eval_real(sys, t, sign))
        .collect::<Result<_>>()?;
    if scan[0].0 >= 2.0 || scan[SCAN_POINTS - 1].0 >= 2.0 {
        return Err(fail("window edge lies inside a gap"));
    }
    // The critical point is a + to - sign change of the derivative; among
    // several, keep the one with the highest discriminant.
    let best = (0..SCAN_POINTS - 1)
        .filter(|&i| scan[i].1 > 0.0 && scan[i + 1].1 <= 0.0)
        .max_by(|&a, &b| {
            let va = scan[a].0.max(scan[a + 1].0);
            let vb = scan[b].0.max(scan[b + 1].0);
            va.total_cmp(&vb)
        })
        .ok_or_else(|| fail("no critical point of the discriminant in the window"))?;
    let peak = if scan[best + 1].1 == 0.0 {
        ts[best + 1]
    } else {
        illinois(|t| eval_real(sys, t, sign).map(|v| v.1), ts[best], ts[best + 1])?
    };
    let (top, _) = eval_real(sys, peak, sign)?;
    if (top * top - 4.0).abs() < DOUBLE_ROOT_TOL {
        return Ok(SpectrumEntry {
            n,
            lam_minus: peak,
            lam_plus: peak,
            gap: 0.0,
            double: true,
        });
    }
    if top < 2.0 {
        return Err(fail(
            "discriminant does not reach +-2 (eigenvalues are not real for this potential)",
        ));
    }
    let f = |t| eval_real(sys, t, sign).map(|(v, d)| (v - 2.0, d));
    let left = safeguarded_newton(f, lo, peak)?;
    let right = safeguarded_newton(f, peak, hi)?;
    Ok(SpectrumEntry {
        n,
        lam_minus: left,
        lam_plus: right,
        gap: (right - left).max(0.0),
        double: false,
    })
}

fn parity(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Periodic spectrum of the ZS operator for clusters `|n| <= n_spec`.
pub fn zs_spectrum(phi: &Potential, n_spec: usize) -> Result<SpectrumTable> {
    zs_spectrum_with(phi, n_spec, TransferConfig::default())
}

pub fn zs_spectrum_with(phi: &Potential, n_spec: usize, config: TransferConfig) -> Result<SpectrumTable> {
    if !phi.class_tag().is_real_type() {
        return Err(Error::PotentialClass {
            found: phi.class_tag().name(),
            required: "H_r or E_r (real spectrum)",
        });
    }
    let sys = ZsSystem::with_config(phi, config);
    let n_spec = n_spec as i64;
    let entries = (-n_spec..=n_spec)
        .into_par_iter()
        .map(|n| {
            let c = n as f64 * PI;
            let half = PI / 2.0 - WINDOW_MARGIN;
            solve_cluster(&sys, n, parity(n), c - half, c + half)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = SpectrumTable {
        kind: OperatorKind::Zs,
        ground_state: None,
        entries,
        discs: Vec::new(),
    };
    table.discs = isolating_discs(&table)?;
    Ok(table)
}

/// Periodic spectrum of the Hill operator `-d^2 + u_x + u^2` on the doubled
/// period: the ground state and clusters `1 <= n <= n_spec`.
pub fn hill_spectrum(u: &GridFunction, n_spec: usize) -> Result<SpectrumTable> {
    hill_spectrum_with(u, n_spec, TransferConfig::default())
}

pub fn hill_spectrum_with(u: &GridFunction, n_spec: usize, config: TransferConfig) -> Result<SpectrumTable> {
    if !u.is_real(CLASS_TOL) {
        return Err(Error::PotentialClass {
            found: "complex",
            required: "real u",
        });
    }
    let sys = HillSystem::from_miura(u, config);
    let ground = hill_ground_state(&sys)?;
    let entries = (1..=n_spec as i64)
        .into_par_iter()
        .map(|n| {
            let half = PI / 2.0 - WINDOW_MARGIN;
            let lo = (n as f64 * PI - half).powi(2);
            let hi = (n as f64 * PI + half).powi(2);
            solve_cluster(&sys, n, parity(n), lo, hi)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = SpectrumTable {
        kind: OperatorKind::Hill,
        ground_state: Some(ground),
        entries,
        discs: Vec::new(),
    };
    table.discs = isolating_discs(&table)?;
    Ok(table)
}

/// The single root of `Delta - 2` below the first cluster.
fn hill_ground_state(sys: &HillSystem) -> Result<f64> {
    let hi = (PI / 2.0 - WINDOW_MARGIN).powi(2);
    let mut lo = -1.0;
    let f = |t| eval_real(sys, t, 1.0).map(|(v, d)| (v - 2.0, d));
    while f(lo)?.0 <= 0.0 {
        lo *= 2.0;
        if lo < -1e4 {
            return Err(Error::Bracketing {
                n: 0,
                lo,
                hi,
                reason: "ground state not bracketed".into(),
            });
        }
    }
    if f(hi)?.0 >= 0.0 {
        return Err(Error::Bracketing {
            n: 0,
            lo,
            hi,
            reason: "discriminant exceeds 2 at the first window edge".into(),
        });
    }
    safeguarded_newton(f, lo, hi)
}

/// Pairwise disjoint discs around each gap: centred at the gap midpoint, with
/// radius `gap/2 + min(pi/4, 0.45 d)`, `d` the distance to the nearer
/// neighbouring gap. Neighbours beyond the table are taken at their
/// unperturbed positions.
pub fn isolating_discs(table: &SpectrumTable) -> Result<Vec<Disc>> {
    let model = |n: i64| match table.kind {
        OperatorKind::Zs => n as f64 * PI,
        OperatorKind::Hill => (n as f64 * PI).powi(2),
    };
    let bounds = |n: i64| -> (f64, f64) {
        if let Some(e) = table.entry(n) {
            return (e.lam_minus, e.lam_plus);
        }
        match (table.kind, table.ground_state) {
            (OperatorKind::Hill, Some(g)) if n == 0 => (f64::NEG_INFINITY, g),
            _ => (model(n), model(n)),
        }
    };
    table
        .entries
        .iter()
        .map(|e| {
            let (_, below) = bounds(e.n - 1);
            let (above, _) = bounds(e.n + 1);
            let d_lo = e.lam_minus - below;
            let d_hi = above - e.lam_plus;
            if d_lo <= 0.0 {
                return Err(Error::OverlappingGaps { n: e.n - 1, m: e.n });
            }
            if d_hi <= 0.0 {
                return Err(Error::OverlappingGaps { n: e.n, m: e.n + 1 });
            }
            let half_gap = 0.5 * e.gap;
            Ok(Disc {
                n: e.n,
                center: 0.5 * (e.lam_minus + e.lam_plus),
                radius: half_gap + (PI / 4.0).min(0.45 * d_lo.min(d_hi)),
                half_gap,
            })
        })
        .collect()
}

/// Residuals of the multiplicity rules: the largest `|Delta'|` at a double
/// eigenvalue and the largest `||Delta| - 2|` at a simple one.
pub fn multiplicity_coherence<S: LinearSystem>(sys: &S, table: &SpectrumTable) -> Result<(f64, f64)> {
    let mut at_double: f64 = 0.0;
    let mut at_simple: f64 = 0.0;
    for e in &table.entries {
        if e.double {
            let d = delta(sys, Complex64::new(e.lam_minus, 0.0))?;
            at_double = at_double.max(d.dvalue.norm());
        } else {
            for t in [e.lam_minus, e.lam_plus] {
                let d = delta(sys, Complex64::new(t, 0.0))?;
                at_simple = at_simple.max((d.value.norm() - 2.0).abs());
            }
        }
    }
    Ok((at_double, at_simple))
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

    #[test]
    fn free_spectrum() {
        let t = zs_spectrum(&Potential::zero(64), 4).unwrap();
        assert_eq!(t.entries.len(), 9);
        for e in &t.entries {
            let npi = e.n as f64 * PI;
            assert!((e.lam_minus - npi).abs() < 1e-10 && (e.lam_plus - npi).abs() < 1e-10);
            assert!(e.double && e.gap == 0.0);
        }
        for d in &t.discs {
            assert!((d.center - d.n as f64 * PI).abs() < 1e-10);
            assert!((d.radius - PI / 4.0).abs() < 1e-10);
        }
    }

    #[test]
    fn free_hill_spectrum() {
        let t = hill_spectrum(&GridFunction::zeros(64), 3).unwrap();
        assert!(t.ground_state.unwrap().abs() < 1e-10);
        for e in &t.entries {
            let v = (e.n as f64 * PI).powi(2);
            assert!((e.lam_minus - v).abs() < 1e-8 && (e.lam_plus - v).abs() < 1e-8);
        }
    }

    #[test]
    fn diagonal_spectrum_is_symmetric() {
        let t = zs_spectrum(&Potential::diagonal(&real_u()), 5).unwrap();
        for e in &t.entries {
            let m = t.entry(-e.n).unwrap();
            assert!((m.lam_plus + e.lam_minus).abs() < 1e-8);
            assert!((m.lam_minus + e.lam_plus).abs() < 1e-8);
        }
        assert!(t.entry(1).unwrap().gap > 1e-3);
        for w in t.entries.windows(2) {
            assert!(w[0].lam_plus <= w[1].lam_minus);
        }
    }

    #[test]
    fn hill_spectrum_is_squared_zs() {
        let u = real_u();
        let zs = zs_spectrum(&Potential::diagonal(&u), 4).unwrap();
        let hill = hill_spectrum(&u, 4).unwrap();
        let g = hill.ground_state.unwrap();
        let z0 = zs.entry(0).unwrap();
        assert!((g - z0.lam_plus.powi(2)).abs() < 1e-6);
        assert!((g - z0.lam_minus.powi(2)).abs() < 1e-6);
        for h in &hill.entries {
            let z = zs.entry(h.n).unwrap();
            assert!((h.lam_minus - z.lam_minus.powi(2)).abs() < 1e-6);
            assert!((h.lam_plus - z.lam_plus.powi(2)).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_mean_gives_zero_ground_state() {
        let u = trig(&[(1, c(0.3, 0.1)), (-1, c(0.3, -0.1))]);
        let t = hill_spectrum(&u, 1).unwrap();
        assert!(t.ground_state.unwrap().abs() < 1e-9);
    }

    #[test]
    fn gaps_open_linearly() {
        // phi = eps (cos 2 pi x, cos 2 pi x): to first order only gap 1 opens,
        // with length eps.
        let u = trig(&[(1, c(0.5, 0.0)), (-1, c(0.5, 0.0))]);
        let gap = |eps: f64| {
            zs_spectrum(&Potential::diagonal(&u.scale(c(eps, 0.0))), 1)
                .unwrap()
                .entry(1)
                .unwrap()
                .gap
        };
        let (g2, g3) = (gap(1e-2), gap(1e-3));
        assert!((g2 / 1e-2 - 1.0).abs() < 0.05, "gap {g2}");
        assert!((g3 / 1e-3 - 1.0).abs() < 0.05, "gap {g3}");
        assert!((g2 / g3 - 10.0).abs() < 0.1);
    }

    #[test]
    fn rejects_non_real_potentials() {
        let phi = Potential::new(real_u(), trig(&[(0, c(0.3, 0.0))])).unwrap();
        assert!(matches!(zs_spectrum(&phi, 2), Err(Error::PotentialClass { .. })));
        assert!(hill_spectrum(&real_u().scale(c(0.0, 1.0)), 2).is_err());
    }

    #[test]
    fn transform_covariance() {
        let v = trig(&[(1, c(0.3, 0.1)), (-2, c(0.0, 0.2)), (0, c(0.1, -0.1))]);
        let phi = Potential::hermitian(&v);
        let t = zs_spectrum(&phi, 3).unwrap();
        let p = zs_spectrum(&phi.transform(Transform::P), 3).unwrap();
        let r = zs_spectrum(&phi.transform(Transform::R(0.7)), 3).unwrap();
        for e in &t.entries {
            let q = p.entry(-e.n).unwrap();
            assert!((e.lam_plus + q.lam_minus).abs() < 1e-8);
            assert!((e.lam_minus + q.lam_plus).abs() < 1e-8);
            let s = r.entry(e.n).unwrap();
            assert!((e.lam_plus - s.lam_plus).abs() < 1e-8);
            assert!((e.lam_minus - s.lam_minus).abs() < 1e-8);
        }
    }

    #[test]
    fn coherence_and_discs() {
        let u = trig(&[(0, c(0.2, 0.0)), (2, c(0.15, 0.0)), (-2, c(0.15, 0.0))]);
        let phi = Potential::diagonal(&u);
        let t = zs_spectrum(&phi, 4).unwrap();
        let (d, s) = multiplicity_coherence(&ZsSystem::new(&phi), &t).unwrap();
        assert!(d < 1e-6 && s < 1e-8, "{d} {s}");
        for pair in t.discs.windows(2) {
            assert!(pair[0].center + pair[0].radius < pair[1].center - pair[1].radius);
        }
        for disc in &t.discs {
            let m = t.disc(-disc.n).unwrap();
            assert!((disc.center + m.center).abs() < 1e-8 && (disc.radius - m.radius).abs() < 1e-8);
        }
    }
}
