//! Seeded test potentials: random real trigonometric polynomials and the
//! Hermitian, reflection-symmetric and small-amplitude families used by the
//! verification suite.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::GridFunction;
use crate::potential::Potential;

pub const DEFAULT_SEED: u64 = 20_240_617;
pub const DEFAULT_COUNT: usize = 20;
pub const MAX_DEGREE: i64 = 3;

fn real_trig(rng: &mut ChaCha8Rng, degree: i64, sup: f64, n_modes: usize) -> GridFunction {
    let mut coeffs = BTreeMap::new();
    coeffs.insert(0, Complex64::new(rng.gen_range(-0.5..0.5), 0.0));
    for k in 1..=degree {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        coeffs.insert(k, c);
        coeffs.insert(-k, c.conj());
    }
    let u = GridFunction::trig(&coeffs, n_modes).expect("degree below the grid size");
    // Sample finely for the sup norm so the bound holds between grid points too.
    let peak = u.resample(8 * u.len()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    u.scale(Complex64::new(sup / peak, 0.0)).map(|z| Complex64::new(z.re, 0.0))
}

/// `count` real trigonometric polynomials of degree `1..=MAX_DEGREE` with
/// sup norm drawn from `[0.2, 1]`.
pub fn real_corpus(seed: u64, count: usize, n_modes: usize) -> Vec<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let degree = rng.gen_range(1..=MAX_DEGREE);
            let sup = rng.gen_range(0.2..=1.0);
            real_trig(&mut rng, degree, sup, n_modes)
        })
        .collect()
}

/// The default real corpus on the default grid.
pub fn default_corpus() -> Vec<GridFunction> {
    real_corpus(DEFAULT_SEED, DEFAULT_COUNT, crate::grid::DEFAULT_N_MODES)
}

/// Hermitian potentials `(v, conj v)` with complex `v` of degree `<= 2` and
/// sup norm at most `0.8`.
pub fn hermitian_corpus(seed: u64, count: usize, n_modes: usize) -> Vec<Potential> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    (0..count)
        .map(|_| {
            let mut coeffs = BTreeMap::new();
            for k in -2..=2 {
                coeffs.insert(k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
            let v = GridFunction::trig(&coeffs, n_modes).expect("degree below the grid size");
            let peak = v.resample(8 * v.len()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            let sup = rng.gen_range(0.2..=0.8);
            Potential::hermitian(&v.scale(Complex64::new(sup / peak, 0.0)))
        })
        .collect()
}

/// Potentials with `phi(1 - x) = phi(x)`: cosine series with complex
/// coefficients in each component, not diagonal in general.
pub fn reflection_symmetric_corpus(seed: u64, count: usize, n_modes: usize) -> Vec<Potential> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5bd1_e995);
    let cosine_series = |rng: &mut ChaCha8Rng| {
        let mut coeffs = BTreeMap::new();
        for k in 0..=MAX_DEGREE {
            let c = Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
            coeffs.insert(k, c);
            coeffs.insert(-k, c);
        }
        GridFunction::trig(&coeffs, n_modes).expect("degree below the grid size")
    };
    (0..count)
        .map(|_| {
            let a = cosine_series(&mut rng);
            let b = cosine_series(&mut rng);
            Potential::new(a, b).expect("same grid")
        })
        .collect()
}

/// `u = amplitude (cos 2 pi x + sin 4 pi x / 2)`: a small, smooth, zero-mean
/// potential whose gaps decay quickly.
pub fn small_amplitude(amplitude: f64, n_modes: usize) -> GridFunction {
    use std::f64::consts::PI;
    GridFunction::from_fn(n_modes, |x| {
        Complex64::new(amplitude * ((2.0 * PI * x).cos() + 0.5 * (4.0 * PI * x).sin()), 0.0)
    })
}

/// Random directions for finite-difference checks, normalised to sup norm 1.
pub fn directions(seed: u64, count: usize, n_modes: usize) -> Vec<Potential> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2545_f491);
    let component = |rng: &mut ChaCha8Rng| {
        let mut coeffs = BTreeMap::new();
        for k in -MAX_DEGREE..=MAX_DEGREE {
            coeffs.insert(k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
        let f = GridFunction::trig(&coeffs, n_modes).expect("degree below the grid size");
        let n = f.norm_max();
        f.scale(Complex64::new(1.0 / n, 0.0))
    };
    (0..count)
        .map(|_| {
            let a = component(&mut rng);
            let b = component(&mut rng);
            Potential::new(a, b).expect("same grid")
        })
        .collect()
}
