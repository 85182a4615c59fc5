//! Complex-valued 1-periodic functions sampled on a uniform grid.
//!
//! A [`GridFunction`] with `n_modes = N` stores the `2N` samples
//! `f(x_j)`, `x_j = j / 2N`, and represents the trigonometric polynomial
//!
//! ```text
//! f(x) = sum_{k=-N}^{N-1} c_k exp(2 pi i k x)
//! ```
//!
//! The Nyquist coefficient `c_{-N}` is interpreted symmetrically, as
//! `c_{-N} cos(2 pi N x)`, so real samples always interpolate to a real
//! function. Products are formed alias-free: factors are zero-padded to a grid
//! large enough that the truncated product is exact.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub const DEFAULT_N_MODES: usize = 64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// Normalised forward transform: returns `c_k` in FFT order.
pub(crate) fn forward(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    plan(n, false).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Inverse of [`forward`]: synthesises samples from coefficients in FFT order.
pub(crate) fn inverse(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    plan(buf.len(), true).process(&mut buf);
    buf
}

/// Signed wavenumber of FFT slot `i` on a grid of `len` points.
#[inline]
pub(crate) fn wavenumber(i: usize, len: usize) -> i64 {
    if i < len / 2 {
        i as i64
    } else {
        i as i64 - len as i64
    }
}

/// Zero-pads `2N` coefficients (FFT order) to `len >= 2N + 1` slots, splitting
/// the Nyquist coefficient evenly between `-N` and `+N`.
pub(crate) fn pad(coeffs: &[Complex64], len: usize) -> Vec<Complex64> {
    let m = coeffs.len();
    let n = m / 2;
    debug_assert!(len > m);
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for k in 0..n {
        out[k] = coeffs[k];
    }
    for k in 1..n {
        out[len - k] = coeffs[m - k];
    }
    let nyq = coeffs[n] * 0.5;
    out[n] = nyq;
    out[len - n] = nyq;
    out
}

/// Truncates a padded spectrum back to `2N` slots; modes `+N` and `-N` fold
/// onto the Nyquist slot exactly as sampling would.
pub(crate) fn truncate(coeffs: &[Complex64], n_modes: usize) -> Vec<Complex64> {
    let len = coeffs.len();
    let m = 2 * n_modes;
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n_modes {
        out[k] = coeffs[k];
    }
    for k in 1..n_modes {
        out[m - k] = coeffs[len - k];
    }
    out[n_modes] = coeffs[n_modes] + coeffs[len - n_modes];
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    n_modes: usize,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(n_modes: usize, values: Vec<Complex64>) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument("n_modes must be positive".into()));
        }
        if values.len() != 2 * n_modes {
            return Err(Error::GridMismatch {
                expected: 2 * n_modes,
                got: values.len(),
            });
        }
        Ok(Self { n_modes, values })
    }

    pub fn zeros(n_modes: usize) -> Self {
        Self::constant(n_modes, Complex64::new(0.0, 0.0))
    }

    pub fn constant(n_modes: usize, c: Complex64) -> Self {
        Self {
            n_modes,
            values: vec![c; 2 * n_modes],
        }
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(n_modes: usize, f: impl Fn(f64) -> Complex64) -> Self {
        let len = 2 * n_modes;
        let values = (0..len).map(|j| f(j as f64 / len as f64)).collect();
        Self { n_modes, values }
    }

    /// Samples of `sum_k c_k exp(2 pi i k x)`; harmonics must satisfy `|k| < n_modes`.
    pub fn trig(coeffs: &BTreeMap<i64, Complex64>, n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument("n_modes must be positive".into()));
        }
        let len = 2 * n_modes;
        let mut spec = vec![Complex64::new(0.0, 0.0); len];
        for (&k, &c) in coeffs {
            if k.unsigned_abs() >= n_modes as u64 {
                return Err(Error::HarmonicOutOfRange {
                    harmonic: k,
                    n_modes,
                });
            }
            let slot = if k >= 0 { k as usize } else { (len as i64 + k) as usize };
            spec[slot] += c;
        }
        Ok(Self {
            n_modes,
            values: inverse(&spec),
        })
    }

    /// Builds a function from coefficients listed for `k = -N..N-1`.
    pub fn from_coefficients(n_modes: usize, coeffs: &[Complex64]) -> Result<Self> {
        let len = 2 * n_modes;
        if coeffs.len() != len {
            return Err(Error::GridMismatch {
                expected: len,
                got: coeffs.len(),
            });
        }
        let mut spec = vec![Complex64::new(0.0, 0.0); len];
        for (i, &c) in coeffs.iter().enumerate() {
            let k = i as i64 - n_modes as i64;
            let slot = if k >= 0 { k as usize } else { (len as i64 + k) as usize };
            spec[slot] = c;
        }
        Ok(Self {
            n_modes,
            values: inverse(&spec),
        })
    }

    pub(crate) fn from_spectrum(n_modes: usize, spec: &[Complex64]) -> Self {
        debug_assert_eq!(spec.len(), 2 * n_modes);
        Self {
            n_modes,
            values: inverse(spec),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn grid_point(&self, j: usize) -> f64 {
        j as f64 / self.values.len() as f64
    }

    /// Coefficients in FFT order (`k = 0, 1, .., N-1, -N, .., -1`).
    pub fn spectrum(&self) -> Vec<Complex64> {
        forward(&self.values)
    }

    /// Coefficients for `k = -N..N-1`.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let spec = self.spectrum();
        let len = spec.len();
        (0..len)
            .map(|i| {
                let k = i as i64 - self.n_modes as i64;
                spec[if k >= 0 { k as usize } else { (len as i64 + k) as usize }]
            })
            .collect()
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        let len = self.values.len() as i64;
        if k < -(self.n_modes as i64) || k >= self.n_modes as i64 {
            return Complex64::new(0.0, 0.0);
        }
        self.spectrum()[k.rem_euclid(len) as usize]
    }

    /// Mean value, i.e. the zeroth Fourier coefficient.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// Spectral derivative of the given order (multiplier `(2 pi i k)^order`).
    pub fn derivative(&self, order: u32) -> GridFunction {
        if order == 0 {
            return self.clone();
        }
        let mut spec = self.spectrum();
        let len = spec.len();
        for (i, c) in spec.iter_mut().enumerate() {
            let k = wavenumber(i, len);
            if i == self.n_modes && order % 2 == 1 {
                *c = Complex64::new(0.0, 0.0);
                continue;
            }
            *c *= Complex64::new(0.0, 2.0 * PI * k as f64).powu(order);
        }
        Self::from_spectrum(self.n_modes, &spec)
    }

    /// Samples of `x -> int_0^x f(y) dy` at the grid points.
    ///
    /// The mean contributes the linear part `mean * x`; the remainder is
    /// integrated in Fourier space, so the result is generally not periodic.
    pub fn integral_from_zero(&self) -> Vec<Complex64> {
        let mut spec = self.spectrum();
        let len = spec.len();
        let mean = spec[0];
        spec[0] = Complex64::new(0.0, 0.0);
        spec[self.n_modes] = Complex64::new(0.0, 0.0);
        for (i, c) in spec.iter_mut().enumerate().skip(1) {
            if i == self.n_modes {
                continue;
            }
            *c /= Complex64::new(0.0, 2.0 * PI * wavenumber(i, len) as f64);
        }
        let periodic = inverse(&spec);
        let offset = periodic[0];
        periodic
            .iter()
            .enumerate()
            .map(|(j, p)| mean * (j as f64 / len as f64) + p - offset)
            .collect()
    }

    /// Alias-free product, truncated back to this grid.
    pub fn mul(&self, other: &GridFunction) -> GridFunction {
        Self::product(&[self, other])
    }

    /// Alias-free product of several factors sharing one grid.
    ///
    /// With `p` factors the spectra are padded to `(p + 1) N` points, which
    /// leaves every retained mode `|k| < N` free of aliasing.
    pub fn product(factors: &[&GridFunction]) -> GridFunction {
        assert!(!factors.is_empty(), "product of zero factors");
        let n = factors[0].n_modes;
        assert!(
            factors.iter().all(|f| f.n_modes == n),
            "product factors on different grids"
        );
        if factors.len() == 1 {
            return factors[0].clone();
        }
        let fine = (factors.len() + 1) * n;
        let mut acc = vec![Complex64::new(1.0, 0.0); fine];
        for f in factors {
            let vals = inverse(&pad(&f.spectrum(), fine));
            acc.iter_mut().zip(vals).for_each(|(a, v)| *a *= v);
        }
        let spec = truncate(&forward(&acc), n);
        Self::from_spectrum(n, &spec)
    }

    /// `int_T prod(factors) dx`, exact for trigonometric polynomials.
    pub fn integral_of_product(factors: &[&GridFunction]) -> Complex64 {
        let n = factors[0].n_modes;
        if factors.len() == 1 {
            return factors[0].mean();
        }
        let fine = (factors.len() + 1) * n;
        let mut acc = vec![Complex64::new(1.0, 0.0); fine];
        for f in factors {
            let vals = inverse(&pad(&f.spectrum(), fine));
            acc.iter_mut().zip(vals).for_each(|(a, v)| *a *= v);
        }
        acc.iter().sum::<Complex64>() / fine as f64
    }

    /// Plain sample-by-sample product (for smooth, non band-limited factors).
    pub fn mul_pointwise(&self, other: &GridFunction) -> GridFunction {
        assert_eq!(self.n_modes, other.n_modes, "grid mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Self {
            n_modes: self.n_modes,
            values,
        }
    }

    /// Trigonometric interpolation at an arbitrary point.
    pub fn eval(&self, x: f64) -> Complex64 {
        let spec = self.spectrum();
        eval_spectrum(&spec, self.n_modes, x)
    }

    /// Values on a uniform grid of `len` points via spectral zero-padding.
    pub fn resample(&self, len: usize) -> Vec<Complex64> {
        assert!(len >= self.values.len());
        if len == self.values.len() {
            return self.values.clone();
        }
        inverse(&pad(&self.spectrum(), len))
    }

    /// Values at `(j + shift) / len`, `j = 0..len`, for a fractional `shift`.
    pub fn resample_shifted(&self, len: usize, shift: f64) -> Vec<Complex64> {
        assert!(len >= self.values.len());
        if len == self.values.len() {
            // Padding needs headroom for the split Nyquist mode.
            return self
                .resample_shifted(2 * len, 2.0 * shift)
                .into_iter()
                .step_by(2)
                .collect();
        }
        let mut spec = pad(&self.spectrum(), len);
        for (i, c) in spec.iter_mut().enumerate() {
            let k = wavenumber(i, len) as f64;
            *c *= Complex64::from_polar(1.0, 2.0 * PI * k * shift / len as f64);
        }
        inverse(&spec)
    }

    /// `x -> f(1 - x)`; an exact index permutation on the grid.
    pub fn reflect(&self) -> GridFunction {
        let len = self.values.len();
        let values = (0..len).map(|j| self.values[(len - j) % len]).collect();
        Self {
            n_modes: self.n_modes,
            values,
        }
    }

    pub fn conj(&self) -> GridFunction {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridFunction {
        Self {
            n_modes: self.n_modes,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(
        &self,
        other: &GridFunction,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> GridFunction {
        assert_eq!(self.n_modes, other.n_modes, "grid mismatch");
        Self {
            n_modes: self.n_modes,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Maximum modulus over the grid.
    pub fn norm_max(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete L2 norm (root mean square of the samples).
    pub fn norm_l2(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64).sqrt()
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.n_modes, other.n_modes, "grid mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    pub fn is_imaginary(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.re.abs() <= tol)
    }

    /// Largest coefficient modulus among modes with `|k| > cutoff`.
    pub fn tail(&self, cutoff: usize) -> f64 {
        let spec = self.spectrum();
        let len = spec.len();
        spec.iter()
            .enumerate()
            .filter(|(i, _)| wavenumber(*i, len).unsigned_abs() as usize > cutoff)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Evaluates the interpolant of a spectrum (FFT order) at `x`.
pub(crate) fn eval_spectrum(spec: &[Complex64], n_modes: usize, x: f64) -> Complex64 {
    let len = spec.len();
    let mut acc = spec[0];
    let step = Complex64::from_polar(1.0, 2.0 * PI * x);
    let mut e = step;
    for k in 1..n_modes {
        acc += spec[k] * e + spec[len - k] * e.conj();
        e *= step;
    }
    acc + spec[n_modes] * (2.0 * PI * n_modes as f64 * x).cos()
}

impl Add for &GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &GridFunction {
    type Output = GridFunction;
    fn neg(self) -> GridFunction {
        self.map(|v| -v)
    }
}

impl Mul<Complex64> for &GridFunction {
    type Output = GridFunction;
    fn mul(self, c: Complex64) -> GridFunction {
        self.scale(c)
    }
}

impl Mul<f64> for &GridFunction {
    type Output = GridFunction;
    fn mul(self, c: f64) -> GridFunction {
        self.map(|v| v * c)
    }
}
