//! Two-component potentials `(phi_minus, phi_plus)`, their reality classes,
//! the symmetry transforms and the Miura map.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, DEFAULT_N_MODES};

/// Absolute threshold on samples used when detecting reality classes.
pub const CLASS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    Generic,
    /// `phi_plus = conj(phi_minus)`.
    Hr,
    /// `phi_plus = -conj(phi_minus)`.
    Hi,
    /// Diagonal with real entries.
    Er,
    /// Diagonal with imaginary entries.
    Ei,
    /// Diagonal, otherwise unrestricted.
    Diagonal,
}

impl ClassTag {
    pub fn name(self) -> &'static str {
        match self {
            ClassTag::Generic => "generic",
            ClassTag::Hr => "H_r",
            ClassTag::Hi => "H_i",
            ClassTag::Er => "E_r",
            ClassTag::Ei => "E_i",
            ClassTag::Diagonal => "diagonal",
        }
    }

    pub fn is_diagonal(self) -> bool {
        matches!(self, ClassTag::Er | ClassTag::Ei | ClassTag::Diagonal)
    }

    /// Classes whose periodic spectrum lies on the real axis.
    pub fn is_real_type(self) -> bool {
        matches!(self, ClassTag::Hr | ClassTag::Er)
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Symmetry transforms acting on potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// Swap of the two components.
    P,
    /// Phase rotation `(e^{ia} phi_-, e^{-ia} phi_+)`.
    R(f64),
    /// Reflection `x -> 1 - x`.
    T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    minus: GridFunction,
    plus: GridFunction,
    class_tag: ClassTag,
}

impl Potential {
    pub fn new(minus: GridFunction, plus: GridFunction) -> Result<Self> {
        if minus.n_modes() != plus.n_modes() {
            return Err(Error::GridMismatch {
                expected: minus.len(),
                got: plus.len(),
            });
        }
        let class_tag = classify(&minus, &plus);
        Ok(Self {
            minus,
            plus,
            class_tag,
        })
    }

    /// The diagonal embedding `u -> (u, u)`.
    pub fn diagonal(u: &GridFunction) -> Self {
        Self::new(u.clone(), u.clone()).expect("same grid")
    }

    /// The real-type potential `(v, conj v)`.
    pub fn hermitian(v: &GridFunction) -> Self {
        Self::new(v.clone(), v.conj()).expect("same grid")
    }

    pub fn zero(n_modes: usize) -> Self {
        Self::diagonal(&GridFunction::zeros(n_modes))
    }

    pub fn minus(&self) -> &GridFunction {
        &self.minus
    }

    pub fn plus(&self) -> &GridFunction {
        &self.plus
    }

    pub fn class_tag(&self) -> ClassTag {
        self.class_tag
    }

    pub fn n_modes(&self) -> usize {
        self.minus.n_modes()
    }

    pub fn transform(&self, g: Transform) -> Potential {
        match g {
            Transform::P => Self::new(self.plus.clone(), self.minus.clone()),
            Transform::R(alpha) => {
                let e = Complex64::from_polar(1.0, alpha);
                Self::new(self.minus.scale(e), self.plus.scale(e.conj()))
            }
            Transform::T => Self::new(self.minus.reflect(), self.plus.reflect()),
        }
        .expect("same grid")
    }

    pub fn scale(&self, s: Complex64) -> Potential {
        Self::new(self.minus.scale(s), self.plus.scale(s)).expect("same grid")
    }

    pub fn add(&self, other: &Potential) -> Potential {
        Self::new(&self.minus + &other.minus, &self.plus + &other.plus).expect("same grid")
    }

    /// Max-norm distance over both components.
    pub fn distance(&self, other: &Potential) -> f64 {
        self.minus
            .max_abs_diff(&other.minus)
            .max(self.plus.max_abs_diff(&other.plus))
    }

    pub fn norm_max(&self) -> f64 {
        self.minus.norm_max().max(self.plus.norm_max())
    }

    /// Parses the JSON potential format; see [`PotentialFile`].
    pub fn from_json(text: &str) -> Result<Self> {
        let file: PotentialFile = serde_json::from_str(text)?;
        file.build()
    }

    pub fn to_file(&self) -> PotentialFile {
        let n = self.n_modes();
        if self.class_tag.is_diagonal() {
            PotentialFile {
                n_modes: Some(n),
                minus: None,
                plus: None,
                diagonal_of: Some(ComponentSpec::from_grid(&self.minus)),
            }
        } else {
            PotentialFile {
                n_modes: Some(n),
                minus: Some(ComponentSpec::from_grid(&self.minus)),
                plus: Some(ComponentSpec::from_grid(&self.plus)),
                diagonal_of: None,
            }
        }
    }
}

/// Bilinear pairing `int (a_- b_- + a_+ b_+) dx` of two potential-shaped objects.
pub fn pairing(a: &Potential, b: &Potential) -> Complex64 {
    GridFunction::integral_of_product(&[a.minus(), b.minus()])
        + GridFunction::integral_of_product(&[a.plus(), b.plus()])
}

fn classify(minus: &GridFunction, plus: &GridFunction) -> ClassTag {
    let close = |f: &dyn Fn(Complex64, Complex64) -> Complex64| {
        minus
            .values()
            .iter()
            .zip(plus.values())
            .all(|(&m, &p)| f(m, p).norm() <= CLASS_TOL)
    };
    if close(&|m, p| p - m) {
        if minus.is_real(CLASS_TOL) {
            ClassTag::Er
        } else if minus.is_imaginary(CLASS_TOL) {
            ClassTag::Ei
        } else {
            ClassTag::Diagonal
        }
    } else if close(&|m, p| p - m.conj()) {
        ClassTag::Hr
    } else if close(&|m, p| p + m.conj()) {
        ClassTag::Hi
    } else {
        ClassTag::Generic
    }
}

/// The Miura map `u -> u_x + u^2`, with the square formed alias-free.
pub fn miura(u: &GridFunction) -> GridFunction {
    &u.derivative(1) + &u.mul(u)
}

/// One component of the JSON potential format: harmonic index to `[re, im]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub harmonics: BTreeMap<String, [f64; 2]>,
}

impl ComponentSpec {
    pub fn from_table(table: &BTreeMap<i64, Complex64>) -> Self {
        Self {
            harmonics: table
                .iter()
                .map(|(k, c)| (k.to_string(), [c.re, c.im]))
                .collect(),
        }
    }

    /// Lists the nonzero coefficients of a grid function.
    pub fn from_grid(f: &GridFunction) -> Self {
        let n = f.n_modes() as i64;
        let table = f
            .coefficients()
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i as i64 - n, c))
            .filter(|(_, c)| c.norm() > 1e-15)
            .collect();
        Self::from_table(&table)
    }

    pub fn table(&self) -> Result<BTreeMap<i64, Complex64>> {
        let mut out = BTreeMap::new();
        for (key, [re, im]) in &self.harmonics {
            let k: i64 = key
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("harmonic key {key:?} is not an integer")))?;
            *out.entry(k).or_insert(Complex64::new(0.0, 0.0)) += Complex64::new(*re, *im);
        }
        Ok(out)
    }

    pub fn build(&self, n_modes: usize) -> Result<GridFunction> {
        GridFunction::trig(&self.table()?, n_modes)
    }
}

/// On-disk potential description.
///
/// Either both `minus` and `plus` are given, or `diagonal_of` alone for the
/// diagonal potential `(u, u)`. `n_modes` defaults to 64.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PotentialFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_modes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minus: Option<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plus: Option<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal_of: Option<ComponentSpec>,
}

impl PotentialFile {
    pub fn build(&self) -> Result<Potential> {
        let n = self.n_modes.unwrap_or(DEFAULT_N_MODES);
        match (&self.diagonal_of, &self.minus, &self.plus) {
            (Some(u), None, None) => Ok(Potential::diagonal(&u.build(n)?)),
            (None, Some(m), Some(p)) => Potential::new(m.build(n)?, p.build(n)?),
            (Some(_), _, _) => Err(Error::Parse(
                "\"diagonal_of\" cannot be combined with \"minus\"/\"plus\"".into(),
            )),
            _ => Err(Error::Parse(
                "expected either \"diagonal_of\" or both \"minus\" and \"plus\"".into(),
            )),
        }
    }
}
