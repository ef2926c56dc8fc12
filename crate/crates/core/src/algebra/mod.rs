//! Complex matrix C*-algebra primitives.
//!
//! `AlgebraElement` is an element of `M_n(C)` with the operator norm as its
//! C*-norm. Eigenvalue work goes through [`hermitian`] (Hermitian spectra)
//! and [`schur`] (general spectra) only; nothing else in the crate touches a
//! factorization directly.

pub mod hermitian;
pub mod io;
pub mod schur;

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Default dimension cap for algebra elements handled by campaigns and the CLI.
pub const DEFAULT_DIM_CAP: usize = 64;

pub fn is_finite(m: &Matrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermitian_deviation(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `(m + m*) / 2`.
pub fn hermitian_part(m: &Matrix) -> Matrix {
    let n = m.nrows();
    Matrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// An element of the matrix C*-algebra `M_n(C)`: square, nonempty, finite.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement(Matrix);

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraElement{}", self.0)
    }
}

/// All eigenvalues of an element, with algebraic multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
}

impl Spectrum {
    pub fn max_modulus(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

impl AlgebraElement {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidArgument(
                "algebra dimension must be positive".into(),
            ));
        }
        if !is_finite(&m) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix) -> Self {
        debug_assert!(m.is_square());
        Self(m)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(Matrix::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n, n))
    }

    pub fn zero(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self(Matrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO }))
    }

    /// Nilpotent Jordan block: ones on the superdiagonal.
    pub fn jordan_block(n: usize) -> Self {
        Self(Matrix::from_fn(n, n, |i, j| if j == i + 1 { ONE } else { ZERO }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == ZERO)
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mul(&self, rhs: &AlgebraElement) -> Self {
        Self(&self.0 * &rhs.0)
    }

    pub fn add(&self, rhs: &AlgebraElement) -> Self {
        Self(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &AlgebraElement) -> Self {
        Self(&self.0 - &rhs.0)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    /// `|a|^2 = a* a`.
    pub fn abs_square(&self) -> Self {
        Self(hermitian_part(&self.0.ad_mul(&self.0)))
    }

    /// `|a*|^2 = a a*`.
    pub fn adjoint_abs_square(&self) -> Self {
        Self(hermitian_part(&(&self.0 * self.0.adjoint())))
    }

    /// `a^k` by repeated squaring; `k = 0` gives the unit.
    pub fn matrix_power(&self, k: u32) -> Self {
        let mut result: Option<Matrix> = None;
        let mut base = self.0.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => &r * &base,
                });
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Self(result.unwrap_or_else(|| Matrix::identity(self.dim(), self.dim())))
    }

    /// The C*-norm: largest singular value, `sqrt(λ_max(a* a))`.
    pub fn operator_norm(&self) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        let top = hermitian::max_eigenvalue(&self.abs_square().0)?;
        Ok(top.max(0.0).sqrt())
    }

    pub fn full_spectrum(&self) -> Result<Spectrum> {
        Ok(Spectrum {
            eigenvalues: schur::eigenvalues(&self.0)?,
        })
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        Ok(self.full_spectrum()?.max_modulus())
    }

    /// `‖a a* − a* a‖_F`; zero exactly for normal elements.
    pub fn normality_defect(&self) -> f64 {
        (self.adjoint_abs_square().0 - self.abs_square().0).norm()
    }
}

/// Largest eigenvalue of a Hermitian element with a unit eigenvector.
///
/// Inputs whose asymmetry exceeds `1e-12·‖h‖_F` are rejected; accepted inputs
/// are symmetrized as `(h + h*)/2` before the solve.
pub fn hermitian_eigmax(h: &AlgebraElement) -> Result<(f64, Vec<C64>)> {
    let m = h.matrix();
    let dev = hermitian_deviation(m);
    if dev > 1e-12 * m.norm() {
        return Err(Error::NotHermitian { deviation: dev });
    }
    hermitian::max_eigenpair(&hermitian_part(m))
}
