//! States on `M_n` as density matrices, and the Hilbert module `M_{m×n}`
//! over `M_n` with inner product `⟨x, y⟩ = y* x`.
//!
//! With this convention `⟨a, e⟩ = a` and `⟨a, a*⟩ = a²` when the module is
//! the algebra itself.

use std::path::Path;

use crate::algebra::io::MatrixJson;
use crate::algebra::{hermitian, hermitian_deviation, hermitian_part, is_finite, AlgebraElement, Matrix, C64};
use crate::error::{Error, Result};

pub const STATE_HERMITIAN_TOL: f64 = 1e-12;
pub const STATE_TRACE_TOL: f64 = 1e-12;
pub const STATE_MIN_EIGENVALUE: f64 = -1e-10;
/// `φ(|z|²)` must exceed this before `z` can be normalized.
pub const DEGENERATE_Z_THRESHOLD: f64 = 1e-12;

/// A density matrix `ρ`, acting as `φ(a) = tr(ρ a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    rho: Matrix,
}

impl State {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rho: Matrix) -> Result<Self> {
        if !rho.is_square() || rho.nrows() == 0 {
            return Err(Error::InvalidState("density matrix must be square and nonempty".into()));
        }
        if !is_finite(&rho) {
            return Err(Error::NonFinite);
        }
        let dev = hermitian_deviation(&rho);
        if dev > STATE_HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TRACE_TOL || tr.im.abs() > STATE_TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let rho = hermitian_part(&rho);
        let min_eig = hermitian::eigenvalues(&rho)[0];
        if min_eig < STATE_MIN_EIGENVALUE {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min_eig:e} is negative"
            )));
        }
        Ok(Self { rho })
    }

    /// `I/n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            rho: Matrix::identity(n, n) * C64::new(1.0 / n as f64, 0.0),
        }
    }

    /// The vector state `x x* / ‖x‖²`.
    pub fn pure(x: &[C64]) -> Result<Self> {
        let norm2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        if !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::InvalidState("pure state vector must be nonzero and finite".into()));
        }
        let n = x.len();
        let rho = Matrix::from_fn(n, n, |i, j| x[i] * x[j].conj() / norm2);
        Ok(Self {
            rho: hermitian_part(&rho),
        })
    }

    /// `G G* / tr(G G*)`, rescaled; used by samplers that already hold a PSD
    /// matrix with positive trace.
    pub(crate) fn from_psd_unnormalized(p: &Matrix) -> Self {
        let tr = p.trace().re;
        Self {
            rho: hermitian_part(p) * C64::new(1.0 / tr, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn rho(&self) -> &Matrix {
        &self.rho
    }

    /// `tr(ρ m)` for a square matrix of matching dimension.
    pub(crate) fn apply_matrix(&self, m: &Matrix) -> C64 {
        let n = self.rho.nrows();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.rho[(i, j)] * m[(j, i)];
            }
        }
        acc
    }

    pub fn to_json(&self) -> MatrixJson {
        let mut j = MatrixJson::from_matrix(&self.rho);
        j.kind = Some("state".into());
        j
    }

    pub fn from_json(j: &MatrixJson) -> Result<Self> {
        if j.kind.as_deref() != Some("state") {
            return Err(Error::InvalidState(r#"missing "kind": "state" tag"#.into()));
        }
        Self::new(j.to_matrix()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let j: MatrixJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Self::from_json(&j)
    }
}

/// An element of the right `M_n`-module `M_{m×n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleElement(Matrix);

impl ModuleElement {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::InvalidArgument("module element must be nonempty".into()));
        }
        if !is_finite(&m) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// The algebra viewed as a module over itself.
    pub fn from_algebra(a: &AlgebraElement) -> Self {
        Self(a.matrix().clone())
    }

    /// A column vector over `M_1`, i.e. a plain pre-Hilbert space vector.
    pub fn scalar_column(v: &[C64]) -> Result<Self> {
        Self::new(Matrix::from_column_slice(v.len(), 1, v))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    /// Right module action `x · b`.
    pub fn act(&self, b: &AlgebraElement) -> Result<Self> {
        if self.cols() != b.dim() {
            return Err(Error::DimensionMismatch(format!(
                "module element has {} columns, algebra dimension is {}",
                self.cols(),
                b.dim()
            )));
        }
        Ok(Self(&self.0 * b.matrix()))
    }
}

fn check_state_dim(phi: &State, n: usize) -> Result<()> {
    if phi.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} does not match algebra dimension {n}",
            phi.dim()
        )));
    }
    Ok(())
}

fn check_same_shape(x: &ModuleElement, y: &ModuleElement) -> Result<()> {
    if x.rows() != y.rows() || x.cols() != y.cols() {
        return Err(Error::DimensionMismatch(format!(
            "module shapes {}x{} and {}x{} differ",
            x.rows(),
            x.cols(),
            y.rows(),
            y.cols()
        )));
    }
    Ok(())
}

/// `φ(a) = tr(ρ a)`.
pub fn state_apply(phi: &State, a: &AlgebraElement) -> Result<C64> {
    check_state_dim(phi, a.dim())?;
    Ok(phi.apply_matrix(a.matrix()))
}

/// `⟨x, y⟩ = y* x`.
pub fn inner_product(x: &ModuleElement, y: &ModuleElement) -> Result<AlgebraElement> {
    check_same_shape(x, y)?;
    Ok(AlgebraElement::from_matrix_unchecked(y.0.ad_mul(&x.0)))
}

/// `|x|² = x* x`.
pub fn abs_square_module(x: &ModuleElement) -> AlgebraElement {
    AlgebraElement::from_matrix_unchecked(hermitian_part(&x.0.ad_mul(&x.0)))
}

/// `φ(⟨x, y⟩)` without materializing intermediate elements beyond `y* x`.
pub fn state_pairing(phi: &State, x: &ModuleElement, y: &ModuleElement) -> Result<C64> {
    check_same_shape(x, y)?;
    check_state_dim(phi, x.cols())?;
    Ok(phi.apply_matrix(&y.0.ad_mul(&x.0)))
}

/// `φ(|x|²)`, clamped at zero.
pub fn state_norm_sq(phi: &State, x: &ModuleElement) -> Result<f64> {
    Ok(state_pairing(phi, x, x)?.re.max(0.0))
}

/// Rescales `z` so that `φ(|z|²) = 1`.
pub fn normalize_against_state(z: &ModuleElement, phi: &State) -> Result<ModuleElement> {
    let s = state_norm_sq(phi, z)?;
    if !(s > DEGENERATE_Z_THRESHOLD) {
        return Err(Error::DegenerateZ {
            value: s,
            threshold: DEGENERATE_Z_THRESHOLD,
        });
    }
    Ok(z.scale(C64::new(1.0 / s.sqrt(), 0.0)))
}

/// `√φ(|x|²)·√φ(|y|²) − |φ(⟨x, y⟩)|`, nonnegative up to round-off.
pub fn cauchy_schwarz_gap(phi: &State, x: &ModuleElement, y: &ModuleElement) -> Result<f64> {
    let xx = state_norm_sq(phi, x)?;
    let yy = state_norm_sq(phi, y)?;
    let xy = state_pairing(phi, x, y)?;
    Ok(xx.sqrt() * yy.sqrt() - xy.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn state_apply_examples() {
        let one = state_apply(&State::maximally_mixed(3), &AlgebraElement::identity(3)).unwrap();
        assert!((one - c(1.0, 0.0)).norm() < 1e-15);

        let e1 = State::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let d = AlgebraElement::diagonal(&[c(5.0, 0.0), c(7.0, 0.0)]);
        assert_eq!(state_apply(&e1, &d).unwrap(), c(5.0, 0.0));

        let nil = AlgebraElement::jordan_block(2);
        assert_eq!(state_apply(&State::maximally_mixed(2), &nil).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn state_apply_rejects_dimension_mismatch() {
        assert!(state_apply(&State::maximally_mixed(2), &AlgebraElement::identity(3)).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let a = AlgebraElement::new(Matrix::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5))).unwrap();
        let xa = ModuleElement::from_algebra(&a);
        let e = ModuleElement::from_algebra(&AlgebraElement::identity(2));
        assert_eq!(inner_product(&xa, &e).unwrap(), a);

        let astar = ModuleElement::from_algebra(&a.adjoint());
        let sq = inner_product(&xa, &astar).unwrap();
        assert!(crate::algebra::max_abs(&(sq.matrix() - a.matrix_power(2).matrix())) < 1e-14);

        let xx = inner_product(&xa, &xa).unwrap();
        assert!(hermitian_deviation(xx.matrix()) < 1e-14);
        assert_eq!(abs_square_module(&xa), a.abs_square());
    }

    #[test]
    fn abs_square_module_examples() {
        let e = ModuleElement::from_algebra(&AlgebraElement::identity(2));
        assert_eq!(abs_square_module(&e), AlgebraElement::identity(2));
        let col = ModuleElement::scalar_column(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(abs_square_module(&col), AlgebraElement::identity(1));
        let nil = ModuleElement::from_algebra(&AlgebraElement::jordan_block(2));
        assert_eq!(
            abs_square_module(&nil),
            AlgebraElement::diagonal(&[c(0.0, 0.0), c(1.0, 0.0)])
        );
    }

    #[test]
    fn normalize_examples() {
        let phi = State::maximally_mixed(2);
        let z = ModuleElement::from_algebra(&AlgebraElement::identity(2).scale(c(2.0, 0.0)));
        let zn = normalize_against_state(&z, &phi).unwrap();
        assert!(crate::algebra::max_abs(&(zn.matrix() - Matrix::identity(2, 2))) < 1e-15);
        let again = normalize_against_state(&zn, &phi).unwrap();
        assert!(crate::algebra::max_abs(&(again.matrix() - zn.matrix())) < 1e-12);
        let zero = ModuleElement::new(Matrix::zeros(2, 2)).unwrap();
        assert!(matches!(
            normalize_against_state(&zero, &phi),
            Err(Error::DegenerateZ { .. })
        ));
    }

    #[test]
    fn cauchy_schwarz_examples() {
        let phi = State::maximally_mixed(1);
        let x = ModuleElement::scalar_column(&[c(1.0, 2.0), c(0.5, -1.0)]).unwrap();
        assert!(cauchy_schwarz_gap(&phi, &x, &x).unwrap().abs() < 1e-14);
        let e1 = ModuleElement::scalar_column(&[c(3.0, 0.0), c(0.0, 0.0)]).unwrap();
        let e2 = ModuleElement::scalar_column(&[c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!((cauchy_schwarz_gap(&phi, &e1, &e2).unwrap() - 6.0).abs() < 1e-14);
    }

    #[test]
    fn state_validation() {
        let bad_trace = Matrix::identity(2, 2);
        assert!(State::new(bad_trace).is_err());
        let neg = Matrix::from_fn(2, 2, |i, j| if i == j { c(if i == 0 { 1.5 } else { -0.5 }, 0.0) } else { c(0.0, 0.0) });
        assert!(State::new(neg).is_err());
        let mut non_herm = Matrix::identity(2, 2) * c(0.5, 0.0);
        non_herm[(0, 1)] = c(0.1, 0.0);
        assert!(State::new(non_herm).is_err());
        assert!(State::new(Matrix::identity(2, 2) * c(0.5, 0.0)).is_ok());
    }

    #[test]
    fn state_json_requires_tag() {
        let phi = State::maximally_mixed(2);
        let j = phi.to_json();
        assert_eq!(State::from_json(&j).unwrap(), phi);
        let mut untagged = j.clone();
        untagged.kind = None;
        assert!(State::from_json(&untagged).is_err());
    }
}
