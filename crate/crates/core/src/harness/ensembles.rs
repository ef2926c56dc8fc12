//! Random algebra elements, states and module tuples.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{hermitian_deviation, AlgebraElement, Matrix, C64};
use crate::error::{Error, Result};
use crate::harness::rng::{complex_gaussian, ginibre};
use crate::states::{normalize_against_state, ModuleElement, State};

/// Tolerance of every generator's structural self-check.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Redraws allowed when a sampled normalizer is degenerate.
pub const RESAMPLE_BUDGET: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// iid standard complex Gaussian entries.
    Ginibre,
    /// `(G + G*)/2` for Ginibre `G`.
    GueHermitian,
    /// Haar-distributed unitary.
    HaarUnitary,
    /// `u·diag(g)·u*` with Haar `u` and Gaussian `g`.
    NormalRandom,
    /// Ones on the superdiagonal.
    JordanNilpotent,
    /// `u [[0, B], [0, 0]] u*` with Ginibre `B` and Haar `u`; squares to zero.
    TwoNilpotent,
    /// `λ·a + μ·I` for `a` drawn from `base`.
    ShiftedScaled {
        base: Box<EnsembleKind>,
        lambda: C64,
        mu: C64,
    },
}

impl EnsembleKind {
    pub fn name(&self) -> String {
        match self {
            EnsembleKind::Ginibre => "ginibre".into(),
            EnsembleKind::GueHermitian => "gue_hermitian".into(),
            EnsembleKind::HaarUnitary => "haar_unitary".into(),
            EnsembleKind::NormalRandom => "normal_random".into(),
            EnsembleKind::JordanNilpotent => "jordan_nilpotent".into(),
            EnsembleKind::TwoNilpotent => "two_nilpotent".into(),
            EnsembleKind::ShiftedScaled { base, lambda, mu } => {
                format!("shifted_scaled({}, {lambda}, {mu})", base.name())
            }
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub dim: usize,
    pub count: u32,
    /// Rescale every draw to `‖a‖ = 1`.
    #[serde(default = "default_true")]
    pub normalize: bool,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, dim: usize, count: u32) -> Self {
        Self {
            kind,
            dim,
            count,
            normalize: true,
        }
    }

    pub fn label(&self) -> String {
        format!("{}/{}", self.kind.name(), self.dim)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > crate::algebra::DEFAULT_DIM_CAP {
            return Err(Error::Config(format!(
                "ensemble {}: dim must lie in 1..={}",
                self.kind.name(),
                crate::algebra::DEFAULT_DIM_CAP
            )));
        }
        if self.count == 0 {
            return Err(Error::Config(format!("ensemble {}: count must be positive", self.label())));
        }
        if let EnsembleKind::ShiftedScaled { lambda, mu, .. } = &self.kind {
            if !(lambda.re.is_finite() && lambda.im.is_finite() && mu.re.is_finite() && mu.im.is_finite()) {
                return Err(Error::Config("shifted_scaled parameters must be finite".into()));
            }
        }
        Ok(())
    }
}

fn structure_error(kind: &str, detail: String) -> Error {
    Error::Generator {
        kind: kind.into(),
        detail,
    }
}

/// Haar unitary from the QR factors of a Ginibre matrix, with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> Matrix {
    let qr = ginibre(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let m = d.norm();
        let phase = if m > 0.0 { d / m } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn unitarity_defect(u: &Matrix) -> f64 {
    let n = u.nrows();
    crate::algebra::max_abs(&(u.adjoint() * u - Matrix::identity(n, n)))
}

fn draw_raw(kind: &EnsembleKind, n: usize, rng: &mut impl Rng) -> Result<Matrix> {
    let m = match kind {
        EnsembleKind::Ginibre => ginibre(n, n, rng),
        EnsembleKind::GueHermitian => {
            let g = ginibre(n, n, rng);
            let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
            let dev = hermitian_deviation(&h);
            if dev > STRUCTURE_TOL * h.norm().max(1.0) {
                return Err(structure_error("gue_hermitian", format!("asymmetry {dev:e}")));
            }
            h
        }
        EnsembleKind::HaarUnitary => {
            let u = haar_unitary(n, rng);
            let dev = unitarity_defect(&u);
            if dev > STRUCTURE_TOL {
                return Err(structure_error("haar_unitary", format!("u*u - I = {dev:e}")));
            }
            u
        }
        EnsembleKind::NormalRandom => {
            let u = haar_unitary(n, rng);
            let d = Matrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| complex_gaussian(rng)));
            let a = &u * d * u.adjoint();
            let scale = a.norm_squared().max(1.0);
            let dev = AlgebraElement::from_matrix_unchecked(a.clone()).normality_defect();
            if dev > STRUCTURE_TOL * scale {
                return Err(structure_error("normal_random", format!("aa* - a*a = {dev:e}")));
            }
            a
        }
        EnsembleKind::JordanNilpotent => AlgebraElement::jordan_block(n).into_matrix(),
        EnsembleKind::TwoNilpotent => {
            let k = n / 2;
            let mut a = Matrix::zeros(n, n);
            if k > 0 {
                let b = ginibre(k, n - k, rng);
                a.view_mut((0, k), (k, n - k)).copy_from(&b);
                let u = haar_unitary(n, rng);
                a = &u * a * u.adjoint();
            }
            let sq = (&a * &a).norm();
            if sq > STRUCTURE_TOL * a.norm_squared() / n as f64 {
                return Err(structure_error("two_nilpotent", format!("a^2 = {sq:e}")));
            }
            a
        }
        EnsembleKind::ShiftedScaled { base, lambda, mu } => {
            let a = draw_raw(base, n, rng)?;
            a * *lambda + Matrix::identity(n, n) * *mu
        }
    };
    Ok(m)
}

/// One draw from `spec`, checked against its defining property and
/// normalized to `‖a‖ = 1` when requested.
pub fn sample_element(spec: &EnsembleSpec, rng: &mut impl Rng) -> Result<AlgebraElement> {
    let a = AlgebraElement::new(draw_raw(&spec.kind, spec.dim, rng)?)?;
    if !spec.normalize || a.is_zero() {
        return Ok(a);
    }
    let norm = a.operator_norm()?;
    Ok(a.scale(C64::new(1.0 / norm, 0.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// `G G* / tr(G G*)` with Ginibre `G`.
    HilbertSchmidt,
    /// `x x*` with a Gaussian unit vector `x`.
    Pure,
}

pub fn sample_state(dim: usize, kind: StateKind, rng: &mut impl Rng) -> Result<State> {
    if dim == 0 {
        return Err(Error::InvalidArgument("state dimension must be positive".into()));
    }
    match kind {
        StateKind::HilbertSchmidt => {
            let g = ginibre(dim, dim, rng);
            let p = &g * g.adjoint();
            if !(p.trace().re > 0.0) {
                return Err(structure_error("hilbert_schmidt", "zero trace".into()));
            }
            Ok(State::from_psd_unnormalized(&p))
        }
        StateKind::Pure => {
            let x: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
            State::pure(&x)
        }
    }
}

/// `k` Ginibre elements of `M_{m×n}` and a normalizer `z` with `φ(|z|²) = 1`,
/// redrawing `z` while it is degenerate for `φ`.
pub fn sample_module_tuple(
    n: usize,
    m: usize,
    k: usize,
    phi: &State,
    rng: &mut impl Rng,
) -> Result<(Vec<ModuleElement>, ModuleElement)> {
    if n == 0 || m == 0 || k == 0 {
        return Err(Error::InvalidArgument("module shape and tuple size must be positive".into()));
    }
    if phi.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} on M_{{{m}x{n}}}",
            phi.dim()
        )));
    }
    let xs = (0..k)
        .map(|_| ModuleElement::new(ginibre(m, n, rng)))
        .collect::<Result<Vec<_>>>()?;
    for _ in 0..RESAMPLE_BUDGET {
        let z = ModuleElement::new(ginibre(m, n, rng))?;
        match normalize_against_state(&z, phi) {
            Ok(z) => return Ok((xs, z)),
            Err(Error::DegenerateZ { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ResampleBudget(RESAMPLE_BUDGET))
}
