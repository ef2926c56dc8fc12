//! Buzano-type inequalities in the Hilbert module `M_{m×n}` under a state.
//!
//! All evaluators reduce a tuple `(φ, x₁…x_k, z)` to the scalars
//! `φ(⟨xᵢ, z⟩)`, `φ(|xᵢ|²)` and `φ(⟨x₁, x₂⟩)` ([`Pairings`]) and then
//! evaluate both sides of the displayed inequality from those.

pub mod mean;

use serde::{Deserialize, Serialize};

use crate::algebra::C64;
use crate::bounds::report::Term;
use crate::error::{Error, Result};
use crate::states::{state_norm_sq, state_pairing, ModuleElement, State};

pub use mean::{MeanFunction, MeanSpec};

/// `|φ(|z|²) − 1|` allowed for the normalizing element.
pub const Z_NORMALIZATION_TOL: f64 = 1e-10;
/// Relative slack `lhs ≤ rhs + slack·max(1, rhs)` used by campaigns.
pub const BUZANO_SLACK: f64 = 1e-10;

/// Both sides of one inequality instance, with the rhs split into terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
    pub terms: Vec<Term>,
}

impl Sides {
    fn from_terms(lhs: f64, terms: Vec<Term>) -> Self {
        let rhs = terms.iter().map(|t| t.value).sum();
        Self { lhs, rhs, terms }
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds_within(&self, rel: f64) -> bool {
        self.margin() >= -rel * self.rhs.max(1.0)
    }
}

/// `max{1, |α − 1|}`.
pub fn alpha_weight(alpha: C64) -> f64 {
    (alpha - 1.0).norm().max(1.0)
}

fn check_alpha(alpha: C64, name: &'static str) -> Result<f64> {
    let m = alpha.norm();
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::ZeroParameter { name });
    }
    Ok(m)
}

fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Product of nonnegative factors; compensated when there are more than four.
pub fn product(factors: impl IntoIterator<Item = f64>) -> f64 {
    let factors: Vec<f64> = factors.into_iter().collect();
    if factors.len() <= 4 {
        return factors.iter().product();
    }
    let mut p = 1.0;
    let mut err = 0.0;
    for &x in &factors {
        let (hi, lo) = two_product(p, x);
        err = err * x + lo;
        p = hi;
    }
    p + err
}

/// The scalar data every product-form evaluator consumes.
#[derive(Clone, Debug, PartialEq)]
pub struct Pairings {
    /// `φ(⟨xᵢ, z⟩)`.
    pub with_z: Vec<C64>,
    /// `φ(|xᵢ|²)`.
    pub norms_sq: Vec<f64>,
    /// `φ(⟨x₁, x₂⟩)`.
    pub first_pair: C64,
}

impl Pairings {
    /// Validates shapes and `φ(|z|²) = 1`, then evaluates all pairings.
    pub fn compute(phi: &State, xs: &[ModuleElement], z: &ModuleElement) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::InvalidArgument("need at least two module elements".into()));
        }
        let zz = state_norm_sq(phi, z)?;
        if (zz - 1.0).abs() > Z_NORMALIZATION_TOL {
            return Err(Error::UnnormalizedZ {
                value: zz,
                tolerance: Z_NORMALIZATION_TOL,
            });
        }
        let with_z = xs
            .iter()
            .map(|x| state_pairing(phi, x, z))
            .collect::<Result<Vec<_>>>()?;
        let norms_sq = xs
            .iter()
            .map(|x| state_norm_sq(phi, x))
            .collect::<Result<Vec<_>>>()?;
        let first_pair = state_pairing(phi, &xs[0], &xs[1])?;
        Ok(Self {
            with_z,
            norms_sq,
            first_pair,
        })
    }

    pub fn len(&self) -> usize {
        self.with_z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.with_z.is_empty()
    }

    /// `|∏ φ(⟨xᵢ, z⟩)|`.
    pub fn product_with_z(&self) -> f64 {
        product(self.with_z.iter().map(|c| c.norm()))
    }

    /// `∏ √φ(|xᵢ|²)`.
    pub fn root_norm_product(&self) -> f64 {
        product(self.norms_sq.iter().map(|s| s.sqrt()))
    }

    /// `∏ φ(|xᵢ|²)`.
    pub fn norm_sq_product(&self) -> f64 {
        product(self.norms_sq.iter().copied())
    }

    /// `|φ(⟨x₁, x₂⟩) ∏_{i≥3} φ(⟨xᵢ, z⟩)|`.
    pub fn mixed_product(&self) -> f64 {
        product(
            std::iter::once(self.first_pair.norm()).chain(self.with_z[2..].iter().map(|c| c.norm())),
        )
    }

    /// Three-term squared product bound with weights `f(ξ)` and `f(1 − ξ)`.
    pub fn squared_product_sides(&self, alpha: C64, f_xi: f64, f_reflected: f64) -> Result<Sides> {
        let am = check_alpha(alpha, "alpha")?;
        let m1 = alpha_weight(alpha);
        let a2 = am * am;
        let p = self.product_with_z();
        let q = self.root_norm_product();
        let mm = self.mixed_product();
        Ok(Sides::from_terms(
            p * p,
            vec![
                Term::new("norm_product", m1 * m1 / a2, self.norm_sq_product()),
                Term::new("mixed_square", f_reflected / a2, mm * mm),
                Term::new("cross", (f_xi + 2.0 * m1) / a2, q * mm),
            ],
        ))
    }

    /// `|∏ φ(⟨xᵢ, z⟩)| ≤ (max{1,|α−1|}∏√φ(|xᵢ|²) + |φ(⟨x₁,x₂⟩)∏_{i≥3}φ(⟨xᵢ,z⟩)|)/|α|`.
    pub fn linear_product_sides(&self, alpha: C64) -> Result<Sides> {
        let am = check_alpha(alpha, "alpha")?;
        let m1 = alpha_weight(alpha);
        Ok(Sides::from_terms(
            self.product_with_z(),
            vec![
                Term::new("norm_product", m1 / am, self.root_norm_product()),
                Term::new("mixed", 1.0 / am, self.mixed_product()),
            ],
        ))
    }

    /// Closed form of the squared bound with `f(t) = t`, `ξ = ζ/(1+ζ)`.
    pub fn zeta_sides(&self, zeta: f64, alpha: C64) -> Result<Sides> {
        if !(zeta >= 0.0) || !zeta.is_finite() {
            return Err(Error::NegativeZeta(zeta));
        }
        let am = check_alpha(alpha, "alpha")?;
        let m1 = alpha_weight(alpha);
        let a2 = am * am;
        let p = self.product_with_z();
        let q = self.root_norm_product();
        let mm = self.mixed_product();
        Ok(Sides::from_terms(
            p * p,
            vec![
                Term::new("norm_product", m1 * m1 / a2, self.norm_sq_product()),
                Term::new("mixed_square", 1.0 / (a2 * (1.0 + zeta)), mm * mm),
                Term::new(
                    "cross",
                    (zeta + 2.0 * (1.0 + zeta) * m1) / (a2 * (1.0 + zeta)),
                    q * mm,
                ),
            ],
        ))
    }

    /// Closed form of the squared bound with `f(t) = (1+2t)/4`, `ξ = η`.
    pub fn eta_sides(&self, eta: f64, alpha: C64) -> Result<Sides> {
        if !(-0.5..=1.5).contains(&eta) {
            return Err(Error::EtaOutOfRange(eta));
        }
        let am = check_alpha(alpha, "alpha")?;
        let m1 = alpha_weight(alpha);
        let a2 = am * am;
        let p = self.product_with_z();
        let q = self.root_norm_product();
        let mm = self.mixed_product();
        Ok(Sides::from_terms(
            p * p,
            vec![
                Term::new("norm_product", m1 * m1 / a2, self.norm_sq_product()),
                Term::new("mixed_square", (3.0 - 2.0 * eta) / (4.0 * a2), mm * mm),
                Term::new("cross", (1.0 + 2.0 * eta + 8.0 * m1) / (4.0 * a2), q * mm),
            ],
        ))
    }
}

/// `|φ⟨x,z⟩ φ⟨y,z⟩| ≤ (max{1,|α−1|}√φ(|x|²)√φ(|y|²) + |φ⟨x,y⟩|)/|α|`.
pub fn generalized_buzano_sides(
    phi: &State,
    x: &ModuleElement,
    y: &ModuleElement,
    z: &ModuleElement,
    alpha: C64,
) -> Result<Sides> {
    check_alpha(alpha, "alpha")?;
    Pairings::compute(phi, &[x.clone(), y.clone()], z)?.linear_product_sides(alpha)
}

/// The `α = 2` case: `|φ⟨x,z⟩ φ⟨y,z⟩| ≤ (√φ(|x|²)√φ(|y|²) + |φ⟨x,y⟩|)/2`.
pub fn buzano_sides(phi: &State, x: &ModuleElement, y: &ModuleElement, z: &ModuleElement) -> Result<Sides> {
    generalized_buzano_sides(phi, x, y, z, C64::new(2.0, 0.0))
}

/// `|φ⟨x,y⟩| ≤ √φ(|x|²)√φ(|y|²)`.
pub fn cauchy_schwarz_sides(phi: &State, x: &ModuleElement, y: &ModuleElement) -> Result<Sides> {
    let xx = state_norm_sq(phi, x)?;
    let yy = state_norm_sq(phi, y)?;
    let xy = state_pairing(phi, x, y)?;
    Ok(Sides::from_terms(
        xy.norm(),
        vec![Term::new("norm_product", 1.0, xx.sqrt() * yy.sqrt())],
    ))
}

/// Inputs of the squared product inequality with a mean function.
#[derive(Clone, Debug)]
pub struct BuzanoInstance {
    pub phi: State,
    pub xs: Vec<ModuleElement>,
    pub z: ModuleElement,
    pub alpha: C64,
    pub xi: f64,
    pub f: MeanFunction,
}

impl BuzanoInstance {
    pub fn new(
        phi: State,
        xs: Vec<ModuleElement>,
        z: ModuleElement,
        alpha: C64,
        xi: f64,
        f: MeanFunction,
    ) -> Result<Self> {
        check_alpha(alpha, "alpha")?;
        f.weights(xi)?;
        let inst = Self {
            phi,
            xs,
            z,
            alpha,
            xi,
            f,
        };
        let zz = state_norm_sq(&inst.phi, &inst.z)?;
        if (zz - 1.0).abs() > Z_NORMALIZATION_TOL {
            return Err(Error::UnnormalizedZ {
                value: zz,
                tolerance: Z_NORMALIZATION_TOL,
            });
        }
        if inst.xs.len() < 2 {
            return Err(Error::InvalidArgument("need at least two module elements".into()));
        }
        Ok(inst)
    }
}

/// `|∏φ⟨xᵢ,z⟩|² ≤ T₁ + T₂ + T₃` with the mean-function weights.
pub fn product_buzano_sides(inst: &BuzanoInstance) -> Result<Sides> {
    let (f_xi, f_reflected) = inst.f.weights(inst.xi)?;
    Pairings::compute(&inst.phi, &inst.xs, &inst.z)?.squared_product_sides(inst.alpha, f_xi, f_reflected)
}

/// Unsquared product inequality; equals [`generalized_buzano_sides`] for two elements.
pub fn product_buzano_linear_sides(phi: &State, xs: &[ModuleElement], z: &ModuleElement, alpha: C64) -> Result<Sides> {
    check_alpha(alpha, "alpha")?;
    Pairings::compute(phi, xs, z)?.linear_product_sides(alpha)
}

/// Squared product inequality for `f(t) = t`, `ξ = ζ/(1+ζ)`, `ζ ≥ 0`.
pub fn zeta_family_sides(phi: &State, xs: &[ModuleElement], z: &ModuleElement, zeta: f64, alpha: C64) -> Result<Sides> {
    if !(zeta >= 0.0) {
        return Err(Error::NegativeZeta(zeta));
    }
    check_alpha(alpha, "alpha")?;
    Pairings::compute(phi, xs, z)?.zeta_sides(zeta, alpha)
}

/// Squared product inequality for `f(t) = (1+2t)/4`, `ξ = η ∈ [−1/2, 3/2]`.
pub fn eta_family_sides(phi: &State, xs: &[ModuleElement], z: &ModuleElement, eta: f64, alpha: C64) -> Result<Sides> {
    if !(-0.5..=1.5).contains(&eta) {
        return Err(Error::EtaOutOfRange(eta));
    }
    check_alpha(alpha, "alpha")?;
    Pairings::compute(phi, xs, z)?.eta_sides(eta, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Matrix;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn scalar(v: &[C64]) -> ModuleElement {
        ModuleElement::scalar_column(v).unwrap()
    }

    fn one() -> ModuleElement {
        scalar(&[c(1.0, 0.0)])
    }

    #[test]
    fn scalar_unit_examples() {
        let phi = State::maximally_mixed(1);
        let s = generalized_buzano_sides(&phi, &one(), &one(), &one(), c(2.0, 0.0)).unwrap();
        assert_eq!((s.lhs, s.rhs), (1.0, 1.0));
        let s = generalized_buzano_sides(&phi, &one(), &one(), &one(), c(1.0, 0.0)).unwrap();
        assert_eq!((s.lhs, s.rhs), (1.0, 2.0));
    }

    #[test]
    fn orthogonal_pair_in_c2() {
        let phi = State::maximally_mixed(1);
        let x = scalar(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let y = scalar(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = scalar(&[c(h, 0.0), c(h, 0.0)]);
        let s = generalized_buzano_sides(&phi, &x, &y, &z, c(2.0, 0.0)).unwrap();
        assert!((s.lhs - 0.5).abs() < 1e-15 && (s.rhs - 0.5).abs() < 1e-15);
        let b = buzano_sides(&phi, &x, &y, &z).unwrap();
        assert_eq!(b, s);
    }

    #[test]
    fn product_form_unit_example() {
        let phi = State::maximally_mixed(1);
        let inst = BuzanoInstance::new(phi, vec![one(), one()], one(), c(2.0, 0.0), 0.0, MeanFunction::identity()).unwrap();
        let s = product_buzano_sides(&inst).unwrap();
        assert_eq!(s.lhs, 1.0);
        assert!((s.rhs - 1.0).abs() < 1e-15);
        let t: Vec<f64> = s.terms.iter().map(|t| t.value).collect();
        assert_eq!(t, vec![0.25, 0.25, 0.5]);
    }

    #[test]
    fn linear_product_unit_example() {
        let phi = State::maximally_mixed(1);
        let s = product_buzano_linear_sides(&phi, &[one(), one(), one()], &one(), c(2.0, 0.0)).unwrap();
        assert_eq!((s.lhs, s.rhs), (1.0, 1.0));
    }

    #[test]
    fn parameter_errors() {
        let phi = State::maximally_mixed(1);
        let xs = [one(), one()];
        assert!(matches!(
            zeta_family_sides(&phi, &xs, &one(), -1.0, c(2.0, 0.0)),
            Err(Error::NegativeZeta(_))
        ));
        assert!(matches!(
            eta_family_sides(&phi, &xs, &one(), 1.6, c(2.0, 0.0)),
            Err(Error::EtaOutOfRange(_))
        ));
        assert!(matches!(
            generalized_buzano_sides(&phi, &one(), &one(), &one(), c(0.0, 0.0)),
            Err(Error::ZeroParameter { .. })
        ));
        let z2 = scalar(&[c(2.0, 0.0)]);
        assert!(matches!(
            buzano_sides(&phi, &one(), &one(), &z2),
            Err(Error::UnnormalizedZ { .. })
        ));
    }

    #[test]
    fn eta_extremes() {
        let phi = State::maximally_mixed(1);
        let xs = [scalar(&[c(0.3, 0.1)]), scalar(&[c(-0.2, 0.5)])];
        let s = eta_family_sides(&phi, &xs, &one(), 1.5, c(2.0, 0.0)).unwrap();
        assert_eq!(s.terms[1].coefficient, 0.0);
        let s = eta_family_sides(&phi, &xs, &one(), -0.5, c(2.0, 0.0)).unwrap();
        assert!((s.terms[1].coefficient - 1.0 / 4.0).abs() < 1e-16);
        assert!((s.terms[2].coefficient - 8.0 / 16.0).abs() < 1e-16);
    }

    #[test]
    fn zeta_large_kills_middle_term() {
        let phi = State::maximally_mixed(1);
        let xs = [one(), one()];
        let s = zeta_family_sides(&phi, &xs, &one(), 1e6, c(2.0, 0.0)).unwrap();
        assert!(s.terms[1].coefficient < 1e-6);
    }

    #[test]
    fn compensated_product_matches_naive_for_benign_inputs() {
        let xs = [0.5, 1.25, 3.0, 0.1, 7.0, 0.9];
        let naive: f64 = xs.iter().product();
        assert!((product(xs) - naive).abs() <= 4.0 * f64::EPSILON * naive);
    }

    #[test]
    fn matrix_module_instance_holds() {
        let phi = State::maximally_mixed(2);
        let x = ModuleElement::new(Matrix::from_fn(3, 2, |i, j| c(i as f64 - j as f64, 0.5 * j as f64))).unwrap();
        let y = ModuleElement::new(Matrix::from_fn(3, 2, |i, j| c(1.0 - j as f64, i as f64 * 0.2))).unwrap();
        let z0 = ModuleElement::new(Matrix::from_fn(3, 2, |i, j| c((i + j) as f64 * 0.3, 1.0))).unwrap();
        let z = crate::states::normalize_against_state(&z0, &phi).unwrap();
        for alpha in [c(2.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.5, 0.0), c(10.0, 0.0)] {
            let s = generalized_buzano_sides(&phi, &x, &y, &z, alpha).unwrap();
            assert!(s.holds_within(BUZANO_SLACK), "{s:?}");
        }
    }
}
