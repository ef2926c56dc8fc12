use std::cell::OnceCell;

use crate::algebra::{AlgebraElement, C64};
use crate::error::{Error, Result};
use crate::radius::{numerical_radius, RadiusEnclosure};

/// Largest power accepted by the power-sum bounds unless overridden.
pub const DEFAULT_MAX_POWER: u32 = 8;

/// Lazily computed norms, powers and numerical radii of one element.
///
/// Every bound evaluated against the same profile shares these values, so
/// each radius is solved at most once.
pub struct Profile {
    a: AlgebraElement,
    tol: f64,
    max_power: u32,
    norm: f64,
    powers: Vec<OnceCell<AlgebraElement>>,
    power_norms: Vec<OnceCell<f64>>,
    power_radii: Vec<OnceCell<RadiusEnclosure>>,
    square_sum_norm: OnceCell<f64>,
    fourth_sum_norm: OnceCell<f64>,
    left_cross: OnceCell<RadiusEnclosure>,
    right_cross: OnceCell<RadiusEnclosure>,
}

/// Encloses `v(b)` by solving for `b/‖b‖` and scaling back, so the width is
/// relative to `‖b‖` even when `‖b‖` is far below one.
fn relative_radius(b: &AlgebraElement, tol: f64) -> Result<RadiusEnclosure> {
    let norm = b.operator_norm()?;
    if norm == 0.0 || !norm.is_normal() {
        return numerical_radius(b, tol);
    }
    let mut r = numerical_radius(&b.scale(C64::new(1.0 / norm, 0.0)), tol)?;
    r.lower *= norm * (1.0 - 4.0 * f64::EPSILON);
    r.upper *= norm * (1.0 + 4.0 * f64::EPSILON);
    Ok(r)
}

fn cached<T: Clone>(cell: &OnceCell<T>, f: impl FnOnce() -> Result<T>) -> Result<&T> {
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let v = f()?;
    Ok(cell.get_or_init(|| v))
}

impl Profile {
    pub fn new(a: AlgebraElement, tol: f64) -> Result<Self> {
        Self::with_max_power(a, tol, DEFAULT_MAX_POWER)
    }

    pub fn with_max_power(a: AlgebraElement, tol: f64, max_power: u32) -> Result<Self> {
        let norm = a.operator_norm()?;
        let slots = max_power.max(3) as usize + 1;
        Ok(Self {
            a,
            tol,
            max_power,
            norm,
            powers: (0..slots).map(|_| OnceCell::new()).collect(),
            power_norms: (0..slots).map(|_| OnceCell::new()).collect(),
            power_radii: (0..slots).map(|_| OnceCell::new()).collect(),
            square_sum_norm: OnceCell::new(),
            fourth_sum_norm: OnceCell::new(),
            left_cross: OnceCell::new(),
            right_cross: OnceCell::new(),
        })
    }

    pub fn element(&self) -> &AlgebraElement {
        &self.a
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_power(&self) -> u32 {
        self.max_power
    }

    /// `‖a‖`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    fn check_power(&self, k: u32) -> Result<usize> {
        if k == 0 || k as usize >= self.powers.len() {
            return Err(Error::InvalidArgument(format!(
                "power {k} outside 1..={}",
                self.powers.len() - 1
            )));
        }
        Ok(k as usize)
    }

    /// `a^k` for `1 ≤ k ≤ max(max_power, 3)`.
    pub fn power(&self, k: u32) -> Result<&AlgebraElement> {
        let i = self.check_power(k)?;
        if i == 1 {
            return Ok(&self.a);
        }
        let prev = self.power(k - 1)?.clone();
        cached(&self.powers[i], || Ok(prev.mul(&self.a)))
    }

    /// `‖a^k‖`.
    pub fn power_norm(&self, k: u32) -> Result<f64> {
        let i = self.check_power(k)?;
        if i == 1 {
            return Ok(self.norm);
        }
        cached(&self.power_norms[i], || self.power(k)?.operator_norm()).copied()
    }

    /// Enclosure of `v(a^k)`.
    pub fn radius(&self, k: u32) -> Result<&RadiusEnclosure> {
        let i = self.check_power(k)?;
        cached(&self.power_radii[i], || relative_radius(self.power(k)?, self.tol))
    }

    /// `‖ |a*|² + |a|² ‖`.
    pub fn square_sum_norm(&self) -> Result<f64> {
        cached(&self.square_sum_norm, || {
            self.a.adjoint_abs_square().add(&self.a.abs_square()).operator_norm()
        })
        .copied()
    }

    /// `‖ |a*|⁴ + |a|⁴ ‖` with `|a|⁴ = (a* a)²`.
    pub fn fourth_sum_norm(&self) -> Result<f64> {
        cached(&self.fourth_sum_norm, || {
            let l = self.a.adjoint_abs_square();
            let r = self.a.abs_square();
            l.mul(&l).add(&r.mul(&r)).operator_norm()
        })
        .copied()
    }

    /// Enclosure of `v(a* a²)`.
    pub fn left_cross_radius(&self) -> Result<&RadiusEnclosure> {
        cached(&self.left_cross, || {
            relative_radius(&self.a.adjoint().mul(self.power(2)?), self.tol)
        })
    }

    /// Enclosure of `v(a² a*)`.
    pub fn right_cross_radius(&self) -> Result<&RadiusEnclosure> {
        cached(&self.right_cross, || {
            relative_radius(&self.power(2)?.mul(&self.a.adjoint()), self.tol)
        })
    }
}
