//! Weight functions `f: D → [0, ∞)` with `f(t) + f(1 − t) = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the involution identity and nonnegativity checks.
pub const INVOLUTION_TOL: f64 = 1e-12;
const SWEEP_POINTS: usize = 101;

/// Serializable description of a mean function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MeanSpec {
    /// `f(t) = t` on `[0, 1]`.
    IdentityOnUnitInterval,
    /// `f(t) = (1 + 2t)/4` on `[−1/2, 3/2]`.
    AffineQuarter,
    /// Piecewise-linear interpolation of equally spaced samples on `[lo, hi]`.
    CustomTabulated { lo: f64, hi: f64, values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanFunction {
    spec: MeanSpec,
    lo: f64,
    hi: f64,
}

impl MeanFunction {
    pub fn identity() -> Self {
        Self {
            spec: MeanSpec::IdentityOnUnitInterval,
            lo: 0.0,
            hi: 1.0,
        }
    }

    pub fn affine_quarter() -> Self {
        Self {
            spec: MeanSpec::AffineQuarter,
            lo: -0.5,
            hi: 1.5,
        }
    }

    /// Builds a tabulated function and validates it on a 101-point sweep.
    pub fn tabulated(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        Self::from_spec(MeanSpec::CustomTabulated { lo, hi, values })
    }

    pub fn from_spec(spec: MeanSpec) -> Result<Self> {
        let f = match spec {
            MeanSpec::IdentityOnUnitInterval => Self::identity(),
            MeanSpec::AffineQuarter => Self::affine_quarter(),
            MeanSpec::CustomTabulated { lo, hi, ref values } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidMeanFunction(format!("bad domain [{lo}, {hi}]")));
                }
                if values.len() < 2 || values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidMeanFunction(
                        "need at least two finite samples".into(),
                    ));
                }
                Self { spec, lo, hi }
            }
        };
        f.validate()?;
        Ok(f)
    }

    pub fn spec(&self) -> &MeanSpec {
        &self.spec
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn name(&self) -> &'static str {
        match self.spec {
            MeanSpec::IdentityOnUnitInterval => "identity_on_unit_interval",
            MeanSpec::AffineQuarter => "affine_quarter",
            MeanSpec::CustomTabulated { .. } => "custom_tabulated",
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    fn raw(&self, t: f64) -> f64 {
        match &self.spec {
            MeanSpec::IdentityOnUnitInterval => t,
            MeanSpec::AffineQuarter => (1.0 + 2.0 * t) / 4.0,
            MeanSpec::CustomTabulated { lo, hi, values } => {
                let k = values.len() - 1;
                let pos = (t - lo) / (hi - lo) * k as f64;
                let i = (pos.floor() as usize).min(k - 1);
                let w = pos - i as f64;
                values[i] * (1.0 - w) + values[i + 1] * w
            }
        }
    }

    /// `f(t)`; errors when `t` is outside the domain.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !self.contains(t) {
            return Err(Error::XiOutOfDomain {
                value: t,
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(self.raw(t))
    }

    /// Checks `ξ ∈ D` and `1 − ξ ∈ D`, returning `(f(ξ), f(1 − ξ))`.
    pub fn weights(&self, xi: f64) -> Result<(f64, f64)> {
        if !self.contains(xi) || !self.contains(1.0 - xi) {
            return Err(Error::XiOutOfDomain {
                value: xi,
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok((self.raw(xi), self.raw(1.0 - xi)))
    }

    fn validate(&self) -> Result<()> {
        for k in 0..SWEEP_POINTS {
            let t = self.lo + (self.hi - self.lo) * k as f64 / (SWEEP_POINTS - 1) as f64;
            let ft = self.raw(t);
            if ft < -INVOLUTION_TOL {
                return Err(Error::InvalidMeanFunction(format!("f({t}) = {ft} is negative")));
            }
            if self.contains(1.0 - t) {
                let dev = (ft + self.raw(1.0 - t) - 1.0).abs();
                if dev > INVOLUTION_TOL {
                    return Err(Error::InvalidMeanFunction(format!(
                        "f({t}) + f(1 - {t}) deviates from 1 by {dev:e}"
                    )));
                }
            }
        }
        Ok(())
    }
}
