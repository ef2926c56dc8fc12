use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::C64;

/// A parameter value attached to a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Integer(i64),
    Real(f64),
    Complex { re: f64, im: f64 },
    Text(String),
}

impl From<C64> for ParamValue {
    fn from(z: C64) -> Self {
        ParamValue::Complex { re: z.re, im: z.im }
    }
}

impl From<f64> for ParamValue {
    fn from(x: f64) -> Self {
        ParamValue::Real(x)
    }
}

impl From<u32> for ParamValue {
    fn from(x: u32) -> Self {
        ParamValue::Integer(x as i64)
    }
}

impl From<&str> for ParamValue {
    fn from(s: &str) -> Self {
        ParamValue::Text(s.to_string())
    }
}

/// One summand of a right-hand side: `coefficient · factor = value`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub coefficient: f64,
    pub factor: f64,
    pub value: f64,
}

impl Term {
    pub fn new(label: &str, coefficient: f64, factor: f64) -> Self {
        Self {
            label: label.to_string(),
            coefficient,
            factor,
            value: coefficient * factor,
        }
    }
}

/// Both sides of an inequality `lhs ≤ rhs` for one element and one
/// parameter choice.
///
/// `lhs` is `v(a)^power` taken from the enclosure upper end; every `v(·)`
/// inside `rhs` also uses its enclosure upper end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: String,
    pub params: BTreeMap<String, ParamValue>,
    pub power: u32,
    pub rhs: f64,
    pub lhs: f64,
    pub margin: f64,
    pub tightness: f64,
    pub components: Vec<Term>,
    /// False when any enclosure feeding the report was best-effort.
    pub certified: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

/// `lhs / rhs`, with `0/0 = 1`.
pub fn tightness(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        if lhs == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        lhs / rhs
    }
}

impl BoundReport {
    pub fn new(bound_id: &str, power: u32, lhs: f64, components: Vec<Term>, certified: bool) -> Self {
        let rhs: f64 = components.iter().map(|t| t.value).sum();
        Self::with_rhs(bound_id, power, lhs, rhs, components, certified)
    }

    pub fn with_rhs(
        bound_id: &str,
        power: u32,
        lhs: f64,
        rhs: f64,
        components: Vec<Term>,
        certified: bool,
    ) -> Self {
        Self {
            bound_id: bound_id.to_string(),
            params: BTreeMap::new(),
            power,
            rhs,
            lhs,
            margin: rhs - lhs,
            tightness: tightness(lhs, rhs),
            components,
            certified,
            extra: BTreeMap::new(),
        }
    }

    pub fn param(mut self, name: &str, value: impl Into<ParamValue>) -> Self {
        self.params.insert(name.to_string(), value.into());
        self
    }

    pub fn extra(mut self, name: &str, value: f64) -> Self {
        self.extra.insert(name.to_string(), value);
        self
    }

    /// `margin ≥ −rel·max(1, rhs)`.
    pub fn holds_within(&self, rel: f64) -> bool {
        self.margin >= -rel * self.rhs.max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tightness_conventions() {
        assert_eq!(tightness(0.0, 0.0), 1.0);
        assert_eq!(tightness(1.0, 2.0), 0.5);
        assert!(tightness(1.0, 0.0).is_infinite());
    }

    #[test]
    fn rhs_is_sum_of_terms() {
        let r = BoundReport::new("x", 2, 0.5, vec![Term::new("a", 0.5, 1.0), Term::new("b", 0.25, 2.0)], true);
        assert_eq!(r.rhs, 1.0);
        assert_eq!(r.margin, 0.5);
        assert!(r.holds_within(0.0));
    }
}
