//! JSON interchange: `{"dim": n, "re": [...], "im": [...]}` with row-major
//! `n²` arrays. States carry an extra `"kind": "state"` tag.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AlgebraElement, Matrix, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
}

impl MatrixJson {
    pub fn from_matrix(m: &Matrix) -> Self {
        let n = m.nrows();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        Self {
            dim: n,
            re,
            im,
            kind: None,
        }
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        let n = self.dim;
        if self.re.len() != n * n || self.im.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "dim {n} needs {} entries, got re={} im={}",
                n * n,
                self.re.len(),
                self.im.len()
            )));
        }
        Ok(Matrix::from_fn(n, n, |i, j| {
            C64::new(self.re[i * n + j], self.im[i * n + j])
        }))
    }
}

impl AlgebraElement {
    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from_matrix(self.matrix())
    }

    pub fn from_json(j: &MatrixJson) -> Result<Self> {
        AlgebraElement::new(j.to_matrix()?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}
