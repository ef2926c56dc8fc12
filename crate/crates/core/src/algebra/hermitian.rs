//! Hermitian eigenvalue routines.
//!
//! Backed by nalgebra's tridiagonal implicit-QL solver, with a closed form
//! for 2×2 blocks. Callers are expected to pass matrices that are already
//! Hermitian; only the upper triangle's information is used by the 2×2 path.

use nalgebra::SymmetricEigen;

use super::{Matrix, C64, ZERO};
use crate::error::{Error, Result};

const ITERATION_CAP_PER_DIM: usize = 200;

fn eig_2x2(h: &Matrix) -> (f64, f64) {
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = h[(0, 1)];
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean - r, mean + r)
}

/// All eigenvalues in ascending order.
pub fn eigenvalues(h: &Matrix) -> Vec<f64> {
    match h.nrows() {
        0 => Vec::new(),
        1 => vec![h[(0, 0)].re],
        2 => {
            let (lo, hi) = eig_2x2(h);
            vec![lo, hi]
        }
        _ => {
            let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
            v.sort_by(f64::total_cmp);
            v
        }
    }
}

/// Largest eigenvalue only.
pub fn max_eigenvalue(h: &Matrix) -> Result<f64> {
    match h.nrows() {
        0 => Err(Error::InvalidArgument("empty matrix".into())),
        1 => Ok(h[(0, 0)].re),
        2 => Ok(eig_2x2(h).1),
        _ => Ok(h
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)),
    }
}

/// Largest eigenvalue and a unit eigenvector.
pub fn max_eigenpair(h: &Matrix) -> Result<(f64, Vec<C64>)> {
    let n = h.nrows();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    if n == 1 {
        return Ok((h[(0, 0)].re, vec![C64::new(1.0, 0.0)]));
    }
    let cap = ITERATION_CAP_PER_DIM * n;
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, cap).ok_or(
        Error::NonConvergence {
            routine: "hermitian eigensolver",
            iterations: cap,
        },
    )?;
    let (k, lambda) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, l)| {
            if l > best.1 {
                (i, l)
            } else {
                best
            }
        });
    let col = eig.eigenvectors.column(k);
    let norm = col.norm();
    let x: Vec<C64> = if norm > 0.0 {
        col.iter().map(|z| z / norm).collect()
    } else {
        let mut e = vec![ZERO; n];
        e[0] = C64::new(1.0, 0.0);
        e
    };
    Ok((lambda, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form_matches_general_path() {
        let h = Matrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.3, -0.7),
                C64::new(0.3, 0.7),
                C64::new(-2.0, 0.0),
            ],
        );
        let fast = eigenvalues(&h);
        let mut slow: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        slow.sort_by(f64::total_cmp);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenpair_residual_is_small() {
        let n = 7;
        let a = Matrix::from_fn(n, n, |i, j| {
            C64::new(((i * 5 + j * 3) % 7) as f64 - 3.0, ((i + 2 * j) % 4) as f64 - 1.5)
        });
        let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        let (l, x) = max_eigenpair(&h).unwrap();
        let xv = nalgebra::DVector::from_vec(x);
        let res = (&h * &xv - &xv * C64::new(l, 0.0)).norm();
        assert!(res <= 1e-10 * h.norm(), "residual {res}");
        let all = eigenvalues(&h);
        assert!((all[n - 1] - l).abs() < 1e-12);
    }
}
