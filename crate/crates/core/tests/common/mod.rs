//! Dense-grid numerical radius oracle, independent of the library solver:
//! it maximizes the top eigenvalue of the real symmetric embedding of
//! `Re(e^{iθ}a)` over a fine grid and refines the best cell.

use nalgebra::DMatrix;
use numrad_core::{Matrix, C64};

/// Largest eigenvalue of `Re(e^{iθ}a)` through the `2n × 2n` real embedding
/// `[[R, −I], [I, R]]` of the Hermitian matrix `R + iI`.
fn rotated_max(a: &Matrix, theta: f64) -> f64 {
    let n = a.nrows();
    let e = C64::from_polar(1.0, theta);
    let h = (a * e + a.adjoint() * e.conj()) * C64::new(0.5, 0.0);
    let real = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let z = h[(i % n, j % n)];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    real.symmetric_eigenvalues().max()
}

/// Dense grid followed by golden-section refinement of the best cell.
pub fn dense_oracle(a: &Matrix) -> f64 {
    let grid = 4096;
    let step = std::f64::consts::TAU / grid as f64;
    let (best, _) = (0..grid)
        .map(|k| (k, rotated_max(a, k as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = ((best as f64 - 1.0) * step, (best as f64 + 1.0) * step);
    for _ in 0..100 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if rotated_max(a, x1) < rotated_max(a, x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    rotated_max(a, 0.5 * (lo + hi))
}
