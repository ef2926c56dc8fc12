//! General complex eigenvalues via Hessenberg reduction and shifted QR
//! (nalgebra's complex Schur form), plus polynomial roots through the
//! companion matrix.

use nalgebra::Schur;

use super::{Matrix, C64, ZERO};
use crate::error::{Error, Result};

const ITERATION_CAP_PER_DIM: usize = 100;

/// All eigenvalues of a square complex matrix, with multiplicity.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<C64>> {
    let n = m.nrows();
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![m[(0, 0)]]),
        _ => {}
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(vec![ZERO; n]);
    }
    let cap = ITERATION_CAP_PER_DIM * n;
    if let Some(ev) = schur_diagonal(m.clone(), cap) {
        return Ok(ev);
    }
    // Shifted QR can cycle on highly symmetric inputs such as cyclic
    // permutations. A fixed generic unitary similarity breaks the symmetry
    // without changing the spectrum.
    let q = scrambling_unitary(n);
    let conjugated = q.adjoint() * m * &q;
    schur_diagonal(conjugated, cap).ok_or(Error::NonConvergence {
        routine: "complex Schur iteration",
        iterations: cap,
    })
}

fn schur_diagonal(m: Matrix, cap: usize) -> Option<Vec<C64>> {
    let n = m.nrows();
    let (_, t) = Schur::try_new(m, f64::EPSILON, cap)?.unpack();
    Some((0..n).map(|i| t[(i, i)]).collect())
}

fn scrambling_unitary(n: usize) -> Matrix {
    let g = Matrix::from_fn(n, n, |i, j| {
        let t = (i * n + j) as f64;
        C64::new((1.3 * t + 0.7).sin(), (2.9 * t + 0.1).cos())
    });
    g.qr().q()
}

/// Roots of `Σ coeffs[k] z^k`. Leading zeros are trimmed by the caller.
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    if lead == ZERO {
        return Err(Error::InvalidArgument("leading coefficient is zero".into()));
    }
    let mut comp = Matrix::zeros(deg, deg);
    for j in 0..deg {
        comp[(0, j)] = -coeffs[deg - 1 - j] / lead;
    }
    for i in 1..deg {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    eigenvalues(&comp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_unity() {
        // z^4 - 1
        let c = [
            C64::new(-1.0, 0.0),
            ZERO,
            ZERO,
            ZERO,
            C64::new(1.0, 0.0),
        ];
        let roots = polynomial_roots(&c).unwrap();
        assert_eq!(roots.len(), 4);
        for r in roots {
            assert!((r.norm() - 1.0).abs() < 1e-13);
            assert!((r.powi(4) - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn quadratic_roots() {
        // (z - 2)(z - 0.5i) = z^2 - (2 + 0.5i) z + i
        let c = [C64::new(0.0, 1.0), C64::new(-2.0, -0.5), C64::new(1.0, 0.0)];
        let mut roots = polynomial_roots(&c).unwrap();
        roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        assert!((roots[0] - C64::new(0.0, 0.5)).norm() < 1e-13);
        assert!((roots[1] - C64::new(2.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn backward_error_is_small() {
        let n = 12;
        let a = Matrix::from_fn(n, n, |i, j| {
            C64::new(((i * 7 + j * 11) % 13) as f64 - 6.0, ((3 * i + j) % 5) as f64 - 2.0)
        });
        let ev = eigenvalues(&a).unwrap();
        let norm = a.norm();
        for l in ev {
            let shifted = &a - Matrix::identity(n, n) * l;
            let smin = shifted.singular_values().min();
            assert!(smin <= 1e-10 * norm, "sigma_min {smin}");
        }
    }
}
