//! Level-set test for the support function `g(θ) = λ_max(H_θ)`.
//!
//! `p(θ) = det(H_θ − U)` is a trigonometric polynomial of degree `n` in `θ`,
//! so `z^n p` is an ordinary polynomial of degree `2n` in `z = e^{iθ}`. The
//! level `U` is crossed by some eigenvalue exactly where `p` has a real root,
//! i.e. where that polynomial has a root on the unit circle. If there is none
//! and `U` exceeds `g` at one point, then `U > g` everywhere.

use std::f64::consts::TAU;

use super::Rotor;
use crate::algebra::schur::polynomial_roots;
use crate::algebra::C64;
use crate::error::Result;

/// Roots closer than this to the unit circle count as crossings.
pub const CIRCLE_BAND: f64 = 1e-6;
const TRIM_RELATIVE: f64 = 1e-13;

/// Angles where `det(H_θ − level)` may vanish. Empty means the level is
/// never crossed.
pub(crate) fn level_crossings(rotor: &mut Rotor<'_>, level: f64, scale: f64) -> Result<Vec<f64>> {
    let n = rotor.dim();
    let m = 2 * n + 2;
    let inv_scale = 1.0 / scale;
    let samples: Vec<f64> = (0..m)
        .map(|j| {
            let theta = TAU * j as f64 / m as f64;
            rotor
                .spectrum(theta)
                .iter()
                .map(|&l| (l - level) * inv_scale)
                .product()
        })
        .collect();

    // c_k for k = -n..=n, stored at index k + n.
    let mut coeffs = Vec::with_capacity(2 * n + 1);
    for k in -(n as i64)..=(n as i64) {
        let mut acc = C64::new(0.0, 0.0);
        for (j, &p) in samples.iter().enumerate() {
            let phase = -TAU * (k * j as i64) as f64 / m as f64;
            acc += C64::from_polar(p, phase);
        }
        coeffs.push(acc / m as f64);
    }

    let peak = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(Vec::new());
    }
    let cut = TRIM_RELATIVE * peak;
    while coeffs.last().is_some_and(|c| c.norm() <= cut) {
        coeffs.pop();
    }
    let low = coeffs.iter().take_while(|c| c.norm() <= cut).count();
    let coeffs = &coeffs[low..];
    if coeffs.len() <= 1 {
        return Ok(Vec::new());
    }
    let roots = polynomial_roots(coeffs)?;
    let mut angles: Vec<f64> = roots
        .iter()
        .filter(|z| (z.norm() - 1.0).abs() <= CIRCLE_BAND)
        .map(|z| z.arg().rem_euclid(TAU))
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}
