//! Certified numerical radius.
//!
//! `v(a) = max_θ g(θ)` with `g(θ) = λ_max((e^{iθ}a + e^{−iθ}a*)/2)`, the
//! support function of the numerical range. The solver brackets the maximum
//! on a uniform grid, refines with golden-section search, and closes the
//! enclosure with one of two upper bounds:
//!
//! * support lines: between two sample angles the range lies in the wedge cut
//!   out by the two supporting lines, which bounds `g` on the whole interval
//!   (tighter than the Lipschitz bound `‖a‖·|Δθ|`, which is also applied);
//! * a level-set test ([`levelset`]) proving `g < U` everywhere for
//!   `U = lower + tol/2`, which handles disk-like ranges where `g` is nearly
//!   flat and sampling alone converges slowly.
//!
//! If neither closes the gap within the evaluation budget, the enclosure is
//! returned with `certified = false`.

mod golden;
pub mod levelset;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::algebra::{hermitian, AlgebraElement, Matrix, C64};
use crate::bounds::report::{BoundReport, Term};
use crate::error::{Error, Result};

pub use golden::golden_max;

/// Smallest accepted solver tolerance.
pub const MIN_TOL: f64 = 1e-12;
/// Relative slack for the norm sandwich `‖a‖/2 ≤ v(a) ≤ ‖a‖`.
pub const SANDWICH_SLACK: f64 = 1e-9;

const GOLDEN_XTOL: f64 = 1e-7;
const GOLDEN_MAX_ITER: usize = 80;
const REFINED_BRACKETS: usize = 3;
const LEVEL_SET_ROUNDS: usize = 8;
const BISECTION_BUDGET: usize = 20_000;

/// How the upper end of an enclosure was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Closed form (zero element or `1×1`).
    Exact,
    SupportLines,
    LevelSet,
    /// Best effort; the width target was not reached.
    None,
}

/// A certified interval `[lower, upper]` containing `v(a)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusEnclosure {
    pub lower: f64,
    pub upper: f64,
    pub argmax_theta: f64,
    /// Unit vector with `|w* a w| = lower`.
    pub witness: Vec<C64>,
    pub certified: bool,
    pub certificate: Certificate,
    pub evaluations: usize,
}

impl RadiusEnclosure {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    fn exact(value: f64, theta: f64, witness: Vec<C64>) -> Self {
        Self {
            lower: value,
            upper: value,
            argmax_theta: theta,
            witness,
            certified: true,
            certificate: Certificate::Exact,
            evaluations: 0,
        }
    }
}

/// Solver settings. `grid` overrides the automatic grid size.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub grid: Option<usize>,
    pub bisection_budget: usize,
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            grid: None,
            bisection_budget: BISECTION_BUDGET,
        }
    }
}

/// Grid size for the bracketing pass.
pub fn grid_size(dim: usize) -> usize {
    (4 * dim).clamp(16, 2048)
}

/// Evaluates `g(θ)` and related spectra for one element, reusing a buffer.
pub(crate) struct Rotor<'a> {
    a: &'a Matrix,
    buf: Matrix,
    evaluations: usize,
}

impl<'a> Rotor<'a> {
    pub(crate) fn new(a: &'a Matrix) -> Self {
        let n = a.nrows();
        Self {
            a,
            buf: Matrix::zeros(n, n),
            evaluations: 0,
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn fill(&mut self, theta: f64) {
        let e = C64::from_polar(0.5, theta);
        let n = self.a.nrows();
        for i in 0..n {
            for j in 0..n {
                self.buf[(i, j)] = e * self.a[(i, j)] + (e * self.a[(j, i)]).conj();
            }
        }
        for i in 0..n {
            self.buf[(i, i)].im = 0.0;
        }
        self.evaluations += 1;
    }

    pub(crate) fn g(&mut self, theta: f64) -> f64 {
        self.fill(theta);
        *hermitian::eigenvalues(&self.buf).last().expect("nonempty")
    }

    pub(crate) fn spectrum(&mut self, theta: f64) -> Vec<f64> {
        self.fill(theta);
        hermitian::eigenvalues(&self.buf)
    }

    fn eigenpair(&mut self, theta: f64) -> Result<(f64, Vec<C64>)> {
        self.fill(theta);
        hermitian::max_eigenpair(&self.buf)
    }
}

/// `λ_max((e^{iθ}a + e^{−iθ}a*)/2)`.
pub fn rotated_part_max(a: &AlgebraElement, theta: f64) -> Result<f64> {
    Ok(Rotor::new(a.matrix()).g(theta))
}

/// Upper bound for `g` on `[ti, tj]` from the two supporting lines and from
/// the Lipschitz constant `lip`.
fn interval_bound(ti: f64, gi: f64, tj: f64, gj: f64, lip: f64) -> f64 {
    let d = tj - ti;
    let lipschitz = 0.5 * (gi + gj + lip * d);
    if d <= 0.0 || d >= 0.9 * PI {
        return lipschitz;
    }
    let (s, c) = d.sin_cos();
    let slope_left = gj - c * gi;
    let slope_right = c * gj - gi;
    let support = if slope_left > 0.0 && slope_right < 0.0 {
        let h = (0.5 * d).sin();
        ((gi - gj) * (gi - gj) + 4.0 * gi * gj * h * h).max(0.0).sqrt() / s
    } else {
        gi.max(gj)
    };
    support.min(lipschitz)
}

#[derive(Clone, Copy, PartialEq)]
struct Interval {
    bound: f64,
    ti: f64,
    gi: f64,
    tj: f64,
    gj: f64,
}

impl Eq for Interval {}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound)
    }
}

/// Certified enclosure of `v(a)` with `upper − lower ≤ tol·max(1, ‖a‖)`.
pub fn numerical_radius(a: &AlgebraElement, tol: f64) -> Result<RadiusEnclosure> {
    numerical_radius_with(a, &SolverOptions::with_tol(tol))
}

pub fn numerical_radius_with(a: &AlgebraElement, opts: &SolverOptions) -> Result<RadiusEnclosure> {
    if !(opts.tol >= MIN_TOL) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {} is below the minimum {MIN_TOL:e}",
            opts.tol
        )));
    }
    let n = a.dim();
    let m = a.matrix();
    if a.is_zero() {
        let mut w = vec![C64::new(0.0, 0.0); n];
        w[0] = C64::new(1.0, 0.0);
        return Ok(RadiusEnclosure::exact(0.0, 0.0, w));
    }
    if n == 1 {
        let c = m[(0, 0)];
        let theta = (-c.arg()).rem_euclid(TAU);
        return Ok(RadiusEnclosure::exact(c.norm(), theta, vec![C64::new(1.0, 0.0)]));
    }

    let norm = a.operator_norm()?;
    let target = opts.tol * norm.max(1.0);
    let lip = norm * (1.0 + 1e-12);
    let guard = 8.0 * n as f64 * f64::EPSILON * norm;
    let mut rotor = Rotor::new(m);

    let grid_n = opts.grid.unwrap_or_else(|| grid_size(n)).max(8);
    let step = TAU / grid_n as f64;
    let thetas: Vec<f64> = (0..grid_n).map(|k| k as f64 * step).collect();
    let values: Vec<f64> = thetas.iter().map(|&t| rotor.g(t)).collect();

    let mut best = (0.0, f64::NEG_INFINITY);
    for (&t, &g) in thetas.iter().zip(&values) {
        if g > best.1 {
            best = (t, g);
        }
    }

    // Refine the strongest local maxima that could still beat the incumbent.
    let mut peaks: Vec<usize> = (0..grid_n)
        .filter(|&k| {
            let prev = values[(k + grid_n - 1) % grid_n];
            let next = values[(k + 1) % grid_n];
            values[k] >= prev && values[k] >= next
        })
        .collect();
    peaks.sort_by(|&x, &y| values[y].total_cmp(&values[x]));
    for &k in peaks.iter().take(REFINED_BRACKETS) {
        let lo = thetas[k] - step;
        let hi = thetas[k] + step;
        let glo = values[(k + grid_n - 1) % grid_n];
        let ghi = values[(k + 1) % grid_n];
        let reach = interval_bound(lo, glo, thetas[k], values[k], lip)
            .max(interval_bound(thetas[k], values[k], hi, ghi, lip));
        if reach <= best.1 {
            continue;
        }
        let (t, g) = golden_max(|t| rotor.g(t), lo, hi, GOLDEN_XTOL, GOLDEN_MAX_ITER);
        if g > best.1 {
            best = (t, g);
        }
    }

    let mut lower = best.1;
    let sample_bound = (0..grid_n)
        .map(|k| {
            let j = (k + 1) % grid_n;
            let tj = if j == 0 { TAU } else { thetas[j] };
            interval_bound(thetas[k], values[k], tj, values[j], lip)
        })
        .fold(f64::NEG_INFINITY, f64::max)
        + guard;

    let mut upper = sample_bound;
    let mut certificate = Certificate::None;
    if upper - lower <= target {
        certificate = Certificate::SupportLines;
    } else {
        let scale = norm.max(lower.abs());
        for _ in 0..LEVEL_SET_ROUNDS {
            let level = lower + 0.5 * target;
            let crossings = levelset::level_crossings(&mut rotor, level, scale)?;
            if crossings.is_empty() {
                upper = level.min(sample_bound);
                certificate = Certificate::LevelSet;
                break;
            }
            let (t, g) = refine_crossings(&mut rotor, &crossings, level, step);
            if g > best.1 {
                best = (t, g);
                lower = g;
            }
            if g < level {
                break;
            }
        }
    }

    if certificate == Certificate::None {
        let mut heap = BinaryHeap::with_capacity(2 * grid_n);
        for k in 0..grid_n {
            let j = (k + 1) % grid_n;
            let tj = if j == 0 { TAU } else { thetas[j] };
            let (gi, gj) = (values[k], values[j]);
            heap.push(Interval {
                bound: interval_bound(thetas[k], gi, tj, gj, lip),
                ti: thetas[k],
                gi,
                tj,
                gj,
            });
        }
        let mut spent = 0;
        while let Some(top) = heap.peek().copied() {
            if top.bound + guard - best.1 <= target {
                upper = top.bound + guard;
                certificate = Certificate::SupportLines;
                break;
            }
            if spent >= opts.bisection_budget {
                upper = (top.bound + guard).min(upper);
                break;
            }
            heap.pop();
            let tm = 0.5 * (top.ti + top.tj);
            let gm = rotor.g(tm);
            spent += 1;
            if gm > best.1 {
                best = (tm, gm);
            }
            heap.push(Interval {
                bound: interval_bound(top.ti, top.gi, tm, gm, lip),
                ti: top.ti,
                gi: top.gi,
                tj: tm,
                gj: gm,
            });
            heap.push(Interval {
                bound: interval_bound(tm, gm, top.tj, top.gj, lip),
                ti: tm,
                gi: gm,
                tj: top.tj,
                gj: top.gj,
            });
        }
    }

    let theta = best.0.rem_euclid(TAU);
    let (_, witness) = rotor.eigenpair(theta)?;
    let w = nalgebra::DVector::from_column_slice(&witness);
    let quad = w.dotc(&(m * &w)).norm();
    let lower = quad.max(best.1);
    let upper = upper.max(lower);
    Ok(RadiusEnclosure {
        lower,
        upper,
        argmax_theta: theta,
        witness,
        certified: certificate != Certificate::None,
        certificate,
        evaluations: rotor.evaluations,
    })
}

/// Maximizes `g` around level crossings: in a window around each crossing
/// and over every arc between consecutive crossings whose midpoint is above
/// the level.
fn refine_crossings(rotor: &mut Rotor<'_>, crossings: &[f64], level: f64, window: f64) -> (f64, f64) {
    let mut best = (crossings[0], f64::NEG_INFINITY);
    let k = crossings.len();
    for (i, &t) in crossings.iter().enumerate() {
        let (tw, gw) = golden_max(|s| rotor.g(s), t - window, t + window, GOLDEN_XTOL, GOLDEN_MAX_ITER);
        if gw > best.1 {
            best = (tw, gw);
        }
        let next = if i + 1 < k { crossings[i + 1] } else { crossings[0] + TAU };
        if next - t > 2.0 * window {
            let mid = 0.5 * (t + next);
            if rotor.g(mid) > level {
                let (ta, ga) = golden_max(|s| rotor.g(s), t, next, GOLDEN_XTOL, GOLDEN_MAX_ITER);
                if ga > best.1 {
                    best = (ta, ga);
                }
            }
        }
    }
    best
}

/// Checks `‖a‖/2 ≤ v(a) ≤ ‖a‖` with slack `1e−9·‖a‖`.
///
/// `lhs` is the enclosure upper end and `rhs` is `‖a‖`; the report's
/// `extra` map carries `lower_margin = v_lower − ‖a‖/2` and
/// `upper_margin = ‖a‖ − v_upper` plus a `holds` flag (1 or 0).
pub fn check_norm_sandwich(a: &AlgebraElement, tol: f64) -> Result<BoundReport> {
    let norm = a.operator_norm()?;
    let enc = numerical_radius(a, tol)?;
    Ok(sandwich_report(norm, &enc))
}

pub(crate) fn sandwich_report(norm: f64, enc: &RadiusEnclosure) -> BoundReport {
    let lower_margin = enc.lower - 0.5 * norm;
    let upper_margin = norm - enc.upper;
    let slack = SANDWICH_SLACK * norm;
    let holds = lower_margin >= -slack && upper_margin >= -slack;
    BoundReport::new(
        "sandwich",
        1,
        enc.upper,
        vec![Term::new("norm", 1.0, norm)],
        enc.certified,
    )
    .extra("lower_margin", lower_margin)
    .extra("upper_margin", upper_margin)
    .extra("ratio", if norm > 0.0 { enc.midpoint() / norm } else { 1.0 })
    .extra("holds", if holds { 1.0 } else { 0.0 })
}
