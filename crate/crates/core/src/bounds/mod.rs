//! Upper bounds for powers of the numerical radius.
//!
//! Each bound evaluates against a [`Profile`] and returns a [`BoundReport`]
//! whose `lhs` is `v(a)^p` from the enclosure upper end and whose `rhs` uses
//! enclosure upper ends for every radius it contains.

pub mod profile;
pub mod report;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, C64};
use crate::buzano::{alpha_weight, MeanFunction, Sides};
use crate::error::{Error, Result};
use crate::radius::RadiusEnclosure;
use crate::states::{state_apply, State};

pub use profile::{Profile, DEFAULT_MAX_POWER};
pub use report::{tightness, BoundReport, ParamValue, Term};

/// Relative slack for soundness and dominance checks.
pub const BOUND_SLACK: f64 = 1e-9;
/// `|v(a) − ‖a‖| / ‖a‖` below which the cross-radius equality is probed.
pub const EQUALITY_TRIGGER: f64 = 1e-10;
/// Relative tolerance of the probed equality `v(a*a²) = ‖a‖³`.
pub const EQUALITY_TOL: f64 = 1e-6;

pub const POWER_SUM: &str = "power_sum";
pub const POWER_SUM_CLOSED: &str = "power_sum_closed";
pub const CUBE: &str = "cube";
pub const CUBE_HALVES: &str = "cube_halves";
pub const CUBE_LIMIT: &str = "cube_limit";
pub const CUBE_MIXED: &str = "cube_mixed";
pub const CUBE_THIRDS: &str = "cube_thirds";
pub const CUBE_CROSS: &str = "cube_cross";
pub const SIXTH_POWER: &str = "sixth_power";
pub const SIXTH_POWER_PRESET: &str = "sixth_power_preset";
pub const TRIVIAL: &str = "trivial";

fn nonzero(z: C64, name: &'static str) -> Result<f64> {
    let m = z.norm();
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::ZeroParameter { name });
    }
    Ok(m)
}

fn lhs_power(p: &Profile, power: u32) -> Result<(f64, bool)> {
    let v = p.radius(1)?;
    Ok((v.upper.powi(power as i32), v.certified))
}

fn check_order(p: &Profile, n: u32) -> Result<()> {
    if n < 2 || n > p.max_power() {
        return Err(Error::InvalidArgument(format!(
            "power {n} outside 2..={}",
            p.max_power()
        )));
    }
    Ok(())
}

/// `vⁿ(a) ≤ Σ_{i<n} 2^{−i}‖aⁱ‖‖a‖^{n−i} + 2^{1−n} v(aⁿ)`.
pub fn power_sum_bound(p: &Profile, n: u32) -> Result<BoundReport> {
    check_order(p, n)?;
    let (lhs, lhs_cert) = lhs_power(p, n)?;
    let norm = p.norm();
    let mut terms = Vec::with_capacity(n as usize);
    for i in 1..n {
        terms.push(Term::new(
            &format!("norm_a^{i}*norm_a^{}", n - i),
            0.5f64.powi(i as i32),
            p.power_norm(i)? * norm.powi((n - i) as i32),
        ));
    }
    let vn = p.radius(n)?;
    terms.push(Term::new(&format!("v(a^{n})"), 0.5f64.powi(n as i32 - 1), vn.upper));
    Ok(BoundReport::new(POWER_SUM, n, lhs, terms, lhs_cert && vn.certified).param("n", n))
}

/// `vⁿ(a) ≤ (2^{n−1} − 1)^{−1} Σ_{i<n} 2^{n−i−1}‖a‖^{n−i}‖aⁱ‖`.
pub fn power_sum_closed_bound(p: &Profile, n: u32) -> Result<BoundReport> {
    check_order(p, n)?;
    let (lhs, cert) = lhs_power(p, n)?;
    let norm = p.norm();
    let denom = 2f64.powi(n as i32 - 1) - 1.0;
    let mut terms = Vec::with_capacity(n as usize - 1);
    for i in 1..n {
        terms.push(Term::new(
            &format!("norm_a^{}*norm_a^{i}", n - i),
            2f64.powi((n - i - 1) as i32) / denom,
            norm.powi((n - i) as i32) * p.power_norm(i)?,
        ));
    }
    Ok(BoundReport::new(POWER_SUM_CLOSED, n, lhs, terms, cert).param("n", n))
}

struct CubeFactors {
    square_sum: f64,
    square: f64,
    cube_radius: RadiusEnclosure,
}

fn cube_factors(p: &Profile) -> Result<CubeFactors> {
    Ok(CubeFactors {
        square_sum: p.square_sum_norm()? * p.norm(),
        square: p.power_norm(2)? * p.norm(),
        cube_radius: p.radius(3)?.clone(),
    })
}

/// `v³(a) ≤ m(α)/(2|α|)·X₂‖a‖ + m(β)/|αβ|·‖a²‖‖a‖ + v(a³)/|αβ|` with
/// `m(z) = max{1, |z − 1|}` and `X₂ = ‖|a*|² + |a|²‖`.
pub fn cube_bound(p: &Profile, alpha: C64, beta: C64) -> Result<BoundReport> {
    let ma = nonzero(alpha, "alpha")?;
    let mb = nonzero(beta, "beta")?;
    let (lhs, cert) = lhs_power(p, 3)?;
    let f = cube_factors(p)?;
    let terms = vec![
        Term::new("square_sum*norm_a", alpha_weight(alpha) / (2.0 * ma), f.square_sum),
        Term::new("norm_a2*norm_a", alpha_weight(beta) / (ma * mb), f.square),
        Term::new("v(a^3)", 1.0 / (ma * mb), f.cube_radius.upper),
    ];
    Ok(BoundReport::new(CUBE, 3, lhs, terms, cert && f.cube_radius.certified)
        .param("alpha", alpha)
        .param("beta", beta))
}

/// The four closed-form specializations of [`cube_bound`]: `α = β = 2`, the
/// limit `α = β → ∞`, the mixed `α = 2, β → ∞`, and the thirds form.
pub fn cube_presets(p: &Profile) -> Result<Vec<BoundReport>> {
    let (lhs, cert) = lhs_power(p, 3)?;
    let f = cube_factors(p)?;
    let halves = BoundReport::new(
        CUBE_HALVES,
        3,
        lhs,
        vec![
            Term::new("square_sum*norm_a", 0.25, f.square_sum),
            Term::new("norm_a2*norm_a", 0.25, f.square),
            Term::new("v(a^3)", 0.25, f.cube_radius.upper),
        ],
        cert && f.cube_radius.certified,
    );
    let limit = BoundReport::new(
        CUBE_LIMIT,
        3,
        lhs,
        vec![Term::new("square_sum*norm_a", 0.5, f.square_sum)],
        cert,
    );
    let mixed = BoundReport::new(
        CUBE_MIXED,
        3,
        lhs,
        vec![
            Term::new("square_sum*norm_a", 0.25, f.square_sum),
            Term::new("norm_a2*norm_a", 0.5, f.square),
        ],
        cert,
    );
    let thirds = BoundReport::new(
        CUBE_THIRDS,
        3,
        lhs,
        vec![
            Term::new("square_sum*norm_a", 1.0 / 3.0, f.square_sum),
            Term::new("norm_a2*norm_a", 1.0 / 3.0, f.square),
        ],
        cert,
    );
    Ok(vec![halves, limit, mixed, thirds])
}

/// `v³(a) ≤ (m(α)‖a‖³ + min{v(a*a²), v(a²a*)}) / |α|`.
///
/// The min uses both enclosure uppers; `extra.min_is_left` is 1 when
/// `v(a*a²)` attains it.
pub fn cube_cross_bound(p: &Profile, alpha: C64) -> Result<BoundReport> {
    let ma = nonzero(alpha, "alpha")?;
    let (lhs, cert) = lhs_power(p, 3)?;
    let left = p.left_cross_radius()?;
    let right = p.right_cross_radius()?;
    let left_wins = left.upper <= right.upper;
    let min = left.upper.min(right.upper);
    let terms = vec![
        Term::new("norm_a^3", alpha_weight(alpha) / ma, p.norm().powi(3)),
        Term::new(
            if left_wins { "v(a*a^2)" } else { "v(a^2a*)" },
            1.0 / ma,
            min,
        ),
    ];
    Ok(
        BoundReport::new(CUBE_CROSS, 3, lhs, terms, cert && left.certified && right.certified)
            .param("alpha", alpha)
            .extra("v_left_cross", left.upper)
            .extra("v_right_cross", right.upper)
            .extra("min_is_left", if left_wins { 1.0 } else { 0.0 }),
    )
}

/// Outcome of probing `v(a*a²) = v(a²a*) = ‖a‖³` when `v(a) = ‖a‖`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualityProbe {
    pub applicable: bool,
    pub holds: bool,
    /// `(‖a‖ − v(a)) / ‖a‖` from the enclosure lower end.
    pub radius_gap: f64,
    /// Worst `|v(a*a²) − ‖a‖³| / ‖a‖³` over the enclosure; absent when not
    /// applicable.
    pub left_deviation: Option<f64>,
    pub right_deviation: Option<f64>,
}

fn relative_deviation(enc: &RadiusEnclosure, target: f64) -> f64 {
    if target == 0.0 {
        return if enc.upper == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (enc.lower - target).abs().max((enc.upper - target).abs()) / target
}

pub fn cross_radius_equality_probe(p: &Profile) -> Result<EqualityProbe> {
    let norm = p.norm();
    let v = p.radius(1)?;
    let radius_gap = if norm == 0.0 { 0.0 } else { (norm - v.lower).max(0.0) / norm };
    if norm == 0.0 || radius_gap > EQUALITY_TRIGGER {
        return Ok(EqualityProbe {
            applicable: false,
            holds: true,
            radius_gap,
            left_deviation: None,
            right_deviation: None,
        });
    }
    let cube = norm.powi(3);
    let left_deviation = relative_deviation(p.left_cross_radius()?, cube);
    let right_deviation = relative_deviation(p.right_cross_radius()?, cube);
    Ok(EqualityProbe {
        applicable: true,
        holds: left_deviation <= EQUALITY_TOL && right_deviation <= EQUALITY_TOL,
        radius_gap,
        left_deviation: Some(left_deviation),
        right_deviation: Some(right_deviation),
    })
}

/// Parameters of the six-term `v⁶` family.
#[derive(Clone, Debug)]
pub struct SixthPowerParams {
    pub f1: MeanFunction,
    pub xi1: f64,
    pub f2: MeanFunction,
    pub xi2: f64,
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
}

impl SixthPowerParams {
    /// `f₁ = f₂ = identity`, `ξ₁ = ξ₂ = 0`, `α = β = γ = 2`.
    pub fn preset() -> Self {
        let two = C64::new(2.0, 0.0);
        Self {
            f1: MeanFunction::identity(),
            xi1: 0.0,
            f2: MeanFunction::identity(),
            xi2: 0.0,
            alpha: two,
            beta: two,
            gamma: two,
        }
    }
}

/// The six-term bound on `v⁶(a)` built from `X₄ = ‖|a*|⁴ + |a|⁴‖`,
/// `X₂ = ‖|a*|² + |a|²‖`, `‖a²‖`, `‖a‖` and `v(a³)`.
pub fn sixth_power_bound(p: &Profile, q: &SixthPowerParams) -> Result<BoundReport> {
    let ma = nonzero(q.alpha, "alpha")?;
    let mb = nonzero(q.beta, "beta")?;
    let mg = nonzero(q.gamma, "gamma")?;
    let (f1_xi, f1_rest) = q.f1.weights(q.xi1)?;
    let (f2_xi, f2_rest) = q.f2.weights(q.xi2)?;
    let (wa, wb, wg) = (alpha_weight(q.alpha), alpha_weight(q.beta), alpha_weight(q.gamma));
    let (lhs, cert) = lhs_power(p, 6)?;

    let norm = p.norm();
    let norm_sq = norm * norm;
    let x4 = p.fourth_sum_norm()?;
    let x2 = p.square_sum_norm()?;
    let n2 = p.power_norm(2)?;
    let v3 = p.radius(3)?;
    let ab2 = (ma * mb).powi(2);
    let lead = f1_xi + 2.0 * wa;
    let terms = vec![
        Term::new("fourth_sum*norm_a^2", wa * wa / (2.0 * ma * ma), x4 * norm_sq),
        Term::new("norm_a2^2*norm_a^2", f1_rest * wb * wb / ab2, n2 * n2 * norm_sq),
        Term::new("v(a^3)^2", f1_rest * f2_rest / ab2, v3.upper * v3.upper),
        Term::new(
            "norm_a2*norm_a*v(a^3)",
            f1_rest * (f2_xi + 2.0 * wb) / ab2,
            n2 * norm * v3.upper,
        ),
        Term::new(
            "square_sum*norm_a2*norm_a^2",
            lead * wg / (2.0 * ma * ma * mg),
            x2 * n2 * norm_sq,
        ),
        Term::new(
            "square_sum*norm_a*v(a^3)",
            lead / (2.0 * ma * ma * mg),
            x2 * norm * v3.upper,
        ),
    ];
    Ok(BoundReport::new(SIXTH_POWER, 6, lhs, terms, cert && v3.certified)
        .param("f1", q.f1.name())
        .param("xi1", q.xi1)
        .param("f2", q.f2.name())
        .param("xi2", q.xi2)
        .param("alpha", q.alpha)
        .param("beta", q.beta)
        .param("gamma", q.gamma))
}

/// The closed-form specialization of [`sixth_power_bound`] at
/// [`SixthPowerParams::preset`].
pub fn sixth_power_preset(p: &Profile) -> Result<BoundReport> {
    let (lhs, cert) = lhs_power(p, 6)?;
    let norm = p.norm();
    let norm_sq = norm * norm;
    let x4 = p.fourth_sum_norm()?;
    let x2 = p.square_sum_norm()?;
    let n2 = p.power_norm(2)?;
    let v3 = p.radius(3)?;
    let terms = vec![
        Term::new("fourth_sum*norm_a^2", 0.125, x4 * norm_sq),
        Term::new("norm_a2^2*norm_a^2", 0.0625, n2 * n2 * norm_sq),
        Term::new("v(a^3)^2", 0.0625, v3.upper * v3.upper),
        Term::new("norm_a2*norm_a*v(a^3)", 0.125, n2 * norm * v3.upper),
        Term::new("square_sum*norm_a2*norm_a^2", 0.125, x2 * n2 * norm_sq),
        Term::new("square_sum*norm_a*v(a^3)", 0.125, x2 * norm * v3.upper),
    ];
    Ok(BoundReport::new(SIXTH_POWER_PRESET, 6, lhs, terms, cert && v3.certified))
}

/// The baseline `v(a)^p ≤ ‖a‖^p`.
pub fn trivial_bound(p: &Profile, power: u32) -> Result<BoundReport> {
    let (lhs, cert) = lhs_power(p, power)?;
    let terms = vec![Term::new("norm_a^p", 1.0, p.norm().powi(power as i32))];
    Ok(BoundReport::new(TRIVIAL, power, lhs, terms, cert))
}

/// Whether a bound improves on `‖a‖^p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceCheck {
    pub bound_id: String,
    pub power: u32,
    pub rhs: f64,
    pub trivial: f64,
    pub holds: bool,
}

/// `rhs ≤ ‖a‖^p (1 + 1e−9)`.
pub fn dominance_check(report: &BoundReport, norm: f64) -> DominanceCheck {
    let trivial = norm.powi(report.power as i32);
    DominanceCheck {
        bound_id: report.bound_id.clone(),
        power: report.power,
        rhs: report.rhs,
        trivial,
        holds: report.rhs <= trivial + BOUND_SLACK * trivial,
    }
}

/// The state-level inequality behind [`power_sum_bound`]:
/// `|φ(a)|ⁿ ≤ Σ_{i<n} 2^{−i} √φ(|aⁱ|²) √φ(|a*|²)^{n−i} + 2^{1−n}|φ(aⁿ)|`.
pub fn power_sum_state_sides(a: &AlgebraElement, phi: &State, n: u32) -> Result<Sides> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("power {n} below 2")));
    }
    let lhs = state_apply(phi, a)?.norm().powi(n as i32);
    let adj_sq = state_apply(phi, &a.adjoint_abs_square())?.re.max(0.0);
    let mut terms = Vec::with_capacity(n as usize);
    let mut ai = a.clone();
    for i in 1..n {
        let abs_sq = state_apply(phi, &ai.abs_square())?.re.max(0.0);
        terms.push(Term::new(
            &format!("phi_abs_a^{i}"),
            0.5f64.powi(i as i32),
            abs_sq.sqrt() * adj_sq.powi((n - i) as i32).sqrt(),
        ));
        ai = ai.mul(a);
    }
    terms.push(Term::new(
        &format!("phi(a^{n})"),
        0.5f64.powi(n as i32 - 1),
        state_apply(phi, &ai)?.norm(),
    ));
    let rhs = terms.iter().map(|t| t.value).sum();
    Ok(Sides { lhs, rhs, terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-11;

    fn profile(a: AlgebraElement) -> Profile {
        Profile::new(a, TOL).unwrap()
    }

    fn nilpotent() -> Profile {
        profile(AlgebraElement::jordan_block(2))
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn power_sum_examples() {
        let r = power_sum_bound(&profile(AlgebraElement::identity(2)), 2).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-10 && (r.rhs - 1.0).abs() < 1e-14);
        let r = power_sum_bound(&nilpotent(), 2).unwrap();
        assert!((r.lhs - 0.25).abs() < 1e-10);
        assert!((r.rhs - 0.5).abs() < 1e-14);
        let r = power_sum_bound(&profile(AlgebraElement::zero(3)), 4).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert_eq!(r.tightness, 1.0);
        assert!(power_sum_bound(&nilpotent(), 9).is_err());
        assert!(power_sum_bound(&nilpotent(), 1).is_err());
    }

    #[test]
    fn closed_power_sum_examples() {
        let r = power_sum_closed_bound(&profile(AlgebraElement::identity(2)), 2).unwrap();
        assert!((r.rhs - 1.0).abs() < 1e-15);
        let r = power_sum_closed_bound(&nilpotent(), 3).unwrap();
        assert!((r.rhs - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.lhs - 0.125).abs() < 1e-10);
        assert_eq!(power_sum_closed_bound(&profile(AlgebraElement::zero(2)), 5).unwrap().rhs, 0.0);
    }

    #[test]
    fn cube_examples() {
        let two = c(2.0, 0.0);
        let r = cube_bound(&profile(AlgebraElement::identity(2)), two, two).unwrap();
        assert!((r.rhs - 1.0).abs() < 1e-14);
        let r = cube_bound(&nilpotent(), two, two).unwrap();
        assert!((r.rhs - 0.25).abs() < 1e-14);
        assert!((r.lhs - 0.125).abs() < 1e-10);
        let big = c(1e6, 0.0);
        let r = cube_bound(&profile(AlgebraElement::identity(2)), big, big).unwrap();
        assert!((r.rhs - 1.0).abs() < 1e-5);
        assert!(matches!(
            cube_bound(&nilpotent(), C64::new(0.0, 0.0), two),
            Err(Error::ZeroParameter { name: "alpha" })
        ));
    }

    #[test]
    fn cube_preset_examples() {
        let id = cube_presets(&profile(AlgebraElement::identity(3))).unwrap();
        let ids: Vec<&str> = id.iter().map(|r| r.bound_id.as_str()).collect();
        assert_eq!(ids, [CUBE_HALVES, CUBE_LIMIT, CUBE_MIXED, CUBE_THIRDS]);
        assert!(id.iter().all(|r| r.rhs >= 1.0 - 1e-15));
        assert!((id[0].rhs - 1.0).abs() < 1e-10);
        let nil = cube_presets(&nilpotent()).unwrap();
        assert!((nil[1].rhs - 0.5).abs() < 1e-15);
        assert!((nil[3].rhs - 1.0 / 3.0).abs() < 1e-15);
        let zero = cube_presets(&profile(AlgebraElement::zero(2))).unwrap();
        assert!(zero.iter().all(|r| r.rhs == 0.0));
    }

    #[test]
    fn cube_cross_examples() {
        let two = c(2.0, 0.0);
        let r = cube_cross_bound(&profile(AlgebraElement::identity(2)), two).unwrap();
        assert!((r.rhs - 1.0).abs() < 1e-10);
        let r = cube_cross_bound(&nilpotent(), two).unwrap();
        assert!((r.rhs - 0.5).abs() < 1e-15);
        assert!(r.holds_within(BOUND_SLACK));
    }

    #[test]
    fn equality_probe_examples() {
        let probe = cross_radius_equality_probe(&profile(AlgebraElement::identity(2))).unwrap();
        assert!(probe.applicable && probe.holds);
        let a = AlgebraElement::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        let probe = cross_radius_equality_probe(&profile(a)).unwrap();
        assert!(!probe.applicable);
        assert!((probe.radius_gap - 0.5).abs() < 1e-9);
    }

    #[test]
    fn sixth_power_examples() {
        let q = SixthPowerParams::preset();
        let r = sixth_power_bound(&profile(AlgebraElement::identity(2)), &q).unwrap();
        assert!((r.rhs - 1.0).abs() < 1e-14);
        let r = sixth_power_bound(&nilpotent(), &q).unwrap();
        assert!((r.rhs - 0.125).abs() < 1e-15);
        assert!((r.lhs - 1.0 / 64.0).abs() < 1e-10);
        assert_eq!(sixth_power_bound(&profile(AlgebraElement::zero(2)), &q).unwrap().rhs, 0.0);
        let bad = SixthPowerParams { xi1: 1.3, ..SixthPowerParams::preset() };
        assert!(matches!(
            sixth_power_bound(&nilpotent(), &bad),
            Err(Error::XiOutOfDomain { .. })
        ));
        let bad = SixthPowerParams { gamma: c(0.0, 0.0), ..SixthPowerParams::preset() };
        assert!(matches!(
            sixth_power_bound(&nilpotent(), &bad),
            Err(Error::ZeroParameter { name: "gamma" })
        ));
    }

    #[test]
    fn sixth_power_preset_matches_family() {
        for a in [
            AlgebraElement::identity(2),
            AlgebraElement::jordan_block(3),
            AlgebraElement::from_real_rows(&[&[1.0, 2.0], &[-0.5, 0.3]]).unwrap(),
        ] {
            let p = profile(a);
            let fam = sixth_power_bound(&p, &SixthPowerParams::preset()).unwrap();
            let pre = sixth_power_preset(&p).unwrap();
            assert!((fam.rhs - pre.rhs).abs() <= 1e-14 * fam.rhs.max(1e-300));
        }
    }

    #[test]
    fn dominance_examples() {
        let id = profile(AlgebraElement::identity(2));
        assert!(dominance_check(&power_sum_bound(&id, 3).unwrap(), id.norm()).holds);
        let nil = nilpotent();
        let d = dominance_check(&sixth_power_preset(&nil).unwrap(), nil.norm());
        assert!(d.holds && (d.rhs - 0.125).abs() < 1e-15 && d.trivial == 1.0);
    }

    #[test]
    fn state_sides_hold_on_mixed_state() {
        let a = AlgebraElement::from_real_rows(&[&[0.2, 1.0, 0.0], &[0.0, -0.4, 0.7], &[0.3, 0.0, 0.1]])
            .unwrap();
        let phi = State::maximally_mixed(3);
        for n in 2..=6 {
            let s = power_sum_state_sides(&a, &phi, n).unwrap();
            assert!(s.holds_within(1e-12), "n={n}: {} > {}", s.lhs, s.rhs);
        }
    }
}
