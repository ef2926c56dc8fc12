//! Trial evaluation and order-independent aggregation.
//!
//! Trials are addressed by `(ensemble index, trial index)` and draw only from
//! their own streams. Workers fold fixed-size chunks of the trial list and the
//! chunk accumulators are merged in list order, so the report does not depend
//! on the worker count.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::io::MatrixJson;
use crate::algebra::{AlgebraElement, C64};
use crate::bounds::{
    cross_radius_equality_probe, cube_bound, cube_cross_bound, cube_presets, dominance_check,
    power_sum_bound, power_sum_closed_bound, power_sum_state_sides, sixth_power_bound,
    sixth_power_preset, tightness, BoundReport, Profile, SixthPowerParams, EQUALITY_TOL,
    EQUALITY_TRIGGER,
};
use crate::buzano::{MeanFunction, Pairings, Sides};
use crate::error::{Error, Result};
use crate::harness::config::{CampaignConfig, GridMode, OutputConfig, Parameters, StateChoice, Suite, Tolerances};
use crate::harness::ensembles::{sample_element, sample_module_tuple, sample_state, EnsembleSpec, StateKind};
use crate::harness::rng::{trial_stream, Purpose};
use crate::states::{cauchy_schwarz_gap, ModuleElement, State};

pub const HISTOGRAM_BUCKETS: usize = 20;
/// `|v(a) − r(a)| / ‖a‖` allowed when `v(a) = ‖a‖`.
pub const SPECTRAL_TOL: f64 = 1e-6;
const CHUNK: usize = 32;

/// One evaluated inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub id: String,
    pub params: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// False when the hypothesis of a conditional check did not hold.
    pub applicable: bool,
    pub certified: bool,
}

impl Check {
    fn new(suite: Suite, id: &str, params: String, lhs: f64, rhs: f64, pass: bool, certified: bool) -> Self {
        Self {
            suite,
            id: id.to_string(),
            params,
            lhs,
            rhs,
            pass,
            applicable: true,
            certified,
        }
    }

    /// `lhs ≤ rhs + slack·max(1, rhs)`.
    fn inequality(suite: Suite, id: &str, params: String, lhs: f64, rhs: f64, slack: f64, certified: bool) -> Self {
        let pass = rhs - lhs >= -slack * rhs.max(1.0);
        Self::new(suite, id, params, lhs, rhs, pass, certified)
    }

    fn from_report(suite: Suite, r: &BoundReport, params: String, slack: f64) -> Self {
        Self::inequality(suite, &r.bound_id, params, r.lhs, r.rhs, slack, r.certified)
    }

    fn from_sides(suite: Suite, id: &str, params: String, s: &Sides, slack: f64) -> Self {
        Self::inequality(suite, id, params, s.lhs, s.rhs, slack, true)
    }

    /// `lhs ≤ rhs` where `lhs` is a relative disagreement.
    fn agreement(suite: Suite, id: &str, params: String, a: f64, b: f64, tol: f64) -> Self {
        let scale = a.abs().max(b.abs());
        let dev = if scale == 0.0 { 0.0 } else { (a - b).abs() / scale };
        Self::new(suite, id, params, dev, tol, dev <= tol, true)
    }

    fn not_applicable(suite: Suite, id: &str) -> Self {
        Self {
            applicable: false,
            ..Self::new(suite, id, String::new(), 0.0, 0.0, true, true)
        }
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn relative_margin(&self) -> f64 {
        self.margin() / self.rhs.abs().max(1.0)
    }

    pub fn tightness(&self) -> f64 {
        tightness(self.lhs, self.rhs)
    }
}

/// Sharpest member of one bound family on one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct Ranked {
    pub key: String,
    pub power: u32,
    pub tightness: f64,
}

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub element: AlgebraElement,
    pub checks: Vec<Check>,
    pub ranked: Vec<Ranked>,
}

/// Everything a trial needs besides its address.
#[derive(Clone, Debug)]
pub struct TrialSettings<'a> {
    pub seed: u64,
    pub suites: &'a [Suite],
    pub tolerances: &'a Tolerances,
    pub parameters: &'a Parameters,
}

impl<'a> TrialSettings<'a> {
    pub fn from_config(cfg: &'a CampaignConfig) -> Self {
        Self {
            seed: cfg.seed,
            suites: &cfg.suites,
            tolerances: &cfg.tolerances,
            parameters: &cfg.parameters,
        }
    }
}

fn c(z: C64) -> String {
    format!("{z}")
}

fn rank(ranked: &mut Vec<Ranked>, key: String, power: u32, t: f64) {
    match ranked.iter_mut().find(|r| r.key == key) {
        Some(r) => {
            if t > r.tightness {
                r.tightness = t;
            }
        }
        None => ranked.push(Ranked { key, power, tightness: t }),
    }
}

fn state_kind(choice: StateChoice, trial: u32) -> StateKind {
    match choice {
        StateChoice::HilbertSchmidt => StateKind::HilbertSchmidt,
        StateChoice::Pure => StateKind::Pure,
        StateChoice::Alternate if trial.is_multiple_of(2) => StateKind::HilbertSchmidt,
        StateChoice::Alternate => StateKind::Pure,
    }
}

struct ModuleDraw {
    pairings: Pairings,
    pair: Pairings,
    phi: State,
    xs: Vec<ModuleElement>,
    alphas: Vec<C64>,
    rows: usize,
}

impl ModuleDraw {
    fn sample(s: &TrialSettings, dim: usize, ensemble: u32, trial: u32) -> Result<Self> {
        let p = s.parameters;
        let mut prng = trial_stream(s.seed, Purpose::Parameters, ensemble, trial);
        let rows = p.module_rows[prng.random_range(0..p.module_rows.len())];
        let k = p.tuple_sizes[prng.random_range(0..p.tuple_sizes.len())];
        let mut alphas = p.module_alphas.clone();
        if let Some([lo, hi]) = p.alpha_annulus {
            let r = if lo < hi { prng.random_range(lo..=hi) } else { lo };
            let t = prng.random_range(0.0..std::f64::consts::TAU);
            alphas.push(C64::from_polar(r, t));
        }
        let phi = sample_state(
            dim,
            state_kind(p.states, trial),
            &mut trial_stream(s.seed, Purpose::State, ensemble, trial),
        )?;
        let (xs, z) = sample_module_tuple(
            dim,
            rows,
            k,
            &phi,
            &mut trial_stream(s.seed, Purpose::Module, ensemble, trial),
        )?;
        let pairings = Pairings::compute(&phi, &xs, &z)?;
        let pair = Pairings {
            with_z: pairings.with_z[..2].to_vec(),
            norms_sq: pairings.norms_sq[..2].to_vec(),
            first_pair: pairings.first_pair,
        };
        Ok(Self {
            pairings,
            pair,
            phi,
            xs,
            alphas,
            rows,
        })
    }

    fn shape(&self) -> String {
        format!("m={},k={}", self.rows, self.xs.len())
    }
}

pub fn parameter_tuples(p: &Parameters, arity: usize) -> Vec<Vec<C64>> {
    match p.grid {
        GridMode::Diagonal => p.alphas.iter().map(|&a| vec![a; arity]).collect(),
        GridMode::Product => {
            let mut out: Vec<Vec<C64>> = vec![vec![]];
            for _ in 0..arity {
                out = out
                    .into_iter()
                    .flat_map(|t| {
                        p.alphas.iter().map(move |&a| {
                            let mut t = t.clone();
                            t.push(a);
                            t
                        })
                    })
                    .collect();
            }
            out
        }
    }
}

/// Evaluates every selected suite on trial `trial` of `ensemble`.
pub fn run_trial(s: &TrialSettings, ensemble: &EnsembleSpec, ensemble_index: u32, trial: u32) -> Result<TrialOutcome> {
    let tol = s.tolerances;
    let par = s.parameters;
    let a = sample_element(
        ensemble,
        &mut trial_stream(s.seed, Purpose::Element, ensemble_index, trial),
    )?;
    let p = Profile::with_max_power(a.clone(), tol.solver, par.max_power)?;
    let norm = p.norm();
    let needs_module = s.suites.iter().any(|x| x.is_module_suite() || *x == Suite::Substitution);
    let module = if needs_module {
        Some(ModuleDraw::sample(s, ensemble.dim, ensemble_index, trial)?)
    } else {
        None
    };
    let means = par
        .means
        .iter()
        .map(|m| Ok((MeanFunction::from_spec(m.f.clone())?, m.xi)))
        .collect::<Result<Vec<_>>>()?;

    let mut checks = Vec::new();
    let mut ranked = Vec::new();
    let selected: BTreeSet<Suite> = s.suites.iter().copied().collect();
    for &suite in &selected {
        match suite {
            Suite::Sandwich => {
                let v = p.radius(1)?;
                let slack = tol.sandwich_slack * norm;
                let pass = v.upper <= norm + slack && v.lower >= 0.5 * norm - slack;
                checks.push(Check::new(suite, "sandwich", String::new(), v.upper, norm, pass, v.certified));
            }
            Suite::Power => {
                let v = p.radius(1)?;
                for k in 2..=par.power_inequality_max {
                    let vk = p.radius(k)?;
                    checks.push(Check::inequality(
                        suite,
                        "power_inequality",
                        format!("k={k}"),
                        vk.upper,
                        v.upper.powi(k as i32),
                        tol.power_slack,
                        v.certified && vk.certified,
                    ));
                }
            }
            Suite::SpectralCorollary => {
                let v = p.radius(1)?;
                if norm == 0.0 || (norm - v.lower) / norm > EQUALITY_TRIGGER {
                    checks.push(Check::not_applicable(suite, "spectral_corollary"));
                } else {
                    let r = a.spectral_radius()?;
                    let dev = (v.lower - r).abs().max((v.upper - r).abs()) / norm;
                    checks.push(Check::new(
                        suite,
                        "spectral_corollary",
                        String::new(),
                        dev,
                        SPECTRAL_TOL,
                        dev <= SPECTRAL_TOL,
                        v.certified,
                    ));
                }
            }
            Suite::PowerSum | Suite::PowerSumClosed => {
                for &n in &par.powers {
                    let r = if suite == Suite::PowerSum {
                        power_sum_bound(&p, n)?
                    } else {
                        power_sum_closed_bound(&p, n)?
                    };
                    rank(&mut ranked, format!("{}[n={n}]", r.bound_id), n, r.tightness);
                    checks.push(Check::from_report(suite, &r, format!("n={n}"), tol.bound_slack));
                }
            }
            Suite::PowerSumState => {
                let phi = sample_state(
                    ensemble.dim,
                    state_kind(par.states, trial),
                    &mut trial_stream(s.seed, Purpose::ElementState, ensemble_index, trial),
                )?;
                for &n in &par.powers {
                    let sides = power_sum_state_sides(&a, &phi, n)?;
                    checks.push(Check::from_sides(suite, "power_sum_state", format!("n={n}"), &sides, tol.bound_slack));
                }
            }
            Suite::Cube => {
                for t in parameter_tuples(par, 2) {
                    let r = cube_bound(&p, t[0], t[1])?;
                    rank(&mut ranked, r.bound_id.clone(), 3, r.tightness);
                    checks.push(Check::from_report(
                        suite,
                        &r,
                        format!("alpha={},beta={}", c(t[0]), c(t[1])),
                        tol.bound_slack,
                    ));
                }
            }
            Suite::CubeCross => {
                for &alpha in &par.alphas {
                    let r = cube_cross_bound(&p, alpha)?;
                    rank(&mut ranked, r.bound_id.clone(), 3, r.tightness);
                    checks.push(Check::from_report(suite, &r, format!("alpha={}", c(alpha)), tol.bound_slack));
                }
            }
            Suite::SixthPower => {
                for (f, xi) in &means {
                    for t in parameter_tuples(par, 3) {
                        let q = SixthPowerParams {
                            f1: f.clone(),
                            xi1: *xi,
                            f2: f.clone(),
                            xi2: *xi,
                            alpha: t[0],
                            beta: t[1],
                            gamma: t[2],
                        };
                        let r = sixth_power_bound(&p, &q)?;
                        rank(&mut ranked, r.bound_id.clone(), 6, r.tightness);
                        checks.push(Check::from_report(
                            suite,
                            &r,
                            format!(
                                "f={},xi={xi},alpha={},beta={},gamma={}",
                                f.name(),
                                c(t[0]),
                                c(t[1]),
                                c(t[2])
                            ),
                            tol.bound_slack,
                        ));
                    }
                }
            }
            Suite::Presets => {
                let mut reports = cube_presets(&p)?;
                reports.push(sixth_power_preset(&p)?);
                for r in &reports {
                    rank(&mut ranked, r.bound_id.clone(), r.power, r.tightness);
                    checks.push(Check::from_report(suite, r, String::new(), tol.bound_slack));
                }
            }
            Suite::Substitution => {
                let two = C64::new(2.0, 0.0);
                let parent = cube_bound(&p, two, two)?;
                let halves = &cube_presets(&p)?[0];
                checks.push(Check::agreement(
                    suite,
                    "cube_halves",
                    String::new(),
                    halves.rhs,
                    parent.rhs,
                    tol.preset_agreement,
                ));
                let parent = sixth_power_bound(&p, &SixthPowerParams::preset())?;
                checks.push(Check::agreement(
                    suite,
                    "sixth_power_preset",
                    String::new(),
                    sixth_power_preset(&p)?.rhs,
                    parent.rhs,
                    tol.preset_agreement,
                ));
                let m = module.as_ref().expect("module draw exists for substitution");
                let identity = MeanFunction::identity();
                let quarter = MeanFunction::affine_quarter();
                for &alpha in &m.alphas {
                    for &zeta in &par.zetas {
                        let closed = m.pairings.zeta_sides(zeta, alpha)?;
                        let (fx, fr) = identity.weights(zeta / (1.0 + zeta))?;
                        let family = m.pairings.squared_product_sides(alpha, fx, fr)?;
                        checks.push(Check::agreement(
                            suite,
                            "zeta_family",
                            format!("zeta={zeta},alpha={}", c(alpha)),
                            closed.rhs,
                            family.rhs,
                            tol.module_agreement,
                        ));
                    }
                    for &eta in &par.etas {
                        let closed = m.pairings.eta_sides(eta, alpha)?;
                        let (fx, fr) = quarter.weights(eta)?;
                        let family = m.pairings.squared_product_sides(alpha, fx, fr)?;
                        checks.push(Check::agreement(
                            suite,
                            "eta_family",
                            format!("eta={eta},alpha={}", c(alpha)),
                            closed.rhs,
                            family.rhs,
                            tol.module_agreement,
                        ));
                    }
                }
            }
            Suite::Dominance => {
                let mut reports = Vec::new();
                for &n in &par.powers {
                    reports.push(power_sum_bound(&p, n)?);
                }
                reports.push(cube_presets(&p)?.swap_remove(0));
                reports.push(sixth_power_preset(&p)?);
                for r in &reports {
                    let d = dominance_check(r, norm);
                    checks.push(Check::new(
                        suite,
                        &r.bound_id,
                        format!("p={}", r.power),
                        d.rhs,
                        d.trivial,
                        d.holds,
                        r.certified,
                    ));
                }
            }
            Suite::EqualityProbes => {
                let probe = cross_radius_equality_probe(&p)?;
                if probe.applicable {
                    let dev = probe
                        .left_deviation
                        .unwrap_or(0.0)
                        .max(probe.right_deviation.unwrap_or(0.0));
                    let certified = p.left_cross_radius()?.certified && p.right_cross_radius()?.certified;
                    checks.push(Check::new(
                        suite,
                        "cross_radius_equality",
                        String::new(),
                        dev,
                        EQUALITY_TOL,
                        probe.holds,
                        certified,
                    ));
                } else {
                    checks.push(Check::not_applicable(suite, "cross_radius_equality"));
                }
            }
            Suite::CauchySchwarz => {
                let m = module.as_ref().expect("module draw exists");
                let gap = cauchy_schwarz_gap(&m.phi, &m.xs[0], &m.xs[1])?;
                let xy = m.pair.first_pair.norm();
                checks.push(Check::inequality(
                    suite,
                    "cauchy_schwarz",
                    m.shape(),
                    xy,
                    xy + gap,
                    tol.buzano_slack,
                    true,
                ));
            }
            Suite::GeneralizedBuzano | Suite::Buzano => {
                let m = module.as_ref().expect("module draw exists");
                let alphas = if suite == Suite::Buzano {
                    vec![C64::new(2.0, 0.0)]
                } else {
                    m.alphas.clone()
                };
                for alpha in alphas {
                    let sides = m.pair.linear_product_sides(alpha)?;
                    checks.push(Check::from_sides(
                        suite,
                        suite.name(),
                        format!("{},alpha={}", m.shape(), c(alpha)),
                        &sides,
                        tol.buzano_slack,
                    ));
                }
            }
            Suite::ProductBuzano => {
                let m = module.as_ref().expect("module draw exists");
                for &alpha in &m.alphas {
                    for (f, xi) in &means {
                        let (fx, fr) = f.weights(*xi)?;
                        let sides = m.pairings.squared_product_sides(alpha, fx, fr)?;
                        checks.push(Check::from_sides(
                            suite,
                            "product_buzano",
                            format!("{},alpha={},f={},xi={xi}", m.shape(), c(alpha), f.name()),
                            &sides,
                            tol.buzano_slack,
                        ));
                    }
                }
            }
            Suite::ProductLinear => {
                let m = module.as_ref().expect("module draw exists");
                for &alpha in &m.alphas {
                    let sides = m.pairings.linear_product_sides(alpha)?;
                    checks.push(Check::from_sides(
                        suite,
                        "product_linear",
                        format!("{},alpha={}", m.shape(), c(alpha)),
                        &sides,
                        tol.buzano_slack,
                    ));
                }
            }
            Suite::ZetaFamily | Suite::EtaFamily => {
                let m = module.as_ref().expect("module draw exists");
                let grid = if suite == Suite::ZetaFamily { &par.zetas } else { &par.etas };
                for &alpha in &m.alphas {
                    for &x in grid {
                        let (sides, label) = if suite == Suite::ZetaFamily {
                            (m.pairings.zeta_sides(x, alpha)?, "zeta")
                        } else {
                            (m.pairings.eta_sides(x, alpha)?, "eta")
                        };
                        checks.push(Check::from_sides(
                            suite,
                            suite.name(),
                            format!("{},alpha={},{label}={x}", m.shape(), c(alpha)),
                            &sides,
                            tol.buzano_slack,
                        ));
                    }
                }
            }
        }
    }

    if !ranked.is_empty() {
        let v = p.radius(1)?.upper;
        let powers: BTreeSet<u32> = ranked.iter().map(|r| r.power).collect();
        for power in powers {
            let t = tightness(v.powi(power as i32), norm.powi(power as i32));
            ranked.push(Ranked {
                key: format!("trivial[p={power}]"),
                power,
                tightness: t,
            });
        }
    }
    Ok(TrialOutcome {
        element: a,
        checks,
        ranked,
    })
}

/// Where a check was evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub ensemble_index: u32,
    pub ensemble: String,
    pub trial: u32,
    pub id: String,
    pub params: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub relative_margin: f64,
    pub margin: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub at: Location,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub trials: u64,
    pub passes: u64,
    pub violations: u64,
    /// Conditional checks whose hypothesis did not hold; not in `trials`.
    pub not_applicable: u64,
    /// Checks fed by a best-effort radius enclosure.
    pub uncertified: u64,
    pub worst: Option<WorstCase>,
    /// Counts of `lhs/rhs` over `[0, 1]` in 20 equal buckets; values above 1
    /// land in the last bucket.
    pub histogram: [u64; HISTOGRAM_BUCKETS],
}

impl SuiteSummary {
    fn new(suite: Suite) -> Self {
        Self {
            suite,
            trials: 0,
            passes: 0,
            violations: 0,
            not_applicable: 0,
            uncertified: 0,
            worst: None,
            histogram: [0; HISTOGRAM_BUCKETS],
        }
    }

    fn merge(&mut self, o: SuiteSummary) {
        self.trials += o.trials;
        self.passes += o.passes;
        self.violations += o.violations;
        self.not_applicable += o.not_applicable;
        self.uncertified += o.uncertified;
        for (h, x) in self.histogram.iter_mut().zip(o.histogram) {
            *h += x;
        }
        if let Some(w) = o.worst {
            if self.worst.as_ref().is_none_or(|cur| w.relative_margin < cur.relative_margin) {
                self.worst = Some(w);
            }
        }
    }
}

fn bucket(t: f64) -> usize {
    if t.is_nan() {
        return HISTOGRAM_BUCKETS - 1;
    }
    ((t.max(0.0) * HISTOGRAM_BUCKETS as f64) as usize).min(HISTOGRAM_BUCKETS - 1)
}

/// A failed check with enough data to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub suite: Suite,
    pub at: Location,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub relative_margin: f64,
    pub element: MatrixJson,
}

/// A trial that raised an error instead of producing checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub ensemble_index: u32,
    pub trial: u32,
    pub message: String,
}

#[derive(Default)]
struct Accumulator {
    suites: BTreeMap<Suite, SuiteSummary>,
    violations: Vec<ViolationRecord>,
    failures: Vec<TrialFailure>,
    tightness: BTreeMap<(u32, String), (u32, Vec<f64>)>,
}

impl Accumulator {
    fn add(&mut self, e: u32, label: &str, trial: u32, outcome: Result<TrialOutcome>, cap: usize) {
        let outcome = match outcome {
            Ok(o) => o,
            Err(err) => {
                self.failures.push(TrialFailure {
                    ensemble_index: e,
                    trial,
                    message: err.to_string(),
                });
                return;
            }
        };
        for ch in &outcome.checks {
            let s = self.suites.entry(ch.suite).or_insert_with(|| SuiteSummary::new(ch.suite));
            if !ch.applicable {
                s.not_applicable += 1;
                continue;
            }
            s.trials += 1;
            if !ch.certified {
                s.uncertified += 1;
            }
            s.histogram[bucket(ch.tightness())] += 1;
            let at = || Location {
                ensemble_index: e,
                ensemble: label.to_string(),
                trial,
                id: ch.id.clone(),
                params: ch.params.clone(),
            };
            let rel = ch.relative_margin();
            if s.worst.as_ref().is_none_or(|w| rel < w.relative_margin) {
                s.worst = Some(WorstCase {
                    relative_margin: rel,
                    margin: ch.margin(),
                    lhs: ch.lhs,
                    rhs: ch.rhs,
                    at: at(),
                });
            }
            if ch.pass {
                s.passes += 1;
            } else {
                s.violations += 1;
                if self.violations.len() < cap {
                    self.violations.push(ViolationRecord {
                        suite: ch.suite,
                        at: at(),
                        lhs: ch.lhs,
                        rhs: ch.rhs,
                        margin: ch.margin(),
                        relative_margin: rel,
                        element: outcome.element.to_json(),
                    });
                }
            }
        }
        for r in outcome.ranked {
            self.tightness
                .entry((e, r.key))
                .or_insert_with(|| (r.power, Vec::new()))
                .1
                .push(r.tightness);
        }
    }

    fn merge(&mut self, o: Accumulator, cap: usize) {
        for (k, s) in o.suites {
            match self.suites.get_mut(&k) {
                Some(cur) => cur.merge(s),
                None => {
                    self.suites.insert(k, s);
                }
            }
        }
        let room = cap.saturating_sub(self.violations.len());
        self.violations.extend(o.violations.into_iter().take(room));
        self.failures.extend(o.failures);
        for (k, (power, v)) in o.tightness {
            self.tightness.entry(k).or_insert_with(|| (power, Vec::new())).1.extend(v);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub rank: usize,
    pub bound: String,
    pub power: u32,
    pub median_tightness: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleLeaderboard {
    pub ensemble_index: u32,
    pub ensemble: String,
    pub rows: Vec<LeaderboardRow>,
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub trials: u64,
    pub passes: u64,
    pub violations: u64,
    pub not_applicable: u64,
    pub uncertified: u64,
    pub failed_trials: u64,
}

/// The deterministic part of a campaign report: equal configs give equal
/// bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HashedSection {
    pub seed: u64,
    pub config: CampaignConfig,
    pub totals: Totals,
    pub suites: Vec<SuiteSummary>,
    pub leaderboard: Vec<EnsembleLeaderboard>,
    /// Itemized violations, capped at `output.max_itemized`.
    pub violations: Vec<ViolationRecord>,
    pub failures: Vec<TrialFailure>,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub runtime_seconds: f64,
    pub jobs: usize,
    pub finished_unix_seconds: u64,
    pub output_dir: String,
}

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema_version: u32,
    pub hashed: HashedSection,
    /// SHA-256 of the compact JSON encoding of `hashed`.
    pub hash: String,
    pub meta: RunMeta,
}

/// Exit status: 0 clean, 2 violations, 3 certification failures only.
pub fn exit_code(totals: &Totals) -> i32 {
    if totals.violations > 0 {
        2
    } else if totals.uncertified > 0 || totals.failed_trials > 0 {
        3
    } else {
        0
    }
}

pub fn hash_section(h: &HashedSection) -> Result<String> {
    use sha2::{Digest, Sha256};
    Ok(hex::encode(Sha256::digest(serde_json::to_vec(h)?)))
}

/// Worker count: `jobs`, else `NUMRAD_JOBS`, else all cores.
pub fn resolve_jobs(jobs: Option<usize>) -> usize {
    jobs.or_else(|| std::env::var("NUMRAD_JOBS").ok()?.parse().ok())
        .filter(|&j| j > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

/// Runs every `(ensemble, trial)` of `cfg` on `jobs` workers.
pub fn run_campaign(cfg: &CampaignConfig, jobs: Option<usize>) -> Result<CampaignReport> {
    cfg.validate()?;
    let start = Instant::now();
    let jobs = resolve_jobs(jobs);
    let settings = TrialSettings::from_config(cfg);
    let cap = cfg.output.max_itemized;
    let labels: Vec<String> = cfg.ensembles.iter().map(|e| e.label()).collect();
    let addresses: Vec<(u32, u32)> = cfg
        .ensembles
        .iter()
        .enumerate()
        .flat_map(|(e, spec)| (0..spec.count).map(move |t| (e as u32, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    let partials: Vec<Accumulator> = pool.install(|| {
        addresses
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = Accumulator::default();
                for &(e, t) in chunk {
                    let spec = &cfg.ensembles[e as usize];
                    acc.add(e, &labels[e as usize], t, run_trial(&settings, spec, e, t), cap);
                }
                acc
            })
            .collect()
    });
    let mut acc = Accumulator::default();
    for part in partials {
        acc.merge(part, cap);
    }

    let suites: Vec<SuiteSummary> = cfg
        .suites
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|s| acc.suites.remove(&s).unwrap_or_else(|| SuiteSummary::new(s)))
        .collect();
    let mut totals = Totals {
        failed_trials: acc.failures.len() as u64,
        ..Totals::default()
    };
    for s in &suites {
        totals.trials += s.trials;
        totals.passes += s.passes;
        totals.violations += s.violations;
        totals.not_applicable += s.not_applicable;
        totals.uncertified += s.uncertified;
    }

    let mut boards: BTreeMap<u32, Vec<LeaderboardRow>> = BTreeMap::new();
    for ((e, key), (power, mut values)) in acc.tightness {
        boards.entry(e).or_default().push(LeaderboardRow {
            rank: 0,
            bound: key,
            power,
            median_tightness: median(&mut values),
            samples: values.len(),
        });
    }
    let leaderboard = boards
        .into_iter()
        .map(|(e, mut rows)| {
            rows.sort_by(|a, b| {
                b.median_tightness
                    .total_cmp(&a.median_tightness)
                    .then_with(|| a.bound.cmp(&b.bound))
            });
            for (i, r) in rows.iter_mut().enumerate() {
                r.rank = i + 1;
            }
            EnsembleLeaderboard {
                ensemble_index: e,
                ensemble: labels[e as usize].clone(),
                rows,
            }
        })
        .collect();

    let mut echo = cfg.clone();
    echo.output = OutputConfig {
        dir: OutputConfig::default().dir,
        ..cfg.output.clone()
    };
    let hashed = HashedSection {
        seed: cfg.seed,
        config: echo,
        exit_code: exit_code(&totals),
        totals,
        suites,
        leaderboard,
        violations: acc.violations,
        failures: acc.failures,
    };
    let hash = hash_section(&hashed)?;
    Ok(CampaignReport {
        schema_version: SCHEMA_VERSION,
        hashed,
        hash,
        meta: RunMeta {
            runtime_seconds: start.elapsed().as_secs_f64(),
            jobs,
            finished_unix_seconds: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            output_dir: cfg.output.dir.display().to_string(),
        },
    })
}
