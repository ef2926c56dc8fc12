//! Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
//! if any fails. Runs the default campaign twice, so expect several minutes
//! on a single core.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use numrad_core::bounds::{
    cross_radius_equality_probe, cube_cross_bound, cube_presets, power_sum_bound, sixth_power_preset, BoundReport,
    Profile,
};
use numrad_core::harness::campaign::CampaignReport;
use numrad_core::harness::config::Suite;
use numrad_core::harness::ensembles::haar_unitary;
use numrad_core::harness::rng::{trial_stream, Purpose, Stream};
use numrad_core::harness::{run_campaign, sample_element, CampaignConfig, EnsembleKind, EnsembleSpec};
use numrad_core::radius::numerical_radius;
use numrad_core::{AlgebraElement, C64};
use rand::Rng;

const SEED: u64 = 42;
/// Jordan-3 reference value, quoted to eight digits.
#[allow(clippy::approx_constant)]
const JORDAN3: f64 = 0.70710678;
const SOLVER_TOL: f64 = 1e-11;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: u32, name: &str, elapsed: Duration, o: &Outcome) {
    println!(
        "{} {id:>2} {name}: {} [{:.1}s]",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64()
    );
}

fn stream(purpose: Purpose, ensemble: u32, trial: u32) -> Stream {
    trial_stream(SEED, purpose, ensemble, trial)
}

/// `count` draws of `kind`, cycling the dimension through `dims`.
fn draws(kind: EnsembleKind, dims: &[usize], count: u32, tag: u32) -> Vec<AlgebraElement> {
    (0..count)
        .map(|t| {
            let spec = EnsembleSpec::new(kind.clone(), dims[t as usize % dims.len()], count);
            sample_element(&spec, &mut stream(Purpose::Element, tag, t)).expect("generator succeeds")
        })
        .collect()
}

fn sandwich_sharpness() -> Outcome {
    let dims = [2, 3, 4, 5, 6];
    let mut worst = [0.0f64; 2];
    let mut uncertified = 0;
    for (slot, kind, target) in [(0, EnsembleKind::TwoNilpotent, 0.5), (1, EnsembleKind::NormalRandom, 1.0)] {
        for a in draws(kind, &dims, 1000, 100 + slot as u32) {
            let v = numerical_radius(&a, SOLVER_TOL).expect("solver runs");
            let norm = a.operator_norm().expect("norm");
            uncertified += usize::from(!v.certified);
            let dev = (v.lower / norm - target).abs().max((v.upper / norm - target).abs());
            worst[slot] = worst[slot].max(dev);
        }
    }
    Outcome {
        pass: worst[0] <= 1e-7 && worst[1] <= 1e-7 && uncertified == 0,
        detail: format!(
            "max |v/‖a‖ − 1/2| = {:.2e} over 1000 two_nilpotent, max |v/‖a‖ − 1| = {:.2e} over 1000 normal_random, uncertified {uncertified}",
            worst[0], worst[1]
        ),
    }
}

fn module_campaign(suites: Vec<Suite>, per_dim: u32) -> CampaignReport {
    let mut cfg = CampaignConfig::default_campaign();
    cfg.suites = suites;
    cfg.ensembles = (1..=4)
        .map(|d| EnsembleSpec::new(EnsembleKind::Ginibre, d, per_dim))
        .collect();
    cfg.tolerances.preset_agreement = 1e-14;
    cfg.tolerances.module_agreement = 1e-14;
    run_campaign(&cfg, None).expect("campaign runs")
}

const MODULE_SUITES: [Suite; 7] = [
    Suite::CauchySchwarz,
    Suite::GeneralizedBuzano,
    Suite::Buzano,
    Suite::ProductBuzano,
    Suite::ProductLinear,
    Suite::ZetaFamily,
    Suite::EtaFamily,
];

fn buzano_suites() -> Outcome {
    let r = module_campaign(MODULE_SUITES.to_vec(), 2500);
    let h = &r.hashed;
    let fewest = h.suites.iter().map(|s| s.trials).min().unwrap_or(0);
    let violations: u64 = h.suites.iter().map(|s| s.violations).sum();
    Outcome {
        pass: h.suites.len() == MODULE_SUITES.len() && fewest >= 10_000 && violations == 0 && h.totals.failed_trials == 0,
        detail: format!(
            "{} suites, ≥{fewest} instances each over dims 1–4, {violations} violations at slack 1e-10, {} failed trials",
            h.suites.len(),
            h.totals.failed_trials
        ),
    }
}

fn substitution_consistency() -> Outcome {
    let r = module_campaign(vec![Suite::Substitution], 250);
    let h = &r.hashed;
    let s = &h.suites[0];
    let worst = s.worst.as_ref().map_or(0.0, |w| w.lhs);
    Outcome {
        pass: s.violations == 0 && h.totals.failed_trials == 0 && s.trials >= 4 * 1000,
        detail: format!(
            "{} comparisons on 1000 inputs, largest relative disagreement {worst:.2e} (limit 1e-14), {} violations",
            s.trials, s.violations
        ),
    }
}

fn saturating_reports(a: AlgebraElement) -> Vec<BoundReport> {
    let p = Profile::new(a, SOLVER_TOL).expect("profile");
    let mut out: Vec<BoundReport> = (2..=8).map(|n| power_sum_bound(&p, n).expect("power_sum")).collect();
    out.push(cube_presets(&p).expect("presets").swap_remove(0));
    out.push(cube_cross_bound(&p, C64::new(2.0, 0.0)).expect("cube_cross"));
    out.push(sixth_power_preset(&p).expect("sixth preset"));
    out
}

fn equality_cases() -> Outcome {
    let mut worst = 0.0f64;
    let mut identity_sixth = 0.0;
    let mut cases = 0;
    for n in 1..=6 {
        for r in saturating_reports(AlgebraElement::identity(n)) {
            if r.bound_id == "sixth_power_preset" {
                identity_sixth = r.rhs;
            }
            worst = worst.max((r.tightness - 1.0).abs());
            cases += 1;
        }
    }
    for t in 0..200u32 {
        let n = 1 + t as usize % 6;
        let u = haar_unitary(n, &mut stream(Purpose::Element, 500, t));
        for r in saturating_reports(AlgebraElement::new(u).expect("finite")) {
            worst = worst.max((r.tightness - 1.0).abs());
            cases += 1;
        }
    }
    Outcome {
        pass: worst <= 1e-9 && (identity_sixth - 1.0f64).abs() <= 1e-12,
        detail: format!(
            "max |tightness − 1| = {worst:.2e} over {cases} reports (identity dims 1–6, 200 Haar unitaries), identity sixth-power preset rhs = {identity_sixth}"
        ),
    }
}

fn spectral_corollary() -> Outcome {
    let dims = [2, 3, 4, 5, 6];
    let mut worst = 0.0f64;
    for (tag, kind) in [(700, EnsembleKind::NormalRandom), (701, EnsembleKind::HaarUnitary)] {
        for a in draws(kind, &dims, 1000, tag) {
            let v = numerical_radius(&a, SOLVER_TOL).expect("solver runs");
            let r = a.spectral_radius().expect("spectrum");
            let norm = a.operator_norm().expect("norm");
            worst = worst.max((v.lower - r).abs().max((v.upper - r).abs()) / norm);
        }
    }
    Outcome {
        pass: worst <= 1e-6,
        detail: format!("max |v − r|/‖a‖ = {worst:.2e} over 1000 normal_random + 1000 haar_unitary (limit 1e-6)"),
    }
}

fn equality_probe() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for a in draws(EnsembleKind::NormalRandom, &[2, 3, 4, 5, 6], 1000, 800) {
        let p = Profile::new(a, SOLVER_TOL).expect("profile");
        let probe = cross_radius_equality_probe(&p).expect("probe");
        let dev = probe.left_deviation.unwrap_or(f64::INFINITY).max(probe.right_deviation.unwrap_or(f64::INFINITY));
        worst = worst.max(dev);
        failures += usize::from(!(probe.applicable && probe.holds));
    }
    Outcome {
        pass: failures == 0 && worst <= 1e-6,
        detail: format!(
            "max |v(a*a²) − ‖a‖³|, |v(a²a*) − ‖a‖³| relative to ‖a‖³ = {worst:.2e} over 1000 normal_random, {failures} failures"
        ),
    }
}

fn solver_certification() -> Outcome {
    let start = Instant::now();
    let kinds = [
        EnsembleKind::Ginibre,
        EnsembleKind::GueHermitian,
        EnsembleKind::NormalRandom,
        EnsembleKind::HaarUnitary,
        EnsembleKind::TwoNilpotent,
    ];
    let mut worst = 0.0f64;
    let mut failures = 0;
    for t in 0..10_000u32 {
        let mut rng = stream(Purpose::Element, 900, t);
        let dim = rng.random_range(1..=16);
        let kind = kinds[t as usize % kinds.len()].clone();
        let spec = EnsembleSpec {
            normalize: false,
            ..EnsembleSpec::new(kind, dim, 1)
        };
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        let a = sample_element(&spec, &mut rng).expect("generator").scale(C64::new(scale, 0.0));
        let v = numerical_radius(&a, 1e-10).expect("solver runs");
        let rel = v.width() / a.operator_norm().expect("norm").max(1.0);
        worst = worst.max(rel);
        failures += usize::from(!v.certified || rel > 1e-10);
    }
    let jordan = numerical_radius(&AlgebraElement::jordan_block(3), 1e-10).expect("solver runs");
    let oracle = common::dense_oracle(AlgebraElement::jordan_block(3).matrix());
    let jordan_dev = (jordan.lower - oracle).abs().max((jordan.upper - oracle).abs());
    let oracle_dev = (oracle - JORDAN3).abs();
    let elapsed = start.elapsed();
    Outcome {
        pass: failures == 0 && jordan_dev <= 1e-8 && oracle_dev <= 1e-8 && elapsed <= Duration::from_secs(120),
        detail: format!(
            "10000 matrices dims 1–16: max width/max(1,‖a‖) = {worst:.2e}, {failures} failures; Jordan-3 [{:.10}, {:.10}] vs oracle {oracle:.10}",
            jordan.lower, jordan.upper
        ),
    }
}

const SOUNDNESS_SUITES: [Suite; 6] = [
    Suite::PowerSum,
    Suite::PowerSumClosed,
    Suite::Cube,
    Suite::CubeCross,
    Suite::SixthPower,
    Suite::Presets,
];

fn soundness(cfg: &CampaignConfig, r: &CampaignReport) -> Outcome {
    let h = &r.hashed;
    let per_kind = |name: &str| -> u32 {
        cfg.ensembles.iter().filter(|e| e.kind.name() == name).map(|e| e.count).sum()
    };
    let counts = ["ginibre", "normal_random", "haar_unitary", "two_nilpotent"].map(per_kind);
    let selected: Vec<_> = h.suites.iter().filter(|s| SOUNDNESS_SUITES.contains(&s.suite)).collect();
    let violations: u64 = selected.iter().map(|s| s.violations).sum();
    let uncertified: u64 = selected.iter().map(|s| s.uncertified).sum();
    let checks: u64 = selected.iter().map(|s| s.trials).sum();
    let worst = selected
        .iter()
        .filter_map(|s| s.worst.as_ref().map(|w| w.relative_margin))
        .fold(f64::INFINITY, f64::min);
    Outcome {
        pass: selected.len() == SOUNDNESS_SUITES.len()
            && counts.iter().all(|&c| c >= 10_000)
            && violations == 0
            && uncertified == 0
            && h.totals.failed_trials == 0
            && cfg.tolerances.solver == SOLVER_TOL
            && cfg.tolerances.bound_slack == 1e-9,
        detail: format!(
            "{checks} checks, trials per ensemble kind {counts:?}, {violations} violations, {uncertified} uncertified, worst relative margin {worst:.2e}"
        ),
    }
}

fn dominance(r: &CampaignReport) -> Outcome {
    let s = r.hashed.suites.iter().find(|s| s.suite == Suite::Dominance);
    Outcome {
        pass: s.is_some_and(|s| s.trials > 0 && s.violations == 0 && s.passes == s.trials),
        detail: s.map_or("suite missing".into(), |s| {
            format!("{} of {} campaign comparisons within ‖a‖^p(1 + 1e-9)", s.passes, s.trials)
        }),
    }
}

fn determinism(a: &CampaignReport, b: &CampaignReport) -> Outcome {
    let same_bytes = serde_json::to_vec(&a.hashed).ok() == serde_json::to_vec(&b.hashed).ok();
    Outcome {
        pass: same_bytes && a.hash == b.hash,
        detail: format!(
            "hashes {} ({} workers) and {} ({} workers), hashed sections {}",
            &a.hash[..16],
            a.meta.jobs,
            &b.hash[..16],
            b.meta.jobs,
            if same_bytes { "identical" } else { "differ" }
        ),
    }
}

fn timed(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome, passed: &mut u32) {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            o.pass = false;
            o.detail += &format!("; runtime over {}s", limit.as_secs());
        }
    }
    report(id, name, elapsed, &o);
    *passed += u32::from(o.pass);
}

fn main() -> ExitCode {
    let mut passed = 0;
    timed(1, "sandwich sharpness", Some(Duration::from_secs(30)), sandwich_sharpness, &mut passed);
    timed(2, "module inequality suites", Some(Duration::from_secs(60)), buzano_suites, &mut passed);
    timed(3, "specialization consistency", None, substitution_consistency, &mut passed);
    timed(5, "equality cases", None, equality_cases, &mut passed);
    timed(7, "spectral radius corollary", None, spectral_corollary, &mut passed);
    timed(8, "cross radius equality probe", None, equality_probe, &mut passed);
    timed(9, "solver certification", Some(Duration::from_secs(120)), solver_certification, &mut passed);

    let cfg = CampaignConfig::default_campaign();
    let start = Instant::now();
    let first = run_campaign(&cfg, None).expect("default campaign runs");
    let first_time = start.elapsed();
    timed(4, "bound soundness", None, || soundness(&cfg, &first), &mut passed);
    timed(6, "dominance over trivial bound", None, || dominance(&first), &mut passed);
    println!("     default campaign: {:.1}s on {} workers", first_time.as_secs_f64(), first.meta.jobs);

    let jobs = if first.meta.jobs == 1 { 2 } else { 1 };
    timed(
        10,
        "determinism",
        None,
        || determinism(&first, &run_campaign(&cfg, Some(jobs)).expect("default campaign runs")),
        &mut passed,
    );

    println!("acceptance: {passed}/10 criteria passed");
    if passed == 10 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
