//! Report files and trial replay.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algebra::io::MatrixJson;
use crate::error::{Error, Result};
use crate::harness::campaign::{
    run_trial, CampaignReport, Check, TrialSettings, ViolationRecord, HISTOGRAM_BUCKETS, SCHEMA_VERSION,
};
use crate::harness::config::{CampaignConfig, Parameters, Suite, Tolerances};
use crate::harness::ensembles::EnsembleSpec;

/// Everything needed to re-run one check of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialDump {
    pub schema_version: u32,
    pub seed: u64,
    pub ensemble_index: u32,
    pub ensemble: EnsembleSpec,
    pub trial: u32,
    pub suite: Suite,
    pub id: String,
    pub params: String,
    pub tolerances: Tolerances,
    pub parameters: Parameters,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub element: MatrixJson,
}

impl TrialDump {
    fn new(cfg: &CampaignConfig, ensemble_index: u32, trial: u32, check: &Check, element: MatrixJson) -> Result<Self> {
        let ensemble = cfg
            .ensembles
            .get(ensemble_index as usize)
            .ok_or_else(|| Error::InvalidArgument(format!("no ensemble {ensemble_index}")))?
            .clone();
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            seed: cfg.seed,
            ensemble_index,
            ensemble,
            trial,
            suite: check.suite,
            id: check.id.clone(),
            params: check.params.clone(),
            tolerances: cfg.tolerances.clone(),
            parameters: cfg.parameters.clone(),
            lhs: check.lhs,
            rhs: check.rhs,
            margin: check.margin(),
            element,
        })
    }

    fn from_violation(cfg: &CampaignConfig, v: &ViolationRecord) -> Result<Self> {
        let check = Check {
            suite: v.suite,
            id: v.at.id.clone(),
            params: v.at.params.clone(),
            lhs: v.lhs,
            rhs: v.rhs,
            pass: false,
            applicable: true,
            certified: true,
        };
        Self::new(cfg, v.at.ensemble_index, v.at.trial, &check, v.element.clone())
    }

    /// Runs one trial of `cfg` and dumps the check selected by suite, id and
    /// params; with `params = None` the first check of the suite.
    pub fn capture(
        cfg: &CampaignConfig,
        ensemble_index: u32,
        trial: u32,
        suite: Suite,
        id: Option<&str>,
        params: Option<&str>,
    ) -> Result<Self> {
        let spec = cfg
            .ensembles
            .get(ensemble_index as usize)
            .ok_or_else(|| Error::InvalidArgument(format!("no ensemble {ensemble_index}")))?;
        let suites = [suite];
        let settings = TrialSettings {
            suites: &suites,
            ..TrialSettings::from_config(cfg)
        };
        let out = run_trial(&settings, spec, ensemble_index, trial)?;
        let check = out
            .checks
            .iter()
            .find(|c| id.is_none_or(|i| c.id == i) && params.is_none_or(|p| c.params == p))
            .ok_or_else(|| Error::InvalidArgument(format!("no matching {} check", suite.name())))?;
        Self::new(cfg, ensemble_index, trial, check, out.element.to_json())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub element_matches: bool,
    pub recorded_margin: f64,
    pub replayed_margin: f64,
    pub replayed_lhs: f64,
    pub replayed_rhs: f64,
    /// `|Δmargin| ≤ 1e−15·max(1, |margin|)` and the element regenerated
    /// bit for bit.
    pub reproduced: bool,
}

/// Re-runs the trial in `dump` and compares the selected check.
pub fn replay(dump: &TrialDump) -> Result<ReplayOutcome> {
    let suites = [dump.suite];
    let settings = TrialSettings {
        seed: dump.seed,
        suites: &suites,
        tolerances: &dump.tolerances,
        parameters: &dump.parameters,
    };
    let out = run_trial(&settings, &dump.ensemble, dump.ensemble_index, dump.trial)?;
    let check = out
        .checks
        .iter()
        .find(|c| c.id == dump.id && c.params == dump.params)
        .ok_or_else(|| Error::InvalidArgument(format!("trial has no check {} [{}]", dump.id, dump.params)))?;
    let element_matches = out.element.to_json() == dump.element;
    let replayed = check.margin();
    let close = (replayed - dump.margin).abs() <= 1e-15 * dump.margin.abs().max(1.0)
        || (replayed.is_nan() && dump.margin.is_nan());
    Ok(ReplayOutcome {
        element_matches,
        recorded_margin: dump.margin,
        replayed_margin: replayed,
        replayed_lhs: check.lhs,
        replayed_rhs: check.rhs,
        reproduced: element_matches && close,
    })
}

#[derive(Serialize)]
struct SuiteRow<'a> {
    suite: &'a str,
    trials: u64,
    passes: u64,
    violations: u64,
    not_applicable: u64,
    uncertified: u64,
    worst_relative_margin: Option<f64>,
    worst_ensemble: Option<&'a str>,
    worst_trial: Option<u32>,
}

#[derive(Serialize)]
struct HistogramRow<'a> {
    suite: &'a str,
    bucket_lo: f64,
    bucket_hi: f64,
    count: u64,
}

#[derive(Serialize)]
struct LeaderboardCsvRow<'a> {
    ensemble: &'a str,
    rank: usize,
    bound: &'a str,
    power: u32,
    median_tightness: f64,
    samples: usize,
}

/// Files written by [`write_reports`].
#[derive(Clone, Debug, PartialEq)]
pub struct WrittenReports {
    pub json: PathBuf,
    pub suites_csv: PathBuf,
    pub histogram_csv: PathBuf,
    pub leaderboard_csv: PathBuf,
    pub trial_dumps: Vec<PathBuf>,
}

/// Writes `campaign.json`, three CSV tables and one replay file per itemized
/// violation under `dir`.
pub fn write_reports(report: &CampaignReport, cfg: &CampaignConfig, dir: &Path) -> Result<WrittenReports> {
    std::fs::create_dir_all(dir)?;
    let json = dir.join("campaign.json");
    std::fs::write(&json, serde_json::to_string_pretty(report)?)?;

    let suites_csv = dir.join("suites.csv");
    let mut w = csv::Writer::from_path(&suites_csv)?;
    for s in &report.hashed.suites {
        w.serialize(SuiteRow {
            suite: s.suite.name(),
            trials: s.trials,
            passes: s.passes,
            violations: s.violations,
            not_applicable: s.not_applicable,
            uncertified: s.uncertified,
            worst_relative_margin: s.worst.as_ref().map(|w| w.relative_margin),
            worst_ensemble: s.worst.as_ref().map(|w| w.at.ensemble.as_str()),
            worst_trial: s.worst.as_ref().map(|w| w.at.trial),
        })?;
    }
    w.flush()?;

    let histogram_csv = dir.join("histogram.csv");
    let mut w = csv::Writer::from_path(&histogram_csv)?;
    let width = 1.0 / HISTOGRAM_BUCKETS as f64;
    for s in &report.hashed.suites {
        for (i, &count) in s.histogram.iter().enumerate() {
            w.serialize(HistogramRow {
                suite: s.suite.name(),
                bucket_lo: i as f64 * width,
                bucket_hi: (i + 1) as f64 * width,
                count,
            })?;
        }
    }
    w.flush()?;

    let leaderboard_csv = dir.join("leaderboard.csv");
    let mut w = csv::Writer::from_path(&leaderboard_csv)?;
    for board in &report.hashed.leaderboard {
        for r in &board.rows {
            w.serialize(LeaderboardCsvRow {
                ensemble: &board.ensemble,
                rank: r.rank,
                bound: &r.bound,
                power: r.power,
                median_tightness: r.median_tightness,
                samples: r.samples,
            })?;
        }
    }
    w.flush()?;

    let mut trial_dumps = Vec::new();
    if !report.hashed.violations.is_empty() {
        let vdir = dir.join("violations");
        std::fs::create_dir_all(&vdir)?;
        for (i, v) in report.hashed.violations.iter().enumerate() {
            let path = vdir.join(format!(
                "{i:04}-{}-e{}-t{}.json",
                v.suite.name(),
                v.at.ensemble_index,
                v.at.trial
            ));
            std::fs::write(&path, serde_json::to_string_pretty(&TrialDump::from_violation(cfg, v)?)?)?;
            trial_dumps.push(path);
        }
    }
    Ok(WrittenReports {
        json,
        suites_csv,
        histogram_csv,
        leaderboard_csv,
        trial_dumps,
    })
}
