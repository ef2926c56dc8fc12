//! `numrad`: numerical radius enclosures, bound reports, randomized
//! inequality campaigns and trial replay.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use numrad_core::bounds::{
    cube_bound, cube_cross_bound, cube_presets, power_sum_bound, power_sum_closed_bound, sixth_power_bound,
    sixth_power_preset, BoundReport, Profile, SixthPowerParams,
};
use numrad_core::buzano::MeanFunction;
use numrad_core::harness::campaign::{parameter_tuples, SuiteSummary, Totals, ViolationRecord};
use numrad_core::harness::config::Parameters;
use numrad_core::harness::{
    replay, run_campaign, write_reports, CampaignConfig, EnsembleKind, EnsembleSpec, Suite, TrialDump,
};
use numrad_core::radius::numerical_radius;
use numrad_core::{AlgebraElement, C64};

#[derive(Parser)]
#[command(name = "numrad", version, about = "Certified numerical radius toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified enclosure of v(a) for a matrix in JSON interchange format.
    Eval {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Randomized check of one module inequality family.
    Buzano {
        #[arg(long, value_enum)]
        preset: ModulePreset,
        #[arg(long, default_value_t = 10_000)]
        trials: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        dims: Vec<usize>,
        #[arg(long, env = "NUMRAD_JOBS")]
        jobs: Option<usize>,
    },
    /// Numerical radius upper bounds for one matrix.
    Bounds {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        bound: BoundChoice,
        /// Orders of the power-sum bounds.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        /// Complex parameter as `RE` or `RE,IM`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
        /// TOML parameter grid (the `[parameters]` table of a campaign file).
        #[arg(long)]
        sweep: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-11)]
        tol: f64,
    },
    /// Runs a campaign and writes JSON and CSV reports.
    Campaign {
        /// Campaign file; the bundled default when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "NUMRAD_JOBS")]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-runs a dumped trial and compares its margin.
    Replay {
        #[arg(long)]
        trial: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ModulePreset {
    CauchySchwarz,
    GeneralizedBuzano,
    Buzano,
    ProductBuzano,
    ProductLinear,
    ZetaFamily,
    EtaFamily,
}

impl ModulePreset {
    fn suite(self) -> Suite {
        match self {
            ModulePreset::CauchySchwarz => Suite::CauchySchwarz,
            ModulePreset::GeneralizedBuzano => Suite::GeneralizedBuzano,
            ModulePreset::Buzano => Suite::Buzano,
            ModulePreset::ProductBuzano => Suite::ProductBuzano,
            ModulePreset::ProductLinear => Suite::ProductLinear,
            ModulePreset::ZetaFamily => Suite::ZetaFamily,
            ModulePreset::EtaFamily => Suite::EtaFamily,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum BoundChoice {
    PowerSum,
    PowerSumClosed,
    Cube,
    CubeCross,
    SixthPower,
    Presets,
    All,
}

#[derive(Serialize)]
struct EvalOutput {
    lower: f64,
    upper: f64,
    theta: f64,
    witness: Vec<C64>,
    certified: bool,
}

#[derive(Serialize)]
struct BuzanoOutput<'a> {
    preset: &'a str,
    seed: u64,
    trials_per_dim: u32,
    dims: &'a [usize],
    totals: &'a Totals,
    summary: Option<&'a SuiteSummary>,
    violations: &'a [ViolationRecord],
    hash: &'a str,
    exit_code: i32,
}

fn parse_complex(s: &str) -> Result<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().with_context(|| format!("bad number {p:?} in {s:?}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => bail!("expected RE or RE,IM, got {s:?}"),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn exit_status(code: i32) -> ExitCode {
    ExitCode::from(u8::try_from(code).unwrap_or(1))
}

fn eval(input: PathBuf, tol: f64) -> Result<ExitCode> {
    let a = AlgebraElement::load(&input).with_context(|| format!("reading {}", input.display()))?;
    let v = numerical_radius(&a, tol)?;
    print_json(&EvalOutput {
        lower: v.lower,
        upper: v.upper,
        theta: v.argmax_theta,
        witness: v.witness,
        certified: v.certified,
    })?;
    Ok(ExitCode::SUCCESS)
}

fn buzano(preset: ModulePreset, trials: u32, seed: u64, dims: Vec<usize>, jobs: Option<usize>) -> Result<ExitCode> {
    let suite = preset.suite();
    let mut cfg = CampaignConfig::default_campaign();
    cfg.seed = seed;
    cfg.suites = vec![suite];
    cfg.ensembles = dims
        .iter()
        .map(|&d| EnsembleSpec::new(EnsembleKind::Ginibre, d, trials))
        .collect();
    let report = run_campaign(&cfg, jobs)?;
    let h = &report.hashed;
    print_json(&BuzanoOutput {
        preset: suite.name(),
        seed,
        trials_per_dim: trials,
        dims: &dims,
        totals: &h.totals,
        summary: h.suites.iter().find(|s| s.suite == suite),
        violations: &h.violations,
        hash: &report.hash,
        exit_code: h.exit_code,
    })?;
    Ok(exit_status(h.exit_code))
}

struct BoundArgs {
    bound: BoundChoice,
    n: Vec<u32>,
    alpha: Option<C64>,
    beta: Option<C64>,
    gamma: Option<C64>,
}

fn bound_reports(p: &Profile, args: &BoundArgs, par: &Parameters) -> Result<Vec<BoundReport>> {
    let wants = |b: BoundChoice| args.bound == b || args.bound == BoundChoice::All;
    let powers = if args.n.is_empty() { &par.powers } else { &args.n };
    let mut out = Vec::new();
    if wants(BoundChoice::PowerSum) {
        for &n in powers {
            out.push(power_sum_bound(p, n)?);
        }
    }
    if wants(BoundChoice::PowerSumClosed) {
        for &n in powers {
            out.push(power_sum_closed_bound(p, n)?);
        }
    }
    let explicit = args.alpha.is_some() || args.beta.is_some() || args.gamma.is_some();
    let pick = |t: &[C64], i: usize, given: Option<C64>| given.or(args.alpha).unwrap_or(t[i]);
    if wants(BoundChoice::Cube) {
        if explicit {
            let a = args.alpha.unwrap_or(C64::new(2.0, 0.0));
            out.push(cube_bound(p, a, args.beta.unwrap_or(a))?);
        } else {
            for t in parameter_tuples(par, 2) {
                out.push(cube_bound(p, t[0], t[1])?);
            }
        }
    }
    if wants(BoundChoice::CubeCross) {
        match args.alpha {
            Some(a) => out.push(cube_cross_bound(p, a)?),
            None => {
                for &a in &par.alphas {
                    out.push(cube_cross_bound(p, a)?);
                }
            }
        }
    }
    if wants(BoundChoice::SixthPower) {
        if explicit {
            let preset = SixthPowerParams::preset();
            let t = [preset.alpha, preset.beta, preset.gamma];
            let q = SixthPowerParams {
                alpha: pick(&t, 0, args.alpha),
                beta: pick(&t, 1, args.beta),
                gamma: pick(&t, 2, args.gamma),
                ..preset
            };
            out.push(sixth_power_bound(p, &q)?);
        } else {
            for m in &par.means {
                let f = MeanFunction::from_spec(m.f.clone())?;
                for t in parameter_tuples(par, 3) {
                    let q = SixthPowerParams {
                        f1: f.clone(),
                        xi1: m.xi,
                        f2: f.clone(),
                        xi2: m.xi,
                        alpha: t[0],
                        beta: t[1],
                        gamma: t[2],
                    };
                    out.push(sixth_power_bound(p, &q)?);
                }
            }
        }
    }
    if wants(BoundChoice::Presets) {
        out.extend(cube_presets(p)?);
        out.push(sixth_power_preset(p)?);
    }
    Ok(out)
}

fn bounds(input: PathBuf, args: BoundArgs, sweep: Option<PathBuf>, tol: f64) -> Result<ExitCode> {
    let a = AlgebraElement::load(&input).with_context(|| format!("reading {}", input.display()))?;
    let par: Parameters = match sweep {
        Some(path) => {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => Parameters::default(),
    };
    par.validate()?;
    let max_power = args.n.iter().copied().chain([par.max_power]).max().unwrap_or(par.max_power);
    let p = Profile::with_max_power(a, tol, max_power)?;
    print_json(&bound_reports(&p, &args, &par)?)?;
    Ok(ExitCode::SUCCESS)
}

fn campaign(config: Option<PathBuf>, seed: Option<u64>, jobs: Option<usize>, out: Option<PathBuf>) -> Result<ExitCode> {
    let mut cfg = match &config {
        Some(path) => CampaignConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => CampaignConfig::default_campaign(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(dir) = out {
        cfg.output.dir = dir;
    }
    let report = run_campaign(&cfg, jobs)?;
    let written = write_reports(&report, &cfg, &cfg.output.dir)?;
    let h = &report.hashed;
    for s in &h.suites {
        let worst = s.worst.as_ref().map_or(String::from("-"), |w| format!("{:.3e}", w.relative_margin));
        eprintln!(
            "{:<20} checks={:<9} violations={:<5} uncertified={:<5} n/a={:<7} worst_rel_margin={worst}",
            s.suite.name(),
            s.trials,
            s.violations,
            s.uncertified,
            s.not_applicable
        );
    }
    let trials: u64 = cfg.ensembles.iter().map(|e| u64::from(e.count)).sum();
    eprintln!(
        "{trials} trials, {} failed, {:.1}s on {} workers",
        h.totals.failed_trials,
        report.meta.runtime_seconds,
        report.meta.jobs
    );
    eprintln!("report {} hash {}", written.json.display(), report.hash);
    Ok(exit_status(h.exit_code))
}

fn replay_trial(trial: PathBuf) -> Result<ExitCode> {
    let dump = TrialDump::load(&trial).with_context(|| format!("reading {}", trial.display()))?;
    let outcome = replay(&dump)?;
    print_json(&outcome)?;
    Ok(if outcome.reproduced { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Eval { input, tol } => eval(input, tol),
        Command::Buzano {
            preset,
            trials,
            seed,
            dims,
            jobs,
        } => buzano(preset, trials, seed, dims, jobs),
        Command::Bounds {
            input,
            bound,
            n,
            alpha,
            beta,
            gamma,
            sweep,
            tol,
        } => {
            let parse = |s: Option<String>| s.as_deref().map(parse_complex).transpose();
            let args = BoundArgs {
                bound,
                n,
                alpha: parse(alpha)?,
                beta: parse(beta)?,
                gamma: parse(gamma)?,
            };
            bounds(input, args, sweep, tol)
        }
        Command::Campaign { config, seed, jobs, out } => campaign(config, seed, jobs, out),
        Command::Replay { trial } => replay_trial(trial),
    }
}
