//! Campaign configuration, loaded from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algebra::C64;
use crate::buzano::MeanSpec;
use crate::error::{Error, Result};
use crate::harness::ensembles::EnsembleSpec;

/// One family of checks run on every trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// `‖a‖/2 ≤ v(a) ≤ ‖a‖`.
    Sandwich,
    /// `v(aᵏ) ≤ v(a)ᵏ`.
    Power,
    CauchySchwarz,
    GeneralizedBuzano,
    /// The generalized inequality at `α = 2`.
    Buzano,
    /// Squared product inequality with a mean function.
    ProductBuzano,
    /// Unsquared product inequality.
    ProductLinear,
    ZetaFamily,
    EtaFamily,
    PowerSum,
    PowerSumClosed,
    /// The state-level inequality behind the power-sum bound.
    PowerSumState,
    Cube,
    CubeCross,
    SixthPower,
    /// Closed-form specializations of the cube and sixth-power bounds.
    Presets,
    /// Specializations agree with their parent family.
    Substitution,
    /// Bounds never exceed `‖a‖^p`.
    Dominance,
    /// `v(a*a²) = v(a²a*) = ‖a‖³` whenever `v(a) = ‖a‖`.
    EqualityProbes,
    /// `v(a) = r(a)` whenever `v(a) = ‖a‖`.
    SpectralCorollary,
}

impl Suite {
    pub const ALL: [Suite; 20] = [
        Suite::Sandwich,
        Suite::Power,
        Suite::CauchySchwarz,
        Suite::GeneralizedBuzano,
        Suite::Buzano,
        Suite::ProductBuzano,
        Suite::ProductLinear,
        Suite::ZetaFamily,
        Suite::EtaFamily,
        Suite::PowerSum,
        Suite::PowerSumClosed,
        Suite::PowerSumState,
        Suite::Cube,
        Suite::CubeCross,
        Suite::SixthPower,
        Suite::Presets,
        Suite::Substitution,
        Suite::Dominance,
        Suite::EqualityProbes,
        Suite::SpectralCorollary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Sandwich => "sandwich",
            Suite::Power => "power",
            Suite::CauchySchwarz => "cauchy_schwarz",
            Suite::GeneralizedBuzano => "generalized_buzano",
            Suite::Buzano => "buzano",
            Suite::ProductBuzano => "product_buzano",
            Suite::ProductLinear => "product_linear",
            Suite::ZetaFamily => "zeta_family",
            Suite::EtaFamily => "eta_family",
            Suite::PowerSum => "power_sum",
            Suite::PowerSumClosed => "power_sum_closed",
            Suite::PowerSumState => "power_sum_state",
            Suite::Cube => "cube",
            Suite::CubeCross => "cube_cross",
            Suite::SixthPower => "sixth_power",
            Suite::Presets => "presets",
            Suite::Substitution => "substitution",
            Suite::Dominance => "dominance",
            Suite::EqualityProbes => "equality_probes",
            Suite::SpectralCorollary => "spectral_corollary",
        }
    }

    /// Suites that evaluate module tuples under a state.
    pub fn is_module_suite(self) -> bool {
        matches!(
            self,
            Suite::CauchySchwarz
                | Suite::GeneralizedBuzano
                | Suite::Buzano
                | Suite::ProductBuzano
                | Suite::ProductLinear
                | Suite::ZetaFamily
                | Suite::EtaFamily
        )
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Requested numerical-radius enclosure width, relative to `max(1, ‖a‖)`.
    pub solver: f64,
    pub bound_slack: f64,
    pub buzano_slack: f64,
    pub sandwich_slack: f64,
    pub power_slack: f64,
    /// Relative agreement of a closed-form specialization with its family.
    pub preset_agreement: f64,
    /// Relative agreement of the module-inequality specializations.
    pub module_agreement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            solver: 1e-11,
            bound_slack: 1e-9,
            buzano_slack: 1e-10,
            sandwich_slack: 1e-9,
            power_slack: 1e-8,
            preset_agreement: 1e-14,
            module_agreement: 1e-12,
        }
    }
}

/// A mean function with the point `ξ` it is evaluated at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanChoice {
    pub f: MeanSpec,
    pub xi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    /// `α = β = γ` runs over the grid.
    Diagonal,
    /// Every combination of grid points.
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateChoice {
    HilbertSchmidt,
    Pure,
    /// Hilbert–Schmidt on even trials, pure on odd ones.
    Alternate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Parameters {
    /// Grid for `α, β, γ` in the cube and sixth-power families.
    pub alphas: Vec<C64>,
    pub grid: GridMode,
    /// Orders `n` of the power-sum bounds.
    pub powers: Vec<u32>,
    pub max_power: u32,
    /// Largest `k` in the power inequality `v(aᵏ) ≤ v(a)ᵏ`.
    pub power_inequality_max: u32,
    /// Mean functions for the product and sixth-power families.
    pub means: Vec<MeanChoice>,
    pub module_alphas: Vec<C64>,
    /// Adds one `α` per trial drawn from the annulus `[lo, hi]` in modulus.
    pub alpha_annulus: Option<[f64; 2]>,
    pub zetas: Vec<f64>,
    pub etas: Vec<f64>,
    pub module_rows: Vec<usize>,
    pub tuple_sizes: Vec<usize>,
    pub states: StateChoice,
}

impl Default for Parameters {
    fn default() -> Self {
        let (s, c) = (std::f64::consts::FRAC_PI_3).sin_cos();
        Self {
            alphas: vec![
                C64::new(2.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 1.0),
                C64::new(0.5 * c, 0.5 * s),
                C64::new(10.0, 0.0),
                C64::new(1e6, 0.0),
            ],
            grid: GridMode::Diagonal,
            powers: vec![2, 3, 4, 5, 6],
            max_power: crate::bounds::DEFAULT_MAX_POWER,
            power_inequality_max: 6,
            means: vec![
                MeanChoice {
                    f: MeanSpec::IdentityOnUnitInterval,
                    xi: 0.0,
                },
                MeanChoice {
                    f: MeanSpec::IdentityOnUnitInterval,
                    xi: 0.5,
                },
                MeanChoice {
                    f: MeanSpec::AffineQuarter,
                    xi: 0.5,
                },
            ],
            module_alphas: vec![
                C64::new(2.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 1.0),
                C64::new(0.5, 0.0),
                C64::new(10.0, 0.0),
            ],
            alpha_annulus: Some([0.1, 10.0]),
            zetas: vec![0.0, 1.0, 10.0],
            etas: vec![-0.5, 0.5, 1.5],
            module_rows: vec![1, 2, 3, 4],
            tuple_sizes: vec![2, 3, 4, 5],
            states: StateChoice::Alternate,
        }
    }
}

impl Parameters {
    /// Rejects grids the bound and module evaluators cannot use.
    pub fn validate(&self) -> Result<()> {
        let p = self;
        if p.max_power < 2 {
            return Err(Error::Config("max_power must be at least 2".into()));
        }
        if let Some(&n) = p.powers.iter().find(|&&n| n < 2 || n > p.max_power) {
            return Err(Error::Config(format!("power {n} outside 2..={}", p.max_power)));
        }
        if !(1..=p.max_power.max(3)).contains(&p.power_inequality_max) {
            return Err(Error::Config("power_inequality_max outside 1..=max_power".into()));
        }
        if p.alphas
            .iter()
            .chain(&p.module_alphas)
            .any(|a| !(a.norm() > 0.0 && a.norm().is_finite()))
        {
            return Err(Error::Config("alpha grids must be nonzero and finite".into()));
        }
        if let Some([lo, hi]) = p.alpha_annulus {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::Config(format!("bad alpha annulus [{lo}, {hi}]")));
            }
        }
        for m in &p.means {
            crate::buzano::MeanFunction::from_spec(m.f.clone())?.weights(m.xi)?;
        }
        if p.zetas.iter().any(|&z| !(z >= 0.0 && z.is_finite())) {
            return Err(Error::Config("zetas must be nonnegative and finite".into()));
        }
        if p.etas.iter().any(|e| !(-0.5..=1.5).contains(e)) {
            return Err(Error::Config("etas must lie in [-1/2, 3/2]".into()));
        }
        if p.module_rows.is_empty() || p.module_rows.contains(&0) {
            return Err(Error::Config("module_rows must be nonempty and positive".into()));
        }
        if p.tuple_sizes.is_empty() || p.tuple_sizes.iter().any(|&k| k < 2) {
            return Err(Error::Config("tuple_sizes must be nonempty and at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Violations written in full (matrix dump and replay file); the rest are
    /// only counted.
    pub max_itemized: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("numrad-report"),
            max_itemized: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub seed: u64,
    pub suites: Vec<Suite>,
    pub ensembles: Vec<EnsembleSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub output: OutputConfig,
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Config(format!("{name} must be positive and finite")));
    }
    Ok(())
}

impl CampaignConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// The shipped default: every suite on dims 2, 3, 4 and 6.
    pub fn default_campaign() -> Self {
        Self::from_toml_str(DEFAULT_CAMPAIGN).expect("bundled default campaign is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.suites.is_empty() {
            return Err(Error::Config("no suites selected".into()));
        }
        if self.ensembles.is_empty() {
            return Err(Error::Config("no ensembles configured".into()));
        }
        if self.ensembles.len() > u32::MAX as usize {
            return Err(Error::Config("too many ensembles".into()));
        }
        for e in &self.ensembles {
            e.validate()?;
        }
        let t = &self.tolerances;
        if t.solver < crate::radius::MIN_TOL {
            return Err(Error::Config(format!(
                "solver tolerance {} is below {}",
                t.solver,
                crate::radius::MIN_TOL
            )));
        }
        for (name, x) in [
            ("solver", t.solver),
            ("bound_slack", t.bound_slack),
            ("buzano_slack", t.buzano_slack),
            ("sandwich_slack", t.sandwich_slack),
            ("power_slack", t.power_slack),
            ("preset_agreement", t.preset_agreement),
            ("module_agreement", t.module_agreement),
        ] {
            check_positive(name, x)?;
        }
        self.parameters.validate()
    }
}

/// Contents of the bundled default campaign file.
pub const DEFAULT_CAMPAIGN: &str = include_str!("../../../../campaign.toml");
