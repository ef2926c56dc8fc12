//! Seeded ensembles, campaign configuration, parallel campaign runs and
//! replayable reports.

pub mod campaign;
pub mod config;
pub mod ensembles;
pub mod report;
pub mod rng;

pub use campaign::{run_campaign, run_trial, CampaignReport, Check, TrialSettings};
pub use config::{CampaignConfig, Suite};
pub use ensembles::{sample_element, sample_module_tuple, sample_state, EnsembleKind, EnsembleSpec, StateKind};
pub use report::{replay, write_reports, ReplayOutcome, TrialDump};
