//! Car-following simulation toolkit built around the intelligent driver
//! model and a risk-weighted extension of it, with two classic references
//! (Krauss, and an IDM variant with a braking-distance gap term) for
//! comparison.
//!
//! The crate splits into:
//!
//! - [`params`]: parameter sets, units, and validation.
//! - [`models`]: the acceleration laws and their equilibria.
//! - [`dynamics`]: the multi-lane simulation engine with reaction delay,
//!   scripted lead profiles, and mid-run insertions.
//! - [`scenarios`]: seeded experiment builders and a trial runner that
//!   fans out over threads (feature `parallel`, on by default).
//! - [`metrics`]: stabilization detection, braking severity, and merge
//!   response measures over recorded trajectories.
//!
//! Units are SI throughout (m, s, m/s, m/s^2); the few km/h entry points
//! are named as such.

pub mod dynamics;
pub mod metrics;
pub mod models;
pub mod params;
pub mod scenarios;

pub use dynamics::{
    LeadProfile, RunOutcome, RunStatus, Simulation, StepConfig, StopWhen, Trajectory,
};
pub use metrics::{MetricsReport, StabilizationCriterion};
pub use models::ModelError;
pub use params::{ModelConfig, ModelKind, ModelParams, Observation, RiskParams, VariantParams};
pub use scenarios::{run_trial, run_trials, ScenarioConfig, ScenarioKind, TrialResult};
