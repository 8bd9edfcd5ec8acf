//! Reproducible experiment setups: a randomized relaxation run, two braking
//! platoons, and a merge disturbance, plus a seeded multi-trial runner.

use crate::dynamics::{
    InsertionEvent, LaneState, LeadProfile, RunStatus, Simulation, StepConfig, StopWhen,
    Trajectory, Vehicle, VEHICLE_LENGTH,
};
use crate::metrics::{self, MetricsReport, StabilizationCriterion, MERGE_RESPONSE_ACCEL};
use crate::models::{desired_gap, equilibrium_gap};
use crate::params::{ModelConfig, ModelKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The four experiment families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    /// Two lanes of vehicles with randomized speeds and matching gaps,
    /// left to settle into steady flow.
    Relaxation,
    /// A scripted leader and one follower, starting from equilibrium.
    PairBraking,
    /// A scripted leader and nine followers, starting from equilibrium.
    PlatoonBraking,
    /// Steady columns disturbed by one mid-column insertion per lane.
    Merge,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::Relaxation,
        ScenarioKind::PairBraking,
        ScenarioKind::PlatoonBraking,
        ScenarioKind::Merge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Relaxation => "relaxation",
            ScenarioKind::PairBraking => "pair-braking",
            ScenarioKind::PlatoonBraking => "platoon-braking",
            ScenarioKind::Merge => "merge",
        }
    }

    pub fn from_name(name: &str) -> Option<ScenarioKind> {
        ScenarioKind::ALL.iter().copied().find(|k| k.name() == name)
    }
}

/// Everything needed to reproduce a batch of trials bit for bit.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub model: ModelKind,
    pub config: ModelConfig,
    pub step: StepConfig,
    /// Vehicles per lane (including the scripted head where present).
    pub n_vehicles: usize,
    pub n_lanes: usize,
    pub t_max: f64,
    /// Merge only: when the new vehicle appears, s.
    pub t_insert: f64,
    pub base_seed: u64,
    pub trials: usize,
    /// Head vehicle's script for the braking scenarios. `None` picks the
    /// default cruise-then-brake profile at the speed limit.
    pub profile: Option<LeadProfile>,
    pub criterion: StabilizationCriterion,
    /// Retain full trajectories in the results (memory-hungry for long
    /// runs; metrics are computed either way).
    pub keep_trajectory: bool,
}

impl ScenarioConfig {
    /// Scenario defaults: vehicle counts, lane counts, and time limits per
    /// kind; everything else from the type defaults and seed 42.
    pub fn new(kind: ScenarioKind, model: ModelKind) -> Self {
        let (n_vehicles, n_lanes, t_max) = match kind {
            ScenarioKind::Relaxation => (40, 2, 5000.0),
            ScenarioKind::PairBraking => (2, 1, 300.0),
            ScenarioKind::PlatoonBraking => (10, 1, 300.0),
            ScenarioKind::Merge => (40, 2, 5000.0),
        };
        ScenarioConfig {
            kind,
            model,
            config: ModelConfig::default(),
            step: StepConfig::default(),
            n_vehicles,
            n_lanes,
            t_max,
            t_insert: 10.0,
            base_seed: 42,
            trials: 1,
            profile: None,
            criterion: StabilizationCriterion::default(),
            keep_trajectory: false,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        self.config
            .validate()
            .map_err(|e| e.to_string())?;
        self.step.validate().map_err(|e| e.to_string())?;
        if self.n_vehicles < 2 {
            return Err(format!(
                "scenario needs at least 2 vehicles per lane (got {})",
                self.n_vehicles
            ));
        }
        if self.n_lanes == 0 {
            return Err("scenario needs at least one lane".into());
        }
        if self.t_max <= self.step.dt {
            return Err(format!(
                "time limit t_max must exceed one step (got {} s with dt {} s)",
                self.t_max, self.step.dt
            ));
        }
        if self.trials == 0 {
            return Err("trial count must be at least 1".into());
        }
        if self.kind == ScenarioKind::Merge && self.t_insert >= self.t_max {
            return Err(format!(
                "insertion time {} s is past the time limit {} s",
                self.t_insert, self.t_max
            ));
        }
        if let Some(p) = &self.profile {
            p.validate().map_err(|e| e.to_string())?;
        }
        Ok(())
    }

    fn head_profile(&self) -> LeadProfile {
        self.profile
            .clone()
            .unwrap_or_else(|| LeadProfile::default_braking(self.config.variant.v_max))
    }
}

/// SplitMix64 finalizer. Bijective on u64, so distinct inputs give
/// distinct outputs.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a base seed. Used twice over:
/// once per trial (`stream` = trial index), then per lane within a trial.
/// Insertion events use lane streams offset by 2^32 to keep them disjoint
/// from the initial-condition streams.
pub fn mix_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream))
}

const INSERTION_STREAM_OFFSET: u64 = 1 << 32;

/// Gap a vehicle at speed `v` settles at, used to lay out steady initial
/// columns. Models with a usable steady state get their own equilibrium
/// gap; Krauss, whose steady gap depends on history, gets the plain
/// desired gap at `v` instead (close to where its columns actually land).
pub fn initial_gap_for(model: ModelKind, v: f64, cfg: &ModelConfig) -> Result<f64, String> {
    match model {
        ModelKind::Krauss => Ok(desired_gap(v, 0.0, &cfg.params)),
        _ => equilibrium_gap(model, v, cfg).map_err(|e| e.to_string()),
    }
}

/// Lays out one lane, rearmost vehicle at x = 0. `speeds_and_gaps[i]` is
/// (speed of vehicle i, gap in front of vehicle i); the front vehicle's
/// gap entry is ignored.
fn build_lane(speeds_and_gaps: &[(f64, f64)], delay_steps: usize, next_id: &mut u32) -> LaneState {
    let mut vehicles = Vec::with_capacity(speeds_and_gaps.len());
    let mut x = 0.0;
    for (i, &(v, _)) in speeds_and_gaps.iter().enumerate() {
        if i > 0 {
            x += VEHICLE_LENGTH + speeds_and_gaps[i - 1].1;
        }
        vehicles.push(Vehicle::new(*next_id, x, v, delay_steps));
        *next_id += 1;
    }
    LaneState { vehicles }
}

/// Builds the simulation for one trial. Pure in (cfg, trial): repeated
/// calls produce identical initial states.
pub fn build_trial(cfg: &ScenarioConfig, trial: usize) -> Result<Simulation, String> {
    cfg.validate()?;
    let trial_seed = mix_seed(cfg.base_seed, trial as u64);
    let delay = cfg.step.delay_steps();
    let v_max = cfg.config.variant.v_max;
    let mut next_id: u32 = 0;
    let mut lanes = Vec::with_capacity(cfg.n_lanes);
    let mut events = Vec::new();

    match cfg.kind {
        ScenarioKind::Relaxation => {
            for lane in 0..cfg.n_lanes {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(trial_seed, lane as u64));
                let sg: Vec<(f64, f64)> = (0..cfg.n_vehicles)
                    .map(|_| {
                        let v = rng.gen_range(0.8 * v_max..v_max);
                        // Gap each vehicle would want at its drawn speed,
                        // from the shared car-following parameters, so the
                        // starting geometry is identical across models.
                        (v, desired_gap(v, 0.0, &cfg.config.params))
                    })
                    .collect();
                lanes.push(build_lane(&sg, delay, &mut next_id));
            }
        }
        ScenarioKind::PairBraking | ScenarioKind::PlatoonBraking => {
            let gap = initial_gap_for(cfg.model, v_max, &cfg.config)?;
            let sg = vec![(v_max, gap); cfg.n_vehicles];
            for _ in 0..cfg.n_lanes {
                let mut lane = build_lane(&sg, delay, &mut next_id);
                let head = lane.vehicles.len() - 1;
                lane.vehicles[head].profile = Some(cfg.head_profile());
                lanes.push(lane);
            }
        }
        ScenarioKind::Merge => {
            let gap = initial_gap_for(cfg.model, v_max, &cfg.config)?;
            let sg = vec![(v_max, gap); cfg.n_vehicles];
            for lane in 0..cfg.n_lanes {
                lanes.push(build_lane(&sg, delay, &mut next_id));
                events.push(InsertionEvent {
                    t: cfg.t_insert,
                    lane,
                    speed: v_max,
                    seed: mix_seed(trial_seed, INSERTION_STREAM_OFFSET + lane as u64),
                });
            }
        }
    }

    let mut sim = Simulation::new(cfg.model, cfg.config.clone(), cfg.step, lanes);
    if !events.is_empty() {
        sim = sim.with_events(events);
    }
    Ok(sim)
}

/// Outcome of one trial: the run status, derived metrics, and optionally
/// the full trajectory.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub status: RunStatus,
    pub metrics: MetricsReport,
    /// Rear half of the column crawling below a tenth of the speed limit
    /// over the opening stretch of the run.
    pub stalled: bool,
    /// Lowest and highest speed any vehicle reached, for envelope checks.
    pub v_low: f64,
    pub v_high: f64,
    pub trajectory: Option<Trajectory>,
}

fn speed_envelope(traj: &Trajectory) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for step in &traj.steps {
        for lane in &step.lanes {
            for s in lane {
                lo = lo.min(s.v);
                hi = hi.max(s.v);
            }
        }
    }
    (lo, hi)
}

/// Runs one seeded trial and reduces its trajectory to metrics.
pub fn run_trial(cfg: &ScenarioConfig, trial: usize) -> Result<TrialResult, String> {
    let mut sim = build_trial(cfg, trial)?;
    let crit = cfg.criterion;
    let v_max = cfg.config.variant.v_max;

    let not_before = match cfg.kind {
        ScenarioKind::Relaxation => 0.0,
        ScenarioKind::PairBraking | ScenarioKind::PlatoonBraking => {
            cfg.head_profile().first_ramp_start().unwrap_or(0.0)
        }
        ScenarioKind::Merge => cfg.t_insert,
    };
    let outcome = sim
        .run(
            StopWhen::Stabilized {
                criterion: crit,
                not_before,
            },
            cfg.t_max,
        )
        .map_err(|e| e.to_string())?;
    let traj = &outcome.trajectory;

    let mut m = MetricsReport::default();
    let stab = metrics::detect_stabilization_after(traj, &crit, not_before);
    if let Some(s) = &stab {
        m.spacing = Some(s.spacing);
        m.mean_speed = Some(s.mean_speed);
        m.throughput = Some(metrics::throughput(s.spacing, s.mean_speed));
        // Report the settling time relative to the disturbance that
        // started the clock (brake onset or insertion).
        m.period = Some(s.period - not_before);
    }
    match cfg.kind {
        ScenarioKind::PairBraking | ScenarioKind::PlatoonBraking => {
            let profile = cfg.head_profile();
            let b = metrics::braking_metrics(traj, &profile, &crit);
            m.braking_duration = b.duration;
            m.peak_decel = Some(b.peak_decel);
            m.iso_window = Some(b.iso_window);
            if let Some(out) = metrics::final_spacing_per_follower(traj, &crit, not_before) {
                m.final_spacing = out.final_spacing;
                m.spacing_reduction = out.reduction;
            }
        }
        ScenarioKind::Merge => {
            let per_lane = metrics::response_times(traj, cfg.t_insert, MERGE_RESPONSE_ACCEL);
            let hits: Vec<f64> = per_lane.into_iter().flatten().collect();
            if !hits.is_empty() {
                m.response_time = Some(hits.iter().sum::<f64>() / hits.len() as f64);
            }
        }
        ScenarioKind::Relaxation => {}
    }

    let (v_low, v_high) = speed_envelope(traj);
    let stalled = metrics::is_stalled(traj, v_max);
    Ok(TrialResult {
        trial,
        seed: mix_seed(cfg.base_seed, trial as u64),
        status: outcome.status,
        metrics: m,
        stalled,
        v_low,
        v_high,
        trajectory: if cfg.keep_trajectory {
            Some(outcome.trajectory)
        } else {
            None
        },
    })
}

/// Runs every trial in the batch, in parallel when the `parallel` feature
/// is on. Results come back in trial order either way.
#[cfg(feature = "parallel")]
pub fn run_trials(cfg: &ScenarioConfig) -> Result<Vec<TrialResult>, String> {
    use rayon::prelude::*;
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect()
}

/// Sequential fallback with the same signature and ordering.
#[cfg(not(feature = "parallel"))]
pub fn run_trials(cfg: &ScenarioConfig) -> Result<Vec<TrialResult>, String> {
    (0..cfg.trials).map(|t| run_trial(cfg, t)).collect()
}
