//! Discrete-time platoon dynamics.
//!
//! Vehicles advance with a semi-implicit Euler step: the acceleration chosen
//! from the current (delayed) observations updates the speed, and the new
//! speed moves the position. Speeds are clamped to `[0, v_max]`; the
//! acceleration recorded in the trajectory is the realized `(v' - v) / dt`,
//! which is also what the stabilization criterion sees, so a vehicle pinned
//! at the speed limit counts as steady.

use crate::metrics::StabilizationCriterion;
use crate::models::{self, ModelError, OPEN_ROAD_GAP};
use crate::params::{ModelConfig, ModelKind, Observation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;
use thiserror::Error;

/// Default integration step, s.
pub const DEFAULT_DT: f64 = 0.1;
/// Default vehicle length, m (affects positions and collision checks only).
pub const VEHICLE_LENGTH: f64 = 4.5;
/// Default observation delay T', s.
pub const DEFAULT_REACTION: f64 = 1.0;

/// Engine-level stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    /// Integration step, s.
    pub dt: f64,
    /// Observation delay T' applied to what each follower sees, s.
    pub reaction: f64,
    /// Hard speed clamp, m/s.
    pub v_max: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            dt: DEFAULT_DT,
            reaction: DEFAULT_REACTION,
            v_max: crate::params::mps_from_kmh(crate::params::DEFAULT_VMAX_KMH),
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimError::BadConfig(format!("dt must be > 0 (got {})", self.dt)));
        }
        if !(self.reaction >= 0.0) {
            return Err(SimError::BadConfig(format!(
                "reaction time T' must be >= 0 (got {})",
                self.reaction
            )));
        }
        if !(self.v_max > 0.0) {
            return Err(SimError::BadConfig(format!("v_max must be > 0 (got {})", self.v_max)));
        }
        Ok(())
    }

    /// Ring-buffer depth equivalent to the reaction delay.
    pub fn delay_steps(&self) -> usize {
        (self.reaction / self.dt).round() as usize
    }
}

/// What a follower perceived about its leader some steps ago: the
/// bumper-to-bumper gap and the leader speed at that instant.
///
/// Keeping the *gap* (rather than the leader's past position) delayed means
/// a steady-state column is observed exactly as it is, so equilibria are
/// unchanged by the delay; only transients arrive late.
#[derive(Debug, Clone)]
pub struct DelayBuffer {
    depth: usize,
    entries: VecDeque<(f64, f64)>,
}

impl DelayBuffer {
    pub fn new(depth: usize) -> Self {
        DelayBuffer {
            depth,
            entries: VecDeque::with_capacity(depth + 1),
        }
    }

    /// Record the current (gap, leader speed) and return the delayed pair:
    /// exactly `depth` steps old once warmed up, the oldest available while
    /// the buffer is still filling. Depth 0 returns the pair just pushed.
    pub fn push_and_observe(&mut self, gap: f64, v_leader: f64) -> (f64, f64) {
        self.entries.push_back((gap, v_leader));
        if self.entries.len() > self.depth + 1 {
            self.entries.pop_front();
        }
        *self.entries.front().expect("buffer never empty after push")
    }
}

/// One segment of a scripted lead-vehicle speed profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileSegment {
    /// Drive at `speed` for `duration` seconds.
    Hold { speed: f64, duration: f64 },
    /// Change speed at `rate` (m/s^2, signed) until `target` is reached;
    /// the segment ends exactly at the target.
    Ramp { rate: f64, target: f64 },
}

/// Piecewise speed schedule for a scripted lane head. After the last
/// segment the final speed is held indefinitely.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LeadProfile {
    pub segments: Vec<ProfileSegment>,
}

/// Default braking schedule: cruise 5 s, then brake at -6 m/s^2 down to
/// 9.9 m/s and hold. The 9.9 m/s target is the speed whose steady-state
/// IDM gap is about 18 m, so a braked column settles near that spacing.
pub const DEFAULT_BRAKE_HOLD: f64 = 5.0;
pub const DEFAULT_BRAKE_RATE: f64 = -6.0;
pub const DEFAULT_BRAKE_TARGET: f64 = 9.9;

impl LeadProfile {
    /// Cruise at `v_cruise` for `hold` seconds, then ramp at `rate` to
    /// `target` and hold that.
    pub fn brake_profile(v_cruise: f64, hold: f64, rate: f64, target: f64) -> Self {
        LeadProfile {
            segments: vec![
                ProfileSegment::Hold {
                    speed: v_cruise,
                    duration: hold,
                },
                ProfileSegment::Ramp { rate, target },
            ],
        }
    }

    /// The default braking schedule starting from `v_cruise`.
    pub fn default_braking(v_cruise: f64) -> Self {
        Self::brake_profile(v_cruise, DEFAULT_BRAKE_HOLD, DEFAULT_BRAKE_RATE, DEFAULT_BRAKE_TARGET)
    }

    /// A profile that just cruises at `speed` forever.
    pub fn constant(speed: f64) -> Self {
        LeadProfile {
            segments: vec![ProfileSegment::Hold {
                speed,
                duration: f64::INFINITY,
            }],
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let mut speed: Option<f64> = None;
        for seg in &self.segments {
            match *seg {
                ProfileSegment::Hold { speed: u, duration } => {
                    if !(u >= 0.0) || !(duration >= 0.0) {
                        return Err(SimError::BadConfig(format!("bad hold segment {seg:?}")));
                    }
                    speed = Some(u);
                }
                ProfileSegment::Ramp { rate, target } => {
                    let from = speed.ok_or_else(|| {
                        SimError::BadConfig("profile must start with a hold segment".into())
                    })?;
                    if rate == 0.0 || !(target >= 0.0) || (target - from) * rate < 0.0 {
                        return Err(SimError::BadConfig(format!(
                            "ramp {seg:?} cannot reach its target from {from} m/s"
                        )));
                    }
                    speed = Some(target);
                }
            }
        }
        Ok(())
    }

    /// Scheduled speed at time `t`.
    pub fn speed_at(&self, t: f64) -> f64 {
        let mut t0 = 0.0;
        let mut speed = 0.0;
        for seg in &self.segments {
            match *seg {
                ProfileSegment::Hold { speed: u, duration } => {
                    speed = u;
                    if t < t0 + duration {
                        return u;
                    }
                    t0 += duration;
                }
                ProfileSegment::Ramp { rate, target } => {
                    let duration = (target - speed) / rate;
                    if t < t0 + duration {
                        return speed + rate * (t - t0);
                    }
                    speed = target;
                    t0 += duration;
                }
            }
        }
        speed
    }

    /// Start time of the first ramp (braking onset), if any.
    pub fn first_ramp_start(&self) -> Option<f64> {
        let mut t0 = 0.0;
        for seg in &self.segments {
            match *seg {
                ProfileSegment::Hold { duration, .. } => t0 += duration,
                ProfileSegment::Ramp { .. } => return Some(t0),
            }
        }
        None
    }

    /// Time after which the scheduled speed no longer changes.
    pub fn settle_time(&self) -> f64 {
        let mut speed = match self.segments.first() {
            Some(ProfileSegment::Hold { speed, .. }) => *speed,
            _ => 0.0,
        };
        let mut t0 = 0.0;
        let mut settle = 0.0;
        for seg in &self.segments {
            match *seg {
                ProfileSegment::Hold { speed: u, duration } => {
                    if u != speed {
                        settle = t0;
                        speed = u;
                    }
                    if duration.is_infinite() {
                        break;
                    }
                    t0 += duration;
                }
                ProfileSegment::Ramp { rate, target } => {
                    t0 += (target - speed) / rate;
                    if target != speed {
                        settle = t0;
                    }
                    speed = target;
                }
            }
        }
        settle
    }
}

/// Kinematic state of one vehicle. `x` is the front-bumper position along
/// the lane, increasing in the driving direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub x: f64,
    pub v: f64,
    /// Realized acceleration of the last step, m/s^2.
    pub a: f64,
    pub length: f64,
}

#[derive(Debug, Clone)]
pub struct Vehicle {
    pub id: u32,
    pub state: VehicleState,
    /// Scripted speed schedule; `None` means the vehicle follows the
    /// simulation's model (against open road if it has no leader).
    pub profile: Option<LeadProfile>,
    /// Risk factor of the last evaluated observation (NaN for laws
    /// without one).
    pub risk: f64,
    buffer: DelayBuffer,
}

impl Vehicle {
    pub fn new(id: u32, x: f64, v: f64, delay_steps: usize) -> Self {
        Vehicle {
            id,
            state: VehicleState {
                x,
                v,
                a: 0.0,
                length: VEHICLE_LENGTH,
            },
            profile: None,
            risk: f64::NAN,
            buffer: DelayBuffer::new(delay_steps),
        }
    }
}

/// One lane of vehicles, index 0 rearmost. The lane is open-ended: the head
/// vehicle sees a dummy leader far ahead at its own speed.
#[derive(Debug, Clone, Default)]
pub struct LaneState {
    pub vehicles: Vec<Vehicle>,
}

impl LaneState {
    /// Bumper-to-bumper gap in front of vehicle `i`: the rear bumper of
    /// vehicle `i + 1` minus the front bumper of `i`.
    pub fn gap(&self, i: usize) -> f64 {
        let front = &self.vehicles[i + 1];
        front.state.x - front.state.length - self.vehicles[i].state.x
    }

    pub fn len(&self) -> usize {
        self.vehicles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vehicles.is_empty()
    }
}

/// A mid-run merge: one vehicle dropped into `lane` at time `t`, at the
/// midpoint of a feasible randomly drawn gap, at speed `speed`.
#[derive(Debug, Clone, Copy)]
pub struct InsertionEvent {
    pub t: f64,
    pub lane: usize,
    pub speed: f64,
    /// Seed for the slot draw, so trials are reproducible.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEvent {
    pub t: f64,
    pub lane: usize,
    /// Index (at collision time) of the rear vehicle of the colliding pair.
    pub rear_index: usize,
    pub rear_id: u32,
    pub front_id: u32,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0}")]
    BadConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no gap wide enough to insert a vehicle in lane {lane} at t = {t}")]
    InsertionInfeasible { t: f64, lane: usize },
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    /// The stabilization criterion held for its full window; `at` is the
    /// window start time.
    Stabilized { at: f64 },
    /// The time limit was reached first.
    ReachedTimeLimit,
    /// Two vehicles touched.
    Collided(CollisionEvent),
}

/// Stop rule for [`Simulation::run`]. Every run also carries a hard time
/// limit.
#[derive(Debug, Clone, Copy)]
pub enum StopWhen {
    /// Run to the time limit.
    TimeLimit,
    /// Stop as soon as the criterion has held for its window, ignoring any
    /// quiescence before `not_before` (useful when a scripted disturbance
    /// is still to come).
    Stabilized {
        criterion: StabilizationCriterion,
        not_before: f64,
    },
}

/// Per-vehicle record in a trajectory snapshot. `gap` is NaN for the lane
/// head (no physical leader) and `risk` is NaN for vehicles whose law has
/// no risk factor.
#[derive(Debug, Clone, Copy)]
pub struct VehSnap {
    pub id: u32,
    pub x: f64,
    pub v: f64,
    pub a: f64,
    pub gap: f64,
    pub risk: f64,
}

#[derive(Debug, Clone)]
pub struct TrajStep {
    pub t: f64,
    pub lanes: Vec<Vec<VehSnap>>,
}

/// Full recorded run: one snapshot per step, plus the initial state.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    pub steps: Vec<TrajStep>,
}

impl Trajectory {
    /// Number of integration steps taken (snapshots minus the initial one).
    pub fn n_steps(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    pub fn last(&self) -> &TrajStep {
        self.steps.last().expect("trajectory has at least the initial snapshot")
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub trajectory: Trajectory,
}

/// The stepping engine: a set of independent lanes sharing one model and
/// one parameter set.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub model: ModelKind,
    pub cfg: ModelConfig,
    pub step_cfg: StepConfig,
    pub lanes: Vec<LaneState>,
    events: Vec<InsertionEvent>,
    step_index: u64,
    next_id: Vec<u32>,
}

impl Simulation {
    pub fn new(model: ModelKind, cfg: ModelConfig, step_cfg: StepConfig, lanes: Vec<LaneState>) -> Self {
        let next_id = lanes
            .iter()
            .map(|l| l.vehicles.iter().map(|v| v.id + 1).max().unwrap_or(0))
            .collect();
        Simulation {
            model,
            cfg,
            step_cfg,
            lanes,
            events: Vec::new(),
            step_index: 0,
            next_id,
        }
    }

    /// Schedule merge events (sorted internally by time).
    pub fn with_events(mut self, mut events: Vec<InsertionEvent>) -> Self {
        events.sort_by(|a, b| (a.t, a.lane).partial_cmp(&(b.t, b.lane)).unwrap());
        self.events = events;
        self
    }

    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.step_cfg.dt
    }

    fn fire_due_events(&mut self) -> Result<(), SimError> {
        let now = self.time();
        while let Some(ev) = self.events.first().copied() {
            if ev.t > now + 1e-9 {
                break;
            }
            self.events.remove(0);
            self.insert_vehicle(ev)?;
        }
        Ok(())
    }

    /// Drop a new vehicle at the midpoint of a feasible gap: both resulting
    /// half-gaps must exceed one vehicle length. Infeasible draws are
    /// redrawn; if no gap in the lane qualifies the run fails.
    fn insert_vehicle(&mut self, ev: InsertionEvent) -> Result<(), SimError> {
        let delay_steps = self.step_cfg.delay_steps();
        let lane = &mut self.lanes[ev.lane];
        let n_gaps = lane.len().saturating_sub(1);
        let feasible =
            |lane: &LaneState, slot: usize| (lane.gap(slot) - VEHICLE_LENGTH) / 2.0 > VEHICLE_LENGTH;
        if n_gaps == 0 || !(0..n_gaps).any(|s| feasible(lane, s)) {
            return Err(SimError::InsertionInfeasible { t: ev.t, lane: ev.lane });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(ev.seed);
        let slot = loop {
            let s = rng.gen_range(0..n_gaps);
            if feasible(lane, s) {
                break s;
            }
        };
        let gap = lane.gap(slot);
        let x = lane.vehicles[slot].state.x + VEHICLE_LENGTH + (gap - VEHICLE_LENGTH) / 2.0;
        let id = self.next_id[ev.lane];
        self.next_id[ev.lane] += 1;
        lane.vehicles.insert(slot + 1, Vehicle::new(id, x, ev.speed, delay_steps));
        Ok(())
    }

    /// Advance one step. Accelerations for every vehicle are computed from
    /// the pre-step state (synchronous update), then all vehicles integrate.
    pub fn step(&mut self) -> Result<Option<CollisionEvent>, SimError> {
        self.fire_due_events()?;
        let t = self.time();
        let dt = self.step_cfg.dt;
        let t_next = (self.step_index + 1) as f64 * dt;
        let _ = t;

        let mut collision = None;
        for (li, lane) in self.lanes.iter_mut().enumerate() {
            let n = lane.vehicles.len();
            let mut commanded = Vec::with_capacity(n);
            for i in 0..n {
                let veh_v = lane.vehicles[i].state.v;
                if let Some(profile) = &lane.vehicles[i].profile {
                    let v_next = profile.speed_at(t_next).clamp(0.0, self.step_cfg.v_max);
                    commanded.push((v_next - veh_v) / dt);
                    continue;
                }
                let obs = if i + 1 < n {
                    let gap_now = lane.gap(i);
                    let leader_v = lane.vehicles[i + 1].state.v;
                    let (gap_d, vl_d) = lane.vehicles[i].buffer.push_and_observe(gap_now, leader_v);
                    Observation::new(gap_d, veh_v, vl_d)
                } else {
                    Observation::new(OPEN_ROAD_GAP, veh_v, veh_v)
                };
                commanded.push(models::model_acceleration(self.model, obs, &self.cfg, dt)?);
                lane.vehicles[i].risk = if self.model == ModelKind::Seidm {
                    models::risk_factor(obs, &self.cfg.params, &self.cfg.risk)
                } else {
                    f64::NAN
                };
            }
            for (i, veh) in lane.vehicles.iter_mut().enumerate() {
                let v_new = (veh.state.v + commanded[i] * dt).clamp(0.0, self.step_cfg.v_max);
                veh.state.a = (v_new - veh.state.v) / dt;
                veh.state.v = v_new;
                veh.state.x += v_new * dt;
            }
            if collision.is_none() {
                for i in 0..n.saturating_sub(1) {
                    if lane.gap(i) <= 0.0 {
                        collision = Some(CollisionEvent {
                            t: t_next,
                            lane: li,
                            rear_index: i,
                            rear_id: lane.vehicles[i].id,
                            front_id: lane.vehicles[i + 1].id,
                        });
                        break;
                    }
                }
            }
        }
        self.step_index += 1;
        Ok(collision)
    }

    fn snapshot(&self) -> TrajStep {
        let lanes = self
            .lanes
            .iter()
            .map(|lane| {
                lane.vehicles
                    .iter()
                    .enumerate()
                    .map(|(i, veh)| VehSnap {
                        id: veh.id,
                        x: veh.state.x,
                        v: veh.state.v,
                        a: veh.state.a,
                        gap: if i + 1 < lane.len() { lane.gap(i) } else { f64::NAN },
                        risk: veh.risk,
                    })
                    .collect()
            })
            .collect();
        TrajStep { t: self.time(), lanes }
    }

    /// Run until the stop rule fires, a collision happens, or `t_max`
    /// elapses, recording every step.
    pub fn run(&mut self, stop: StopWhen, t_max: f64) -> Result<RunOutcome, SimError> {
        self.step_cfg.validate()?;
        self.cfg.validate().map_err(|e| SimError::BadConfig(e.to_string()))?;
        let dt = self.step_cfg.dt;
        let max_steps = (t_max / dt).round() as u64;
        let mut trajectory = Trajectory {
            dt,
            steps: Vec::new(),
        };
        trajectory.steps.push(self.snapshot());

        let (hold_steps, not_before_idx) = match stop {
            StopWhen::TimeLimit => (u64::MAX, 0u64),
            StopWhen::Stabilized { criterion, not_before } => (
                (criterion.hold_window / dt).round() as u64,
                (not_before / dt - 1e-9).ceil().max(0.0) as u64,
            ),
        };
        let check_quiet = crate::metrics::snapshot_is_quiet;
        let mut last_bad: i64 = -1;
        if let StopWhen::Stabilized { criterion, .. } = &stop {
            if !check_quiet(&trajectory.steps[0], criterion) {
                last_bad = 0;
            }
        }

        while self.step_index < max_steps {
            let collision = self.step()?;
            let snap = self.snapshot();
            if let Some(event) = collision {
                trajectory.steps.push(snap);
                return Ok(RunOutcome {
                    status: RunStatus::Collided(event),
                    trajectory,
                });
            }
            if let StopWhen::Stabilized { criterion, .. } = &stop {
                if !check_quiet(&snap, criterion) {
                    last_bad = self.step_index as i64;
                }
            }
            trajectory.steps.push(snap);
            if let StopWhen::Stabilized { .. } = stop {
                let quiet_start = (last_bad + 1).max(not_before_idx as i64) as u64;
                if self.step_index >= quiet_start && self.step_index - quiet_start >= hold_steps {
                    return Ok(RunOutcome {
                        status: RunStatus::Stabilized {
                            at: quiet_start as f64 * dt,
                        },
                        trajectory,
                    });
                }
            }
        }
        Ok(RunOutcome {
            status: RunStatus::ReachedTimeLimit,
            trajectory,
        })
    }
}
