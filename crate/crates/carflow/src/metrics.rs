//! Trajectory analysis: when a run settles, how it brakes, how a merge
//! disturbance propagates.

use crate::dynamics::{TrajStep, Trajectory, LeadProfile};

/// When a platoon counts as settled: every vehicle's realized acceleration
/// within `accel_tol` and speed within `speed_tol` of its lane's mean, held
/// for `hold_window` seconds without interruption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizationCriterion {
    /// m/s^2.
    pub accel_tol: f64,
    /// m/s, band around the per-lane mean speed.
    pub speed_tol: f64,
    /// s.
    pub hold_window: f64,
}

impl Default for StabilizationCriterion {
    fn default() -> Self {
        StabilizationCriterion {
            accel_tol: 0.005,
            speed_tol: 0.05,
            hold_window: 30.0,
        }
    }
}

/// Deceleration ceiling (magnitude, m/s^2) against which the windowed
/// braking metric is reported. A reporting threshold only; it never feeds
/// back into the dynamics.
pub const DEFAULT_ISO_DECEL_LIMIT: f64 = 3.5;

/// Length of the moving-average window for [`BrakingMetrics::iso_window`], s.
pub const ISO_WINDOW_SECONDS: f64 = 2.0;

/// Threshold on the rearmost vehicle's |a| that counts as "reacted", m/s^2.
pub const DEFAULT_RESPONSE_ACCEL: f64 = 0.01;

/// Rear-reaction threshold used by the merge scenario summary, m/s^2.
///
/// A mid-column insertion at cruise spacing sends a wave rearward that
/// shrinks by roughly a factor of five per vehicle, so over a long column
/// it reaches the rear orders of magnitude below the braking-scale
/// default. 1e-4 sits well above integration noise (~1e-12 at
/// equilibrium) and below the weakest rear-wave amplitudes observed
/// (~5e-4), so the arrival time is sharply defined for every seed.
pub const MERGE_RESPONSE_ACCEL: f64 = 1e-4;

/// Observation window for the stall check, s, and the fraction of the
/// speed limit below which the rear half counts as stalled.
pub const STALL_WINDOW_SECONDS: f64 = 300.0;
pub const STALL_SPEED_FRACTION: f64 = 0.1;

/// One snapshot passes the criterion if every vehicle in every lane is
/// within tolerance. This is the exact predicate the engine's early-stop
/// rule uses, so offline detection agrees with online stopping.
pub fn snapshot_is_quiet(step: &TrajStep, crit: &StabilizationCriterion) -> bool {
    step.lanes.iter().all(|lane| {
        let mean_v = lane.iter().map(|s| s.v).sum::<f64>() / lane.len() as f64;
        lane.iter()
            .all(|s| s.a.abs() < crit.accel_tol && (s.v - mean_v).abs() < crit.speed_tol)
    })
}

/// Result of a successful stabilization search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stabilization {
    /// Start of the first fully quiet window, s.
    pub period: f64,
    /// Mean bumper-to-bumper gap over that window, averaged across lanes, m.
    pub spacing: f64,
    /// Mean vehicle speed over that window, m/s.
    pub mean_speed: f64,
}

/// Earliest `t` such that every snapshot in `[t, t + hold_window]` passes
/// the criterion. `None` if no such window fits in the trajectory.
pub fn detect_stabilization(traj: &Trajectory, crit: &StabilizationCriterion) -> Option<Stabilization> {
    detect_stabilization_after(traj, crit, 0.0)
}

/// Same search, but ignoring quiet time before `not_before` (a scripted
/// disturbance still to come, say).
pub fn detect_stabilization_after(
    traj: &Trajectory,
    crit: &StabilizationCriterion,
    not_before: f64,
) -> Option<Stabilization> {
    let dt = traj.dt;
    let hold_steps = (crit.hold_window / dt).round() as usize;
    let first_idx = ((not_before / dt - 1e-9).ceil().max(0.0)) as usize;
    let n = traj.steps.len();
    if n == 0 {
        return None;
    }

    let mut run_start: Option<usize> = None;
    for k in 0..n {
        if snapshot_is_quiet(&traj.steps[k], crit) {
            let start = *run_start.get_or_insert(k);
            let start = start.max(first_idx);
            if k >= start && k - start >= hold_steps {
                return Some(summarize_window(traj, start, k));
            }
        } else {
            run_start = None;
        }
    }
    None
}

fn summarize_window(traj: &Trajectory, start: usize, end: usize) -> Stabilization {
    let mut gap_sum = 0.0;
    let mut gap_n = 0usize;
    let mut v_sum = 0.0;
    let mut v_n = 0usize;
    for step in &traj.steps[start..=end] {
        for lane in &step.lanes {
            for (i, s) in lane.iter().enumerate() {
                v_sum += s.v;
                v_n += 1;
                if i + 1 < lane.len() {
                    gap_sum += s.gap;
                    gap_n += 1;
                }
            }
        }
    }
    Stabilization {
        period: traj.steps[start].t,
        spacing: gap_sum / gap_n.max(1) as f64,
        mean_speed: v_sum / v_n.max(1) as f64,
    }
}

/// Vehicles per hour sustained by a column at `speed` (m/s) with
/// bumper-to-bumper `spacing` (m): `3600 * speed / spacing`.
pub fn throughput(spacing: f64, speed: f64) -> f64 {
    3600.0 * speed / spacing
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrakingMetrics {
    /// Leader brake onset to restored stabilization, s. `None` if the
    /// platoon never re-settled within the trajectory.
    pub duration: Option<f64>,
    /// Most negative follower acceleration, m/s^2.
    pub peak_decel: f64,
    /// Largest 2-second moving average of follower deceleration magnitude,
    /// m/s^2.
    pub iso_window: f64,
}

/// Braking response of the followers (every vehicle except each lane's
/// head, which is the scripted one) to a lead profile.
pub fn braking_metrics(
    traj: &Trajectory,
    profile: &LeadProfile,
    crit: &StabilizationCriterion,
) -> BrakingMetrics {
    let onset = profile.first_ramp_start().unwrap_or(0.0);
    let duration = detect_stabilization_after(traj, crit, onset).map(|s| s.period - onset);

    let mut peak = 0.0f64;
    for step in &traj.steps {
        for lane in &step.lanes {
            for s in &lane[..lane.len().saturating_sub(1)] {
                peak = peak.min(s.a);
            }
        }
    }

    let window = (ISO_WINDOW_SECONDS / traj.dt).round().max(1.0) as usize;
    let mut iso = 0.0f64;
    let n_lanes = traj.steps.first().map_or(0, |s| s.lanes.len());
    for li in 0..n_lanes {
        let n_veh = traj.steps[0].lanes[li].len();
        for vi in 0..n_veh.saturating_sub(1) {
            let mut acc: Vec<f64> = Vec::with_capacity(traj.steps.len());
            for step in &traj.steps {
                // Skip snapshots where this index does not exist (roster
                // changes mid-run only happen in merge scenarios, where
                // braking metrics are not used).
                if let Some(s) = step.lanes[li].get(vi) {
                    acc.push((-s.a).max(0.0));
                }
            }
            let mut sum = 0.0;
            for (k, d) in acc.iter().enumerate() {
                sum += d;
                if k >= window {
                    sum -= acc[k - window];
                }
                let len = (k + 1).min(window);
                iso = iso.max(sum / len as f64);
            }
        }
    }

    BrakingMetrics {
        duration,
        peak_decel: peak,
        iso_window: iso,
    }
}

/// Per-follower final spacing after a disturbance, with the reduction from
/// the initial spacing. The final value is the follower's mean gap over the
/// first quiet window at or after `not_before`; `reduction[i]` satisfies
/// `initial[i] = final[i] + reduction[i]` identically.
///
/// Follower order matches vehicle order: index 0 is the rearmost.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpacingOutcome {
    pub final_spacing: Vec<f64>,
    pub reduction: Vec<f64>,
}

pub fn final_spacing_per_follower(
    traj: &Trajectory,
    crit: &StabilizationCriterion,
    not_before: f64,
) -> Option<SpacingOutcome> {
    let stab = detect_stabilization_after(traj, crit, not_before)?;
    let dt = traj.dt;
    let start = (stab.period / dt).round() as usize;
    let end = (start + (crit.hold_window / dt).round() as usize).min(traj.steps.len() - 1);

    // Single lane assumed for the per-follower view; multi-lane callers
    // use the lane-averaged spacing from detect_stabilization instead.
    let lane0 = &traj.steps[0].lanes[0];
    let n_follow = lane0.len().saturating_sub(1);
    let mut final_spacing = vec![0.0; n_follow];
    for step in &traj.steps[start..=end] {
        for (i, s) in step.lanes[0].iter().take(n_follow).enumerate() {
            final_spacing[i] += s.gap;
        }
    }
    let count = (end - start + 1) as f64;
    for f in &mut final_spacing {
        *f /= count;
    }
    let reduction = lane0
        .iter()
        .take(n_follow)
        .zip(&final_spacing)
        .map(|(s0, f)| s0.gap - f)
        .collect();
    Some(SpacingOutcome {
        final_spacing,
        reduction,
    })
}

/// Per-lane time from `t_event` until the rearmost vehicle's |a| first
/// exceeds `threshold`. `None` for a lane whose rear vehicle never reacted
/// within the trajectory.
pub fn response_times(traj: &Trajectory, t_event: f64, threshold: f64) -> Vec<Option<f64>> {
    let n_lanes = traj.steps.first().map_or(0, |s| s.lanes.len());
    let mut out = vec![None; n_lanes];
    for step in &traj.steps {
        if step.t <= t_event {
            continue;
        }
        for (li, lane) in step.lanes.iter().enumerate() {
            if out[li].is_none() {
                if let Some(rear) = lane.first() {
                    if rear.a.abs() > threshold {
                        out[li] = Some(step.t - t_event);
                    }
                }
            }
        }
    }
    out
}

/// Mean speed of the rear half of each lane over the first
/// `window` seconds, averaged across lanes. Low values mean the back of
/// the column never got moving.
pub fn rear_half_mean_speed(traj: &Trajectory, window: f64) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for step in &traj.steps {
        if step.t > window {
            break;
        }
        for lane in &step.lanes {
            let half = lane.len() / 2;
            for s in &lane[..half] {
                sum += s.v;
                n += 1;
            }
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Stall flag: rear half crawling below [`STALL_SPEED_FRACTION`] of the
/// speed limit over the observation window.
pub fn is_stalled(traj: &Trajectory, v_max: f64) -> bool {
    rear_half_mean_speed(traj, STALL_WINDOW_SECONDS) < STALL_SPEED_FRACTION * v_max
}

/// Everything a scenario trial reports. Fields that a scenario does not
/// measure stay `None`/empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsReport {
    /// Stabilized mean gap, m.
    pub spacing: Option<f64>,
    /// Time to stabilization, s (relative to the run's disturbance, if any).
    pub period: Option<f64>,
    /// Mean speed over the stabilization window, m/s.
    pub mean_speed: Option<f64>,
    /// veh/h, from the stabilized spacing and window mean speed.
    pub throughput: Option<f64>,
    /// s.
    pub braking_duration: Option<f64>,
    /// m/s^2, negative.
    pub peak_decel: Option<f64>,
    /// m/s^2, magnitude of the worst 2-s deceleration average.
    pub iso_window: Option<f64>,
    /// Per-follower spacing after the disturbance, m (rearmost first).
    pub final_spacing: Vec<f64>,
    /// Per-follower spacing loss, m.
    pub spacing_reduction: Vec<f64>,
    /// s.
    pub response_time: Option<f64>,
}
