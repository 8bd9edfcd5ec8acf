//! Layered run configuration: built-in defaults, then an optional TOML
//! file, then command-line flags, each level overriding the previous one.
//!
//! File keys are named after the model parameters; speeds are given in
//! km/h and converted at this boundary, everything else is in SI units.
//! Unknown or duplicate keys are rejected with the offending line number.

use crate::{AppError, CommonArgs};
use carflow::dynamics::{LeadProfile, ProfileSegment};
use carflow::params::{kmh_from_mps, mps_from_kmh};
use carflow::{ModelConfig, StabilizationCriterion, StepConfig};
use serde::Deserialize;
use std::path::Path;

/// Everything a subcommand needs to assemble its scenario batteries.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model_cfg: ModelConfig,
    pub step: StepConfig,
    pub criterion: StabilizationCriterion,
    /// Time-limit override; each command has its own default.
    pub t_max: Option<f64>,
    /// Trial-count override; each command has its own default.
    pub trials: Option<usize>,
    pub seed: u64,
    /// Lead-vehicle schedule override for the braking scenarios.
    pub profile: Option<LeadProfile>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model_cfg: ModelConfig::default(),
            step: StepConfig::default(),
            criterion: StabilizationCriterion::default(),
            t_max: None,
            trials: None,
            seed: 42,
            profile: None,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<ModelSection>,
    risk: Option<RiskSection>,
    variant: Option<VariantSection>,
    sim: Option<SimSection>,
    stabilization: Option<StabilizationSection>,
    profile: Option<ProfileSection>,
}

/// Core car-following parameters. `v0` is in km/h.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    a0: Option<f64>,
    b0: Option<f64>,
    v0: Option<f64>,
    #[serde(rename = "T")]
    t_headway: Option<f64>,
    s0: Option<f64>,
    delta: Option<f64>,
}

/// Risk-factor parameters of the adaptive law.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RiskSection {
    #[serde(rename = "TTC0")]
    ttc0: Option<f64>,
    r: Option<f64>,
    /// Smoothing band as a fraction of the headway ratio.
    epsilon: Option<f64>,
}

/// Parameters of the contrast laws. `v_max` (km/h) is also the engine's
/// hard speed clamp.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariantSection {
    c: Option<f64>,
    v_max: Option<f64>,
}

/// Integration and batch controls. `T_prime` is the observation delay, s.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimSection {
    dt: Option<f64>,
    #[serde(rename = "T_prime")]
    t_prime: Option<f64>,
    t_max: Option<f64>,
    trials: Option<usize>,
    seed: Option<u64>,
}

/// Quiescence thresholds for the settle detector.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct StabilizationSection {
    accel_tol: Option<f64>,
    speed_tol: Option<f64>,
    hold: Option<f64>,
}

/// Lead-vehicle schedule; speeds in km/h, rates in m/s^2.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileSection {
    segments: Vec<SegmentSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
enum SegmentSection {
    Hold { speed: f64, duration: f64 },
    Ramp { rate: f64, target: f64 },
}

pub fn load(common: &CommonArgs) -> Result<RunConfig, AppError> {
    let mut rc = RunConfig::default();
    if let Some(path) = &common.config {
        apply_file(&mut rc, path)?;
    }
    apply_flags(&mut rc, common)?;
    validate(&rc)?;
    Ok(rc)
}

fn apply_file(rc: &mut RunConfig, path: &Path) -> Result<(), AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
    apply_str(rc, &text, &path.display().to_string())
}

fn apply_str(rc: &mut RunConfig, text: &str, origin: &str) -> Result<(), AppError> {
    let fc: FileConfig =
        toml::from_str(text).map_err(|e| AppError::Config(format!("{origin}:\n{e}")))?;

    macro_rules! set {
        ($dst:expr, $src:expr) => {
            if let Some(v) = $src {
                $dst = v;
            }
        };
        ($dst:expr, $src:expr, $map:expr) => {
            if let Some(v) = $src {
                $dst = $map(v);
            }
        };
    }

    if let Some(m) = fc.model {
        set!(rc.model_cfg.params.a0, m.a0);
        set!(rc.model_cfg.params.b0, m.b0);
        set!(rc.model_cfg.params.v0, m.v0, mps_from_kmh);
        set!(rc.model_cfg.params.t_headway, m.t_headway);
        set!(rc.model_cfg.params.s0, m.s0);
        set!(rc.model_cfg.params.delta, m.delta);
    }
    if let Some(r) = fc.risk {
        set!(rc.model_cfg.risk.ttc0, r.ttc0);
        set!(rc.model_cfg.risk.r, r.r);
        set!(rc.model_cfg.risk.smoothing_coeff, r.epsilon);
    }
    if let Some(v) = fc.variant {
        set!(rc.model_cfg.variant.derbel_c, v.c);
        if let Some(kmh) = v.v_max {
            rc.model_cfg.variant.v_max = mps_from_kmh(kmh);
            rc.step.v_max = mps_from_kmh(kmh);
        }
    }
    if let Some(s) = fc.sim {
        set!(rc.step.dt, s.dt);
        // the delay drives both the stale observations and the reaction
        // horizon the safe-speed law plans around
        set!(rc.step.reaction, s.t_prime);
        set!(rc.model_cfg.variant.krauss_reaction, s.t_prime);
        rc.t_max = s.t_max.or(rc.t_max);
        rc.trials = s.trials.or(rc.trials);
        set!(rc.seed, s.seed);
    }
    if let Some(s) = fc.stabilization {
        set!(rc.criterion.accel_tol, s.accel_tol);
        set!(rc.criterion.speed_tol, s.speed_tol);
        set!(rc.criterion.hold_window, s.hold);
    }
    if let Some(p) = fc.profile {
        let segments = p
            .segments
            .into_iter()
            .map(|s| match s {
                SegmentSection::Hold { speed, duration } => ProfileSegment::Hold {
                    speed: mps_from_kmh(speed),
                    duration,
                },
                SegmentSection::Ramp { rate, target } => ProfileSegment::Ramp {
                    rate,
                    target: mps_from_kmh(target),
                },
            })
            .collect();
        rc.profile = Some(LeadProfile { segments });
    }
    Ok(())
}

fn apply_flags(rc: &mut RunConfig, common: &CommonArgs) -> Result<(), AppError> {
    if let Some(seed) = common.seed {
        rc.seed = seed;
    }
    if let Some(trials) = common.trials {
        rc.trials = Some(trials);
    }
    if let Some(dt) = common.dt {
        rc.step.dt = dt;
    }
    if let Some(t_max) = common.t_max {
        rc.t_max = Some(t_max);
    }
    if let Some(r) = common.r {
        rc.model_cfg.risk.r = r;
    }
    if let Some(spec) = &common.profile {
        rc.profile = Some(parse_profile(spec)?);
    }
    Ok(())
}

/// Parse the compact profile flag: comma-separated segments, each
/// `hold:SPEED_KMH:DURATION_S` or `ramp:RATE_MPS2:TARGET_KMH`.
pub fn parse_profile(spec: &str) -> Result<LeadProfile, AppError> {
    let bad = |part: &str, why: &str| {
        AppError::Config(format!(
            "profile segment '{part}': {why} (expected hold:SPEED_KMH:DURATION_S or \
             ramp:RATE_MPS2:TARGET_KMH)"
        ))
    };
    let num = |part: &str, field: &str| -> Result<f64, AppError> {
        field
            .parse::<f64>()
            .map_err(|_| bad(part, &format!("'{field}' is not a number")))
    };
    let mut segments = Vec::new();
    for part in spec.split(',') {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            ["hold", speed, duration] => segments.push(ProfileSegment::Hold {
                speed: mps_from_kmh(num(part, speed)?),
                duration: num(part, duration)?,
            }),
            ["ramp", rate, target] => segments.push(ProfileSegment::Ramp {
                rate: num(part, rate)?,
                target: mps_from_kmh(num(part, target)?),
            }),
            _ => return Err(bad(part, "unrecognized shape")),
        }
    }
    Ok(LeadProfile { segments })
}

fn validate(rc: &RunConfig) -> Result<(), AppError> {
    let cfg_err = |e: String| AppError::Config(e);
    rc.model_cfg.validate().map_err(|e| cfg_err(e.to_string()))?;
    rc.step.validate().map_err(|e| cfg_err(e.to_string()))?;
    let c = &rc.criterion;
    if !(c.accel_tol > 0.0) {
        return Err(cfg_err(format!(
            "stabilization accel_tol must be > 0 (got {})",
            c.accel_tol
        )));
    }
    if !(c.speed_tol > 0.0) {
        return Err(cfg_err(format!(
            "stabilization speed_tol must be > 0 (got {})",
            c.speed_tol
        )));
    }
    if !(c.hold_window > 0.0) {
        return Err(cfg_err(format!(
            "stabilization hold must be > 0 (got {})",
            c.hold_window
        )));
    }
    if let Some(t) = rc.t_max {
        if !(t > 0.0) {
            return Err(cfg_err(format!("t_max must be > 0 (got {t})")));
        }
    }
    if rc.trials == Some(0) {
        return Err(cfg_err("trials must be >= 1 (got 0)".into()));
    }
    if let Some(profile) = &rc.profile {
        if profile.segments.is_empty() {
            return Err(cfg_err("profile needs at least one segment".into()));
        }
        for seg in &profile.segments {
            match *seg {
                ProfileSegment::Hold { speed, duration } => {
                    if !(speed >= 0.0) || !(duration >= 0.0) {
                        return Err(cfg_err(format!(
                            "profile hold needs speed >= 0 and duration >= 0 \
                             (got speed {speed} m/s, duration {duration} s)"
                        )));
                    }
                }
                ProfileSegment::Ramp { rate, target } => {
                    if rate == 0.0 || !rate.is_finite() || !(target >= 0.0) {
                        return Err(cfg_err(format!(
                            "profile ramp needs a nonzero finite rate and target >= 0 \
                             (got rate {rate} m/s^2, target {target} m/s)"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Render the effective configuration back into the file format (speeds
/// converted back to km/h). Parsing the result reproduces the same
/// configuration up to floating-point round-trip of the unit conversions.
pub fn to_toml(rc: &RunConfig) -> String {
    let p = &rc.model_cfg.params;
    let r = &rc.model_cfg.risk;
    let v = &rc.model_cfg.variant;
    let c = &rc.criterion;
    let mut out = String::new();
    out.push_str(&format!(
        "[model]\na0 = {}\nb0 = {}\nv0 = {}\nT = {}\ns0 = {}\ndelta = {}\n\n",
        p.a0,
        p.b0,
        kmh_from_mps(p.v0),
        p.t_headway,
        p.s0,
        p.delta
    ));
    out.push_str(&format!(
        "[risk]\nTTC0 = {}\nr = {}\nepsilon = {}\n\n",
        r.ttc0, r.r, r.smoothing_coeff
    ));
    out.push_str(&format!(
        "[variant]\nc = {}\nv_max = {}\n\n",
        v.derbel_c,
        kmh_from_mps(v.v_max)
    ));
    out.push_str(&format!(
        "[sim]\ndt = {}\nT_prime = {}\nseed = {}\n",
        rc.step.dt, rc.step.reaction, rc.seed
    ));
    if let Some(t) = rc.t_max {
        out.push_str(&format!("t_max = {t}\n"));
    }
    if let Some(n) = rc.trials {
        out.push_str(&format!("trials = {n}\n"));
    }
    out.push_str(&format!(
        "\n[stabilization]\naccel_tol = {}\nspeed_tol = {}\nhold = {}\n",
        c.accel_tol, c.speed_tol, c.hold_window
    ));
    if let Some(profile) = &rc.profile {
        for seg in &profile.segments {
            match *seg {
                ProfileSegment::Hold { speed, duration } => out.push_str(&format!(
                    "\n[[profile.segments]]\nkind = \"hold\"\nspeed = {}\nduration = {}\n",
                    kmh_from_mps(speed),
                    duration
                )),
                ProfileSegment::Ramp { rate, target } => out.push_str(&format!(
                    "\n[[profile.segments]]\nkind = \"ramp\"\nrate = {}\ntarget = {}\n",
                    rate,
                    kmh_from_mps(target)
                )),
            }
        }
    }
    out
}
