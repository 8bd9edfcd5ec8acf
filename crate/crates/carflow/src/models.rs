//! The acceleration laws and their equilibria.
//!
//! Everything here is a pure function of an [`Observation`] and a parameter
//! set; the stepping engine in [`crate::dynamics`] decides what each vehicle
//! observes, these functions decide how it responds.

use crate::params::{ModelConfig, ModelKind, ModelParams, Observation, RiskParams, VariantParams};
use thiserror::Error;

/// Placeholder gap (m) used for a lane head driving against open road.
pub const OPEN_ROAD_GAP: f64 = 1.0e6;

/// Bisection stops once the model acceleration at the candidate gap is
/// below this magnitude, m/s^2.
pub const EQUILIBRIUM_ACCEL_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    /// The law produced a non-finite value, typically from a vanishing gap.
    #[error("numerical domain error in {law}: {detail}")]
    NumericalDomain { law: &'static str, detail: String },
    /// No gap makes the law's acceleration vanish at this speed.
    #[error("{} has no equilibrium gap at v = {v} m/s", kind.name())]
    NoEquilibrium { kind: ModelKind, v: f64 },
    /// The law has no single-gap equilibrium concept (Krauss).
    #[error("{} does not define an equilibrium gap", kind.name())]
    UnsupportedEquilibrium { kind: ModelKind },
}

/// Desired dynamic gap: `s0 + max(0, v*T + v*dv / (2*sqrt(a0*b0)))`.
///
/// The floor keeps the desired gap at or above the standstill gap even when
/// the leader is pulling away fast.
pub fn desired_gap(v: f64, dv: f64, p: &ModelParams) -> f64 {
    let dynamic = v * p.t_headway + v * dv / (2.0 * (p.a0 * p.b0).sqrt());
    p.s0 + dynamic.max(0.0)
}

/// Free-road term `A = 1 - (v/v0)^delta`. Negative above the desired speed.
pub fn idm_free_term(v: f64, p: &ModelParams) -> f64 {
    1.0 - (v / p.v0).powf(p.delta)
}

/// Interaction term `D = (s*/s)^2`.
pub fn idm_interaction_term(o: Observation, p: &ModelParams) -> f64 {
    let ratio = desired_gap(o.v, o.dv, p) / o.gap;
    ratio * ratio
}

fn check_finite(law: &'static str, a: f64, o: Observation) -> Result<f64, ModelError> {
    if a.is_finite() {
        Ok(a)
    } else {
        Err(ModelError::NumericalDomain {
            law,
            detail: format!("non-finite acceleration at gap={} v={} dv={}", o.gap, o.v, o.dv),
        })
    }
}

/// IDM acceleration `a0 * (A - D)`.
pub fn idm_acceleration(o: Observation, p: &ModelParams) -> Result<f64, ModelError> {
    let a = p.a0 * (idm_free_term(o.v, p) - idm_interaction_term(o, p));
    check_finite("idm", a, o)
}

/// Dimensionless risk factor comparing the closing-time ratio `x = TTC0/TTC`
/// against the headway ratio `y = T/TH`, with a smooth blend where the two
/// are close:
///
/// ```text
/// x = max(0, ttc0 * dv / s)      (0 when not closing)
/// y = T * v / s                  (0 at standstill)
/// eps = smoothing_coeff * y
///        | y                        x < y - eps
/// risk = | x                        x > y + eps
///        | alpha*x + (1-alpha)*y    otherwise, alpha = 1/2 + (x-y)/(2 eps)
/// ```
///
/// At the band edges the blend equals the adjacent branch exactly, so the
/// function is continuous in all inputs. Degenerate `eps = 0` falls back to
/// `max(x, y)`. The result is never negative.
pub fn risk_factor(o: Observation, p: &ModelParams, rp: &RiskParams) -> f64 {
    let x = (rp.ttc0 * o.dv / o.gap).max(0.0);
    let y = p.t_headway * o.v / o.gap;
    let eps = rp.smoothing_coeff * y;
    if eps <= 0.0 {
        x.max(y)
    } else if x < y - eps {
        y
    } else if x > y + eps {
        x
    } else {
        let alpha = 0.5 + (x - y) / (2.0 * eps);
        alpha * x + (1.0 - alpha) * y
    }
}

/// Risk-adaptive IDM: `a0*A - a0 * risk^r * D`.
///
/// `risk^r` uses `powf`, for which `0^0 = 1`; with `r = 0` the law therefore
/// reduces to plain IDM for every observation, risky or not.
pub fn seidm_acceleration(o: Observation, p: &ModelParams, rp: &RiskParams) -> Result<f64, ModelError> {
    let weight = risk_factor(o, p, rp).powf(rp.r);
    let a = p.a0 * idm_free_term(o.v, p) - p.a0 * weight * idm_interaction_term(o, p);
    check_finite("seidm", a, o)
}

/// Desired gap extended by a quadratic braking-distance term `c * v^2 / b0`.
pub fn derbel_desired_gap(v: f64, dv: f64, p: &ModelParams, vp: &VariantParams) -> f64 {
    desired_gap(v, dv, p) + vp.derbel_c * v * v / p.b0
}

/// IDM law with [`derbel_desired_gap`] in the interaction term.
pub fn derbel_acceleration(o: Observation, p: &ModelParams, vp: &VariantParams) -> Result<f64, ModelError> {
    let ratio = derbel_desired_gap(o.v, o.dv, p, vp) / o.gap;
    let a = p.a0 * (idm_free_term(o.v, p) - ratio * ratio);
    check_finite("derbel", a, o)
}

/// Krauss safe speed:
/// `v_safe = v_l + (s - v_l*T') / ((v_l + v)/(2 b0) + T')`.
///
/// May be negative for tiny gaps; callers floor the resulting target at 0.
pub fn krauss_safe_speed(o: Observation, p: &ModelParams, vp: &VariantParams) -> f64 {
    let vl = o.v_leader;
    vl + (o.gap - vl * vp.krauss_reaction) / ((vl + o.v) / (2.0 * p.b0) + vp.krauss_reaction)
}

/// Krauss speed update target: `max(0, min(v_max, v + a0*dt, v_safe))`.
pub fn krauss_target_speed(v: f64, v_safe: f64, dt: f64, p: &ModelParams, vp: &VariantParams) -> f64 {
    vp.v_max.min(v + p.a0 * dt).min(v_safe).max(0.0)
}

/// Krauss expressed as an acceleration so the engine can integrate every
/// model the same way: `(v_target - v) / dt`.
pub fn krauss_acceleration(
    o: Observation,
    p: &ModelParams,
    vp: &VariantParams,
    dt: f64,
) -> Result<f64, ModelError> {
    let v_safe = krauss_safe_speed(o, p, vp);
    let a = (krauss_target_speed(o.v, v_safe, dt, p, vp) - o.v) / dt;
    check_finite("krauss", a, o)
}

/// Evaluate whichever law `kind` names. `dt` only matters for Krauss.
pub fn model_acceleration(
    kind: ModelKind,
    o: Observation,
    cfg: &ModelConfig,
    dt: f64,
) -> Result<f64, ModelError> {
    match kind {
        ModelKind::Idm | ModelKind::ClampedIdm => idm_acceleration(o, &cfg.params),
        ModelKind::Seidm => seidm_acceleration(o, &cfg.params, &cfg.risk),
        ModelKind::DerbelIdm => derbel_acceleration(o, &cfg.params, &cfg.variant),
        ModelKind::Krauss => krauss_acceleration(o, &cfg.params, &cfg.variant, dt),
    }
}

/// Gap at which `kind`'s acceleration vanishes for a steady follower
/// (`dv = 0`) at speed `v`, found by bracketing and bisection down to
/// [`EQUILIBRIUM_ACCEL_TOL`].
///
/// Defined for the IDM-family laws only; Krauss has a whole interval of
/// cruising gaps rather than a single root. At standstill the risk-adaptive
/// law accelerates at every gap, so `v = 0` reports no equilibrium, as does
/// any speed at or above `v0`.
pub fn equilibrium_gap(kind: ModelKind, v: f64, cfg: &ModelConfig) -> Result<f64, ModelError> {
    if kind == ModelKind::Krauss {
        return Err(ModelError::UnsupportedEquilibrium { kind });
    }
    if !(v > 0.0 && v < cfg.params.v0) {
        return Err(ModelError::NoEquilibrium { kind, v });
    }
    let accel_at = |gap: f64| -> f64 {
        let o = Observation::new(gap, v, v);
        // dt is irrelevant for the IDM-family laws.
        model_acceleration(kind, o, cfg, 1.0).unwrap_or(f64::NEG_INFINITY)
    };

    // The interaction term blows up as the gap shrinks and vanishes as it
    // grows, so the acceleration is strictly increasing in the gap: a sign
    // change brackets the unique root.
    let mut lo = 1e-6;
    if accel_at(lo) >= 0.0 {
        return Err(ModelError::NoEquilibrium { kind, v });
    }
    let mut hi = cfg.params.s0.max(1.0);
    let mut tries = 0;
    while accel_at(hi) <= 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 80 {
            return Err(ModelError::NoEquilibrium { kind, v });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let a = accel_at(mid);
        if a.abs() < EQUILIBRIUM_ACCEL_TOL {
            return Ok(mid);
        }
        if a < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(ModelError::NoEquilibrium { kind, v })
}

/// Closed-form IDM equilibrium gap `s*(v, 0) / sqrt(1 - (v/v0)^delta)`,
/// valid for `0 < v < v0`. Used as an independent check on the bisection
/// route and for inverting gap -> speed.
pub fn idm_equilibrium_closed_form(v: f64, p: &ModelParams) -> f64 {
    desired_gap(v, 0.0, p) / idm_free_term(v, p).sqrt()
}

/// Speed whose closed-form IDM equilibrium gap equals `gap`.
///
/// The closed form is strictly increasing in `v` on `(0, v0)`, from `s0`
/// towards infinity, so any gap above `s0` has exactly one preimage.
pub fn idm_equilibrium_speed(gap: f64, p: &ModelParams) -> Result<f64, ModelError> {
    if gap <= p.s0 {
        return Err(ModelError::NoEquilibrium {
            kind: ModelKind::Idm,
            v: 0.0,
        });
    }
    let mut lo = 0.0;
    let mut hi = p.v0 * (1.0 - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if idm_equilibrium_closed_form(mid, p) < gap {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
