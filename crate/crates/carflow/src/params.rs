//! Parameter sets and the observation type shared by every acceleration law.
//!
//! All quantities are SI (metres, seconds) internally. Speed limits are
//! commonly quoted in km/h, so [`mps_from_kmh`] / [`kmh_from_mps`] are
//! provided for the boundary conversions.

use thiserror::Error;

/// Convert km/h to m/s.
pub fn mps_from_kmh(kmh: f64) -> f64 {
    kmh / 3.6
}

/// Convert m/s to km/h.
pub fn kmh_from_mps(mps: f64) -> f64 {
    mps * 3.6
}

/// Default desired speed, km/h.
pub const DEFAULT_V0_KMH: f64 = 100.0;
/// Default enforced speed limit, km/h.
pub const DEFAULT_VMAX_KMH: f64 = 95.0;

/// What the follower knows about its situation at one instant.
///
/// `gap` is bumper to bumper. `dv` is the closing speed `v - v_leader`,
/// positive when the follower is gaining on its leader.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    /// Bumper-to-bumper gap to the leader, m. Must be positive.
    pub gap: f64,
    /// Own speed, m/s.
    pub v: f64,
    /// Closing speed `v - v_leader`, m/s.
    pub dv: f64,
    /// Leader speed, m/s.
    pub v_leader: f64,
}

impl Observation {
    pub fn new(gap: f64, v: f64, v_leader: f64) -> Self {
        Observation {
            gap,
            v,
            dv: v - v_leader,
            v_leader,
        }
    }
}

/// Core car-following parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Maximum acceleration a0, m/s^2.
    pub a0: f64,
    /// Comfortable deceleration b0, m/s^2.
    pub b0: f64,
    /// Desired (free-flow) speed v0, m/s.
    pub v0: f64,
    /// Safe time headway T, s.
    pub t_headway: f64,
    /// Standstill minimum gap s0, m.
    pub s0: f64,
    /// Free-acceleration exponent delta (dimensionless).
    pub delta: f64,
}

impl Default for ModelParams {
    /// The motorway calibration used by the test suite and the CLI defaults:
    /// a0 = 1.46, b0 = 2.0, v0 = 100 km/h, T = 1.6, s0 = 2, delta = 4.
    fn default() -> Self {
        ModelParams {
            a0: 1.46,
            b0: 2.0,
            v0: mps_from_kmh(DEFAULT_V0_KMH),
            t_headway: 1.6,
            s0: 2.0,
            delta: 4.0,
        }
    }
}

/// Parameters of the risk factor used by the risk-adaptive law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskParams {
    /// Time-to-collision threshold TTC0 below which closing is risky, s.
    pub ttc0: f64,
    /// Risk exponent r >= 0. r = 0 recovers plain IDM; larger r weights the
    /// interaction term more aggressively by perceived risk.
    pub r: f64,
    /// Width of the smoothing band between the two risk regimes, as a
    /// fraction of the headway ratio.
    pub smoothing_coeff: f64,
}

impl Default for RiskParams {
    fn default() -> Self {
        RiskParams {
            ttc0: 2.7,
            r: 0.6,
            smoothing_coeff: 0.1,
        }
    }
}

/// Parameters specific to the comparison models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariantParams {
    /// Quadratic braking-distance coefficient of the extended-gap variant
    /// (dimensionless; multiplies v^2 / b0).
    pub derbel_c: f64,
    /// Driver reaction time T' used by the Krauss safe-speed rule, s.
    pub krauss_reaction: f64,
    /// Enforced maximum speed v_max, m/s (the Krauss target is capped here).
    pub v_max: f64,
}

impl Default for VariantParams {
    fn default() -> Self {
        VariantParams {
            derbel_c: 0.4,
            krauss_reaction: 1.0,
            v_max: mps_from_kmh(DEFAULT_VMAX_KMH),
        }
    }
}

/// Which acceleration law a vehicle runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Intelligent Driver Model.
    Idm,
    /// Risk-adaptive IDM: interaction term weighted by risk^r.
    Seidm,
    /// Krauss safe-speed model.
    Krauss,
    /// IDM with the desired gap extended by a quadratic braking-distance
    /// term c * v^2 / b0.
    DerbelIdm,
    /// Plain IDM law; exists as a separate entry so the speed-clamped
    /// engine variant can be compared by name.
    ClampedIdm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Idm,
        ModelKind::Seidm,
        ModelKind::Krauss,
        ModelKind::DerbelIdm,
        ModelKind::ClampedIdm,
    ];

    /// Stable lowercase name, used in CLI arguments and CSV output.
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Idm => "idm",
            ModelKind::Seidm => "seidm",
            ModelKind::Krauss => "krauss",
            ModelKind::DerbelIdm => "derbel",
            ModelKind::ClampedIdm => "clamped",
        }
    }

    pub fn from_name(name: &str) -> Option<ModelKind> {
        ModelKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// Everything needed to evaluate any of the supported laws.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModelConfig {
    pub params: ModelParams,
    pub risk: RiskParams,
    pub variant: VariantParams,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("parameter invariant violated: {0}")]
    Invalid(String),
}

macro_rules! require {
    ($cond:expr, $($msg:tt)*) => {
        if !($cond) {
            return Err(ParamError::Invalid(format!($($msg)*)));
        }
    };
}

impl ModelParams {
    /// Check the sign/range invariants. Error messages name the offending
    /// parameter so a config file mistake points at the right line.
    pub fn validate(&self) -> Result<(), ParamError> {
        require!(self.a0 > 0.0, "maximum acceleration a0 must be > 0 (got {})", self.a0);
        require!(self.b0 > 0.0, "comfortable deceleration b0 must be > 0 (got {})", self.b0);
        require!(self.v0 > 0.0, "desired speed v0 must be > 0 (got {})", self.v0);
        require!(
            self.t_headway > 0.0,
            "safe time headway T must be > 0 (got {})",
            self.t_headway
        );
        require!(self.s0 > 0.0, "standstill gap s0 must be > 0 (got {})", self.s0);
        require!(self.delta >= 1.0, "acceleration exponent delta must be >= 1 (got {})", self.delta);
        Ok(())
    }
}

impl RiskParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        require!(self.ttc0 > 0.0, "TTC threshold ttc0 must be > 0 (got {})", self.ttc0);
        require!(self.r >= 0.0, "risk exponent r must be >= 0 (got {})", self.r);
        require!(
            self.smoothing_coeff >= 0.0,
            "risk smoothing coefficient must be >= 0 (got {})",
            self.smoothing_coeff
        );
        Ok(())
    }
}

impl VariantParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        require!(self.derbel_c >= 0.0, "gap coefficient derbel_c must be >= 0 (got {})", self.derbel_c);
        require!(
            self.krauss_reaction >= 0.0,
            "Krauss reaction time T' must be >= 0 (got {})",
            self.krauss_reaction
        );
        require!(self.v_max > 0.0, "speed limit v_max must be > 0 (got {})", self.v_max);
        Ok(())
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ParamError> {
        self.params.validate()?;
        self.risk.validate()?;
        self.variant.validate()
    }
}
