//! Deterministic number formatting and CSV writers. Every number that
//! reaches a file or the console goes through [`sig6`], so repeated runs
//! with the same inputs produce byte-identical output.

use crate::AppError;
use carflow::dynamics::Trajectory;
use carflow::metrics::MetricsReport;
use carflow::{ModelKind, RunStatus, TrialResult};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Format with six significant digits in the style of C's `%g`: fixed
/// point while the exponent is in [-4, 5], exponent notation outside,
/// trailing zeros trimmed.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_fixed(format!("{x:.decimals$}"))
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, exponent) = s.split_once('e').expect("exponent form");
        format!("{}e{}", trim_fixed(mantissa.to_string()), exponent)
    }
}

fn trim_fixed(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// CSV cell: blank for NaN, which marks undefined values throughout.
pub fn cell(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        sig6(x)
    }
}

pub fn opt_cell(x: Option<f64>) -> String {
    match x {
        Some(v) => sig6(v),
        None => String::new(),
    }
}

pub struct Csv {
    w: BufWriter<File>,
    path: String,
}

impl Csv {
    pub fn create(path: &Path, header: &str) -> Result<Csv, AppError> {
        let file = File::create(path)
            .map_err(|e| AppError::Other(format!("{}: {e}", path.display())))?;
        let mut csv = Csv {
            w: BufWriter::new(file),
            path: path.display().to_string(),
        };
        csv.line(header)?;
        Ok(csv)
    }

    fn line(&mut self, s: &str) -> Result<(), AppError> {
        writeln!(self.w, "{s}").map_err(|e| AppError::Other(format!("{}: {e}", self.path)))
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), AppError> {
        self.line(&fields.join(","))
    }

    pub fn finish(mut self) -> Result<(), AppError> {
        self.w
            .flush()
            .map_err(|e| AppError::Other(format!("{}: {e}", self.path)))
    }
}

/// One row per vehicle per step: time, lane, id, position, speed, realized
/// acceleration, gap ahead (blank for the lane head), and the risk factor
/// (blank for laws without one).
pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<(), AppError> {
    let mut csv = Csv::create(path, "t,lane,vehicle_id,x_m,v_mps,a_mps2,gap_m,risk_factor")?;
    for step in &traj.steps {
        for (lane_idx, lane) in step.lanes.iter().enumerate() {
            for snap in lane {
                csv.row(&[
                    sig6(step.t),
                    lane_idx.to_string(),
                    snap.id.to_string(),
                    sig6(snap.x),
                    sig6(snap.v),
                    sig6(snap.a),
                    cell(snap.gap),
                    cell(snap.risk),
                ])?;
            }
        }
    }
    csv.finish()
}

pub const SUMMARY_HEADER: &str = "model,r,scenario,trial,spacing_m,period_s,throughput_vph,\
braking_duration_s,peak_decel_mps2,iso_window_mps2,final_spacing_m,spacing_reduction_m,\
response_time_s,status";

pub fn status_str(status: &RunStatus) -> &'static str {
    match status {
        RunStatus::Stabilized { .. } => "stabilized",
        RunStatus::ReachedTimeLimit => "timeout",
        RunStatus::Collided(_) => "collision",
    }
}

/// One summary line: a single trial or the mean over a battery.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub model: &'static str,
    /// Risk exponent; NaN blanks the column for laws it does not apply to.
    pub r: f64,
    pub scenario: &'static str,
    pub trial: String,
    pub spacing: Option<f64>,
    pub period: Option<f64>,
    pub throughput: Option<f64>,
    pub braking_duration: Option<f64>,
    pub peak_decel: Option<f64>,
    pub iso_window: Option<f64>,
    pub final_spacing: Option<f64>,
    pub spacing_reduction: Option<f64>,
    pub response_time: Option<f64>,
    pub status: String,
}

fn mean_of_slice(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

impl SummaryRow {
    pub fn from_trial(model: ModelKind, r: f64, scenario: &'static str, t: &TrialResult) -> Self {
        let m: &MetricsReport = &t.metrics;
        SummaryRow {
            model: model.name(),
            r,
            scenario,
            trial: t.trial.to_string(),
            spacing: m.spacing,
            period: m.period,
            throughput: m.throughput,
            braking_duration: m.braking_duration,
            peak_decel: m.peak_decel,
            iso_window: m.iso_window,
            final_spacing: mean_of_slice(&m.final_spacing),
            spacing_reduction: mean_of_slice(&m.spacing_reduction),
            response_time: m.response_time,
            status: status_str(&t.status).to_string(),
        }
    }

    /// Column-wise mean over the defined entries, labelled "mean"; the
    /// status is the worst seen (collision over timeout over stabilized).
    pub fn mean_of(rows: &[SummaryRow]) -> SummaryRow {
        let first = &rows[0];
        let mean_col = |get: fn(&SummaryRow) -> Option<f64>| {
            let defined: Vec<f64> = rows.iter().filter_map(get).collect();
            mean_of_slice(&defined)
        };
        let status = if rows.iter().any(|r| r.status == "collision") {
            "collision"
        } else if rows.iter().any(|r| r.status == "timeout") {
            "timeout"
        } else {
            "stabilized"
        };
        SummaryRow {
            model: first.model,
            r: first.r,
            scenario: first.scenario,
            trial: "mean".into(),
            spacing: mean_col(|r| r.spacing),
            period: mean_col(|r| r.period),
            throughput: mean_col(|r| r.throughput),
            braking_duration: mean_col(|r| r.braking_duration),
            peak_decel: mean_col(|r| r.peak_decel),
            iso_window: mean_col(|r| r.iso_window),
            final_spacing: mean_col(|r| r.final_spacing),
            spacing_reduction: mean_col(|r| r.spacing_reduction),
            response_time: mean_col(|r| r.response_time),
            status: status.to_string(),
        }
    }

    pub fn fields(&self) -> Vec<String> {
        vec![
            self.model.to_string(),
            cell(self.r),
            self.scenario.to_string(),
            self.trial.clone(),
            opt_cell(self.spacing),
            opt_cell(self.period),
            opt_cell(self.throughput),
            opt_cell(self.braking_duration),
            opt_cell(self.peak_decel),
            opt_cell(self.iso_window),
            opt_cell(self.final_spacing),
            opt_cell(self.spacing_reduction),
            opt_cell(self.response_time),
            self.status.clone(),
        ]
    }
}
