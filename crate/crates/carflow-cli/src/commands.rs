//! The four subcommands: batch runners over the scenario batteries plus
//! the analytic curve emitter. Each writes CSVs (and SVG charts where a
//! picture helps) into the output directory and prints a short summary.

use crate::chart::{self, Series};
use crate::config::RunConfig;
use crate::output::{self, opt_cell, sig6, status_str, Csv, SummaryRow, SUMMARY_HEADER};
use crate::AppError;
use carflow::metrics::{throughput, DEFAULT_ISO_DECEL_LIMIT};
use carflow::models::{
    desired_gap, equilibrium_gap, idm_acceleration, idm_equilibrium_closed_form,
};
use carflow::params::{kmh_from_mps, mps_from_kmh};
use carflow::{
    run_trial, run_trials, ModelKind, Observation, RunStatus, ScenarioConfig, ScenarioKind,
    TrialResult,
};
use std::path::Path;

/// Risk exponents covered by `sweep-r`.
const R_GRID: [f64; 12] = [0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// Regime boundaries echoed in the sweep summary text: up to the first the
/// exponent mostly buys smoothness, past the second it mostly buys
/// capacity.
const R_SMOOTH_MAX: f64 = 0.4;
const R_BALANCED_MAX: f64 = 0.8;

/// Follower speed for the approach curves, km/h.
const APPROACH_V_KMH: f64 = 90.0;
/// Leader speeds for the approach curves, as fractions of the follower's.
const APPROACH_RATIOS: [f64; 4] = [0.85, 0.90, 0.95, 1.00];
/// Distance grid for the approach curves, m.
const APPROACH_MIN_M: f64 = 5.0;
const APPROACH_MAX_M: f64 = 100.0;
const APPROACH_STEP_M: f64 = 0.5;

fn ensure_dir(dir: &Path) -> Result<(), AppError> {
    std::fs::create_dir_all(dir).map_err(|e| AppError::Other(format!("{}: {e}", dir.display())))
}

/// Metric cell for stdout tables; undefined values show as n/a rather than
/// the blank the CSVs use.
fn show(v: Option<f64>) -> String {
    v.map(sig6).unwrap_or_else(|| "n/a".into())
}

fn scenario_config(kind: ScenarioKind, model: ModelKind, rc: &RunConfig) -> ScenarioConfig {
    let mut sc = ScenarioConfig::new(kind, model);
    sc.config = rc.model_cfg;
    sc.step = rc.step;
    if let Some(t) = rc.t_max {
        sc.t_max = t;
    }
    sc.base_seed = rc.seed;
    sc.criterion = rc.criterion;
    sc.profile = rc.profile.clone();
    sc
}

/// Collects the worst outcome across a command's trials so every output is
/// still written before the process reports a nonzero exit.
#[derive(Default)]
struct Verdicts {
    collided: Option<String>,
    timed_out: Option<String>,
}

impl Verdicts {
    fn note(&mut self, context: &str, t: &TrialResult) {
        match t.status {
            RunStatus::Collided(_) => {
                if self.collided.is_none() {
                    self.collided = Some(format!("{context}, trial {}", t.trial));
                }
            }
            RunStatus::ReachedTimeLimit => {
                if self.timed_out.is_none() {
                    self.timed_out = Some(format!("{context}, trial {}", t.trial));
                }
            }
            RunStatus::Stabilized { .. } => {}
        }
    }

    fn into_result(self) -> Result<(), AppError> {
        if let Some(m) = self.collided {
            Err(AppError::Collision(m))
        } else if let Some(m) = self.timed_out {
            Err(AppError::NoConvergence(m))
        } else {
            Ok(())
        }
    }
}

pub fn sweep_r(rc: &RunConfig, out_dir: &Path) -> Result<(), AppError> {
    ensure_dir(out_dir)?;
    let v = rc.model_cfg.variant.v_max;
    let csv_path = out_dir.join("sweep_r.csv");
    let mut csv = Csv::create(
        &csv_path,
        "r,spacing_m,throughput_vph,braking_duration_s,peak_decel_mps2,iso_window_mps2,status",
    )?;
    let mut spacing_pts = Vec::new();
    let mut verdicts = Verdicts::default();
    let mut iso_max = f64::NEG_INFINITY;
    println!(
        "risk-exponent sweep at {} km/h cruise (analytic spacing plus one braking episode per point)",
        sig6(kmh_from_mps(v))
    );
    for r in R_GRID {
        let mut sc = scenario_config(ScenarioKind::PairBraking, ModelKind::Seidm, rc);
        sc.config.risk.r = r;
        let spacing = equilibrium_gap(ModelKind::Seidm, v, &sc.config).ok();
        let flow = spacing.map(|s| throughput(s, v));
        let t = run_trial(&sc, 0).map_err(AppError::Other)?;
        verdicts.note("sweep-r pair-braking seidm", &t);
        let m = &t.metrics;
        if let Some(iso) = m.iso_window {
            iso_max = iso_max.max(iso);
        }
        if let Some(s) = spacing {
            spacing_pts.push((r, s));
        }
        csv.row(&[
            sig6(r),
            opt_cell(spacing),
            opt_cell(flow),
            opt_cell(m.braking_duration),
            opt_cell(m.peak_decel),
            opt_cell(m.iso_window),
            status_str(&t.status).to_string(),
        ])?;
        println!(
            "  r {:<4}  spacing {:>7} m  throughput {:>7} veh/h  brake {:>4} s  peak {:>8} m/s^2",
            sig6(r),
            show(spacing),
            show(flow),
            show(m.braking_duration),
            show(m.peak_decel),
        );
    }
    csv.finish()?;
    let chart_path = out_dir.join("sweep_r_spacing.svg");
    let svg = chart::line_chart(
        "cruise spacing vs risk exponent",
        "r",
        "spacing (m)",
        &[Series { label: "spacing".into(), points: spacing_pts }],
    );
    chart::write_chart(&chart_path, &svg)?;
    println!(
        "regimes: r up to {R_SMOOTH_MAX} mostly buys smooth response, {R_SMOOTH_MAX}..{R_BALANCED_MAX} \
         trades comfort for capacity, above {R_BALANCED_MAX} capacity gains come with the hardest braking"
    );
    println!(
        "comfort: max 2 s mean deceleration {} m/s^2 (limit {})",
        sig6(iso_max),
        sig6(DEFAULT_ISO_DECEL_LIMIT)
    );
    println!("wrote {} and {}", csv_path.display(), chart_path.display());
    verdicts.into_result()
}

pub fn compare_models(rc: &RunConfig, out_dir: &Path, models: &[ModelKind]) -> Result<(), AppError> {
    ensure_dir(out_dir)?;
    let trials = rc.trials.unwrap_or(20);
    let csv_path = out_dir.join("compare_models.csv");
    let mut csv = Csv::create(&csv_path, SUMMARY_HEADER)?;
    let mut verdicts = Verdicts::default();
    println!(
        "relaxation battery: {trials} trials per model, seed {}, shared across models",
        rc.seed
    );
    println!(
        "{:<8} {:>6} {:>10} {:>9} {:>15}  note",
        "model", "trials", "spacing_m", "settle_s", "throughput_vph"
    );
    for &model in models {
        let mut sc = scenario_config(ScenarioKind::Relaxation, model, rc);
        sc.trials = trials;
        let results = match run_trials(&sc) {
            Ok(r) => r,
            Err(e) => {
                println!("{:<8} failed: {e}", model.name());
                continue;
            }
        };
        let r_val = if model == ModelKind::Seidm { sc.config.risk.r } else { f64::NAN };
        let rows: Vec<SummaryRow> = results
            .iter()
            .map(|t| SummaryRow::from_trial(model, r_val, "relaxation", t))
            .collect();
        for row in &rows {
            csv.row(&row.fields())?;
        }
        let mean = SummaryRow::mean_of(&rows);
        csv.row(&mean.fields())?;
        for t in &results {
            verdicts.note(&format!("relaxation {}", model.name()), t);
        }
        let n_settled = results
            .iter()
            .filter(|t| matches!(t.status, RunStatus::Stabilized { .. }))
            .count();
        let note = if results.iter().any(|t| t.stalled) {
            "stalled: rear half below a tenth of the limit".to_string()
        } else if n_settled < trials {
            format!("{}/{trials} settled before the time limit", n_settled)
        } else {
            "stabilized".to_string()
        };
        println!(
            "{:<8} {:>6} {:>10} {:>9} {:>15}  {note}",
            model.name(),
            trials,
            show(mean.spacing),
            show(mean.period),
            show(mean.throughput),
        );
    }
    csv.finish()?;
    println!("wrote {}", csv_path.display());
    verdicts.into_result()
}

pub fn scenario(
    rc: &RunConfig,
    out_dir: &Path,
    kind: ScenarioKind,
    model: ModelKind,
) -> Result<(), AppError> {
    ensure_dir(out_dir)?;
    let mut sc = scenario_config(kind, model, rc);
    sc.trials = rc.trials.unwrap_or(1);
    sc.keep_trajectory = true;
    let slug = format!("{}_{}", kind.name().replace('-', "_"), model.name());
    let r_val = if model == ModelKind::Seidm { sc.config.risk.r } else { f64::NAN };
    let mut rows = Vec::new();
    let mut verdicts = Verdicts::default();
    for trial in 0..sc.trials {
        // run one at a time so only a single trajectory is in memory
        let mut res = run_trial(&sc, trial).map_err(AppError::Other)?;
        let traj = res.trajectory.take().expect("trajectory kept");
        let traj_path = out_dir.join(format!("{slug}_trial{trial}.csv"));
        output::write_trajectory(&traj_path, &traj)?;
        verdicts.note(&format!("{} {}", kind.name(), model.name()), &res);
        let row = SummaryRow::from_trial(model, r_val, kind.name(), &res);
        match kind {
            ScenarioKind::Relaxation => println!(
                "trial {trial}: spacing {} m, settle {} s, throughput {} veh/h, {}",
                show(row.spacing),
                show(row.period),
                show(row.throughput),
                row.status
            ),
            ScenarioKind::PairBraking | ScenarioKind::PlatoonBraking => println!(
                "trial {trial}: brake {} s, peak {} m/s^2, 2 s window {} m/s^2, \
                 final spacing {} m (cut by {} m), {}",
                show(row.braking_duration),
                show(row.peak_decel),
                show(row.iso_window),
                show(row.final_spacing),
                show(row.spacing_reduction),
                row.status
            ),
            ScenarioKind::Merge => println!(
                "trial {trial}: settle {} s after the insertion, rear response {} s, {}",
                show(row.period),
                show(row.response_time),
                row.status
            ),
        }
        if kind == ScenarioKind::PlatoonBraking && trial == 0 {
            let f_path = out_dir.join(format!("{slug}_followers.csv"));
            let mut fcsv = Csv::create(&f_path, "follower,final_spacing_m,reduction_m")?;
            println!("  follower  final_spacing_m  reduction_m   (follower 0 is rearmost)");
            let m = &res.metrics;
            for (i, (&fs, &red)) in m.final_spacing.iter().zip(&m.spacing_reduction).enumerate() {
                fcsv.row(&[i.to_string(), sig6(fs), sig6(red)])?;
                println!("  {i:<8}  {:>14}  {:>11}", sig6(fs), sig6(red));
            }
            fcsv.finish()?;
            println!("wrote {}", f_path.display());
        }
        rows.push(row);
        println!("wrote {}", traj_path.display());
    }
    let sum_path = out_dir.join(format!("{slug}_summary.csv"));
    let mut scsv = Csv::create(&sum_path, SUMMARY_HEADER)?;
    for row in &rows {
        scsv.row(&row.fields())?;
    }
    if rows.len() > 1 {
        scsv.row(&SummaryRow::mean_of(&rows).fields())?;
    }
    scsv.finish()?;
    println!("wrote {}", sum_path.display());
    verdicts.into_result()
}

pub fn curves(rc: &RunConfig, out_dir: &Path) -> Result<(), AppError> {
    ensure_dir(out_dir)?;
    let p = rc.model_cfg.params;

    // steady-state gaps across the speed range
    let gap_csv_path = out_dir.join("gap_curves.csv");
    let mut csv = Csv::create(
        &gap_csv_path,
        "v_ratio,v_kmh,equilibrium_gap_m,desired_gap_m,gap_ratio",
    )?;
    let mut eq_pts = Vec::new();
    let mut des_pts = Vec::new();
    for i in 5..=99 {
        let ratio = i as f64 / 100.0;
        let v = ratio * p.v0;
        let eq = idm_equilibrium_closed_form(v, &p);
        let des = desired_gap(v, 0.0, &p);
        csv.row(&[
            sig6(ratio),
            sig6(kmh_from_mps(v)),
            sig6(eq),
            sig6(des),
            sig6(eq / des),
        ])?;
        eq_pts.push((ratio, eq));
        des_pts.push((ratio, des));
    }
    csv.finish()?;
    let gap_svg_path = out_dir.join("gap_curves.svg");
    let svg = chart::line_chart(
        "steady-state gap vs speed",
        "v / v0",
        "gap (m)",
        &[
            Series { label: "equilibrium gap".into(), points: eq_pts },
            Series { label: "desired gap".into(), points: des_pts },
        ],
    );
    chart::write_chart(&gap_svg_path, &svg)?;

    // acceleration and time-to-collision against distance to a slower leader
    let app_csv_path = out_dir.join("approach_curves.csv");
    let mut csv = Csv::create(
        &app_csv_path,
        "distance_m,leader_ratio,follower_v_kmh,leader_v_kmh,accel_mps2,ttc_s",
    )?;
    let v = mps_from_kmh(APPROACH_V_KMH);
    let mut accel_series = Vec::new();
    for &ratio in &APPROACH_RATIOS {
        let mut pts = Vec::new();
        let mut s = APPROACH_MIN_M;
        while s <= APPROACH_MAX_M + 1e-9 {
            let o = Observation::new(s, v, v * ratio);
            let a = idm_acceleration(o, &p).map_err(|e| AppError::Other(e.to_string()))?;
            let ttc = if o.dv > 0.0 { o.gap / o.dv } else { f64::NAN };
            csv.row(&[
                sig6(s),
                sig6(ratio),
                sig6(APPROACH_V_KMH),
                sig6(kmh_from_mps(v * ratio)),
                sig6(a),
                output::cell(ttc),
            ])?;
            pts.push((s, a));
            s += APPROACH_STEP_M;
        }
        accel_series.push(Series {
            label: format!("leader {}%", sig6(ratio * 100.0)),
            points: pts,
        });
    }
    csv.finish()?;
    // close-range braking grows without bound, so pin the window to the
    // comfortable scale and let the steep tails run off the frame
    let app_svg_path = out_dir.join("approach_curves.svg");
    let svg = chart::line_chart_y_window(
        "approach response at 90 km/h",
        "distance (m)",
        "acceleration (m/s^2)",
        &accel_series,
        (-6.0, 1.0),
    );
    chart::write_chart(&app_svg_path, &svg)?;

    println!(
        "wrote {}, {}, {}, {}",
        gap_csv_path.display(),
        gap_svg_path.display(),
        app_csv_path.display(),
        app_svg_path.display()
    );
    Ok(())
}
