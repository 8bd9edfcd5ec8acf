//! Minimal hand-rolled SVG line charts. No styling knobs: fixed canvas,
//! fixed palette, tick labels through the same formatter as the CSVs so
//! chart output is deterministic too.

use crate::output::sig6;
use crate::AppError;
use std::path::Path;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
/// Plot rectangle inside the canvas.
const LEFT: f64 = 72.0;
const RIGHT: f64 = 692.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 430.0;

const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Tick positions: a round step size chosen so about five divisions span
/// the range, snapped to 1/2/5 times a power of ten.
fn ticks(min: f64, max: f64) -> Vec<f64> {
    let range = max - min;
    if !(range > 0.0) {
        return vec![min];
    }
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    } * mag;
    let mut t = (min / step).ceil() * step;
    let mut out = Vec::new();
    while t <= max + step * 1e-9 {
        // snap values like 0.30000000000000004 back to a clean multiple
        out.push((t / step).round() * step);
        t += step;
    }
    out
}

pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    chart_impl(title, x_label, y_label, series, None)
}

/// Like [`line_chart`] but with a fixed vertical window; curves running
/// outside it are clipped at the frame.
pub fn line_chart_y_window(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    y_window: (f64, f64),
) -> String {
    chart_impl(title, x_label, y_label, series, Some(y_window))
}

fn chart_impl(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    y_window: Option<(f64, f64)>,
) -> String {
    let finite: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (x_min, x_max, y_min, y_max) = if finite.is_empty() {
        (0.0, 1.0, 0.0, 1.0)
    } else {
        let xs = finite.iter().map(|p| p.0);
        let ys = finite.iter().map(|p| p.1);
        (
            xs.clone().fold(f64::INFINITY, f64::min),
            xs.fold(f64::NEG_INFINITY, f64::max),
            ys.clone().fold(f64::INFINITY, f64::min),
            ys.fold(f64::NEG_INFINITY, f64::max),
        )
    };
    // pad the y range a little so lines do not sit on the frame
    let y_pad = if y_max > y_min { 0.05 * (y_max - y_min) } else { 1.0 };
    let (y_lo, y_hi) = y_window.unwrap_or((y_min - y_pad, y_max + y_pad));
    let (x_lo, x_hi) = if x_max > x_min { (x_min, x_max) } else { (x_min - 1.0, x_max + 1.0) };

    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * (RIGHT - LEFT);
    let sy = |y: f64| BOTTOM - (y - y_lo) / (y_hi - y_lo) * (BOTTOM - TOP);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"monospace\" font-size=\"12\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<clipPath id=\"plot\"><rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{:.1}\" \
         height=\"{:.1}\"/></clipPath>\n",
        RIGHT - LEFT,
        BOTTOM - TOP
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        (LEFT + RIGHT) / 2.0,
        title
    ));

    for t in ticks(x_lo, x_hi) {
        let x = sx(t);
        svg.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{TOP}\" x2=\"{x:.1}\" y2=\"{BOTTOM}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            BOTTOM + 18.0,
            sig6(t)
        ));
    }
    for t in ticks(y_lo, y_hi) {
        let y = sy(t);
        svg.push_str(&format!(
            "<line x1=\"{LEFT}\" y1=\"{y:.1}\" x2=\"{RIGHT}\" y2=\"{y:.1}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            LEFT - 8.0,
            y + 4.0,
            sig6(t)
        ));
    }
    svg.push_str(&format!(
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" \
         stroke=\"black\" stroke-width=\"1\"/>\n",
        RIGHT - LEFT,
        BOTTOM - TOP
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 12.0,
        x_label
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0,
        y_label
    ));

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\" \
             clip-path=\"url(#plot)\"/>\n",
            pts.join(" ")
        ));
        let ly = TOP + 16.0 + 16.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>\n",
            RIGHT - 150.0,
            RIGHT - 126.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>\n",
            RIGHT - 120.0,
            ly + 4.0,
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_chart(path: &Path, svg: &str) -> Result<(), AppError> {
    std::fs::write(path, svg).map_err(|e| AppError::Other(format!("{}: {e}", path.display())))
}
