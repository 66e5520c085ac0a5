//! Standalone SVG charts: multi-series line charts and grouped bar charts.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{ExperimentError, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
/// Longer series are decimated to roughly this many vertices.
const MAX_POINTS: usize = 2000;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn plot_width() -> f64 {
    WIDTH - LEFT - RIGHT
}

fn plot_height() -> f64 {
    HEIGHT - TOP - BOTTOM
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Tick positions on a 1-2-5 grid covering `[lo, hi]`.
fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(f64::EPSILON);
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let start = (lo / step).ceil() as i64;
    let end = (hi / step + 1e-9).floor() as i64;
    (start..=end).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 1e4 || v.fract() == 0.0 {
        format!("{:.0}", v)
    } else {
        format!("{:.2}", v)
    }
}

struct Frame {
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        LEFT + if self.x_max > 0.0 { v / self.x_max * plot_width() } else { 0.0 }
    }

    fn y(&self, v: f64) -> f64 {
        TOP + plot_height() - if self.y_max > 0.0 { v / self.y_max * plot_height() } else { 0.0 }
    }
}

fn open_svg(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        LEFT + plot_width() / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, frame: &Frame, x_ticks: &[f64], y_ticks: &[f64], x_label: &str, y_label: &str) {
    let x0 = LEFT;
    let y0 = TOP + plot_height();
    let _ = writeln!(
        out,
        "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{:.1}\" y2=\"{y0:.1}\" stroke=\"black\"/>",
        LEFT + plot_width()
    );
    let _ = writeln!(
        out,
        "<line x1=\"{x0:.1}\" y1=\"{TOP:.1}\" x2=\"{x0:.1}\" y2=\"{y0:.1}\" stroke=\"black\"/>"
    );
    for &t in x_ticks {
        let x = frame.x(t);
        let _ = writeln!(
            out,
            "<line x1=\"{x:.1}\" y1=\"{y0:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\
             <text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            y0 + 5.0,
            y0 + 18.0,
            fmt_tick(t)
        );
    }
    for &t in y_ticks {
        let y = frame.y(t);
        let _ = writeln!(
            out,
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{x0:.1}\" y2=\"{y:.1}\" stroke=\"black\"/>\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>",
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
        LEFT + plot_width() / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        "<text x=\"20\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.1})\">{}</text>",
        TOP + plot_height() / 2.0,
        TOP + plot_height() / 2.0,
        escape(y_label)
    );
}

fn legend_entry(out: &mut String, row: usize, color: &str, label: &str) {
    let x = LEFT + plot_width() + 15.0;
    let y = TOP + 10.0 + row as f64 * 20.0;
    let _ = writeln!(
        out,
        "<rect x=\"{x:.1}\" y=\"{:.1}\" width=\"14\" height=\"10\" fill=\"{color}\"/>\
         <text x=\"{:.1}\" y=\"{y:.1}\">{}</text>",
        y - 9.0,
        x + 20.0,
        escape(label)
    );
}

/// A labelled y-series; x is the index (round number).
pub struct Series<'a> {
    pub label: &'a str,
    pub values: &'a [f64],
}

/// Line chart with one polyline per non-empty series.
pub fn line_chart_svg(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let len = series.iter().map(|s| s.values.len()).max().unwrap_or(0);
    let x_max = len.saturating_sub(1) as f64;
    let y_hi = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    let y_ticks = nice_ticks(0.0, if y_hi > 0.0 { y_hi } else { 1.0 }, 6);
    let y_max = y_ticks.last().copied().unwrap_or(1.0).max(y_hi).max(f64::MIN_POSITIVE);
    let frame = Frame { x_max, y_max };
    let x_ticks = nice_ticks(0.0, x_max.max(1.0), 6);

    let mut out = String::new();
    open_svg(&mut out, title);
    axes(&mut out, &frame, &x_ticks, &y_ticks, x_label, y_label);

    for (i, s) in series.iter().enumerate() {
        if s.values.is_empty() {
            continue;
        }
        let color = PALETTE[i % PALETTE.len()];
        let stride = s.values.len().div_ceil(MAX_POINTS).max(1);
        let last = s.values.len() - 1;
        let mut points = String::new();
        let indices = (0..=last).step_by(stride).chain((last % stride != 0).then_some(last));
        for idx in indices {
            let v = s.values[idx];
            let v = if v.is_finite() { v } else { 0.0 };
            let _ = write!(points, "{:.2},{:.2} ", frame.x(idx as f64), frame.y(v));
        }
        // A lone point still spans the plot so constant series stay visible.
        if last == 0 {
            let _ = write!(points, "{:.2},{:.2}", LEFT + plot_width(), frame.y(s.values[0]));
        }
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            points.trim_end()
        );
        legend_entry(&mut out, i, color, s.label);
    }
    out.push_str("</svg>\n");
    out
}

/// One bar within a group; `censored` draws a hatch marker on top.
#[derive(Debug, Clone, Copy)]
pub struct Bar {
    pub value: f64,
    pub censored: bool,
}

/// Grouped bar chart: one group per category, one bar per series within it.
pub fn bar_chart_svg(
    title: &str,
    y_label: &str,
    categories: &[&str],
    series: &[(&str, Vec<Bar>)],
) -> String {
    let y_hi = series
        .iter()
        .flat_map(|(_, bars)| bars.iter().map(|b| b.value))
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    let y_ticks = nice_ticks(0.0, if y_hi > 0.0 { y_hi } else { 1.0 }, 6);
    let y_max = y_ticks.last().copied().unwrap_or(1.0).max(y_hi);
    let frame = Frame { x_max: 1.0, y_max };

    let mut out = String::new();
    open_svg(&mut out, title);
    axes(&mut out, &frame, &[], &y_ticks, "", y_label);

    let groups = categories.len().max(1) as f64;
    let group_w = plot_width() / groups;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;
    let base = TOP + plot_height();
    for (g, cat) in categories.iter().enumerate() {
        let gx = LEFT + g as f64 * group_w;
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            gx + group_w / 2.0,
            base + 18.0,
            escape(cat)
        );
        for (s, (_, bars)) in series.iter().enumerate() {
            let Some(bar) = bars.get(g) else { continue };
            let v = if bar.value.is_finite() { bar.value } else { 0.0 };
            let x = gx + group_w * 0.1 + s as f64 * bar_w;
            let y = frame.y(v);
            let _ = writeln!(
                out,
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"{}\"/>",
                bar_w * 0.95,
                base - y,
                PALETTE[s % PALETTE.len()]
            );
            if bar.censored {
                let _ = writeln!(
                    out,
                    "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-weight=\"bold\">*</text>",
                    x + bar_w * 0.475,
                    y - 4.0
                );
            }
        }
    }
    for (s, (label, _)) in series.iter().enumerate() {
        legend_entry(&mut out, s, PALETTE[s % PALETTE.len()], label);
    }
    if series.iter().any(|(_, bars)| bars.iter().any(|b| b.censored)) {
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\">* censored at horizon</text>",
            LEFT + plot_width() + 15.0,
            TOP + 10.0 + series.len() as f64 * 20.0
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_svg(path: &Path, svg: &str) -> Result<()> {
    std::fs::write(path, svg).map_err(|e| ExperimentError::io(path, e))
}
