//! CSV writers for per-trial and aggregated series.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use wsn_core::{AggregatedSeries, RoundSeries};

use crate::error::{ExperimentError, Result};

pub const SERIES_HEADER: &str = "round,alive,ch_count,packets,packets_cum,residual_j";

pub const AGGREGATE_HEADER: &str = "round,alive_mean,alive_sd,ch_count_mean,ch_count_sd,\
packets_mean,packets_sd,packets_cum_mean,packets_cum_sd,residual_j_mean,residual_j_sd";

fn write_file(path: &Path, body: &str) -> Result<()> {
    let file = File::create(path).map_err(|e| ExperimentError::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(body.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| ExperimentError::io(path, e))
}

/// Render a series as CSV text. Floats use the shortest representation that
/// parses back to the same value.
pub fn series_csv(series: &RoundSeries) -> String {
    let mut out = String::with_capacity(32 * (series.len() + 1));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for i in 0..series.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            series.round[i],
            series.alive_count[i],
            series.ch_count[i],
            series.packets_to_bs[i],
            series.packets_cum[i],
            series.total_residual_energy[i],
        ));
    }
    out
}

pub fn emit_csv(series: &RoundSeries, path: &Path) -> Result<()> {
    write_file(path, &series_csv(series))
}

pub fn aggregate_csv(agg: &AggregatedSeries) -> String {
    let mut out = String::new();
    out.push_str(AGGREGATE_HEADER);
    out.push('\n');
    for i in 0..agg.round.len() {
        out.push_str(&agg.round[i].to_string());
        for col in [&agg.alive, &agg.ch_count, &agg.packets, &agg.packets_cum, &agg.residual_j] {
            out.push_str(&format!(",{},{}", col[i].mean, col[i].stddev));
        }
        out.push('\n');
    }
    out
}

pub fn emit_aggregate_csv(agg: &AggregatedSeries, path: &Path) -> Result<()> {
    write_file(path, &aggregate_csv(agg))
}

/// Parse text produced by [`series_csv`].
pub fn parse_series_csv(text: &str) -> std::result::Result<RoundSeries, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(SERIES_HEADER) => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    let mut s = RoundSeries::default();
    for (n, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(format!("line {}: expected 6 fields, got {}", n + 2, fields.len()));
        }
        let bad = |e: &dyn std::fmt::Display| format!("line {}: {e}", n + 2);
        s.round.push(fields[0].parse().map_err(|e| bad(&e))?);
        s.alive_count.push(fields[1].parse().map_err(|e| bad(&e))?);
        s.ch_count.push(fields[2].parse().map_err(|e| bad(&e))?);
        s.packets_to_bs.push(fields[3].parse().map_err(|e| bad(&e))?);
        s.packets_cum.push(fields[4].parse().map_err(|e| bad(&e))?);
        s.total_residual_energy.push(fields[5].parse().map_err(|e| bad(&e))?);
    }
    Ok(s)
}
