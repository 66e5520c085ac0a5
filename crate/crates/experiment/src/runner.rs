//! Multi-trial, multi-protocol experiments and their on-disk results.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;
use wsn_core::{
    aggregate_trials, run_simulation, AggregatedSeries, LifetimeMilestones, MilestoneStats, Node,
    Protocol, Stat, TrialSummary,
};

use crate::chart::{bar_chart_svg, line_chart_svg, write_svg, Bar, Series};
use crate::config::ExperimentSpec;
use crate::error::{ExperimentError, Result};
use crate::output::{emit_aggregate_csv, emit_csv};

/// One executed trial.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    /// Network as deployed before round 0.
    pub deployment: Vec<Node>,
    pub summary: TrialSummary,
    /// Initial minus final total node energy.
    pub energy_drawn: f64,
    /// Sum of per-round, per-node expenditure in the round reports.
    pub energy_booked: f64,
}

impl TrialRecord {
    pub fn rounds(&self) -> usize {
        self.summary.series.len()
    }

    pub fn final_packets(&self) -> u64 {
        self.summary.series.packets_cum.last().copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub protocol: Protocol,
    pub trials: Vec<TrialRecord>,
    pub aggregate: AggregatedSeries,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub spec: ExperimentSpec,
    pub results: Vec<ProtocolResult>,
    pub summary: Summary,
}

impl ExperimentOutcome {
    pub fn result(&self, protocol: Protocol) -> Option<&ProtocolResult> {
        self.results.iter().find(|r| r.protocol == protocol)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialLine {
    pub trial: u64,
    pub seed: u64,
    pub rounds: usize,
    pub milestones: LifetimeMilestones,
    pub packets_to_bs: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProtocolSummary {
    pub milestones: MilestoneStats,
    /// Cumulative packets delivered to the base station by the end of a trial.
    pub packets_to_bs: Stat,
    pub rounds: Stat,
    pub trials: Vec<TrialLine>,
}

/// Difference between two protocols on one metric, `treatment - baseline`.
#[derive(Debug, Clone, Serialize)]
pub struct EffectSize {
    pub baseline_mean: f64,
    pub treatment_mean: f64,
    pub difference: f64,
    /// `difference / baseline_mean`.
    pub relative: f64,
    /// Difference over the pooled sample standard deviation.
    pub cohens_d: f64,
    pub treatment_greater: bool,
}

impl EffectSize {
    pub fn between(baseline: &[f64], treatment: &[f64]) -> Self {
        let b = Stat::of(baseline);
        let t = Stat::of(treatment);
        let nb = baseline.len() as f64;
        let nt = treatment.len() as f64;
        let pooled = if nb + nt > 2.0 {
            (((nb - 1.0) * b.stddev.powi(2) + (nt - 1.0) * t.stddev.powi(2)) / (nb + nt - 2.0)).sqrt()
        } else {
            0.0
        };
        let difference = t.mean - b.mean;
        Self {
            baseline_mean: b.mean,
            treatment_mean: t.mean,
            difference,
            relative: difference / b.mean,
            cohens_d: if pooled > 0.0 { difference / pooled } else { f64::NAN },
            treatment_greater: t.mean > b.mean,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub baseline: Protocol,
    pub treatment: Protocol,
    pub first_dead_round: EffectSize,
    pub half_dead_round: EffectSize,
    pub last_dead_round: EffectSize,
    pub packets_to_bs: EffectSize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub config: ExperimentSpec,
    pub protocols: BTreeMap<Protocol, ProtocolSummary>,
    pub comparisons: Vec<Comparison>,
}

fn uncensored(values: impl Iterator<Item = Option<u64>>) -> Vec<f64> {
    values.flatten().map(|v| v as f64).collect()
}

fn compare(baseline: &ProtocolResult, treatment: &ProtocolResult) -> Comparison {
    let metric = |r: &ProtocolResult, f: fn(&LifetimeMilestones) -> Option<u64>| {
        uncensored(r.trials.iter().map(|t| f(&t.summary.milestones)))
    };
    let effect = |f: fn(&LifetimeMilestones) -> Option<u64>| {
        EffectSize::between(&metric(baseline, f), &metric(treatment, f))
    };
    let packets = |r: &ProtocolResult| r.trials.iter().map(|t| t.final_packets() as f64).collect::<Vec<_>>();
    Comparison {
        baseline: baseline.protocol,
        treatment: treatment.protocol,
        first_dead_round: effect(|m| m.first_dead_round),
        half_dead_round: effect(|m| m.half_dead_round),
        last_dead_round: effect(|m| m.last_dead_round),
        packets_to_bs: EffectSize::between(&packets(baseline), &packets(treatment)),
    }
}

fn summarize(spec: &ExperimentSpec, results: &[ProtocolResult]) -> Summary {
    let protocols = results
        .iter()
        .map(|r| {
            let packets: Vec<f64> = r.trials.iter().map(|t| t.final_packets() as f64).collect();
            let rounds: Vec<f64> = r.trials.iter().map(|t| t.rounds() as f64).collect();
            let trials = r
                .trials
                .iter()
                .map(|t| TrialLine {
                    trial: t.trial,
                    seed: t.seed,
                    rounds: t.rounds(),
                    milestones: t.summary.milestones,
                    packets_to_bs: t.final_packets(),
                })
                .collect();
            (
                r.protocol,
                ProtocolSummary {
                    milestones: r.aggregate.milestones,
                    packets_to_bs: Stat::of(&packets),
                    rounds: Stat::of(&rounds),
                    trials,
                },
            )
        })
        .collect();

    let mut comparisons = Vec::new();
    for (i, base) in results.iter().enumerate() {
        for treat in &results[i + 1..] {
            comparisons.push(compare(base, treat));
        }
    }
    Summary {
        config: spec.clone(),
        protocols,
        comparisons,
    }
}

/// Run every protocol × trial without touching the filesystem.
pub fn execute(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let mut results = Vec::new();
    for &protocol in &spec.protocols {
        let config = spec.config_for(protocol);
        let mut trials = Vec::new();
        for trial in 0..spec.trials {
            let seed = spec.seed_for(trial);
            let trace = run_simulation(&config, seed)?;
            trials.push(TrialRecord {
                trial,
                seed,
                deployment: trace.initial_nodes.clone(),
                summary: TrialSummary::from_trace(&trace)?,
                energy_drawn: trace.initial_energy() - trace.final_energy(),
                energy_booked: trace.total_spent(),
            });
        }
        let summaries: Vec<TrialSummary> = trials.iter().map(|t| t.summary.clone()).collect();
        let aggregate = aggregate_trials(&summaries)?;
        info!(
            "{protocol}: {} trials, mean first/last dead round {:.1}/{:.1}",
            spec.trials, aggregate.milestones.first_dead_round.mean, aggregate.milestones.last_dead_round.mean
        );
        results.push(ProtocolResult {
            protocol,
            trials,
            aggregate,
        });
    }
    let summary = summarize(spec, &results);
    Ok(ExperimentOutcome {
        spec: spec.clone(),
        results,
        summary,
    })
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| ExperimentError::io(path, e))
}

/// Write CSVs, `summary.json`, and (optionally) charts under the output
/// directory. Returns the paths written, in order.
pub fn write_outputs(outcome: &ExperimentOutcome) -> Result<Vec<PathBuf>> {
    let out = &outcome.spec.output_dir;
    create_dir(out)?;
    let mut written = Vec::new();

    for r in &outcome.results {
        let dir = out.join(r.protocol.as_str());
        create_dir(&dir)?;
        for t in &r.trials {
            let path = dir.join(format!("trial_{}.csv", t.trial));
            emit_csv(&t.summary.series, &path)?;
            written.push(path);
        }
        let path = dir.join("aggregate.csv");
        emit_aggregate_csv(&r.aggregate, &path)?;
        written.push(path);
    }

    let path = out.join("summary.json");
    let mut json = serde_json::to_string_pretty(&outcome.summary)?;
    json.push('\n');
    fs::write(&path, json).map_err(|e| ExperimentError::io(&path, e))?;
    written.push(path);

    if outcome.spec.emit_charts {
        for (name, svg) in charts(outcome) {
            let path = out.join(name);
            write_svg(&path, &svg)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// The three comparison figures: lifetime milestones, alive nodes, and
/// cumulative packets delivered.
pub fn charts(outcome: &ExperimentOutcome) -> Vec<(&'static str, String)> {
    let horizon = outcome.spec.network.max_rounds as f64;
    let milestone_bars: Vec<(&str, Vec<Bar>)> = outcome
        .results
        .iter()
        .map(|r| {
            let m = &r.aggregate.milestones;
            let bars = [m.first_dead_round, m.half_dead_round, m.last_dead_round]
                .iter()
                .map(|s| Bar {
                    value: if s.uncensored > 0 { s.mean } else { horizon },
                    censored: s.censored > 0,
                })
                .collect();
            (r.protocol.as_str(), bars)
        })
        .collect();
    let fig4 = bar_chart_svg(
        "Round of first, half, and last node death",
        "round",
        &["first dead", "half dead", "last dead"],
        &milestone_bars,
    );

    let means = |f: fn(&wsn_core::AggregatedSeries) -> &Vec<Stat>| -> Vec<(&'static str, Vec<f64>)> {
        outcome
            .results
            .iter()
            .map(|r| (r.protocol.as_str(), f(&r.aggregate).iter().map(|s| s.mean).collect()))
            .collect()
    };
    let alive = means(|a| &a.alive);
    let packets = means(|a| &a.packets_cum);
    let fig5 = line_chart_svg("Alive nodes", "round", "alive nodes", &as_series(&alive));
    let fig6 = line_chart_svg(
        "Packets sent to base station",
        "round",
        "cumulative packets",
        &as_series(&packets),
    );
    vec![("fig4.svg", fig4), ("fig5.svg", fig5), ("fig6.svg", fig6)]
}

fn as_series<'a>(v: &'a [(&'static str, Vec<f64>)]) -> Vec<Series<'a>> {
    v.iter().map(|(label, values)| Series { label, values }).collect()
}

/// Execute the experiment and write all outputs.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    let outcome = execute(spec)?;
    write_outputs(&outcome)?;
    Ok(outcome)
}
