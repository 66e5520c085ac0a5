//! Lifetime milestones, per-round series, and multi-trial aggregation.

use serde::{Deserialize, Serialize};

use crate::engine::SimulationTrace;
use crate::error::{Result, SimError};
use crate::model::NetworkConfig;

/// Rounds at which the first node, half the nodes (`⌈N/2⌉`), and the last
/// node had died. `None` means the event did not happen within the horizon.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifetimeMilestones {
    pub first_dead_round: Option<u64>,
    pub half_dead_round: Option<u64>,
    pub last_dead_round: Option<u64>,
}

pub fn lifetime_milestones(trace: &SimulationTrace) -> Result<LifetimeMilestones> {
    if trace.reports.is_empty() {
        return Err(SimError::EmptyTrace);
    }
    let n = trace.initial_nodes.len();
    let half = n.div_ceil(2);
    let mut dead = 0usize;
    let mut m = LifetimeMilestones::default();
    for report in &trace.reports {
        dead += report.deaths.len();
        if dead >= 1 && m.first_dead_round.is_none() {
            m.first_dead_round = Some(report.round);
        }
        if dead >= half && m.half_dead_round.is_none() {
            m.half_dead_round = Some(report.round);
        }
        if dead >= n && m.last_dead_round.is_none() {
            m.last_dead_round = Some(report.round);
        }
    }
    Ok(m)
}

/// Per-round vectors, all of the same length as the trace.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundSeries {
    pub round: Vec<u64>,
    /// Alive nodes at the end of each round.
    pub alive_count: Vec<usize>,
    pub ch_count: Vec<usize>,
    pub packets_to_bs: Vec<u64>,
    pub packets_cum: Vec<u64>,
    /// Sum of non-negative residual energy at the end of each round.
    pub total_residual_energy: Vec<f64>,
}

impl RoundSeries {
    pub fn len(&self) -> usize {
        self.round.len()
    }

    pub fn is_empty(&self) -> bool {
        self.round.is_empty()
    }
}

pub fn per_round_series(trace: &SimulationTrace) -> RoundSeries {
    let mut energy: Vec<f64> = trace.initial_nodes.iter().map(|n| n.energy).collect();
    let mut alive = trace.initial_nodes.iter().filter(|n| n.alive).count();
    let mut cum = 0u64;
    let mut s = RoundSeries::default();
    for r in &trace.reports {
        for (e, spent) in energy.iter_mut().zip(&r.energy_spent) {
            *e -= spent;
        }
        alive -= r.deaths.len();
        cum += r.packets_to_bs;
        s.round.push(r.round);
        s.alive_count.push(alive);
        s.ch_count.push(r.heads.len());
        s.packets_to_bs.push(r.packets_to_bs);
        s.packets_cum.push(cum);
        s.total_residual_energy
            .push(energy.iter().map(|e| e.max(0.0)).sum());
    }
    s
}

/// What a trial contributes to aggregation; far smaller than its trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub config: NetworkConfig,
    pub seed: u64,
    pub series: RoundSeries,
    pub milestones: LifetimeMilestones,
}

impl TrialSummary {
    pub fn from_trace(trace: &SimulationTrace) -> Result<Self> {
        Ok(Self {
            config: trace.config.clone(),
            seed: trace.seed,
            series: per_round_series(trace),
            milestones: lifetime_milestones(trace)?,
        })
    }
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub stddev: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self { mean: f64::NAN, stddev: f64::NAN };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let stddev = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Self { mean, stddev }
    }
}

/// A milestone summarized over the trials in which it occurred.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MilestoneStat {
    pub mean: f64,
    pub stddev: f64,
    pub uncensored: usize,
    pub censored: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MilestoneStats {
    pub first_dead_round: MilestoneStat,
    pub half_dead_round: MilestoneStat,
    pub last_dead_round: MilestoneStat,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregatedSeries {
    pub trials: usize,
    pub round: Vec<u64>,
    pub alive: Vec<Stat>,
    pub ch_count: Vec<Stat>,
    pub packets: Vec<Stat>,
    pub packets_cum: Vec<Stat>,
    pub residual_j: Vec<Stat>,
    pub milestones: MilestoneStats,
}

fn milestone_stat(values: impl Iterator<Item = Option<u64>>) -> MilestoneStat {
    let mut hit = Vec::new();
    let mut censored = 0;
    for v in values {
        match v {
            Some(r) => hit.push(r as f64),
            None => censored += 1,
        }
    }
    let s = Stat::of(&hit);
    MilestoneStat {
        mean: s.mean,
        stddev: s.stddev,
        uncensored: hit.len(),
        censored,
    }
}

/// Round-by-round mean and standard deviation across trials.
///
/// Shorter trials are padded past their end with terminal values: alive
/// count, cumulative packets, and residual energy hold their last value while
/// per-round CH and packet counts are zero.
pub fn aggregate_trials(trials: &[TrialSummary]) -> Result<AggregatedSeries> {
    let first = trials.first().ok_or(SimError::NoTraces)?;
    if trials.iter().any(|t| t.config != first.config) {
        return Err(SimError::MixedConfigs);
    }
    let len = trials.iter().map(|t| t.series.len()).max().unwrap_or(0);

    let held = |v: &[f64], i: usize| v.get(i).or(v.last()).copied().unwrap_or(0.0);
    let zeroed = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);

    let cols = |f: &dyn Fn(&RoundSeries) -> Vec<f64>, hold: bool| -> Vec<Stat> {
        let data: Vec<Vec<f64>> = trials.iter().map(|t| f(&t.series)).collect();
        (0..len)
            .map(|i| {
                let row: Vec<f64> = data
                    .iter()
                    .map(|v| if hold { held(v, i) } else { zeroed(v, i) })
                    .collect();
                Stat::of(&row)
            })
            .collect()
    };

    Ok(AggregatedSeries {
        trials: trials.len(),
        round: (0..len as u64).collect(),
        alive: cols(&|s| s.alive_count.iter().map(|&v| v as f64).collect(), true),
        ch_count: cols(&|s| s.ch_count.iter().map(|&v| v as f64).collect(), false),
        packets: cols(&|s| s.packets_to_bs.iter().map(|&v| v as f64).collect(), false),
        packets_cum: cols(&|s| s.packets_cum.iter().map(|&v| v as f64).collect(), true),
        residual_j: cols(&|s| s.total_residual_energy.clone(), true),
        milestones: MilestoneStats {
            first_dead_round: milestone_stat(trials.iter().map(|t| t.milestones.first_dead_round)),
            half_dead_round: milestone_stat(trials.iter().map(|t| t.milestones.half_dead_round)),
            last_dead_round: milestone_stat(trials.iter().map(|t| t.milestones.last_dead_round)),
        },
    })
}
