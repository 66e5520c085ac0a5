use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;
use wsn_core::Protocol;
use wsn_experiment::{parse_config, run_experiment};

/// Run seeded EECP / heterogeneous-LEACH comparisons and write results.
#[derive(Parser, Debug)]
#[command(name = "wsn-sim", version)]
struct Args {
    /// JSON config file; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trials per protocol.
    #[arg(long)]
    trials: Option<u64>,
    /// Base seed; trial i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Protocol to run (repeatable): leach_het, eecp.
    #[arg(long = "protocol")]
    protocols: Vec<Protocol>,
    /// Round horizon.
    #[arg(long)]
    rounds: Option<u64>,
    /// Emit SVG charts.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    charts: Option<bool>,
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();

    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?,
        None => String::new(),
    };
    let mut spec = parse_config(&text)?;
    if let Some(out) = args.out {
        spec.output_dir = out;
    }
    if let Some(t) = args.trials {
        spec.trials = t;
    }
    if let Some(s) = args.seed {
        spec.base_seed = s;
    }
    if !args.protocols.is_empty() {
        spec.protocols = args.protocols;
    }
    if let Some(r) = args.rounds {
        spec.network.max_rounds = r;
    }
    if let Some(c) = args.charts {
        spec.emit_charts = c;
    }

    let outcome = run_experiment(&spec)?;
    println!("{:<10} {:>10} {:>10} {:>10} {:>12}", "protocol", "first", "half", "last", "packets");
    for r in &outcome.results {
        let m = &r.aggregate.milestones;
        let p = &outcome.summary.protocols[&r.protocol].packets_to_bs;
        println!(
            "{:<10} {:>10.1} {:>10.1} {:>10.1} {:>12.1}",
            r.protocol.as_str(),
            m.first_dead_round.mean,
            m.half_dead_round.mean,
            m.last_dead_round.mean,
            p.mean
        );
    }
    println!("results written to {}", spec.output_dir.display());
    Ok(())
}
