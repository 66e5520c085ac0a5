//! Acceptance gate. Every criterion runs in sequence inside one test so that
//! wall-clock budgets are measured without interference, and each prints a
//! single PASS/FAIL line. Run with `-- --nocapture` to see the report.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use wsn_core::*;
use wsn_experiment::runner::{EffectSize, ExperimentOutcome};
use wsn_experiment::{execute, run_experiment, write_outputs, ExperimentSpec};

const EXACT_REL_TOL: f64 = 1e-12;
const D0_ABS_TOL: f64 = 1e-3;
const ANALYTIC_REL_TOL: f64 = 0.005;
const HAND_ROUND_REL_TOL: f64 = 1e-15;
const CONSERVATION_REL_TOL: f64 = 1e-9;
const CH_COUNT_RANGE: (f64, f64) = (9.0, 11.0);
const ELECTION_TRIALS: u64 = 1_000;
const EPOCH_CHECK_ROUNDS: usize = 30;
const FREQUENCY_DRAWS: usize = 100_000;
const FREQUENCY_REL_TOL: f64 = 0.10;
const ACCEPTANCE_TRIALS: u64 = 30;
const BUDGET_FAST: Duration = Duration::from_secs(1);
const BUDGET_ONE_MINUTE: Duration = Duration::from_secs(60);
const BUDGET_TWO_MINUTES: Duration = Duration::from_secs(120);

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn record(&mut self, id: &str, pass: bool, elapsed: Duration, budget: Duration, detail: String) {
        let within = elapsed <= budget;
        let ok = pass && within;
        println!(
            "[{}] {id}: {detail} ({:.2?}, budget {:.0?}{})",
            if ok { "PASS" } else { "FAIL" },
            elapsed,
            budget,
            if within { "" } else { ", OVER BUDGET" }
        );
        if !ok {
            self.failures.push(id.to_string());
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn acceptance_spec(out: &Path) -> ExperimentSpec {
    ExperimentSpec {
        trials: ACCEPTANCE_TRIALS,
        output_dir: out.to_path_buf(),
        ..ExperimentSpec::default()
    }
}

fn criterion_1(report: &mut Report) {
    let t = Instant::now();
    let p = RadioParams::default();
    let tx50 = tx_energy(4000, 50.0, &p);
    let tx100 = tx_energy(4000, 100.0, &p);
    let d0 = crossover_distance(p.eps_fs, p.eps_mp).unwrap();
    let a = analytic_avg_distance(100, 100.0, p.eps_fs, p.eps_mp).unwrap();
    let pass = rel(tx50, 1.2e-4) < EXACT_REL_TOL
        && rel(tx100, 5.4e-4) < EXACT_REL_TOL
        && (d0 - 87.7058).abs() <= D0_ABS_TOL
        && rel(a.d_to_bs, 38.25) <= ANALYTIC_REL_TOL
        && rel(a.k_opt, 23.92) <= ANALYTIC_REL_TOL
        && rel(a.d_avg, 46.41) <= ANALYTIC_REL_TOL;
    report.record(
        "C1 closed-form oracles",
        pass,
        t.elapsed(),
        BUDGET_FAST,
        format!(
            "tx(50)={tx50:e} tx(100)={tx100:e} d0={d0:.4} d_TOBS={:.3} k={:.3} D_avg={:.3}",
            a.d_to_bs, a.k_opt, a.d_avg
        ),
    );
}

fn criterion_2(report: &mut Report) {
    let t = Instant::now();
    let cfg = NetworkConfig {
        n_nodes: 4,
        gateway_fraction: 0.0,
        bs_position: Point::new(50.0, 50.0),
        ..NetworkConfig::default()
    };
    let nodes = [(50.0, 40.0), (50.0, 60.0), (30.0, 50.0), (70.0, 50.0)]
        .iter()
        .map(|&(x, y)| Node {
            id: 0,
            pos: Point::new(x, y),
            kind: NodeKind::Normal,
            energy: cfg.initial_energy,
            alive: true,
            epoch_elected: false,
            dist_to_bs: 0.0,
        })
        .collect();
    let mut state = NetworkState::from_nodes(&cfg, nodes, 0).unwrap();
    let policy = RoundPolicy::from_config(&cfg, 20.0);
    let r = execute_round(&mut state, &policy, BTreeSet::from([0])).unwrap();

    // Independent oracle: squared distances are 400 (member 1), 500
    // (members 2, 3) and 100 (head to BS); head hears 3 members and fuses 4
    // signals.
    let l = 4000.0;
    let elec = l * 5e-9;
    let fs = |d2: f64| l * 10e-12 * d2;
    let oracle = [
        3.0 * elec + 4.0 * l * 5e-9 + elec + fs(100.0),
        elec + fs(400.0),
        elec + fs(500.0),
        elec + fs(500.0),
    ];
    let worst = oracle
        .iter()
        .zip(&r.energy_spent)
        .map(|(want, got)| rel(*got, *want))
        .fold(0.0, f64::max);
    report.record(
        "C2 hand-oracle round",
        worst <= HAND_ROUND_REL_TOL,
        t.elapsed(),
        BUDGET_FAST,
        format!("max relative deviation {worst:e}"),
    );
}

fn criterion_3(report: &mut Report, outcome: &ExperimentOutcome, elapsed: Duration) {
    let mut worst = 0.0f64;
    let mut trials = 0;
    for r in &outcome.results {
        for t in &r.trials {
            worst = worst.max(rel(t.energy_booked, t.energy_drawn));
            trials += 1;
        }
    }
    report.record(
        "C3 energy conservation",
        worst <= CONSERVATION_REL_TOL && trials == 2 * ACCEPTANCE_TRIALS,
        elapsed,
        BUDGET_ONE_MINUTE,
        format!("{trials} trials, worst relative mismatch {worst:e}"),
    );
}

fn criterion_4(report: &mut Report) {
    let t = Instant::now();
    let cfg = NetworkConfig {
        protocol: Protocol::LeachHet,
        ..NetworkConfig::default()
    };
    let policy = RoundPolicy::from_config(&cfg, 1.0);
    let epoch = epoch_length(cfg.p_opt) as usize;
    let mut round0_heads = 0usize;
    let mut violations = 0usize;
    for seed in 0..ELECTION_TRIALS {
        let mut state = deploy_network(&cfg, seed).unwrap();
        let mut seen_this_epoch = BTreeSet::new();
        for round in 0..EPOCH_CHECK_ROUNDS {
            if round % epoch == 0 {
                seen_this_epoch.clear();
            }
            let r = run_round(&mut state, &policy).unwrap();
            if round == 0 {
                round0_heads += r.heads.len();
            }
            for h in &r.heads {
                if !seen_this_epoch.insert(*h) {
                    violations += 1;
                }
            }
        }
    }
    let mean = round0_heads as f64 / ELECTION_TRIALS as f64;
    report.record(
        "C4 election statistics",
        (CH_COUNT_RANGE.0..=CH_COUNT_RANGE.1).contains(&mean) && violations == 0,
        t.elapsed(),
        BUDGET_ONE_MINUTE,
        format!("mean round-0 CH count {mean:.3} over {ELECTION_TRIALS} trials, {violations} epoch violations"),
    );
}

fn criterion_5(report: &mut Report) {
    let t = Instant::now();
    let d_avg = 40.0;
    let cfg = NetworkConfig {
        n_nodes: 2,
        gateway_fraction: 0.0,
        bs_position: Point::new(50.0, 50.0),
        ..NetworkConfig::default()
    };
    let at = |x: f64| Node {
        id: 0,
        pos: Point::new(x, 50.0),
        kind: NodeKind::Normal,
        energy: 1.0,
        alive: true,
        epoch_elected: false,
        dist_to_bs: 0.0,
    };
    let mut state = NetworkState::from_nodes(&cfg, vec![at(50.0), at(50.0 + d_avg / 2.0)], 4242).unwrap();
    let mut hits = [0usize; 2];
    for _ in 0..FREQUENCY_DRAWS {
        // Round 0 renews eligibility on every call.
        let heads = elect_cluster_heads(&mut state, Protocol::Eecp, ThresholdVariant::Literal, d_avg).unwrap();
        for h in heads {
            hits[h] += 1;
        }
    }
    let f_near = hits[0] as f64 / FREQUENCY_DRAWS as f64;
    let f_half = hits[1] as f64 / FREQUENCY_DRAWS as f64;
    report.record(
        "C5 threshold scaling",
        rel(f_half, 0.05) <= FREQUENCY_REL_TOL && rel(f_near, 0.10) <= FREQUENCY_REL_TOL,
        t.elapsed(),
        BUDGET_ONE_MINUTE,
        format!("frequency at D_avg/2 = {f_half:.4}, at 0 = {f_near:.4} ({FREQUENCY_DRAWS} draws)"),
    );
}

fn lnd_means(outcome: &ExperimentOutcome, protocol: Protocol) -> (f64, usize) {
    let m = outcome.result(protocol).unwrap().aggregate.milestones.last_dead_round;
    (m.mean, m.censored)
}

fn describe(name: &str, e: &EffectSize) -> String {
    format!(
        "{name} {:.1} vs {:.1} (d={:.2}, {})",
        e.treatment_mean,
        e.baseline_mean,
        e.cohens_d,
        if e.treatment_greater { "ok" } else { "NOT greater" }
    )
}

fn directional(outcome: &ExperimentOutcome, baseline: &ExperimentOutcome) -> (bool, String) {
    let leach = baseline.result(Protocol::LeachHet).unwrap();
    let eecp = outcome.result(Protocol::Eecp).unwrap();
    let first = EffectSize::between(
        &milestone_values(leach, |m| m.first_dead_round),
        &milestone_values(eecp, |m| m.first_dead_round),
    );
    let last = EffectSize::between(
        &milestone_values(leach, |m| m.last_dead_round),
        &milestone_values(eecp, |m| m.last_dead_round),
    );
    let packets = EffectSize::between(&final_packets(leach), &final_packets(eecp));
    let pass = first.treatment_greater && last.treatment_greater && packets.treatment_greater;
    let detail = [
        describe("first-dead", &first),
        describe("last-dead", &last),
        describe("packets", &packets),
    ]
    .join("; ");
    (pass, detail)
}

fn milestone_values(
    r: &wsn_experiment::runner::ProtocolResult,
    f: fn(&LifetimeMilestones) -> Option<u64>,
) -> Vec<f64> {
    r.trials.iter().filter_map(|t| f(&t.summary.milestones)).map(|v| v as f64).collect()
}

fn final_packets(r: &wsn_experiment::runner::ProtocolResult) -> Vec<f64> {
    r.trials.iter().map(|t| t.final_packets() as f64).collect()
}

fn criterion_6(report: &mut Report, outcome: &ExperimentOutcome, shared: Duration) {
    let t = Instant::now();
    let censored: usize = outcome
        .results
        .iter()
        .map(|r| {
            let m = r.aggregate.milestones;
            m.first_dead_round.censored + m.last_dead_round.censored
        })
        .sum();
    let (literal_ok, literal_detail) = directional(outcome, outcome);
    println!(
        "       C6 literal EECP vs LEACH-het: {} ({literal_detail}; {censored} censored milestones)",
        if literal_ok { "all directional checks hold" } else { "directional check FAILED" }
    );

    if !literal_ok {
        let mut spec = acceptance_spec(&outcome.spec.output_dir);
        spec.protocols = vec![Protocol::Eecp];
        spec.network.threshold_variant = ThresholdVariant::ClampedScaling;
        let clamped = execute(&spec).unwrap();
        let (ok, detail) = directional(&clamped, outcome);
        println!(
            "       C6 diagnostic, clamped-scaling EECP vs LEACH-het: {} ({detail})",
            if ok { "all directional checks hold" } else { "directional check FAILED" }
        );
    }

    let mut spec = acceptance_spec(&outcome.spec.output_dir);
    spec.protocols = vec![Protocol::Eecp];
    spec.network.gateway_relay = false;
    let no_relay = execute(&spec).unwrap();
    let (with_relay, c1) = lnd_means(outcome, Protocol::Eecp);
    let (without_relay, c2) = lnd_means(&no_relay, Protocol::Eecp);
    let relay_ok = c1 == 0 && c2 == 0 && with_relay > without_relay;
    report.record(
        "C6 directional reproduction / relay ablation",
        relay_ok,
        shared + t.elapsed(),
        BUDGET_TWO_MINUTES,
        format!(
            "literal variant {}; mean last-dead round with relays {with_relay:.1} vs without {without_relay:.1}",
            if literal_ok { "holds" } else { "fails (reported above)" }
        ),
    );
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let name = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                files.push((name, std::fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

fn criterion_7(report: &mut Report, outcome: &ExperimentOutcome) {
    let t = Instant::now();
    let out = &outcome.spec.output_dir;
    write_outputs(outcome).unwrap();
    let first = read_tree(out);
    std::fs::remove_dir_all(out).unwrap();

    run_experiment(&outcome.spec).unwrap();
    let second = read_tree(out);

    let same = first == second;
    let expected_files = 2 * (ACCEPTANCE_TRIALS as usize + 1) + 1 + 3;
    report.record(
        "C7 determinism",
        same && first.len() == expected_files,
        t.elapsed(),
        BUDGET_TWO_MINUTES,
        format!("{} files compared byte for byte, identical = {same}", first.len()),
    );
}

#[test]
fn acceptance() {
    println!();
    let mut report = Report { failures: Vec::new() };
    criterion_1(&mut report);
    criterion_2(&mut report);

    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let outcome = execute(&acceptance_spec(&dir.path().join("results"))).unwrap();
    let shared = t.elapsed();

    criterion_3(&mut report, &outcome, shared);
    criterion_4(&mut report);
    criterion_5(&mut report);
    criterion_6(&mut report, &outcome, shared);
    criterion_7(&mut report, &outcome);

    assert!(report.failures.is_empty(), "failed criteria: {:?}", report.failures);
}
