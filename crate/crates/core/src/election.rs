//! Cluster-head election.
//!
//! Every alive node draws one uniform number per round and becomes a head
//! when the draw falls below its threshold. The standard rotating threshold
//! grows over an epoch of `⌈1/P⌉` rounds so that each node serves once per
//! epoch; EECP additionally scales it by the node's distance to the sink.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Result, SimError};
use crate::model::{NetworkState, NodeId, NodeKind, Protocol, ThresholdVariant};

/// Number of rounds in one election epoch, `⌈1/p⌉`.
///
/// Reciprocals that land within rounding noise of an integer are snapped to
/// it, so `p = 0.1` gives 10 and not 11.
pub fn epoch_length(p: f64) -> u64 {
    let inv = 1.0 / p;
    let nearest = inv.round();
    if (inv - nearest).abs() <= 1e-9 * inv {
        nearest.max(1.0) as u64
    } else {
        inv.ceil() as u64
    }
}

/// Rotating threshold `p / (1 - p·(r mod ⌈1/p⌉))`, or zero for nodes that
/// already served this epoch.
pub fn standard_threshold(p: f64, round: u64, eligible: bool) -> f64 {
    if !eligible {
        return 0.0;
    }
    let phase = (round % epoch_length(p)) as f64;
    let denom = 1.0 - p * phase;
    if denom <= 0.0 {
        return 1.0;
    }
    (p / denom).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdInputs {
    pub p: f64,
    pub round: u64,
    pub eligible: bool,
    /// Node's distance to the base station.
    pub d_i: f64,
    /// Network average distance to the base station.
    pub d_avg: f64,
    pub kind: NodeKind,
}

/// EECP threshold. Gateways always use the standard threshold; normal nodes
/// have it scaled by `1 - d_i/d_avg` according to `variant`.
pub fn eecp_threshold(inputs: &ThresholdInputs, variant: ThresholdVariant) -> Result<f64> {
    require_positive("d_avg", inputs.d_avg)?;
    let base = standard_threshold(inputs.p, inputs.round, inputs.eligible);
    if inputs.kind == NodeKind::Gateway {
        return Ok(base);
    }
    let ratio = inputs.d_i / inputs.d_avg;
    let factor = match variant {
        ThresholdVariant::Literal if ratio < 1.0 => 1.0 - ratio,
        ThresholdVariant::Literal => 1.0,
        ThresholdVariant::ClampedScaling => (1.0 - ratio).max(0.0),
    };
    Ok((base * factor).clamp(0.0, 1.0))
}

/// Mean distance to the base station over every deployed node, dead or alive.
pub fn empirical_avg_distance(state: &NetworkState) -> Result<f64> {
    if state.nodes.is_empty() {
        return Err(SimError::EmptyNetwork);
    }
    let sum: f64 = state.nodes.iter().map(|n| n.dist_to_bs).sum();
    Ok(sum / state.nodes.len() as f64)
}

/// Expected optimal number of clusters,
/// `√N/√(2π) · √(ε_fs/ε_mp) · M / d_bs²`.
pub fn optimal_cluster_count(
    n_nodes: usize,
    field_side: f64,
    d_bs: f64,
    eps_fs: f64,
    eps_mp: f64,
) -> Result<f64> {
    if n_nodes == 0 {
        return Err(SimError::out_of_range("n_nodes", 0, ">= 1"));
    }
    require_positive("field_side", field_side)?;
    require_positive("d_bs", d_bs)?;
    require_positive("eps_fs", eps_fs)?;
    require_positive("eps_mp", eps_mp)?;
    let n = n_nodes as f64;
    Ok(n.sqrt() / (2.0 * PI).sqrt() * (eps_fs / eps_mp).sqrt() * field_side / (d_bs * d_bs))
}

/// Closed-form distances for a uniform square field with the sink at its
/// center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticDistances {
    pub k_opt: f64,
    /// Mean member-to-head distance.
    pub d_to_ch: f64,
    /// Mean head-to-sink distance.
    pub d_to_bs: f64,
    pub d_avg: f64,
}

/// Mean distance from a uniform point of a unit square to its center,
/// rounded as in the clustering literature.
const CENTER_DISTANCE_COEFF: f64 = 0.765;

pub fn analytic_avg_distance(
    n_nodes: usize,
    field_side: f64,
    eps_fs: f64,
    eps_mp: f64,
) -> Result<AnalyticDistances> {
    let d_to_bs = CENTER_DISTANCE_COEFF * field_side / 2.0;
    let k_opt = optimal_cluster_count(n_nodes, field_side, d_to_bs, eps_fs, eps_mp)?;
    let d_to_ch = field_side / (2.0 * k_opt * PI).sqrt();
    Ok(AnalyticDistances {
        k_opt,
        d_to_ch,
        d_to_bs,
        d_avg: d_to_ch + d_to_bs,
    })
}

/// Election probability of `node` under `protocol` for the current round.
pub fn node_threshold(
    state: &NetworkState,
    id: NodeId,
    protocol: Protocol,
    variant: ThresholdVariant,
    d_avg: f64,
) -> Result<f64> {
    let node = &state.nodes[id];
    let p = state.config.p_opt;
    let eligible = node.alive && !node.epoch_elected;
    match protocol {
        Protocol::LeachHet => Ok(standard_threshold(p, state.round, eligible)),
        Protocol::Eecp => eecp_threshold(
            &ThresholdInputs {
                p,
                round: state.round,
                eligible,
                d_i: node.dist_to_bs,
                d_avg,
                kind: node.kind,
            },
            variant,
        ),
    }
}

/// Run the election for `state.round`.
///
/// At the first round of an epoch every alive node becomes eligible again.
/// Alive nodes then draw from the trial stream in ascending id order; a node
/// is elected when its draw is below its threshold.
pub fn elect_cluster_heads(
    state: &mut NetworkState,
    protocol: Protocol,
    variant: ThresholdVariant,
    d_avg: f64,
) -> Result<BTreeSet<NodeId>> {
    if state.round.is_multiple_of(epoch_length(state.config.p_opt)) {
        for node in state.nodes.iter_mut().filter(|n| n.alive) {
            node.epoch_elected = false;
        }
    }

    let mut heads = BTreeSet::new();
    for id in 0..state.nodes.len() {
        if !state.nodes[id].alive {
            continue;
        }
        let threshold = node_threshold(state, id, protocol, variant, d_avg)?;
        let u: f64 = state.rng.random();
        if u < threshold {
            state.nodes[id].epoch_elected = true;
            heads.insert(id);
        }
    }
    Ok(heads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{deploy_network, NetworkConfig, Point};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn inputs(kind: NodeKind, d_i: f64, d_avg: f64) -> ThresholdInputs {
        ThresholdInputs {
            p: 0.1,
            round: 0,
            eligible: true,
            d_i,
            d_avg,
            kind,
        }
    }

    #[test]
    fn epoch_lengths() {
        assert_eq!(epoch_length(0.1), 10);
        assert_eq!(epoch_length(0.05), 20);
        assert_eq!(epoch_length(0.3), 4);
        assert_eq!(epoch_length(1.0), 1);
    }

    #[test]
    fn standard_threshold_values() {
        assert_eq!(standard_threshold(0.1, 0, true), 0.1);
        assert_relative_eq!(standard_threshold(0.1, 5, true), 0.2, max_relative = 1e-12);
        assert_eq!(standard_threshold(0.1, 9, true), 1.0);
        assert_eq!(standard_threshold(0.1, 10, true), 0.1);
        assert_eq!(standard_threshold(0.1, 5, false), 0.0);
        assert_eq!(standard_threshold(0.7, 3, false), 0.0);
    }

    #[test]
    fn eecp_threshold_values() {
        let lit = ThresholdVariant::Literal;
        let clamp = ThresholdVariant::ClampedScaling;
        assert_eq!(eecp_threshold(&inputs(NodeKind::Normal, 0.0, 40.0), lit).unwrap(), 0.1);
        assert_relative_eq!(
            eecp_threshold(&inputs(NodeKind::Normal, 20.0, 40.0), lit).unwrap(),
            0.05,
            max_relative = 1e-12
        );
        assert_eq!(eecp_threshold(&inputs(NodeKind::Gateway, 120.0, 40.0), lit).unwrap(), 0.1);
        assert_eq!(eecp_threshold(&inputs(NodeKind::Normal, 80.0, 40.0), lit).unwrap(), 0.1);
        assert_eq!(eecp_threshold(&inputs(NodeKind::Normal, 80.0, 40.0), clamp).unwrap(), 0.0);
        assert_eq!(eecp_threshold(&inputs(NodeKind::Gateway, 80.0, 40.0), clamp).unwrap(), 0.1);
        let mut ineligible = inputs(NodeKind::Gateway, 1.0, 40.0);
        ineligible.eligible = false;
        assert_eq!(eecp_threshold(&ineligible, lit).unwrap(), 0.0);
        assert!(eecp_threshold(&inputs(NodeKind::Normal, 1.0, 0.0), lit).is_err());
    }

    #[test]
    fn empirical_mean() {
        let cfg = NetworkConfig {
            n_nodes: 3,
            gateway_fraction: 0.0,
            ..NetworkConfig::default()
        };
        let mut state = deploy_network(&cfg, 0).unwrap();
        for (node, d) in state.nodes.iter_mut().zip([10.0, 20.0, 30.0]) {
            node.dist_to_bs = d;
        }
        assert_eq!(empirical_avg_distance(&state).unwrap(), 20.0);
        state.nodes[1].alive = false;
        assert_eq!(empirical_avg_distance(&state).unwrap(), 20.0);
        state.nodes.truncate(1);
        assert_eq!(empirical_avg_distance(&state).unwrap(), 10.0);
        state.nodes.clear();
        assert_eq!(empirical_avg_distance(&state), Err(SimError::EmptyNetwork));
    }

    #[test]
    fn empirical_mean_matches_square_center_constant() {
        let cfg = NetworkConfig {
            n_nodes: 10_000,
            bs_position: Point::new(50.0, 50.0),
            ..NetworkConfig::default()
        };
        let state = deploy_network(&cfg, 2024).unwrap();
        let d = empirical_avg_distance(&state).unwrap();
        assert!((d / 38.26 - 1.0).abs() <= 0.01, "{d}");
    }

    #[test]
    fn cluster_count() {
        let k = optimal_cluster_count(100, 100.0, 38.25, 10e-12, 0.0013e-12).unwrap();
        assert!((k - 23.92).abs() < 0.005, "{k}");
        let k4 = optimal_cluster_count(400, 100.0, 38.25, 10e-12, 0.0013e-12).unwrap();
        assert_relative_eq!(k4, 2.0 * k, max_relative = 1e-12);
        let unit = optimal_cluster_count(50, 80.0, 30.0, 2.0, 2.0).unwrap();
        assert_relative_eq!(unit, 50f64.sqrt() / (2.0 * PI).sqrt() * 80.0 / 900.0, max_relative = 1e-12);
        assert!(optimal_cluster_count(100, 100.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn analytic_chain() {
        let a = analytic_avg_distance(100, 100.0, 10e-12, 0.0013e-12).unwrap();
        assert_relative_eq!(a.d_to_bs, 38.25, max_relative = 1e-12);
        assert!((a.k_opt - 23.915).abs() < 1e-3, "{}", a.k_opt);
        assert!((a.d_to_ch - 8.1578).abs() < 1e-3, "{}", a.d_to_ch);
        assert!((a.d_avg - 46.408).abs() < 1e-3, "{}", a.d_avg);
        assert_eq!(a.d_avg, a.d_to_ch + a.d_to_bs);
        let b = analytic_avg_distance(100, 200.0, 10e-12, 0.0013e-12).unwrap();
        assert_relative_eq!(b.d_to_bs, 76.5, max_relative = 1e-12);
        assert!(b.d_avg > b.d_to_bs);
    }

    #[test]
    fn epoch_end_elects_every_eligible_node() {
        let cfg = NetworkConfig {
            protocol: Protocol::LeachHet,
            ..NetworkConfig::default()
        };
        let mut state = deploy_network(&cfg, 5).unwrap();
        state.round = 9;
        state.nodes[3].epoch_elected = true;
        let heads =
            elect_cluster_heads(&mut state, Protocol::LeachHet, ThresholdVariant::Literal, 40.0).unwrap();
        assert_eq!(heads.len(), 99);
        assert!(!heads.contains(&3));
        assert!(state.nodes.iter().all(|n| n.epoch_elected));
    }

    #[test]
    fn dead_nodes_never_elected() {
        let cfg = NetworkConfig::default();
        let mut state = deploy_network(&cfg, 5).unwrap();
        state.round = 9;
        for n in state.nodes.iter_mut().take(50) {
            n.alive = false;
        }
        let heads =
            elect_cluster_heads(&mut state, Protocol::LeachHet, ThresholdVariant::Literal, 40.0).unwrap();
        assert!(heads.iter().all(|&id| id >= 50));
    }

    #[test]
    fn election_is_deterministic() {
        let cfg = NetworkConfig::default();
        let base = deploy_network(&cfg, 77).unwrap();
        let mut a = base.clone();
        let mut b = base;
        let d_avg = empirical_avg_distance(&a).unwrap();
        let ha = elect_cluster_heads(&mut a, Protocol::Eecp, ThresholdVariant::Literal, d_avg).unwrap();
        let hb = elect_cluster_heads(&mut b, Protocol::Eecp, ThresholdVariant::Literal, d_avg).unwrap();
        assert_eq!(ha, hb);
    }

    #[test]
    fn epoch_renewal_resets_eligibility() {
        let cfg = NetworkConfig::default();
        let mut state = deploy_network(&cfg, 1).unwrap();
        for n in state.nodes.iter_mut() {
            n.epoch_elected = true;
        }
        state.round = 10;
        let heads =
            elect_cluster_heads(&mut state, Protocol::LeachHet, ThresholdVariant::Literal, 40.0).unwrap();
        assert!(!heads.is_empty());
        assert_eq!(
            state.nodes.iter().filter(|n| n.epoch_elected).count(),
            heads.len()
        );
    }

    proptest! {
        #[test]
        fn thresholds_are_probabilities(p in 0.001f64..=1.0, r in 0u64..10_000, eligible: bool) {
            let t = standard_threshold(p, r, eligible);
            prop_assert!((0.0..=1.0).contains(&t));
        }

        #[test]
        fn near_nodes_are_scaled_down(
            p in 0.01f64..=1.0,
            r in 0u64..1000,
            d_avg in 1.0f64..200.0,
            fa in 0.0f64..1.0,
            fb in 0.0f64..1.0,
        ) {
            let (lo, hi) = if fa <= fb { (fa, fb) } else { (fb, fa) };
            let mk = |d_i| ThresholdInputs { p, round: r, eligible: true, d_i, d_avg, kind: NodeKind::Normal };
            let ta = eecp_threshold(&mk(lo * d_avg), ThresholdVariant::Literal).unwrap();
            let tb = eecp_threshold(&mk(hi * d_avg), ThresholdVariant::Literal).unwrap();
            let std = standard_threshold(p, r, true);
            prop_assert!(ta >= tb);
            prop_assert!(ta <= std && tb <= std);
            if hi - lo > 1e-9 {
                prop_assert!(ta > tb);
            }
        }

        #[test]
        fn empirical_mean_permutation_invariant(seed in 0u64..1000, shift in 1usize..50) {
            let cfg = NetworkConfig { n_nodes: 50, ..NetworkConfig::default() };
            let mut state = deploy_network(&cfg, seed).unwrap();
            let a = empirical_avg_distance(&state).unwrap();
            state.nodes.rotate_left(shift);
            let b = empirical_avg_distance(&state).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }
    }
}
