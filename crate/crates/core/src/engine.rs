//! Round execution: election, cluster formation, and the steady-state data
//! phase with per-node energy accounting.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::election::{analytic_avg_distance, elect_cluster_heads, empirical_avg_distance};
use crate::error::{Result, SimError};
use crate::model::{
    deploy_network, distance, nearest, DAvgMode, NetworkConfig, NetworkState, Node, NodeId,
    NodeKind, Protocol, ThresholdVariant,
};
use crate::radio::{aggregation_energy, rx_energy, tx_energy};

/// Where a non-head node sends its packet this round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MemberTarget {
    Head(NodeId),
    /// No head was elected; the node reports straight to the base station.
    DirectToBs,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub heads: BTreeSet<NodeId>,
    /// One entry per alive non-head node.
    pub membership: BTreeMap<NodeId, MemberTarget>,
}

impl ClusterAssignment {
    pub fn members_of(&self, head: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.membership
            .iter()
            .filter(move |(_, t)| **t == MemberTarget::Head(head))
            .map(|(&id, _)| id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UplinkPath {
    Direct,
    ViaGateway(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UplinkRoute {
    pub ch_id: NodeId,
    pub path: UplinkPath,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: u64,
    pub heads: BTreeSet<NodeId>,
    pub assignment: ClusterAssignment,
    pub routes: Vec<UplinkRoute>,
    /// Joules spent by each node this round, indexed by node id.
    pub energy_spent: Vec<f64>,
    pub packets_to_bs: u64,
    /// Nodes that died at the end of this round.
    pub deaths: BTreeSet<NodeId>,
}

/// Protocol behaviour resolved for one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundPolicy {
    pub protocol: Protocol,
    pub variant: ThresholdVariant,
    /// Average node-to-sink distance, fixed at deployment.
    pub d_avg: f64,
    pub gateway_relay: bool,
}

impl RoundPolicy {
    pub fn from_config(config: &NetworkConfig, d_avg: f64) -> Self {
        Self {
            protocol: config.protocol,
            variant: config.threshold_variant,
            d_avg,
            gateway_relay: config.gateway_relay,
        }
    }

    fn relays(&self) -> bool {
        self.protocol == Protocol::Eecp && self.gateway_relay
    }
}

/// Attach every alive non-head node to its nearest head (ties to the lowest
/// id). With no heads, everybody reports directly to the base station.
pub fn form_clusters(state: &NetworkState, heads: &BTreeSet<NodeId>) -> ClusterAssignment {
    let head_nodes: Vec<&Node> = heads.iter().map(|&id| &state.nodes[id]).collect();
    let membership = state
        .nodes
        .iter()
        .filter(|n| n.alive && !heads.contains(&n.id))
        .map(|n| {
            let target = match nearest(n.pos, head_nodes.iter().copied()) {
                Some(h) => MemberTarget::Head(h),
                None => MemberTarget::DirectToBs,
            };
            (n.id, target)
        })
        .collect();
    ClusterAssignment {
        heads: heads.clone(),
        membership,
    }
}

/// Uplink for head `ch`. A normal EECP head forwards through the nearest
/// alive gateway that is not itself a head, provided that gateway is
/// strictly closer than the base station.
pub fn choose_uplink(
    ch: &Node,
    state: &NetworkState,
    heads: &BTreeSet<NodeId>,
    policy: &RoundPolicy,
) -> UplinkRoute {
    let direct = UplinkRoute {
        ch_id: ch.id,
        path: UplinkPath::Direct,
    };
    if !policy.relays() || ch.kind == NodeKind::Gateway {
        return direct;
    }
    let candidates = state
        .nodes
        .iter()
        .filter(|n| n.alive && n.is_gateway() && !heads.contains(&n.id));
    match nearest(ch.pos, candidates) {
        Some(g) if distance(ch.pos, state.nodes[g].pos) < distance(ch.pos, state.config.bs_position) => {
            UplinkRoute {
                ch_id: ch.id,
                path: UplinkPath::ViaGateway(g),
            }
        }
        _ => direct,
    }
}

struct Ledger<'a> {
    nodes: &'a mut [Node],
    spent: Vec<f64>,
}

impl Ledger<'_> {
    fn charge(&mut self, id: NodeId, joules: f64) {
        self.nodes[id].energy -= joules;
        self.spent[id] += joules;
    }
}

/// Run one full round: election followed by [`execute_round`].
pub fn run_round(state: &mut NetworkState, policy: &RoundPolicy) -> Result<RoundReport> {
    if state.alive_count() == 0 {
        return Err(SimError::AllDead);
    }
    let heads = elect_cluster_heads(state, policy.protocol, policy.variant, policy.d_avg)?;
    execute_round(state, policy, heads)
}

/// Cluster formation and the data phase for an already chosen head set.
///
/// Costs are subtracted as they accrue. Nodes at or below zero energy die at
/// the end of the round; their transmissions this round still count.
pub fn execute_round(
    state: &mut NetworkState,
    policy: &RoundPolicy,
    heads: BTreeSet<NodeId>,
) -> Result<RoundReport> {
    if state.alive_count() == 0 {
        return Err(SimError::AllDead);
    }
    if let Some(&bad) = heads
        .iter()
        .find(|&&id| state.nodes.get(id).is_none_or(|n| !n.alive))
    {
        return Err(SimError::InvalidHead(bad));
    }

    let assignment = form_clusters(state, &heads);
    let routes: Vec<UplinkRoute> = heads
        .iter()
        .map(|&h| choose_uplink(&state.nodes[h], state, &heads, policy))
        .collect();

    let radio = state.config.radio;
    let bits = radio.packet_bits;
    let bs = state.config.bs_position;
    let n = state.nodes.len();
    let mut member_counts: BTreeMap<NodeId, usize> = heads.iter().map(|&h| (h, 0)).collect();
    let mut packets_to_bs = 0u64;

    let mut ledger = Ledger {
        nodes: &mut state.nodes,
        spent: vec![0.0; n],
    };

    for (&id, target) in &assignment.membership {
        match *target {
            MemberTarget::Head(h) => {
                let d = distance(ledger.nodes[id].pos, ledger.nodes[h].pos);
                ledger.charge(id, tx_energy(bits, d, &radio));
                ledger.charge(h, rx_energy(bits, &radio));
                *member_counts.get_mut(&h).expect("member of unknown head") += 1;
            }
            MemberTarget::DirectToBs => {}
        }
    }

    for route in &routes {
        let h = route.ch_id;
        ledger.charge(h, aggregation_energy(bits, member_counts[&h] + 1, &radio)?);
        match route.path {
            UplinkPath::Direct => {
                let d = distance(ledger.nodes[h].pos, bs);
                ledger.charge(h, tx_energy(bits, d, &radio));
            }
            UplinkPath::ViaGateway(g) => {
                let d_hg = distance(ledger.nodes[h].pos, ledger.nodes[g].pos);
                ledger.charge(h, tx_energy(bits, d_hg, &radio));
                let d_gb = distance(ledger.nodes[g].pos, bs);
                ledger.charge(g, rx_energy(bits, &radio) + tx_energy(bits, d_gb, &radio));
            }
        }
        packets_to_bs += 1;
    }

    for (&id, target) in &assignment.membership {
        if *target == MemberTarget::DirectToBs {
            let d = distance(ledger.nodes[id].pos, bs);
            ledger.charge(id, tx_energy(bits, d, &radio));
            packets_to_bs += 1;
        }
    }

    let energy_spent = ledger.spent;
    let mut deaths = BTreeSet::new();
    for node in state.nodes.iter_mut().filter(|n| n.alive && n.energy <= 0.0) {
        node.alive = false;
        deaths.insert(node.id);
    }

    let report = RoundReport {
        round: state.round,
        heads,
        assignment,
        routes,
        energy_spent,
        packets_to_bs,
        deaths,
    };
    state.round += 1;
    Ok(report)
}

/// Complete record of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub config: NetworkConfig,
    pub seed: u64,
    pub d_avg: f64,
    /// Network as deployed, before round 0.
    pub initial_nodes: Vec<Node>,
    pub reports: Vec<RoundReport>,
    pub final_nodes: Vec<Node>,
}

impl SimulationTrace {
    pub fn rounds(&self) -> usize {
        self.reports.len()
    }

    pub fn initial_energy(&self) -> f64 {
        self.initial_nodes.iter().map(|n| n.energy).sum()
    }

    pub fn final_energy(&self) -> f64 {
        self.final_nodes.iter().map(|n| n.energy).sum()
    }

    pub fn total_spent(&self) -> f64 {
        self.reports
            .iter()
            .map(|r| r.energy_spent.iter().sum::<f64>())
            .sum()
    }
}

/// Average distance to the sink as selected by `config.d_avg_mode`.
pub fn resolve_d_avg(state: &NetworkState) -> Result<f64> {
    let cfg = &state.config;
    match cfg.d_avg_mode {
        DAvgMode::Empirical => empirical_avg_distance(state),
        DAvgMode::Analytic => {
            analytic_avg_distance(cfg.n_nodes, cfg.field_side, cfg.radio.eps_fs, cfg.radio.eps_mp)
                .map(|a| a.d_avg)
        }
    }
}

/// Deploy and run rounds until every node is dead or `max_rounds` is hit.
pub fn run_simulation(config: &NetworkConfig, seed: u64) -> Result<SimulationTrace> {
    let mut state = deploy_network(config, seed)?;
    let d_avg = resolve_d_avg(&state)?;
    let policy = RoundPolicy::from_config(config, d_avg);
    let initial_nodes = state.nodes.clone();
    let mut reports = Vec::new();
    while state.round < config.max_rounds && state.alive_count() > 0 {
        reports.push(run_round(&mut state, &policy)?);
    }
    Ok(SimulationTrace {
        config: config.clone(),
        seed,
        d_avg,
        initial_nodes,
        reports,
        final_nodes: state.nodes,
    })
}
