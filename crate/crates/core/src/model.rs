//! Nodes, network configuration, and random deployment.

use log::warn;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::radio::RadioParams;

/// Identifier of a node; dense, starting at 0.
pub type NodeId = usize;

/// The per-trial random stream. Deployment consumes it first, then each
/// round's election draws.
pub type TrialRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Euclidean distance in meters.
pub fn distance(a: Point, b: Point) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Normal,
    /// Advanced node carrying extra initial energy; may relay for EECP heads.
    Gateway,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub pos: Point,
    pub kind: NodeKind,
    /// Residual energy in joules. May dip below zero during the round in
    /// which the node dies.
    pub energy: f64,
    pub alive: bool,
    /// Already served as cluster head in the current epoch.
    pub epoch_elected: bool,
    /// Cached distance to the base station.
    pub dist_to_bs: f64,
}

impl Node {
    pub fn is_gateway(&self) -> bool {
        self.kind == NodeKind::Gateway
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Protocol {
    /// LEACH with the same energy heterogeneity as EECP, standard threshold
    /// for every node and direct uplinks.
    #[serde(rename = "leach_het")]
    LeachHet,
    #[serde(rename = "eecp")]
    Eecp,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::LeachHet => "leach_het",
            Protocol::Eecp => "eecp",
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "leach_het" | "leach" => Ok(Protocol::LeachHet),
            "eecp" => Ok(Protocol::Eecp),
            other => Err(format!("unknown protocol `{other}` (expected leach_het or eecp)")),
        }
    }
}

/// How the network-wide average distance to the base station is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DAvgMode {
    /// Mean of the deployed nodes' exact distances.
    Empirical,
    /// Closed-form approximation for a uniform square with a centered sink.
    Analytic,
}

/// Shape of the distance scaling applied to normal nodes in EECP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdVariant {
    /// Scale by `1 - D_i/D_avg` only when `D_i < D_avg`; far nodes keep the
    /// unscaled threshold.
    Literal,
    /// Scale by `max(0, 1 - D_i/D_avg)` for every normal node.
    ClampedScaling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub n_nodes: usize,
    /// Side of the square deployment field in meters.
    pub field_side: f64,
    /// Fraction of nodes deployed as gateways.
    pub gateway_fraction: f64,
    /// Gateways start with `initial_energy * (1 + energy_factor)`.
    pub energy_factor: f64,
    pub initial_energy: f64,
    pub bs_position: Point,
    pub radio: RadioParams,
    pub p_opt: f64,
    pub protocol: Protocol,
    pub d_avg_mode: DAvgMode,
    pub threshold_variant: ThresholdVariant,
    /// EECP only: let normal heads forward through a nearer gateway.
    pub gateway_relay: bool,
    pub max_rounds: u64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            n_nodes: 100,
            field_side: 100.0,
            gateway_fraction: 0.1,
            energy_factor: 1.0,
            initial_energy: 0.5,
            bs_position: Point::new(50.0, 50.0),
            radio: RadioParams::default(),
            p_opt: 0.1,
            protocol: Protocol::Eecp,
            d_avg_mode: DAvgMode::Empirical,
            threshold_variant: ThresholdVariant::Literal,
            gateway_relay: true,
            max_rounds: 50_000,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes == 0 {
            return Err(SimError::out_of_range("n_nodes", 0, ">= 1"));
        }
        if !(self.field_side.is_finite() && self.field_side > 0.0) {
            return Err(SimError::out_of_range("field_side", self.field_side, "> 0"));
        }
        if !(0.0..=1.0).contains(&self.gateway_fraction) {
            return Err(SimError::out_of_range(
                "gateway_fraction",
                self.gateway_fraction,
                "a value in [0, 1]",
            ));
        }
        if !(self.energy_factor.is_finite() && self.energy_factor >= 0.0) {
            return Err(SimError::out_of_range("energy_factor", self.energy_factor, ">= 0"));
        }
        if !(self.initial_energy.is_finite() && self.initial_energy > 0.0) {
            return Err(SimError::out_of_range("initial_energy", self.initial_energy, "> 0"));
        }
        if !(self.bs_position.x.is_finite() && self.bs_position.y.is_finite()) {
            return Err(SimError::out_of_range(
                "bs_position",
                format!("({}, {})", self.bs_position.x, self.bs_position.y),
                "finite coordinates",
            ));
        }
        if !(self.p_opt > 0.0 && self.p_opt <= 1.0) {
            return Err(SimError::out_of_range("p_opt", self.p_opt, "a value in (0, 1]"));
        }
        if self.max_rounds < 1 {
            return Err(SimError::out_of_range("max_rounds", self.max_rounds, ">= 1"));
        }
        self.radio.validate()?;
        if self.p_opt * (self.n_nodes as f64) < 1.0 {
            warn!(
                "p_opt * n_nodes = {} < 1; most rounds will elect no cluster head",
                self.p_opt * self.n_nodes as f64
            );
        }
        Ok(())
    }

    pub fn gateway_count(&self) -> usize {
        (self.gateway_fraction * self.n_nodes as f64).round() as usize
    }

    pub fn gateway_energy(&self) -> f64 {
        self.initial_energy * (1.0 + self.energy_factor)
    }
}

/// Mutable state of one trial.
#[derive(Debug, Clone)]
pub struct NetworkState {
    /// Ordered by id.
    pub nodes: Vec<Node>,
    pub config: NetworkConfig,
    /// Index of the next round to execute.
    pub round: u64,
    pub rng: TrialRng,
}

impl NetworkState {
    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    pub fn total_energy(&self) -> f64 {
        self.nodes.iter().map(|n| n.energy).sum()
    }
}

impl NetworkState {
    /// Build a state from explicit nodes, e.g. a hand-placed topology.
    ///
    /// Ids are reassigned densely in list order and distances to the base
    /// station are recomputed.
    pub fn from_nodes(config: &NetworkConfig, mut nodes: Vec<Node>, seed: u64) -> Result<Self> {
        config.validate()?;
        if nodes.is_empty() {
            return Err(SimError::EmptyNetwork);
        }
        for (id, node) in nodes.iter_mut().enumerate() {
            node.id = id;
            node.dist_to_bs = distance(node.pos, config.bs_position);
        }
        Ok(NetworkState {
            nodes,
            config: config.clone(),
            round: 0,
            rng: TrialRng::seed_from_u64(seed),
        })
    }
}

/// Scatter `n_nodes` uniformly over the field and promote a random subset to
/// gateways. The same `(config, seed)` always produces the same network.
pub fn deploy_network(config: &NetworkConfig, seed: u64) -> Result<NetworkState> {
    config.validate()?;
    let mut rng = TrialRng::seed_from_u64(seed);
    let side = config.field_side;
    let bs = config.bs_position;

    let mut nodes: Vec<Node> = (0..config.n_nodes)
        .map(|id| {
            let x = rng.random::<f64>() * side;
            let y = rng.random::<f64>() * side;
            let pos = Point::new(x, y);
            Node {
                id,
                pos,
                kind: NodeKind::Normal,
                energy: config.initial_energy,
                alive: true,
                epoch_elected: false,
                dist_to_bs: distance(pos, bs),
            }
        })
        .collect();

    let gateways = config.gateway_count();
    let mut chosen = index::sample(&mut rng, config.n_nodes, gateways).into_vec();
    chosen.sort_unstable();
    for id in chosen {
        let node = &mut nodes[id];
        node.kind = NodeKind::Gateway;
        node.energy = config.gateway_energy();
    }

    Ok(NetworkState {
        nodes,
        config: config.clone(),
        round: 0,
        rng,
    })
}

/// Id of the candidate closest to `origin`; ties go to the lowest id.
pub fn nearest<'a, I>(origin: Point, candidates: I) -> Option<NodeId>
where
    I: IntoIterator<Item = &'a Node>,
{
    let mut best: Option<(f64, NodeId)> = None;
    for node in candidates {
        let d = distance(origin, node.pos);
        let better = match best {
            None => true,
            Some((bd, bid)) => d < bd || (d == bd && node.id < bid),
        };
        if better {
            best = Some((d, node.id));
        }
    }
    best.map(|(_, id)| id)
}
