//! Round-based simulator for clustered heterogeneous wireless sensor
//! networks.
//!
//! Two protocols are provided: EECP, which scales cluster-head election by
//! distance to the sink and lets normal heads forward through nearby
//! high-energy gateway nodes, and a LEACH baseline that shares the same
//! energy heterogeneity. Every trial is driven by one seeded random stream,
//! so equal `(config, seed)` pairs give identical traces.

pub mod election;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod model;
pub mod radio;

pub use election::{
    analytic_avg_distance, eecp_threshold, elect_cluster_heads, empirical_avg_distance,
    epoch_length, optimal_cluster_count, standard_threshold, AnalyticDistances, ThresholdInputs,
};
pub use engine::{
    choose_uplink, execute_round, form_clusters, resolve_d_avg, run_round, run_simulation,
    ClusterAssignment, MemberTarget, RoundPolicy, RoundReport, SimulationTrace, UplinkPath,
    UplinkRoute,
};
pub use error::{Result, SimError};
pub use metrics::{
    aggregate_trials, lifetime_milestones, per_round_series, AggregatedSeries, LifetimeMilestones,
    MilestoneStats, RoundSeries, Stat, TrialSummary,
};
pub use model::{
    deploy_network, distance, nearest, DAvgMode, NetworkConfig, NetworkState, Node, NodeId,
    NodeKind, Point, Protocol, ThresholdVariant, TrialRng,
};
pub use radio::{aggregation_energy, crossover_distance, rx_energy, tx_energy, RadioParams};
