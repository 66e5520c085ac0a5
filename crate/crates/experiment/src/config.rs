//! Experiment configuration files.
//!
//! A config is a JSON object. Every key is optional; omitted radio constants
//! fall back to the first-order model defaults and the base station defaults
//! to the field center. Unknown keys are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use wsn_core::{DAvgMode, NetworkConfig, Point, Protocol, RadioParams, ThresholdVariant};

use crate::error::{ExperimentError, Result};

/// A fully resolved batch experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Shared by every run; `protocol` is overridden per run.
    pub network: NetworkConfig,
    pub protocols: Vec<Protocol>,
    pub trials: u64,
    /// Trial `i` of every protocol uses seed `base_seed + i`.
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub emit_charts: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            network: NetworkConfig::default(),
            protocols: vec![Protocol::LeachHet, Protocol::Eecp],
            trials: 30,
            base_seed: 1,
            output_dir: PathBuf::from("results"),
            emit_charts: true,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        if self.trials < 1 {
            return Err(ExperimentError::OutOfRange {
                field: "trials",
                value: self.trials.to_string(),
                bound: ">= 1",
            });
        }
        if self.protocols.is_empty() {
            return Err(ExperimentError::OutOfRange {
                field: "protocols",
                value: "[]".into(),
                bound: "at least one protocol",
            });
        }
        if self.base_seed.checked_add(self.trials - 1).is_none() {
            return Err(ExperimentError::OutOfRange {
                field: "base_seed",
                value: self.base_seed.to_string(),
                bound: "base_seed + trials - 1 <= u64::MAX",
            });
        }
        Ok(())
    }

    pub fn seed_for(&self, trial: u64) -> u64 {
        self.base_seed + trial
    }

    /// Network configuration for one protocol.
    pub fn config_for(&self, protocol: Protocol) -> NetworkConfig {
        NetworkConfig {
            protocol,
            ..self.network.clone()
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadioFile {
    e_elec: Option<f64>,
    eps_fs: Option<f64>,
    eps_mp: Option<f64>,
    e_da: Option<f64>,
    packet_bits: Option<u64>,
    d0_override: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    n_nodes: Option<usize>,
    field_side: Option<f64>,
    gateway_fraction: Option<f64>,
    energy_factor: Option<f64>,
    initial_energy: Option<f64>,
    bs_position: Option<Point>,
    #[serde(default)]
    radio: RadioFile,
    p_opt: Option<f64>,
    d_avg_mode: Option<DAvgMode>,
    threshold_variant: Option<ThresholdVariant>,
    gateway_relay: Option<bool>,
    max_rounds: Option<u64>,
    protocols: Option<Vec<Protocol>>,
    trials: Option<u64>,
    base_seed: Option<u64>,
    output_dir: Option<PathBuf>,
    emit_charts: Option<bool>,
}

/// Parse and validate a JSON config. Blank input yields the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let file: ConfigFile = if text.trim().is_empty() {
        ConfigFile::default()
    } else {
        serde_json::from_str(text)?
    };

    let defaults = ExperimentSpec::default();
    let net = defaults.network.clone();
    let radio_defaults = RadioParams::default();
    let field_side = file.field_side.unwrap_or(net.field_side);

    let network = NetworkConfig {
        n_nodes: file.n_nodes.unwrap_or(net.n_nodes),
        field_side,
        gateway_fraction: file.gateway_fraction.unwrap_or(net.gateway_fraction),
        energy_factor: file.energy_factor.unwrap_or(net.energy_factor),
        initial_energy: file.initial_energy.unwrap_or(net.initial_energy),
        bs_position: file
            .bs_position
            .unwrap_or(Point::new(field_side / 2.0, field_side / 2.0)),
        radio: RadioParams {
            e_elec: file.radio.e_elec.unwrap_or(radio_defaults.e_elec),
            eps_fs: file.radio.eps_fs.unwrap_or(radio_defaults.eps_fs),
            eps_mp: file.radio.eps_mp.unwrap_or(radio_defaults.eps_mp),
            e_da: file.radio.e_da.unwrap_or(radio_defaults.e_da),
            packet_bits: file.radio.packet_bits.unwrap_or(radio_defaults.packet_bits),
            d0_override: file.radio.d0_override.or(radio_defaults.d0_override),
        },
        p_opt: file.p_opt.unwrap_or(net.p_opt),
        protocol: net.protocol,
        d_avg_mode: file.d_avg_mode.unwrap_or(net.d_avg_mode),
        threshold_variant: file.threshold_variant.unwrap_or(net.threshold_variant),
        gateway_relay: file.gateway_relay.unwrap_or(net.gateway_relay),
        max_rounds: file.max_rounds.unwrap_or(net.max_rounds),
    };

    let spec = ExperimentSpec {
        network,
        protocols: file.protocols.unwrap_or(defaults.protocols),
        trials: file.trials.unwrap_or(defaults.trials),
        base_seed: file.base_seed.unwrap_or(defaults.base_seed),
        output_dir: file.output_dir.unwrap_or(defaults.output_dir),
        emit_charts: file.emit_charts.unwrap_or(defaults.emit_charts),
    };
    spec.validate()?;
    Ok(spec)
}
