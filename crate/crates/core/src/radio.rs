//! First-order radio dissipation model.
//!
//! Transmit cost is electronics plus an amplifier term that follows a d² law
//! below the crossover distance and a d⁴ law at or above it. Receiving costs
//! electronics only; cluster heads additionally pay a per-bit, per-signal
//! fusion cost.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Result, SimError};

/// Radio hardware constants. All energies are in joules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Electronics energy per bit (J/bit), paid on both transmit and receive.
    pub e_elec: f64,
    /// Free-space amplifier energy (J/bit/m²).
    pub eps_fs: f64,
    /// Multipath amplifier energy (J/bit/m⁴).
    pub eps_mp: f64,
    /// Data aggregation energy (J/bit/signal).
    pub e_da: f64,
    /// Data packet length in bits.
    pub packet_bits: u64,
    /// Fixed crossover distance; when absent it is derived from the amplifier
    /// constants.
    pub d0_override: Option<f64>,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            e_elec: 5e-9,
            eps_fs: 10e-12,
            eps_mp: 0.0013e-12,
            e_da: 5e-9,
            packet_bits: 4000,
            d0_override: None,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("e_elec", self.e_elec)?;
        require_positive("eps_fs", self.eps_fs)?;
        require_positive("eps_mp", self.eps_mp)?;
        require_positive("e_da", self.e_da)?;
        if self.packet_bits < 1 {
            return Err(SimError::out_of_range("packet_bits", self.packet_bits, ">= 1"));
        }
        if let Some(d0) = self.d0_override {
            require_positive("d0_override", d0)?;
        }
        Ok(())
    }

    /// The crossover distance actually used by [`tx_energy`].
    pub fn d0(&self) -> f64 {
        match self.d0_override {
            Some(d0) => d0,
            None => (self.eps_fs / self.eps_mp).sqrt(),
        }
    }
}

/// Distance at which the free-space and multipath amplifier terms are equal.
pub fn crossover_distance(eps_fs: f64, eps_mp: f64) -> Result<f64> {
    require_positive("eps_fs", eps_fs)?;
    require_positive("eps_mp", eps_mp)?;
    Ok((eps_fs / eps_mp).sqrt())
}

/// Energy to transmit `bits` over `d` meters.
pub fn tx_energy(bits: u64, d: f64, params: &RadioParams) -> f64 {
    let l = bits as f64;
    let amp = if d < params.d0() {
        params.eps_fs * d * d
    } else {
        params.eps_mp * d * d * d * d
    };
    l * params.e_elec + l * amp
}

/// Energy to receive `bits`.
pub fn rx_energy(bits: u64, params: &RadioParams) -> f64 {
    bits as f64 * params.e_elec
}

/// Energy for a cluster head to fuse `signal_count` signals of `bits` each.
///
/// `signal_count` includes the head's own reading, so it is never zero.
pub fn aggregation_energy(bits: u64, signal_count: usize, params: &RadioParams) -> Result<f64> {
    if signal_count == 0 {
        return Err(SimError::out_of_range("signal_count", 0, ">= 1"));
    }
    Ok(params.e_da * bits as f64 * signal_count as f64)
}
