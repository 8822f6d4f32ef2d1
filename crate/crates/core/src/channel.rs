//! Large-scale channel: distance pathloss plus log-normal shadowing.
//!
//! Gains are frequency-flat, so one value per (transmitter, receiver) link
//! serves every subband. There is no small-scale fading.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::roster::{Roster, TxRole};
use crate::topology::NetworkLayout;
use crate::{Error, Result};

/// Macro-BS pathloss in dB for a distance in kilometres.
pub fn pathloss_macro_db(d_km: f64) -> Result<f64> {
    if !(d_km > 0.0) {
        return Err(Error::NonPositiveDistance(d_km));
    }
    Ok(128.1 + 37.6 * libm::log10(d_km))
}

/// Pico-BS and D2D pathloss in dB for a distance in kilometres.
pub fn pathloss_pico_d2d_db(d_km: f64) -> Result<f64> {
    if !(d_km > 0.0) {
        return Err(Error::NonPositiveDistance(d_km));
    }
    Ok(140.7 + 36.7 * libm::log10(d_km))
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

/// One zero-mean shadowing sample in dB.
pub fn sample_shadowing_db<R: Rng + ?Sized>(rng: &mut R, std_db: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    std_db * z
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ChannelConfig {
    pub macro_shadowing_std: f64,
    pub pico_shadowing_std: f64,
    pub d2d_shadowing_std: f64,
    pub rng_seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            macro_shadowing_std: 10.0,
            pico_shadowing_std: 10.0,
            d2d_shadowing_std: 12.0,
            rng_seed: 2,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        let stds = [
            self.macro_shadowing_std,
            self.pico_shadowing_std,
            self.d2d_shadowing_std,
        ];
        if stds.iter().all(|s| *s >= 0.0 && s.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidConfig(alloc::format!(
                "shadowing standard deviations must be non-negative, got {stds:?}"
            )))
        }
    }

    fn std_for(&self, role: TxRole) -> f64 {
        match role {
            TxRole::Mbs => self.macro_shadowing_std,
            TxRole::Pbs => self.pico_shadowing_std,
            TxRole::D2dTx => self.d2d_shadowing_std,
        }
    }
}

/// Linear power gains, transmitters by receivers.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGains {
    roster: Roster,
    pair_map: Vec<usize>,
    values: Vec<f64>,
}

impl ChannelGains {
    /// Builds a gain table from raw values laid out row-major (transmitter, receiver).
    pub fn from_values(roster: Roster, pair_map: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if values.len() != roster.n_tx() * roster.n_rx() || pair_map.len() != roster.pairs {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} gains and {} pair entries for roster {roster:?}",
                values.len(),
                pair_map.len()
            )));
        }
        crate::topology::validate_pair_map(&pair_map)?;
        if let Some(bad) = values.iter().position(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidConfig(alloc::format!(
                "gain entry {bad} is {}, expected a positive finite value",
                values[bad]
            )));
        }
        Ok(ChannelGains {
            roster,
            pair_map,
            values,
        })
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn pair_map(&self) -> &[usize] {
        &self.pair_map
    }

    pub fn gain(&self, tx: usize, rx: usize) -> f64 {
        self.values[tx * self.roster.n_rx() + rx]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Draws the gain of every link: `10^(-(PL(d) + X) / 10)` with one independent
/// shadowing draw `X ~ N(0, σ²)` (dB) per link, `σ` chosen by transmitter role.
///
/// The link from a D2D TX to itself (as a receiver of base stations) is never
/// read and is stored as `f64::MIN_POSITIVE`.
pub fn compute_gains(layout: &NetworkLayout, config: &ChannelConfig) -> Result<ChannelGains> {
    config.validate()?;
    layout.validate()?;
    let roster = layout.roster();
    let (n_tx, n_rx) = (roster.n_tx(), roster.n_rx());
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut values = Vec::with_capacity(n_tx * n_rx);
    for n in 0..n_tx {
        let node = roster.transmitter(n);
        let std_db = config.std_for(node.role);
        let from = layout.tx_position(n);
        for k in 0..n_rx {
            if node.role == TxRole::D2dTx && k == roster.d2d_tx_as_rx(node.ordinal) {
                values.push(f64::MIN_POSITIVE);
                continue;
            }
            let d_km = from.distance(&layout.rx_position(k)) / 1000.0;
            if d_km == 0.0 {
                return Err(Error::CoincidentNodes { tx: n, rx: k });
            }
            let pl = match node.role {
                TxRole::Mbs => pathloss_macro_db(d_km)?,
                TxRole::Pbs | TxRole::D2dTx => pathloss_pico_d2d_db(d_km)?,
            };
            let shadow = sample_shadowing_db(&mut rng, std_db);
            values.push(db_to_linear(-(pl + shadow)));
        }
    }
    ChannelGains::from_values(roster, layout.pair_map.clone(), values)
}
