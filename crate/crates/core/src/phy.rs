//! Resource partitioning, equal power allocation and the SINR / rate tables.
//!
//! The band of width `W` is cut into three subbands: subband 1 (`(1-η)·W1`,
//! shared by MBSs and PBSs), subband 2 (`η·W1`, PBSs only) and subband 3
//! (`W2`, one PRB, D2D only), where `W1 = W - W2`. Every quantity in the
//! tables is linear; dB and dBm inputs are converted once, here.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::channel::{db_to_linear, ChannelGains};
use crate::roster::{Link, Roster, RxRole, TxRole};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Subband {
    One,
    Two,
    Three,
}

impl Subband {
    pub const ALL: [Subband; 3] = [Subband::One, Subband::Two, Subband::Three];

    pub fn index(self) -> usize {
        self as usize
    }

    /// 1-based label.
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Subband> {
        match n {
            1 => Some(Subband::One),
            2 => Some(Subband::Two),
            3 => Some(Subband::Three),
            _ => None,
        }
    }
}

impl fmt::Display for Subband {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PartitionConfig {
    /// System bandwidth `W` in Hz.
    pub system_bandwidth: f64,
    /// PRB bandwidth `W2` in Hz; subband 3 is exactly one PRB.
    pub prb_bandwidth: f64,
    /// Fraction of `W1` handed to subband 2.
    pub eta: f64,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            system_bandwidth: 10e6,
            prb_bandwidth: 180e3,
            eta: 0.5,
        }
    }
}

impl PartitionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.prb_bandwidth > 0.0 && self.prb_bandwidth.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "prb_bandwidth must be positive, got {}",
                self.prb_bandwidth
            )));
        }
        if !(self.system_bandwidth > self.prb_bandwidth && self.system_bandwidth.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "system_bandwidth {} must exceed prb_bandwidth {}",
                self.system_bandwidth, self.prb_bandwidth
            )));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidConfig(format!("eta must lie in [0, 1], got {}", self.eta)));
        }
        Ok(())
    }

    pub fn w1(&self) -> f64 {
        self.system_bandwidth - self.prb_bandwidth
    }

    pub fn w2(&self) -> f64 {
        self.prb_bandwidth
    }

    /// Bandwidth in Hz of `subband`.
    pub fn bandwidth(&self, subband: Subband) -> f64 {
        match subband {
            Subband::One => (1.0 - self.eta) * self.w1(),
            Subband::Two => self.eta * self.w1(),
            Subband::Three => self.w2(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct RadioConfig {
    pub mbs_power_dbm: f64,
    pub pbs_power_dbm: f64,
    pub d2d_tx_power_dbm: f64,
    /// Noise power spectral density in dBm/Hz.
    pub noise_psd_dbm_hz: f64,
    /// Constant added to every achievable rate so that its logarithm exists.
    pub rate_floor: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            mbs_power_dbm: 46.0,
            pbs_power_dbm: 30.0,
            d2d_tx_power_dbm: 20.0,
            noise_psd_dbm_hz: -174.0,
            rate_floor: 1e-20,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate_floor > 0.0 && self.rate_floor.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "rate_floor must be positive, got {}",
                self.rate_floor
            )));
        }
        let all = [
            self.mbs_power_dbm,
            self.pbs_power_dbm,
            self.d2d_tx_power_dbm,
            self.noise_psd_dbm_hz,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!("non-finite radio parameter in {all:?}")));
        }
        Ok(())
    }

    /// Noise PSD in mW/Hz.
    pub fn noise_psd_mw(&self) -> f64 {
        db_to_linear(self.noise_psd_dbm_hz)
    }

    pub fn total_power_mw(&self, role: TxRole) -> f64 {
        db_to_linear(match role {
            TxRole::Mbs => self.mbs_power_dbm,
            TxRole::Pbs => self.pbs_power_dbm,
            TxRole::D2dTx => self.d2d_tx_power_dbm,
        })
    }
}

/// Transmit power in mW per (transmitter, subband).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    roster: Roster,
    values: Vec<[f64; 3]>,
}

impl PowerAllocation {
    pub fn from_values(roster: Roster, values: Vec<[f64; 3]>) -> Result<Self> {
        if values.len() != roster.n_tx() {
            return Err(Error::DimensionMismatch(format!(
                "{} power rows for {} transmitters",
                values.len(),
                roster.n_tx()
            )));
        }
        if values.iter().flatten().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidConfig("transmit powers must be finite and >= 0".into()));
        }
        Ok(PowerAllocation { roster, values })
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn power(&self, tx: usize, subband: Subband) -> f64 {
        self.values[tx][subband.index()]
    }

    pub fn rows(&self) -> &[[f64; 3]] {
        &self.values
    }

    pub fn total(&self, tx: usize) -> f64 {
        self.values[tx].iter().sum()
    }
}

/// Each transmitter splits its power equally over the subbands it employs:
/// MBSs use subband 1, PBSs subbands 1 and 2, D2D TXs subband 3.
pub fn allocate_power(roster: &Roster, radio: &RadioConfig) -> PowerAllocation {
    let values = (0..roster.n_tx())
        .map(|n| {
            let role = roster.tx_role(n);
            let p = radio.total_power_mw(role);
            match role {
                TxRole::Mbs => [p, 0.0, 0.0],
                TxRole::Pbs => [p / 2.0, p / 2.0, 0.0],
                TxRole::D2dTx => [0.0, 0.0, p],
            }
        })
        .collect();
    PowerAllocation {
        roster: *roster,
        values,
    }
}

/// SINR, achievable rate, log-rate and availability over (transmitter, subband, receiver).
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    roster: Roster,
    pair_map: Vec<usize>,
    /// D2D TX ordinal -> paired D2D RX ordinal.
    served_rx: Vec<usize>,
    rate_floor: f64,
    available: Vec<bool>,
    sinr: Vec<f64>,
    rate: Vec<f64>,
    log_rate: Vec<f64>,
}

impl RateTable {
    fn empty(roster: Roster, pair_map: Vec<usize>, rate_floor: f64) -> Self {
        let len = roster.n_rx() * roster.n_tx() * 3;
        let served_rx = crate::topology::invert_pair_map(&pair_map);
        let mut table = RateTable {
            roster,
            pair_map,
            served_rx,
            rate_floor,
            available: vec![false; len],
            sinr: vec![0.0; len],
            rate: vec![rate_floor; len],
            log_rate: vec![libm::log(rate_floor); len],
        };
        for k in 0..roster.n_rx() {
            for link in roster.bs_options() {
                let i = table.idx(link.tx, link.subband, k);
                table.available[i] = true;
            }
            if let Some(link) = table.d2d_link(k) {
                let i = table.idx(link.tx, link.subband, k);
                table.available[i] = true;
            }
        }
        table
    }

    /// Rebuilds a table from stored SINRs and rates, e.g. from an instance file.
    ///
    /// `entries` lists every available triple as `(link, receiver, sinr, rate)`;
    /// the set of triples must match the availability structure of `roster`
    /// and `pair_map` exactly. Log-rates are recomputed.
    pub fn from_entries<I>(roster: Roster, pair_map: Vec<usize>, rate_floor: f64, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Link, usize, f64, f64)>,
    {
        if pair_map.len() != roster.pairs {
            return Err(Error::DimensionMismatch(format!(
                "{} pair entries for {} pairs",
                pair_map.len(),
                roster.pairs
            )));
        }
        crate::topology::validate_pair_map(&pair_map)?;
        if !(rate_floor > 0.0 && rate_floor.is_finite()) {
            return Err(Error::InvalidConfig(format!("rate_floor must be positive, got {rate_floor}")));
        }
        let mut table = RateTable::empty(roster, pair_map, rate_floor);
        let mut seen = vec![false; table.available.len()];
        for (link, k, sinr, rate) in entries {
            if link.tx >= roster.n_tx() || k >= roster.n_rx() || !table.is_available(link, k) {
                return Err(Error::DimensionMismatch(format!(
                    "triple ({}, {}, {k}) is not an available option",
                    link.tx, link.subband
                )));
            }
            let i = table.idx(link.tx, link.subband, k);
            if core::mem::replace(&mut seen[i], true) {
                return Err(Error::DimensionMismatch(format!(
                    "duplicate triple ({}, {}, {k})",
                    link.tx, link.subband
                )));
            }
            if !(sinr >= 0.0) || !(rate >= rate_floor && rate.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "triple ({}, {}, {k}) has sinr {sinr} and rate {rate}",
                    link.tx, link.subband
                )));
            }
            table.sinr[i] = sinr;
            table.rate[i] = rate;
            table.log_rate[i] = libm::log(rate);
        }
        if let Some(missing) = (0..seen.len()).find(|&i| table.available[i] && !seen[i]) {
            return Err(Error::DimensionMismatch(format!(
                "available triple #{missing} has no entry"
            )));
        }
        Ok(table)
    }

    /// Builds a table by asking `f` for `(sinr, rate)` of every available triple.
    pub fn from_fn<F>(roster: Roster, pair_map: Vec<usize>, rate_floor: f64, mut f: F) -> Result<Self>
    where
        F: FnMut(Link, usize) -> (f64, f64),
    {
        let probe = RateTable::empty(roster, pair_map.clone(), rate_floor);
        let entries: Vec<_> = (0..roster.n_rx())
            .flat_map(|k| probe.options(k).map(move |l| (l, k)).collect::<Vec<_>>())
            .map(|(l, k)| {
                let (sinr, rate) = f(l, k);
                (l, k, sinr, rate)
            })
            .collect();
        RateTable::from_entries(roster, pair_map, rate_floor, entries)
    }

    #[inline]
    fn idx(&self, tx: usize, subband: Subband, rx: usize) -> usize {
        (rx * self.roster.n_tx() + tx) * 3 + subband.index()
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn pair_map(&self) -> &[usize] {
        &self.pair_map
    }

    pub fn rate_floor(&self) -> f64 {
        self.rate_floor
    }

    pub fn n_rx(&self) -> usize {
        self.roster.n_rx()
    }

    /// The D2D option of receiver `rx`, if `rx` is a D2D RX.
    pub fn d2d_link(&self, rx: usize) -> Option<Link> {
        let node = self.roster.receiver(rx);
        (node.role == RxRole::D2dRx)
            .then(|| Link::new(self.roster.d2d_tx(self.pair_map[node.ordinal]), Subband::Three))
    }

    /// Receiver index served by D2D TX `tx` on subband 3.
    pub fn d2d_served_rx(&self, tx: usize) -> Option<usize> {
        let node = self.roster.transmitter(tx);
        (node.role == TxRole::D2dTx).then(|| self.roster.d2d_rx(self.served_rx[node.ordinal]))
    }

    #[inline]
    pub fn is_available(&self, link: Link, rx: usize) -> bool {
        self.available[self.idx(link.tx, link.subband, rx)]
    }

    #[inline]
    pub fn sinr(&self, link: Link, rx: usize) -> f64 {
        self.sinr[self.idx(link.tx, link.subband, rx)]
    }

    #[inline]
    pub fn rate(&self, link: Link, rx: usize) -> f64 {
        self.rate[self.idx(link.tx, link.subband, rx)]
    }

    /// Natural log of the rate. Only meaningful on available triples.
    #[inline]
    pub fn log_rate(&self, link: Link, rx: usize) -> f64 {
        debug_assert!(self.is_available(link, rx));
        self.log_rate[self.idx(link.tx, link.subband, rx)]
    }

    /// All options of `rx` in tie-break order (base stations first, then the D2D link).
    pub fn options(&self, rx: usize) -> impl Iterator<Item = Link> + '_ {
        self.roster
            .bs_options()
            .chain(self.d2d_link(rx))
            .filter(move |l| self.is_available(*l, rx))
    }

    /// Available triples as `(link, receiver, sinr, rate)`, receiver-major.
    pub fn entries(&self) -> impl Iterator<Item = (Link, usize, f64, f64)> + '_ {
        (0..self.n_rx()).flat_map(move |k| {
            self.options(k)
                .map(move |l| (l, k, self.sinr(l, k), self.rate(l, k)))
        })
    }
}

fn sinr_or_degenerate(signal: f64, interference: f64, noise: f64, subband: Subband, rx: usize) -> Result<f64> {
    let denom = interference + noise;
    if denom > 0.0 {
        Ok(signal / denom)
    } else {
        Err(Error::DegenerateSinr {
            subband: subband.number(),
            receiver: rx,
        })
    }
}

/// Fills the availability mask and the SINR of every available triple.
///
/// All D2D TXs are treated as active on subband 3. Rates are left at the
/// floor until [`compute_rates`] runs.
pub fn compute_sinr(
    gains: &ChannelGains,
    power: &PowerAllocation,
    part: &PartitionConfig,
    radio: &RadioConfig,
) -> Result<RateTable> {
    part.validate()?;
    radio.validate()?;
    let roster = *gains.roster();
    if power.roster() != &roster {
        return Err(Error::DimensionMismatch(format!(
            "power roster {:?} vs gain roster {roster:?}",
            power.roster()
        )));
    }
    let n0 = radio.noise_psd_mw();
    let noise = Subband::ALL.map(|s| part.bandwidth(s) * n0);
    let mut table = RateTable::empty(roster, gains.pair_map().to_vec(), radio.rate_floor);

    let bs = 0..roster.n_bs();
    let pbs = roster.mbs..roster.n_bs();
    let d2d = roster.n_bs()..roster.n_tx();

    for k in 0..roster.n_rx() {
        let received = |n: usize, s: Subband| power.power(n, s) * gains.gain(n, k);
        for n in bs.clone() {
            let signal = received(n, Subband::One);
            let interference: f64 = bs.clone().filter(|&j| j != n).map(|j| received(j, Subband::One)).sum();
            let i = table.idx(n, Subband::One, k);
            table.sinr[i] = sinr_or_degenerate(signal, interference, noise[0], Subband::One, k)?;
        }
        for n in pbs.clone() {
            let signal = received(n, Subband::Two);
            let interference: f64 = pbs.clone().filter(|&j| j != n).map(|j| received(j, Subband::Two)).sum();
            let i = table.idx(n, Subband::Two, k);
            table.sinr[i] = sinr_or_degenerate(signal, interference, noise[1], Subband::Two, k)?;
        }
        if let Some(link) = table.d2d_link(k) {
            let n = link.tx;
            let signal = received(n, Subband::Three);
            let interference: f64 = d2d.clone().filter(|&j| j != n).map(|j| received(j, Subband::Three)).sum();
            let i = table.idx(n, Subband::Three, k);
            table.sinr[i] = sinr_or_degenerate(signal, interference, noise[2], Subband::Three, k)?;
        }
    }
    Ok(table)
}

/// Shannon rate on the triple's subband bandwidth plus the rate floor.
/// Unavailable triples sit exactly at the floor.
pub fn compute_rates(mut table: RateTable, part: &PartitionConfig, radio: &RadioConfig) -> Result<RateTable> {
    part.validate()?;
    radio.validate()?;
    let floor = radio.rate_floor;
    table.rate_floor = floor;
    let bandwidth = Subband::ALL.map(|s| part.bandwidth(s));
    for i in 0..table.available.len() {
        let rate = if table.available[i] {
            bandwidth[i % 3] * libm::log2(1.0 + table.sinr[i]) + floor
        } else {
            floor
        };
        table.rate[i] = rate;
        table.log_rate[i] = libm::log(rate);
    }
    Ok(table)
}

/// Power allocation followed by [`compute_sinr`] and [`compute_rates`].
pub fn build_rate_table(
    gains: &ChannelGains,
    part: &PartitionConfig,
    radio: &RadioConfig,
) -> Result<(PowerAllocation, RateTable)> {
    let power = allocate_power(gains.roster(), radio);
    let sinr = compute_sinr(gains, &power, part, radio)?;
    let rates = compute_rates(sinr, part, radio)?;
    Ok((power, rates))
}
