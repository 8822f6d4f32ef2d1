//! Evaluation quantities: tier loads, D2D mode counts, the Jain load-balancing
//! index over base stations, effective rates, coverage and rate CDFs.

use alloc::vec;
use alloc::vec::Vec;

use crate::assoc::{primal_utility, Assignment};
use crate::phy::RateTable;
use crate::roster::{Roster, RxRole, TxRole};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateSample {
    pub receiver: usize,
    pub role: RxRole,
    pub rate_bps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TierCounts {
    pub macrotier: usize,
    pub picotier: usize,
    pub d2d_mode: usize,
}

impl TierCounts {
    pub fn total(&self) -> usize {
        self.macrotier + self.picotier + self.d2d_mode
    }
}

/// D2D RXs split by what serves them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct D2dCounts {
    pub rx_on_bs: usize,
    pub rx_on_tx: usize,
}

/// Receivers sharing subband `s` of transmitter `n`, indexed `[n][s]`.
fn link_loads(x: &Assignment, roster: &Roster) -> Vec<[u32; 3]> {
    let mut loads = vec![[0u32; 3]; roster.n_tx()];
    for link in x.links() {
        loads[link.tx][link.subband.index()] += 1;
    }
    loads
}

/// `R = r / load` of every receiver; a D2D-mode receiver has load 1.
pub fn effective_rates(x: &Assignment, rates: &RateTable) -> Result<Vec<RateSample>> {
    x.check_feasible(rates)?;
    let roster = rates.roster();
    let loads = link_loads(x, roster);
    Ok(x
        .links()
        .iter()
        .enumerate()
        .map(|(k, &link)| RateSample {
            receiver: k,
            role: roster.rx_role(k),
            rate_bps: rates.rate(link, k) / loads[link.tx][link.subband.index()] as f64,
        })
        .collect())
}

/// Total receivers on each MBS and PBS (all subbands), BS order.
pub fn bs_loads(x: &Assignment, roster: &Roster) -> Vec<f64> {
    link_loads(x, roster)
        .iter()
        .take(roster.n_bs())
        .map(|l| l.iter().sum::<u32>() as f64)
        .collect()
}

/// Jain's index `(Σy)² / (N Σy²)`. An all-zero load vector scores 1.
pub fn jain_index(loads: &[f64]) -> Result<f64> {
    if loads.is_empty() {
        return Err(Error::EmptyInput("jain_index needs at least one base station"));
    }
    if loads.iter().any(|y| !(*y >= 0.0)) {
        return Err(Error::InvalidConfig("loads must be non-negative".into()));
    }
    let sum: f64 = loads.iter().sum();
    let sum_sq: f64 = loads.iter().map(|y| y * y).sum();
    if sum_sq == 0.0 {
        return Ok(1.0);
    }
    Ok(sum * sum / (loads.len() as f64 * sum_sq))
}

/// Fraction of samples with effective rate strictly above `rho`.
pub fn coverage_probability(samples: &[RateSample], rho: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("coverage needs at least one rate sample"));
    }
    let covered = samples.iter().filter(|s| s.rate_bps > rho).count();
    Ok(covered as f64 / samples.len() as f64)
}

/// Empirical `P[R <= g]` at each grid point.
pub fn rate_cdf(samples: &[RateSample], grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() || grid.is_empty() {
        return Err(Error::EmptyInput("rate_cdf needs samples and grid points"));
    }
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidConfig("rate_cdf grid must be sorted".into()));
    }
    let mut rates: Vec<f64> = samples.iter().map(|s| s.rate_bps).collect();
    rates.sort_by(f64::total_cmp);
    let n = rates.len() as f64;
    Ok(grid
        .iter()
        .map(|&g| {
            let below = rates.partition_point(|&r| r <= g);
            (g, below as f64 / n)
        })
        .collect())
}

/// Receivers by serving tier, and D2D RXs by BS vs own-TX service.
pub fn tier_and_d2d_counts(x: &Assignment, roster: &Roster) -> (TierCounts, D2dCounts) {
    let mut tiers = TierCounts::default();
    let mut d2d = D2dCounts::default();
    for (k, link) in x.links().iter().enumerate() {
        let role = roster.tx_role(link.tx);
        match role {
            TxRole::Mbs => tiers.macrotier += 1,
            TxRole::Pbs => tiers.picotier += 1,
            TxRole::D2dTx => tiers.d2d_mode += 1,
        }
        if roster.rx_role(k) == RxRole::D2dRx {
            if role == TxRole::D2dTx {
                d2d.rx_on_tx += 1;
            } else {
                d2d.rx_on_bs += 1;
            }
        }
    }
    (tiers, d2d)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub tier_loads: TierCounts,
    pub d2d_counts: D2dCounts,
    pub bs_loads: Vec<f64>,
    pub jain_index: f64,
    /// Set when every BS load is zero and the index was defined as 1.
    pub jain_degenerate: bool,
    pub effective_rates: Vec<RateSample>,
    /// `(ρ, coverage)` in the order the targets were given.
    pub coverage: Vec<(f64, f64)>,
    pub sum_utility: f64,
}

impl MetricsReport {
    pub fn compute(x: &Assignment, rates: &RateTable, target_rates: &[f64]) -> Result<Self> {
        let roster = rates.roster();
        let effective_rates = effective_rates(x, rates)?;
        let (tier_loads, d2d_counts) = tier_and_d2d_counts(x, roster);
        let bs_loads = bs_loads(x, roster);
        let jain_index = jain_index(&bs_loads)?;
        let jain_degenerate = bs_loads.iter().all(|y| *y == 0.0);
        let coverage = if effective_rates.is_empty() {
            Vec::new()
        } else {
            target_rates
                .iter()
                .map(|&rho| coverage_probability(&effective_rates, rho).map(|c| (rho, c)))
                .collect::<Result<_>>()?
        };
        Ok(MetricsReport {
            tier_loads,
            d2d_counts,
            bs_loads,
            jain_index,
            jain_degenerate,
            effective_rates,
            coverage,
            sum_utility: primal_utility(x, rates)?,
        })
    }

    /// Share of receivers served by MBSs.
    pub fn macro_share(&self) -> f64 {
        let total = self.tier_loads.total();
        if total == 0 {
            0.0
        } else {
            self.tier_loads.macrotier as f64 / total as f64
        }
    }
}
