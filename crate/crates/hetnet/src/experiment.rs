//! Monte Carlo drops, scheme execution and aggregation.

use std::collections::BTreeMap;

use hetnet_core::assoc::IterationRecord;
use hetnet_core::metrics::{D2dCounts, TierCounts};
use hetnet_core::{
    assoc_max_rate, assoc_max_sinr, assoc_rate_bias, assoc_sinr_bias, build_rate_table, compute_gains,
    generate_layout, solve_max_utility, Assignment, ChannelGains, MetricsReport, NetworkLayout,
    PartitionConfig, PowerAllocation, RateTable, SchemeId, SolveResult,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `stream` for drop `drop`; a pure function of its arguments.
pub fn derive_seed(master: u64, drop: usize, stream: u64) -> u64 {
    let base = mix(master.wrapping_add(0x9E37_79B9_7F4A_7C15));
    mix(base ^ mix((drop as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stream)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DropSeeds {
    pub drop: usize,
    pub layout: u64,
    pub channel: u64,
}

impl DropSeeds {
    pub fn new(master: u64, drop: usize) -> Self {
        DropSeeds {
            drop,
            layout: derive_seed(master, drop, 0),
            channel: derive_seed(master, drop, 1),
        }
    }
}

/// Geometry and shadowing of one drop; independent of the partition.
#[derive(Debug, Clone)]
pub struct Drop {
    pub seeds: DropSeeds,
    pub layout: NetworkLayout,
    pub gains: ChannelGains,
}

impl Drop {
    pub fn generate(config: &ExperimentConfig, drop: usize) -> Result<Self> {
        let seeds = DropSeeds::new(config.seed, drop);
        let mut scenario = config.scenario.clone();
        scenario.rng_seed = seeds.layout;
        let mut channel = config.channel.clone();
        channel.rng_seed = seeds.channel;
        let layout = generate_layout(&scenario)?;
        let gains = compute_gains(&layout, &channel)?;
        Ok(Drop { seeds, layout, gains })
    }

    pub fn instance(&self, config: &ExperimentConfig, partition: &PartitionConfig) -> Result<Instance> {
        let (power, rates) = build_rate_table(&self.gains, partition, &config.radio)?;
        Ok(Instance {
            layout: self.layout.clone(),
            power,
            rates,
        })
    }
}

/// Everything an association scheme reads.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub layout: NetworkLayout,
    pub power: PowerAllocation,
    pub rates: RateTable,
}

#[derive(Debug, Clone)]
pub struct SchemeOutcome {
    pub scheme: SchemeId,
    pub assignment: Assignment,
    pub metrics: MetricsReport,
}

/// Runs `schemes` (already ordered, Max-Utility first) on one instance.
pub fn run_schemes(
    instance: &Instance,
    config: &ExperimentConfig,
    schemes: &[SchemeId],
) -> Result<(Vec<SchemeOutcome>, Option<SolveResult>)> {
    let rates = &instance.rates;
    let mut solve: Option<SolveResult> = None;
    let mut outcomes = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let assignment = match scheme {
            SchemeId::MaxUtility => {
                let result = solve_max_utility(rates, &config.solver)?;
                let x = result.final_x.clone();
                solve = Some(result);
                x
            }
            SchemeId::MaxRate => assoc_max_rate(rates)?,
            SchemeId::MaxSinr => assoc_max_sinr(rates)?,
            SchemeId::RateBias => {
                let mu = &solve
                    .as_ref()
                    .ok_or_else(|| HarnessError::Config("RATE_BIAS ran before MAX_UTILITY".into()))?
                    .mu_star;
                assoc_rate_bias(rates, mu)?
            }
            SchemeId::SinrBias => assoc_sinr_bias(rates, &instance.power)?,
        };
        let metrics = MetricsReport::compute(&assignment, rates, &config.target_rates)?;
        outcomes.push(SchemeOutcome {
            scheme,
            assignment,
            metrics,
        });
    }
    Ok((outcomes, solve))
}

/// One drop at one sweep point.
#[derive(Debug, Clone)]
pub struct DropResult {
    pub seeds: DropSeeds,
    pub eta: f64,
    pub d2d_pairs: usize,
    pub outcomes: Vec<SchemeOutcome>,
    pub trace: Option<Vec<IterationRecord>>,
    pub converged: Option<bool>,
}

fn evaluate_drop(config: &ExperimentConfig, drop: &Drop, partition: &PartitionConfig) -> Result<DropResult> {
    let instance = drop.instance(config, partition)?;
    let (outcomes, solve) = run_schemes(&instance, config, &config.ordered_schemes())?;
    Ok(DropResult {
        seeds: drop.seeds,
        eta: partition.eta,
        d2d_pairs: drop.layout.pair_map.len(),
        outcomes,
        converged: solve.as_ref().map(|s| s.converged),
        trace: solve.map(|s| s.trace),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct MeanSe {
    pub mean: f64,
    pub stderr: f64,
}

impl MeanSe {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return MeanSe::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return MeanSe { mean, stderr: 0.0 };
        }
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        MeanSe {
            mean,
            stderr: (var / n as f64).sqrt(),
        }
    }
}

/// Per-(sweep point, scheme) summary across drops.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub eta: f64,
    pub d2d_pairs: usize,
    pub scheme: SchemeId,
    pub drops: usize,
    pub jain: MeanSe,
    pub sum_utility: MeanSe,
    pub macrotier_users: MeanSe,
    pub picotier_users: MeanSe,
    pub d2d_mode_users: MeanSe,
    pub macro_share: MeanSe,
    pub d2d_rx_on_bs: MeanSe,
    pub d2d_rx_on_tx: MeanSe,
    /// `(ρ, coverage)` per target rate.
    pub coverage: Vec<(f64, MeanSe)>,
}

/// One line of the per-drop table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DropRow {
    pub drop: usize,
    pub scheme: SchemeId,
    pub eta: f64,
    pub d2d_pairs: usize,
    pub tier_loads: TierCounts,
    pub d2d_counts: D2dCounts,
    pub jain: f64,
    pub jain_degenerate: bool,
    pub sum_utility: f64,
    pub coverage: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub seeds: Vec<DropSeeds>,
    pub rows: Vec<DropRow>,
    pub aggregates: Vec<Aggregate>,
    #[serde(skip)]
    pub results: Vec<DropResult>,
}

impl RunReport {
    fn new(config: &ExperimentConfig, results: Vec<DropResult>) -> Self {
        let mut seeds: Vec<DropSeeds> = results.iter().map(|r| r.seeds).collect();
        seeds.sort_by_key(|s| s.drop);
        seeds.dedup();
        let rows = results
            .iter()
            .flat_map(|r| {
                r.outcomes.iter().map(move |o| DropRow {
                    drop: r.seeds.drop,
                    scheme: o.scheme,
                    eta: r.eta,
                    d2d_pairs: r.d2d_pairs,
                    tier_loads: o.metrics.tier_loads,
                    d2d_counts: o.metrics.d2d_counts,
                    jain: o.metrics.jain_index,
                    jain_degenerate: o.metrics.jain_degenerate,
                    sum_utility: o.metrics.sum_utility,
                    coverage: o.metrics.coverage.clone(),
                })
            })
            .collect::<Vec<_>>();
        let aggregates = aggregate(&rows, &config.target_rates);
        RunReport {
            config: config.clone(),
            seeds,
            rows,
            aggregates,
            results,
        }
    }

    pub fn aggregate_for(&self, eta: f64, scheme: SchemeId) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.scheme == scheme && a.eta.to_bits() == eta.to_bits())
    }

    /// Rows of one scheme in drop order (first sweep point only when several exist).
    pub fn rows_for(&self, scheme: SchemeId) -> impl Iterator<Item = &DropRow> {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }
}

fn aggregate(rows: &[DropRow], target_rates: &[f64]) -> Vec<Aggregate> {
    // Group in first-appearance order of (eta, d2d_pairs), then scheme order.
    let mut points: Vec<(u64, usize)> = Vec::new();
    let mut groups: BTreeMap<(usize, SchemeId), Vec<&DropRow>> = BTreeMap::new();
    for row in rows {
        let key = (row.eta.to_bits(), row.d2d_pairs);
        let point = match points.iter().position(|p| *p == key) {
            Some(i) => i,
            None => {
                points.push(key);
                points.len() - 1
            }
        };
        groups.entry((point, row.scheme)).or_default().push(row);
    }
    groups
        .into_iter()
        .map(|((point, scheme), rows)| {
            let stat = |f: &dyn Fn(&DropRow) -> f64| MeanSe::of(&rows.iter().map(|r| f(r)).collect::<Vec<_>>());
            let coverage = target_rates
                .iter()
                .enumerate()
                .map(|(i, &rho)| (rho, stat(&|r: &DropRow| r.coverage[i].1)))
                .collect();
            Aggregate {
                eta: f64::from_bits(points[point].0),
                d2d_pairs: points[point].1,
                scheme,
                drops: rows.len(),
                jain: stat(&|r| r.jain),
                sum_utility: stat(&|r| r.sum_utility),
                macrotier_users: stat(&|r| r.tier_loads.macrotier as f64),
                picotier_users: stat(&|r| r.tier_loads.picotier as f64),
                d2d_mode_users: stat(&|r| r.tier_loads.d2d_mode as f64),
                macro_share: stat(&|r| r.tier_loads.macrotier as f64 / r.tier_loads.total().max(1) as f64),
                d2d_rx_on_bs: stat(&|r| r.d2d_counts.rx_on_bs as f64),
                d2d_rx_on_tx: stat(&|r| r.d2d_counts.rx_on_tx as f64),
                coverage,
            }
        })
        .collect()
}

/// Runs every drop of `config` at its configured partition.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let results = (0..config.drops)
        .into_par_iter()
        .map(|i| {
            let drop = Drop::generate(config, i)?;
            evaluate_drop(config, &drop, &config.partition)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunReport::new(config, results))
}

/// Paired sweep over η: drop `i` keeps its layout and shadowing at every η.
pub fn sweep_eta(config: &ExperimentConfig, eta_values: &[f64]) -> Result<RunReport> {
    config.validate()?;
    if eta_values.is_empty() {
        return Err(HarnessError::Config("eta sweep needs at least one value".into()));
    }
    let partitions = eta_values
        .iter()
        .map(|&eta| {
            let p = PartitionConfig { eta, ..config.partition };
            p.validate().map(|_| p)
        })
        .collect::<hetnet_core::Result<Vec<_>>>()?;
    let per_drop = (0..config.drops)
        .into_par_iter()
        .map(|i| {
            let drop = Drop::generate(config, i)?;
            partitions
                .iter()
                .map(|p| evaluate_drop(config, &drop, p))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    // Reorder to sweep-point-major so every point's drops are contiguous.
    let results = (0..partitions.len())
        .flat_map(|j| per_drop.iter().map(move |d| d[j].clone()))
        .collect();
    Ok(RunReport::new(config, results))
}

/// Sweep over the number of D2D pairs per macrocell. Seeds are shared across
/// points but the layouts differ, since the pair count changes the draw.
pub fn sweep_d2d(config: &ExperimentConfig, pairs_per_cell: &[usize]) -> Result<RunReport> {
    config.validate()?;
    if pairs_per_cell.is_empty() {
        return Err(HarnessError::Config("D2D sweep needs at least one pair count".into()));
    }
    let mut results = Vec::new();
    for &pairs in pairs_per_cell {
        let mut point = config.clone();
        point.scenario.d2d_pairs_per_macrocell = pairs;
        results.extend(run_experiment(&point)?.results);
    }
    Ok(RunReport::new(config, results))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_depend_only_on_master_and_index() {
        assert_eq!(derive_seed(7, 3, 0), derive_seed(7, 3, 0));
        assert_ne!(derive_seed(7, 3, 0), derive_seed(7, 4, 0));
        assert_ne!(derive_seed(7, 3, 0), derive_seed(7, 3, 1));
        assert_ne!(derive_seed(7, 3, 0), derive_seed(8, 3, 0));
    }

    #[test]
    fn mean_and_standard_error() {
        let m = MeanSe::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.stderr - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(MeanSe::of(&[3.0]).stderr, 0.0);
    }
}
