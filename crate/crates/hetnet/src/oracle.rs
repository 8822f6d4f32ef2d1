//! Solver-versus-exhaustive-search comparison on small random instances.

use hetnet_core::assoc::ORACLE_CAP;
use hetnet_core::{brute_force_oracle, solve_max_utility, ScenarioConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::experiment::{Drop, Instance};

/// Two cells side by side, each with one PBS, two cellular users and one D2D
/// pair: 2 MBSs, 2 PBSs, 4 users and 2 pairs in total.
pub fn small_scenario() -> ScenarioConfig {
    ScenarioConfig {
        macro_rows: 1,
        macro_cols: 2,
        pbs_per_macrocell: 1,
        cellular_users_per_macrocell: 2,
        d2d_pairs_per_macrocell: 1,
        ..ScenarioConfig::default()
    }
}

/// `config` with its scenario replaced by [`small_scenario`].
pub fn small_config(config: &ExperimentConfig) -> ExperimentConfig {
    ExperimentConfig {
        scenario: small_scenario(),
        ..config.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCase {
    pub instance: usize,
    pub solver_utility: f64,
    pub optimal_utility: f64,
    /// `(G* - G) / |G*|`; zero when the solver is optimal.
    pub relative_gap: f64,
    /// `min_t I(μ^t) - G*`; weak duality requires this to be non-negative.
    pub min_dual_margin: f64,
    pub converged: bool,
}

impl OracleCase {
    pub fn within(&self, rel_tol: f64) -> bool {
        self.solver_utility >= self.optimal_utility - rel_tol * self.optimal_utility.abs()
    }
}

pub fn check_instance(index: usize, instance: &Instance, config: &ExperimentConfig) -> Result<OracleCase> {
    let solve = solve_max_utility(&instance.rates, &config.solver)?;
    let (_, optimal) = brute_force_oracle(&instance.rates, ORACLE_CAP)?;
    let min_dual = solve
        .trace
        .iter()
        .map(|r| r.dual_value)
        .fold(f64::INFINITY, f64::min);
    Ok(OracleCase {
        instance: index,
        solver_utility: solve.sum_utility,
        optimal_utility: optimal,
        relative_gap: (optimal - solve.sum_utility) / optimal.abs(),
        min_dual_margin: min_dual - optimal,
        converged: solve.converged,
    })
}

/// Draws `count` small instances from the seed ledger of `config` and checks each.
pub fn oracle_check(config: &ExperimentConfig, count: usize) -> Result<Vec<OracleCase>> {
    let small = small_config(config);
    small.validate()?;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let instance = Drop::generate(&small, i)?.instance(&small, &small.partition)?;
            check_instance(i, &instance, &small)
        })
        .collect()
}
