//! Randomised invariants over metrics, the partition, the power split and the
//! association schemes.

use hetnet_core::metrics::{coverage_probability, effective_rates, jain_index, rate_cdf, RateSample};
use hetnet_core::{
    allocate_power, assoc_max_rate, assoc_max_sinr, assoc_rate_bias, assoc_sinr_bias, build_rate_table,
    compute_gains, generate_layout, solve_max_utility, Assignment, ChannelConfig, PartitionConfig, RadioConfig,
    RateTable, Roster, RxRole, ScenarioConfig, SolverConfig, Subband, TxRole,
};
use proptest::prelude::*;

fn small_drop(seed: u64, pbs: usize, users: usize, pairs: usize, eta: f64) -> (hetnet_core::PowerAllocation, RateTable) {
    let scenario = ScenarioConfig {
        macro_rows: 1,
        macro_cols: 2,
        pbs_per_macrocell: pbs,
        cellular_users_per_macrocell: users,
        d2d_pairs_per_macrocell: pairs,
        rng_seed: seed,
        ..ScenarioConfig::default()
    };
    let layout = generate_layout(&scenario).unwrap();
    let channel = ChannelConfig {
        rng_seed: seed ^ 0x5555,
        ..ChannelConfig::default()
    };
    let gains = compute_gains(&layout, &channel).unwrap();
    let part = PartitionConfig {
        eta,
        ..PartitionConfig::default()
    };
    build_rate_table(&gains, &part, &RadioConfig::default()).unwrap()
}

fn samples(rates: &[f64]) -> Vec<RateSample> {
    rates
        .iter()
        .enumerate()
        .map(|(receiver, &rate_bps)| RateSample {
            receiver,
            role: RxRole::Cellular,
            rate_bps,
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jain_is_bounded(loads in prop::collection::vec(0.0f64..100.0, 1..20)) {
        prop_assume!(loads.iter().any(|y| *y > 0.0));
        let j = jain_index(&loads).unwrap();
        let n = loads.len() as f64;
        prop_assert!(j >= 1.0 / n - 1e-12 && j <= 1.0 + 1e-12);
    }

    #[test]
    fn jain_is_scale_invariant(loads in prop::collection::vec(0.0f64..100.0, 1..20), alpha in 1e-3f64..1e3) {
        prop_assume!(loads.iter().any(|y| *y > 0.0));
        let scaled: Vec<f64> = loads.iter().map(|y| alpha * y).collect();
        let (a, b) = (jain_index(&loads).unwrap(), jain_index(&scaled).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn jain_is_one_for_equal_loads(y in 0.1f64..100.0, n in 1usize..20) {
        prop_assert!((jain_index(&vec![y; n]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_is_monotone_with_limits(
        rates in prop::collection::vec(1.0f64..1e8, 1..50),
        mut grid in prop::collection::vec(0.0f64..2e8, 1..30),
    ) {
        grid.sort_by(f64::total_cmp);
        let s = samples(&rates);
        let cdf = rate_cdf(&s, &grid).unwrap();
        for w in cdf.windows(2) {
            prop_assert!(w[0].1 <= w[1].1);
        }
        for &(g, p) in &cdf {
            prop_assert!((0.0..=1.0).contains(&p));
            let min = rates.iter().copied().fold(f64::INFINITY, f64::min);
            let max = rates.iter().copied().fold(0.0, f64::max);
            if g < min { prop_assert_eq!(p, 0.0); }
            if g >= max { prop_assert_eq!(p, 1.0); }
        }
    }

    #[test]
    fn coverage_complements_cdf(rates in prop::collection::vec(1.0f64..1e8, 1..50), rho in 0.0f64..1e8) {
        let s = samples(&rates);
        let c = coverage_probability(&s, rho).unwrap();
        let f = rate_cdf(&s, &[rho]).unwrap()[0].1;
        prop_assert!((c + f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partition_conserves_bandwidth(w in 1.0e6f64..1e8, eta in 0.0f64..=1.0) {
        let part = PartitionConfig { system_bandwidth: w, eta, ..PartitionConfig::default() };
        let total: f64 = Subband::ALL.iter().map(|&s| part.bandwidth(s)).sum();
        prop_assert!((total - w).abs() <= 1e-9 * w);
        prop_assert!(Subband::ALL.iter().all(|&s| part.bandwidth(s) >= 0.0));
    }

    #[test]
    fn power_is_conserved_per_transmitter(
        mbs in 0usize..4, pbs in 0usize..6, pairs in 0usize..6,
        p_m in 20.0f64..50.0, p_p in 10.0f64..35.0, p_d in 0.0f64..25.0,
    ) {
        let roster = Roster::new(mbs, pbs, 0, pairs);
        let radio = RadioConfig { mbs_power_dbm: p_m, pbs_power_dbm: p_p, d2d_tx_power_dbm: p_d, ..RadioConfig::default() };
        let power = allocate_power(&roster, &radio);
        for n in 0..roster.n_tx() {
            let expected = radio.total_power_mw(roster.tx_role(n));
            prop_assert!((power.total(n) - expected).abs() <= 1e-9 * expected);
            let used: Vec<f64> = power.rows()[n].iter().copied().filter(|p| *p > 0.0).collect();
            prop_assert!(used.windows(2).all(|w| w[0] == w[1]));
            let subbands = match roster.tx_role(n) {
                TxRole::Mbs => 1, TxRole::Pbs => 2, TxRole::D2dTx => 1,
            };
            prop_assert_eq!(used.len(), subbands);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_scheme_is_feasible(
        seed in any::<u64>(), pbs in 0usize..3, users in 0usize..5, pairs in 0usize..3, eta in 0.05f64..0.95,
    ) {
        prop_assume!(users + pairs > 0);
        let (power, rates) = small_drop(seed, pbs, users, pairs, eta);
        let solve = solve_max_utility(&rates, &SolverConfig::default()).unwrap();
        let outputs: Vec<Assignment> = vec![
            solve.final_x.clone(),
            assoc_max_rate(&rates).unwrap(),
            assoc_max_sinr(&rates).unwrap(),
            assoc_rate_bias(&rates, &solve.mu_star).unwrap(),
            assoc_sinr_bias(&rates, &power).unwrap(),
        ];
        for x in &outputs {
            prop_assert!(x.check_feasible(&rates).is_ok());
            prop_assert_eq!(x.links().len(), rates.n_rx());
            for (k, &l) in x.links().iter().enumerate() {
                prop_assert!(rates.is_available(l, k));
            }
        }
    }

    #[test]
    fn effective_rates_share_each_subband(seed in any::<u64>(), users in 1usize..6) {
        let (_, rates) = small_drop(seed, 1, users, 1, 0.5);
        let x = assoc_max_rate(&rates).unwrap();
        let eff = effective_rates(&x, &rates).unwrap();
        let roster = rates.roster();
        for n in 0..roster.n_tx() {
            for s in Subband::ALL {
                let on: Vec<usize> = (0..rates.n_rx())
                    .filter(|&k| x.links()[k].tx == n && x.links()[k].subband == s)
                    .collect();
                if on.is_empty() { continue; }
                let load = if roster.is_bs(n) { on.len() as f64 } else { 1.0 };
                let lhs: f64 = on.iter().map(|&k| eff[k].rate_bps).sum();
                let rhs: f64 = on.iter().map(|&k| rates.rate(x.links()[k], k)).sum::<f64>() / load;
                prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0));
            }
        }
    }
}
