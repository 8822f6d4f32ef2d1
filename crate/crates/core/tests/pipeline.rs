use hetnet_core::assoc::ORACLE_CAP;
use hetnet_core::{
    assoc_rate_bias, brute_force_oracle, build_rate_table, compute_gains, dual_value, generate_layout,
    primal_utility, solve_max_utility, ChannelConfig, MetricsReport, PartitionConfig, RadioConfig, ScenarioConfig,
    SolverConfig,
};

fn scenario(seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        macro_rows: 1,
        macro_cols: 2,
        pbs_per_macrocell: 1,
        cellular_users_per_macrocell: 2,
        d2d_pairs_per_macrocell: 1,
        rng_seed: seed,
        ..ScenarioConfig::default()
    }
}

#[test]
fn drop_to_metrics() {
    let layout = generate_layout(&ScenarioConfig::default()).unwrap();
    let gains = compute_gains(&layout, &ChannelConfig::default()).unwrap();
    let (_, rates) = build_rate_table(&gains, &PartitionConfig::default(), &RadioConfig::default()).unwrap();
    assert_eq!(rates.n_rx(), 4 * (30 + 2 * 15));
    let solve = solve_max_utility(&rates, &SolverConfig::default()).unwrap();
    let report = MetricsReport::compute(&solve.final_x, &rates, &[0.5e6]).unwrap();
    assert_eq!(report.tier_loads.total(), rates.n_rx());
    assert_eq!(report.bs_loads.len(), 4 * 5);
    assert!((report.sum_utility - solve.sum_utility).abs() < 1e-9);
    assert_eq!(assoc_rate_bias(&rates, &solve.mu_star).unwrap(), solve.final_x);
}

#[test]
fn solver_against_oracle_on_small_drops() {
    for seed in 0..5 {
        let layout = generate_layout(&scenario(seed)).unwrap();
        let channel = ChannelConfig {
            rng_seed: seed + 100,
            ..ChannelConfig::default()
        };
        let gains = compute_gains(&layout, &channel).unwrap();
        let (_, rates) = build_rate_table(&gains, &PartitionConfig::default(), &RadioConfig::default()).unwrap();
        let (x_star, g_star) = brute_force_oracle(&rates, ORACLE_CAP).unwrap();
        assert_eq!(primal_utility(&x_star, &rates).unwrap(), g_star);
        let solve = solve_max_utility(&rates, &SolverConfig::default()).unwrap();
        assert!(solve.sum_utility <= g_star + 1e-9);
        for rec in &solve.trace {
            let mu = hetnet_core::Prices(rec.mu.clone());
            assert!(dual_value(&mu, &rates).unwrap() >= g_star - 1e-9);
        }
    }
}
