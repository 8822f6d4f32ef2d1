use std::fs;

use hetnet::hetnet_core::{SchemeId, ScenarioConfig};
use hetnet::output::{self, ReportKind};
use hetnet::{run_experiment, sweep_d2d, sweep_eta, DropSeeds, ExperimentConfig, MeanSe};

fn tiny() -> ExperimentConfig {
    ExperimentConfig {
        drops: 3,
        scenario: ScenarioConfig {
            macro_rows: 1,
            macro_cols: 2,
            pbs_per_macrocell: 2,
            cellular_users_per_macrocell: 6,
            d2d_pairs_per_macrocell: 2,
            ..ScenarioConfig::default()
        },
        ..ExperimentConfig::default()
    }
}

#[test]
fn single_drop_single_scheme_gives_one_row() {
    let config = ExperimentConfig {
        drops: 1,
        schemes: vec![SchemeId::MaxSinr],
        ..tiny()
    };
    let report = run_experiment(&config).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.aggregates.len(), 1);
    let dir = tempfile::tempdir().unwrap();
    output::write_all(&report, dir.path(), ReportKind::Run).unwrap();
    let metrics = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 2);
    assert!(metrics.starts_with(
        "drop,scheme,eta,d2d_pairs,macrotier_users,picotier_users,d2d_mode_users,jain,sum_utility,coverage_250000,"
    ));
    assert_eq!(
        fs::read_to_string(dir.path().join("convergence.csv")).unwrap().lines().count(),
        1,
        "no Max-Utility run, no trace"
    );
}

#[test]
fn identical_configs_write_identical_files() {
    let config = tiny();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let files_a = output::write_all(&run_experiment(&config).unwrap(), a.path(), ReportKind::Run).unwrap();
    output::write_all(&run_experiment(&config).unwrap(), b.path(), ReportKind::Run).unwrap();
    for path in files_a {
        let name = path.file_name().unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name:?}");
    }
}

#[test]
fn dropping_a_drop_leaves_the_others_unchanged() {
    let full = run_experiment(&tiny()).unwrap();
    let fewer = run_experiment(&ExperimentConfig { drops: 2, ..tiny() }).unwrap();
    let n = fewer.rows.len();
    assert_eq!(fewer.rows[..], full.rows[..n]);
    assert_eq!(fewer.seeds[..], full.seeds[..2]);
    assert_eq!(full.seeds[1], DropSeeds::new(tiny().seed, 1));
}

#[test]
fn aggregates_recompute_from_rows() {
    let report = run_experiment(&tiny()).unwrap();
    for agg in &report.aggregates {
        let jains: Vec<f64> = report.rows_for(agg.scheme).map(|r| r.jain).collect();
        assert_eq!(agg.jain, MeanSe::of(&jains));
        assert_eq!(agg.drops, 3);
    }
}

#[test]
fn rate_bias_without_max_utility_is_an_error() {
    let config = ExperimentConfig {
        schemes: vec![SchemeId::RateBias],
        ..tiny()
    };
    assert!(run_experiment(&config).is_err());
}

#[test]
fn eta_sweep_is_paired() {
    let config = tiny();
    let report = sweep_eta(&config, &[0.3, 0.3]).unwrap();
    let half = report.rows.len() / 2;
    assert_eq!(report.rows[..half], report.rows[half..]);

    // A single-point sweep matches a plain run at that η.
    let at = ExperimentConfig {
        partition: hetnet::hetnet_core::PartitionConfig {
            eta: 0.3,
            ..config.partition
        },
        ..config.clone()
    };
    assert_eq!(sweep_eta(&config, &[0.3]).unwrap().rows, run_experiment(&at).unwrap().rows);
}

#[test]
fn eta_zero_leaves_subband_two_empty() {
    let report = sweep_eta(&tiny(), &[0.0]).unwrap();
    for result in &report.results {
        for o in &result.outcomes {
            if o.scheme != SchemeId::SinrBias && o.scheme != SchemeId::MaxSinr {
                assert!(o.assignment.links().iter().all(|l| l.subband.number() != 2), "{}", o.scheme);
            }
        }
    }
}

#[test]
fn eta_sweep_writes_coverage_table() {
    let report = sweep_eta(&tiny(), &[0.0, 0.5]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    output::write_all(&report, dir.path(), ReportKind::EtaSweep).unwrap();
    let table = fs::read_to_string(dir.path().join("coverage_vs_eta.csv")).unwrap();
    assert_eq!(table.lines().next().unwrap(), "eta,scheme,rho,mean,stderr");
    assert_eq!(table.lines().count(), 1 + 2 * SchemeId::ALL.len() * 4);
}

#[test]
fn d2d_sweep_changes_pair_count() {
    let report = sweep_d2d(&tiny(), &[0, 3]).unwrap();
    let points: Vec<usize> = report.aggregates.iter().map(|a| a.d2d_pairs).collect();
    assert!(points.contains(&0) && points.contains(&6));
    let dir = tempfile::tempdir().unwrap();
    output::write_all(&report, dir.path(), ReportKind::D2dSweep).unwrap();
    assert!(dir.path().join("d2d_counts.csv").exists());
}

#[test]
fn report_json_echoes_config_and_seeds() {
    let report = run_experiment(&tiny()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    output::write_report_json(&report, &dir.path().join("r.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["drops"], 3);
    assert_eq!(json["seeds"].as_array().unwrap().len(), 3);
    assert_eq!(json["rows"].as_array().unwrap().len(), 3 * SchemeId::ALL.len());
}

#[test]
fn shipped_config_matches_the_defaults() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml");
    let config = ExperimentConfig::load(&path).unwrap();
    let expected = ExperimentConfig {
        drops: 50,
        eta_sweep: Some(hetnet::DEFAULT_ETA_SWEEP.to_vec()),
        d2d_sweep: Some(vec![5, 10, 15, 20, 25, 30]),
        ..ExperimentConfig::default()
    };
    assert_eq!(config, expected);
}
