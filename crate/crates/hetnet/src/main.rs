use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use hetnet::output::{self, ReportKind};
use hetnet::{instance, oracle, Drop, ExperimentConfig, DEFAULT_ETA_SWEEP};
use hetnet_core::SchemeId;

#[derive(Parser)]
#[command(name = "hetnet", version, about = "User association and resource partitioning experiments for D2D-enabled HetNets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML experiment configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of Monte Carlo drops.
    #[arg(long, global = true)]
    drops: Option<usize>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Scheme to run; repeat to run several (default: all).
    #[arg(long = "scheme", global = true)]
    schemes: Vec<SchemeId>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every drop at the configured partition.
    Run,
    /// Paired-seed sweep over the partition parameter η.
    SweepEta {
        /// Comma-separated η values; falls back to the config, then 0, 0.1, ..., 0.9.
        #[arg(long, value_delimiter = ',')]
        eta: Option<Vec<f64>>,
    },
    /// Sweep over the number of D2D pairs per macrocell.
    SweepD2d {
        /// Comma-separated pair counts; falls back to the config.
        #[arg(long, value_delimiter = ',')]
        pairs: Option<Vec<usize>>,
    },
    /// Compare the solver with exhaustive search on small random instances.
    OracleCheck {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        /// Relative tolerance on the utility gap.
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
        /// Check a single instance file instead of random ones.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Write one drop as an instance file.
    ExportInstance {
        #[arg(long, default_value_t = 0)]
        drop: usize,
        /// Output path (default: <out-dir>/instance_<drop>.txt).
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn load_config(global: &Global) -> anyhow::Result<ExperimentConfig> {
    let mut config = match &global.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    if let Some(drops) = global.drops {
        config.drops = drops;
    }
    if let Some(dir) = &global.out_dir {
        config.out_dir = dir.clone();
    }
    if !global.schemes.is_empty() {
        config.schemes = global.schemes.clone();
    }
    config.validate()?;
    Ok(config)
}

fn report_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = load_config(&cli.global)?;
    match cli.command {
        Command::Run => {
            let report = hetnet::run_experiment(&config)?;
            report_written(&output::write_all(&report, &config.out_dir, ReportKind::Run)?);
            for agg in &report.aggregates {
                println!(
                    "{:<12} jain {:.4} ± {:.4}  macro share {:.3}  sum utility {:.3}",
                    agg.scheme.as_str(),
                    agg.jain.mean,
                    agg.jain.stderr,
                    agg.macro_share.mean,
                    agg.sum_utility.mean
                );
            }
        }
        Command::SweepEta { eta } => {
            let etas = eta
                .or_else(|| config.eta_sweep.clone())
                .unwrap_or_else(|| DEFAULT_ETA_SWEEP.to_vec());
            let report = hetnet::sweep_eta(&config, &etas)?;
            report_written(&output::write_all(&report, &config.out_dir, ReportKind::EtaSweep)?);
        }
        Command::SweepD2d { pairs } => {
            let Some(pairs) = pairs.or_else(|| config.d2d_sweep.clone()) else {
                bail!("sweep-d2d needs --pairs or `d2d_sweep` in the config");
            };
            let report = hetnet::sweep_d2d(&config, &pairs)?;
            report_written(&output::write_all(&report, &config.out_dir, ReportKind::D2dSweep)?);
        }
        Command::OracleCheck {
            instances,
            tolerance,
            instance: file,
        } => {
            let cases = match file {
                Some(path) => {
                    let inst = instance::read_file(&path)?;
                    vec![oracle::check_instance(0, &inst, &config)?]
                }
                None => oracle::oracle_check(&config, instances)?,
            };
            let mut within = 0;
            let mut weak_duality = true;
            for c in &cases {
                let ok = c.within(tolerance);
                within += ok as usize;
                weak_duality &= c.min_dual_margin >= -1e-9;
                println!(
                    "instance {:>3}: G = {:.6}  G* = {:.6}  gap {:.3e}  min I - G* = {:.3e}{}",
                    c.instance,
                    c.solver_utility,
                    c.optimal_utility,
                    c.relative_gap,
                    c.min_dual_margin,
                    if ok { "" } else { "  OUTSIDE TOLERANCE" }
                );
            }
            println!(
                "{within}/{} instances within {tolerance} relative gap; weak duality {}",
                cases.len(),
                if weak_duality { "holds" } else { "VIOLATED" }
            );
        }
        Command::ExportInstance { drop, output } => {
            let inst = Drop::generate(&config, drop)?.instance(&config, &config.partition)?;
            let path = match output {
                Some(p) => p,
                None => {
                    std::fs::create_dir_all(&config.out_dir)
                        .with_context(|| format!("creating {}", config.out_dir.display()))?;
                    config.out_dir.join(format!("instance_{drop}.txt"))
                }
            };
            instance::write_file(&path, &inst)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
