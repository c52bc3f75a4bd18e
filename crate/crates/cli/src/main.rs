mod config;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use mecanum_ekf::experiments::{self, plot, RunOptions};
use mecanum_ekf::world_sim::{run_closed_loop, EstimatorMode, ScenarioConfig};

use config::RunConfig;

/// Mecanum robot localization: single runs and Monte Carlo experiments.
#[derive(Debug, Parser)]
#[command(name = "mecanum-ekf", version)]
struct Cli {
    /// TOML configuration file; absent keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trials per mode (experiments only).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for experiment trials [default: all processors].
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one trial and write its trace and trajectory plot.
    Simulate {
        #[arg(long, default_value = "fused_camera")]
        mode: EstimatorMode,
    },
    /// Run one of the Monte Carlo studies.
    Experiment {
        which: Which,
        /// Comma-separated filter steps for dt-sweep, seconds.
        #[arg(long, value_delimiter = ',')]
        dts: Option<Vec<f64>>,
    },
    /// Check a configuration file and print it with defaults filled in.
    ValidateConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Velocity,
    Camera,
    Cycle,
    DtSweep,
}

impl Which {
    fn default_trials(self) -> usize {
        match self {
            Which::Velocity | Which::Camera => 100,
            Which::Cycle => 10,
            Which::DtSweep => 30,
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    if let Some(trials) = cli.trials {
        config.trials = Some(trials);
    }
    if let Command::Experiment { dts: Some(dts), .. } = &cli.command {
        config.dts = dts.clone();
    }
    if let Command::Experiment { which: Which::Cycle, .. } = &cli.command {
        // The figure-seven course never returns to its start.
        if config.path == config::PathSpec::Named("figure7".into()) {
            config.path = config::PathSpec::Named("cycle".into());
        }
    }
    config.validate()?;
    if cli.jobs == Some(0) {
        bail!("--jobs must be at least 1");
    }

    match cli.command {
        Command::ValidateConfig => {
            print!("{}", config.to_toml());
            Ok(())
        }
        Command::Simulate { mode } => simulate(&config, mode),
        Command::Experiment { which, .. } => experiment(&config, which, cli.jobs),
    }
}

fn prepare_output(config: &RunConfig) -> Result<PathBuf> {
    let dir = config.output_dir.clone();
    fs::create_dir_all(&dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    write(&dir.join("effective_config.toml"), config.to_toml().as_bytes())?;
    Ok(dir)
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn write_csv<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> csv::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf).with_context(|| format!("cannot format {}", path.display()))?;
    write(path, &buf)
}

fn simulate(config: &RunConfig, mode: EstimatorMode) -> Result<()> {
    let scenario = config.scenario()?;
    let dir = prepare_output(config)?;
    let trace = run_closed_loop(&scenario, mode, config.seed)?;
    let stem = format!("trace_{mode}_seed{}", config.seed);
    write_csv(&dir.join(format!("{stem}.csv")), |buf| trace.write_csv(buf))?;
    let svg = plot::trajectory_svg(&trace, &scenario.field, &scenario.path);
    write(&dir.join(format!("trajectory_{mode}_seed{}.svg", config.seed)), svg.as_bytes())?;

    let report = experiments::rmse(&trace)?;
    println!("mode {mode}, seed {}: {:?} after {} ticks", config.seed, trace.outcome, report.n_ticks);
    for (name, value) in experiments::RMSE_COMPONENTS.iter().zip(report.components()) {
        println!("  {name:<6} rmse {value:.4}");
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn experiment(config: &RunConfig, which: Which, jobs: Option<usize>) -> Result<()> {
    let scenario = config.scenario()?;
    let opts = RunOptions {
        master_seed: config.seed,
        trials: config.trials.unwrap_or(which.default_trials()),
        jobs,
        seed_list: None,
    };
    let dir = prepare_output(config)?;
    match which {
        Which::Velocity | Which::Camera => {
            let (name, result) = if which == Which::Velocity {
                ("velocity", experiments::experiment_velocity_fusion(&scenario, &opts)?)
            } else {
                ("camera", experiments::experiment_camera_fusion(&scenario, &opts)?)
            };
            write_csv(&dir.join(format!("{name}_rmse.csv")), |b| experiments::write_rmse_long_csv(&result, b))?;
            write_csv(&dir.join(format!("{name}_summary.csv")), |b| experiments::write_summary_csv(&result, b))?;
            for summary in &result.summaries {
                trajectory(&dir, name, &scenario, summary.mode, result.seeds[0])?;
            }
            print!("{}", experiments::format_summary_table(&result));
        }
        Which::Cycle => {
            let result = experiments::experiment_cycle_drift(&scenario, config.cycles, &opts)?;
            write_csv(&dir.join("cycle_curve.csv"), |b| experiments::write_cycle_curve_csv(&result, b))?;
            write_csv(&dir.join("cycle_trials.csv"), |b| experiments::write_cycle_trials_csv(&result, b))?;
            write(&dir.join("cycle_drift.svg"), plot::cycle_drift_svg(&result).as_bytes())?;
            println!(
                "cycle experiment: {} trials, mean truth-to-warehouse error at each return (in)",
                result.seeds.len()
            );
            println!("{:<7}{:>22}{:>22}", "cycle", "fused", "fused_camera");
            for c in 0..result.cycles {
                print!("{:<7}", c + 1);
                for curve in &result.curves {
                    let p = &curve.points[c];
                    print!("{:>22}", format!("{:.3} ± {:.3}", p.target_mean, p.target_std_error));
                }
                println!();
            }
            println!("published: the camera-free error grows to about 20 in after 5 cycles; the camera curve stays flat");
            for w in &result.warnings {
                println!("warning: {w}");
            }
        }
        Which::DtSweep => {
            let result = experiments::experiment_dt_sweep(&scenario, &config.dts, &opts)?;
            write_csv(&dir.join("dt_sweep.csv"), |b| experiments::write_dt_curve_csv(&result, b))?;
            write_csv(&dir.join("dt_sweep_trials.csv"), |b| experiments::write_dt_trials_csv(&result, b))?;
            write(&dir.join("dt_sweep.svg"), plot::dt_sweep_svg(&result).as_bytes())?;
            println!("dt-sweep experiment: {} trials per step, fused_camera (x, y) RMSE (in)", result.seeds.len());
            println!("{:<10}{:>22}{:>10}", "filter_dt", "mean ± std error", "censored");
            for p in &result.points {
                println!(
                    "{:<10}{:>22}{:>10}",
                    p.filter_dt,
                    format!("{:.3} ± {:.3}", p.mean_xy_rmse, p.std_error),
                    p.censored
                );
            }
            println!("published: accuracy deteriorates as the step grows, by about an order of magnitude at 0.5 s");
        }
    }
    println!("wrote {}", dir.display());
    Ok(())
}

/// Trajectory overlay for the first trial of an experiment.
fn trajectory(dir: &Path, name: &str, scenario: &ScenarioConfig, mode: EstimatorMode, seed: u64) -> Result<()> {
    let trace = run_closed_loop(scenario, mode, seed)?;
    let svg = plot::trajectory_svg(&trace, &scenario.field, &scenario.path);
    write(&dir.join(format!("{name}_trajectory_{mode}.svg")), svg.as_bytes())
}
