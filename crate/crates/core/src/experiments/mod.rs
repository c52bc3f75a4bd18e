//! Monte Carlo localization studies.
//!
//! Every protocol runs independent closed-loop trials (in parallel when
//! asked to), keys the results by seed, and reduces them in sorted order so
//! that the output does not depend on thread count or seed-list order.

mod output;
pub mod plot;
pub mod reference;
mod rmse;

pub use output::{
    format_summary_table, write_cycle_curve_csv, write_cycle_trials_csv, write_dt_curve_csv, write_dt_trials_csv,
    write_rmse_long_csv, write_summary_csv,
};
pub use rmse::{rmse, RmseReport, RMSE_COMPONENTS};

use rayon::prelude::*;
use thiserror::Error;

use crate::world_sim::{
    derive_seed, run_closed_loop, EstimatorMode, ScenarioConfig, SimError, TrialOutcome, TrialTrace,
    DIVERGENCE_DIAGONALS,
};

/// Largest share of aborted trials per mode that is tolerated (and excluded).
pub const MAX_ABORTED_FRACTION: f64 = 0.05;

/// Warehouse returns closer than this to the path start count as returns.
const RETURN_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("cannot compute RMSE of an empty trace")]
    EmptyTrace,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{mode}: {failed} of {total} trials failed (limit is 5%)")]
    TooManyFailures {
        mode: EstimatorMode,
        failed: usize,
        total: usize,
    },
    #[error("invalid experiment options: {0}")]
    InvalidOptions(String),
}

/// Seeds and parallelism shared by every protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    pub master_seed: u64,
    pub trials: usize,
    /// Worker threads; `None` uses every available processor.
    pub jobs: Option<usize>,
    /// Explicit per-trial seeds, used instead of deriving them from the
    /// master seed.
    pub seed_list: Option<Vec<u64>>,
}

impl RunOptions {
    pub fn new(master_seed: u64, trials: usize) -> Self {
        Self {
            master_seed,
            trials,
            jobs: None,
            seed_list: None,
        }
    }

    pub fn with_seeds(seeds: Vec<u64>) -> Self {
        Self {
            master_seed: 0,
            trials: seeds.len(),
            jobs: None,
            seed_list: Some(seeds),
        }
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = Some(jobs);
        self
    }

    /// Per-trial seeds. They depend on the trial index only, so every mode
    /// sees the same noise realization for a given trial.
    pub fn seeds(&self) -> Vec<u64> {
        if let Some(list) = &self.seed_list {
            return list.clone();
        }
        (0..self.trials as u64).map(|i| derive_seed(self.master_seed, i)).collect()
    }
}

/// One trial's RMSE report.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub mode: EstimatorMode,
    pub seed: u64,
    pub report: RmseReport,
    pub outcome: TrialOutcome,
}

/// Mean and standard error of each RMSE component over the usable trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSummary {
    pub mode: EstimatorMode,
    pub mean: RmseReport,
    pub std_error: [f64; 7],
    pub trials_used: usize,
    /// Seeds of the trials that were excluded.
    pub excluded: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub name: &'static str,
    pub scenario: ScenarioConfig,
    pub seeds: Vec<u64>,
    pub summaries: Vec<ModeSummary>,
    /// Every trial, ordered by mode then seed.
    pub trials: Vec<TrialRecord>,
    pub warnings: Vec<String>,
}

impl ExperimentResult {
    pub fn summary(&self, mode: EstimatorMode) -> Option<&ModeSummary> {
        self.summaries.iter().find(|s| s.mode == mode)
    }
}

/// Mean and standard error of the mean. The standard error of a single
/// sample is zero.
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn validate(opts: &RunOptions) -> Result<(), ExperimentError> {
    if opts.seeds().is_empty() {
        return Err(ExperimentError::InvalidOptions("trials must be at least 1".into()));
    }
    if opts.jobs == Some(0) {
        return Err(ExperimentError::InvalidOptions("jobs must be at least 1".into()));
    }
    Ok(())
}

/// Runs `f` over every item, in parallel, keeping input order.
fn run_parallel<I, T, F>(jobs: Option<usize>, items: Vec<I>, f: F) -> Result<Vec<T>, ExperimentError>
where
    I: Send,
    T: Send,
    F: Fn(I) -> Result<T, ExperimentError> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| ExperimentError::InvalidOptions(format!("cannot start worker threads: {e}")))?;
    pool.install(|| items.into_par_iter().map(f).collect())
}

/// Excludes failed trials, or fails when more than 5% of a mode failed.
fn check_failures(
    mode: EstimatorMode,
    failed: &[u64],
    total: usize,
    warnings: &mut Vec<String>,
) -> Result<(), ExperimentError> {
    if failed.is_empty() {
        return Ok(());
    }
    if failed.len() as f64 > MAX_ABORTED_FRACTION * total as f64 {
        return Err(ExperimentError::TooManyFailures {
            mode,
            failed: failed.len(),
            total,
        });
    }
    warnings.push(format!(
        "{mode}: excluded {} of {total} trials that did not finish normally (seeds {failed:?})",
        failed.len()
    ));
    Ok(())
}

fn run_rmse_experiment(
    name: &'static str,
    scenario: &ScenarioConfig,
    modes: &[EstimatorMode],
    opts: &RunOptions,
) -> Result<ExperimentResult, ExperimentError> {
    validate(opts)?;
    scenario.validate()?;
    let seeds = opts.seeds();
    let work: Vec<(EstimatorMode, u64)> = modes.iter().flat_map(|&m| seeds.iter().map(move |&s| (m, s))).collect();
    let mut trials = run_parallel(opts.jobs, work, |(mode, seed)| {
        let trace = run_closed_loop(scenario, mode, seed)?;
        Ok(TrialRecord {
            mode,
            seed,
            report: rmse(&trace)?,
            outcome: trace.outcome,
        })
    })?;
    trials.sort_by_key(|t| (modes.iter().position(|m| *m == t.mode), t.seed));

    let mut warnings = Vec::new();
    let mut summaries = Vec::with_capacity(modes.len());
    for &mode in modes {
        let of_mode: Vec<&TrialRecord> = trials.iter().filter(|t| t.mode == mode).collect();
        let excluded: Vec<u64> = of_mode.iter().filter(|t| t.outcome.is_aborted()).map(|t| t.seed).collect();
        check_failures(mode, &excluded, of_mode.len(), &mut warnings)?;
        let used: Vec<&RmseReport> = of_mode.iter().filter(|t| !t.outcome.is_aborted()).map(|t| &t.report).collect();
        let mut means = [0.0; 7];
        let mut errors = [0.0; 7];
        for c in 0..7 {
            let values: Vec<f64> = used.iter().map(|r| r.components()[c]).collect();
            (means[c], errors[c]) = mean_and_std_error(&values);
        }
        let ticks = used.iter().map(|r| r.n_ticks).sum();
        summaries.push(ModeSummary {
            mode,
            mean: RmseReport::from_components(means, ticks),
            std_error: errors,
            trials_used: used.len(),
            excluded,
        });
    }

    Ok(ExperimentResult {
        name,
        scenario: scenario.clone(),
        seeds,
        summaries,
        trials,
        warnings,
    })
}

/// Model-only, odometry-only, and fused estimation on the same trials.
pub fn experiment_velocity_fusion(
    scenario: &ScenarioConfig,
    opts: &RunOptions,
) -> Result<ExperimentResult, ExperimentError> {
    run_rmse_experiment(
        "velocity",
        scenario,
        &[EstimatorMode::Model, EstimatorMode::Odo, EstimatorMode::Fused],
        opts,
    )
}

/// Fused estimation with and without landmark detections.
pub fn experiment_camera_fusion(
    scenario: &ScenarioConfig,
    opts: &RunOptions,
) -> Result<ExperimentResult, ExperimentError> {
    run_rmse_experiment("camera", scenario, &[EstimatorMode::Fused, EstimatorMode::FusedCamera], opts)
}

/// Position errors at one warehouse return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnError {
    /// Truth to the warehouse waypoint.
    pub to_target: f64,
    /// Truth to the estimate.
    pub to_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleTrial {
    pub mode: EstimatorMode,
    pub seed: u64,
    pub returns: Vec<ReturnError>,
    pub outcome: TrialOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclePoint {
    /// 1-based cycle number.
    pub cycle: usize,
    pub target_mean: f64,
    pub target_std_error: f64,
    pub estimate_mean: f64,
    pub estimate_std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleCurve {
    pub mode: EstimatorMode,
    pub points: Vec<CyclePoint>,
    pub trials_used: usize,
    pub excluded: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleDriftResult {
    pub scenario: ScenarioConfig,
    pub seeds: Vec<u64>,
    pub cycles: usize,
    pub curves: Vec<CycleCurve>,
    pub trials: Vec<CycleTrial>,
    pub warnings: Vec<String>,
}

impl CycleDriftResult {
    pub fn curve(&self, mode: EstimatorMode) -> Option<&CycleCurve> {
        self.curves.iter().find(|c| c.mode == mode)
    }
}

/// Errors at each arrival back at the path start.
pub fn warehouse_returns(trace: &TrialTrace, start: (f64, f64)) -> Vec<ReturnError> {
    trace
        .arrivals
        .iter()
        .filter(|a| (a.target.0 - start.0).hypot(a.target.1 - start.1) <= RETURN_MATCH_TOL)
        .map(|a| ReturnError {
            to_target: a.truth_to_target(),
            to_estimate: a.truth_to_estimate(),
        })
        .collect()
}

/// Repeated warehouse round trips with and without landmark detections.
///
/// The scenario path must return to its start at least `cycles` times (see
/// [`ScenarioConfig::cycle`]). A trial that does not make every return is
/// treated like an aborted one.
pub fn experiment_cycle_drift(
    scenario: &ScenarioConfig,
    cycles: usize,
    opts: &RunOptions,
) -> Result<CycleDriftResult, ExperimentError> {
    validate(opts)?;
    scenario.validate()?;
    if cycles == 0 {
        return Err(ExperimentError::InvalidOptions("cycles must be at least 1".into()));
    }
    let start = scenario.path.start();
    let start = (start.x, start.y);
    let modes = [EstimatorMode::Fused, EstimatorMode::FusedCamera];
    let seeds = opts.seeds();
    let work: Vec<(EstimatorMode, u64)> = modes.iter().flat_map(|&m| seeds.iter().map(move |&s| (m, s))).collect();
    let mut trials = run_parallel(opts.jobs, work, |(mode, seed)| {
        let trace = run_closed_loop(scenario, mode, seed)?;
        Ok(CycleTrial {
            mode,
            seed,
            returns: warehouse_returns(&trace, start),
            outcome: trace.outcome,
        })
    })?;
    trials.sort_by_key(|t| (t.mode, t.seed));

    let mut warnings = Vec::new();
    let mut curves = Vec::new();
    for mode in modes {
        let of_mode: Vec<&CycleTrial> = trials.iter().filter(|t| t.mode == mode).collect();
        let (used, failed): (Vec<&CycleTrial>, Vec<&CycleTrial>) =
            of_mode.iter().partition(|t| t.returns.len() >= cycles && !t.outcome.is_aborted());
        let excluded: Vec<u64> = failed.iter().map(|t| t.seed).collect();
        check_failures(mode, &excluded, of_mode.len(), &mut warnings)?;
        let points = (0..cycles)
            .map(|c| {
                let to_target: Vec<f64> = used.iter().map(|t| t.returns[c].to_target).collect();
                let to_estimate: Vec<f64> = used.iter().map(|t| t.returns[c].to_estimate).collect();
                let (target_mean, target_std_error) = mean_and_std_error(&to_target);
                let (estimate_mean, estimate_std_error) = mean_and_std_error(&to_estimate);
                CyclePoint {
                    cycle: c + 1,
                    target_mean,
                    target_std_error,
                    estimate_mean,
                    estimate_std_error,
                }
            })
            .collect();
        curves.push(CycleCurve {
            mode,
            points,
            trials_used: used.len(),
            excluded,
        });
    }

    Ok(CycleDriftResult {
        scenario: scenario.clone(),
        seeds,
        cycles,
        curves,
        trials,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtTrial {
    pub filter_dt: f64,
    pub seed: u64,
    /// Position RMSE, or the divergence threshold when `censored`.
    pub xy_rmse: f64,
    pub censored: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtPoint {
    pub filter_dt: f64,
    pub mean_xy_rmse: f64,
    pub std_error: f64,
    pub trials: usize,
    pub censored: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DtSweepResult {
    pub scenario: ScenarioConfig,
    pub seeds: Vec<u64>,
    pub points: Vec<DtPoint>,
    pub trials: Vec<DtTrial>,
}

pub const DEFAULT_SWEEP_DTS: [f64; 6] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5];

/// Camera-fused position accuracy as a function of the filter step.
///
/// Diverged trials are kept at the divergence threshold instead of being
/// dropped, since dropping them would flatter the large steps.
pub fn experiment_dt_sweep(
    scenario: &ScenarioConfig,
    dts: &[f64],
    opts: &RunOptions,
) -> Result<DtSweepResult, ExperimentError> {
    validate(opts)?;
    if dts.is_empty() {
        return Err(ExperimentError::InvalidOptions("at least one filter_dt is required".into()));
    }
    let scenarios = dts
        .iter()
        .map(|&dt| {
            let mut s = scenario.clone();
            s.clock.filter_dt = dt;
            s.validate().map(|_| s)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let seeds = opts.seeds();
    let guard = DIVERGENCE_DIAGONALS * scenario.field.diagonal();
    let work: Vec<(usize, u64)> = (0..dts.len()).flat_map(|i| seeds.iter().map(move |&s| (i, s))).collect();
    let mut trials = run_parallel(opts.jobs, work, |(i, seed)| {
        let trace = run_closed_loop(&scenarios[i], EstimatorMode::FusedCamera, seed)?;
        let censored = trace.outcome.is_aborted();
        let xy_rmse = if censored { guard } else { rmse(&trace)?.xy_rmse };
        Ok((i, DtTrial {
            filter_dt: dts[i],
            seed,
            xy_rmse,
            censored,
        }))
    })?;
    trials.sort_by_key(|(i, t)| (*i, t.seed));

    let points = (0..dts.len())
        .map(|i| {
            let values: Vec<f64> = trials.iter().filter(|(j, _)| *j == i).map(|(_, t)| t.xy_rmse).collect();
            let (mean_xy_rmse, std_error) = mean_and_std_error(&values);
            DtPoint {
                filter_dt: dts[i],
                mean_xy_rmse,
                std_error,
                trials: values.len(),
                censored: trials.iter().filter(|(j, t)| *j == i && t.censored).count(),
            }
        })
        .collect();

    Ok(DtSweepResult {
        scenario: scenario.clone(),
        seeds,
        points,
        trials: trials.into_iter().map(|(_, t)| t).collect(),
    })
}
