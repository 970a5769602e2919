//! Executes an experiment grid: trials fan out over a bounded worker
//! pool, summaries merge in a deterministic order, CSV/JSONL files are
//! written with a frozen, versioned schema.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smoothflood_core::engine::{run_trial, TrialRecord};

use crate::config::{Cell, ExperimentConfig, FitAxis};
use crate::stats::{self, LogLogFit};

pub const SUMMARY_SCHEMA: &str = "# smoothflood summary v1";
pub const FITS_SCHEMA: &str = "# smoothflood fits v1";

/// Per-trial row, as written to trials.jsonl. Carries enough to
/// recompute every summary column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub cell: String,
    pub trial: u64,
    pub seed: u64,
    pub flooding_time: Option<u64>,
    pub rounds: u64,
    pub total_noise: u64,
    pub total_rejections: u64,
    /// Extremes of the adversary's proposed churn over rounds >= 2
    /// (round 1 has churn 0 by convention); absent for 1-round trials.
    pub churn_min_after_first: Option<u64>,
    pub churn_max_after_first: Option<u64>,
}

impl TrialSummary {
    pub fn from_record(cell: &Cell, seed: u64, record: &TrialRecord) -> Self {
        let late = record.rounds.iter().filter(|r| r.round >= 2);
        let churn_min = late.clone().map(|r| r.proposed_churn).min();
        let churn_max = late.map(|r| r.proposed_churn).max();
        TrialSummary {
            cell: cell.key(),
            trial: record.trial,
            seed,
            flooding_time: record.flooding_time,
            rounds: record.rounds.len() as u64,
            total_noise: record.rounds.iter().map(|r| r.noise_magnitude).sum(),
            total_rejections: record.rounds.iter().map(|r| r.rejections).sum(),
            churn_min_after_first: churn_min,
            churn_max_after_first: churn_max,
        }
    }
}

/// One summary.csv row.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub cell: Cell,
    pub trials: u64,
    pub completed: u64,
    pub capped_fraction: f64,
    pub ft_min: Option<u64>,
    pub ft_median: Option<f64>,
    pub ft_mean: Option<f64>,
    pub ft_p90: Option<u64>,
    pub ft_max: Option<u64>,
    pub mean_noise_per_round: f64,
    pub mean_rejections_per_round: f64,
}

impl CellSummary {
    pub fn from_trials(cell: &Cell, rows: &[TrialSummary]) -> Self {
        let finished: Vec<u64> = rows.iter().filter_map(|r| r.flooding_time).collect();
        let total_rounds: u64 = rows.iter().map(|r| r.rounds).sum();
        let per_round = |total: u64| {
            if total_rounds == 0 {
                0.0
            } else {
                total as f64 / total_rounds as f64
            }
        };
        CellSummary {
            cell: cell.clone(),
            trials: rows.len() as u64,
            completed: finished.len() as u64,
            capped_fraction: (rows.len() - finished.len()) as f64 / rows.len() as f64,
            ft_min: finished.iter().min().copied(),
            ft_median: (!finished.is_empty()).then(|| stats::median(&finished)),
            ft_mean: (!finished.is_empty()).then(|| stats::mean(&finished)),
            ft_p90: (!finished.is_empty()).then(|| stats::quantile(&finished, 0.9)),
            ft_max: finished.iter().max().copied(),
            mean_noise_per_round: per_round(rows.iter().map(|r| r.total_noise).sum()),
            mean_rejections_per_round: per_round(rows.iter().map(|r| r.total_rejections).sum()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitRow {
    pub axis: FitAxis,
    pub group: String,
    pub fit: LogLogFit,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub summaries: Vec<CellSummary>,
    pub trial_rows: Vec<TrialSummary>,
    pub fits: Vec<FitRow>,
}

/// Full per-round records for one cell; used where summary rows are not
/// enough (trace-level invariant checks).
pub fn run_cell_records(
    cell: &Cell,
    base_seed: u64,
    trials: u64,
    max_rounds: u64,
) -> Result<Vec<TrialRecord>> {
    let seed = cell.seed(base_seed);
    (0..trials)
        .map(|trial| {
            let mut adversary = cell.adversary.build(cell.n, &cell.model)?;
            Ok(run_trial(adversary.as_mut(), &cell.model, max_rounds, seed, trial)?)
        })
        .collect()
}

/// Runs every (cell, trial) pair, in parallel when the pool allows, and
/// merges in grid order so the output is independent of scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let cells: Vec<Cell> = config.cells().collect();
    let jobs: Vec<(usize, u64)> = cells
        .iter()
        .enumerate()
        .flat_map(|(i, _)| (0..config.trials).map(move |t| (i, t)))
        .collect();

    let trial_rows: Vec<TrialSummary> = jobs
        .par_iter()
        .map(|&(cell_idx, trial)| {
            let cell = &cells[cell_idx];
            let seed = cell.seed(config.base_seed);
            let mut adversary = cell
                .adversary
                .build(cell.n, &cell.model)
                .map_err(|e| anyhow::anyhow!("cell {}: {e}", cell.key()))?;
            let record = run_trial(
                adversary.as_mut(),
                &cell.model,
                config.max_rounds_for(cell.n),
                seed,
                trial,
            )
            .map_err(|e| anyhow::anyhow!("cell {} trial {trial}: {e}", cell.key()))?;
            Ok(TrialSummary::from_record(cell, seed, &record))
        })
        .collect::<Result<_>>()?;

    let summaries: Vec<CellSummary> = cells
        .iter()
        .enumerate()
        .map(|(i, cell)| {
            let rows = &trial_rows[i * config.trials as usize..(i + 1) * config.trials as usize];
            CellSummary::from_trials(cell, rows)
        })
        .collect();

    let fits = compute_fits(config, &summaries);
    Ok(ExperimentResult { summaries, trial_rows, fits })
}

/// Fits requested in the config, one per (axis, group) with at least 3
/// uncensored cells on distinct axis values. Cells with any capped
/// trial are excluded: their medians are right-censored.
fn compute_fits(config: &ExperimentConfig, summaries: &[CellSummary]) -> Vec<FitRow> {
    let mut fits = Vec::new();
    for &axis in &config.fits {
        let mut groups: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for s in summaries {
            let (Some(x), Some(median)) = (s.cell.axis_value(axis), s.ft_median) else {
                continue;
            };
            if s.capped_fraction > 0.0 {
                continue;
            }
            let group = s.cell.axis_group(axis);
            match groups.iter_mut().find(|(g, _)| *g == group) {
                Some((_, pts)) => pts.push((x, median)),
                None => groups.push((group, vec![(x, median)])),
            }
        }
        for (group, points) in groups {
            if let Ok(fit) = stats::loglog_fit(&points) {
                fits.push(FitRow { axis, group, fit });
            }
        }
    }
    fits
}

fn opt_u64(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn summary_csv(name: &str, summaries: &[CellSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SUMMARY_SCHEMA}");
    let _ = writeln!(
        out,
        "name,n,model,adversary,trials,completed,capped_fraction,ft_min,ft_median,ft_mean,ft_p90,ft_max,mean_noise_per_round,mean_rejections_per_round"
    );
    for s in summaries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            name,
            s.cell.n,
            s.cell.model_label(),
            s.cell.adversary_label(),
            s.trials,
            s.completed,
            s.capped_fraction,
            opt_u64(s.ft_min),
            opt_f64(s.ft_median),
            opt_f64(s.ft_mean),
            opt_u64(s.ft_p90),
            opt_u64(s.ft_max),
            s.mean_noise_per_round,
            s.mean_rejections_per_round,
        );
    }
    out
}

pub fn fits_csv(name: &str, fits: &[FitRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FITS_SCHEMA}");
    let _ = writeln!(out, "name,axis,group,cells,exponent,stderr,residual_rms");
    for row in fits {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            name,
            row.axis.label(),
            row.group,
            row.fit.cells,
            row.fit.exponent,
            row.fit.stderr,
            row.fit.residual_rms,
        );
    }
    out
}

/// Writes summary.csv, fits.csv (when fits were requested), and
/// trials.jsonl (when enabled) under the config's output directory.
pub fn write_outputs(config: &ExperimentConfig, result: &ExperimentResult) -> Result<()> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_atomic(&dir.join("summary.csv"), summary_csv(&config.name, &result.summaries))?;
    if !config.fits.is_empty() {
        write_atomic(&dir.join("fits.csv"), fits_csv(&config.name, &result.fits))?;
    }
    if config.emit_trials {
        let mut out = String::new();
        for row in &result.trial_rows {
            let _ = writeln!(out, "{}", serde_json::to_string(row)?);
        }
        write_atomic(&dir.join("trials.jsonl"), out)?;
    }
    Ok(())
}

fn write_atomic(path: &Path, contents: String) -> Result<()> {
    let mut f =
        fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}

/// Builds a worker pool honoring the `--workers` flag or the
/// SMOOTHFLOOD_WORKERS environment variable, flag winning.
pub fn build_pool(workers_flag: Option<usize>) -> Result<rayon::ThreadPool> {
    let workers = workers_flag.or_else(|| {
        std::env::var("SMOOTHFLOOD_WORKERS").ok().and_then(|v| v.parse().ok())
    });
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    Ok(builder.build()?)
}
