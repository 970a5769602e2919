use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand};
use smoothflood_cli::config::ExperimentConfig;
use smoothflood_cli::{runner, suites};
use smoothflood_core::adversary::AdversaryKind;
use smoothflood_core::smoothing::SmoothingModel;

#[derive(Parser)]
#[command(name = "smoothflood", about = "Flooding experiments on smoothed dynamic networks")]
struct Cli {
    /// Worker threads; defaults to SMOOTHFLOOD_WORKERS or all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single experiment config and write summary outputs.
    Run { config: PathBuf },
    /// Run a config grid and additionally compute the requested scaling fits.
    Sweep { config: PathBuf },
    /// Run the validation suites (all of them, or one by number or name).
    Validate {
        #[arg(long)]
        suite: Option<String>,
        /// Directory the suites write their experiment outputs under.
        #[arg(long, default_value = "validate-out")]
        out: PathBuf,
    },
    /// Print an adversary's proposed graph at a given round as an edge list.
    SampleDebug {
        /// Adversary kind: a bare name (spooling, adaptive_spooling,
        /// low_churn_spooling) or a JSON value such as
        /// '{"cassette": {"c": 2.0}}' or '{"star_recenter": {"period": 1}}'.
        #[arg(long)]
        adversary: String,
        #[arg(long)]
        round: u64,
        #[arg(long, default_value_t = 16)]
        n: usize,
        /// Targeted-model epsilon; only consulted by the cassette graph.
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let pool = runner::build_pool(cli.workers)?;
    match cli.command {
        Command::Run { config } | Command::Sweep { config } => {
            let config = ExperimentConfig::from_file(&config)?;
            let result = pool.install(|| runner::run_experiment(&config))?;
            runner::write_outputs(&config, &result)?;
            for s in &result.summaries {
                println!(
                    "{}: trials {}, median {}, capped {:.1}%",
                    s.cell.key(),
                    s.trials,
                    s.ft_median.map_or("-".into(), |m| m.to_string()),
                    100.0 * s.capped_fraction
                );
            }
            for f in &result.fits {
                println!(
                    "fit {} [{}]: exponent {:.4} (stderr {:.4}, {} cells)",
                    f.axis.label(),
                    f.group,
                    f.fit.exponent,
                    f.fit.stderr,
                    f.fit.cells
                );
            }
            println!("outputs written to {}", config.output_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { suite, out } => {
            let numbers: Vec<u32> = match &suite {
                None => suites::SUITES.iter().map(|(n, _)| *n).collect(),
                Some(sel) => {
                    let found = suites::SUITES
                        .iter()
                        .find(|(n, name)| sel == &n.to_string() || sel == name)
                        .map(|(n, _)| *n)
                        .ok_or_else(|| anyhow!("unknown suite {sel:?}"))?;
                    vec![found]
                }
            };
            let mut all_passed = true;
            for number in numbers {
                let report = pool.install(|| suites::run_criterion(number, &out))?;
                println!("{}", report.verdict_line());
                for c in &report.checks {
                    let mark = if c.passed { "ok" } else { "FAIL" };
                    println!("  [{mark}] {}: {}", c.label, c.detail);
                }
                all_passed &= report.passed();
            }
            Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::SampleDebug { adversary, round, n, epsilon } => {
            let kind: AdversaryKind = match serde_json::from_str(&adversary) {
                Ok(k) => k,
                Err(_) => serde_json::from_value(serde_json::Value::String(adversary.clone()))
                    .map_err(|_| anyhow!("unrecognized adversary {adversary:?}"))?,
            };
            let model = match kind {
                AdversaryKind::Cassette { .. } => SmoothingModel::Targeted { epsilon },
                AdversaryKind::LowChurnSpooling => {
                    SmoothingModel::Proportional { epsilon: 0.2, cap: 1.max(n as u64 / 16) }
                }
                _ => SmoothingModel::KSmooth { k: 0.0 },
            };
            let mut adv = kind.build(n, &model)?;
            let g = suites::debug_proposal(adv.as_mut(), round)?;
            print!("{}", g.to_edge_list());
            Ok(ExitCode::SUCCESS)
        }
    }
}
