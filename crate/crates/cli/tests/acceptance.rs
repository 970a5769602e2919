//! The acceptance gate: one test per validation criterion, each printing
//! its pass/fail verdict line. These are the same suites `smoothflood
//! validate` runs.

use std::path::PathBuf;
use std::sync::OnceLock;

use smoothflood_cli::suites;

fn out_root() -> &'static PathBuf {
    static ROOT: OnceLock<PathBuf> = OnceLock::new();
    ROOT.get_or_init(|| {
        let dir = std::env::temp_dir().join(format!("smoothflood-acceptance-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    })
}

fn run(number: u32) {
    let report = suites::run_criterion(number, out_root()).unwrap();
    println!("{}", report.verdict_line());
    for c in &report.checks {
        let mark = if c.passed { "ok" } else { "FAIL" };
        println!("  [{mark}] {}: {}", c.label, c.detail);
    }
    assert!(report.passed(), "{}", report.verdict_line());
}

#[test]
fn criterion_01_sampler_exactness() {
    run(1);
}

#[test]
fn criterion_02_targeted_exactness() {
    run(2);
}

#[test]
fn criterion_03_zero_noise_baselines() {
    run(3);
}

#[test]
fn criterion_04_oblivious_fractional_scaling() {
    run(4);
}

#[test]
fn criterion_05_fractional_continuity() {
    run(5);
}

#[test]
fn criterion_06_adaptive_separation() {
    run(6);
}

#[test]
fn criterion_07_adaptive_growth_bound() {
    run(7);
}

#[test]
fn criterion_08_proportional_adaptive_lower_bound() {
    run(8);
}

#[test]
fn criterion_09_proportional_waiting_game() {
    run(9);
}

#[test]
fn criterion_10_targeted_upper_bound_probe() {
    run(10);
}

#[test]
fn criterion_11_targeted_lower_bound() {
    run(11);
}

#[test]
fn criterion_12_end_to_end_determinism() {
    run(12);
}
