//! Batch driver: configuration, subcommand dispatch and run manifests.

pub mod config;
pub mod error;
pub mod report;
pub mod suites;

use std::fs;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub use config::{RunConfig, Subcommand, KEYS};
pub use error::{CliError, Result};
pub use report::{write_checks_csv, CheckResult, Report, Status, MANIFEST_NAME};

pub const THREADS_ENV: &str = "ANISOMHD_THREADS";

/// Sizes the global thread pool from `ANISOMHD_THREADS`, if set. Must run
/// before any parallel work.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Threads(format!("expected a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Threads(e.to_string()))
}

pub struct RunOutcome {
    pub report: Report,
    pub manifest: PathBuf,
    pub wall_seconds: f64,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Runs the configured subcommand and writes its CSVs, `checks.csv` and the
/// manifest into `cfg.out`.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out)?;
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let mut report = Report::default();
    match cfg.subcommand {
        Subcommand::KernelAudit => suites::kernel_audit(cfg, &mut report)?,
        Subcommand::LinearDecay => suites::linear_decay(cfg, &mut report)?,
        Subcommand::NonlinearRun => suites::nonlinear_run(cfg, &mut report)?,
        Subcommand::InequalitySuite => suites::inequality_suite(cfg, &mut report)?,
    }
    let results = report.results.clone();
    report.write_file(&cfg.out, "checks.csv", |w| write_checks_csv(w, &results))?;
    let wall_seconds = clock.elapsed().as_secs_f64();
    let manifest = report::write_manifest(cfg, &report, started_unix, wall_seconds)?;
    Ok(RunOutcome {
        report,
        manifest,
        wall_seconds,
    })
}
