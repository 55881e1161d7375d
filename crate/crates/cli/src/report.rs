use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// A hard check that failed; decides the exit status.
    Fail,
    /// A soft check past its threshold. Reported only.
    Flag,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub metric: f64,
    pub threshold: f64,
    pub hard: bool,
}

impl CheckResult {
    /// Passes iff `metric ≤ threshold`; NaN fails.
    pub fn at_most(name: impl Into<String>, metric: f64, threshold: f64) -> Self {
        Self::from_flag(name, metric, threshold, metric <= threshold)
    }

    pub fn from_flag(name: impl Into<String>, metric: f64, threshold: f64, passed: bool) -> Self {
        Self {
            name: name.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            metric,
            threshold,
            hard: true,
        }
    }

    pub fn soft(mut self) -> Self {
        self.hard = false;
        if self.status == Status::Fail {
            self.status = Status::Flag;
        }
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

/// Collected artifacts of one subcommand.
#[derive(Debug, Default)]
pub struct Report {
    pub results: Vec<CheckResult>,
    pub outputs: Vec<String>,
}

impl Report {
    pub fn push(&mut self, r: CheckResult) {
        self.results.push(r);
    }

    /// Writes `name` under `dir` from an in-memory buffer and records it.
    pub fn write_file(
        &mut self,
        dir: &Path,
        name: &str,
        body: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    ) -> Result<()> {
        let mut buf = Vec::new();
        body(&mut buf)?;
        fs::write(dir.join(name), buf)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn failures(&self) -> Vec<&str> {
        self.results.iter().filter(|r| r.failed()).map(|r| r.name.as_str()).collect()
    }

    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| !r.failed())
    }
}

#[derive(Serialize)]
struct Versions {
    anisomhd: &'static str,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a RunConfig,
    versions: Versions,
    threads: usize,
    results: &'a [CheckResult],
    failures: Vec<&'a str>,
    outputs: &'a [String],
    started_unix: u64,
    wall_seconds: f64,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Writes `manifest.json`. Timing fields live only here so the CSVs stay
/// reproducible.
pub fn write_manifest(cfg: &RunConfig, report: &Report, started_unix: u64, wall_seconds: f64) -> Result<PathBuf> {
    let m = Manifest {
        config: cfg,
        versions: Versions {
            anisomhd: env!("CARGO_PKG_VERSION"),
        },
        threads: rayon::current_num_threads(),
        results: &report.results,
        failures: report.failures(),
        outputs: &report.outputs,
        started_unix,
        wall_seconds,
    };
    let path = cfg.out.join(MANIFEST_NAME);
    let mut f = fs::File::create(&path)?;
    serde_json::to_writer_pretty(&mut f, &m)?;
    writeln!(f)?;
    Ok(path)
}

/// `name,status,metric,threshold,hard`.
pub fn write_checks_csv<W: Write>(mut w: W, results: &[CheckResult]) -> std::io::Result<()> {
    writeln!(w, "name,status,metric,threshold,hard")?;
    for r in results {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Flag => "flag",
        };
        writeln!(w, "{},{},{},{},{}", r.name, status, r.metric, r.threshold, r.hard)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_rules() {
        assert_eq!(CheckResult::at_most("a", 1.0, 1.0).status, Status::Pass);
        assert_eq!(CheckResult::at_most("a", f64::NAN, 1.0).status, Status::Fail);
        let s = CheckResult::at_most("a", 2.0, 1.0).soft();
        assert_eq!((s.status, s.hard), (Status::Flag, false));
        let mut r = Report::default();
        r.push(s);
        assert!(r.passed());
        r.push(CheckResult::at_most("b", 2.0, 1.0));
        assert_eq!(r.failures(), vec!["b"]);
    }
}
