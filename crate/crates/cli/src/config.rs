//! Run configuration: a flat `key = value` table with dotted section
//! prefixes. Values are layered defaults, then file, then flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anisomhd::propagator::{CatalogEntry, QuadraturePreset};
use serde::{Serialize, Serializer};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    KernelAudit,
    LinearDecay,
    NonlinearRun,
    InequalitySuite,
}

impl Subcommand {
    pub const ALL: [Subcommand; 4] = [
        Subcommand::KernelAudit,
        Subcommand::LinearDecay,
        Subcommand::NonlinearRun,
        Subcommand::InequalitySuite,
    ];

    /// Command-line spelling.
    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::KernelAudit => "kernel-audit",
            Subcommand::LinearDecay => "linear-decay",
            Subcommand::NonlinearRun => "nonlinear-run",
            Subcommand::InequalitySuite => "inequality-suite",
        }
    }

    /// Accepts both `kernel-audit` and `kernel_audit`.
    pub fn from_name(s: &str) -> Option<Self> {
        let s = s.replace('_', "-");
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn ser_quadrature<S: Serializer>(q: &QuadraturePreset, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(q.name())
}

fn ser_catalog<S: Serializer>(c: &[CatalogEntry], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(c.iter().map(|e| e.label()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub seed: u64,
    pub out: PathBuf,
    pub mu: f64,
    pub eta: f64,
    /// Modes per axis of the periodic solver grid.
    pub grid: usize,
    pub dt: f64,
    pub t_final: f64,
    /// Target `H³` norm of the random initial state.
    pub amplitude: f64,
    pub slope: f64,
    #[serde(serialize_with = "ser_quadrature")]
    pub quadrature: QuadraturePreset,
    pub fit_window: (f64, f64),
    #[serde(serialize_with = "ser_catalog")]
    pub catalog: Vec<CatalogEntry>,
    pub oracle_samples: usize,
    /// Accepted samples per domain tag.
    pub bound_samples: usize,
    pub agmon_samples: usize,
    pub field_grid: usize,
    pub field_samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            subcommand: Subcommand::KernelAudit,
            seed: 42,
            out: PathBuf::from("out"),
            mu: 1.0,
            eta: 1.0,
            grid: 32,
            dt: 1e-3,
            t_final: 1.0,
            amplitude: 1e-3,
            slope: 6.0,
            quadrature: QuadraturePreset::LogGraded,
            fit_window: (50.0, 2000.0),
            catalog: CatalogEntry::ALL.to_vec(),
            oracle_samples: 10_000,
            bound_samples: 100_000,
            agmon_samples: 1000,
            field_grid: 64,
            field_samples: 12,
        }
    }
}

/// Every accepted key, in canonical order, with its documentation.
pub const KEYS: [(&str, &str); 19] = [
    ("run.subcommand", "kernel-audit | linear-decay | nonlinear-run | inequality-suite"),
    ("run.seed", "64-bit seed shared by every random generator (42)"),
    ("run.out", "output directory (out)"),
    ("physics.mu", "viscosity, > 0 (1)"),
    ("physics.eta", "magnetic diffusivity, > 0 (1)"),
    ("solver.grid", "modes per axis, even and >= 4 (32)"),
    ("solver.dt", "time step, > 0 (0.001)"),
    ("solver.t_final", "final time, an integer multiple of dt (1)"),
    ("solver.amplitude", "H3 norm of the initial state, >= 0 (0.001)"),
    ("solver.slope", "spectral slope of the initial state (6)"),
    ("decay.quadrature", "log_graded | log_graded_fine | uniform_geometric"),
    ("decay.t_min", "start of the fit window (50)"),
    ("decay.t_max", "end of the fit window (2000)"),
    ("decay.catalog", "comma-separated catalog labels (all)"),
    ("audit.oracle_samples", "kernel samples compared with the oracle (10000)"),
    ("audit.bound_samples", "accepted samples per domain tag (100000)"),
    ("inequality.agmon_samples", "random 1D samples (1000)"),
    ("inequality.field_grid", "points per axis of the 3D sample box, even (64)"),
    ("inequality.field_samples", "random 3D fields (12)"),
];

fn parse<T: FromStr>(key: &str, value: &str, expected: &'static str) -> Result<T> {
    value.parse().map_err(|_| CliError::TypeMismatch {
        key: key.to_string(),
        value: value.to_string(),
        expected,
    })
}

fn constraint(key: &str, reason: impl Into<String>) -> CliError {
    CliError::Constraint {
        key: key.to_string(),
        reason: reason.into(),
    }
}

impl RunConfig {
    /// Sets one key from its text form. Constraints that involve several
    /// keys are checked by [`RunConfig::validate`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "run.subcommand" => {
                self.subcommand = Subcommand::from_name(v).ok_or_else(|| CliError::TypeMismatch {
                    key: key.to_string(),
                    value: v.to_string(),
                    expected: "a subcommand name",
                })?
            }
            "run.seed" => self.seed = parse(key, v, "an unsigned 64-bit integer")?,
            "run.out" => self.out = PathBuf::from(v),
            "physics.mu" => self.mu = parse(key, v, "a real number")?,
            "physics.eta" => self.eta = parse(key, v, "a real number")?,
            "solver.grid" => self.grid = parse(key, v, "a positive integer")?,
            "solver.dt" => self.dt = parse(key, v, "a real number")?,
            "solver.t_final" => self.t_final = parse(key, v, "a real number")?,
            "solver.amplitude" => self.amplitude = parse(key, v, "a real number")?,
            "solver.slope" => self.slope = parse(key, v, "a real number")?,
            "decay.quadrature" => {
                self.quadrature = QuadraturePreset::from_name(v).ok_or_else(|| CliError::TypeMismatch {
                    key: key.to_string(),
                    value: v.to_string(),
                    expected: "a quadrature preset name",
                })?
            }
            "decay.t_min" => self.fit_window.0 = parse(key, v, "a real number")?,
            "decay.t_max" => self.fit_window.1 = parse(key, v, "a real number")?,
            "decay.catalog" => {
                self.catalog = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        CatalogEntry::from_label(s).ok_or_else(|| CliError::TypeMismatch {
                            key: key.to_string(),
                            value: s.to_string(),
                            expected: "a catalog label",
                        })
                    })
                    .collect::<Result<_>>()?
            }
            "audit.oracle_samples" => self.oracle_samples = parse(key, v, "a positive integer")?,
            "audit.bound_samples" => self.bound_samples = parse(key, v, "a positive integer")?,
            "inequality.agmon_samples" => self.agmon_samples = parse(key, v, "a positive integer")?,
            "inequality.field_grid" => self.field_grid = parse(key, v, "a positive integer")?,
            "inequality.field_samples" => self.field_samples = parse(key, v, "a positive integer")?,
            _ => return Err(CliError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Applies a `key = value` document. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| CliError::Syntax {
                line: n + 1,
                text: raw.to_string(),
            })?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(constraint(key, format!("must be finite and > 0, got {v}")))
            }
        };
        positive("physics.mu", self.mu)?;
        positive("physics.eta", self.eta)?;
        positive("solver.dt", self.dt)?;
        positive("solver.t_final", self.t_final)?;
        if self.grid < 4 || self.grid % 2 != 0 {
            return Err(constraint("solver.grid", format!("must be even and >= 4, got {}", self.grid)));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(constraint("solver.amplitude", format!("must be >= 0, got {}", self.amplitude)));
        }
        if !self.slope.is_finite() {
            return Err(constraint("solver.slope", "must be finite"));
        }
        let steps = (self.t_final / self.dt).round();
        if steps < 1.0 || (steps * self.dt - self.t_final).abs() > 1e-9 * self.t_final {
            return Err(constraint("solver.t_final", "must be a positive integer multiple of solver.dt"));
        }
        let (lo, hi) = self.fit_window;
        positive("decay.t_min", lo)?;
        if !(hi.is_finite() && hi > lo) {
            return Err(constraint("decay.t_max", format!("must exceed decay.t_min, got {hi}")));
        }
        if self.catalog.is_empty() {
            return Err(constraint("decay.catalog", "must name at least one entry"));
        }
        for (key, v) in [
            ("audit.oracle_samples", self.oracle_samples),
            ("audit.bound_samples", self.bound_samples),
            ("inequality.agmon_samples", self.agmon_samples),
            ("inequality.field_samples", self.field_samples),
        ] {
            if v == 0 {
                return Err(constraint(key, "must be positive"));
            }
        }
        if self.field_grid < 8 || self.field_grid % 2 != 0 {
            return Err(constraint(
                "inequality.field_grid",
                format!("must be even and >= 8, got {}", self.field_grid),
            ));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    /// Defaults, then `file_text`, then `flags`, then validation.
    pub fn resolve(subcommand: Subcommand, file_text: Option<&str>, flags: &[(String, String)]) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(text) = file_text {
            cfg.apply_text(text)?;
        }
        cfg.subcommand = subcommand;
        for (k, v) in flags {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn value_of(&self, key: &str) -> String {
        match key {
            "run.subcommand" => self.subcommand.name().to_string(),
            "run.seed" => self.seed.to_string(),
            "run.out" => self.out.display().to_string(),
            "physics.mu" => self.mu.to_string(),
            "physics.eta" => self.eta.to_string(),
            "solver.grid" => self.grid.to_string(),
            "solver.dt" => self.dt.to_string(),
            "solver.t_final" => self.t_final.to_string(),
            "solver.amplitude" => self.amplitude.to_string(),
            "solver.slope" => self.slope.to_string(),
            "decay.quadrature" => self.quadrature.name().to_string(),
            "decay.t_min" => self.fit_window.0.to_string(),
            "decay.t_max" => self.fit_window.1.to_string(),
            "decay.catalog" => self.catalog.iter().map(|e| e.label()).collect::<Vec<_>>().join(","),
            "audit.oracle_samples" => self.oracle_samples.to_string(),
            "audit.bound_samples" => self.bound_samples.to_string(),
            "inequality.agmon_samples" => self.agmon_samples.to_string(),
            "inequality.field_grid" => self.field_grid.to_string(),
            "inequality.field_samples" => self.field_samples.to_string(),
            _ => unreachable!("key table and value_of out of sync: {key}"),
        }
    }

    /// One `key = value` line per key in [`KEYS`] order. Parsing this text
    /// reproduces the configuration exactly.
    pub fn to_canonical(&self) -> String {
        KEYS.iter()
            .map(|(k, _)| format!("{k} = {}\n", self.value_of(k)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_key_is_settable_from_its_canonical_value() {
        let cfg = RunConfig::default();
        for (k, _) in KEYS {
            let mut c = RunConfig::default();
            c.set(k, &cfg.value_of(k)).unwrap();
            assert_eq!(c, cfg, "{k}");
        }
    }

    #[test]
    fn subcommand_spellings() {
        for c in Subcommand::ALL {
            assert_eq!(Subcommand::from_name(c.name()), Some(c));
            assert_eq!(Subcommand::from_name(&c.name().replace('-', "_")), Some(c));
        }
        assert_eq!(Subcommand::from_name("nope"), None);
    }
}
