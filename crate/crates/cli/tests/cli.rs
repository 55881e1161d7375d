use std::fs;
use std::path::Path;
use std::process::Command;

use anisomhd::propagator::{CatalogEntry, QuadraturePreset};
use anisomhd::solver::read_checkpoint;
use anisomhd_cli::{run, CliError, RunConfig, Subcommand};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anisomhd"))
}

fn flags(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn read_manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn empty_input_gives_defaults() {
    let cfg = RunConfig::resolve(Subcommand::LinearDecay, None, &[]).unwrap();
    assert_eq!((cfg.mu, cfg.eta, cfg.grid, cfg.seed), (1.0, 1.0, 32, 42));
    assert_eq!(cfg.subcommand, Subcommand::LinearDecay);
    assert_eq!(cfg.quadrature, QuadraturePreset::LogGraded);
    assert_eq!(cfg.fit_window, (50.0, 2000.0));
    assert_eq!(cfg.catalog, CatalogEntry::ALL.to_vec());
    let blank = RunConfig::resolve(Subcommand::LinearDecay, Some("\n# only a comment\n"), &[]).unwrap();
    assert_eq!(blank, cfg);
}

#[test]
fn flags_override_file_override_defaults() {
    let file = "physics.mu = 2\nphysics.eta = 0.5  # trailing comment\n";
    let cfg = RunConfig::resolve(Subcommand::KernelAudit, Some(file), &flags(&[("physics.mu", "3")])).unwrap();
    assert_eq!((cfg.mu, cfg.eta), (3.0, 0.5));
    let cfg = RunConfig::resolve(Subcommand::KernelAudit, Some(file), &[]).unwrap();
    assert_eq!(cfg.mu, 2.0);
}

#[test]
fn errors_name_the_offending_key() {
    let key_of = |r: Result<RunConfig, CliError>| r.unwrap_err().key().map(str::to_string);
    let sub = Subcommand::NonlinearRun;
    assert_eq!(key_of(RunConfig::resolve(sub, None, &flags(&[("physics.mu", "-1")]))).as_deref(), Some("physics.mu"));
    assert_eq!(key_of(RunConfig::resolve(sub, Some("physics.eta = 0"), &[])).as_deref(), Some("physics.eta"));
    assert_eq!(key_of(RunConfig::resolve(sub, None, &flags(&[("solver.grid", "33")]))).as_deref(), Some("solver.grid"));
    assert_eq!(key_of(RunConfig::resolve(sub, None, &flags(&[("run.seed", "abc")]))).as_deref(), Some("run.seed"));
    assert_eq!(key_of(RunConfig::resolve(sub, Some("physics.nu = 1"), &[])).as_deref(), Some("physics.nu"));
    assert_eq!(
        key_of(RunConfig::resolve(sub, None, &flags(&[("decay.catalog", "l2_total,bogus")]))).as_deref(),
        Some("decay.catalog")
    );
    assert_eq!(
        key_of(RunConfig::resolve(sub, None, &flags(&[("solver.dt", "0.3")]))).as_deref(),
        Some("solver.t_final")
    );
    let e = RunConfig::resolve(sub, None, &flags(&[("physics.mu", "-1")])).unwrap_err();
    assert!(e.to_string().contains("mu"));
    assert!(matches!(RunConfig::resolve(sub, Some("no equals sign"), &[]), Err(CliError::Syntax { line: 1, .. })));
}

#[test]
fn canonical_text_round_trips() {
    let cfg = RunConfig::resolve(
        Subcommand::InequalitySuite,
        None,
        &flags(&[
            ("physics.mu", "0.3"),
            ("physics.eta", "1e-7"),
            ("solver.dt", "0.1"),
            ("solver.t_final", "0.30000000000000004"),
            ("decay.catalog", "u1_l2, d333_u1"),
            ("decay.quadrature", "uniform_geometric"),
            ("run.out", "some/dir"),
            ("run.seed", "18446744073709551615"),
        ]),
    )
    .unwrap();
    let text = cfg.to_canonical();
    let again = RunConfig::resolve(Subcommand::InequalitySuite, Some(&text), &[]).unwrap();
    assert_eq!(again, cfg);
    assert_eq!(again.to_canonical(), text);
    let def = RunConfig::default();
    assert_eq!(RunConfig::resolve(def.subcommand, Some(&def.to_canonical()), &[]).unwrap(), def);
}

#[test]
fn kernel_audit_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["kernel-audit", "--out"])
        .arg(dir.path())
        .args(["--set", "audit.oracle_samples=2000", "--set", "audit.bound_samples=2000"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = read_manifest(dir.path());
    assert!(m["wall_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(m["config"]["mu"], 1.0);
    assert_eq!(m["config"]["subcommand"], "kernel_audit");
    assert_eq!(m["failures"].as_array().unwrap().len(), 0);
    let results = m["results"].as_array().unwrap();
    for r in results {
        for field in ["name", "status", "metric", "threshold"] {
            assert!(r.get(field).is_some(), "{r}");
        }
    }
    let hard_bounds: Vec<&Value> = results
        .iter()
        .filter(|r| r["name"].as_str().unwrap().starts_with("bounds_"))
        .collect();
    assert_eq!(hard_bounds.len(), 4);
    assert!(hard_bounds.iter().all(|r| r["metric"] == 0.0 && r["status"] == "pass"));
    let csv = fs::read_to_string(dir.path().join("kernel_bounds.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn linear_decay_catalog_selection() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::resolve(
        Subcommand::LinearDecay,
        None,
        &flags(&[("decay.catalog", "l2_total,u1_l2"), ("run.out", dir.path().to_str().unwrap())]),
    )
    .unwrap();
    let outcome = run(&cfg).unwrap();
    assert!(outcome.passed());
    let summary = fs::read_to_string(dir.path().join("decay_summary.csv")).unwrap();
    let rows: Vec<Vec<&str>> = summary.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(summary.lines().next().unwrap(), "label,exponent,stderr,target,abs_error");
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0], rows[0][3]), ("l2_total", "-0.5"));
    assert_eq!((rows[1][0], rows[1][3]), ("u1_l2", "-0.75"));
    let series = fs::read_to_string(dir.path().join("decay_series.csv")).unwrap();
    assert_eq!(series.lines().next().unwrap(), "label,t,value");
}

#[test]
fn nonlinear_run_writes_ledger_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["nonlinear-run", "--grid", "16", "--t-final", "0.05", "--dt", "0.001", "--mu", "0.5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ledger = fs::read_to_string(dir.path().join("ledger.csv")).unwrap();
    assert_eq!(ledger.lines().next().unwrap(), "t,l2_sq,diss_integral,balance_residual,h3,e2_running");
    assert_eq!(ledger.lines().count(), 52);
    let ck = read_checkpoint(fs::File::open(dir.path().join("checkpoint.amhd")).unwrap()).unwrap();
    assert_eq!(ck.state.grid.n, [16; 3]);
    assert_eq!((ck.params.mu, ck.params.eta), (0.5, 1.0));
    assert!((ck.state.time - 0.05).abs() < 1e-12);
    let m = read_manifest(dir.path());
    let balance = m["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "l2_balance")
        .unwrap();
    assert!(balance["metric"].as_f64().unwrap() <= 1e-6);
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("ledger_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["steps"], 50);
}

#[test]
fn exit_status_reflects_hard_checks() {
    // A fit window this early cannot show the asymptotic rate.
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["linear-decay", "--catalog", "d333_u1", "--set", "decay.t_min=0.5", "--set", "decay.t_max=2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["failures"][0], "d333_u1");
    assert_eq!(read_manifest(dir.path())["failures"][0], "d333_u1");
}

#[test]
fn bad_configuration_exits_with_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    fs::write(&cfg_path, "physics.mu = 2\nsolver.bogus = 1\n").unwrap();
    let out = bin().args(["kernel-audit", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["key"], "solver.bogus");

    let out = bin().args(["nonlinear-run", "--mu=-1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["key"], "physics.mu");

    let out = bin()
        .env("ANISOMHD_THREADS", "zero")
        .args(["kernel-audit", "--set", "audit.oracle_samples=10", "--set", "audit.bound_samples=10", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn print_config_and_key_listing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    fs::write(&cfg_path, "physics.mu = 2\n").unwrap();
    let out = bin()
        .args(["linear-decay", "--print-config", "--mu", "3", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("physics.mu = 3\n"));
    assert!(text.contains("run.subcommand = linear-decay\n"));
    let keys = bin().arg("keys").output().unwrap();
    let listing = String::from_utf8(keys.stdout).unwrap();
    assert_eq!(listing.lines().count(), anisomhd_cli::KEYS.len());
}
