use std::path::PathBuf;
use std::process::ExitCode;

use anisomhd_cli::{configure_threads, run, CliError, RunConfig, Status, Subcommand};
use clap::{Args, Parser};

/// Kernel audits, decay measurements, nonlinear runs and inequality checks
/// for 3D MHD with vertical velocity dissipation.
#[derive(Parser)]
#[command(name = "anisomhd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Kernel against the matrix-exponential oracle, and the per-domain bounds.
    KernelAudit(Common),
    /// Decay exponents of the linear evolution of Gaussian data.
    LinearDecay(Common),
    /// Nonlinear periodic run with the energy ledger and a checkpoint.
    NonlinearRun(Common),
    /// Product inequalities, heat-type decay and convolution growth laws.
    InequalitySuite(Common),
    /// Lists every configuration key.
    Keys,
}

#[derive(Args)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Any configuration key, as `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    t_final: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    catalog: Option<String>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
}

impl Common {
    fn flags(&self) -> Result<Vec<(String, String)>, CliError> {
        let mut out = Vec::new();
        for s in &self.set {
            let (k, v) = s.split_once('=').ok_or_else(|| CliError::Syntax {
                line: 0,
                text: s.clone(),
            })?;
            out.push((k.trim().to_string(), v.to_string()));
        }
        let named = [
            ("physics.mu", &self.mu),
            ("physics.eta", &self.eta),
            ("solver.grid", &self.grid),
            ("run.seed", &self.seed),
            ("run.out", &self.out),
            ("solver.t_final", &self.t_final),
            ("solver.dt", &self.dt),
            ("decay.catalog", &self.catalog),
        ];
        out.extend(named.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v))));
        Ok(out)
    }
}

fn fail(e: &CliError) -> ExitCode {
    let body = serde_json::json!({ "error": e.to_string(), "key": e.key() });
    eprintln!("{body}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (sub, common) = match cli.command {
        Command::KernelAudit(c) => (Subcommand::KernelAudit, c),
        Command::LinearDecay(c) => (Subcommand::LinearDecay, c),
        Command::NonlinearRun(c) => (Subcommand::NonlinearRun, c),
        Command::InequalitySuite(c) => (Subcommand::InequalitySuite, c),
        Command::Keys => {
            for (k, doc) in anisomhd_cli::KEYS {
                println!("{k:26} {doc}");
            }
            return ExitCode::SUCCESS;
        }
    };
    let resolved = (|| {
        let text = common.config.as_ref().map(std::fs::read_to_string).transpose()?;
        RunConfig::resolve(sub, text.as_deref(), &common.flags()?)
    })();
    let cfg = match resolved {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if common.print_config {
        print!("{}", cfg.to_canonical());
        return ExitCode::SUCCESS;
    }
    if let Err(e) = configure_threads() {
        return fail(&e);
    }
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    for r in &outcome.report.results {
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Flag => "FLAG",
        };
        println!("{tag} {} metric={} threshold={}", r.name, r.metric, r.threshold);
    }
    println!("manifest: {} ({:.2} s)", outcome.manifest.display(), outcome.wall_seconds);
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        let body = serde_json::json!({ "failures": outcome.report.failures() });
        eprintln!("{body}");
        ExitCode::from(1)
    }
}
