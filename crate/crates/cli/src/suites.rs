use std::f64::consts::PI;
use std::io::Write;

use anisomhd::diagnostics::{minkowski_pair, u1_23_pair, EnergyLedger};
use anisomhd::inequality::{
    check_agmon_1d, check_quadruple_product, check_triple_product, convolution_fit, divfree_decay_series,
    gaussian_field, heat_decay_series, id_sweep, quadruple_ratio, random_smooth_1d, random_smooth_3d, triple_ratio,
    write_results_csv, BranchFit, Convolution, ConvolutionConfig, DecayCheckConfig, H1Kind, InequalityResult,
    ScalarDatum, BRANCH_TOLERANCE, QUADRUPLE_THRESHOLD, TRIPLE_THRESHOLD,
};
use anisomhd::kernel::sampling::{bound_audit, oracle_audit};
use anisomhd::kernel::PhysicalParams;
use anisomhd::propagator::catalog::{write_series_csv, write_summary_csv};
use anisomhd::propagator::{decay_catalog_run, AnalyticSpectrum, DecayConfig, DecaySeries};
use anisomhd::solver::{divergence_residual, init_random_smooth, write_checkpoint, Grid, SpectralOps, Stepper};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::report::{CheckResult, Report};

/// Entrywise relative tolerance of the kernel against the oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-9;
/// Largest fitted-minus-target exponent gap of any decay series.
pub const EXPONENT_TOLERANCE: f64 = 0.05;
pub const DIVERGENCE_LIMIT: f64 = 1e-10;
pub const BALANCE_LIMIT: f64 = 1e-6;
/// Largest allowed `sup H³ / initial H³`.
pub const H3_GROWTH_LIMIT: f64 = 2.0;

/// Agmon window: 1024 points on a width-40 window.
const AGMON_POINTS: usize = 1024;
const AGMON_LENGTH: f64 = 40.0;

pub const HEAT_ORDERS: [f64; 4] = [0.0, 1.0, 2.0, 3.0];
pub const DIVFREE_ORDERS: [f64; 3] = [0.0, 1.0, 2.0];
pub const ED_CASES: [(f64, f64); 4] = [(1.0, 5.0 / 3.0), (0.5, 0.5), (2.0, 1.0), (1.0, 3.0)];

fn params(cfg: &RunConfig) -> Result<PhysicalParams> {
    Ok(PhysicalParams::new(cfg.mu, cfg.eta)?)
}

fn series_checks(report: &mut Report, series: &[DecaySeries]) {
    for s in series {
        let err = s.abs_error().unwrap_or(f64::NAN);
        let ok = err <= EXPONENT_TOLERANCE && !s.truncated();
        report.push(CheckResult::from_flag(s.label.clone(), err, EXPONENT_TOLERANCE, ok));
    }
}

fn inequality_check(report: &mut Report, r: &InequalityResult) {
    report.push(CheckResult::from_flag(r.name.clone(), r.worst_ratio, r.threshold, r.passed));
}

pub fn kernel_audit(cfg: &RunConfig, report: &mut Report) -> Result<()> {
    let oracle = oracle_audit(cfg.oracle_samples, cfg.seed, ORACLE_TOLERANCE);
    let bounds = bound_audit(cfg.bound_samples, cfg.seed);
    report.write_file(&cfg.out, "kernel_oracle.csv", |w| {
        writeln!(w, "samples,degenerate_stress,worst_rel_error,tolerance,pass")?;
        writeln!(
            w,
            "{},{},{},{},{}",
            oracle.samples,
            oracle.degenerate_stress,
            oracle.worst_rel_error,
            oracle.tolerance,
            oracle.passed()
        )
    })?;
    report.write_file(&cfg.out, "kernel_bounds.csv", |w| {
        writeln!(w, "tag,samples,draws,hard_violations,calibrated_flags,tightest,tightest_margin")?;
        for t in &bounds.tags {
            let (name, margin) = t.tightest.map_or(("", f64::NAN), |c| (c.name, c.margin));
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                t.tag.name(),
                t.samples,
                t.draws,
                t.hard_violations,
                t.calibrated_flags,
                name,
                margin
            )?;
        }
        Ok(())
    })?;
    report.push(CheckResult::at_most("kernel_oracle", oracle.worst_rel_error, ORACLE_TOLERANCE));
    report.push(CheckResult::from_flag(
        "kernel_oracle_degenerate_stress",
        oracle.degenerate_stress as f64,
        1.0,
        oracle.degenerate_stress >= 1,
    ));
    for t in &bounds.tags {
        let ok = t.hard_violations == 0 && t.samples == cfg.bound_samples;
        report.push(CheckResult::from_flag(
            format!("bounds_{}", t.tag.name()),
            t.hard_violations as f64,
            0.0,
            ok,
        ));
        report.push(CheckResult::at_most(format!("calibrated_{}", t.tag.name()), t.calibrated_flags as f64, 0.0).soft());
    }
    Ok(())
}

pub fn linear_decay(cfg: &RunConfig, report: &mut Report) -> Result<()> {
    let dc = DecayConfig {
        params: params(cfg)?,
        spectrum: AnalyticSpectrum::default_pair(),
        quadrature: cfg.quadrature,
        fit_window: cfg.fit_window,
        samples_per_decade: 40,
        entries: cfg.catalog.clone(),
    };
    let series = decay_catalog_run(&dc)?;
    report.write_file(&cfg.out, "decay_series.csv", |w| write_series_csv(w, &series))?;
    report.write_file(&cfg.out, "decay_summary.csv", |w| write_summary_csv(w, &series))?;
    series_checks(report, &series);
    Ok(())
}

#[derive(Serialize)]
struct RunSummary {
    steps: usize,
    dt: f64,
    max_divergence_residual: f64,
    max_u1_23_ratio: f64,
    h3_growth: f64,
    ledger: anisomhd::diagnostics::LedgerSummary,
}

pub fn nonlinear_run(cfg: &RunConfig, report: &mut Report) -> Result<()> {
    let p = params(cfg)?;
    let grid = Grid::cube(cfg.grid)?;
    let s0 = init_random_smooth(&grid, cfg.seed, cfg.amplitude, cfg.slope)?;
    let mut ledger = EnergyLedger::new(p);
    let mut max_div: f64 = 0.0;
    let mut max_u1: f64 = 0.0;
    let mut observe = |s: &anisomhd::solver::SpectralState| -> anisomhd::Result<()> {
        ledger.update(s)?;
        max_div = max_div.max(divergence_residual(s));
        for k in 1..=3 {
            let (lhs, rhs) = u1_23_pair(s, k);
            if lhs > 0.0 {
                max_u1 = max_u1.max(lhs / rhs);
            }
        }
        Ok(())
    };
    observe(&s0)?;
    let end = Stepper::new(&grid, p, cfg.dt)?.advance(&s0, cfg.steps(), &mut observe)?;
    let summary = ledger.summary();
    let growth = if summary.h3_initial > 0.0 { summary.sup_h3 / summary.h3_initial } else { 0.0 };

    report.write_file(&cfg.out, "ledger.csv", |w| ledger.write_csv(w))?;
    report.write_file(&cfg.out, "checkpoint.amhd", |w| {
        write_checkpoint(w, &end, &p).map_err(|e| std::io::Error::other(e.to_string()))
    })?;
    let run = RunSummary {
        steps: cfg.steps(),
        dt: cfg.dt,
        max_divergence_residual: max_div,
        max_u1_23_ratio: max_u1,
        h3_growth: growth,
        ledger: summary,
    };
    report.write_file(&cfg.out, "ledger_summary.json", |w| {
        serde_json::to_writer_pretty(&mut *w, &run)?;
        writeln!(w)
    })?;
    report.push(CheckResult::at_most("divergence_residual", max_div, DIVERGENCE_LIMIT));
    report.push(CheckResult::at_most("l2_balance", summary.max_abs_balance_residual, BALANCE_LIMIT));
    report.push(CheckResult::at_most("h3_growth", growth, H3_GROWTH_LIMIT));
    report.push(CheckResult::at_most("u1_23_inequality", max_u1, 1.0));
    Ok(())
}

/// Gaussian reference ratios with known closed forms.
fn gaussian_references() -> Result<(f64, f64)> {
    let g = Grid::new([48; 3], [16.0; 3])?;
    let ops = SpectralOps::new(&g);
    let f = gaussian_field(&g, [0.0; 3], [1.0; 3]);
    let t = triple_ratio(&ops, &f, &f, &f)?.unwrap_or(f64::NAN);
    let q = quadruple_ratio(&ops, [&f, &f, &f, &f], (0, 2), H1Kind::Full)?.unwrap_or(f64::NAN);
    Ok((t, q))
}

fn write_fits<W: Write>(mut w: W, fits: &[BranchFit]) -> std::io::Result<()> {
    writeln!(w, "label,expected,fitted,log_corrected,curvature,abs_error")?;
    for f in fits {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            f.kind.label(),
            f.expected_exponent,
            f.fitted_exponent,
            f.log_corrected,
            f.curvature,
            f.abs_error()
        )?;
    }
    Ok(())
}

pub fn inequality_suite(cfg: &RunConfig, report: &mut Report) -> Result<()> {
    let mut results = Vec::new();

    results.push(check_agmon_1d(&random_smooth_1d(
        cfg.seed,
        cfg.agmon_samples,
        AGMON_POINTS,
        AGMON_LENGTH,
    ))?);

    let (tg, qg) = gaussian_references()?;
    results.push(InequalityResult::from_ratios("triple_gaussian", &[Some(tg)], TRIPLE_THRESHOLD));
    results.push(InequalityResult::from_ratios("quadruple_gaussian", &[Some(qg)], QUADRUPLE_THRESHOLD));

    let grid = Grid::new([cfg.field_grid; 3], [2.0 * PI; 3])?;
    let fields = random_smooth_3d(&grid, cfg.seed, cfg.field_samples);
    let triples: Vec<[Vec<f64>; 3]> = fields
        .chunks_exact(3)
        .map(|c| [c[0].clone(), c[1].clone(), c[2].clone()])
        .collect();
    results.push(check_triple_product(&grid, &triples)?);
    let quads: Vec<[Vec<f64>; 4]> = fields
        .chunks_exact(4)
        .map(|c| [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()])
        .collect();
    for axes in [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)] {
        results.push(check_quadruple_product(&grid, &quads, axes)?);
    }
    let mink: Vec<Option<f64>> = fields
        .iter()
        .map(|f| {
            let (lhs, rhs) = minkowski_pair(&grid, f);
            (rhs > 0.0).then(|| lhs / rhs)
        })
        .collect();
    results.push(InequalityResult::from_ratios("minkowski", &mink, 1.0));

    let ccfg = ConvolutionConfig::default();
    let mut fits = id_sweep(&ccfg)?;
    for (c, s) in ED_CASES {
        fits.push(convolution_fit(Convolution::Ed { c, s }, &ccfg)?);
    }
    for f in &fits {
        results.push(InequalityResult::from_ratios(f.kind.label(), &[Some(f.abs_error())], BRANCH_TOLERANCE));
    }

    let dcfg = DecayCheckConfig {
        quadrature: cfg.quadrature,
        t_range: (cfg.fit_window.0.min(10.0), cfg.fit_window.1),
        fit_window: cfg.fit_window,
        samples_per_decade: 40,
    };
    let mut series = heat_decay_series(&dcfg, &HEAT_ORDERS, ScalarDatum::Gaussian)?;
    let divfree = divfree_decay_series(&dcfg, &DIVFREE_ORDERS, true)?;
    let gain = match (divfree[0].fitted_exponent, series[0].fitted_exponent) {
        (Some(a), Some(b)) => a - b,
        _ => f64::NAN,
    };
    series.extend(divfree);

    report.write_file(&cfg.out, "inequality_results.csv", |w| write_results_csv(w, &results))?;
    report.write_file(&cfg.out, "convolution_fits.csv", |w| write_fits(w, &fits))?;
    report.write_file(&cfg.out, "corollary_series.csv", |w| write_series_csv(w, &series))?;
    report.write_file(&cfg.out, "corollary_summary.csv", |w| write_summary_csv(w, &series))?;

    for r in &results {
        inequality_check(report, r);
    }
    series_checks(report, &series);
    report.push(CheckResult::at_most("divfree_gain", (gain + 0.25).abs(), EXPONENT_TOLERANCE));
    Ok(())
}
