use serde::Serialize;

use crate::error::{invalid, Result};
use crate::numerics::{det_sum_vec, log_space_per_decade};
use crate::propagator::{
    decay_exponent_fit, AnalyticSpectrum, DecaySeries, QuadratureGrid, QuadraturePreset, SliceMoments,
};

/// Sampling and fitting setup shared by the heat-type decay checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayCheckConfig {
    pub quadrature: QuadraturePreset,
    pub t_range: (f64, f64),
    pub fit_window: (f64, f64),
    pub samples_per_decade: usize,
}

impl Default for DecayCheckConfig {
    fn default() -> Self {
        Self {
            quadrature: QuadraturePreset::LogGraded,
            t_range: (10.0, 2000.0),
            fit_window: (50.0, 2000.0),
            samples_per_decade: 40,
        }
    }
}

/// Scalar initial spectra for the heat check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ScalarDatum {
    /// `e^{−|ξ|²/2}`.
    Gaussian,
    /// `(1 − ξ₁²/4)₊² · e^{−ξ_ν²/2}`: compact in `ξ₁`, Gaussian in `ξ_ν`.
    BandLimited,
}

impl ScalarDatum {
    pub fn evaluate(&self, xi: [f64; 3]) -> f64 {
        let nu = xi[1] * xi[1] + xi[2] * xi[2];
        match self {
            ScalarDatum::Gaussian => (-0.5 * (xi[0] * xi[0] + nu)).exp(),
            ScalarDatum::BandLimited => {
                let band = (1.0 - 0.25 * xi[0] * xi[0]).max(0.0);
                band * band * (-0.5 * nu).exp()
            }
        }
    }
}

/// `‖|ξ_ν|^{aₙ} e^{−ξ_ν² t} f‖_{L²_ξ}` for each exponent `aₙ` and time,
/// with `f²` already integrated over `ξ₁` in `moments`.
fn weighted_series(
    grid: &QuadratureGrid,
    moments: &SliceMoments,
    powers: &[f64],
    times: &[f64],
) -> Vec<Vec<(f64, f64)>> {
    let (a2, a3) = (&grid.axes[1], &grid.axes[2]);
    let n3 = moments.n3();
    let (s2, s3) = (grid.shell_flags(1), grid.shell_flags(2));
    times
        .iter()
        .map(|&t| {
            let sums = det_sum_vec(moments.plane_len(), 2 * powers.len(), |jk, out| {
                let (j, k) = (jk / n3, jk % n3);
                let nu2 = a2.nodes[j] * a2.nodes[j] + a3.nodes[k] * a3.nodes[k];
                let (tot, inner) = moments.get(jk, 0, 0);
                let w = a2.weights[j] * a3.weights[k] * (-2.0 * nu2 * t).exp();
                let shell = s2[j] || s3[k];
                for (n, &a) in powers.iter().enumerate() {
                    let c = if a == 0.0 { w } else { w * nu2.powf(a) };
                    out[2 * n] += c * tot;
                    if !shell {
                        out[2 * n + 1] += c * inner;
                    }
                }
            });
            (0..powers.len())
                .map(|n| {
                    let (tot, inner) = (sums[2 * n], sums[2 * n + 1]);
                    let frac = if tot > 0.0 { (tot - inner).max(0.0) / tot } else { 0.0 };
                    (tot.max(0.0).sqrt(), frac)
                })
                .collect()
        })
        .collect()
}

fn fitted_series(
    cfg: &DecayCheckConfig,
    labels: &[String],
    targets: &[f64],
    f: impl Fn([f64; 3]) -> f64 + Sync,
    powers: &[f64],
) -> Result<Vec<DecaySeries>> {
    let (lo, hi) = cfg.t_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(invalid("t_range", format!("need 0 < t_min < t_max, got ({lo}, {hi})")));
    }
    if cfg.samples_per_decade == 0 {
        return Err(invalid("samples_per_decade", "must be positive"));
    }
    if let Some(a) = powers.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(invalid("order", format!("must be finite and >= 0, got {}", a)));
    }
    let grid = QuadratureGrid::preset(cfg.quadrature);
    let times = log_space_per_decade(lo, hi, cfg.samples_per_decade);
    let moments = SliceMoments::compute(&grid, &[0], |xi| [f(xi)]);
    let table = weighted_series(&grid, &moments, powers, &times);
    labels
        .iter()
        .zip(targets)
        .enumerate()
        .map(|(n, (label, &target))| {
            let values = table.iter().map(|row| row[n].0).collect();
            let mut s = DecaySeries::new(label.clone(), times.clone(), values, cfg.fit_window).with_target(target);
            s.shell_fraction = table.iter().fold(0.0f64, |m, row| m.max(row[n].1));
            decay_exponent_fit(s)
        })
        .collect()
}

/// `‖|ξ_ν|^α e^{−ξ_ν²t} û₀‖` for each `α`, target `−(1+α)/2`.
pub fn heat_decay_series(cfg: &DecayCheckConfig, alphas: &[f64], datum: ScalarDatum) -> Result<Vec<DecaySeries>> {
    let labels: Vec<String> = alphas.iter().map(|a| format!("heat_alpha_{a}")).collect();
    let targets: Vec<f64> = alphas.iter().map(|a| -(1.0 + a) / 2.0).collect();
    fitted_series(cfg, &labels, &targets, |xi| datum.evaluate(xi), alphas)
}

/// `‖|ξ_ν|^β e^{−ξ_ν²t} û₁‖` for the first component of a Gaussian vector
/// datum, target `−(3+2β)/4` when projected and `−(1+β)/2` otherwise.
pub fn divfree_decay_series(cfg: &DecayCheckConfig, betas: &[f64], projected: bool) -> Result<Vec<DecaySeries>> {
    let spec = AnalyticSpectrum::gaussian([1.0, 0.7, -0.4], [0.0; 3], [1.0; 3])?.with_projection(projected);
    let tag = if projected { "divfree" } else { "scalar" };
    let labels: Vec<String> = betas.iter().map(|b| format!("{tag}_beta_{b}")).collect();
    let targets: Vec<f64> = betas
        .iter()
        .map(|b| if projected { -(3.0 + 2.0 * b) / 4.0 } else { -(1.0 + b) / 2.0 })
        .collect();
    fitted_series(cfg, &labels, &targets, |xi| spec.evaluate(xi).u[0], betas)
}

pub fn heat_decay_check(alpha: f64) -> Result<DecaySeries> {
    Ok(heat_decay_series(&DecayCheckConfig::default(), &[alpha], ScalarDatum::Gaussian)?.remove(0))
}

pub fn divfree_decay_check(beta: f64) -> Result<DecaySeries> {
    Ok(divfree_decay_series(&DecayCheckConfig::default(), &[beta], true)?.remove(0))
}

/// Divergence-free exponent minus the heat exponent at equal order; about
/// `−1/4`.
pub fn divergence_free_gain(cfg: &DecayCheckConfig, order: f64) -> Result<f64> {
    let a = divfree_decay_series(cfg, &[order], true)?.remove(0);
    let b = heat_decay_series(cfg, &[order], ScalarDatum::Gaussian)?.remove(0);
    Ok(a.fitted_exponent.unwrap_or(f64::NAN) - b.fitted_exponent.unwrap_or(f64::NAN))
}
