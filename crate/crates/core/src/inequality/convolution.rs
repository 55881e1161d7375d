use serde::Serialize;

use super::products::InequalityResult;
use crate::error::{invalid, Result};
use crate::numerics::{adaptive_simpson, fit_line, log_space_per_decade};

/// Relative tolerance of every time-convolution integral.
pub const INTEGRAL_TOL: f64 = 1e-8;
/// Largest allowed gap between fitted and stated exponent.
pub const BRANCH_TOLERANCE: f64 = 0.05;

/// The two time-convolution integrals:
/// `ID: ∫₀ᵗ (1+t−τ)^{−s₁}(1+τ)^{−s₂} dτ` and
/// `ED: ∫₀ᵗ e^{−c(t−τ)}(1+τ)^{−s} dτ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Convolution {
    Id { s1: f64, s2: f64 },
    Ed { c: f64, s: f64 },
}

/// Sampling setup for the growth-law fit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvolutionConfig {
    pub t_range: (f64, f64),
    pub fit_window: (f64, f64),
    pub samples_per_decade: usize,
}

impl Default for ConvolutionConfig {
    fn default() -> Self {
        Self {
            t_range: (1.0, 1e4),
            fit_window: (100.0, 1e4),
            samples_per_decade: 40,
        }
    }
}

/// Fitted growth law of one convolution integral.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchFit {
    pub kind: Convolution,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub fitted_exponent: f64,
    pub expected_exponent: f64,
    /// Whether values were divided by `ln(1+t)` before fitting.
    pub log_corrected: bool,
    /// Quadratic coefficient of `ln I` against `ln t` over the window,
    /// before any log correction. Large on the `s₂ = 1` branch.
    pub curvature: f64,
}

impl BranchFit {
    pub fn abs_error(&self) -> f64 {
        (self.fitted_exponent - self.expected_exponent).abs()
    }
}

impl Convolution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Convolution::Id { s1, s2 } => {
                if !(s1.is_finite() && s2.is_finite() && 0.0 < s1 && s1 <= s2) {
                    return Err(invalid("s1", format!("need 0 < s1 <= s2, got s1={s1}, s2={s2}")));
                }
            }
            Convolution::Ed { c, s } => {
                if !(c.is_finite() && c > 0.0) {
                    return Err(invalid("c", format!("must be > 0, got {c}")));
                }
                if !(s.is_finite() && s > 0.0) {
                    return Err(invalid("s", format!("must be > 0, got {s}")));
                }
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match *self {
            Convolution::Id { s1, s2 } => format!("id_s1_{s1}_s2_{s2}"),
            Convolution::Ed { c, s } => format!("ed_c_{c}_s_{s}"),
        }
    }

    /// Stated large-time exponent and whether it carries a `ln t` factor.
    pub fn expected(&self) -> (f64, bool) {
        match *self {
            Convolution::Id { s1, s2 } if s2 > 1.0 => (-s1, false),
            Convolution::Id { s1, s2 } if s2 == 1.0 => (-s1, true),
            Convolution::Id { s1, s2 } => (1.0 - s1 - s2, false),
            Convolution::Ed { s, .. } => (-s, false),
        }
    }

    fn integrand(&self, t: f64, tau: f64) -> f64 {
        match *self {
            Convolution::Id { s1, s2 } => (1.0 + t - tau).powf(-s1) * (1.0 + tau).powf(-s2),
            Convolution::Ed { c, s } => (-c * (t - tau)).exp() * (1.0 + tau).powf(-s),
        }
    }

    /// The integral at time `t`, by adaptive Simpson on dyadic pieces that
    /// refine toward both endpoints.
    pub fn integral(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let mut cuts = vec![0.0, t];
        let mut d = 1.0;
        while d < 0.5 * t {
            cuts.push(d);
            cuts.push(t - d);
            d *= 2.0;
        }
        cuts.push(0.5 * t);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .map(|w| adaptive_simpson(|tau| self.integrand(t, tau), w[0], w[1], INTEGRAL_TOL))
            .sum()
    }
}

pub fn convolution_fit(kind: Convolution, cfg: &ConvolutionConfig) -> Result<BranchFit> {
    kind.validate()?;
    let (lo, hi) = cfg.fit_window;
    if !(lo >= cfg.t_range.0 && hi <= cfg.t_range.1 && hi > lo && lo > 0.0) {
        return Err(invalid("fit_window", format!("({lo}, {hi}) must lie inside t_range")));
    }
    let times = log_space_per_decade(cfg.t_range.0, cfg.t_range.1, cfg.samples_per_decade);
    let values: Vec<f64> = times.iter().map(|&t| kind.integral(t)).collect();
    let (expected, log_corrected) = kind.expected();
    let window: Vec<(f64, f64)> = times
        .iter()
        .zip(&values)
        .filter(|(t, _)| **t >= lo && **t <= hi)
        .map(|(&t, &v)| (t, v))
        .collect();
    let x: Vec<f64> = window.iter().map(|(t, _)| t.ln()).collect();
    let y: Vec<f64> = window
        .iter()
        .map(|&(t, v)| if log_corrected { (v / (1.0 + t).ln()).ln() } else { v.ln() })
        .collect();
    let raw: Vec<f64> = window.iter().map(|(_, v)| v.ln()).collect();
    Ok(BranchFit {
        kind,
        fitted_exponent: fit_line(&x, &y).slope,
        expected_exponent: expected,
        log_corrected,
        curvature: quadratic_coefficient(&x, &raw),
        times,
        values,
    })
}

/// Leading coefficient of the least-squares quadratic through `(x, y)`.
fn quadratic_coefficient(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let u: Vec<f64> = x.iter().map(|v| v - mx).collect();
    // Orthogonalize u² against {1, u} and project y onto it.
    let u2: Vec<f64> = u.iter().map(|v| v * v).collect();
    let m2 = u2.iter().sum::<f64>() / n;
    let suu = u.iter().map(|v| v * v).sum::<f64>();
    let s2u = u2.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>();
    let q: Vec<f64> = u2.iter().zip(&u).map(|(a, b)| a - m2 - s2u / suu * b).collect();
    q.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / q.iter().map(|a| a * a).sum::<f64>()
}

/// The fitted branch as a pass/fail record: ratio is `|fitted − stated|`.
pub fn convolution_bound_check(kind: Convolution, cfg: &ConvolutionConfig) -> Result<InequalityResult> {
    let fit = convolution_fit(kind, cfg)?;
    let mut r = InequalityResult::from_ratios(kind.label(), &[Some(fit.abs_error())], BRANCH_TOLERANCE);
    r.samples = fit.times.len();
    Ok(r)
}

/// `(s₁, s₂)` grid of the ID sweep.
pub const ID_SWEEP_S1: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];
pub const ID_SWEEP_S2: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 3.0];

pub fn id_sweep(cfg: &ConvolutionConfig) -> Result<Vec<BranchFit>> {
    use rayon::prelude::*;
    let pairs: Vec<(f64, f64)> = ID_SWEEP_S1
        .iter()
        .flat_map(|&s1| ID_SWEEP_S2.iter().map(move |&s2| (s1, s2)))
        .collect();
    pairs
        .par_iter()
        .map(|&(s1, s2)| convolution_fit(Convolution::Id { s1, s2 }, cfg))
        .collect()
}
