use std::f64::consts::SQRT_2;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::kernel::C64;
use crate::numerics::compensated_sum;
use crate::solver::{Grid, SpectralOps};

pub const AGMON_THRESHOLD: f64 = SQRT_2;
pub const TRIPLE_THRESHOLD: f64 = 2.0 * SQRT_2;
pub const QUADRUPLE_THRESHOLD: f64 = 8.0;

/// Largest fraction of `∫f²` allowed outside the central three quarters of
/// the sampling window on any axis.
pub const TAIL_LIMIT: f64 = 1e-8;
const CORE_HALF_WIDTH: f64 = 0.375;

/// Worst ratio over a batch of samples against a fixed threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityResult {
    pub name: String,
    /// Samples with a defined ratio.
    pub samples: usize,
    /// Degenerate samples (some factor zero).
    pub skipped: usize,
    pub worst_ratio: f64,
    pub threshold: f64,
    pub passed: bool,
    /// Position of the worst sample in the input.
    pub worst_index: Option<usize>,
}

impl InequalityResult {
    pub fn from_ratios(name: impl Into<String>, ratios: &[Option<f64>], threshold: f64) -> Self {
        let mut worst = f64::NEG_INFINITY;
        let mut worst_index = None;
        for (i, r) in ratios.iter().enumerate() {
            if let Some(r) = *r {
                // NaN counts as worst so it can never pass.
                if worst.is_nan() {
                    continue;
                }
                if !(r <= worst) {
                    worst = r;
                    worst_index = Some(i);
                }
            }
        }
        let samples = ratios.iter().filter(|r| r.is_some()).count();
        let worst_ratio = if samples == 0 { 0.0 } else { worst };
        Self {
            name: name.into(),
            samples,
            skipped: ratios.len() - samples,
            worst_ratio,
            threshold,
            passed: worst_ratio <= threshold,
            worst_index,
        }
    }
}

/// `name,samples,worst_ratio,threshold,pass`.
pub fn write_results_csv<W: Write>(mut w: W, results: &[InequalityResult]) -> std::io::Result<()> {
    writeln!(w, "name,samples,worst_ratio,threshold,pass")?;
    for r in results {
        writeln!(w, "{},{},{},{},{}", r.name, r.samples, r.worst_ratio, r.threshold, r.passed)?;
    }
    Ok(())
}

/// A function sampled at `n` uniform points of the periodic window
/// `[−L/2, L/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample1d {
    pub length: f64,
    pub values: Vec<f64>,
}

impl Sample1d {
    pub fn from_fn(length: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let h = length / n as f64;
        Self {
            length,
            values: (0..n).map(|i| f(-0.5 * length + i as f64 * h)).collect(),
        }
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.values.len() as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        -0.5 * self.length + i as f64 * self.spacing()
    }

    /// Spectral derivative.
    pub fn derivative(&self) -> Vec<f64> {
        let n = self.values.len();
        let mut planner = FftPlanner::new();
        let mut c: Vec<C64> = self.values.iter().map(|&v| C64::new(v, 0.0)).collect();
        planner.plan_fft_forward(n).process(&mut c);
        for (i, v) in c.iter_mut().enumerate() {
            let k = if i < n / 2 { i as f64 } else if i == n / 2 { 0.0 } else { i as f64 - n as f64 };
            *v *= C64::new(0.0, 2.0 * std::f64::consts::PI * k / self.length) / n as f64;
        }
        planner.plan_fft_inverse(n).process(&mut c);
        c.into_iter().map(|z| z.re).collect()
    }

    fn tail_fraction(&self) -> f64 {
        let edge = CORE_HALF_WIDTH * self.length;
        let total = compensated_sum(self.values.iter().map(|v| v * v));
        let tail = compensated_sum(
            self.values
                .iter()
                .enumerate()
                .filter(|(i, _)| self.point(*i).abs() > edge)
                .map(|(_, v)| v * v),
        );
        if total > 0.0 {
            tail / total
        } else {
            0.0
        }
    }
}

fn l2_1d(v: &[f64], h: f64) -> f64 {
    (h * compensated_sum(v.iter().map(|x| x * x))).sqrt()
}

/// `‖g‖_∞ / (‖g‖^{1/2}‖g′‖^{1/2})`, or `None` for `g ≡ 0`.
pub fn agmon_ratio(s: &Sample1d) -> Result<Option<f64>> {
    if s.values.iter().all(|&v| v == 0.0) {
        return Ok(None);
    }
    let tail = s.tail_fraction();
    if tail > TAIL_LIMIT {
        return Err(Error::TailMass { tail, limit: TAIL_LIMIT });
    }
    let h = s.spacing();
    let sup = s.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let d = l2_1d(&s.derivative(), h);
    if d == 0.0 {
        return Ok(None);
    }
    Ok(Some(sup / (l2_1d(&s.values, h) * d).sqrt()))
}

pub fn check_agmon_1d(samples: &[Sample1d]) -> Result<InequalityResult> {
    let ratios: Vec<Option<f64>> = samples.par_iter().map(agmon_ratio).collect::<Result<_>>()?;
    Ok(InequalityResult::from_ratios("agmon_1d", &ratios, AGMON_THRESHOLD))
}

/// Random sums of modulated Gaussians, each well inside the window.
pub fn random_smooth_1d(seed: u64, count: usize, n: usize, length: f64) -> Vec<Sample1d> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = length / 40.0;
    (0..count)
        .map(|_| {
            let terms: Vec<[f64; 5]> = (0..rng.random_range(1..=4))
                .map(|_| {
                    [
                        rng.random_range(-1.0..1.0),
                        scale * rng.random_range(-3.0..3.0),
                        scale * rng.random_range(0.3..1.5),
                        rng.random_range(0.0..3.0) / scale,
                        rng.random_range(0.0..std::f64::consts::TAU),
                    ]
                })
                .collect();
            Sample1d::from_fn(length, n, |x| {
                terms
                    .iter()
                    .map(|&[a, c, w, k, phi]| a * (-(x - c).powi(2) / (2.0 * w * w)).exp() * (k * x + phi).cos())
                    .sum()
            })
        })
        .collect()
}

/// Coordinate of grid point `idx` when the box is centered on the origin.
pub fn centered_point(grid: &Grid, idx: usize) -> [f64; 3] {
    let p = grid.point(idx);
    [0, 1, 2].map(|a| p[a] - 0.5 * grid.lengths[a])
}

fn tail_fraction_3d(grid: &Grid, f: &[f64]) -> f64 {
    let total = compensated_sum(f.iter().map(|v| v * v));
    let tail = compensated_sum(f.iter().enumerate().filter_map(|(i, v)| {
        let x = centered_point(grid, i);
        (0..3)
            .any(|a| x[a].abs() > CORE_HALF_WIDTH * grid.lengths[a])
            .then_some(v * v)
    }));
    if total > 0.0 {
        tail / total
    } else {
        0.0
    }
}

/// Norms of physical fields sampled on a box, with spectral derivatives.
pub struct FieldNorms<'a> {
    grid: Grid,
    ops: &'a SpectralOps,
}

impl<'a> FieldNorms<'a> {
    pub fn new(ops: &'a SpectralOps) -> Self {
        Self { grid: *ops.grid(), ops }
    }

    fn l2(&self, f: &[f64]) -> f64 {
        (self.grid.cell_volume() * compensated_sum(f.iter().map(|v| v * v))).sqrt()
    }

    fn l2_spec(&self, c: &[C64]) -> f64 {
        self.l2(&self.ops.to_physical(c))
    }

    fn checked(&self, f: &[f64]) -> Result<Vec<C64>> {
        if f.len() != self.grid.len() {
            return Err(Error::GridMismatch(format!("field of {} values on a grid of {}", f.len(), self.grid.len())));
        }
        let tail = tail_fraction_3d(&self.grid, f);
        if tail > TAIL_LIMIT {
            return Err(Error::TailMass { tail, limit: TAIL_LIMIT });
        }
        Ok(self.ops.to_spectral(f))
    }

    /// `(‖f‖, ‖∂ₐf‖)`.
    fn with_derivative(&self, f: &[f64], axis: usize) -> Result<(f64, f64)> {
        let c = self.checked(f)?;
        Ok((self.l2(f), self.l2_spec(&self.ops.derivative(&c, axis))))
    }

    /// `(‖g‖_{H¹}, ‖∂ₖg‖_{H¹})`, with the `L²` part dropped when
    /// `homogeneous`.
    fn h1_pair(&self, g: &[f64], k: usize, homogeneous: bool) -> Result<(f64, f64)> {
        let c = self.checked(g)?;
        let grads: Vec<Vec<C64>> = (0..3).map(|a| self.ops.derivative(&c, a)).collect();
        let grad_sq: f64 = grads.iter().map(|d| self.l2_spec(d).powi(2)).sum();
        let dk = &grads[k];
        let hess_sq: f64 = (0..3).map(|a| self.l2_spec(&self.ops.derivative(dk, a)).powi(2)).sum();
        let base = if homogeneous { 0.0 } else { 1.0 };
        Ok((
            (base * self.l2(g).powi(2) + grad_sq).sqrt(),
            (base * self.l2_spec(dk).powi(2) + hess_sq).sqrt(),
        ))
    }

    fn integral_abs_product(&self, fs: &[&[f64]]) -> f64 {
        self.grid.cell_volume()
            * compensated_sum((0..self.grid.len()).map(|p| fs.iter().map(|f| f[p]).product::<f64>().abs()))
    }
}

/// `∫|fgh| / (‖f‖^{1/2}‖∂₁f‖^{1/2}‖g‖^{1/2}‖∂₂g‖^{1/2}‖h‖^{1/2}‖∂₃h‖^{1/2})`,
/// `None` when a factor vanishes.
pub fn triple_ratio(ops: &SpectralOps, f: &[f64], g: &[f64], h: &[f64]) -> Result<Option<f64>> {
    let n = FieldNorms::new(ops);
    let (a, da) = n.with_derivative(f, 0)?;
    let (b, db) = n.with_derivative(g, 1)?;
    let (c, dc) = n.with_derivative(h, 2)?;
    let rhs = (a * da * b * db * c * dc).sqrt();
    if rhs == 0.0 {
        return Ok(None);
    }
    Ok(Some(n.integral_abs_product(&[f, g, h]) / rhs))
}

pub fn check_triple_product(grid: &Grid, samples: &[[Vec<f64>; 3]]) -> Result<InequalityResult> {
    let ops = SpectralOps::new(grid);
    let ratios: Vec<Option<f64>> = samples
        .iter()
        .map(|[f, g, h]| triple_ratio(&ops, f, g, h))
        .collect::<Result<_>>()?;
    Ok(InequalityResult::from_ratios("triple_product", &ratios, TRIPLE_THRESHOLD))
}

/// Which `H¹` norm the quadruple bound uses for `g` and `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum H1Kind {
    Full,
    /// `‖∇·‖` only; makes the right-hand side homogeneous under dilation.
    Homogeneous,
}

/// `∫|efgh|` over
/// `‖e‖^{1/2}‖∂ᵢe‖^{1/2}‖f‖^{1/2}‖∂ᵢf‖^{1/2}‖g‖_{H¹}^{1/2}‖∂ₖg‖_{H¹}^{1/2}‖h‖_{H¹}^{1/2}‖∂ₖh‖_{H¹}^{1/2}`.
pub fn quadruple_ratio(
    ops: &SpectralOps,
    fields: [&[f64]; 4],
    axes: (usize, usize),
    h1: H1Kind,
) -> Result<Option<f64>> {
    let (i, k) = axes;
    if i > 2 || k > 2 || i == k {
        return Err(invalid("axes", format!("need distinct axes in 0..3, got ({i}, {k})")));
    }
    let n = FieldNorms::new(ops);
    let hom = h1 == H1Kind::Homogeneous;
    let (e, de) = n.with_derivative(fields[0], i)?;
    let (f, df) = n.with_derivative(fields[1], i)?;
    let (g, dg) = n.h1_pair(fields[2], k, hom)?;
    let (h, dh) = n.h1_pair(fields[3], k, hom)?;
    let rhs = (e * de * f * df * g * dg * h * dh).sqrt();
    if rhs == 0.0 {
        return Ok(None);
    }
    Ok(Some(n.integral_abs_product(&fields) / rhs))
}

pub fn check_quadruple_product(
    grid: &Grid,
    samples: &[[Vec<f64>; 4]],
    axes: (usize, usize),
) -> Result<InequalityResult> {
    let ops = SpectralOps::new(grid);
    let ratios: Vec<Option<f64>> = samples
        .iter()
        .map(|[e, f, g, h]| quadruple_ratio(&ops, [e, f, g, h], axes, H1Kind::Full))
        .collect::<Result<_>>()?;
    Ok(InequalityResult::from_ratios(
        format!("quadruple_product_{}{}", axes.0 + 1, axes.1 + 1),
        &ratios,
        QUADRUPLE_THRESHOLD,
    ))
}

/// Anisotropic Gaussian `exp(−Σ (xₐ−cₐ)²/(2wₐ²))` on the centered box.
pub fn gaussian_field(grid: &Grid, center: [f64; 3], width: [f64; 3]) -> Vec<f64> {
    (0..grid.len())
        .map(|p| {
            let x = centered_point(grid, p);
            (-(0..3).map(|a| (x[a] - center[a]).powi(2) / (2.0 * width[a] * width[a])).sum::<f64>()).exp()
        })
        .collect()
}

/// Random smooth fields: one or two modulated anisotropic Gaussians with
/// centers and widths scaled to the box so the tail condition holds.
pub fn random_smooth_3d(grid: &Grid, seed: u64, count: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = grid.lengths.map(|l| l / 16.0);
    (0..count)
        .map(|_| {
            let terms: Vec<([f64; 3], [f64; 3], [f64; 3], f64, f64)> = (0..rng.random_range(1..=2))
                .map(|_| {
                    let c = [0, 1, 2].map(|a| scale[a] * rng.random_range(-1.0..1.0));
                    let w = [0, 1, 2].map(|a| scale[a] * rng.random_range(0.5..1.0));
                    let k = [0, 1, 2].map(|a| rng.random_range(-1.0..1.0) / scale[a]);
                    (c, w, k, rng.random_range(0.0..std::f64::consts::TAU), rng.random_range(0.2..1.0))
                })
                .collect();
            (0..grid.len())
                .map(|p| {
                    let x = centered_point(grid, p);
                    terms
                        .iter()
                        .map(|(c, w, k, phi, amp)| {
                            let r: f64 = (0..3).map(|a| (x[a] - c[a]).powi(2) / (2.0 * w[a] * w[a])).sum();
                            let phase: f64 = (0..3).map(|a| k[a] * x[a]).sum::<f64>() + phi;
                            amp * (-r).exp() * phase.cos()
                        })
                        .sum()
                })
                .collect()
        })
        .collect()
}
