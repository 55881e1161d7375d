//! Tensor-product quadrature on a truncated frequency box.

use rayon::prelude::*;
use serde::Serialize;

use super::spectrum::FieldPair;
use crate::error::{invalid, Result};
use crate::kernel::C64;
use crate::numerics::det_sum_vec;

/// Nodes and positive weights along one axis, symmetric about 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AxisRule {
    /// Nodes `±e^u` for `u` stepping by `h` from `ln(inner)` to `ln(outer)`,
    /// weighted by `h·|ξ|` (the trapezoid rule in the variable `u`), plus a
    /// midpoint node at 0 covering `(−inner, inner)`.
    pub fn log_graded(inner: f64, outer: f64, h: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && h > 0.0) {
            return Err(invalid("quadrature", "need 0 < inner < outer and h > 0"));
        }
        let n = ((outer.ln() - inner.ln()) / h).round() as usize + 1;
        let step = (outer.ln() - inner.ln()) / (n - 1) as f64;
        let half: Vec<f64> = (0..n).map(|i| (inner.ln() + step * i as f64).exp()).collect();
        let mut nodes: Vec<f64> = half.iter().rev().map(|x| -x).collect();
        nodes.push(0.0);
        nodes.extend(&half);
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(i, x)| {
                if *x == 0.0 {
                    2.0 * inner
                } else if i == 0 || i == n - 1 || i == n + 1 || i == 2 * n {
                    0.5 * step * x.abs()
                } else {
                    step * x.abs()
                }
            })
            .collect();
        Ok(Self { nodes, weights })
    }

    /// Trapezoid weights on an arbitrary sorted node list.
    pub fn trapezoid(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("quadrature", "nodes must be strictly increasing"));
        }
        let n = nodes.len();
        let weights = (0..n)
            .map(|i| {
                let lo = if i == 0 { nodes[0] } else { nodes[i - 1] };
                let hi = if i == n - 1 { nodes[n - 1] } else { nodes[i + 1] };
                0.5 * (hi - lo)
            })
            .collect();
        Ok(Self { nodes, weights })
    }

    /// `n_core` uniform nodes on `[−1, 1]` plus `n_tail` geometric nodes per
    /// side out to `outer`, trapezoid weights.
    pub fn uniform_geometric(n_core: usize, n_tail: usize, outer: f64) -> Result<Self> {
        if n_core < 2 || outer <= 1.0 {
            return Err(invalid("quadrature", "need n_core ≥ 2 and outer > 1"));
        }
        let r = outer.powf(1.0 / n_tail as f64);
        let tail: Vec<f64> = (1..=n_tail).map(|k| r.powi(k as i32)).collect();
        let mut nodes: Vec<f64> = tail.iter().rev().map(|x| -x).collect();
        nodes.extend((0..n_core).map(|i| -1.0 + 2.0 * i as f64 / (n_core - 1) as f64));
        nodes.extend(&tail);
        Self::trapezoid(nodes)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn outer(&self) -> f64 {
        self.nodes.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Named quadrature presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuadraturePreset {
    /// Log-graded nodes, `h = 0.08` on `[1e-6, 32]`; the default.
    LogGraded,
    /// The same with `h = 0.04`, for refinement checks.
    LogGradedFine,
    /// 64 uniform nodes on `[−1, 1]` plus 64 geometric per side to 32.
    UniformGeometric,
}

impl QuadraturePreset {
    pub fn name(&self) -> &'static str {
        match self {
            QuadraturePreset::LogGraded => "log_graded",
            QuadraturePreset::LogGradedFine => "log_graded_fine",
            QuadraturePreset::UniformGeometric => "uniform_geometric",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Self::LogGraded, Self::LogGradedFine, Self::UniformGeometric]
            .into_iter()
            .find(|p| p.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureGrid {
    pub axes: [AxisRule; 3],
}

/// Box half-width shared by the presets.
pub const BOX_HALF_WIDTH: f64 = 32.0;

impl QuadratureGrid {
    pub fn isotropic(rule: AxisRule) -> Self {
        Self {
            axes: [rule.clone(), rule.clone(), rule],
        }
    }

    pub fn preset(p: QuadraturePreset) -> Self {
        let rule = match p {
            QuadraturePreset::LogGraded => AxisRule::log_graded(1e-6, BOX_HALF_WIDTH, 0.08),
            QuadraturePreset::LogGradedFine => AxisRule::log_graded(1e-6, BOX_HALF_WIDTH, 0.04),
            QuadraturePreset::UniformGeometric => {
                AxisRule::uniform_geometric(64, 64, BOX_HALF_WIDTH)
            }
        };
        Self::isotropic(rule.expect("preset parameters are valid"))
    }

    pub fn node_count(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    /// Per-node flags marking the outer shell of one axis, where the
    /// coordinate is at least half the box half-width.
    pub fn shell_flags(&self, axis: usize) -> Vec<bool> {
        let a = &self.axes[axis];
        let edge = 0.5 * a.outer();
        a.nodes.iter().map(|x| x.abs() >= edge).collect()
    }
}

/// Which components enter a norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentMask {
    pub u: [bool; 3],
    pub b: [bool; 3],
}

impl ComponentMask {
    pub const ALL: ComponentMask = ComponentMask {
        u: [true; 3],
        b: [true; 3],
    };
    pub const FIRST: ComponentMask = ComponentMask {
        u: [true, false, false],
        b: [true, false, false],
    };
}

/// A quadrature norm with the share of the integral coming from the outer
/// shell of the box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub shell_fraction: f64,
}

/// Shell share above which the box is reported as too small.
pub const TRUNCATION_LIMIT: f64 = 1e-6;

impl NormEstimate {
    fn from_sums(total: f64, shell: f64) -> Self {
        let shell_fraction = if total > 0.0 { shell / total } else { 0.0 };
        Self {
            value: total.max(0.0).sqrt(),
            shell_fraction,
        }
    }

    pub fn truncated(&self) -> bool {
        self.shell_fraction > TRUNCATION_LIMIT
    }
}

#[inline]
pub(crate) fn monomial_sq(x: f64, a: u32) -> f64 {
    let m = x.powi(a as i32);
    m * m
}

/// `sqrt(∫ |ξ^α|² Σ_selected |v|² dξ)` by a full tensor-product sum over the
/// grid, in a fixed order.
pub fn weighted_l2_norm<F>(
    grid: &QuadratureGrid,
    field: F,
    deriv: [u32; 3],
    mask: ComponentMask,
) -> NormEstimate
where
    F: Fn([f64; 3]) -> FieldPair<C64> + Sync,
{
    let [a1, a2, a3] = &grid.axes;
    let (n2, n3) = (a2.len(), a3.len());
    let shell = [grid.shell_flags(0), grid.shell_flags(1), grid.shell_flags(2)];
    let sums = det_sum_vec(a1.len() * n2, 2, |ij, out| {
        let (i, j) = (ij / n2, ij % n2);
        let x1 = a1.nodes[i];
        let x2 = a2.nodes[j];
        let w12 = a1.weights[i] * a2.weights[j] * monomial_sq(x1, deriv[0]) * monomial_sq(x2, deriv[1]);
        let shell12 = shell[0][i] || shell[1][j];
        for k in 0..n3 {
            let x3 = a3.nodes[k];
            let v = field([x1, x2, x3]);
            let mut s = 0.0;
            for c in 0..3 {
                if mask.u[c] {
                    s += v.u[c].norm_sqr();
                }
                if mask.b[c] {
                    s += v.b[c].norm_sqr();
                }
            }
            let term = w12 * a3.weights[k] * monomial_sq(x3, deriv[2]) * s;
            out[0] += term;
            if shell12 || shell[2][k] {
                out[1] += term;
            }
        }
    });
    NormEstimate::from_sums(sums[0], sums[1])
}

/// Per-`(ξ₂, ξ₃)` integrals over `ξ₁` of `ξ₁^{2a}·f_c(ξ)²`, for a list of
/// powers `a` and components `c`. Split into the full line and the part
/// outside the outer shell.
///
/// Any quantity of the form `∫ m(ξ₂, ξ₃, t)·ξ₁^{2a}·f_c(ξ)² dξ` then costs a
/// two-dimensional sum per time.
#[derive(Clone, Debug)]
pub struct SliceMoments {
    powers: Vec<u32>,
    ncomp: usize,
    n3: usize,
    /// Layout `[jk][power][comp][total | inner]`.
    data: Vec<f64>,
}

impl SliceMoments {
    pub fn compute<F, const C: usize>(grid: &QuadratureGrid, powers: &[u32], f: F) -> Self
    where
        F: Fn([f64; 3]) -> [f64; C] + Sync,
    {
        let [a1, a2, a3] = &grid.axes;
        let (n2, n3) = (a2.len(), a3.len());
        let shell1 = grid.shell_flags(0);
        let stride = powers.len() * C * 2;
        let mut data = vec![0.0; n2 * n3 * stride];
        data.par_chunks_mut(n3 * stride)
            .enumerate()
            .for_each(|(j, row)| {
                let x2 = a2.nodes[j];
                for k in 0..n3 {
                    let x3 = a3.nodes[k];
                    let cell = &mut row[k * stride..(k + 1) * stride];
                    for (i, (&x1, &w1)) in a1.nodes.iter().zip(&a1.weights).enumerate() {
                        let v = f([x1, x2, x3]);
                        let inner = !shell1[i];
                        for (pi, &p) in powers.iter().enumerate() {
                            let wp = w1 * monomial_sq(x1, p);
                            for c in 0..C {
                                let term = wp * v[c] * v[c];
                                let at = (pi * C + c) * 2;
                                cell[at] += term;
                                if inner {
                                    cell[at + 1] += term;
                                }
                            }
                        }
                    }
                }
            });
        Self {
            powers: powers.to_vec(),
            ncomp: C,
            n3,
            data,
        }
    }

    pub fn power_index(&self, a: u32) -> Option<usize> {
        self.powers.iter().position(|&p| p == a)
    }

    /// `(total, inner)` moment at flattened plane index `jk`.
    #[inline]
    pub fn get(&self, jk: usize, power_idx: usize, comp: usize) -> (f64, f64) {
        let at = ((jk * self.powers.len() + power_idx) * self.ncomp + comp) * 2;
        (self.data[at], self.data[at + 1])
    }

    pub fn plane_len(&self) -> usize {
        self.data.len() / (self.powers.len() * self.ncomp * 2)
    }

    pub fn n3(&self) -> usize {
        self.n3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(x: [f64; 3]) -> FieldPair<C64> {
        let g = (-0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp();
        let z = C64::new(0.0, 0.0);
        FieldPair {
            u: [C64::new(g, 0.0), z, z],
            b: [z; 3],
        }
    }

    #[test]
    fn axis_rules_are_symmetric_and_positive() {
        for p in [QuadraturePreset::LogGraded, QuadraturePreset::UniformGeometric] {
            let g = QuadratureGrid::preset(p);
            let a = &g.axes[0];
            let n = a.len();
            for i in 0..n {
                assert!(a.weights[i] > 0.0);
                assert!((a.nodes[i] + a.nodes[n - 1 - i]).abs() < 1e-13);
                assert!((a.weights[i] - a.weights[n - 1 - i]).abs() < 1e-13);
            }
        }
        assert_eq!(QuadratureGrid::preset(QuadraturePreset::LogGraded).axes[0].len(), 435);
        assert_eq!(
            QuadratureGrid::preset(QuadraturePreset::UniformGeometric).axes[0].len(),
            192
        );
    }

    fn moment_errors(a: &AxisRule) -> (f64, f64) {
        // ∫ e^{−x²} dx = √π and ∫ x² e^{−x²} dx = √π/2.
        let m0: f64 = a.nodes.iter().zip(&a.weights).map(|(x, w)| w * (-x * x).exp()).sum();
        let m2: f64 = a
            .nodes
            .iter()
            .zip(&a.weights)
            .map(|(x, w)| w * x * x * (-x * x).exp())
            .sum();
        ((m0 / PI.sqrt() - 1.0).abs(), (m2 / (0.5 * PI.sqrt()) - 1.0).abs())
    }

    #[test]
    fn one_dimensional_gaussian_moments() {
        // The log-graded rule is the trapezoid rule in ln|ξ| on an analytic
        // integrand, hence far more accurate than the piecewise-linear
        // uniform/geometric rule.
        let (e0, e2) = moment_errors(&QuadratureGrid::preset(QuadraturePreset::LogGraded).axes[0]);
        assert!(e0 < 1e-9 && e2 < 1e-9, "{e0} {e2}");
        let (e0, e2) =
            moment_errors(&QuadratureGrid::preset(QuadraturePreset::UniformGeometric).axes[0]);
        assert!(e0 < 1e-3 && e2 < 1e-3, "{e0} {e2}");
    }

    #[test]
    fn gaussian_norm_examples() {
        let zero_field = |_| FieldPair {
            u: [C64::new(0.0, 0.0); 3],
            b: [C64::new(0.0, 0.0); 3],
        };
        let coarse = QuadratureGrid::preset(QuadraturePreset::UniformGeometric);
        assert_eq!(weighted_l2_norm(&coarse, zero_field, [0; 3], ComponentMask::ALL).value, 0.0);

        // ∫ e^{−|ξ|²} dξ = π^{3/2}; the ξ₁² moment halves it.
        let exact0 = PI.powf(0.75);
        let exact1 = PI.powf(0.75) / 2f64.sqrt();
        let log = QuadratureGrid::isotropic(AxisRule::log_graded(1e-6, 32.0, 0.16).unwrap());
        for (g, tol) in [(&log, 1e-8), (&coarse, 1e-3)] {
            let n0 = weighted_l2_norm(g, gaussian, [0, 0, 0], ComponentMask::ALL);
            let n1 = weighted_l2_norm(g, gaussian, [1, 0, 0], ComponentMask::ALL);
            assert!((n0.value / exact0 - 1.0).abs() < tol, "{}", n0.value);
            assert!((n1.value / exact1 - 1.0).abs() < tol, "{}", n1.value);
            assert!(!n0.truncated());
        }
    }

    #[test]
    fn truncation_is_reported_for_wide_data() {
        let g = QuadratureGrid::preset(QuadraturePreset::UniformGeometric);
        let wide = |x: [f64; 3]| {
            let v = (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 400.0).exp();
            let z = C64::new(0.0, 0.0);
            FieldPair {
                u: [C64::new(v, 0.0), z, z],
                b: [z; 3],
            }
        };
        assert!(weighted_l2_norm(&g, wide, [0; 3], ComponentMask::ALL).truncated());
    }

    #[test]
    fn slice_moments_reproduce_direct_sum() {
        let g = QuadratureGrid::isotropic(AxisRule::uniform_geometric(16, 16, 32.0).unwrap());
        let f = |x: [f64; 3]| {
            let v = (-0.5 * (x[0] * x[0] + 2.0 * x[1] * x[1] + x[2] * x[2])).exp();
            [v, x[0] * v]
        };
        let m = SliceMoments::compute(&g, &[0, 1], f);
        let mut total = 0.0;
        for j in 0..g.axes[1].len() {
            for k in 0..g.axes[2].len() {
                let jk = j * m.n3() + k;
                total += g.axes[1].weights[j] * g.axes[2].weights[k] * m.get(jk, 1, 1).0;
            }
        }
        let direct = weighted_l2_norm(
            &g,
            |x| {
                let z = C64::new(0.0, 0.0);
                FieldPair {
                    u: [C64::new(f(x)[1], 0.0), z, z],
                    b: [z; 3],
                }
            },
            [1, 0, 0],
            ComponentMask::ALL,
        );
        assert!((total.sqrt() / direct.value - 1.0).abs() < 1e-12);
    }
}
