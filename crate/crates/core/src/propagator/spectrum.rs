use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::kernel::{RealKernel, C64};

/// Piecewise-linear profile on a sorted abscissa, zero outside it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl ProfileTable {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(invalid("table", "needs at least two (x, y) pairs of equal length"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("table", "abscissae must be strictly increasing"));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(invalid("table", "entries must be finite"));
        }
        Ok(Self { xs, ys })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let xs = &self.xs;
        if x < xs[0] || x > xs[xs.len() - 1] {
            return 0.0;
        }
        let j = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
        let (x0, x1) = (xs[j - 1], xs[j]);
        let w = (x - x0) / (x1 - x0);
        self.ys[j - 1] * (1.0 - w) + self.ys[j] * w
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpectrumKind {
    /// `exp(−(w₁²ξ₁² + w₂²ξ₂² + w₃²ξ₃²)/2)`.
    GaussianVector { width: [f64; 3] },
    /// Product of three per-axis tables.
    UserTable { axes: [ProfileTable; 3] },
}

/// A real-valued initial spectrum pair `(û₀, b̂₀)`: a scalar profile times a
/// fixed amplitude vector for each field, optionally Leray-projected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSpectrum {
    pub kind: SpectrumKind,
    pub u_amplitude: [f64; 3],
    pub b_amplitude: [f64; 3],
    pub divergence_free_projected: bool,
}

/// Values of both fields at one frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldPair<T> {
    pub u: [T; 3],
    pub b: [T; 3],
}

impl AnalyticSpectrum {
    pub fn gaussian(u_amplitude: [f64; 3], b_amplitude: [f64; 3], width: [f64; 3]) -> Result<Self> {
        if width.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid("width", "Gaussian widths must be finite and > 0"));
        }
        Ok(Self {
            kind: SpectrumKind::GaussianVector { width },
            u_amplitude,
            b_amplitude,
            divergence_free_projected: true,
        })
    }

    /// Default test datum: unit-width Gaussians with generic amplitudes.
    pub fn default_pair() -> Self {
        Self::gaussian([1.0, 0.7, -0.4], [0.5, -0.3, 0.9], [1.0; 3]).unwrap()
    }

    pub fn with_projection(mut self, on: bool) -> Self {
        self.divergence_free_projected = on;
        self
    }

    pub fn profile(&self, xi: [f64; 3]) -> f64 {
        match &self.kind {
            SpectrumKind::GaussianVector { width } => {
                let e: f64 = (0..3).map(|j| (width[j] * xi[j]).powi(2)).sum();
                (-0.5 * e).exp()
            }
            SpectrumKind::UserTable { axes } => {
                axes[0].eval(xi[0]) * axes[1].eval(xi[1]) * axes[2].eval(xi[2])
            }
        }
    }

    pub fn evaluate(&self, xi: [f64; 3]) -> FieldPair<f64> {
        let g = self.profile(xi);
        let mut u = self.u_amplitude.map(|a| a * g);
        let mut b = self.b_amplitude.map(|a| a * g);
        if self.divergence_free_projected {
            u = leray_point(xi, u);
            b = leray_point(xi, b);
        }
        FieldPair { u, b }
    }
}

/// `v − ξ(ξ·v)/|ξ|²`, identity at `ξ = 0`.
pub fn leray_point(xi: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    let n2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if n2 == 0.0 {
        return v;
    }
    let d = (xi[0] * v[0] + xi[1] * v[1] + xi[2] * v[2]) / n2;
    [v[0] - d * xi[0], v[1] - d * xi[1], v[2] - d * xi[2]]
}

/// Applies the kernel matrix to every component pair `(ûᵢ, b̂ᵢ)`.
pub fn apply_kernel(k: &RealKernel, v: &FieldPair<C64>) -> FieldPair<C64> {
    let mut out = *v;
    for i in 0..3 {
        let (u, b) = k.apply(v.u[i], v.b[i]);
        out.u[i] = u;
        out.b[i] = b;
    }
    out
}
