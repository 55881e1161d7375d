//! Exact per-frequency evaluation of the linearized perturbation system.
//!
//! For every wavevector the linear operator acts on each component pair
//! `(û_i, b̂_i)` through the 2×2 generator
//!
//! ```text
//!     A(ξ) = [ -μ ξ₃²        i ξ₂            ]
//!            [  i ξ₂      -η (ξ₂² + ξ₃²)     ]
//! ```
//!
//! whose exponential `exp(tA)` is written in closed form through the three
//! propagator scalars `G₁, G₂, G₃`. The closed forms here are arranged so that
//! no branch subtracts nearly equal exponentials; the matrix-exponential
//! oracle in [`expm`] is an independent route to the same matrix.

mod domain;
pub mod expm;
pub mod sampling;

pub use domain::{
    check_bounds, classify_frequency, omega1_conditions, BoundKind, BoundRecord, BoundReport,
    DomainTag, CALIBRATED_C,
};
pub use expm::matrix_exponential_oracle;

use num_complex::Complex64;

use crate::error::{invalid, Result};

pub type C64 = Complex64;

/// Gap between the eigenvalues, relative to `max(1, s_trace)`, below which a
/// mode is treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-6;

/// Largest `|λ₂ − λ₁|·t` for which the degenerate series is used. Beyond it
/// the truncated series would lose accuracy while the closed forms are
/// already free of cancellation.
pub const SERIES_SWITCH: f64 = 1e-3;

/// A point in frequency space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wavevector {
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
    /// `ξ₂² + ξ₃²`, computed once from the stored components.
    pub xi_nu_sq: f64,
}

impl Wavevector {
    pub fn new(xi1: f64, xi2: f64, xi3: f64) -> Self {
        debug_assert!(xi1.is_finite() && xi2.is_finite() && xi3.is_finite());
        Self {
            xi1,
            xi2,
            xi3,
            xi_nu_sq: xi2 * xi2 + xi3 * xi3,
        }
    }

    pub fn from_array(xi: [f64; 3]) -> Self {
        Self::new(xi[0], xi[1], xi[2])
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.xi1, self.xi2, self.xi3]
    }

    pub fn norm_sq(&self) -> f64 {
        self.xi1 * self.xi1 + self.xi_nu_sq
    }
}

impl std::ops::Neg for Wavevector {
    type Output = Wavevector;

    fn neg(self) -> Wavevector {
        Wavevector::new(-self.xi1, -self.xi2, -self.xi3)
    }
}

/// Viscosity `mu` and magnetic diffusivity `eta`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhysicalParams {
    pub mu: f64,
    pub eta: f64,
}

impl PhysicalParams {
    pub fn new(mu: f64, eta: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(invalid("mu", format!("must be finite and > 0, got {mu}")));
        }
        if !(eta.is_finite() && eta > 0.0) {
            return Err(invalid("eta", format!("must be finite and > 0, got {eta}")));
        }
        Ok(Self { mu, eta })
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self { mu: 1.0, eta: 1.0 }
    }
}

/// Discriminant and eigenvalues of the per-mode generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenData {
    pub gamma: f64,
    pub lambda1: C64,
    pub lambda2: C64,
    /// `μξ₃² + ηξ_ν²`, minus the trace of the generator.
    pub s_trace: f64,
    /// `μηξ₃²ξ_ν² + ξ₂²`, the determinant of the generator.
    pub q_det: f64,
    pub degenerate: bool,
    pub oscillatory: bool,
    /// `|λ₂ − λ₁| = sqrt(|Γ|)`, kept separately so it never comes from a
    /// difference of eigenvalues.
    gap: f64,
}

impl EigenData {
    /// `λ₂ − λ₁`.
    pub fn gap(&self) -> C64 {
        if self.oscillatory {
            C64::new(0.0, self.gap)
        } else {
            C64::new(self.gap, 0.0)
        }
    }
}

pub fn eigen_data(xi: &Wavevector, p: &PhysicalParams) -> EigenData {
    let a = p.mu * xi.xi3 * xi.xi3;
    let b = p.eta * xi.xi_nu_sq;
    let s = a + b;
    let q = a * b + xi.xi2 * xi.xi2;
    // Γ = s² − 4q = (a − b)² − 4ξ₂²; the factored form avoids the
    // cancellation of the first expression.
    let d = a - b;
    let two_xi2 = 2.0 * xi.xi2.abs();
    let gamma = (d - two_xi2) * (d + two_xi2);
    let gap = gamma.abs().sqrt();
    let degenerate = gap <= DEGENERACY_TOL * s.max(1.0);
    if gamma < 0.0 {
        let re = -0.5 * s;
        let im = 0.5 * gap;
        EigenData {
            gamma,
            lambda1: C64::new(re, -im),
            lambda2: C64::new(re, im),
            s_trace: s,
            q_det: q,
            degenerate,
            oscillatory: true,
            gap,
        }
    } else {
        let sum = s + gap;
        let lambda1 = -0.5 * sum;
        // λ₂ = (−s + √Γ)/2 rewritten through the product of the roots.
        let lambda2 = if sum > 0.0 { -2.0 * q / sum } else { 0.0 };
        EigenData {
            gamma,
            lambda1: C64::new(lambda1, 0.0),
            lambda2: C64::new(lambda2, 0.0),
            s_trace: s,
            q_det: q,
            degenerate,
            oscillatory: false,
            gap,
        }
    }
}

/// `G₁, G₂, G₃` at time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorScalars {
    pub g1: C64,
    pub g2: C64,
    pub g3: C64,
    pub t: f64,
}

/// The propagator scalars are real for every admissible mode: in the
/// oscillatory case the eigenvalues are a conjugate pair and every `Gᵢ` is
/// symmetric in them.
pub fn real_scalars(e: &EigenData, t: f64) -> [f64; 3] {
    debug_assert!(t >= 0.0);
    if t == 0.0 {
        return [0.0, 1.0, 1.0];
    }
    let x_abs = e.gap * t;
    if e.degenerate && x_abs <= SERIES_SWITCH {
        // G₁ = t·e^{λ₁t}·(e^x − 1)/x with x = (λ₂ − λ₁)t, to third order.
        let x = e.gap() * t;
        let l1 = e.lambda1;
        let e1 = (l1 * t).exp();
        let series = C64::new(1.0, 0.0) + x * (0.5 + x * (1.0 / 6.0 + x / 24.0));
        let g1 = e1 * t * series;
        let g2 = e1 - l1 * g1;
        let g3 = (e.lambda2 * t).exp() + l1 * g1;
        return [g1.re, g2.re, g3.re];
    }
    if e.oscillatory {
        let m = e.lambda1.re;
        let omega = 0.5 * e.gap;
        let em = (m * t).exp();
        let (sin, cos) = (omega * t).sin_cos();
        let sinc = if omega > 0.0 { sin / omega } else { t };
        [em * sinc, em * (cos - m * sinc), em * (cos + m * sinc)]
    } else {
        let l1 = e.lambda1.re;
        let l2 = e.lambda2.re;
        let e2 = (l2 * t).exp();
        // G₁ = e^{λ₂t}(1 − e^{−δt})/δ with δ = λ₂ − λ₁ ≥ 0.
        let phi = if x_abs > 0.0 { -(-x_abs).exp_m1() / x_abs } else { 1.0 };
        let g1 = e2 * t * phi;
        [g1, e2 - l2 * g1, e2 + l1 * g1]
    }
}

pub fn propagator_scalars(e: &EigenData, t: f64) -> PropagatorScalars {
    let [g1, g2, g3] = real_scalars(e, t);
    PropagatorScalars {
        g1: C64::new(g1, 0.0),
        g2: C64::new(g2, 0.0),
        g3: C64::new(g3, 0.0),
        t,
    }
}

/// Entries of `exp(tA) = [[K̂₁, K̂₂], [K̂₂, K̂₃]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelTriple {
    pub k1: C64,
    pub k2: C64,
    pub k3: C64,
}

impl KernelTriple {
    pub const IDENTITY: KernelTriple = KernelTriple {
        k1: C64::new(1.0, 0.0),
        k2: C64::new(0.0, 0.0),
        k3: C64::new(1.0, 0.0),
    };

    pub fn matrix(&self) -> [[C64; 2]; 2] {
        [[self.k1, self.k2], [self.k2, self.k3]]
    }

    /// `(K̂₁u + K̂₂b, K̂₂u + K̂₃b)`.
    #[inline]
    pub fn apply(&self, u: C64, b: C64) -> (C64, C64) {
        (self.k1 * u + self.k2 * b, self.k2 * u + self.k3 * b)
    }
}

/// Real-valued kernel `(K̂₁, Im K̂₂, K̂₃)`; `K̂₂` is always purely imaginary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealKernel {
    pub k1: f64,
    pub k2_im: f64,
    pub k3: f64,
}

impl RealKernel {
    pub fn evaluate(xi: &Wavevector, p: &PhysicalParams, t: f64) -> Self {
        let e = eigen_data(xi, p);
        let [g1, g2, g3] = real_scalars(&e, t);
        let a = p.mu * xi.xi3 * xi.xi3;
        RealKernel {
            k1: -a * g1 + g2,
            k2_im: xi.xi2 * g1,
            k3: a * g1 + g3,
        }
    }

    #[inline]
    pub fn apply(&self, u: C64, b: C64) -> (C64, C64) {
        let iu = C64::new(-u.im, u.re) * self.k2_im;
        let ib = C64::new(-b.im, b.re) * self.k2_im;
        (u * self.k1 + ib, iu + b * self.k3)
    }

    pub fn triple(&self) -> KernelTriple {
        KernelTriple {
            k1: C64::new(self.k1, 0.0),
            k2: C64::new(0.0, self.k2_im),
            k3: C64::new(self.k3, 0.0),
        }
    }
}

pub fn kernel_triple(xi: &Wavevector, p: &PhysicalParams, t: f64) -> KernelTriple {
    RealKernel::evaluate(xi, p, t).triple()
}

/// Largest entrywise deviation between two 2×2 matrices divided by the
/// largest entry magnitude of `reference` (floored at `1e-250`).
pub fn matrix_rel_error(m: &[[C64; 2]; 2], reference: &[[C64; 2]; 2]) -> f64 {
    let mut scale: f64 = 1e-250;
    let mut err: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            scale = scale.max(reference[i][j].norm());
            err = err.max((m[i][j] - reference[i][j]).norm());
        }
    }
    err / scale
}
