//! Dealiased pseudo-spectral solver for the nonlinear perturbation system on
//! a periodic box:
//!
//! ```text
//!     ∂ₜu − μ∂₃²u − ∂₂b = ℙ(b·∇b − u·∇u)
//!     ∂ₜb − η(∂₂² + ∂₃²)b − ∂₂u = b·∇u − u·∇b
//! ```
//!
//! The linear part is propagated exactly per mode with the kernel matrix; the
//! nonlinear terms are formed in physical space from 2/3-truncated fields.

mod checkpoint;
pub mod fft;
pub mod grid;
mod init;
mod ops;
mod stepper;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, CHECKPOINT_MAGIC};
pub use fft::Fft3;
pub use grid::Grid;
pub use init::{init_random_smooth, translate};
pub use ops::{
    divergence_residual, leray_project, nonlinear_rhs, nonlinear_transfer, p1_component_spectrum,
    pressure_spectrum, NonlinearTerms, SpectralOps,
};
pub use stepper::{step_if_rk2, Stepper, BLOW_UP_FACTOR, CFL_LIMIT};

use crate::kernel::C64;

pub type VectorField = [Vec<C64>; 3];

/// Fourier coefficients of `(u, b)` on a [`Grid`] at a given time.
/// Coefficients are series amplitudes: `f(x) = Σ ĉ(k) e^{iξ·x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralState {
    pub grid: Grid,
    pub u: VectorField,
    pub b: VectorField,
    pub time: f64,
}

pub(crate) fn zero_field(len: usize) -> VectorField {
    [0, 1, 2].map(|_| vec![C64::default(); len])
}

impl SpectralState {
    pub fn zeros(grid: Grid) -> Self {
        let len = grid.len();
        Self {
            grid,
            u: zero_field(len),
            b: zero_field(len),
            time: 0.0,
        }
    }

    /// The six component arrays `u₁, u₂, u₃, b₁, b₂, b₃`.
    pub fn components(&self) -> [&Vec<C64>; 6] {
        [&self.u[0], &self.u[1], &self.u[2], &self.b[0], &self.b[1], &self.b[2]]
    }

    pub fn components_mut(&mut self) -> [&mut Vec<C64>; 6] {
        let [u0, u1, u2] = &mut self.u;
        let [b0, b1, b2] = &mut self.b;
        [u0, u1, u2, b0, b1, b2]
    }

    /// `‖(u, b)‖²_{L²}` over the box.
    pub fn l2_sq(&self) -> f64 {
        crate::diagnostics::weighted_sq(self, |_| 1.0, [true; 6])
    }

    /// Largest `|ĉ(k) − conj ĉ(−k)|` over all components.
    pub fn symmetry_defect(&self) -> f64 {
        let g = &self.grid;
        self.components()
            .iter()
            .flat_map(|c| (0..g.len()).map(move |i| (c[i] - c[g.mirror(i)].conj()).norm()))
            .fold(0.0, f64::max)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.components()
            .iter()
            .flat_map(|c| c.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }
}
