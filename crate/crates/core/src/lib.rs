//! Fourier semigroup kernels, a dealiased pseudo-spectral solver and a
//! decay-rate harness for the 3D incompressible MHD perturbation system with
//! vertical-only velocity dissipation near a background field along `e₂`.

pub mod diagnostics;
pub mod error;
pub mod inequality;
pub mod kernel;
pub mod numerics;
pub mod propagator;
pub mod solver;

pub use error::{Error, Result};
