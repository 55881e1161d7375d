//! Whole-space linear evolution of analytic initial spectra, frequency
//! quadrature of anisotropic norms, and power-law fitting.

pub mod catalog;
pub mod fit;
pub mod quadrature;
pub mod spectrum;

pub use catalog::{decay_catalog_run, linear_norm_series, CatalogEntry, DecayConfig};
pub use fit::{decay_exponent_fit, DecaySeries, MIN_FIT_SAMPLES};
pub use quadrature::{
    weighted_l2_norm, AxisRule, ComponentMask, NormEstimate, QuadratureGrid, QuadraturePreset,
    SliceMoments, TRUNCATION_LIMIT,
};
pub use spectrum::{leray_point, AnalyticSpectrum, FieldPair, ProfileTable, SpectrumKind};

use crate::kernel::{PhysicalParams, RealKernel, Wavevector, C64};

/// `(û, b̂)(ξ, t)` from the linear part of the Duhamel formula: the kernel
/// matrix applied to every component pair of the initial spectrum.
pub fn evolve_linear(
    spec0: &AnalyticSpectrum,
    xi: &Wavevector,
    p: &PhysicalParams,
    t: f64,
) -> FieldPair<C64> {
    let v = spec0.evaluate(xi.as_array());
    let v = FieldPair {
        u: v.u.map(|x| C64::new(x, 0.0)),
        b: v.b.map(|x| C64::new(x, 0.0)),
    };
    spectrum::apply_kernel(&RealKernel::evaluate(xi, p, t), &v)
}
