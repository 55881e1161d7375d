//! Numerical checks of the functional-analytic toolkit: the 1D Agmon
//! inequality, anisotropic triple and quadruple product bounds, heat-type
//! decay of anisotropic multipliers, and time-convolution growth laws.

mod convolution;
mod decay;
mod products;

pub use convolution::{
    convolution_bound_check, convolution_fit, id_sweep, BranchFit, Convolution, ConvolutionConfig,
    BRANCH_TOLERANCE, ID_SWEEP_S1, ID_SWEEP_S2, INTEGRAL_TOL,
};
pub use decay::{
    divergence_free_gain, divfree_decay_check, divfree_decay_series, heat_decay_check,
    heat_decay_series, DecayCheckConfig, ScalarDatum,
};
pub use products::{
    agmon_ratio, centered_point, check_agmon_1d, check_quadruple_product, check_triple_product,
    gaussian_field, quadruple_ratio, random_smooth_1d, random_smooth_3d, triple_ratio,
    write_results_csv, H1Kind, InequalityResult, Sample1d, AGMON_THRESHOLD, QUADRUPLE_THRESHOLD,
    TAIL_LIMIT, TRIPLE_THRESHOLD,
};
