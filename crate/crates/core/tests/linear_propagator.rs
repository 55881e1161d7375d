use anisomhd::kernel::{
    kernel_triple, matrix_exponential_oracle, propagator_scalars, eigen_data, PhysicalParams,
    Wavevector, C64,
};
use anisomhd::propagator::{
    decay_catalog_run, evolve_linear, linear_norm_series, weighted_l2_norm, AnalyticSpectrum,
    AxisRule, CatalogEntry, ComponentMask, DecayConfig, QuadratureGrid, QuadraturePreset,
};

fn pp(mu: f64, eta: f64) -> PhysicalParams {
    PhysicalParams::new(mu, eta).unwrap()
}

#[test]
fn evolve_identity_at_zero() {
    let s = AnalyticSpectrum::default_pair();
    let xi = Wavevector::new(0.4, -0.9, 1.3);
    let v0 = s.evaluate(xi.as_array());
    let v = evolve_linear(&s, &xi, &pp(1.0, 1.0), 0.0);
    for i in 0..3 {
        assert_eq!(v.u[i], C64::new(v0.u[i], 0.0));
        assert_eq!(v.b[i], C64::new(v0.b[i], 0.0));
    }
}

#[test]
fn evolve_decoupled_heat_factor() {
    let s = AnalyticSpectrum::gaussian([0.3, -1.0, 0.2], [0.0; 3], [1.0; 3])
        .unwrap()
        .with_projection(false);
    let p = pp(0.7, 1.9);
    let xi = Wavevector::new(0.5, 0.0, 1.2);
    let t = 0.8;
    let v0 = s.evaluate(xi.as_array());
    let v = evolve_linear(&s, &xi, &p, t);
    let heat = (-p.mu * xi.xi3 * xi.xi3 * t).exp();
    for i in 0..3 {
        assert!((v.u[i] - C64::new(heat * v0.u[i], 0.0)).norm() < 1e-15);
        assert_eq!(v.b[i], C64::new(0.0, 0.0));
    }
}

#[test]
fn evolve_single_component_matches_oracle() {
    let s = AnalyticSpectrum::gaussian([0.0, 1.0, 0.0], [0.0; 3], [1.0; 3])
        .unwrap()
        .with_projection(false);
    let p = pp(1.0, 1.0);
    let xi = Wavevector::new(0.0, 1.0, 0.0);
    let g0 = s.profile(xi.as_array());
    let v = evolve_linear(&s, &xi, &p, 1.0);
    let m = matrix_exponential_oracle(&xi, &p, 1.0);
    // Oracle times the initial vector (ĝ, 0).
    assert!((v.u[1] - m[0][0] * g0).norm() < 1e-12);
    assert!((v.b[1] - m[1][0] * g0).norm() < 1e-12);
    let g = propagator_scalars(&eigen_data(&xi, &p), 1.0);
    assert!((v.u[1] - g.g2 * g0).norm() < 1e-15);
    assert!((v.b[1] - C64::new(0.0, 1.0) * g.g1 * g0).norm() < 1e-15);
}

#[test]
fn evolve_is_linear_and_preserves_divergence() {
    let p = pp(0.6, 1.4);
    let a = AnalyticSpectrum::gaussian([1.0, 0.2, -0.5], [0.1, 0.4, 0.3], [1.0, 0.8, 1.3]).unwrap();
    let b = AnalyticSpectrum::gaussian([-0.2, 0.9, 0.1], [0.7, -0.4, 0.2], [1.0, 0.8, 1.3]).unwrap();
    let sum = AnalyticSpectrum::gaussian([0.8, 1.1, -0.4], [0.8, 0.0, 0.5], [1.0, 0.8, 1.3]).unwrap();
    for &(x, t) in &[([0.3, 1.2, -0.7], 0.5), ([2.0, -0.1, 0.05], 3.0), ([-0.4, 0.0, 1.0], 1.0)] {
        let xi = Wavevector::from_array(x);
        let (va, vb, vs) = (
            evolve_linear(&a, &xi, &p, t),
            evolve_linear(&b, &xi, &p, t),
            evolve_linear(&sum, &xi, &p, t),
        );
        let mut du = C64::new(0.0, 0.0);
        let mut db = C64::new(0.0, 0.0);
        for i in 0..3 {
            assert!((va.u[i] + vb.u[i] - vs.u[i]).norm() < 1e-14);
            assert!((va.b[i] + vb.b[i] - vs.b[i]).norm() < 1e-14);
            du += vs.u[i] * x[i];
            db += vs.b[i] * x[i];
        }
        assert!(du.norm() < 1e-15 && db.norm() < 1e-15);
    }
}

#[test]
fn real_data_stays_conjugate_symmetric() {
    let s = AnalyticSpectrum::default_pair();
    let p = pp(1.0, 1.0);
    let xi = Wavevector::new(0.7, -1.1, 0.4);
    let v = evolve_linear(&s, &xi, &p, 2.0);
    let w = evolve_linear(&s, &-xi, &p, 2.0);
    for i in 0..3 {
        assert!((v.u[i] - w.u[i].conj()).norm() < 1e-15);
        assert!((v.b[i] - w.b[i].conj()).norm() < 1e-15);
    }
}

#[test]
fn factorized_norms_match_direct_tensor_sum() {
    let grid = QuadratureGrid::isotropic(AxisRule::uniform_geometric(24, 24, 32.0).unwrap());
    let s = AnalyticSpectrum::default_pair();
    let p = pp(0.8, 1.3);
    let entries = [CatalogEntry::L2Total, CatalogEntry::D2D3U1, CatalogEntry::D333U1];
    let norms: Vec<_> = entries.iter().map(|e| (e.deriv(), e.mask())).collect();
    let times = [0.5, 7.0];
    let fast = linear_norm_series(&grid, &s, &p, &times, &norms);
    for (ti, &t) in times.iter().enumerate() {
        for (n, e) in entries.iter().enumerate() {
            let direct =
                weighted_l2_norm(&grid, |x| evolve_linear(&s, &Wavevector::from_array(x), &p, t), e.deriv(), e.mask());
            let rel = (fast[ti][n].0 / direct.value - 1.0).abs();
            assert!(rel < 1e-12, "{:?} t={t}: {rel}", e);
        }
    }
}

#[test]
fn norm_converges_under_refinement() {
    let s = AnalyticSpectrum::default_pair();
    let p = pp(1.0, 1.0);
    let norms = [([0, 0, 1], ComponentMask::FIRST), ([0, 0, 0], ComponentMask::ALL)];
    let t = [100.0];
    let a = linear_norm_series(&QuadratureGrid::preset(QuadraturePreset::LogGraded), &s, &p, &t, &norms);
    let b = linear_norm_series(&QuadratureGrid::preset(QuadraturePreset::LogGradedFine), &s, &p, &t, &norms);
    for n in 0..norms.len() {
        let rel = (a[0][n].0 / b[0][n].0 - 1.0).abs();
        assert!(rel < 1e-6, "{n}: {rel}");
    }
}

#[test]
fn kernel_is_independent_of_xi1() {
    let p = pp(1.2, 0.4);
    let a = kernel_triple(&Wavevector::new(0.0, 0.3, 0.9), &p, 2.0);
    let b = kernel_triple(&Wavevector::new(17.0, 0.3, 0.9), &p, 2.0);
    assert_eq!(a, b);
}

#[test]
fn catalog_exponents_match_targets() {
    let series = decay_catalog_run(&DecayConfig::default()).unwrap();
    assert_eq!(series.len(), CatalogEntry::ALL.len());
    for s in &series {
        assert!(!s.truncated(), "{} shell {}", s.label, s.shell_fraction);
        let err = s.abs_error().unwrap();
        assert!(err <= 0.05, "{}: exponent {:?} target {:?}", s.label, s.fitted_exponent, s.target);
    }
}
