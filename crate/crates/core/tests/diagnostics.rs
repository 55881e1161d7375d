use std::f64::consts::PI;

use anisomhd::diagnostics::{
    minkowski_pair, mixed_norm_l2x1_l1x23, physical_l2, sobolev_norm, u1_23_pair, ComponentSelector,
    EnergyLedger, NormKind, NormSpec,
};
use anisomhd::kernel::{PhysicalParams, C64};
use anisomhd::solver::{init_random_smooth, Grid, SpectralOps, SpectralState, Stepper};
use anisomhd::Error;

fn slot(g: &Grid, k: [i64; 3]) -> usize {
    g.index([0, 1, 2].map(|a| k[a].rem_euclid(g.n[a] as i64) as usize))
}

#[test]
fn sobolev_single_mode_parseval() {
    let g = Grid::new([8, 8, 8], [2.0 * PI, 3.0, 5.0]).unwrap();
    let mut s = SpectralState::zeros(g);
    let a = C64::new(0.3, -0.4);
    s.u[1][slot(&g, [1, 0, 0])] = a;
    s.u[1][slot(&g, [-1, 0, 0])] = a.conj();
    assert_eq!(sobolev_norm(&SpectralState::zeros(g), 3), 0.0);
    let expect = 2f64.sqrt() * a.norm() * g.volume().sqrt();
    assert!((sobolev_norm(&s, 0) / expect - 1.0).abs() < 1e-14);
    // Physical-space check of the same number.
    let f = SpectralOps::new(&g).to_physical(&s.u[1]);
    assert!((physical_l2(&g, &f) / expect - 1.0).abs() < 1e-14);
}

#[test]
fn multiplier_and_derivative_sum_forms_are_equivalent() {
    let g = Grid::cube(16).unwrap();
    let h3 = NormSpec::new([0, 0, 0], ComponentSelector::All, NormKind::Hk(3));
    for seed in 0..6 {
        let s = init_random_smooth(&g, seed, 1.0, 0.5 * seed as f64).unwrap();
        let ratio = sobolev_norm(&s, 3) / h3.evaluate(&s);
        assert!((1.0..=6f64.sqrt()).contains(&ratio), "seed {seed}: {ratio}");
        for k in 0..4 {
            assert!(sobolev_norm(&s, k) <= sobolev_norm(&s, k + 1));
        }
    }
    // k = 0: both forms are the L² norm.
    let s = init_random_smooth(&g, 3, 1.0, 2.0).unwrap();
    let l2 = NormSpec::new([0, 0, 0], ComponentSelector::All, NormKind::Hk(0)).evaluate(&s);
    assert!((l2 / sobolev_norm(&s, 0) - 1.0).abs() < 1e-14);
}

#[test]
fn mixed_norm_of_separable_field() {
    let g = Grid::new([32, 48, 64], [2.0 * PI, 4.0, 6.0]).unwrap();
    let (l2, l3) = (g.lengths[1], g.lengths[2]);
    let gx = |x: f64| x.sin() + 0.5 * (2.0 * x).cos();
    let hx = |y: f64| 1.0 + 0.5 * (2.0 * PI * y / l2).cos();
    let ix = |z: f64| (2.0 * PI * z / l3).sin();
    let f: Vec<f64> = (0..g.len())
        .map(|p| {
            let x = g.point(p);
            gx(x[0]) * hx(x[1]) * ix(x[2])
        })
        .collect();
    // ‖g‖_{L²} = √(π + π/4), ‖h‖_{L¹} = L₂, ‖i‖_{L¹} = 2L₃/π.
    let expect = (1.25 * PI).sqrt() * l2 * (2.0 * l3 / PI);
    let got = mixed_norm_l2x1_l1x23(&g, &f);
    assert!((got / expect - 1.0).abs() < 2e-3, "{got} vs {expect}");
}

#[test]
fn minkowski_and_holder_on_random_fields() {
    let g = Grid::new([16, 16, 16], [2.0 * PI, 3.0, 7.0]).unwrap();
    let ops = SpectralOps::new(&g);
    let box23 = (g.lengths[1] * g.lengths[2]).sqrt();
    for seed in 0..8 {
        let s = init_random_smooth(&g, seed, 1.0, 1.0).unwrap();
        for c in s.components() {
            let f = ops.to_physical(c);
            let (lhs, rhs) = minkowski_pair(&g, &f);
            assert!(lhs <= rhs * (1.0 + 1e-12), "seed {seed}: {lhs} > {rhs}");
            assert!(lhs <= box23 * physical_l2(&g, &f) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn mixed_norm_spec_uses_selected_components() {
    let g = Grid::cube(8).unwrap();
    let mut s = SpectralState::zeros(g);
    s.u[0][0] = C64::new(2.0, 0.0);
    s.b[2][0] = C64::new(5.0, 0.0);
    let first = NormSpec::new([0, 0, 0], ComponentSelector::First, NormKind::MixedL2x1L1x23).evaluate(&s);
    let vol = g.volume();
    assert!((first - 2.0 * vol / (2.0 * PI).sqrt()).abs() < 1e-12 * first);
    let all = NormSpec::new([0, 0, 0], ComponentSelector::All, NormKind::MixedL2x1L1x23).evaluate(&s);
    assert!((all - 29f64.sqrt() * vol / (2.0 * PI).sqrt()).abs() < 1e-12 * all);
}

#[test]
fn u1_23_inequality_on_random_states() {
    let g = Grid::cube(16).unwrap();
    for seed in 0..5 {
        let s = init_random_smooth(&g, seed, 1.0, 1.0).unwrap();
        for k in 1..=3 {
            let (lhs, rhs) = u1_23_pair(&s, k);
            assert!(lhs <= rhs * (1.0 + 1e-12), "seed {seed} k {k}");
        }
    }
}

#[test]
fn ledger_trivial_cases() {
    let g = Grid::cube(8).unwrap();
    let p = PhysicalParams::default();
    let s = init_random_smooth(&g, 1, 1e-2, 2.0).unwrap();
    let mut ledger = EnergyLedger::new(p);
    ledger.update(&s).unwrap();
    let r = ledger.rows()[0];
    assert_eq!((r.diss_integral, r.balance_residual, r.e2_running), (0.0, 0.0, 0.0));
    assert!(matches!(ledger.update(&s), Err(Error::NonMonotoneTime { .. })));

    let mut zero = EnergyLedger::new(p);
    let z = SpectralState::zeros(g);
    Stepper::new(&g, p, 0.1)
        .unwrap()
        .advance(&z, 5, |st| zero.update(st))
        .unwrap();
    for r in zero.rows() {
        assert_eq!([r.l2_sq, r.diss_integral, r.balance_residual, r.h3, r.e2_running], [0.0; 5]);
    }
}

#[test]
fn heat_run_balances_and_matches_closed_form() {
    // b = 0 and u = u(x₃): each mode decays as e^{−μξ₃²t}.
    let g = Grid::cube(8).unwrap();
    let p = PhysicalParams::new(0.7, 1.0).unwrap();
    let mut s = SpectralState::zeros(g);
    let modes = [([0, 0, 1], 0, C64::new(0.4, 0.1)), ([0, 0, 2], 1, C64::new(-0.05, 0.08))];
    for &(k, comp, a) in &modes {
        s.u[comp][slot(&g, k)] = a;
        s.u[comp][slot(&g, k.map(|x: i64| -x))] = a.conj();
    }
    let mut ledger = EnergyLedger::new(p);
    ledger.update(&s).unwrap();
    let dt = 1e-4;
    let end = Stepper::new(&g, p, dt)
        .unwrap()
        .advance(&s, 2000, |st| ledger.update(st))
        .unwrap();
    let t = end.time;
    for &(k, comp, a) in &modes {
        let xi3 = k[2] as f64;
        let expect = a * (-p.mu * xi3 * xi3 * t).exp();
        let err = (end.u[comp][slot(&g, k)] - expect).norm();
        assert!(err < 1e-12 * a.norm(), "{k:?}: {err}");
    }
    let rows = ledger.rows();
    let worst = rows.iter().map(|r| r.balance_residual.abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-8, "balance residual {worst}");
    // Closed form of the dissipated energy.
    let e0 = rows[0].l2_sq;
    let closed: f64 = modes
        .iter()
        .map(|&(k, _, a)| {
            let xi3 = k[2] as f64;
            2.0 * a.norm_sqr() * g.volume() * (1.0 - (-2.0 * p.mu * xi3 * xi3 * t).exp())
        })
        .sum();
    let last = rows.last().unwrap();
    assert!((last.diss_integral - closed).abs() <= 1e-8 * e0);
    for w in rows.windows(2) {
        assert!(w[1].diss_integral >= w[0].diss_integral);
        assert!(w[1].e2_running >= w[0].e2_running);
    }
}

#[test]
fn ledger_csv_and_summary() {
    let g = Grid::cube(8).unwrap();
    let p = PhysicalParams::default();
    let s = init_random_smooth(&g, 4, 1e-2, 2.0).unwrap();
    let mut ledger = EnergyLedger::new(p);
    ledger.update(&s).unwrap();
    Stepper::new(&g, p, 1e-2)
        .unwrap()
        .advance(&s, 10, |st| ledger.update(st))
        .unwrap();
    let mut out = Vec::new();
    ledger.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,l2_sq,diss_integral,balance_residual,h3,e2_running");
    assert_eq!(lines.len(), 12);
    assert!(lines[1].starts_with("0,"));
    let sum = ledger.summary();
    assert_eq!(sum.samples, 11);
    assert!(sum.sup_h3 >= sum.h3_initial);
    assert!(sum.e1 >= sum.sup_h3 * sum.sup_h3);
}
