//! Partition of frequency space by the size of the discriminant and the
//! explicit kernel bounds that hold on each piece.

use serde::Serialize;

use super::{eigen_data, kernel_triple, real_scalars, PhysicalParams, Wavevector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DomainTag {
    Omega1,
    Omega21,
    Omega22,
    Omega23,
}

impl DomainTag {
    pub const ALL: [DomainTag; 4] = [
        DomainTag::Omega1,
        DomainTag::Omega21,
        DomainTag::Omega22,
        DomainTag::Omega23,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DomainTag::Omega1 => "omega1",
            DomainTag::Omega21 => "omega21",
            DomainTag::Omega22 => "omega22",
            DomainTag::Omega23 => "omega23",
        }
    }

    pub fn index(&self) -> usize {
        *self as usize
    }
}

/// The two defining conditions of the first domain, `(Γ ≤ s²/4, s² ≤ 16q/3)`.
/// They are algebraically the same set because `Γ = s² − 4q`.
pub fn omega1_conditions(xi: &Wavevector, p: &PhysicalParams) -> (bool, bool) {
    let e = eigen_data(xi, p);
    let s2 = e.s_trace * e.s_trace;
    (e.gamma <= 0.25 * s2, s2 <= 16.0 / 3.0 * e.q_det)
}

pub fn classify_frequency(xi: &Wavevector, p: &PhysicalParams) -> DomainTag {
    let e = eigen_data(xi, p);
    let s = e.s_trace;
    if e.gamma <= 0.25 * s * s {
        return DomainTag::Omega1;
    }
    let a = p.mu * xi.xi3 * xi.xi3;
    let b = p.eta * xi.xi_nu_sq;
    if a > b {
        DomainTag::Omega21
    } else if xi.xi2.abs() <= xi.xi3.abs() {
        DomainTag::Omega22
    } else {
        DomainTag::Omega23
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    /// A proved inequality with explicit constants; a violation is an error.
    Hard,
    /// A bound whose constants are calibrated here; violations are reported
    /// as flags only.
    Calibrated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundRecord {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub kind: BoundKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub tag: DomainTag,
    pub records: Vec<BoundRecord>,
}

impl BoundReport {
    pub fn hard_violations(&self) -> impl Iterator<Item = &BoundRecord> {
        self.records
            .iter()
            .filter(|r| r.kind == BoundKind::Hard && !r.satisfied)
    }

    pub fn flags(&self) -> impl Iterator<Item = &BoundRecord> {
        self.records
            .iter()
            .filter(|r| r.kind == BoundKind::Calibrated && !r.satisfied)
    }
}

/// Calibrated constant in `|K̂ᵢ| ≤ C e^{−cξ_ν²t}`.
pub const CALIBRATED_C: f64 = 20.0;

/// Rounding allowance when comparing two computed quantities.
const ROUNDING: f64 = 1e-12;

fn record(name: &'static str, lhs: f64, rhs: f64, kind: BoundKind) -> BoundRecord {
    let slack = ROUNDING * lhs.abs().max(rhs.abs()) + 1e-300;
    BoundRecord {
        name,
        lhs,
        rhs,
        satisfied: lhs <= rhs + slack,
        kind,
    }
}

/// Evaluates every explicit inequality that applies to the domain of `xi`,
/// plus the calibrated kernel-decay forms as flags.
pub fn check_bounds(xi: &Wavevector, p: &PhysicalParams, t: f64) -> BoundReport {
    debug_assert!(t > 0.0);
    let tag = classify_frequency(xi, p);
    let e = eigen_data(xi, p);
    let s = e.s_trace;
    let q = e.q_det;
    let [g1, _, _] = real_scalars(&e, t);
    let g1 = g1.abs();
    let mut records = Vec::with_capacity(8);
    use BoundKind::*;

    if tag == DomainTag::Omega1 {
        records.push(record("re_lambda1_le_minus_half_s", e.lambda1.re, -0.5 * s, Hard));
        records.push(record("re_lambda2_le_minus_quarter_s", e.lambda2.re, -0.25 * s, Hard));
        records.push(record(
            "g1_le_t_exp_quarter_s",
            g1,
            t * (-0.25 * s * t).exp(),
            Hard,
        ));
    } else {
        let l1 = e.lambda1.re;
        let l2 = e.lambda2.re;
        let slow = -q / s;
        records.push(record("lambda1_le_minus_three_quarter_s", l1, -0.75 * s, Hard));
        records.push(record("lambda2_le_minus_q_over_s", l2, slow, Hard));
        records.push(record(
            "g1_le_two_over_s_exp_sum",
            g1,
            2.0 / s * ((l1 * t).exp() + (l2 * t).exp()),
            Hard,
        ));
        let chain = match tag {
            DomainTag::Omega21 => record(
                "omega21_rate_chain",
                slow,
                -0.5 * p.eta * xi.xi_nu_sq,
                Hard,
            ),
            DomainTag::Omega22 => record(
                "omega22_rate_chain",
                slow,
                -0.25 * p.mu * xi.xi_nu_sq,
                Hard,
            ),
            _ => record(
                "omega23_rate_chain",
                slow,
                -0.5 * p.mu * xi.xi3 * xi.xi3 - 0.25 / p.eta,
                Hard,
            ),
        };
        records.push(chain);
    }

    let c = 0.125 * p.mu.min(p.eta).min(1.0 / p.eta);
    let k = kernel_triple(xi, p, t);
    let kmax = k.k1.norm().max(k.k2.norm()).max(k.k3.norm());
    let envelope = match tag {
        DomainTag::Omega23 => {
            CALIBRATED_C
                * ((-c * (1.0 + xi.xi3 * xi.xi3) * t).exp() + (-c * xi.xi_nu_sq * t).exp())
        }
        _ => CALIBRATED_C * (-c * xi.xi_nu_sq * t).exp(),
    };
    records.push(record("kernel_calibrated_envelope", kmax, envelope, Calibrated));

    BoundReport { tag, records }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(mu: f64, eta: f64) -> PhysicalParams {
        PhysicalParams::new(mu, eta).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_frequency(&Wavevector::new(0.0, 0.0, 1.0), &pp(1.0, 1.0)),
            DomainTag::Omega1
        );
        assert_eq!(
            classify_frequency(&Wavevector::new(0.0, 3.0, 0.1), &pp(1.0, 1.0)),
            DomainTag::Omega23
        );
        assert_eq!(
            classify_frequency(&Wavevector::new(0.0, 0.1, 1.0), &pp(4.0, 1.0)),
            DomainTag::Omega21
        );
    }

    #[test]
    fn classify_omega22_example() {
        // μ small: a = μξ₃² ≪ b = ηξ_ν², |ξ₂| ≤ |ξ₃|, discriminant large.
        let xi = Wavevector::new(0.0, 0.5, 4.0);
        let p = pp(0.01, 1.0);
        let e = eigen_data(&xi, &p);
        assert!(e.gamma > 0.25 * e.s_trace * e.s_trace);
        assert_eq!(classify_frequency(&xi, &p), DomainTag::Omega22);
    }

    #[test]
    fn omega_conditions_agree_on_examples() {
        for (x, p) in [
            ([0.0, 0.0, 1.0], pp(1.0, 1.0)),
            ([0.0, 3.0, 0.1], pp(1.0, 1.0)),
            ([0.0, 0.1, 1.0], pp(4.0, 1.0)),
            ([2.0, 0.3, 0.2], pp(0.5, 3.0)),
        ] {
            let (c1, c2) = omega1_conditions(&Wavevector::from_array(x), &p);
            assert_eq!(c1, c2);
        }
    }

    #[test]
    fn omega1_example_bounds() {
        let r = check_bounds(&Wavevector::new(0.0, 0.0, 1.0), &pp(1.0, 1.0), 1.0);
        assert_eq!(r.tag, DomainTag::Omega1);
        assert_eq!(r.hard_violations().count(), 0);
        let re1 = r.records.iter().find(|x| x.name == "re_lambda1_le_minus_half_s").unwrap();
        assert_eq!((re1.lhs, re1.rhs), (-1.0, -1.0));
        let g = r.records.iter().find(|x| x.name == "g1_le_t_exp_quarter_s").unwrap();
        assert!((g.lhs - (-1f64).exp()).abs() < 1e-15);
        assert!((g.rhs - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn omega23_chain_example() {
        let r = check_bounds(&Wavevector::new(0.0, 3.0, 0.1), &pp(1.0, 1.0), 0.5);
        assert_eq!(r.tag, DomainTag::Omega23);
        assert!(r.records.iter().any(|x| x.name == "omega23_rate_chain" && x.satisfied));
        assert_eq!(r.hard_violations().count(), 0);
    }

    #[test]
    fn g1_bound_tight_as_t_vanishes() {
        let xi = Wavevector::new(0.0, 0.0, 1.0);
        let p = pp(1.0, 1.0);
        for &t in &[1e-4, 1e-6, 1e-8] {
            let r = check_bounds(&xi, &p, t);
            let g = r.records.iter().find(|x| x.name == "g1_le_t_exp_quarter_s").unwrap();
            assert!(g.satisfied);
            assert!((g.lhs / g.rhs - 1.0).abs() < 2.0 * t);
        }
    }
}
