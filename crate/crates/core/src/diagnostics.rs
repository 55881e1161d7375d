//! Anisotropic norms, the energy ledger, and residual checks on spectral
//! states.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{PhysicalParams, C64};
use crate::numerics::det_sum;
use crate::solver::{Grid, SpectralOps, SpectralState};

/// `|box|·Σ_ξ m(ξ)·Σ_{c ∈ sel} |ĉ(ξ)|²` over the selected components
/// `u₁ u₂ u₃ b₁ b₂ b₃`.
pub fn weighted_sq(s: &SpectralState, m: impl Fn([f64; 3]) -> f64 + Sync, sel: [bool; 6]) -> f64 {
    let comps = s.components();
    let g = &s.grid;
    g.volume()
        * det_sum(g.len(), |k| {
            let e: f64 = comps
                .iter()
                .zip(sel)
                .filter(|(_, on)| *on)
                .map(|(c, _)| c[k].norm_sqr())
                .sum();
            if e == 0.0 {
                0.0
            } else {
                m(g.xi(k)) * e
            }
        })
}

#[inline]
fn norm_sq3(x: [f64; 3]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
}

#[inline]
fn monomial_sq(x: [f64; 3], d: [u32; 3]) -> f64 {
    (0..3).map(|a| x[a].powi(2 * d[a] as i32)).product()
}

/// `‖(u,b)‖_{Hᵏ}` with the multiplier `(1+|ξ|²)ᵏ`.
pub fn sobolev_norm(s: &SpectralState, k: u32) -> f64 {
    weighted_sq(s, |x| (1.0 + norm_sq3(x)).powi(k as i32), [true; 6]).sqrt()
}

/// Which of `u₁ u₂ u₃ b₁ b₂ b₃` a norm sees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ComponentSelector {
    All,
    /// `(u₁, b₁)`.
    First,
    Custom([bool; 6]),
}

impl ComponentSelector {
    pub fn flags(&self) -> [bool; 6] {
        match self {
            ComponentSelector::All => [true; 6],
            ComponentSelector::First => [true, false, false, true, false, false],
            ComponentSelector::Custom(f) => *f,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NormKind {
    L2,
    /// Sum over all derivatives of order `≤ k` of their `L²` norms squared.
    Hk(u32),
    MixedL2x1L1x23,
}

/// `‖∂^α (selected components)‖` in the given norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NormSpec {
    pub deriv: [u32; 3],
    pub components: ComponentSelector,
    pub kind: NormKind,
}

impl NormSpec {
    pub fn new(deriv: [u32; 3], components: ComponentSelector, kind: NormKind) -> Self {
        Self { deriv, components, kind }
    }

    pub fn evaluate(&self, s: &SpectralState) -> f64 {
        let sel = self.components.flags();
        let d = self.deriv;
        match self.kind {
            NormKind::L2 => weighted_sq(s, |x| monomial_sq(x, d), sel).sqrt(),
            NormKind::Hk(k) => {
                let extra = multi_indices(k);
                weighted_sq(
                    s,
                    |x| {
                        extra
                            .iter()
                            .map(|b| monomial_sq(x, [d[0] + b[0], d[1] + b[1], d[2] + b[2]]))
                            .sum::<f64>()
                    },
                    sel,
                )
                .sqrt()
            }
            NormKind::MixedL2x1L1x23 => {
                let ops = SpectralOps::new(&s.grid);
                let mut acc = 0.0;
                for (c, on) in s.components().iter().zip(sel) {
                    if !on {
                        continue;
                    }
                    let mut v: Vec<C64> = c.to_vec();
                    for (a, &n) in d.iter().enumerate() {
                        for _ in 0..n {
                            v = ops.derivative(&v, a);
                        }
                    }
                    let m = mixed_norm_l2x1_l1x23(&s.grid, &ops.to_physical(&v));
                    acc += m * m;
                }
                acc.sqrt()
            }
        }
    }
}

/// All multi-indices with `|β| ≤ k`.
pub fn multi_indices(k: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..=k {
        for b in 0..=k - a {
            for c in 0..=k - a - b {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Homogeneous `‖∂^α f‖_{Ḣᵏ}` of one coefficient array.
pub fn homogeneous_norm(grid: &Grid, c: &[C64], deriv: [u32; 3], k: u32) -> f64 {
    (grid.volume()
        * det_sum(grid.len(), |i| {
            let x = grid.xi(i);
            norm_sq3(x).powi(k as i32) * monomial_sq(x, deriv) * c[i].norm_sqr()
        }))
    .sqrt()
}

/// `(‖∂₁u₁‖_{Ḣᵏ}, ‖∂₂u₂‖_{Ḣᵏ} + ‖∂₃u₃‖_{Ḣᵏ})`. The first never exceeds the
/// second for divergence-free `u`.
pub fn u1_23_pair(s: &SpectralState, k: u32) -> (f64, f64) {
    let g = &s.grid;
    (
        homogeneous_norm(g, &s.u[0], [1, 0, 0], k),
        homogeneous_norm(g, &s.u[1], [0, 1, 0], k) + homogeneous_norm(g, &s.u[2], [0, 0, 1], k),
    )
}

/// Per-`x₁`-slice `L¹` over `(x₂, x₃)` followed by `L²` over `x₁`, with the
/// periodic trapezoid rule on every axis.
pub fn mixed_norm_l2x1_l1x23(grid: &Grid, f: &[f64]) -> f64 {
    let [n1, n2, n3] = grid.n;
    let h = [0, 1, 2].map(|a| grid.spacing(a));
    let sq: f64 = (0..n1)
        .map(|i| {
            let slice = &f[i * n2 * n3..(i + 1) * n2 * n3];
            let l1 = h[1] * h[2] * slice.iter().map(|v| v.abs()).sum::<f64>();
            l1 * l1
        })
        .sum();
    (h[0] * sq).sqrt()
}

/// `(‖‖f‖_{L¹x₂₃}‖_{L²x₁}, ‖‖f‖_{L²x₁}‖_{L¹x₂₃})`; Minkowski gives `lhs ≤ rhs`.
pub fn minkowski_pair(grid: &Grid, f: &[f64]) -> (f64, f64) {
    let [n1, n2, n3] = grid.n;
    let h = [0, 1, 2].map(|a| grid.spacing(a));
    let m = n2 * n3;
    let rhs: f64 = (0..m)
        .map(|jk| (h[0] * (0..n1).map(|i| f[i * m + jk].powi(2)).sum::<f64>()).sqrt())
        .sum::<f64>()
        * h[1]
        * h[2];
    (mixed_norm_l2x1_l1x23(grid, f), rhs)
}

/// `‖f‖_{L²}` of a physical field by the periodic trapezoid rule.
pub fn physical_l2(grid: &Grid, f: &[f64]) -> f64 {
    (grid.cell_volume() * f.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// One ledger sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LedgerRow {
    pub t: f64,
    pub l2_sq: f64,
    /// `2∫₀ᵗ (μ‖∂₃u‖² + η‖∂₂b‖² + η‖∂₃b‖²) dτ`.
    pub diss_integral: f64,
    /// `(‖(u,b)‖² + diss_integral − ‖(u₀,b₀)‖²) / ‖(u₀,b₀)‖²`.
    pub balance_residual: f64,
    pub h3: f64,
    /// `∫₀ᵗ ‖∂₂u‖²_{H²} dτ`.
    pub e2_running: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Rates {
    t: f64,
    diss: f64,
    e1_u: f64,
    e1_b: f64,
    e2: f64,
}

/// Time-sampled energy accounting with trapezoid integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyLedger {
    params: PhysicalParams,
    rows: Vec<LedgerRow>,
    last: Option<Rates>,
    l2_initial: f64,
    diss: f64,
    e1_u: f64,
    e1_b: f64,
    e2: f64,
    sup_h3: f64,
}

/// Final ledger totals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LedgerSummary {
    pub samples: usize,
    pub final_time: f64,
    pub l2_sq_initial: f64,
    pub l2_sq_final: f64,
    pub max_abs_balance_residual: f64,
    pub h3_initial: f64,
    pub sup_h3: f64,
    /// `∫ μ‖∂₃u‖²_{H³}`.
    pub e1_u_integral: f64,
    /// `∫ η‖(∂₂b, ∂₃b)‖²_{H³}`.
    pub e1_b_integral: f64,
    /// `sup‖(u,b)‖²_{H³} + e1_u_integral + e1_b_integral`.
    pub e1: f64,
    pub e2: f64,
}

impl EnergyLedger {
    pub fn new(params: PhysicalParams) -> Self {
        Self {
            params,
            rows: Vec::new(),
            last: None,
            l2_initial: 0.0,
            diss: 0.0,
            e1_u: 0.0,
            e1_b: 0.0,
            e2: 0.0,
            sup_h3: 0.0,
        }
    }

    fn rates(&self, s: &SpectralState) -> Rates {
        let (mu, eta) = (self.params.mu, self.params.eta);
        let h3 = |x: [f64; 3]| (1.0 + norm_sq3(x)).powi(3);
        let h2 = |x: [f64; 3]| (1.0 + norm_sq3(x)).powi(2);
        let u = [true, true, true, false, false, false];
        let b = [false, false, false, true, true, true];
        let d3u = weighted_sq(s, |x| x[2] * x[2], u);
        let d23b = weighted_sq(s, |x| x[1] * x[1] + x[2] * x[2], b);
        Rates {
            t: s.time,
            diss: mu * d3u + eta * d23b,
            e1_u: mu * weighted_sq(s, |x| h3(x) * x[2] * x[2], u),
            e1_b: eta * weighted_sq(s, |x| h3(x) * (x[1] * x[1] + x[2] * x[2]), b),
            e2: weighted_sq(s, |x| h2(x) * x[1] * x[1], u),
        }
    }

    /// Appends a sample; times must strictly increase.
    pub fn update(&mut self, s: &SpectralState) -> Result<()> {
        if let Some(last) = self.last {
            if !(s.time > last.t) {
                return Err(Error::NonMonotoneTime { time: s.time, last: last.t });
            }
        }
        let r = self.rates(s);
        let l2_sq = s.l2_sq();
        let h3 = sobolev_norm(s, 3);
        match self.last {
            None => self.l2_initial = l2_sq,
            Some(p) => {
                let half = 0.5 * (r.t - p.t);
                self.diss += 2.0 * half * (p.diss + r.diss);
                self.e1_u += half * (p.e1_u + r.e1_u);
                self.e1_b += half * (p.e1_b + r.e1_b);
                self.e2 += half * (p.e2 + r.e2);
            }
        }
        self.sup_h3 = self.sup_h3.max(h3);
        self.last = Some(r);
        let balance = l2_sq + self.diss - self.l2_initial;
        self.rows.push(LedgerRow {
            t: s.time,
            l2_sq,
            diss_integral: self.diss,
            balance_residual: if self.l2_initial > 0.0 { balance / self.l2_initial } else { balance },
            h3,
            e2_running: self.e2,
        });
        Ok(())
    }

    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    pub fn summary(&self) -> LedgerSummary {
        let first = self.rows.first();
        let last = self.rows.last();
        LedgerSummary {
            samples: self.rows.len(),
            final_time: last.map_or(0.0, |r| r.t),
            l2_sq_initial: self.l2_initial,
            l2_sq_final: last.map_or(0.0, |r| r.l2_sq),
            max_abs_balance_residual: self.rows.iter().map(|r| r.balance_residual.abs()).fold(0.0, f64::max),
            h3_initial: first.map_or(0.0, |r| r.h3),
            sup_h3: self.sup_h3,
            e1_u_integral: self.e1_u,
            e1_b_integral: self.e1_b,
            e1: self.sup_h3 * self.sup_h3 + self.e1_u + self.e1_b,
            e2: self.e2,
        }
    }

    /// `t,l2_sq,diss_integral,balance_residual,h3,e2_running`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,l2_sq,diss_integral,balance_residual,h3,e2_running")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.t, r.l2_sq, r.diss_integral, r.balance_residual, r.h3, r.e2_running
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_count() {
        // (k+1)(k+2)(k+3)/6
        assert_eq!(multi_indices(0).len(), 1);
        assert_eq!(multi_indices(3).len(), 20);
    }

    #[test]
    fn constant_field_mixed_norm() {
        let g = Grid::new([4, 6, 8], [1.0, 2.0, 3.0]).unwrap();
        let f = vec![-2.5; g.len()];
        let expect = 2.5 * 1f64.sqrt() * 2.0 * 3.0;
        assert!((mixed_norm_l2x1_l1x23(&g, &f) - expect).abs() < 1e-12);
        assert_eq!(mixed_norm_l2x1_l1x23(&g, &vec![0.0; g.len()]), 0.0);
    }
}
