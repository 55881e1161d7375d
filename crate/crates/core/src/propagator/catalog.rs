//! Decay-rate catalog of the linear evolution of Gaussian data.

use std::io::Write;

use serde::Serialize;

use super::fit::{decay_exponent_fit, DecaySeries};
use super::quadrature::{monomial_sq, ComponentMask, QuadratureGrid, QuadraturePreset, SliceMoments};
use super::spectrum::AnalyticSpectrum;
use crate::error::{invalid, Result};
use crate::kernel::{PhysicalParams, RealKernel, Wavevector};
use crate::numerics::{det_sum_vec, log_space_per_decade};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CatalogEntry {
    L2Total,
    D2Total,
    D3Total,
    D2D3Total,
    D3D3Total,
    U1L2,
    D2U1,
    D3U1,
    D2D3U1,
    D3D3U1,
    D333U1,
}

impl CatalogEntry {
    pub const ALL: [CatalogEntry; 11] = [
        CatalogEntry::L2Total,
        CatalogEntry::D2Total,
        CatalogEntry::D3Total,
        CatalogEntry::D2D3Total,
        CatalogEntry::D3D3Total,
        CatalogEntry::U1L2,
        CatalogEntry::D2U1,
        CatalogEntry::D3U1,
        CatalogEntry::D2D3U1,
        CatalogEntry::D3D3U1,
        CatalogEntry::D333U1,
    ];

    pub fn label(&self) -> &'static str {
        use CatalogEntry::*;
        match self {
            L2Total => "l2_total",
            D2Total => "d2_total",
            D3Total => "d3_total",
            D2D3Total => "d2d3_total",
            D3D3Total => "d3d3_total",
            U1L2 => "u1_l2",
            D2U1 => "d2_u1",
            D3U1 => "d3_u1",
            D2D3U1 => "d2d3_u1",
            D3D3U1 => "d3d3_u1",
            D333U1 => "d333_u1",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.label() == s)
    }

    /// Derivative multi-index `(a₁, a₂, a₃)`.
    pub fn deriv(&self) -> [u32; 3] {
        use CatalogEntry::*;
        match self {
            L2Total | U1L2 => [0, 0, 0],
            D2Total | D2U1 => [0, 1, 0],
            D3Total | D3U1 => [0, 0, 1],
            D2D3Total | D2D3U1 => [0, 1, 1],
            D3D3Total | D3D3U1 => [0, 0, 2],
            D333U1 => [0, 0, 3],
        }
    }

    pub fn mask(&self) -> ComponentMask {
        use CatalogEntry::*;
        match self {
            L2Total | D2Total | D3Total | D2D3Total | D3D3Total => ComponentMask::ALL,
            _ => ComponentMask::FIRST,
        }
    }

    /// Expected large-time exponent.
    pub fn target(&self) -> f64 {
        use CatalogEntry::*;
        match self {
            L2Total => -0.5,
            D2Total | D3Total => -1.0,
            D2D3Total | D3D3Total => -1.5,
            U1L2 => -0.75,
            D2U1 | D3U1 => -1.25,
            D2D3U1 | D3D3U1 => -1.75,
            D333U1 => -2.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayConfig {
    pub params: PhysicalParams,
    pub spectrum: AnalyticSpectrum,
    pub quadrature: QuadraturePreset,
    pub fit_window: (f64, f64),
    pub samples_per_decade: usize,
    pub entries: Vec<CatalogEntry>,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            params: PhysicalParams::default(),
            spectrum: AnalyticSpectrum::default_pair(),
            quadrature: QuadraturePreset::LogGraded,
            fit_window: (50.0, 2000.0),
            samples_per_decade: 40,
            entries: CatalogEntry::ALL.to_vec(),
        }
    }
}

/// Norm of the linearly evolved data for a set of `(deriv, mask)` pairs at
/// each time. Returns `(values, shell fractions)` per pair, time-major.
///
/// The kernel does not depend on `ξ₁`, so the `ξ₁` direction is integrated
/// once into [`SliceMoments`] and each time costs a sum over the
/// `(ξ₂, ξ₃)` plane.
pub fn linear_norm_series(
    grid: &QuadratureGrid,
    spectrum: &AnalyticSpectrum,
    p: &PhysicalParams,
    times: &[f64],
    norms: &[([u32; 3], ComponentMask)],
) -> Vec<Vec<(f64, f64)>> {
    let mut powers: Vec<u32> = norms.iter().map(|(d, _)| d[0]).collect();
    powers.sort_unstable();
    powers.dedup();
    let moments = SliceMoments::compute(grid, &powers, |xi| {
        let v = spectrum.evaluate(xi);
        [v.u[0], v.u[1], v.u[2], v.b[0], v.b[1], v.b[2]]
    });
    let pidx: Vec<usize> = norms
        .iter()
        .map(|(d, _)| moments.power_index(d[0]).unwrap())
        .collect();
    let a2 = &grid.axes[1];
    let a3 = &grid.axes[2];
    let n3 = a3.len();
    let shell2: Vec<bool> = a2.nodes.iter().map(|x| x.abs() >= 0.5 * a2.outer()).collect();
    let shell3: Vec<bool> = a3.nodes.iter().map(|x| x.abs() >= 0.5 * a3.outer()).collect();

    times
        .iter()
        .map(|&t| {
            let sums = det_sum_vec(moments.plane_len(), 2 * norms.len(), |jk, out| {
                let (j, k) = (jk / n3, jk % n3);
                let (x2, x3) = (a2.nodes[j], a3.nodes[k]);
                let kern = RealKernel::evaluate(&Wavevector::new(0.0, x2, x3), p, t);
                let (k1, k2, k3) = (kern.k1 * kern.k1, kern.k2_im * kern.k2_im, kern.k3 * kern.k3);
                let plane_shell = shell2[j] || shell3[k];
                let w = a2.weights[j] * a3.weights[k];
                for (n, ((d, mask), &pi)) in norms.iter().zip(&pidx).enumerate() {
                    let c = w * monomial_sq(x2, d[1]) * monomial_sq(x3, d[2]);
                    let (mut tot, mut inn) = (0.0, 0.0);
                    for i in 0..3 {
                        let (ut, ui) = moments.get(jk, pi, i);
                        let (bt, bi) = moments.get(jk, pi, 3 + i);
                        if mask.u[i] {
                            tot += k1 * ut + k2 * bt;
                            inn += k1 * ui + k2 * bi;
                        }
                        if mask.b[i] {
                            tot += k2 * ut + k3 * bt;
                            inn += k2 * ui + k3 * bi;
                        }
                    }
                    out[2 * n] += c * tot;
                    if !plane_shell {
                        out[2 * n + 1] += c * inn;
                    }
                }
            });
            (0..norms.len())
                .map(|n| {
                    let (tot, inner) = (sums[2 * n], sums[2 * n + 1]);
                    let frac = if tot > 0.0 { (tot - inner).max(0.0) / tot } else { 0.0 };
                    (tot.max(0.0).sqrt(), frac)
                })
                .collect()
        })
        .collect()
}

/// Runs the selected catalog entries and fits each exponent.
pub fn decay_catalog_run(cfg: &DecayConfig) -> Result<Vec<DecaySeries>> {
    let (lo, hi) = cfg.fit_window;
    if !(lo > 0.0 && hi > lo) {
        return Err(invalid("fit_window", format!("need 0 < t_min < t_max, got ({lo}, {hi})")));
    }
    if cfg.samples_per_decade == 0 {
        return Err(invalid("samples_per_decade", "must be positive"));
    }
    let grid = QuadratureGrid::preset(cfg.quadrature);
    let times = log_space_per_decade(lo, hi, cfg.samples_per_decade);
    let norms: Vec<_> = cfg.entries.iter().map(|e| (e.deriv(), e.mask())).collect();
    let table = linear_norm_series(&grid, &cfg.spectrum, &cfg.params, &times, &norms);
    cfg.entries
        .iter()
        .enumerate()
        .map(|(n, e)| {
            let values = table.iter().map(|row| row[n].0).collect();
            let shell = table.iter().fold(0.0f64, |m, row| m.max(row[n].1));
            let mut s = DecaySeries::new(e.label(), times.clone(), values, cfg.fit_window)
                .with_target(e.target());
            s.shell_fraction = shell;
            decay_exponent_fit(s)
        })
        .collect()
}

/// `label,t,value` rows for every sample of every series.
pub fn write_series_csv<W: Write>(mut w: W, series: &[DecaySeries]) -> std::io::Result<()> {
    writeln!(w, "label,t,value")?;
    for s in series {
        for (t, v) in s.times.iter().zip(&s.values) {
            writeln!(w, "{},{},{}", s.label, t, v)?;
        }
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `label,exponent,stderr,target,abs_error`, one row per series.
pub fn write_summary_csv<W: Write>(mut w: W, series: &[DecaySeries]) -> std::io::Result<()> {
    writeln!(w, "label,exponent,stderr,target,abs_error")?;
    for s in series {
        writeln!(
            w,
            "{},{},{},{},{}",
            s.label,
            opt(s.fitted_exponent),
            opt(s.fit_stderr),
            opt(s.target),
            opt(s.abs_error())
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for e in CatalogEntry::ALL {
            assert_eq!(CatalogEntry::from_label(e.label()), Some(e));
        }
        assert_eq!(CatalogEntry::from_label("nope"), None);
    }

    #[test]
    fn summary_csv_shape() {
        let mut s = DecaySeries::new("u1_l2", vec![1.0, 2.0], vec![1.0, 0.5], (1.0, 2.0))
            .with_target(-0.75);
        s.fitted_exponent = Some(-0.76);
        s.fit_stderr = Some(0.001);
        let mut out = Vec::new();
        write_summary_csv(&mut out, &[s]).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "label,exponent,stderr,target,abs_error");
        assert!(lines[1].starts_with("u1_l2,-0.76,0.001,-0.75,0.01"));
    }
}
