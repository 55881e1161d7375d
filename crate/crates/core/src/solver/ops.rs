use rayon::prelude::*;

use super::fft::Fft3;
use super::grid::Grid;
use super::{zero_field, SpectralState, VectorField};
use crate::kernel::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Transform plans, wavevector table and dealias mask for one grid.
pub struct SpectralOps {
    grid: Grid,
    fft: Fft3,
    xi: Vec<[f64; 3]>,
    mask: Vec<bool>,
}

/// Projected and dealiased nonlinear terms, with the peak physical speed
/// `max|u|` of the state they were evaluated on.
#[derive(Clone, Debug)]
pub struct NonlinearTerms {
    pub n1: VectorField,
    pub n2: VectorField,
    pub max_speed: f64,
}

/// `(i, j)` pairs of the six independent entries of a symmetric tensor.
const SYM: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

fn sym_slot(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    SYM.iter().position(|&p| p == (a, b)).unwrap()
}

impl SpectralOps {
    pub fn new(grid: &Grid) -> Self {
        Self {
            grid: *grid,
            fft: Fft3::new(grid),
            xi: grid.xi_table(),
            mask: grid.dealias_mask(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn xi(&self) -> &[[f64; 3]] {
        &self.xi
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn to_physical(&self, c: &[C64]) -> Vec<f64> {
        self.fft.inverse_real(c)
    }

    pub fn to_spectral(&self, f: &[f64]) -> Vec<C64> {
        self.fft.forward_real(f)
    }

    /// Copy with the modes outside the 2/3 window set to zero.
    pub fn dealiased(&self, c: &[C64]) -> Vec<C64> {
        c.par_iter()
            .zip(self.mask.par_iter())
            .map(|(&v, &m)| if m { v } else { C64::default() })
            .collect()
    }

    pub fn dealias(&self, c: &mut [C64]) {
        c.par_iter_mut().zip(self.mask.par_iter()).for_each(|(v, &m)| {
            if !m {
                *v = C64::default();
            }
        });
    }

    /// `∂_axis` applied spectrally.
    pub fn derivative(&self, c: &[C64], axis: usize) -> Vec<C64> {
        c.par_iter()
            .zip(self.xi.par_iter())
            .map(|(&v, x)| I * x[axis] * v)
            .collect()
    }

    /// `v̂ ↦ v̂ − ξ(ξ·v̂)/|ξ|²` at every `ξ ≠ 0`.
    pub fn leray(&self, v: &mut VectorField) {
        let [v0, v1, v2] = v;
        v0.par_iter_mut()
            .zip(v1.par_iter_mut())
            .zip(v2.par_iter_mut())
            .zip(self.xi.par_iter())
            .for_each(|(((a, b), c), x)| {
                let k2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                if k2 > 0.0 {
                    let d = (*a * x[0] + *b * x[1] + *c * x[2]) / k2;
                    *a -= d * x[0];
                    *b -= d * x[1];
                    *c -= d * x[2];
                }
            });
    }

    /// Average of each coefficient with the conjugate of its mirror, which
    /// makes the physical field exactly real.
    pub fn symmetrize(&self, c: &mut [C64]) {
        let g = &self.grid;
        let src = c.to_vec();
        c.par_iter_mut()
            .enumerate()
            .for_each(|(i, v)| *v = 0.5 * (src[i] + src[g.mirror(i)].conj()));
    }

    fn physical_field(&self, v: &VectorField) -> [Vec<f64>; 3] {
        [0, 1, 2].map(|a| self.to_physical(&self.dealiased(&v[a])))
    }

    /// Forward transforms of `f(p)` evaluated pointwise over physical
    /// samples `p`.
    fn products<const M: usize>(&self, f: impl Fn(usize) -> [f64; M] + Sync) -> [Vec<C64>; M] {
        let len = self.grid.len();
        let rows: Vec<[f64; M]> = (0..len).into_par_iter().map(&f).collect();
        std::array::from_fn(|m| {
            let col: Vec<f64> = rows.iter().map(|r| r[m]).collect();
            self.to_spectral(&col)
        })
    }

    /// `N₁ = ℙ(b·∇b − u·∇u)` and `N₂ = b·∇u − u·∇b` in conservative form
    /// `∂ⱼ(bⱼbᵢ − uⱼuᵢ)`, `∂ⱼ(bⱼuᵢ − uⱼbᵢ)`.
    pub fn nonlinear(&self, s: &SpectralState) -> NonlinearTerms {
        let u = self.physical_field(&s.u);
        let b = self.physical_field(&s.b);
        let max_speed = (0..self.grid.len())
            .into_par_iter()
            .map(|p| (u[0][p] * u[0][p] + u[1][p] * u[1][p] + u[2][p] * u[2][p]).sqrt())
            .reduce(|| 0.0, f64::max);
        // Symmetric T_ij = b_i b_j − u_i u_j, then antisymmetric
        // S_ij = u_i b_j − b_i u_j for (0,1), (0,2), (1,2).
        let t = self.products::<6>(|p| SYM.map(|(i, j)| b[i][p] * b[j][p] - u[i][p] * u[j][p]));
        let a = self.products::<3>(|p| {
            [(0, 1), (0, 2), (1, 2)].map(|(i, j)| u[i][p] * b[j][p] - b[i][p] * u[j][p])
        });
        let anti = |i: usize, j: usize, k: usize| -> C64 {
            match (i, j) {
                (0, 1) => a[0][k],
                (0, 2) => a[1][k],
                (1, 2) => a[2][k],
                (1, 0) => -a[0][k],
                (2, 0) => -a[1][k],
                (2, 1) => -a[2][k],
                _ => C64::default(),
            }
        };
        let len = self.grid.len();
        let mut n1 = zero_field(len);
        let mut n2 = zero_field(len);
        for i in 0..3 {
            let slots = [sym_slot(i, 0), sym_slot(i, 1), sym_slot(i, 2)];
            n1[i] = (0..len)
                .into_par_iter()
                .map(|k| {
                    if !self.mask[k] {
                        return C64::default();
                    }
                    let x = &self.xi[k];
                    I * (x[0] * t[slots[0]][k] + x[1] * t[slots[1]][k] + x[2] * t[slots[2]][k])
                })
                .collect();
            n2[i] = (0..len)
                .into_par_iter()
                .map(|k| {
                    if !self.mask[k] {
                        return C64::default();
                    }
                    let x = &self.xi[k];
                    I * (x[0] * anti(i, 0, k) + x[1] * anti(i, 1, k) + x[2] * anti(i, 2, k))
                })
                .collect();
        }
        self.leray(&mut n1);
        NonlinearTerms { n1, n2, max_speed }
    }

    /// First component of `ℙ(b·∇b)` from the reformulated expression
    /// `Σₖ iξ_ν²|ξ|⁻²ξₖ(bₖb₁)^ − Σₖ Σ_{l=2,3} iξ₁|ξ|⁻²ξₖξₗ(bₖbₗ)^`.
    pub fn p1_component(&self, b_hat: &VectorField) -> Vec<C64> {
        let b = self.physical_field(b_hat);
        let t = self.products::<6>(|p| SYM.map(|(i, j)| b[i][p] * b[j][p]));
        (0..self.grid.len())
            .into_par_iter()
            .map(|k| {
                let x = &self.xi[k];
                let k2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                if !self.mask[k] || k2 == 0.0 {
                    return C64::default();
                }
                let nu2 = x[1] * x[1] + x[2] * x[2];
                let mut first = C64::default();
                let mut second = C64::default();
                for kk in 0..3 {
                    first += x[kk] * t[sym_slot(kk, 0)][k];
                    for l in 1..3 {
                        second += x[kk] * x[l] * t[sym_slot(kk, l)][k];
                    }
                }
                I * (nu2 * first - x[0] * second) / k2
            })
            .collect()
    }

    /// `p̂ = |ξ|⁻²(∂ᵢuⱼ∂ⱼuᵢ − ∂ᵢbⱼ∂ⱼbᵢ)^`, zero at `ξ = 0`.
    pub fn pressure(&self, s: &SpectralState) -> Vec<C64> {
        let grads = |v: &VectorField| -> Vec<Vec<f64>> {
            (0..9)
                .map(|ij| {
                    let (i, j) = (ij / 3, ij % 3);
                    self.to_physical(&self.derivative(&self.dealiased(&v[j]), i))
                })
                .collect()
        };
        let gu = grads(&s.u);
        let gb = grads(&s.b);
        let [q] = self.products::<1>(|p| {
            let mut acc = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    acc += gu[3 * i + j][p] * gu[3 * j + i][p] - gb[3 * i + j][p] * gb[3 * j + i][p];
                }
            }
            [acc]
        });
        q.par_iter()
            .zip(self.xi.par_iter())
            .zip(self.mask.par_iter())
            .map(|((&v, x), &m)| {
                let k2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                if m && k2 > 0.0 {
                    v / k2
                } else {
                    C64::default()
                }
            })
            .collect()
    }
}

pub fn leray_project(grid: &Grid, v: &VectorField) -> VectorField {
    let mut out = v.clone();
    SpectralOps::new(grid).leray(&mut out);
    out
}

pub fn nonlinear_rhs(s: &SpectralState) -> NonlinearTerms {
    SpectralOps::new(&s.grid).nonlinear(s)
}

pub fn p1_component_spectrum(grid: &Grid, b_hat: &VectorField) -> Vec<C64> {
    SpectralOps::new(grid).p1_component(b_hat)
}

pub fn pressure_spectrum(s: &SpectralState) -> Vec<C64> {
    SpectralOps::new(&s.grid).pressure(s)
}

/// Contribution of the nonlinear terms to `d/dt ‖(u,b)‖²`:
/// `2 Re Σ (N₁·conj û + N₂·conj b̂)·|box|`.
pub fn nonlinear_transfer(s: &SpectralState, nl: &NonlinearTerms) -> f64 {
    let v = s.grid.volume();
    let len = s.grid.len();
    let sum = crate::numerics::det_sum(len, |k| {
        (0..3)
            .map(|i| (nl.n1[i][k] * s.u[i][k].conj() + nl.n2[i][k] * s.b[i][k].conj()).re)
            .sum()
    });
    2.0 * v * sum
}

/// Largest `|ξ·v̂|` over `u` and `b`, relative to the largest coefficient.
pub fn divergence_residual(s: &SpectralState) -> f64 {
    let xi = s.grid.xi_table();
    let div = |v: &VectorField| {
        (0..s.grid.len())
            .map(|k| (v[0][k] * xi[k][0] + v[1][k] * xi[k][1] + v[2][k] * xi[k][2]).norm())
            .fold(0.0, f64::max)
    };
    let scale = s.max_coefficient();
    if scale == 0.0 {
        0.0
    } else {
        div(&s.u).max(div(&s.b)) / scale
    }
}
