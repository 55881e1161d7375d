use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ops::SpectralOps;
use super::{Grid, SpectralState};
use crate::diagnostics::sobolev_norm;
use crate::error::{invalid, Result};
use crate::kernel::C64;

/// Seeded smooth divergence-free data with coefficient magnitudes
/// `∝ (1+|ξ|)^{−slope}` on the retained modes, scaled to
/// `‖(u,b)‖_{H³} = amplitude`.
pub fn init_random_smooth(grid: &Grid, seed: u64, amplitude: f64, slope: f64) -> Result<SpectralState> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(invalid("amplitude", format!("must be finite and >= 0, got {amplitude}")));
    }
    if !slope.is_finite() {
        return Err(invalid("spectral_slope", "must be finite"));
    }
    let mut s = SpectralState::zeros(*grid);
    if amplitude == 0.0 {
        return Ok(s);
    }
    let ops = SpectralOps::new(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    for k in 0..grid.len() {
        let x = ops.xi()[k];
        let weight = (1.0 + (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()).powf(-slope);
        for c in s.components_mut() {
            let (re, im) = (normal(), normal());
            if ops.mask()[k] && k != 0 {
                c[k] = C64::new(re, im) * weight;
            }
        }
    }
    ops.leray(&mut s.u);
    ops.leray(&mut s.b);
    for c in s.components_mut() {
        ops.symmetrize(c);
    }
    let h3 = sobolev_norm(&s, 3);
    let scale = amplitude / h3;
    for c in s.components_mut() {
        c.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(s)
}

/// `(u, b)(x − a)`: every coefficient picks up the phase `e^{−iξ·a}`.
pub fn translate(s: &SpectralState, shift: [f64; 3]) -> SpectralState {
    let xi = s.grid.xi_table();
    let mut out = s.clone();
    for c in out.components_mut() {
        for (v, x) in c.iter_mut().zip(&xi) {
            *v *= C64::from_polar(1.0, -(x[0] * shift[0] + x[1] * shift[1] + x[2] * shift[2]));
        }
    }
    out
}
