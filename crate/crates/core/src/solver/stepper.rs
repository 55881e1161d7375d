use rayon::prelude::*;

use super::ops::SpectralOps;
use super::{Grid, SpectralState, VectorField};
use crate::error::{invalid, Error, Result};
use crate::kernel::{PhysicalParams, RealKernel, Wavevector, C64};

/// Advective limit: `dt·max|u| ≤ CFL_LIMIT·min spacing`.
pub const CFL_LIMIT: f64 = 0.5;

/// A run is declared blown up once `‖(u,b)‖` exceeds this multiple of its
/// value when the stepper first saw it.
pub const BLOW_UP_FACTOR: f64 = 1e6;

/// Integrating-factor RK2 (midpoint) stepper with cached kernels.
///
/// With `E(τ)` the exact per-mode linear propagator and `N` the nonlinear
/// terms, one step is
///
/// ```text
///     v* = E(dt/2)(v + dt/2·N(v))
///     v' = E(dt)v + dt·E(dt/2)N(v*)
/// ```
///
/// followed by projection, dealiasing and conjugate symmetrization.
pub struct Stepper {
    ops: SpectralOps,
    params: PhysicalParams,
    dt: f64,
    half: Vec<RealKernel>,
    full: Vec<RealKernel>,
    nonlinear: bool,
    reference_norm: Option<f64>,
}

const ZERO_KERNEL: RealKernel = RealKernel {
    k1: 0.0,
    k2_im: 0.0,
    k3: 0.0,
};

impl Stepper {
    pub fn new(grid: &Grid, params: PhysicalParams, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("must be finite and > 0, got {dt}")));
        }
        let ops = SpectralOps::new(grid);
        let kernels = |tau: f64| -> Vec<RealKernel> {
            ops.xi()
                .par_iter()
                .zip(ops.mask().par_iter())
                .map(|(x, &m)| {
                    if m {
                        RealKernel::evaluate(&Wavevector::from_array(*x), &params, tau)
                    } else {
                        ZERO_KERNEL
                    }
                })
                .collect()
        };
        let half = kernels(0.5 * dt);
        let full = kernels(dt);
        Ok(Self {
            ops,
            params,
            dt,
            half,
            full,
            nonlinear: true,
            reference_norm: None,
        })
    }

    /// Drops the nonlinear terms, leaving exact linear evolution.
    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn ops(&self) -> &SpectralOps {
        &self.ops
    }

    fn propagate(kernels: &[RealKernel], u: &VectorField, b: &VectorField) -> (VectorField, VectorField) {
        let mut out_u = u.clone();
        let mut out_b = b.clone();
        for i in 0..3 {
            out_u[i]
                .par_iter_mut()
                .zip(out_b[i].par_iter_mut())
                .zip(kernels.par_iter())
                .for_each(|((x, y), k)| {
                    let (nu, nb) = k.apply(*x, *y);
                    *x = nu;
                    *y = nb;
                });
        }
        (out_u, out_b)
    }

    fn axpy(a: f64, x: &VectorField, y: &VectorField) -> VectorField {
        [0, 1, 2].map(|i| y[i].par_iter().zip(x[i].par_iter()).map(|(&y, &x)| y + a * x).collect())
    }

    fn finish(&self, u: VectorField, b: VectorField, time: f64) -> SpectralState {
        let mut s = SpectralState {
            grid: *self.ops.grid(),
            u,
            b,
            time,
        };
        self.ops.leray(&mut s.u);
        self.ops.leray(&mut s.b);
        for c in s.components_mut() {
            self.ops.dealias(c);
            self.ops.symmetrize(c);
            c[0] = C64::default();
        }
        s
    }

    pub fn step(&mut self, s: &SpectralState) -> Result<SpectralState> {
        if s.grid != *self.ops.grid() {
            return Err(Error::GridMismatch(format!("state {:?} vs stepper {:?}", s.grid.n, self.ops.grid().n)));
        }
        let reference = *self.reference_norm.get_or_insert_with(|| s.l2_sq().sqrt());
        let time = s.time + self.dt;
        let (u, b) = if self.nonlinear {
            let n0 = self.ops.nonlinear(s);
            let limit = CFL_LIMIT * self.ops.grid().min_spacing() / n0.max_speed.max(f64::MIN_POSITIVE);
            if self.dt > limit {
                return Err(Error::StabilityViolation { dt: self.dt, limit });
            }
            let h = 0.5 * self.dt;
            let (mu, mb) = Self::propagate(&self.half, &Self::axpy(h, &n0.n1, &s.u), &Self::axpy(h, &n0.n2, &s.b));
            let mid = SpectralState {
                grid: s.grid,
                u: mu,
                b: mb,
                time: s.time + h,
            };
            let n1 = self.ops.nonlinear(&mid);
            let (lu, lb) = Self::propagate(&self.full, &s.u, &s.b);
            let (pu, pb) = Self::propagate(&self.half, &n1.n1, &n1.n2);
            (Self::axpy(self.dt, &pu, &lu), Self::axpy(self.dt, &pb, &lb))
        } else {
            Self::propagate(&self.full, &s.u, &s.b)
        };
        let out = self.finish(u, b, time);
        let norm = out.l2_sq().sqrt();
        let limit = BLOW_UP_FACTOR * reference;
        if !norm.is_finite() || (reference > 0.0 && norm > limit) {
            return Err(Error::BlowUp { time, norm, limit });
        }
        Ok(out)
    }

    /// Takes `steps` steps, calling `observe` on every new state.
    pub fn advance(
        &mut self,
        s: &SpectralState,
        steps: usize,
        mut observe: impl FnMut(&SpectralState) -> Result<()>,
    ) -> Result<SpectralState> {
        let mut cur = s.clone();
        for _ in 0..steps {
            cur = self.step(&cur)?;
            observe(&cur)?;
        }
        Ok(cur)
    }
}

/// One step from a freshly built [`Stepper`].
pub fn step_if_rk2(s: &SpectralState, params: &PhysicalParams, dt: f64) -> Result<SpectralState> {
    Stepper::new(&s.grid, *params, dt)?.step(s)
}
