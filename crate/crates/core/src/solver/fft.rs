use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;
use crate::kernel::C64;

/// Lines per parallel task in a batched 1D transform.
const LINES_PER_TASK: usize = 16;

/// 3D FFT built from 1D passes along each axis. `forward` carries the `1/N`
/// normalization so coefficients are Fourier-series amplitudes and
/// `inverse(forward(f)) = f`.
pub struct Fft3 {
    grid: Grid,
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        let forward = [0, 1, 2].map(|a| planner.plan_fft_forward(grid.n[a]));
        let inverse = [0, 1, 2].map(|a| planner.plan_fft_inverse(grid.n[a]));
        Self {
            grid: *grid,
            forward,
            inverse,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.transform(data, &self.forward);
        let scale = 1.0 / self.grid.len() as f64;
        data.par_iter_mut().for_each(|v| *v *= scale);
    }

    pub fn inverse(&self, data: &mut [C64]) {
        self.transform(data, &self.inverse);
    }

    /// Real physical field to coefficients.
    pub fn forward_real(&self, f: &[f64]) -> Vec<C64> {
        let mut c: Vec<C64> = f.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.forward(&mut c);
        c
    }

    /// Coefficients to a physical field, dropping the imaginary part (which
    /// is roundoff for conjugate-symmetric input).
    pub fn inverse_real(&self, c: &[C64]) -> Vec<f64> {
        let mut w = c.to_vec();
        self.inverse(&mut w);
        w.into_iter().map(|z| z.re).collect()
    }

    fn transform(&self, data: &mut [C64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        assert_eq!(data.len(), self.grid.len(), "array does not match grid");
        let [n1, n2, n3] = self.grid.n;
        batch(&plans[2], data, n3);

        // Axis 2: each i1-plane is a contiguous n2×n3 block.
        let m = n2 * n3;
        data.par_chunks_mut(m).for_each_init(
            || vec![C64::default(); m],
            |buf, plane| {
                transpose(plane, buf, n2, n3);
                plans[1].process(buf);
                transpose(buf, plane, n3, n2);
            },
        );

        // Axis 1: gather lines along the slowest axis into a contiguous buffer.
        let mut line = vec![C64::default(); n1 * m];
        transpose(data, &mut line, n1, m);
        batch(&plans[0], &mut line, n1);
        transpose(&line, data, m, n1);
    }
}

fn batch(plan: &Arc<dyn Fft<f64>>, data: &mut [C64], n: usize) {
    data.par_chunks_mut(n * LINES_PER_TASK).for_each(|c| plan.process(c));
}

/// `dst[c·rows + r] = src[r·cols + c]`.
fn transpose(src: &[C64], dst: &mut [C64], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(g: &Grid, f: &[C64]) -> Vec<C64> {
        let n = g.len() as f64;
        (0..g.len())
            .map(|k| {
                let kk = g.unravel(k);
                let mut acc = C64::default();
                for (x, &v) in f.iter().enumerate() {
                    let xx = g.unravel(x);
                    let phase: f64 = (0..3)
                        .map(|a| (kk[a] * xx[a]) as f64 / g.n[a] as f64)
                        .sum();
                    acc += v * C64::from_polar(1.0, -2.0 * std::f64::consts::PI * phase);
                }
                acc / n
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_and_round_trips() {
        let g = Grid::new([4, 6, 2], [1.0; 3]).unwrap();
        let f: Vec<C64> = (0..g.len())
            .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let fft = Fft3::new(&g);
        let mut c = f.clone();
        fft.forward(&mut c);
        for (a, b) in c.iter().zip(naive_dft(&g, &f)) {
            assert!((a - b).norm() < 1e-14);
        }
        fft.inverse(&mut c);
        for (a, b) in c.iter().zip(&f) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn single_mode_lands_in_its_slot() {
        let g = Grid::cube(8).unwrap();
        let fft = Fft3::new(&g);
        let f: Vec<f64> = (0..g.len())
            .map(|i| {
                let x = g.point(i);
                (2.0 * x[0] - x[2]).cos()
            })
            .collect();
        let c = fft.forward_real(&f);
        let plus = g.index([2, 0, 7]);
        let minus = g.mirror(plus);
        for (i, v) in c.iter().enumerate() {
            let expect = if i == plus || i == minus { 0.5 } else { 0.0 };
            assert!((v - C64::new(expect, 0.0)).norm() < 1e-14, "{i}");
        }
    }
}
