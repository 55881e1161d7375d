//! Small numerical building blocks shared across the crate: compensated
//! summation, deterministic parallel reductions, adaptive Simpson quadrature
//! and ordinary least squares.

use rayon::prelude::*;

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Fixed block size for [`det_sum`]. Chunk boundaries never depend on the
/// thread count, so the result is bitwise reproducible.
pub const REDUCE_CHUNK: usize = 4096;

/// Sums `f(0) + ... + f(len-1)` in parallel with a result independent of the
/// number of worker threads.
pub fn det_sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    det_sum_many::<1, _>(len, |i| [f(i)])[0]
}

/// Vector-valued variant of [`det_sum`].
pub fn det_sum_many<const M: usize, F>(len: usize, f: F) -> [f64; M]
where
    F: Fn(usize) -> [f64; M] + Sync,
{
    let chunks = len.div_ceil(REDUCE_CHUNK);
    let partials: Vec<[f64; M]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCE_CHUNK;
            let hi = (lo + REDUCE_CHUNK).min(len);
            let mut acc = [CompensatedSum::new(); M];
            for i in lo..hi {
                let v = f(i);
                for (a, x) in acc.iter_mut().zip(v) {
                    a.add(x);
                }
            }
            acc.map(|a| a.value())
        })
        .collect();
    let mut acc = [CompensatedSum::new(); M];
    for p in partials {
        for (a, x) in acc.iter_mut().zip(p) {
            a.add(x);
        }
    }
    acc.map(|a| a.value())
}

/// Variant of [`det_sum_many`] with a width known only at run time: `f(i, out)`
/// adds the contribution of index `i` into `out` (length `width`).
pub fn det_sum_vec<F>(len: usize, width: usize, f: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let chunks = len.div_ceil(REDUCE_CHUNK);
    let partials: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCE_CHUNK;
            let hi = (lo + REDUCE_CHUNK).min(len);
            let mut acc = vec![CompensatedSum::new(); width];
            let mut buf = vec![0.0; width];
            for i in lo..hi {
                buf.iter_mut().for_each(|b| *b = 0.0);
                f(i, &mut buf);
                for (a, &x) in acc.iter_mut().zip(&buf) {
                    a.add(x);
                }
            }
            acc.iter().map(|a| a.value()).collect()
        })
        .collect();
    let mut acc = vec![CompensatedSum::new(); width];
    for p in partials {
        for (a, x) in acc.iter_mut().zip(p) {
            a.add(x);
        }
    }
    acc.iter().map(|a| a.value()).collect()
}

/// Adaptive composite Simpson quadrature of `f` over `[a, b]` to relative
/// tolerance `rel_tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Coarse magnitude estimate turns the relative tolerance into an
    // absolute one for the recursion.
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    simpson_step(&f, a, b, fa, fm, fb, whole, rel_tol * scale, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Result of a straight-line least-squares fit `y = slope * x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_stderr: f64,
    /// Residual sum of squares.
    pub rss: f64,
}

/// Ordinary least squares; requires at least three points with distinct `x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = compensated_sum(x.iter().copied()) / n;
    let my = compensated_sum(y.iter().copied()) / n;
    let sxx = compensated_sum(x.iter().map(|&xi| (xi - mx) * (xi - mx)));
    let sxy = compensated_sum(x.iter().zip(y).map(|(&xi, &yi)| (xi - mx) * (yi - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = compensated_sum(
        x.iter()
            .zip(y)
            .map(|(&xi, &yi)| (yi - intercept - slope * xi).powi(2)),
    );
    let dof = (x.len() as f64 - 2.0).max(1.0);
    let slope_stderr = (rss / dof / sxx).sqrt();
    LineFit {
        slope,
        intercept,
        slope_stderr,
        rss,
    }
}

/// `n` points log-uniformly spaced on `[lo, hi]`, endpoints included.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Log-spaced samples with a fixed density per decade.
pub fn log_space_per_decade(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).round() as usize + 1;
    log_space(lo, hi, n.max(2))
}
