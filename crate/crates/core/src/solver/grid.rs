use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Periodic box discretized with `n[a]` points per axis. Arrays are stored
/// with the third axis contiguous: `idx = (i1·n2 + i2)·n3 + i3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: [usize; 3],
    pub lengths: [f64; 3],
}

impl Grid {
    pub fn new(n: [usize; 3], lengths: [f64; 3]) -> Result<Self> {
        for a in 0..3 {
            if n[a] < 2 || n[a] % 2 != 0 {
                return Err(invalid("grid", format!("axis {} needs an even count >= 2, got {}", a + 1, n[a])));
            }
            if !(lengths[a].is_finite() && lengths[a] > 0.0) {
                return Err(invalid("box_length", format!("axis {} length must be > 0, got {}", a + 1, lengths[a])));
            }
        }
        Ok(Self { n, lengths })
    }

    /// `n³` points on the `2π` box.
    pub fn cube(n: usize) -> Result<Self> {
        Self::new([n; 3], [2.0 * PI; 3])
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.n[1] + i[1]) * self.n[2] + i[2]
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let i3 = idx % self.n[2];
        let r = idx / self.n[2];
        [r / self.n[1], r % self.n[1], i3]
    }

    /// Signed integer mode of storage slot `i` on `axis`, in `[-n/2, n/2)`.
    #[inline]
    pub fn mode(&self, axis: usize, i: usize) -> i64 {
        let n = self.n[axis];
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn modes(&self, idx: usize) -> [i64; 3] {
        let i = self.unravel(idx);
        [self.mode(0, i[0]), self.mode(1, i[1]), self.mode(2, i[2])]
    }

    /// Storage slot of `-k` for the mode stored at `idx`.
    pub fn mirror(&self, idx: usize) -> usize {
        let i = self.unravel(idx);
        self.index([
            (self.n[0] - i[0]) % self.n[0],
            (self.n[1] - i[1]) % self.n[1],
            (self.n[2] - i[2]) % self.n[2],
        ])
    }

    pub fn wavenumber(&self, axis: usize, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.lengths[axis]
    }

    /// Physical wavevector `ξ = 2πk/L` at `idx`.
    pub fn xi(&self, idx: usize) -> [f64; 3] {
        let k = self.modes(idx);
        [
            self.wavenumber(0, k[0]),
            self.wavenumber(1, k[1]),
            self.wavenumber(2, k[2]),
        ]
    }

    /// Wavevectors of every slot, in storage order.
    pub fn xi_table(&self) -> Vec<[f64; 3]> {
        (0..self.len()).map(|i| self.xi(i)).collect()
    }

    /// Largest retained `|k|` per axis. `3·k_max < n` keeps quadratic
    /// products free of aliasing on the retained modes.
    pub fn k_max(&self, axis: usize) -> i64 {
        (self.n[axis] as i64 - 1) / 3
    }

    pub fn retained(&self, idx: usize) -> bool {
        let k = self.modes(idx);
        (0..3).all(|a| k[a].abs() <= self.k_max(a))
    }

    pub fn dealias_mask(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.retained(i)).collect()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.n[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..3).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    /// Physical coordinate of grid point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let i = self.unravel(idx);
        [
            i[0] as f64 * self.spacing(0),
            i[1] as f64 * self.spacing(1),
            i[2] as f64 * self.spacing(2),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_nonpositive() {
        assert!(Grid::new([8, 7, 8], [1.0; 3]).is_err());
        assert!(Grid::new([8, 8, 8], [1.0, 0.0, 1.0]).is_err());
        assert!(Grid::cube(0).is_err());
    }

    #[test]
    fn index_round_trip_and_mirror() {
        let g = Grid::new([4, 6, 8], [1.0, 2.0, 3.0]).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.index(g.unravel(idx)), idx);
            let m = g.mirror(idx);
            assert_eq!(g.mirror(m), idx);
            let (a, b) = (g.modes(idx), g.modes(m));
            for ax in 0..3 {
                let n = g.n[ax] as i64;
                assert_eq!((a[ax] + b[ax]).rem_euclid(n), 0);
            }
        }
    }

    #[test]
    fn two_thirds_mask() {
        let g = Grid::cube(32).unwrap();
        assert_eq!(g.k_max(0), 10);
        let kept = g.dealias_mask().iter().filter(|&&m| m).count();
        assert_eq!(kept, 21 * 21 * 21);
        assert_eq!(Grid::cube(8).unwrap().k_max(0), 2);
    }
}
