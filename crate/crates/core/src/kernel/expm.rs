//! Independent reference for the kernel: the 2×2 complex matrix exponential
//! by scaling and squaring with a fixed-degree Taylor approximant.

use super::{PhysicalParams, Wavevector, C64};

pub type Mat2 = [[C64; 2]; 2];

const TAYLOR_DEGREE: usize = 18;
/// The scaled matrix has 1-norm at most this; the Taylor remainder is then
/// below `0.5^19 / 19!`.
const SCALED_NORM: f64 = 0.5;

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn norm1(a: &Mat2) -> f64 {
    (0..2)
        .map(|j| a[0][j].norm() + a[1][j].norm())
        .fold(0.0, f64::max)
}

/// `exp(a)` for an arbitrary complex 2×2 matrix.
///
/// The trace part is split off as an exact scalar factor so the squaring
/// phase only sees the traceless remainder's norm.
pub fn expm2(a: &Mat2) -> Mat2 {
    let shift = (a[0][0] + a[1][1]) * 0.5;
    let mut x = *a;
    x[0][0] -= shift;
    x[1][1] -= shift;
    let nrm = norm1(&x);
    let squarings = if nrm > SCALED_NORM {
        (nrm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings);
    for row in x.iter_mut() {
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
    // Horner evaluation of sum_k x^k / k!.
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut p: Mat2 = [[one, zero], [zero, one]];
    for k in (1..=TAYLOR_DEGREE).rev() {
        let mut q = mat_mul(&x, &p);
        let inv = 1.0 / k as f64;
        for row in q.iter_mut() {
            for v in row.iter_mut() {
                *v *= inv;
            }
        }
        q[0][0] += one;
        q[1][1] += one;
        p = q;
    }
    let f = (shift * scale).exp();
    for row in p.iter_mut() {
        for v in row.iter_mut() {
            *v *= f;
        }
    }
    for _ in 0..squarings {
        p = mat_mul(&p, &p);
    }
    p
}

/// The generator of the linearized system at `xi`.
pub fn generator(xi: &Wavevector, p: &PhysicalParams) -> Mat2 {
    let off = C64::new(0.0, xi.xi2);
    [
        [C64::new(-p.mu * xi.xi3 * xi.xi3, 0.0), off],
        [off, C64::new(-p.eta * xi.xi_nu_sq, 0.0)],
    ]
}

/// `exp(t·A(ξ))` without any use of the closed-form kernels.
pub fn matrix_exponential_oracle(xi: &Wavevector, p: &PhysicalParams, t: f64) -> Mat2 {
    let mut a = generator(xi, p);
    for row in a.iter_mut() {
        for v in row.iter_mut() {
            *v *= t;
        }
    }
    expm2(&a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{kernel_triple, matrix_rel_error};

    fn pp(mu: f64, eta: f64) -> PhysicalParams {
        PhysicalParams::new(mu, eta).unwrap()
    }

    #[test]
    fn identity_at_zero() {
        let m = matrix_exponential_oracle(&Wavevector::new(1.0, 2.0, 3.0), &pp(1.0, 1.0), 0.0);
        assert_eq!(m[0][0], C64::new(1.0, 0.0));
        assert_eq!(m[1][1], C64::new(1.0, 0.0));
        assert_eq!(m[0][1], C64::new(0.0, 0.0));
        assert_eq!(m[1][0], C64::new(0.0, 0.0));
    }

    #[test]
    fn diagonal_generator() {
        let m = matrix_exponential_oracle(&Wavevector::new(0.0, 0.0, 1.0), &pp(1.0, 2.0), 1.0);
        assert!((m[0][0].re - (-1f64).exp()).abs() < 1e-15);
        assert!((m[1][1].re - (-2f64).exp()).abs() < 1e-15);
        assert!(m[0][1].norm() == 0.0 && m[1][0].norm() == 0.0);
    }

    #[test]
    fn matches_closed_form_kernel() {
        let xi = Wavevector::new(0.0, 1.0, 0.0);
        let m = matrix_exponential_oracle(&xi, &pp(1.0, 1.0), 1.0);
        let k = kernel_triple(&xi, &pp(1.0, 1.0), 1.0).matrix();
        assert!(matrix_rel_error(&k, &m) < 1e-10);
    }

    #[test]
    fn rotation_generator() {
        // exp([[0, iθ], [iθ, 0]]) = [[cos θ, i sin θ], [i sin θ, cos θ]].
        let th = 7.3;
        let a = [
            [C64::new(0.0, 0.0), C64::new(0.0, th)],
            [C64::new(0.0, th), C64::new(0.0, 0.0)],
        ];
        let m = expm2(&a);
        assert!((m[0][0] - C64::new(th.cos(), 0.0)).norm() < 1e-13);
        assert!((m[0][1] - C64::new(0.0, th.sin())).norm() < 1e-13);
    }

    #[test]
    fn nilpotent_generator() {
        let n = [
            [C64::new(0.0, 0.0), C64::new(3.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        ];
        let m = expm2(&n);
        assert!((m[0][1] - C64::new(3.0, 0.0)).norm() < 1e-14);
        assert!((m[0][0] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }
}
