//! Pauli algebra and closed-form SU(2) exponentials.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// The three Pauli matrices, indexed x, y, z.
pub fn pauli() -> [Matrix2<C64>; 3] {
    [
        Matrix2::new(ZERO, ONE, ONE, ZERO),
        Matrix2::new(ZERO, -I, I, ZERO),
        Matrix2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

pub fn identity2() -> Matrix2<C64> {
    Matrix2::identity()
}

/// `σ·v` for a real 3-vector.
pub fn sigma_dot(v: &Vector3<f64>) -> Matrix2<C64> {
    Matrix2::new(
        C64::new(v.z, 0.0),
        C64::new(v.x, -v.y),
        C64::new(v.x, v.y),
        C64::new(-v.z, 0.0),
    )
}

/// `exp(i σ·w / 2)`, i.e. the SU(2) element that rotates by angle `-|w|` about `ŵ`.
///
/// Uses the Rodrigues form, so `w = 0` is the identity without any division.
pub fn exp_i_half_sigma(w: &Vector3<f64>) -> Matrix2<C64> {
    let angle = w.norm();
    let half = 0.5 * angle;
    let c = C64::new(half.cos(), 0.0);
    if angle == 0.0 {
        return identity2();
    }
    let s = half.sin() / angle;
    identity2() * c + sigma_dot(&(w * s)) * I
}

/// `exp(-i τ (a0 + a·σ))` for a Hermitian 2x2 generator given by `(a0, a)`.
pub fn exp_hermitian(a0: f64, a: &Vector3<f64>, tau: f64) -> Matrix2<C64> {
    let phase = C64::from_polar(1.0, -a0 * tau);
    exp_i_half_sigma(&(a * (-2.0 * tau))) * phase
}

/// Decompose a Hermitian 2x2 matrix into `a0 I + a·σ`.
pub fn pauli_components(m: &Matrix2<C64>) -> (f64, Vector3<f64>) {
    let a0 = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let az = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    let off = 0.5 * (m[(1, 0)] + m[(0, 1)].conj());
    (a0, Vector3::new(off.re, off.im, az))
}

/// A 2x2 operator on the spin space of a spin-1/2 particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinOperator {
    pub matrix: Matrix2<C64>,
}

impl SpinOperator {
    pub fn new(matrix: Matrix2<C64>) -> Self {
        Self { matrix }
    }

    pub fn identity() -> Self {
        Self::new(identity2())
    }

    /// Spin components `Ŝ = (ħ/2) σ`.
    pub fn spin(hbar: f64) -> [SpinOperator; 3] {
        pauli().map(|s| SpinOperator::new(s * C64::new(0.5 * hbar, 0.0)))
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.matrix.adjoint())
    }

    /// Frobenius norm of `Φ†Φ − I`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.matrix.adjoint() * self.matrix - identity2()).norm()
    }

    /// Spectral-norm distance, computed exactly for 2x2 matrices.
    pub fn distance(&self, other: &SpinOperator) -> f64 {
        operator_norm(&(self.matrix - other.matrix))
    }

    /// Eigenphases of a unitary operator, ascending, in (−π, π].
    ///
    /// Read off `U = e^{iα}(cos θ + i sin θ n̂·σ)` directly, so phases far
    /// below machine epsilon survive.
    pub fn eigenphases(&self) -> [f64; 2] {
        let m = &self.matrix;
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let alpha = 0.5 * det.arg();
        let v = m * C64::from_polar(1.0, -alpha);
        let c = 0.5 * (v[(0, 0)] + v[(1, 1)]).re;
        let s = Vector3::new(
            0.5 * (v[(0, 1)] + v[(1, 0)]).im,
            0.5 * (v[(0, 1)] - v[(1, 0)]).re,
            0.5 * (v[(0, 0)] - v[(1, 1)]).im,
        );
        let theta = s.norm().atan2(c);
        let wrap = |p: f64| {
            if p > PI {
                p - 2.0 * PI
            } else if p <= -PI {
                p + 2.0 * PI
            } else {
                p
            }
        };
        let mut p = [wrap(alpha - theta), wrap(alpha + theta)];
        p.sort_by(|a, b| a.partial_cmp(b).unwrap());
        p
    }
}

/// Largest singular value of a 2x2 complex matrix.
pub fn operator_norm(m: &Matrix2<C64>) -> f64 {
    let g = m.adjoint() * m;
    let a = g[(0, 0)].re;
    let d = g[(1, 1)].re;
    let b = g[(0, 1)].norm();
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    (mean + half_gap).max(0.0).sqrt()
}
