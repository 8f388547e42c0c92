use nalgebra::{Matrix2, Matrix4};

use crate::spin::{pauli, C64};

fn blocks(a: &Matrix2<C64>, b: &Matrix2<C64>, c: &Matrix2<C64>, d: &Matrix2<C64>) -> Matrix4<C64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
    m
}

/// Dirac representation `γ⁰ = diag(I, −I)`, `γⁱ = [[0, σⁱ], [−σⁱ, 0]]`
/// (upper index).
pub fn gamma() -> [Matrix4<C64>; 4] {
    let z = Matrix2::zeros();
    let one = Matrix2::identity();
    let s = pauli();
    [
        blocks(&one, &z, &z, &(-one)),
        blocks(&z, &s[0], &(-s[0]), &z),
        blocks(&z, &s[1], &(-s[1]), &z),
        blocks(&z, &s[2], &(-s[2]), &z),
    ]
}

pub fn beta() -> Matrix4<C64> {
    gamma()[0]
}

/// `αⁱ = γ⁰γⁱ`.
pub fn alpha() -> [Matrix4<C64>; 3] {
    let g = gamma();
    [g[0] * g[1], g[0] * g[2], g[0] * g[3]]
}

/// `M^{ab} = (i/2)[γ^a, γ^b]`.
pub fn spin_tensor(a: usize, b: usize) -> Matrix4<C64> {
    let g = gamma();
    (g[a] * g[b] - g[b] * g[a]) * C64::new(0.0, 0.5)
}

/// Largest entry of `{γ^a, γ^b} − 2η^{ab}` over all pairs.
pub fn gamma_anticommutator_defect() -> f64 {
    let g = gamma();
    let eta = [1.0, -1.0, -1.0, -1.0];
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let mut d = g[a] * g[b] + g[b] * g[a];
            if a == b {
                d -= Matrix4::identity() * C64::new(2.0 * eta[a], 0.0);
            }
            worst = worst.max(d.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_algebra_exact() {
        assert_eq!(gamma_anticommutator_defect(), 0.0);
    }

    #[test]
    fn spatial_spin_tensor_is_block_pauli() {
        // M^{ij} = ε_ijk diag(σ_k, σ_k)
        let s = pauli();
        for (i, j, k) in [(1, 2, 2), (2, 3, 0), (3, 1, 1)] {
            let want = blocks(&s[k], &Matrix2::zeros(), &Matrix2::zeros(), &s[k]);
            assert!((spin_tensor(i, j) - want).norm() < 1e-15);
            assert!((spin_tensor(i, j) + spin_tensor(j, i)).norm() == 0.0);
        }
    }
}
