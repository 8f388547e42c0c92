//! Dense matrix realizations of grid operators, for spectra and identity checks.

use nalgebra::{DMatrix, Matrix2, Vector3};

use crate::grid::Grid;
use crate::spin::C64;

/// Fourier differentiation matrix for `n` periodic samples with spacing `dx`.
/// The Nyquist mode is dropped, so the matrix is real and antisymmetric.
pub fn fourier_derivative(n: usize, dx: f64) -> DMatrix<f64> {
    let l = n as f64 * dx;
    let dk = 2.0 * std::f64::consts::PI / l;
    let modes: Vec<f64> = (0..n)
        .filter_map(|j| {
            let m = if j <= (n - 1) / 2 { j as isize } else { j as isize - n as isize };
            if n % 2 == 0 && j == n / 2 {
                None
            } else {
                Some(m as f64 * dk)
            }
        })
        .collect();
    DMatrix::from_fn(n, n, |j, l| {
        let d = (j as f64 - l as f64) * dx;
        modes.iter().map(|k| -k * (k * d).sin()).sum::<f64>() / n as f64
    })
}

fn kron_c(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Embed a one-dimensional operator acting on `axis` into the full grid space.
pub fn on_axis(grid: &Grid, axis: usize, op: &DMatrix<C64>) -> DMatrix<C64> {
    let pts = grid.points();
    let mut out = DMatrix::<C64>::identity(1, 1);
    for a in 0..3 {
        let factor = if a == axis { op.clone() } else { DMatrix::identity(pts[a], pts[a]) };
        out = kron_c(&out, &factor);
    }
    out
}

/// Momentum component `p̂_a = −iħ∂_a` on the grid; zero on axes the grid lacks.
pub fn momentum(grid: &Grid, axis: usize, hbar: f64) -> DMatrix<C64> {
    let n = grid.len();
    if axis >= grid.dim() {
        return DMatrix::zeros(n, n);
    }
    let d = fourier_derivative(grid.points()[axis], grid.spacing()[axis]);
    let p1 = d.map(|v| C64::new(0.0, -hbar * v));
    on_axis(grid, axis, &p1)
}

/// All three momentum components.
pub fn momenta(grid: &Grid, hbar: f64) -> [DMatrix<C64>; 3] {
    [momentum(grid, 0, hbar), momentum(grid, 1, hbar), momentum(grid, 2, hbar)]
}

/// Diagonal multiplication operator.
pub fn diagonal(grid: &Grid, f: impl Fn(&Vector3<f64>) -> C64) -> DMatrix<C64> {
    let n = grid.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = f(&grid.coord(i));
    }
    m
}

/// Real diagonal multiplication operator.
pub fn diagonal_real(grid: &Grid, f: impl Fn(&Vector3<f64>) -> f64) -> DMatrix<C64> {
    diagonal(grid, |x| C64::new(f(x), 0.0))
}

/// Multiply by a diagonal (stored as a vector) on the left: `diag(d) · m`.
pub fn scale_rows(d: &[C64], m: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = m.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        row *= d[i];
    }
    out
}

/// `spin ⊗ space` in the component-major layout used by `WaveState`.
pub fn spin_space(spin: &Matrix2<C64>, space: &DMatrix<C64>) -> DMatrix<C64> {
    let s = DMatrix::from_fn(2, 2, |i, j| spin[(i, j)]);
    s.kronecker(space)
}

/// Pointwise 2x2 field as a block operator in the component-major layout.
pub fn spin_field(grid: &Grid, f: impl Fn(&Vector3<f64>) -> Matrix2<C64>) -> DMatrix<C64> {
    let n = grid.len();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let u = f(&grid.coord(i));
        for r in 0..2 {
            for c in 0..2 {
                m[(r * n + i, c * n + i)] = u[(r, c)];
            }
        }
    }
    m
}

/// `inner ⊗ space` for an internal (spinor) matrix of any size.
pub fn internal_space(inner: &DMatrix<C64>, space: &DMatrix<C64>) -> DMatrix<C64> {
    inner.kronecker(space)
}

/// Pointwise `k×k` field as a block operator in the component-major layout.
pub fn internal_field(grid: &Grid, k: usize, f: impl Fn(&Vector3<f64>) -> DMatrix<C64>) -> DMatrix<C64> {
    let n = grid.len();
    let mut m = DMatrix::zeros(k * n, k * n);
    for i in 0..n {
        let u = f(&grid.coord(i));
        for r in 0..k {
            for c in 0..k {
                m[(r * n + i, c * n + i)] = u[(r, c)];
            }
        }
    }
    m
}

/// `max |H − H†|`.
pub fn hermiticity_residual(h: &DMatrix<C64>) -> f64 {
    (h - h.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// `max |A − B|` elementwise.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(h: &DMatrix<C64>) -> Vec<f64> {
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_matrix_is_antisymmetric_and_exact_on_modes() {
        let n = 16;
        let dx = 0.4;
        let d = fourier_derivative(n, dx);
        assert!((&d + d.transpose()).abs().max() < 1e-13);
        let l = n as f64 * dx;
        let k = 3.0 * 2.0 * std::f64::consts::PI / l;
        let f = nalgebra::DVector::from_fn(n, |j, _| (k * j as f64 * dx).sin());
        let df = &d * f;
        for j in 0..n {
            assert!((df[j] - k * (k * j as f64 * dx).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn axis_embedding_commutes_across_axes() {
        let g = Grid::centered(2, 6, 3.0).unwrap();
        let px = momentum(&g, 0, 1.0);
        let py = momentum(&g, 1, 1.0);
        assert!(max_abs_diff(&(&px * &py), &(&py * &px)) < 1e-13);
        let x = diagonal_real(&g, |r| r.x);
        assert!(max_abs_diff(&(&x * &py), &(&py * &x)) < 1e-13);
    }
}
