//! FFT plumbing on grids: multi-dimensional transforms, Fourier translations
//! and shear-based rigid rotations.

use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;
use crate::spin::C64;

/// Cached FFT plans for one grid. Transforms act on one component block
/// (`grid.len()` amplitudes, row-major).
#[derive(Clone)]
pub struct Spectral {
    grid: Grid,
    forward: [Option<Arc<dyn Fft<f64>>>; 3],
    inverse: [Option<Arc<dyn Fft<f64>>>; 3],
    wavenumbers: [Vec<f64>; 3],
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        let pts = grid.points();
        let mut forward: [Option<Arc<dyn Fft<f64>>>; 3] = [None, None, None];
        let mut inverse: [Option<Arc<dyn Fft<f64>>>; 3] = [None, None, None];
        for a in 0..grid.dim() {
            forward[a] = Some(planner.plan_fft_forward(pts[a]));
            inverse[a] = Some(planner.plan_fft_inverse(pts[a]));
        }
        Self {
            grid: *grid,
            forward,
            inverse,
            wavenumbers: [grid.wavenumbers(0), grid.wavenumbers(1), grid.wavenumbers(2)],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn wavenumbers(&self, axis: usize) -> &[f64] {
        &self.wavenumbers[axis]
    }

    /// Unnormalized forward transform over all grid axes.
    pub fn forward(&self, data: &mut [C64]) {
        for a in 0..self.grid.dim() {
            self.transform_axis(data, a, false);
        }
    }

    /// Inverse transform, normalized so that `inverse(forward(x)) == x`.
    pub fn inverse(&self, data: &mut [C64]) {
        for a in 0..self.grid.dim() {
            self.transform_axis(data, a, true);
        }
        let scale = 1.0 / self.grid.len() as f64;
        data.par_iter_mut().for_each(|v| *v *= scale);
    }

    /// Multiply the spectrum by `phase(k)` where `k` is the wavevector.
    pub fn apply_diagonal(&self, data: &mut [C64], multiplier: impl Fn(usize) -> C64 + Sync) {
        self.forward(data);
        data.par_iter_mut().enumerate().for_each(|(j, v)| *v *= multiplier(j));
        self.inverse(data);
    }

    /// Translate every line along `axis` by `shift(first_flat_index_of_line)`,
    /// i.e. `f(x) → f(x − δ ê_axis)`, exactly for band-limited periodic data.
    pub fn translate_lines(&self, data: &mut [C64], axis: usize, shift: impl Fn(usize) -> f64 + Sync) {
        let fwd = self.forward[axis].as_ref().expect("axis within grid");
        let inv = self.inverse[axis].as_ref().expect("axis within grid");
        let ks = &self.wavenumbers[axis];
        let (n, stride, block) = self.line_layout(axis);
        let scale = 1.0 / n as f64;
        data.par_chunks_mut(block).enumerate().for_each(|(o, chunk)| {
            let mut line = vec![C64::new(0.0, 0.0); n];
            let mut scratch = vec![C64::new(0.0, 0.0); fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];
            for j in 0..stride {
                for (k, v) in line.iter_mut().enumerate() {
                    *v = chunk[k * stride + j];
                }
                let delta = shift(o * block + j);
                fwd.process_with_scratch(&mut line, &mut scratch);
                for (v, k) in line.iter_mut().zip(ks) {
                    *v *= C64::from_polar(scale, -k * delta);
                }
                inv.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    chunk[k * stride + j] = *v;
                }
            }
        });
    }

    /// Active rotation by `angle` in the plane spanned by axes `(a, b)`,
    /// counterclockwise from `a` towards `b`, about the coordinate origin:
    /// `f(x) → f(R(−angle) x)`.
    ///
    /// Realized as three Fourier shears `Sₐ(−tan θ/2) S_b(sin θ) Sₐ(−tan θ/2)`,
    /// each of which is unitary on the grid. Angles above π/4 are split.
    pub fn rotate_plane(&self, data: &mut [C64], a: usize, b: usize, angle: f64) {
        if angle == 0.0 {
            return;
        }
        let pieces = (angle.abs() / FRAC_PI_4).ceil().max(1.0) as usize;
        let theta = angle / pieces as f64;
        let alpha = -(0.5 * theta).tan();
        let beta = theta.sin();
        let grid = self.grid;
        let coord = move |idx: usize, axis: usize| -> f64 { grid.coord(idx)[axis] };
        for _ in 0..pieces {
            self.translate_lines(data, a, |idx| alpha * coord(idx, b));
            self.translate_lines(data, b, |idx| beta * coord(idx, a));
            self.translate_lines(data, a, |idx| alpha * coord(idx, b));
        }
    }

    fn line_layout(&self, axis: usize) -> (usize, usize, usize) {
        let pts = self.grid.points();
        let n = pts[axis];
        let stride: usize = pts[axis + 1..].iter().product();
        (n, stride, n * stride)
    }

    fn transform_axis(&self, data: &mut [C64], axis: usize, inverse: bool) {
        let plan = if inverse { &self.inverse[axis] } else { &self.forward[axis] };
        let plan = plan.as_ref().expect("axis within grid");
        let (n, stride, block) = self.line_layout(axis);
        if stride == 1 {
            data.par_chunks_mut(n).for_each(|line| {
                let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
                plan.process_with_scratch(line, &mut scratch);
            });
            return;
        }
        data.par_chunks_mut(block).for_each(|chunk| {
            let mut line = vec![C64::new(0.0, 0.0); n];
            let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
            for j in 0..stride {
                for (k, v) in line.iter_mut().enumerate() {
                    *v = chunk[k * stride + j];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    chunk[k * stride + j] = *v;
                }
            }
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::WaveState;
    use nalgebra::Vector3;

    #[test]
    fn forward_inverse_round_trip() {
        let g = Grid::new(&[8, 6, 4], &[0.0; 3], &[0.3, 0.2, 0.5]).unwrap();
        let s = Spectral::new(&g);
        let orig: Vec<C64> = (0..g.len()).map(|i| C64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let mut d = orig.clone();
        s.forward(&mut d);
        s.inverse(&mut d);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn translation_of_a_gaussian() {
        let g = Grid::centered(1, 128, 30.0).unwrap();
        let s = Spectral::new(&g);
        let st = WaveState::gaussian(g, Vector3::zeros(), Vector3::zeros(), 1.0, 1.0);
        let want = WaveState::gaussian(g, Vector3::new(1.37, 0.0, 0.0), Vector3::zeros(), 1.0, 1.0);
        let mut d = st.amplitudes.clone();
        s.translate_lines(&mut d, 0, |_| 1.37);
        for (a, b) in d.iter().zip(&want.amplitudes) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn shear_rotation_moves_packet_on_circle() {
        let g = Grid::centered(2, 96, 34.0).unwrap();
        let s = Spectral::new(&g);
        let st = WaveState::gaussian(g, Vector3::new(4.0, 0.0, 0.0), Vector3::zeros(), 1.0, 1.0);
        let angle: f64 = 1.1;
        let want = WaveState::gaussian(g, Vector3::new(4.0 * angle.cos(), 4.0 * angle.sin(), 0.0), Vector3::zeros(), 1.0, 1.0);
        let mut d = st.amplitudes.clone();
        s.rotate_plane(&mut d, 0, 1, angle);
        let err = d.iter().zip(&want.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "max error {err}");
    }
}
