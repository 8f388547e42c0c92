//! Uniform Cartesian grids and sampled wavefunctions.

use nalgebra::{Matrix2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Spectral;
use crate::spin::{SpinOperator, C64};

/// Boundary treatment of a grid.
///
/// Periodic grids use the uniform (periodic trapezoid) quadrature rule, which
/// is what the spectral propagator conserves. `Open` uses the ordinary
/// trapezoid rule with half weights at the end points. `Sponge` is periodic
/// with an absorbing layer of the given width next to every face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
    Sponge { width: f64, strength: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points: [usize; 3],
    origin: [f64; 3],
    spacing: [f64; 3],
    pub boundary: Boundary,
}

impl Grid {
    /// `points`, `origin` and `spacing` must have `dim` entries.
    pub fn new(points: &[usize], origin: &[f64], spacing: &[f64]) -> Result<Self> {
        let dim = points.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter {
                name: "grid.points",
                reason: format!("dimension must be 1, 2 or 3, got {dim}"),
            });
        }
        if origin.len() != dim || spacing.len() != dim {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: "points, origin and spacing must have equal length".into(),
            });
        }
        let mut g = Grid {
            dim,
            points: [1; 3],
            origin: [0.0; 3],
            spacing: [1.0; 3],
            boundary: Boundary::Periodic,
        };
        for a in 0..dim {
            if points[a] < 2 {
                return Err(Error::InvalidParameter {
                    name: "grid.points",
                    reason: format!("axis {a} needs at least 2 points"),
                });
            }
            if !(spacing[a] > 0.0) || !spacing[a].is_finite() {
                return Err(Error::InvalidParameter {
                    name: "grid.spacing",
                    reason: format!("axis {a} spacing must be positive and finite, got {}", spacing[a]),
                });
            }
            if !origin[a].is_finite() {
                return Err(Error::InvalidParameter {
                    name: "grid.origin",
                    reason: format!("axis {a} origin must be finite"),
                });
            }
            g.points[a] = points[a];
            g.origin[a] = origin[a];
            g.spacing[a] = spacing[a];
        }
        Ok(g)
    }

    /// A grid of `n` points per axis centred on the origin with total extent `length`.
    pub fn centered(dim: usize, n: usize, length: f64) -> Result<Self> {
        let dx = length / n as f64;
        Self::new(&vec![n; dim], &vec![-0.5 * length; dim], &vec![dx; dim])
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> [usize; 3] {
        self.points
    }

    pub fn origin(&self) -> Vector3<f64> {
        Vector3::from(self.origin)
    }

    pub fn spacing(&self) -> Vector3<f64> {
        Vector3::from(self.spacing)
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical length of each axis (`n · dx`), 0 for unused axes.
    pub fn extent(&self, axis: usize) -> f64 {
        if axis < self.dim {
            self.points[axis] as f64 * self.spacing[axis]
        } else {
            0.0
        }
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing[..self.dim].iter().product()
    }

    /// Same sampling, origin moved by `shift` (only the grid axes are used).
    pub fn shifted(&self, shift: &Vector3<f64>) -> Self {
        let mut g = *self;
        for a in 0..self.dim {
            g.origin[a] += shift[a];
        }
        g
    }

    pub fn same_sampling(&self, other: &Grid) -> bool {
        self.dim == other.dim && self.points == other.points && self.spacing == other.spacing
    }

    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let [_, n1, n2] = self.points;
        [idx / (n1 * n2), (idx / n2) % n1, idx % n2]
    }

    pub fn ravel(&self, i: [usize; 3]) -> usize {
        (i[0] * self.points[1] + i[1]) * self.points[2] + i[2]
    }

    /// Coordinate of flat index `idx`; components beyond `dim` are zero.
    pub fn coord(&self, idx: usize) -> Vector3<f64> {
        let i = self.unravel(idx);
        let mut x = Vector3::zeros();
        for a in 0..self.dim {
            x[a] = self.origin[a] + i[a] as f64 * self.spacing[a];
        }
        x
    }

    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.points[axis])
            .map(|i| self.origin[axis] + i as f64 * self.spacing[axis])
            .collect()
    }

    /// FFT-ordered angular wavenumbers along `axis`.
    pub fn wavenumbers(&self, axis: usize) -> Vec<f64> {
        let n = self.points[axis];
        if axis >= self.dim {
            return vec![0.0; n];
        }
        let dk = 2.0 * std::f64::consts::PI / (n as f64 * self.spacing[axis]);
        (0..n)
            .map(|j| {
                let m = if j <= (n - 1) / 2 { j as isize } else { j as isize - n as isize };
                m as f64 * dk
            })
            .collect()
    }

    /// Quadrature weight (without the cell volume) of flat index `idx`.
    pub fn weight(&self, idx: usize) -> f64 {
        match self.boundary {
            Boundary::Open => {
                let i = self.unravel(idx);
                (0..self.dim)
                    .map(|a| if i[a] == 0 || i[a] + 1 == self.points[a] { 0.5 } else { 1.0 })
                    .product()
            }
            _ => 1.0,
        }
    }

    /// Largest distance from the box faces along grid axes, as a fraction of
    /// the half extent; used to detect packets reaching the boundary.
    pub fn boundary_distance(&self, idx: usize) -> f64 {
        let i = self.unravel(idx);
        (0..self.dim)
            .map(|a| i[a].min(self.points[a] - 1 - i[a]) as f64 * self.spacing[a])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Scalar or two-component wavefunction sampled on a grid.
///
/// `amplitudes` is component-major: component `s` occupies
/// `amplitudes[s * n .. (s + 1) * n]`, each block row-major over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub grid: Grid,
    pub components: usize,
    pub amplitudes: Vec<C64>,
    pub time: f64,
}

impl WaveState {
    pub fn new(grid: Grid, components: usize, amplitudes: Vec<C64>, time: f64) -> Result<Self> {
        if components != 1 && components != 2 {
            return Err(Error::InvalidParameter {
                name: "components",
                reason: format!("must be 1 or 2, got {components}"),
            });
        }
        if amplitudes.len() != components * grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} amplitudes for {} components on {} points",
                amplitudes.len(),
                components,
                grid.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "amplitudes",
                reason: "non-finite amplitude".into(),
            });
        }
        Ok(Self {
            grid,
            components,
            amplitudes,
            time,
        })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&Vector3<f64>) -> C64) -> Self {
        let amplitudes = (0..grid.len()).map(|i| f(&grid.coord(i))).collect();
        Self {
            grid,
            components: 1,
            amplitudes,
            time: 0.0,
        }
    }

    /// Normalized Gaussian packet `exp(−|x−x₀|²/4σ² + i p₀·x/ħ)`.
    pub fn gaussian(grid: Grid, center: Vector3<f64>, momentum: Vector3<f64>, width: f64, hbar: f64) -> Self {
        let mut s = Self::from_fn(grid, |x| {
            let d = x - center;
            let mut r2 = 0.0;
            let mut phase = 0.0;
            for a in 0..grid.dim() {
                r2 += d[a] * d[a];
                phase += momentum[a] * x[a] / hbar;
            }
            C64::from_polar((-r2 / (4.0 * width * width)).exp(), phase)
        });
        s.normalize();
        s
    }

    /// Scalar spatial part times a constant spinor.
    pub fn with_spinor(&self, spinor: [C64; 2]) -> Result<Self> {
        if self.components != 1 {
            return Err(Error::ComponentMismatch {
                expected: 1,
                found: self.components,
            });
        }
        let mut amplitudes = Vec::with_capacity(2 * self.grid.len());
        for c in spinor {
            amplitudes.extend(self.amplitudes.iter().map(|a| a * c));
        }
        Ok(Self {
            grid: self.grid,
            components: 2,
            amplitudes,
            time: self.time,
        })
    }

    pub fn component(&self, s: usize) -> &[C64] {
        let n = self.grid.len();
        &self.amplitudes[s * n..(s + 1) * n]
    }

    pub fn density(&self) -> Vec<f64> {
        let n = self.grid.len();
        (0..n)
            .map(|i| (0..self.components).map(|s| self.amplitudes[s * n + i].norm_sqr()).sum())
            .collect()
    }

    /// `√(Σ_s ∫|ψ_s|² dx)` by grid quadrature.
    pub fn norm(&self) -> f64 {
        grid_norm(self)
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut s = self.clone();
        for a in &mut s.amplitudes {
            *a *= factor;
        }
        s
    }

    /// Apply a 2x2 matrix at every grid point.
    pub fn apply_pointwise(&mut self, f: impl Fn(&Vector3<f64>) -> Matrix2<C64>) -> Result<()> {
        if self.components != 2 {
            return Err(Error::ComponentMismatch {
                expected: 2,
                found: self.components,
            });
        }
        let n = self.grid.len();
        for i in 0..n {
            let u = f(&self.grid.coord(i));
            let (a, b) = (self.amplitudes[i], self.amplitudes[n + i]);
            self.amplitudes[i] = u[(0, 0)] * a + u[(0, 1)] * b;
            self.amplitudes[n + i] = u[(1, 0)] * a + u[(1, 1)] * b;
        }
        Ok(())
    }

    /// `⟨ψ|φ⟩` with the grid quadrature.
    pub fn inner(&self, other: &WaveState) -> C64 {
        let n = self.grid.len();
        let dv = self.grid.cell_volume();
        let mut acc = C64::new(0.0, 0.0);
        for (k, (a, b)) in self.amplitudes.iter().zip(&other.amplitudes).enumerate() {
            acc += a.conj() * b * self.grid.weight(k % n);
        }
        acc * dv
    }

    pub fn expect_position(&self) -> Vector3<f64> {
        let rho = self.density();
        let mut num = Vector3::zeros();
        let mut den = 0.0;
        for (i, r) in rho.iter().enumerate() {
            let w = r * self.grid.weight(i);
            num += self.grid.coord(i) * w;
            den += w;
        }
        num / den
    }

    /// Spectral `⟨p̂⟩`.
    pub fn expect_momentum(&self, hbar: f64) -> Vector3<f64> {
        self.momentum_moments(hbar).0
    }

    /// Spectral `⟨p̂²⟩ / 2m`.
    pub fn expect_kinetic(&self, mass: f64, hbar: f64) -> f64 {
        self.momentum_moments(hbar).1 / (2.0 * mass)
    }

    /// `(⟨p̂⟩, ⟨p̂²⟩)` from the discrete Fourier transform of every component.
    pub fn momentum_moments(&self, hbar: f64) -> (Vector3<f64>, f64) {
        let spectral = Spectral::new(&self.grid);
        let n = self.grid.len();
        let ks: Vec<Vec<f64>> = (0..3).map(|a| self.grid.wavenumbers(a)).collect();
        let mut p = Vector3::zeros();
        let mut p2 = 0.0;
        let mut total = 0.0;
        for s in 0..self.components {
            let mut buf = self.component(s).to_vec();
            spectral.forward(&mut buf);
            for (j, c) in buf.iter().enumerate().take(n) {
                let w = c.norm_sqr();
                let i = self.grid.unravel(j);
                let k = Vector3::new(ks[0][i[0]], ks[1][i[1]], ks[2][i[2]]);
                p += k * w;
                p2 += k.norm_squared() * w;
                total += w;
            }
        }
        (p * (hbar / total), p2 * (hbar * hbar / total))
    }

    /// `⟨Ŝ⟩` for spinor states.
    pub fn expect_spin(&self, hbar: f64) -> Result<Vector3<f64>> {
        if self.components != 2 {
            return Err(Error::ComponentMismatch {
                expected: 2,
                found: self.components,
            });
        }
        let s = SpinOperator::spin(hbar);
        let n = self.grid.len();
        let mut out = Vector3::zeros();
        let mut den = 0.0;
        for i in 0..n {
            let w = self.grid.weight(i);
            let (a, b) = (self.amplitudes[i], self.amplitudes[n + i]);
            den += (a.norm_sqr() + b.norm_sqr()) * w;
            for k in 0..3 {
                let m = &s[k].matrix;
                let v = a.conj() * (m[(0, 0)] * a + m[(0, 1)] * b) + b.conj() * (m[(1, 0)] * a + m[(1, 1)] * b);
                out[k] += v.re * w;
            }
        }
        Ok(out / den)
    }

    /// Fraction of probability within `margin` of any face of the box.
    pub fn boundary_probability(&self, margin: f64) -> f64 {
        let rho = self.density();
        let mut edge = 0.0;
        let mut total = 0.0;
        for (i, r) in rho.iter().enumerate() {
            total += r;
            if self.grid.boundary_distance(i) < margin {
                edge += r;
            }
        }
        if total > 0.0 {
            edge / total
        } else {
            0.0
        }
    }
}

/// L² norm by grid quadrature (periodic or ordinary trapezoid, per boundary).
pub fn grid_norm(state: &WaveState) -> f64 {
    let n = state.grid.len();
    let mut acc = 0.0;
    for (k, a) in state.amplitudes.iter().enumerate() {
        acc += a.norm_sqr() * state.grid.weight(k % n);
    }
    (acc * state.grid.cell_volume()).sqrt()
}
