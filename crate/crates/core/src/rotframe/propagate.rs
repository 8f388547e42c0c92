use std::f64::consts::PI;

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Boundary, WaveState};
use crate::spectral::Spectral;
use crate::spin::{exp_hermitian, C64};

use super::hamiltonian::RotatingHamiltonian;

/// Conditions worth reporting that do not stop a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StabilityWarning {
    /// `dt·max|V|/ħ` of the local potential exceeds π.
    LocalPhase { phase: f64 },
    /// `ħk²dt/2m` at the Nyquist wavenumber exceeds π; fine for the exact
    /// kinetic factor but a sign that the time step is under-resolved.
    KineticPhase { phase: f64 },
    /// `|Ω×x|/c` on the grid exceeds the non-relativistic bound.
    Relativistic { ratio: f64 },
    /// Probability close to the box faces exceeded the threshold.
    BoundaryProbability { step: usize, probability: f64 },
}

/// Probability in the boundary band above which a leak is reported.
pub const BOUNDARY_THRESHOLD: f64 = 1e-6;
const RELATIVISTIC_LIMIT: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct Propagation {
    pub state: WaveState,
    pub warnings: Vec<StabilityWarning>,
}

/// Split-step propagator for a fixed Hamiltonian, grid and time step.
///
/// One step is `V(dt/2) · R(dt) · K(dt) · V(dt/2)` with `K` the exact
/// spectral kinetic factor, `R` the rigid rotation generated by the orbital
/// terms (commutes with `K`) and `V` the pointwise 2x2 local part. With a
/// constant local part (no spin-orbit coupling) every factor commutes and the
/// step is exact.
#[derive(Debug, Clone)]
pub struct Propagator {
    hamiltonian: RotatingHamiltonian,
    spectral: Spectral,
    dt: f64,
    kinetic: Vec<C64>,
    half_local: Option<Vec<Matrix2<C64>>>,
    rotation: Option<((usize, usize), [f64; 2])>,
    damping: Option<Vec<f64>>,
    warnings: Vec<StabilityWarning>,
}

impl Propagator {
    pub fn new(hamiltonian: &RotatingHamiltonian, grid: &crate::grid::Grid, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be positive and finite, got {dt}"),
            });
        }
        let s = hamiltonian.setup;
        let spectral = Spectral::new(grid);
        let n = grid.len();
        let mut kinetic = Vec::with_capacity(n);
        let mut kmax2: f64 = 0.0;
        for idx in 0..n {
            let i = grid.unravel(idx);
            let k2: f64 = (0..grid.dim()).map(|a| spectral.wavenumbers(a)[i[a]].powi(2)).sum();
            kmax2 = kmax2.max(k2);
            kinetic.push(C64::from_polar(1.0, -s.hbar * k2 * dt / (2.0 * s.mass)));
        }
        let mut warnings = Vec::new();
        let kin_phase = s.hbar * kmax2 * dt / (2.0 * s.mass);
        if kin_phase > PI {
            warnings.push(StabilityWarning::KineticPhase { phase: kin_phase });
        }
        let ratio = hamiltonian.validity_ratio(grid);
        if ratio > RELATIVISTIC_LIMIT {
            warnings.push(StabilityWarning::Relativistic { ratio });
        }

        let half_local = if hamiltonian.components() == 2 {
            let mut worst: f64 = 0.0;
            let mats = (0..n)
                .map(|idx| {
                    let (a0, a) = hamiltonian.local_potential(&grid.coord(idx));
                    worst = worst.max(a0.abs() + a.norm());
                    exp_hermitian(a0, &a, 0.5 * dt / s.hbar)
                })
                .collect();
            let phase = dt * worst / s.hbar;
            if phase > PI {
                warnings.push(StabilityWarning::LocalPhase { phase });
            }
            Some(mats)
        } else {
            None
        };

        let rotation = hamiltonian.orbital_rotation(grid)?;

        let damping = match grid.boundary {
            Boundary::Sponge { width, strength } => Some(
                (0..n)
                    .map(|idx| {
                        let d = grid.boundary_distance(idx);
                        if d < width {
                            let u = (width - d) / width;
                            (-strength * u * u * dt).exp()
                        } else {
                            1.0
                        }
                    })
                    .collect(),
            ),
            _ => None,
        };

        Ok(Self {
            hamiltonian: *hamiltonian,
            spectral,
            dt,
            kinetic,
            half_local,
            rotation,
            damping,
            warnings,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Warnings detected while setting up the propagator.
    pub fn warnings(&self) -> &[StabilityWarning] {
        &self.warnings
    }

    pub fn step(&self, state: &mut WaveState) -> Result<()> {
        if state.components != self.hamiltonian.components() {
            return Err(Error::ComponentMismatch {
                expected: self.hamiltonian.components(),
                found: state.components,
            });
        }
        if !state.grid.same_sampling(self.spectral.grid()) {
            return Err(Error::GridMismatch("state grid differs from propagator grid".into()));
        }
        let n = state.grid.len();
        if let Some(m) = &self.half_local {
            apply_local(state, m);
        }
        for (s, block) in state.amplitudes.chunks_mut(n).enumerate() {
            self.spectral.apply_diagonal(block, |j| self.kinetic[j]);
            if let Some(((a, b), rates)) = self.rotation {
                self.spectral.rotate_plane(block, a, b, -rates[s.min(1)] * self.dt);
            }
        }
        if let Some(m) = &self.half_local {
            apply_local(state, m);
        }
        if let Some(d) = &self.damping {
            for block in state.amplitudes.chunks_mut(n) {
                for (v, f) in block.iter_mut().zip(d) {
                    *v *= *f;
                }
            }
        }
        state.time += self.dt;
        Ok(())
    }
}

fn apply_local(state: &mut WaveState, m: &[Matrix2<C64>]) {
    let n = state.grid.len();
    let (up, down) = state.amplitudes.split_at_mut(n);
    for ((a, b), u) in up.iter_mut().zip(down.iter_mut()).zip(m) {
        let (x, y) = (*a, *b);
        *a = u[(0, 0)] * x + u[(0, 1)] * y;
        *b = u[(1, 0)] * x + u[(1, 1)] * y;
    }
}

/// Advance `state` by `steps` steps of size `dt`.
///
/// Boundary proximity is checked after every step; the first crossing of the
/// threshold is reported once. A non-finite norm aborts the run.
pub fn propagate(state: &WaveState, hamiltonian: &RotatingHamiltonian, dt: f64, steps: usize) -> Result<Propagation> {
    let prop = Propagator::new(hamiltonian, &state.grid, dt)?;
    let mut warnings = prop.warnings().to_vec();
    let mut psi = state.clone();
    let margin = boundary_margin(&psi);
    let mut flagged = false;
    for step in 1..=steps {
        prop.step(&mut psi)?;
        if !flagged {
            let p = psi.boundary_probability(margin);
            if p > BOUNDARY_THRESHOLD {
                warnings.push(StabilityWarning::BoundaryProbability { step, probability: p });
                flagged = true;
            }
        }
    }
    let norm = psi.norm();
    if !norm.is_finite() {
        return Err(Error::NumericalInstability(format!("norm became {norm} during propagation")));
    }
    Ok(Propagation { state: psi, warnings })
}

/// Width of the boundary band used for leak detection: a tenth of the
/// smallest active extent, at least two grid cells.
pub fn boundary_margin(state: &WaveState) -> f64 {
    let g = &state.grid;
    (0..g.dim())
        .map(|a| (0.1 * g.extent(a)).max(2.0 * g.spacing()[a]))
        .fold(f64::INFINITY, f64::min)
}
