//! Galilei boosts between inertial frames.
//!
//! Picture i) transforms the wavefunction by the phase
//! `exp(−imV·x/ħ + i½mV²t/ħ)` and leaves `p̂` alone; picture ii) leaves the
//! wavefunction alone and shifts the momentum operator to `p̂ − mV`. Both
//! relabel coordinates as `x′ = x − Vt`, which here only moves the grid origin.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::WaveState;
use crate::setup::GaugeField;
use crate::spectral::Spectral;
use crate::spin::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostSpec {
    pub velocity: Vector3<f64>,
    pub mass: f64,
    pub time: f64,
}

impl BoostSpec {
    pub fn new(velocity: Vector3<f64>, mass: f64, time: f64) -> Self {
        Self { velocity, mass, time }
    }

    /// Fails unless `|V|/c` stays below `limit`.
    pub fn check_nonrelativistic(&self, c: f64, limit: f64) -> Result<()> {
        let beta = self.velocity.norm() / c;
        if !(beta < limit) {
            return Err(Error::InvalidParameter {
                name: "velocity",
                reason: format!("|V|/c = {beta:.3e} is not small (limit {limit})"),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PictureTag {
    WavefunctionPicture,
    OperatorPicture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    Position,
    Momentum,
    KineticEnergy,
}

/// Additive shift of the momentum operator, `p̂′ = p̂ + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumShift {
    pub shift: Vector3<f64>,
}

impl MomentumShift {
    /// Boost by `first` followed by this one.
    pub fn compose(&self, first: &MomentumShift) -> MomentumShift {
        MomentumShift {
            shift: self.shift + first.shift,
        }
    }
}

/// Picture i): `ψ′(x′,t) = exp(−imV·x/ħ + i½mV²t/ħ) ψ(x,t)` on the grid
/// relabelled by `x′ = x − Vt`.
pub fn boost_wavefunction(state: &WaveState, spec: &BoostSpec, hbar: f64) -> Result<WaveState> {
    if state.components != 1 {
        return Err(Error::ComponentMismatch {
            expected: 1,
            found: state.components,
        });
    }
    let v = spec.velocity;
    let m = spec.mass;
    let t = spec.time;
    let grid = state.grid;
    let global = 0.5 * m * v.norm_squared() * t / hbar;
    let amplitudes = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(i, a)| a * C64::from_polar(1.0, -m * v.dot(&grid.coord(i)) / hbar + global))
        .collect();
    Ok(WaveState {
        grid: grid.shifted(&(-v * t)),
        components: 1,
        amplitudes,
        time: state.time,
    })
}

/// Picture ii): `U†p̂U = p̂ − mV`.
pub fn boost_operator_momentum(spec: &BoostSpec) -> MomentumShift {
    MomentumShift {
        shift: -spec.velocity * spec.mass,
    }
}

/// `E′ = E − V·p + ½mV²`.
pub fn transformed_energy(energy: f64, p: &Vector3<f64>, spec: &BoostSpec) -> f64 {
    energy - spec.velocity.dot(p) + 0.5 * spec.mass * spec.velocity.norm_squared()
}

/// The constant gauge field `(−½V², V)` that reproduces the boosted
/// Schrödinger equation through minimal coupling.
pub fn minimal_coupling_form(spec: &BoostSpec) -> GaugeField {
    GaugeField::uniform(spec.velocity)
}

/// Expectation value of `observable` evaluated independently in both
/// pictures; returns `(picture i, picture ii)`.
pub fn picture_equivalence_check(
    state: &WaveState,
    spec: &BoostSpec,
    observable: Observable,
    hbar: f64,
) -> Result<(f64, f64)> {
    let first = boost_wavefunction(state, spec, hbar)?;
    let mut second = state.clone();
    second.grid = state.grid.shifted(&(-spec.velocity * spec.time));
    let shift = boost_operator_momentum(spec).shift;
    let dir = spec.velocity.try_normalize(0.0).unwrap_or_else(Vector3::x);

    Ok(match observable {
        Observable::Position => (first.expect_position().dot(&dir), second.expect_position().dot(&dir)),
        Observable::Momentum => {
            let p1 = first.expect_momentum(hbar);
            let p2 = shifted_momentum_moments(&second, &shift, hbar).0;
            (p1.dot(&dir), p2.dot(&dir))
        }
        Observable::KineticEnergy => {
            let k1 = first.expect_kinetic(spec.mass, hbar);
            let k2 = shifted_momentum_moments(&second, &shift, hbar).1 / (2.0 * spec.mass);
            (k1, k2)
        }
    })
}

/// `(⟨p̂ + shift⟩, ⟨|p̂ + shift|²⟩)` with the shift applied as a wavenumber
/// offset in spectral space. Shift components off the grid axes still count,
/// since the state is uniform along those directions.
pub fn shifted_momentum_moments(state: &WaveState, shift: &Vector3<f64>, hbar: f64) -> (Vector3<f64>, f64) {
    let grid = state.grid;
    let spectral = Spectral::new(&grid);
    let ks: Vec<Vec<f64>> = (0..3).map(|a| grid.wavenumbers(a)).collect();
    let mut p = Vector3::zeros();
    let mut p2 = 0.0;
    let mut total = 0.0;
    for s in 0..state.components {
        let mut buf = state.component(s).to_vec();
        spectral.forward(&mut buf);
        for (j, c) in buf.iter().enumerate() {
            let w = c.norm_sqr();
            let i = grid.unravel(j);
            let mom = Vector3::new(ks[0][i[0]], ks[1][i[1]], ks[2][i[2]]) * hbar + shift;
            p += mom * w;
            p2 += mom.norm_squared() * w;
            total += w;
        }
    }
    (p / total, p2 / total)
}

/// Exact free evolution `exp(−i p̂²t/2mħ)` in the inertial frame.
pub fn propagate_free(state: &WaveState, mass: f64, hbar: f64, duration: f64) -> WaveState {
    propagate_uniform_gauge(state, &GaugeField::uniform(Vector3::zeros()), mass, hbar, duration)
}

/// Exact evolution under the minimally coupled Hamiltonian
/// `(p̂ − m𝓐)²/2m + m𝓐₀` for a constant gauge field, which in the boosted
/// frame is `p̂²/2m − V·p̂`. Diagonal in momentum, so one spectral step is exact.
pub fn propagate_uniform_gauge(state: &WaveState, field: &GaugeField, mass: f64, hbar: f64, duration: f64) -> WaveState {
    let grid = state.grid;
    let spectral = Spectral::new(&grid);
    let ks: Vec<Vec<f64>> = (0..3).map(|a| grid.wavenumbers(a)).collect();
    let v = field.velocity;
    let a0 = -0.5 * v.norm_squared();
    let phases: Vec<C64> = (0..grid.len())
        .map(|j| {
            let i = grid.unravel(j);
            let p = Vector3::new(ks[0][i[0]], ks[1][i[1]], ks[2][i[2]]) * hbar;
            let energy = (p - v * mass).norm_squared() / (2.0 * mass) + mass * a0;
            C64::from_polar(1.0, -energy * duration / hbar)
        })
        .collect();
    let mut out = state.clone();
    let n = grid.len();
    for s in 0..state.components {
        let block = &mut out.amplitudes[s * n..(s + 1) * n];
        spectral.apply_diagonal(block, |j| phases[j]);
    }
    out.time += duration;
    out
}
