use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::WaveState;
use crate::spin::SpinOperator;

use super::classical::{classical_acceleration, Trajectory};
use super::hamiltonian::RotatingHamiltonian;
use super::propagate::{boundary_margin, Propagator, BOUNDARY_THRESHOLD};


/// Expectation values along a propagated packet.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EhrenfestTrajectory {
    pub times: Vec<f64>,
    pub mean_position: Vec<Vector3<f64>>,
    pub mean_velocity: Vec<Vector3<f64>>,
    /// First step at which the probability near the box faces exceeded 1e-6;
    /// samples after it are not trustworthy.
    pub boundary_hit: Option<usize>,
}

impl EhrenfestTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The same samples as a plain trajectory.
    pub fn to_trajectory(&self) -> Trajectory {
        Trajectory {
            times: self.times.clone(),
            position: self.mean_position.clone(),
            velocity: self.mean_velocity.clone(),
        }
    }
}

/// `⟨ẋ⟩ = (⟨p̂⟩ − m⟨Ω×x⟩ − ⟨Ŝ×𝓔⟩)/m` in the rotating frame.
pub fn mean_velocity(state: &WaveState, h: &RotatingHamiltonian) -> Result<Vector3<f64>> {
    let s = h.setup;
    let x = state.expect_position();
    let p = state.expect_momentum(s.hbar);
    let mut v = p - s.mass * h.field.avec(&x);
    if h.include_spin_orbit {
        v -= spin_cross_efield(state, h)?;
    }
    Ok(v / s.mass)
}

fn spin_cross_efield(state: &WaveState, h: &RotatingHamiltonian) -> Result<Vector3<f64>> {
    if state.components != 2 {
        return Err(Error::ComponentMismatch {
            expected: 2,
            found: state.components,
        });
    }
    let n = state.grid.len();
    let spins = SpinOperator::spin(h.setup.hbar);
    let mut acc = Vector3::zeros();
    let mut den = 0.0;
    for i in 0..n {
        let w = state.grid.weight(i);
        let (a, b) = (state.amplitudes[i], state.amplitudes[n + i]);
        let mut sv = Vector3::zeros();
        for k in 0..3 {
            let m = &spins[k].matrix;
            sv[k] = (a.conj() * (m[(0, 0)] * a + m[(0, 1)] * b) + b.conj() * (m[(1, 0)] * a + m[(1, 1)] * b)).re;
        }
        acc += sv.cross(&h.efield(&state.grid.coord(i))) * w;
        den += (a.norm_sqr() + b.norm_sqr()) * w;
    }
    Ok(acc / den)
}

/// Propagate and record `⟨x⟩` and `⟨ẋ⟩` every `record_every` steps.
pub fn ehrenfest_trajectory(
    state: &WaveState,
    hamiltonian: &RotatingHamiltonian,
    dt: f64,
    steps: usize,
    record_every: usize,
) -> Result<EhrenfestTrajectory> {
    let every = record_every.max(1);
    let prop = Propagator::new(hamiltonian, &state.grid, dt)?;
    let margin = boundary_margin(state);
    let mut psi = state.clone();
    let mut tr = Trajectory::default();
    let mut boundary_hit = None;
    tr.push(psi.time, psi.expect_position(), mean_velocity(&psi, hamiltonian)?);
    for step in 1..=steps {
        prop.step(&mut psi)?;
        if boundary_hit.is_none() && psi.boundary_probability(margin) > BOUNDARY_THRESHOLD {
            boundary_hit = Some(step);
        }
        if step % every == 0 || step == steps {
            tr.push(psi.time, psi.expect_position(), mean_velocity(&psi, hamiltonian)?);
        }
    }
    if !psi.norm().is_finite() {
        return Err(Error::NumericalInstability("norm became non-finite".into()));
    }
    Ok(EhrenfestTrajectory {
        times: tr.times,
        mean_position: tr.position,
        mean_velocity: tr.velocity,
        boundary_hit,
    })
}

/// Largest mismatch between the central-difference second derivative of
/// `⟨x⟩` and the Coriolis plus centrifugal acceleration evaluated at
/// `(⟨x⟩, ⟨ẋ⟩)`, relative to the largest acceleration on the trajectory.
///
/// Needs uniformly spaced samples; without spin-orbit coupling the
/// mean equations are exactly the classical ones, so the residual measures
/// the finite-difference error and the propagator error only.
pub fn ehrenfest_residual(tr: &Trajectory, omega: &Vector3<f64>) -> Result<f64> {
    if tr.len() < 3 {
        return Err(Error::InvalidParameter {
            name: "trajectory",
            reason: "needs at least 3 samples".into(),
        });
    }
    let dt = tr.times[1] - tr.times[0];
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 1..tr.len() - 1 {
        let h1 = tr.times[i] - tr.times[i - 1];
        let h2 = tr.times[i + 1] - tr.times[i];
        if (h1 - dt).abs() > 1e-9 * dt || (h2 - dt).abs() > 1e-9 * dt {
            return Err(Error::InvalidParameter {
                name: "trajectory",
                reason: "samples must be uniformly spaced".into(),
            });
        }
        let fd = (tr.position[i + 1] - 2.0 * tr.position[i] + tr.position[i - 1]) / (dt * dt);
        let rhs = classical_acceleration(&tr.position[i], &tr.velocity[i], omega);
        worst = worst.max((fd - rhs).norm());
        scale = scale.max(rhs.norm());
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::rotframe::{build_hamiltonian, HamiltonianFlags};
    use crate::setup::RotationSetup;

    #[test]
    fn velocity_of_packet_at_rest_in_inertial_frame() {
        // A packet with p = mΩ×x0 is at rest inertially, so ⟨ẋ⟩ = 0 to
        // leading order (exactly, since ⟨Ω×x⟩ = Ω×⟨x⟩).
        let g = Grid::centered(2, 64, 20.0).unwrap();
        let w = Vector3::new(0.0, 0.0, 0.2);
        let x0 = Vector3::new(1.5, -1.0, 0.0);
        let s = WaveState::gaussian(g, x0, w.cross(&x0), 1.0, 1.0);
        let setup = RotationSetup::natural(1.0, w).unwrap();
        let h = build_hamiltonian(&setup, HamiltonianFlags::default());
        assert!(mean_velocity(&s, &h).unwrap().norm() < 1e-10);
    }

    #[test]
    fn residual_small_for_short_run() {
        let g = Grid::centered(2, 64, 24.0).unwrap();
        let w = Vector3::new(0.0, 0.0, 0.5);
        let s = WaveState::gaussian(g, Vector3::new(2.0, 0.0, 0.0), Vector3::new(0.0, 0.5, 0.0), 1.0, 1.0);
        let setup = RotationSetup::natural(1.0, w).unwrap();
        let h = build_hamiltonian(&setup, HamiltonianFlags::default());
        let tr = ehrenfest_trajectory(&s, &h, 0.01, 200, 1).unwrap();
        assert!(ehrenfest_residual(&tr.to_trajectory(), &w).unwrap() < 1e-3);
    }
}
