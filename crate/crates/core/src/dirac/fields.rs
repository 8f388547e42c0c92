use nalgebra::{Vector3, Vector4};
use serde::Serialize;

use crate::error::Result;
use crate::setup::RotationSetup;

use super::metric::WeakMetric;

/// The analog electric field of the rotating frame and the Darwin constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveFields {
    pub omega: Vector3<f64>,
    pub mass: f64,
    pub hbar: f64,
    pub c: f64,
    /// `−3ħ²Ω²/(8mc²)`, subtracted from the Pauli Hamiltonian.
    pub darwin: f64,
}

pub fn effective_fields(setup: &RotationSetup) -> EffectiveFields {
    let w2 = setup.omega.norm_squared();
    EffectiveFields {
        omega: setup.omega,
        mass: setup.mass,
        hbar: setup.hbar,
        c: setup.c,
        darwin: -3.0 * setup.hbar * setup.hbar * w2 / (8.0 * setup.mass * setup.c * setup.c),
    }
}

impl EffectiveFields {
    /// `𝓔 = Ω²x/c²`, the isotropic form used in the spin-orbit coupling.
    pub fn efield(&self, x: &Vector3<f64>) -> Vector3<f64> {
        x * (self.omega.norm_squared() / (self.c * self.c))
    }

    /// `−∇𝓐₀/c² = (Ω²x − (Ω·x)Ω)/c²`; agrees with `efield` in the plane
    /// perpendicular to `Ω`.
    pub fn efield_exact(&self, x: &Vector3<f64>) -> Vector3<f64> {
        (x * self.omega.norm_squared() - self.omega * self.omega.dot(x)) / (self.c * self.c)
    }

    /// `∇·𝓔` of the isotropic form, `3Ω²/c²`.
    pub fn divergence(&self) -> f64 {
        3.0 * self.omega.norm_squared() / (self.c * self.c)
    }

    /// `∇·𝓔` of the exact form, `2Ω²/c²`.
    pub fn divergence_exact(&self) -> f64 {
        2.0 * self.omega.norm_squared() / (self.c * self.c)
    }
}

/// `−½∇h₀₀` of a metric at an event.
pub fn efield_from_metric(metric: &WeakMetric, event: &Vector4<f64>) -> Result<Vector3<f64>> {
    let d = metric.dh(event)?;
    Ok(Vector3::new(-0.5 * d[1][(0, 0)], -0.5 * d[2][(0, 0)], -0.5 * d[3][(0, 0)]))
}
