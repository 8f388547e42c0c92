//! Physical context shared by every computation.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Speed of light, m/s.
pub const C_SI: f64 = 299_792_458.0;

/// Mass, ħ, c and the (constant) angular velocity of the rotating frame F′
/// relative to the inertial frame F₀.
///
/// All formulas in this crate keep ħ and c explicit; natural units are the
/// special case `hbar = c = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationSetup {
    pub mass: f64,
    pub hbar: f64,
    pub c: f64,
    pub omega: Vector3<f64>,
}

impl RotationSetup {
    pub fn new(mass: f64, hbar: f64, c: f64, omega: Vector3<f64>) -> Result<Self> {
        for (name, v) in [("mass", mass), ("hbar", hbar), ("c", c)] {
            if !(v > 0.0) || v.is_nan() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be strictly positive, got {v}"),
                });
            }
        }
        if omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: "components must be finite".into(),
            });
        }
        Ok(Self {
            mass,
            hbar,
            c,
            omega,
        })
    }

    /// ħ = c = 1.
    pub fn natural(mass: f64, omega: Vector3<f64>) -> Result<Self> {
        Self::new(mass, 1.0, 1.0, omega)
    }

    /// CODATA ħ and c; mass in kg, omega in rad/s.
    pub fn si(mass: f64, omega: Vector3<f64>) -> Result<Self> {
        Self::new(mass, HBAR_SI, C_SI, omega)
    }

    pub fn omega_norm(&self) -> f64 {
        self.omega.norm()
    }

    /// The inertial gauge field of the rotating frame.
    pub fn gauge_field(&self) -> GaugeField {
        GaugeField::rotating(self.omega)
    }

    pub fn with_omega(&self, omega: Vector3<f64>) -> Self {
        Self { omega, ..*self }
    }
}

/// Inertial gauge potential `𝓐^μ = (𝓐₀, 𝓐)` with `𝓐(x) = V + Ω×x` and
/// `𝓐₀ = −½|𝓐|²`.
///
/// A rotating frame has `V = 0`; a Galilei boost has `Ω = 0`. Both enter the
/// Schrödinger equation through minimal coupling `p^μ → p^μ − m𝓐^μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeField {
    pub velocity: Vector3<f64>,
    pub omega: Vector3<f64>,
}

impl GaugeField {
    pub fn rotating(omega: Vector3<f64>) -> Self {
        Self {
            velocity: Vector3::zeros(),
            omega,
        }
    }

    pub fn uniform(velocity: Vector3<f64>) -> Self {
        Self {
            velocity,
            omega: Vector3::zeros(),
        }
    }

    pub fn avec(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.velocity + self.omega.cross(x)
    }

    pub fn a0(&self, x: &Vector3<f64>) -> f64 {
        -0.5 * self.avec(x).norm_squared()
    }

    pub fn is_zero(&self) -> bool {
        self.velocity == Vector3::zeros() && self.omega == Vector3::zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_nonpositive_constants() {
        assert!(RotationSetup::new(0.0, 1.0, 1.0, Vector3::zeros()).is_err());
        assert!(RotationSetup::new(1.0, -1.0, 1.0, Vector3::zeros()).is_err());
        assert!(RotationSetup::new(1.0, 1.0, f64::NAN, Vector3::zeros()).is_err());
        assert!(RotationSetup::new(1.0, 1.0, 1.0, Vector3::new(f64::INFINITY, 0.0, 0.0)).is_err());
    }

    #[test]
    fn rotating_field_vanishes_on_axis_origin() {
        let g = GaugeField::rotating(Vector3::new(0.3, -1.0, 2.0));
        assert_eq!(g.avec(&Vector3::zeros()), Vector3::zeros());
    }

    proptest! {
        #[test]
        fn scalar_potential_is_minus_half_square(
            w in prop::array::uniform3(-3.0f64..3.0),
            x in prop::array::uniform3(-10.0f64..10.0),
        ) {
            let g = GaugeField::rotating(Vector3::from(w));
            let x = Vector3::from(x);
            prop_assert!((g.a0(&x) + 0.5 * g.avec(&x).norm_squared()).abs() < 1e-12);
        }
    }
}
