//! Interferometric phases in the rotating frame: Sagnac, spin-rotation,
//! spin-orbit, and the loop integral of the weak-field potential.

use std::f64::consts::TAU;

use nalgebra::{Vector3, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dirac::WeakMetric;
use crate::error::{Error, Result};
use crate::path::{enclosed_area, ClosedPath, SpacetimeLoop};
use crate::quadrature::integrate_unit;
use crate::setup::RotationSetup;
use crate::spin::{exp_i_half_sigma, SpinOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseMethod {
    ClosedForm,
    LineIntegral,
    OrderedProduct { steps: usize },
}

/// A scalar phase (unwrapped, with its reduction to `[0, 2π)`) or a spin
/// operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseResult {
    pub value_rad: Option<f64>,
    pub value_mod_2pi: Option<f64>,
    pub operator: Option<SpinOperator>,
    pub method: PhaseMethod,
}

impl PhaseResult {
    pub fn scalar(value: f64, method: PhaseMethod) -> Self {
        Self {
            value_rad: Some(value),
            value_mod_2pi: Some(value.rem_euclid(TAU)),
            operator: None,
            method,
        }
    }

    pub fn spin(op: SpinOperator, method: PhaseMethod) -> Self {
        Self {
            value_rad: None,
            value_mod_2pi: None,
            operator: Some(op),
            method,
        }
    }

    /// The scalar value; `NaN` for operator results.
    pub fn value(&self) -> f64 {
        self.value_rad.unwrap_or(f64::NAN)
    }

    /// The operator; identity for scalar results.
    pub fn op(&self) -> SpinOperator {
        self.operator.unwrap_or_else(SpinOperator::identity)
    }
}

/// Sagnac phase `(m/ħ)∮(Ω×x)·dl = 2m A·Ω/ħ`.
///
/// `LineIntegral` sums Gauss–Legendre segment integrals (per-segment results
/// are computed in parallel and added in path order). Any other method uses
/// the vector area.
pub fn sagnac_phase(path: &ClosedPath, setup: &RotationSetup, method: PhaseMethod) -> PhaseResult {
    let k = setup.mass / setup.hbar;
    let w = setup.omega;
    match method {
        PhaseMethod::LineIntegral => {
            let segs: Vec<_> = path.segments().collect();
            let pieces = path.subdivisions();
            let parts: Vec<f64> = segs
                .par_iter()
                .map(|(a, b)| {
                    let d = b - a;
                    integrate_unit(pieces, |s| w.cross(&(a + d * s)).dot(&d))
                })
                .collect();
            PhaseResult::scalar(k * parts.iter().sum::<f64>(), method)
        }
        _ => PhaseResult::scalar(2.0 * k * enclosed_area(path).dot(&w), PhaseMethod::ClosedForm),
    }
}

/// Spin-rotation phase operator `exp(iŜ·Ω t/ħ)` after time `t`.
///
/// `OrderedProduct { steps }` multiplies `steps` short-time exponentials.
pub fn spin_phase_operator(setup: &RotationSetup, t: f64, method: PhaseMethod) -> Result<PhaseResult> {
    check_time(t)?;
    let w = setup.omega;
    match method {
        PhaseMethod::OrderedProduct { steps } => {
            let op = spin_phase_ordered(|_| w, t, steps)?;
            Ok(PhaseResult::spin(op, method))
        }
        _ => Ok(PhaseResult::spin(
            SpinOperator::new(exp_i_half_sigma(&(w * t))),
            PhaseMethod::ClosedForm,
        )),
    }
}

/// Time-ordered `T exp(i∫₀ᵗ Ŝ·Ω(s) ds/ħ)` by the midpoint product, later
/// factors on the left. Each factor is an exact SU(2) exponential, so a
/// constant `Ω` is reproduced exactly for any step count.
pub fn spin_phase_ordered(omega: impl Fn(f64) -> Vector3<f64>, t: f64, steps: usize) -> Result<SpinOperator> {
    check_time(t)?;
    if steps == 0 {
        return Err(Error::InvalidParameter {
            name: "steps",
            reason: "must be at least 1".into(),
        });
    }
    let dt = t / steps as f64;
    let mut m = SpinOperator::identity().matrix;
    for i in 0..steps {
        let mid = (i as f64 + 0.5) * dt;
        m = exp_i_half_sigma(&(omega(mid) * dt)) * m;
    }
    Ok(SpinOperator::new(m))
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("must be finite and non-negative, got {t}"),
        });
    }
    Ok(())
}

/// Spin-orbit phase operator `P exp((i/ħ)∮dl·(Ŝ×𝓔))` with `𝓔 = Ω²x/c²`,
/// `x` measured from the rotation axis through the origin.
///
/// On a straight piece from `p` to `q` the exponent is
/// `(i/2)(Ω²/c²) σ·(p×q)`, exact, so the ordered product has no step error of
/// its own. `ClosedForm` returns `exp(i2Ω²A·Ŝ/(ħc²))` with the vector area,
/// which the ordered product matches whenever the pieces commute (planar
/// loops in a plane through the origin, for instance).
pub fn spin_orbit_operator(path: &ClosedPath, setup: &RotationSetup, method: PhaseMethod) -> PhaseResult {
    let k = setup.omega.norm_squared() / (setup.c * setup.c);
    match method {
        PhaseMethod::OrderedProduct { .. } | PhaseMethod::LineIntegral => {
            let pieces = path.subdivisions();
            let mut m = SpinOperator::identity().matrix;
            let mut steps = 0;
            for (a, b) in path.segments() {
                let d = b - a;
                for j in 0..pieces {
                    let p = a + d * (j as f64 / pieces as f64);
                    let q = a + d * ((j + 1) as f64 / pieces as f64);
                    m = exp_i_half_sigma(&(p.cross(&q) * k)) * m;
                    steps += 1;
                }
            }
            PhaseResult::spin(SpinOperator::new(m), PhaseMethod::OrderedProduct { steps })
        }
        PhaseMethod::ClosedForm => PhaseResult::spin(
            SpinOperator::new(exp_i_half_sigma(&(enclosed_area(path) * (2.0 * k)))),
            method,
        ),
    }
}

/// Scalar spin-orbit phase `Ω²A/c²` for spin polarized along the loop's
/// area vector (the `+ħ/2` eigenstate); the opposite polarization picks up
/// the negative.
pub fn spin_orbit_scalar_phase(path: &ClosedPath, setup: &RotationSetup) -> Result<PhaseResult> {
    let scale = path.vertices().iter().map(|v| v.norm()).fold(1.0, f64::max);
    let deviation = path.planarity_defect();
    if deviation > 1e-9 * scale {
        return Err(Error::NonPlanarPath { deviation });
    }
    let area = enclosed_area(path).norm();
    let k = setup.omega.norm_squared() / (setup.c * setup.c);
    Ok(PhaseResult::scalar(k * area, PhaseMethod::ClosedForm))
}

/// Loop phase `−(m/ħ)∮(G⁰dt − G·dx)` of the gravito-magnetic potential
/// `(G⁰, G) = (½c²h₀₀, −c h₀ᵢ)` of a weak metric.
///
/// For the rotating-frame metric and a purely spatial loop this is the
/// Sagnac phase.
pub fn weakfield_phase(path: &SpacetimeLoop, metric: &WeakMetric, mass: f64, hbar: f64) -> PhaseResult {
    let pieces = path.subdivisions();
    let segs: Vec<(Vector4<f64>, Vector4<f64>)> = path.segments().collect();
    let parts: Vec<f64> = segs
        .par_iter()
        .map(|(a, b)| {
            let d = b - a;
            integrate_unit(pieces, |s| {
                let g = metric.gravito_potential(&(a + d * s));
                g[0] * d[0] - (g[1] * d[1] + g[2] * d[2] + g[3] * d[3])
            })
        })
        .collect();
    PhaseResult::scalar(-mass / hbar * parts.iter().sum::<f64>(), PhaseMethod::LineIntegral)
}
