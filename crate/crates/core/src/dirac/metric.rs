use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::setup::RotationSetup;

type HField = Arc<dyn Fn(&Vector4<f64>) -> Matrix4<f64> + Send + Sync>;
type DhField = Arc<dyn Fn(&Vector4<f64>) -> [Matrix4<f64>; 4] + Send + Sync>;

/// Minkowski metric `diag(1, −1, −1, −1)`.
pub fn eta() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// A perturbation `h_μν` of flat spacetime, `g = η + h`, as a function of the
/// event `(t, x, y, z)`. Coordinates are `x⁰ = ct` and `xⁱ`, so `h` is
/// dimensionless. Derivatives `∂_λ h_μν` (with respect to `x⁰ = ct` for
/// `λ = 0`) are optional.
#[derive(Clone)]
pub struct WeakMetric {
    c: f64,
    h: HField,
    dh: Option<DhField>,
}

impl fmt::Debug for WeakMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeakMetric")
            .field("c", &self.c)
            .field("has_derivative", &self.dh.is_some())
            .finish()
    }
}

impl WeakMetric {
    pub fn new(c: f64, h: impl Fn(&Vector4<f64>) -> Matrix4<f64> + Send + Sync + 'static) -> Self {
        Self {
            c,
            h: Arc::new(h),
            dh: None,
        }
    }

    pub fn with_derivative(mut self, dh: impl Fn(&Vector4<f64>) -> [Matrix4<f64>; 4] + Send + Sync + 'static) -> Self {
        self.dh = Some(Arc::new(dh));
        self
    }

    pub fn flat(c: f64) -> Self {
        Self::new(c, |_| Matrix4::zeros()).with_derivative(|_| [Matrix4::zeros(); 4])
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `h_μν` at an event, symmetrized.
    pub fn h(&self, event: &Vector4<f64>) -> Matrix4<f64> {
        let h = (self.h)(event);
        (h + h.transpose()) * 0.5
    }

    pub fn g(&self, event: &Vector4<f64>) -> Matrix4<f64> {
        eta() + self.h(event)
    }

    pub fn has_derivative(&self) -> bool {
        self.dh.is_some()
    }

    /// `[∂₀h, ∂₁h, ∂₂h, ∂₃h]` at an event.
    pub fn dh(&self, event: &Vector4<f64>) -> Result<[Matrix4<f64>; 4]> {
        let d = self.dh.as_ref().ok_or(Error::MissingDerivative)?;
        Ok(d(event).map(|m| (m + m.transpose()) * 0.5))
    }

    /// Frobenius norm of `h`, the size measure of the weak-field bound.
    pub fn weak_norm(&self, event: &Vector4<f64>) -> f64 {
        self.h(event).norm()
    }

    pub fn check_weak(&self, event: &Vector4<f64>) -> Result<f64> {
        let norm = self.weak_norm(event);
        if norm.is_finite() && norm < 1.0 {
            Ok(norm)
        } else {
            Err(Error::WeakFieldViolated {
                point: (*event).into(),
                norm,
            })
        }
    }

    /// `(G⁰, Gⁱ) = (½c²h₀₀, −c h₀ᵢ)`, the scalar and vector potentials per
    /// unit mass. For the rotating frame these are `𝓐₀ = −½(Ω×x)²` and
    /// `𝓐 = Ω×x`.
    pub fn gravito_potential(&self, event: &Vector4<f64>) -> Vector4<f64> {
        let h = self.h(event);
        let c = self.c;
        Vector4::new(0.5 * c * c * h[(0, 0)], -c * h[(0, 1)], -c * h[(0, 2)], -c * h[(0, 3)])
    }
}

fn spatial(e: &Vector4<f64>) -> Vector3<f64> {
    Vector3::new(e[1], e[2], e[3])
}

/// The exact metric of a frame rotating at `Ω`:
/// `h₀₀ = −(Ω×x)²/c²`, `h₀ᵢ = −(Ω×x)ᵢ/c`, `hᵢⱼ = 0`.
pub fn rotating_metric(setup: &RotationSetup) -> WeakMetric {
    let w = setup.omega;
    let c = setup.c;
    WeakMetric::new(c, move |e| {
        let u = w.cross(&spatial(e)) / c;
        let mut h = Matrix4::zeros();
        h[(0, 0)] = -u.norm_squared();
        for i in 0..3 {
            h[(0, i + 1)] = -u[i];
            h[(i + 1, 0)] = -u[i];
        }
        h
    })
    .with_derivative(move |e| {
        let u = w.cross(&spatial(e)) / c;
        let mut out = [Matrix4::zeros(); 4];
        for j in 0..3 {
            let du = w.cross(&Vector3::ith(j, 1.0)) / c;
            let m = &mut out[j + 1];
            m[(0, 0)] = -2.0 * u.dot(&du);
            for i in 0..3 {
                m[(0, i + 1)] = -du[i];
                m[(i + 1, 0)] = -du[i];
            }
        }
        out
    })
}
