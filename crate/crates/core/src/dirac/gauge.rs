use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix4, Vector3, Vector4};

use crate::dense;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::setup::RotationSetup;
use crate::spin::C64;

use super::metric::WeakMetric;

type VecField = Arc<dyn Fn(&Vector4<f64>) -> Vector4<f64> + Send + Sync>;
type MatField = Arc<dyn Fn(&Vector4<f64>) -> Matrix4<f64> + Send + Sync>;
type HessField = Arc<dyn Fn(&Vector4<f64>) -> [Matrix4<f64>; 4] + Send + Sync>;

/// An infinitesimal coordinate change `ξ_μ` (lower index) with its Jacobian
/// `jacobian[(μ, ν)] = ∂_ν ξ_μ`, derivatives taken with respect to
/// `x⁰ = ct` and `xⁱ`. The optional Hessian `hessian[λ][(μ, ν)] = ∂_λ∂_ν ξ_μ`
/// lets the transformed metric keep its derivative.
#[derive(Clone)]
pub struct GaugeVector {
    value: VecField,
    jacobian: MatField,
    hessian: Option<HessField>,
}

impl fmt::Debug for GaugeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugeVector").field("has_hessian", &self.hessian.is_some()).finish()
    }
}

impl GaugeVector {
    pub fn new(
        value: impl Fn(&Vector4<f64>) -> Vector4<f64> + Send + Sync + 'static,
        jacobian: impl Fn(&Vector4<f64>) -> Matrix4<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            jacobian: Arc::new(jacobian),
            hessian: None,
        }
    }

    pub fn with_hessian(mut self, hessian: impl Fn(&Vector4<f64>) -> [Matrix4<f64>; 4] + Send + Sync + 'static) -> Self {
        self.hessian = Some(Arc::new(hessian));
        self
    }

    pub fn zero() -> Self {
        Self::new(|_| Vector4::zeros(), |_| Matrix4::zeros()).with_hessian(|_| [Matrix4::zeros(); 4])
    }

    /// `ξ = (ξ₀, 0, 0, 0)` from a scalar and its gradient `∂_μ ξ₀`.
    pub fn temporal(
        xi0: impl Fn(&Vector4<f64>) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&Vector4<f64>) -> Vector4<f64> + Send + Sync + 'static,
    ) -> Self {
        Self::new(
            move |e| Vector4::new(xi0(e), 0.0, 0.0, 0.0),
            move |e| {
                let mut j = Matrix4::zeros();
                j.set_row(0, &grad(e).transpose());
                j
            },
        )
    }

    /// `ξᵢ = (x⁰/c)(b×x)ᵢ`, `ξ₀ = 0`: spatial coordinates that turn
    /// rigidly at rate `b`. Then `∂₀ξᵢ = (b×x)ᵢ/c` is time independent and
    /// `hᵢⱼ` is untouched (`b×x` is a Killing field), so the transformed
    /// metric looks as admissible as the original while violating the
    /// rest-frame restriction.
    pub fn spatial_rotation(b: Vector3<f64>, c: f64) -> Self {
        let value = move |e: &Vector4<f64>| {
            let x = Vector3::new(e[1], e[2], e[3]);
            let k = b.cross(&x) * e[0];
            Vector4::new(0.0, k.x, k.y, k.z)
        };
        let jacobian = move |e: &Vector4<f64>| {
            let x = Vector3::new(e[1], e[2], e[3]);
            let k = b.cross(&x);
            let mut j = Matrix4::zeros();
            for i in 0..3 {
                j[(i + 1, 0)] = k[i] / c;
                for l in 0..3 {
                    j[(i + 1, l + 1)] = b.cross(&Vector3::ith(l, 1.0))[i] * e[0];
                }
            }
            j
        };
        Self::new(value, jacobian).with_hessian(move |_| {
            let mut out = [Matrix4::zeros(); 4];
            for i in 0..3 {
                for l in 0..3 {
                    let v = b.cross(&Vector3::ith(l, 1.0))[i] / c;
                    out[0][(i + 1, l + 1)] = v;
                    out[l + 1][(i + 1, 0)] = v;
                }
            }
            out
        })
    }

    pub fn value(&self, e: &Vector4<f64>) -> Vector4<f64> {
        (self.value)(e)
    }

    pub fn jacobian(&self, e: &Vector4<f64>) -> Matrix4<f64> {
        (self.jacobian)(e)
    }

    /// Largest `|∂₀ξᵢ|`.
    pub fn rest_frame_violation(&self, e: &Vector4<f64>) -> f64 {
        let j = self.jacobian(e);
        (1..4).map(|i| j[(i, 0)].abs()).fold(0.0, f64::max)
    }
}

/// What the transformation did to `G^μ = (½c²h₀₀, −c h₀ᵢ)` at the probe
/// events. With the restriction in force the shift is the pure gauge
/// `(−c²∂₀ξ₀, c∂ᵢξ₀)`, i.e. the loop one-form `G⁰dt − G·dx` changes by the
/// exact differential `−c dξ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeReport {
    pub probes: usize,
    pub max_rest_frame_violation: f64,
    /// Largest deviation of the actual shift from the pure-gauge form.
    pub max_shift_error: f64,
}

const REST_FRAME_TOL: f64 = 1e-12;

/// `h_μν → h_μν − ∂_νξ_μ − ∂_μξ_ν`, without checking anything.
pub fn gauge_transform_unchecked(metric: &WeakMetric, xi: &GaugeVector) -> WeakMetric {
    let (m, x) = (metric.clone(), xi.clone());
    let out = WeakMetric::new(metric.c(), move |e| {
        let j = x.jacobian(e);
        m.h(e) - j - j.transpose()
    });
    match (metric.has_derivative(), &xi.hessian) {
        (true, Some(hess)) => {
            let (m, hess) = (metric.clone(), hess.clone());
            out.with_derivative(move |e| {
                let dh = m.dh(e).expect("metric has derivative");
                let hs = hess(e);
                let mut r = [Matrix4::zeros(); 4];
                for l in 0..4 {
                    r[l] = dh[l] - hs[l] - hs[l].transpose();
                }
                r
            })
        }
        _ => out,
    }
}

/// The restricted weak-field gauge transformation.
///
/// `∂₀ξᵢ = 0` is checked at every probe event: coordinate systems at rest
/// with the apparatus need `t^μ ∝ δ^μ₀` before and after, which forbids a
/// time-dependent spatial shift. The shift of `G` is verified at the probes
/// and reported.
pub fn gauge_transform_weakfield(metric: &WeakMetric, xi: &GaugeVector, probes: &[Vector4<f64>]) -> Result<(WeakMetric, GaugeReport)> {
    let mut worst_violation: f64 = 0.0;
    for e in probes {
        let v = xi.rest_frame_violation(e);
        if !(v <= REST_FRAME_TOL) {
            return Err(Error::RestFrameViolation {
                point: (*e).into(),
                violation: v,
            });
        }
        worst_violation = worst_violation.max(v);
    }
    let out = gauge_transform_unchecked(metric, xi);
    let c = metric.c();
    let mut worst_shift: f64 = 0.0;
    for e in probes {
        let shift = out.gravito_potential(e) - metric.gravito_potential(e);
        let j = xi.jacobian(e);
        let want = Vector4::new(-c * c * j[(0, 0)], c * j[(0, 1)], c * j[(0, 2)], c * j[(0, 3)]);
        let scale = 1.0 + want.norm();
        worst_shift = worst_shift.max((shift - want).norm() / scale);
    }
    Ok((
        out,
        GaugeReport {
            probes: probes.len(),
            max_rest_frame_violation: worst_violation,
            max_shift_error: worst_shift,
        },
    ))
}

/// Schrödinger Hamiltonian in a weak field,
/// `Σᵢ(p̂ᵢ + mc h₀ᵢ)²/2m + ½mc²h₀₀`, as a dense scalar operator at `t = 0`.
pub fn weakfield_schrodinger_hamiltonian(metric: &WeakMetric, setup: &RotationSetup, grid: &Grid) -> Result<DMatrix<C64>> {
    let (m, c) = (setup.mass, metric.c());
    let p = dense::momenta(grid, setup.hbar);
    let ev = |x: &Vector3<f64>| Vector4::new(0.0, x.x, x.y, x.z);
    for i in 0..grid.len() {
        metric.check_weak(&ev(&grid.coord(i)))?;
    }
    let mut h = dense::diagonal_real(grid, |x| 0.5 * m * c * c * metric.h(&ev(x))[(0, 0)]);
    for i in 0..3 {
        let f = &p[i] + dense::diagonal_real(grid, |x| m * c * metric.h(&ev(x))[(0, i + 1)]);
        h += &f * &f * C64::new(0.5 / m, 0.0);
    }
    Ok(h)
}
