use nalgebra::{Matrix4, Vector4};

use crate::error::Result;
use crate::grid::Grid;

use super::metric::{eta, WeakMetric};

/// First-order tetrad at one event: `e[(a, μ)] = e^a_μ = δ + ½h^a_μ` and
/// `e_inv[(μ, a)] = e^μ_a = δ − ½h^μ_a`, indices raised with `η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vierbein {
    pub event: Vector4<f64>,
    pub e: Matrix4<f64>,
    pub e_inv: Matrix4<f64>,
}

impl Vierbein {
    /// Frobenius norm of `η_ab e^a_μ e^b_ν − g_μν`; equals `‖¼hηh‖`.
    pub fn reconstruction_residual(&self, g: &Matrix4<f64>) -> f64 {
        (self.e.transpose() * eta() * self.e - g).norm()
    }

    /// Frobenius norm of `e^a_μ e^μ_b − δ^a_b`.
    pub fn identity_residual(&self) -> f64 {
        (self.e * self.e_inv - Matrix4::identity()).norm()
    }
}

/// The weak-field vierbein at `event`; fails where `‖h‖ ≥ 1`.
pub fn build_vierbein(metric: &WeakMetric, event: &Vector4<f64>) -> Result<Vierbein> {
    metric.check_weak(event)?;
    let mixed = eta() * metric.h(event);
    Ok(Vierbein {
        event: *event,
        e: Matrix4::identity() + mixed * 0.5,
        e_inv: Matrix4::identity() - mixed * 0.5,
    })
}

/// Vierbeins at every grid point at time `t`.
pub fn vierbein_on_grid(metric: &WeakMetric, grid: &Grid, t: f64) -> Result<Vec<Vierbein>> {
    (0..grid.len())
        .map(|i| {
            let x = grid.coord(i);
            build_vierbein(metric, &Vector4::new(t, x.x, x.y, x.z))
        })
        .collect()
}

/// Ricci rotation coefficients `Γ_abμ = ½(∂_a h_μb − ∂_b h_μa)` at one event;
/// `gamma[μ][(a, b)]`. Flat and coordinate indices coincide at this order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinConnection {
    pub event: Vector4<f64>,
    pub gamma: [Matrix4<f64>; 4],
}

impl SpinConnection {
    pub fn get(&self, a: usize, b: usize, mu: usize) -> f64 {
        self.gamma[mu][(a, b)]
    }

    /// Largest `|Γ_abμ + Γ_baμ|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        self.gamma
            .iter()
            .map(|m| (m + m.transpose()).abs().max())
            .fold(0.0, f64::max)
    }
}

pub fn spin_connection(metric: &WeakMetric, event: &Vector4<f64>) -> Result<SpinConnection> {
    let dh = metric.dh(event)?;
    let mut gamma = [Matrix4::zeros(); 4];
    for (mu, g) in gamma.iter_mut().enumerate() {
        for a in 0..4 {
            for b in 0..4 {
                g[(a, b)] = 0.5 * (dh[a][(mu, b)] - dh[b][(mu, a)]);
            }
        }
    }
    Ok(SpinConnection { event: *event, gamma })
}
