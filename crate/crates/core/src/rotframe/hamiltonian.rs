use nalgebra::{DMatrix, Matrix2, Vector3};
use serde::{Deserialize, Serialize};

use crate::dense;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::setup::{GaugeField, RotationSetup};
use crate::spin::{sigma_dot, SpinOperator, C64};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonianFlags {
    /// Adds the spin-rotation coupling `−Ω·Ŝ`.
    pub include_spin: bool,
    /// Adds `Ŝ×𝓔` inside the kinetic square.
    pub include_spin_orbit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatingHamiltonian {
    pub setup: RotationSetup,
    pub field: GaugeField,
    pub include_spin: bool,
    pub include_spin_orbit: bool,
}

pub fn build_hamiltonian(setup: &RotationSetup, flags: HamiltonianFlags) -> RotatingHamiltonian {
    RotatingHamiltonian {
        setup: *setup,
        field: setup.gauge_field(),
        include_spin: flags.include_spin,
        include_spin_orbit: flags.include_spin_orbit,
    }
}

impl RotatingHamiltonian {
    pub fn components(&self) -> usize {
        if self.include_spin || self.include_spin_orbit {
            2
        } else {
            1
        }
    }

    pub fn omega(&self) -> Vector3<f64> {
        self.setup.omega
    }

    /// `𝓔 = Ω²x/c²`.
    pub fn efield(&self, x: &Vector3<f64>) -> Vector3<f64> {
        let s = &self.setup;
        x * (s.omega.norm_squared() / (s.c * s.c))
    }

    /// Largest `|Ω×x|/c` over the grid corners.
    pub fn validity_ratio(&self, grid: &Grid) -> f64 {
        let pts = grid.points();
        let mut worst: f64 = 0.0;
        for corner in 0..8usize {
            let mut idx = [0usize; 3];
            for a in 0..3 {
                idx[a] = if corner >> a & 1 == 1 { pts[a] - 1 } else { 0 };
            }
            let x = grid.coord(grid.ravel(idx));
            worst = worst.max(self.setup.omega.cross(&x).norm() / self.setup.c);
        }
        worst
    }

    /// The position-local part of `H` as `(a₀(x), a(x))` with `V = a₀ + a·σ`.
    ///
    /// Everything that is not `p̂²/2m` or an orbital angular momentum term
    /// ends up here: `−Ω·Ŝ`, and with spin-orbit coupling
    /// `(Ω²/c²)[(Ω·Ŝ)r² − (Ω·x)(Ŝ·x)] + ħ²Ω⁴r²/(4mc⁴)`.
    pub fn local_potential(&self, x: &Vector3<f64>) -> (f64, Vector3<f64>) {
        let s = &self.setup;
        let half_hbar = 0.5 * s.hbar;
        let mut a0 = 0.0;
        let mut a = Vector3::zeros();
        if self.include_spin {
            a -= s.omega * half_hbar;
        }
        if self.include_spin_orbit {
            let w2 = s.omega.norm_squared();
            let c2 = s.c * s.c;
            let r2 = x.norm_squared();
            a += (s.omega * r2 - x * s.omega.dot(x)) * (w2 / c2 * half_hbar);
            a0 += s.hbar * s.hbar * w2 * w2 * r2 / (4.0 * s.mass * c2 * c2);
        }
        (a0, a)
    }

    /// True when the local part is a constant spin term that commutes with
    /// everything else, so no splitting error arises.
    pub fn local_part_commutes(&self) -> bool {
        !self.include_spin_orbit
    }

    /// Angular velocities of the rigid rotations generated by the orbital
    /// terms, per spin component (`σ_z = ±1`), and the rotation plane.
    ///
    /// `H ⊃ −(Ω_c + s ħΩ²/2mc²) L_c` rotates component `s` by
    /// `−(Ω_c + s ħΩ²/2mc²) dt` per step.
    pub fn orbital_rotation(&self, grid: &Grid) -> Result<Option<((usize, usize), [f64; 2])>> {
        let s = &self.setup;
        let w = s.omega;
        let so = if self.include_spin_orbit {
            s.hbar * w.norm_squared() / (2.0 * s.mass * s.c * s.c)
        } else {
            0.0
        };
        match grid.dim() {
            1 => Ok(None),
            2 => {
                if w.z == 0.0 && so == 0.0 {
                    return Ok(None);
                }
                Ok(Some(((0, 1), [w.z + so, w.z - so])))
            }
            _ => {
                if self.include_spin_orbit && w != Vector3::zeros() {
                    return Err(Error::Unsupported(
                        "spin-orbit propagation on 3-D grids (Ŝ·L̂ mixes spin components)".into(),
                    ));
                }
                let nonzero: Vec<usize> = (0..3).filter(|&a| w[a] != 0.0).collect();
                match nonzero.as_slice() {
                    [] => Ok(None),
                    [c] => {
                        let plane = ((c + 1) % 3, (c + 2) % 3);
                        Ok(Some((plane, [w[*c], w[*c]])))
                    }
                    _ => Err(Error::Unsupported(
                        "3-D propagation needs Ω along a coordinate axis".into(),
                    )),
                }
            }
        }
    }

    /// Dense matrix of the minimally coupled form
    /// `Σᵢ (p̂ᵢ − m𝓐ᵢ − (Ŝ×𝓔)ᵢ)²/2m + m𝓐₀ [− Ω·Ŝ]`.
    ///
    /// The squares are formed as products of the Hermitian factors, so the
    /// cross terms come out in symmetrized order automatically.
    pub fn minimal_coupling_matrix(&self, grid: &Grid) -> DMatrix<C64> {
        let s = self.setup;
        let n = grid.len();
        let comps = self.components();
        let p = dense::momenta(grid, s.hbar);
        let spins = SpinOperator::spin(s.hbar);
        let mut h = DMatrix::<C64>::zeros(comps * n, comps * n);
        let lift = |m: &DMatrix<C64>| -> DMatrix<C64> {
            if comps == 2 {
                dense::spin_space(&Matrix2::identity(), m)
            } else {
                m.clone()
            }
        };
        for i in 0..3 {
            let a_i = dense::diagonal_real(grid, |x| s.mass * self.field.avec(x)[i]);
            let mut factor = lift(&(&p[i] - a_i));
            if self.include_spin_orbit {
                // (Ŝ×𝓔)ᵢ = Ŝⱼ𝓔ₖ − Ŝₖ𝓔ⱼ
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                factor -= dense::spin_field(grid, |x| {
                    let e = self.efield(x);
                    spins[j].matrix * C64::new(e[k], 0.0) - spins[k].matrix * C64::new(e[j], 0.0)
                });
            }
            h += &factor * &factor / C64::new(2.0 * s.mass, 0.0);
        }
        h += lift(&dense::diagonal_real(grid, |x| s.mass * self.field.a0(x)));
        if self.include_spin {
            h -= dense::spin_space(&sigma_dot(&(s.omega * (0.5 * s.hbar))), &DMatrix::identity(n, n));
        }
        h
    }

    /// Dense matrix of the expanded form
    /// `p̂²/2m − Ω·L̂ [− Ω·Ŝ] [− (Ω²/mc²)Ŝ·L̂ + V_so(x)]`.
    pub fn expanded_matrix(&self, grid: &Grid) -> DMatrix<C64> {
        let s = self.setup;
        let n = grid.len();
        let comps = self.components();
        let p = dense::momenta(grid, s.hbar);
        let xs: Vec<DMatrix<C64>> = (0..3).map(|a| dense::diagonal_real(grid, |x| x[a])).collect();
        let ang: Vec<DMatrix<C64>> = (0..3)
            .map(|a| {
                let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                &xs[b] * &p[c] - &xs[c] * &p[b]
            })
            .collect();
        let mut space = DMatrix::<C64>::zeros(n, n);
        for a in 0..3 {
            space += &p[a] * &p[a] / C64::new(2.0 * s.mass, 0.0);
            space -= &ang[a] * C64::new(s.omega[a], 0.0);
        }
        if comps == 1 {
            return space;
        }
        let mut h = dense::spin_space(&Matrix2::identity(), &space);
        if self.include_spin_orbit {
            let spins = SpinOperator::spin(s.hbar);
            let coef = s.omega.norm_squared() / (s.mass * s.c * s.c);
            for a in 0..3 {
                h -= dense::spin_space(&spins[a].matrix, &ang[a]) * C64::new(coef, 0.0);
            }
        }
        h += dense::spin_field(grid, |x| {
            let (a0, a) = self.local_potential(x);
            Matrix2::identity() * C64::new(a0, 0.0) + sigma_dot(&a)
        });
        h
    }
}
