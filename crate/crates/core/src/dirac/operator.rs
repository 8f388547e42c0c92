use nalgebra::{DMatrix, Matrix2, Matrix4, Vector3, Vector4};

use crate::dense;
use crate::error::Result;
use crate::grid::Grid;
use crate::rotframe::{build_hamiltonian, HamiltonianFlags, RotatingHamiltonian};
use crate::setup::RotationSetup;
use crate::spin::{sigma_dot, SpinOperator, C64};

use super::fields::{effective_fields, efield_from_metric};
use super::gamma::{alpha, beta, gamma};
use super::metric::WeakMetric;
use super::vierbein::spin_connection;

fn event(x: &Vector3<f64>) -> Vector4<f64> {
    Vector4::new(0.0, x.x, x.y, x.z)
}

fn to_dyn(m: &Matrix4<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(4, 4, |i, j| m[(i, j)])
}

fn check_grid(metric: &WeakMetric, grid: &Grid) -> Result<()> {
    for i in 0..grid.len() {
        metric.check_weak(&event(&grid.coord(i)))?;
    }
    Ok(())
}

/// Scalar-space pieces shared by the Dirac matrices: momenta, `𝓐ᵢ`, `𝓐₀`
/// and `𝓔ᵢ` as diagonal operators, all read off the metric.
struct Pieces {
    p: [DMatrix<C64>; 3],
    a: [DMatrix<C64>; 3],
    a0: DMatrix<C64>,
    e: [DMatrix<C64>; 3],
}

fn pieces(metric: &WeakMetric, grid: &Grid, hbar: f64) -> Result<Pieces> {
    let p = dense::momenta(grid, hbar);
    let pot = |i: usize| dense::diagonal_real(grid, |x| metric.gravito_potential(&event(x))[i]);
    let mut e_vals = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        e_vals.push(efield_from_metric(metric, &event(&grid.coord(i)))?);
    }
    let e_diag = |k: usize| {
        let mut m = DMatrix::zeros(grid.len(), grid.len());
        for (i, v) in e_vals.iter().enumerate() {
            m[(i, i)] = C64::new(v[k], 0.0);
        }
        m
    };
    Ok(Pieces {
        p,
        a: [pot(1), pot(2), pot(3)],
        a0: pot(0),
        e: [e_diag(0), e_diag(1), e_diag(2)],
    })
}

/// The low-energy Dirac operator at energy `E` (rest energy removed):
///
/// `D(E) = γ⁰(mc² + E − m𝓐₀ + ½{𝓐·p̂}) − cγⁱ(p̂ⁱ − ½m𝓐ⁱ + (iħ/2)𝓔ⁱ) − mc²`
///
/// where `{𝓐·p̂} = ½Σ(𝓐ⁱp̂ⁱ + p̂ⁱ𝓐ⁱ)` and `p̂ⁱ = −iħ∂ᵢ`. Stationary states
/// satisfy `D(E)ψ = 0`. The matrix acts on 4-spinors in component-major
/// layout.
pub fn low_energy_dirac_operator(setup: &RotationSetup, metric: &WeakMetric, grid: &Grid, energy: f64) -> Result<DMatrix<C64>> {
    check_grid(metric, grid)?;
    let (m, c, hbar) = (setup.mass, setup.c, setup.hbar);
    let pc = pieces(metric, grid, hbar)?;
    let n = grid.len();
    let id = DMatrix::<C64>::identity(n, n);
    let g = gamma();
    let mc2 = C64::new(m * c * c, 0.0);
    let mut sym_ap = DMatrix::<C64>::zeros(n, n);
    for i in 0..3 {
        sym_ap += (&pc.a[i] * &pc.p[i] + &pc.p[i] * &pc.a[i]) * C64::new(0.5, 0.0);
    }
    let scalar = &id * (mc2 + energy) - &pc.a0 * C64::new(m, 0.0) + sym_ap * C64::new(0.5, 0.0);
    let mut d = dense::internal_space(&to_dyn(&g[0]), &scalar);
    for i in 0..3 {
        let bracket = &pc.p[i] - &pc.a[i] * C64::new(0.5 * m, 0.0) + &pc.e[i] * C64::new(0.0, 0.5 * hbar);
        d -= dense::internal_space(&to_dyn(&g[i + 1]), &bracket) * C64::new(c, 0.0);
    }
    d -= DMatrix::identity(4 * n, 4 * n) * mc2;
    Ok(d)
}

/// `H_D = −γ⁰D(0)`, so that `D(E) = γ⁰(E − H_D)`:
///
/// `H_D = mc²(β − 1) + m𝓐₀ − ½{𝓐·p̂} + cα·(p̂ − ½m𝓐) + (iħc/2)α·𝓔`.
///
/// Not Hermitian because of the last term.
pub fn dirac_hamiltonian(setup: &RotationSetup, metric: &WeakMetric, grid: &Grid) -> Result<DMatrix<C64>> {
    let d = low_energy_dirac_operator(setup, metric, grid, 0.0)?;
    let g0 = dense::internal_space(&to_dyn(&gamma()[0]), &DMatrix::identity(grid.len(), grid.len()));
    Ok(-(g0 * d))
}

/// The Hermitian form of `H_D` in the variable `ψ̃ = e^{−f}ψ` with
/// `∇f = ½𝓔`. The similarity removes `(iħc/2)α·𝓔` and adds
/// `(iħ/4)𝓐·𝓔`, which vanishes for the rotating frame (`𝓐 ⊥ x`); the
/// kinetic parts are left as they are.
pub fn dirac_hermitian_hamiltonian(setup: &RotationSetup, metric: &WeakMetric, grid: &Grid) -> Result<DMatrix<C64>> {
    check_grid(metric, grid)?;
    let (m, c, hbar) = (setup.mass, setup.c, setup.hbar);
    let pc = pieces(metric, grid, hbar)?;
    let n = grid.len();
    let id = DMatrix::<C64>::identity(n, n);
    let mut scalar = &pc.a0 * C64::new(m, 0.0);
    for i in 0..3 {
        scalar -= (&pc.a[i] * &pc.p[i] + &pc.p[i] * &pc.a[i]) * C64::new(0.25, 0.0);
        scalar += &pc.a[i] * &pc.e[i] * C64::new(0.0, 0.25 * hbar);
    }
    let b = to_dyn(&beta()) - DMatrix::identity(4, 4);
    let mut h = dense::internal_space(&b, &id) * C64::new(m * c * c, 0.0);
    h += dense::internal_space(&DMatrix::identity(4, 4), &scalar);
    let al = alpha();
    for i in 0..3 {
        let kin = &pc.p[i] - &pc.a[i] * C64::new(0.5 * m, 0.0);
        h += dense::internal_space(&to_dyn(&al[i]), &kin) * C64::new(c, 0.0);
    }
    Ok(h)
}

/// Eigenvalues on the particle branch (`E > −mc²`), ascending.
pub fn upper_branch(eigenvalues: &[f64], mc2: f64) -> Vec<f64> {
    let mut v: Vec<f64> = eigenvalues.iter().copied().filter(|&e| e > -mc2).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Rotation rate read off the spin connection at the origin:
/// `Ωₖ = −(c/2) ε_kij Γ_ij0`.
fn omega_from_connection(metric: &WeakMetric) -> Result<Vector3<f64>> {
    let s = spin_connection(metric, &Vector4::zeros())?;
    let c = metric.c();
    let mut w = Vector3::zeros();
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3 + 1, (k + 2) % 3 + 1);
        w[k] = -0.5 * c * (s.get(i, j, 0) - s.get(j, i, 0));
    }
    Ok(w)
}

/// Pauli Hamiltonian for the upper two components, assembled from the
/// metric: `Σᵢ(p̂ᵢ − m𝓐ᵢ − (Ŝ×𝓔)ᵢ)²/2m + m𝓐₀ − Ω·Ŝ`, with `𝓐`, `𝓐₀` from
/// `h₀μ`, `Ω` from the spin connection and `𝓔 = Ω²x/c²`. With
/// `include_efield = false` the `Ŝ×𝓔` term is dropped.
pub fn pauli_matrix(setup: &RotationSetup, metric: &WeakMetric, grid: &Grid, include_efield: bool) -> Result<DMatrix<C64>> {
    check_grid(metric, grid)?;
    let (m, hbar) = (setup.mass, setup.hbar);
    let w = omega_from_connection(metric)?;
    let fields = effective_fields(&setup.with_omega(w));
    let n = grid.len();
    let p = dense::momenta(grid, hbar);
    let spins = SpinOperator::spin(hbar);
    let mut h = DMatrix::<C64>::zeros(2 * n, 2 * n);
    for i in 0..3 {
        let a = dense::diagonal_real(grid, |x| m * metric.gravito_potential(&event(x))[i + 1]);
        let mut f = dense::spin_space(&Matrix2::identity(), &(&p[i] - a));
        if include_efield {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            f -= dense::spin_field(grid, |x| {
                let e = fields.efield(x);
                spins[j].matrix * C64::new(e[k], 0.0) - spins[k].matrix * C64::new(e[j], 0.0)
            });
        }
        h += &f * &f * C64::new(0.5 / m, 0.0);
    }
    let a0 = dense::diagonal_real(grid, |x| m * metric.gravito_potential(&event(x))[0]);
    h += dense::spin_space(&Matrix2::identity(), &a0);
    h -= dense::spin_space(&sigma_dot(&(w * (0.5 * hbar))), &DMatrix::identity(n, n));
    Ok(h)
}

/// Result of the Pauli reduction.
#[derive(Debug, Clone)]
pub struct PauliReduction {
    /// The reduced Hamiltonian with spin and spin-orbit terms.
    pub hamiltonian: RotatingHamiltonian,
    /// Its dense matrix on the requested grid.
    pub matrix: DMatrix<C64>,
    /// `−3ħ²Ω²/(8mc²)`, already subtracted (not contained in `matrix`).
    pub darwin: f64,
}

pub fn pauli_reduction(setup: &RotationSetup, metric: &WeakMetric, grid: &Grid) -> Result<PauliReduction> {
    let matrix = pauli_matrix(setup, metric, grid, true)?;
    let w = omega_from_connection(metric)?;
    let s = setup.with_omega(w);
    Ok(PauliReduction {
        hamiltonian: build_hamiltonian(
            &s,
            HamiltonianFlags {
                include_spin: true,
                include_spin_orbit: true,
            },
        ),
        matrix,
        darwin: effective_fields(&s).darwin,
    })
}
