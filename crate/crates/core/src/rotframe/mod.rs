//! Quantum mechanics in the uniformly rotating frame.
//!
//! The Hamiltonian is obtained by minimal coupling to the inertial gauge field
//! `𝓐 = Ω×x`, `𝓐₀ = −½(Ω×x)²`:
//!
//! `H = (p̂ − mΩ×x − Ŝ×𝓔)²/2m − ½m(Ω×x)² − Ω·Ŝ`
//!
//! with the spin term and the spin-orbit term `Ŝ×𝓔` (`𝓔 = Ω²x/c²`) optional.

mod classical;
mod ehrenfest;
mod hamiltonian;
mod propagate;

pub use classical::{classical_acceleration, classical_trajectory, Trajectory};
pub use ehrenfest::{ehrenfest_residual, ehrenfest_trajectory, mean_velocity, EhrenfestTrajectory};
pub use hamiltonian::{build_hamiltonian, HamiltonianFlags, RotatingHamiltonian};
pub use propagate::{boundary_margin, propagate, Propagation, Propagator, StabilityWarning, BOUNDARY_THRESHOLD};
