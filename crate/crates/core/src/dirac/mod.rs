//! Weak-field Dirac theory in the rotating frame: metric, vierbein and spin
//! connection, the low-energy Dirac operator and its Pauli reduction, and the
//! gauge structure of the weak-field potentials.

mod fields;
mod gamma;
mod gauge;
mod metric;
mod operator;
mod vierbein;

pub use fields::{effective_fields, efield_from_metric, EffectiveFields};
pub use gamma::{alpha, beta, gamma, gamma_anticommutator_defect, spin_tensor};
pub use gauge::{
    gauge_transform_unchecked, gauge_transform_weakfield, weakfield_schrodinger_hamiltonian, GaugeReport,
    GaugeVector,
};
pub use metric::{eta, rotating_metric, WeakMetric};
pub use operator::{
    dirac_hamiltonian, dirac_hermitian_hamiltonian, low_energy_dirac_operator, pauli_matrix, pauli_reduction,
    upper_branch, PauliReduction,
};
pub use vierbein::{build_vierbein, spin_connection, vierbein_on_grid, SpinConnection, Vierbein};
