//! Quantum mechanics and Dirac theory in non-inertial frames: Galilei boosts,
//! uniformly rotating frames, Sagnac and spin-rotation phases, and the
//! weak-field Dirac reduction with its gauge structure.

pub mod boosts;
pub mod dense;
pub mod dirac;
pub mod error;
pub mod grid;
pub mod io;
pub mod path;
pub mod phases;
pub mod quadrature;
pub mod rotframe;
pub mod setup;
pub mod spectral;
pub mod spin;

pub use error::{Error, Result};
pub use grid::{Boundary, Grid, WaveState};
pub use path::{ClosedPath, SpacetimeLoop};
pub use setup::{GaugeField, RotationSetup};
pub use spin::{SpinOperator, C64};
