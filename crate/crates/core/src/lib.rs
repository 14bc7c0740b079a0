//! Non-relativistic spin-1/2 quantum mechanics on periodic grids: the
//! Lévy-Leblond linearization checked in exact arithmetic, Pauli spinor
//! propagation in electromagnetic potentials, the full probability-current
//! decomposition including the spin current, and Bohmian trajectories
//! driven by that current.

pub mod algebra;
pub mod bohm;
pub mod cli;
pub mod config;
pub mod currents;
pub mod evolve;
pub mod fields;
pub mod grid;
pub mod io;
pub mod spectral;
pub mod state;
pub mod units;

pub use grid::{Grid, ScalarField, VectorField};
pub use state::{BispinorField, SpinorField};
pub use units::Units;
