//! Quantum simulation and noise budgeting for a nanomechanical test of
//! objective collapse models.

pub mod budget;
pub mod collapse;
pub mod constants;
pub mod error;
pub mod fock;
pub mod lindblad;
pub mod quadrature;
pub mod scenarios;

pub use error::{Error, Result};
pub use fock::{DensityMatrix, FockSpace, Operator};
