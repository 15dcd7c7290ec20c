//! Pseudo-momentum of a charged two-body harmonic oscillator in crossed static
//! electric and magnetic fields, with its one-loop vacuum corrections.

pub mod error;
pub mod fock;
pub mod oscillator;
pub mod perturbation;
pub mod quadrature;
pub mod renormalization;
pub mod report;
pub mod system;
pub mod units;
pub mod vacuum;

pub use error::{Error, Result};
