//! Thermodynamic formalism for finite-state subshifts with ε-perturbed
//! potentials: Perron data, pressure, Gibbs measures and the zero-temperature
//! style limits of Gibbs measures as a perturbation parameter vanishes.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod golden;
pub mod linalg;
pub mod matrep;
pub mod model;
pub mod perron;
pub mod real;
pub mod sft;
pub mod thermo;
pub mod weights;

pub use error::{Error, Result};
pub use linalg::Mat;
pub use real::{Mp, Real};
