//! poisonlab: data-poisoning perturbations for linear regression systems.
//!
//! The library synthesizes small regression tasks, crafts two families of
//! feature perturbations (label-guided and condition-number-maximizing),
//! solves the clean and poisoned systems with a direct solver and six
//! iterative solvers, and evaluates the matching convergence and forward
//! error bounds together with spectral diagnostics.

pub mod analysis;
pub mod attacks;
pub mod datagen;
pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
