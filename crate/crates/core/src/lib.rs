//! Numerical lab for a reversible Gray-Scott reaction-diffusion system.

pub mod domain;
pub mod equilibria;
pub mod harness;
pub mod error;
pub mod lyapunov;
pub mod model;
pub mod ode;
pub mod snapshot;
pub mod solver;
pub mod stability;

pub use error::{Error, Result};
