//! Elastic Helmholtz (Navier–Lamé) tools: special functions, the fundamental
//! solution and its Bessel addition formula, a mode-spectral outgoing solver,
//! Mizohata–Takeuchi analysis of radial weights and numerical checks of the
//! weighted a priori estimates.

pub mod cli;
pub mod error;
pub mod estimates;
pub mod fundsol;
pub mod quad;
pub mod solver;
pub mod specfun;
pub mod weights;

pub use error::{Error, Result};
