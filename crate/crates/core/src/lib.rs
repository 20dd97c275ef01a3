//! Dirichlet-type energies of radial and generalized radial maps between
//! concentric annuli in R^n, their sharp lower bounds, and the
//! Euler–Lagrange radial minimizer.

pub mod energy;
pub mod error;
pub mod euler_lagrange;
pub mod geometry;
pub mod lab;
pub mod profiles;
pub mod quadrature;
pub mod special;
pub mod verification;

pub use error::{Error, Result};
