//! Numerics for symmetry breaking in the fractional Caffarelli–Kohn–Nirenberg
//! minimisation problem.

pub mod checks;
pub mod cli;
pub mod energy;
pub mod error;
pub mod extension;
pub mod minimize;
pub mod params;
pub mod perturb;
pub mod special;
pub mod spectral;
pub mod spherical;

pub use error::{Error, Result};
