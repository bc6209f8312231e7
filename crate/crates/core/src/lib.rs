//! Sparse spectral recovery on the cyclic group ℤ_N by ℓ¹-minimal
//! extension in the Wiener algebra.

pub mod certificates;
pub mod error;
pub mod harness;
pub mod lacunary;
pub mod rng;
pub mod solver;
pub mod spectral;
pub mod uncertainty;

pub use error::{Error, Result};
