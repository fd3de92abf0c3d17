//! Desk-scale numerics for consecutive values of omega, Omega and tau.

pub mod barrier;
pub mod consecutive;
pub mod constants;
pub mod correlation;
pub mod ctau;
pub mod error;
pub mod fixed;
pub mod llt;
pub mod sieve;
pub mod smooth;
pub mod walk;

pub use error::{LabError, Result};
