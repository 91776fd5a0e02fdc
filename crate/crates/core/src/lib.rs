//! Four-mode continuous-variable engine for the multiphoton Bell-type
//! inequality `-P( , ) <= f <= 0`.
//!
//! Two independent backends evaluate the same vacuum-projection
//! probabilities: exact Gaussian phase-space formulas ([`gaussian`]) and a
//! truncated Fock-space simulator ([`fock`]). The [`bell`] module combines
//! either into coincidence rates and the Bell functional.

pub mod bell;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod optimize;
pub mod symplectic;

pub use error::{Error, Result};
