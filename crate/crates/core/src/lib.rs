//! Fractional Sobolev embeddings: an exact classifier plus numerical checks
//! of norms, scaling identities, counterexample rates and interpolation.

pub mod config;
pub mod corpus;
pub mod error;
pub mod exponent;
pub mod lab;
pub mod norms;
pub mod report;

pub use error::{Error, Result};
