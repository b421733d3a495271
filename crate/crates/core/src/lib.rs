//! Finite-dimensional numerics for the centrally extended Galilean algebra:
//! truncated representations, commutation-relation audits, transformations of
//! states and laws, Casimir operators and directly observable magnitudes.

pub mod audit;
pub mod casimir;
pub mod classical;
pub mod commutant;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod representations;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
