//! Exact finite covers of once-punctured torus bundles and their Dehn fillings.
//!
//! The crate builds permutation models of finite covers of the fiber, checks
//! that a monodromy and a filling slope lift, and computes first Betti numbers
//! of the resulting covers with exact integer arithmetic.

pub mod certify;
pub mod cover;
pub mod error;
pub mod homology;
mod json;
pub mod perm;
pub mod presentation;
pub mod quotient;
pub mod slope;
pub mod word;

pub use error::{Error, Result};
