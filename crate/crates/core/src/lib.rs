//! Rotation algebras A_θ, their Flip orbifolds, and the K-theory invariants of
//! approximately central Powers-Rieffel projections.

pub mod algebra;
pub mod arithmetic;
pub mod bimodule;
pub mod bump;
pub mod chern;
pub mod error;
pub mod fields;
pub mod ktheory;
pub mod quad;
pub mod real;
pub mod spectral;
pub mod suite;

pub use algebra::{FourierElement, Parity};
pub use error::{Error, Result};
pub use real::Real2;
