//! Supersingular isogeny graphs and the component groups of J₀(p).
//!
//! For a prime level p this crate enumerates the supersingular j-invariants
//! over GF(p²), builds Hecke operators on the divisor group they span,
//! extracts the rational eigenforms, and from each eigenform vector λ
//! computes the order of the component group Ψ of the elliptic quotient,
//! the cokernel of Φ → Ψ and the modular degree.

pub mod cache;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod field;
pub mod formulas;
pub mod lattice;
pub mod modpoly;
pub mod hecke;
pub mod json;
pub mod pipeline;
pub mod supersingular;

pub use error::{Error, Result};
