//! Trigonometric maps `Q(exp(2 pi i M z))`, their real root multisets, and
//! the Fourier-Bohr spectra of the resulting point measures.

pub mod amoeba;
pub mod bivariate;
pub mod constructions;
pub mod error;
pub mod genericity;
pub mod lattice;
pub mod measures;
pub mod numeric;
pub mod poly;
pub mod polyring;
pub mod polytope;
pub mod rootfind;
pub mod scalar;

pub use error::{FqError, Result};
