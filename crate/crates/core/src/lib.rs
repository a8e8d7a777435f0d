//! Numerical laboratory for holomorphic correspondences of the form
//! `J ∘ Cov₀^q`, representations of Hecke groups, and polynomial dynamics.

pub mod algebra;
pub mod check;
pub mod correspondence;
pub mod dynamics;
pub mod error;
pub mod hecke;
pub mod render;
pub mod sampling;
pub mod tol;

pub use error::{Error, Result};
