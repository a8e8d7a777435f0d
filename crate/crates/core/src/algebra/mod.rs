//! Complex, Möbius, and polynomial arithmetic on the Riemann sphere.

mod mobius;
mod poly;
mod rational;
mod sphere;

pub use mobius::{cross_ratio, MobiusMap};
pub use poly::{quadratic_roots, Polynomial};
pub use rational::{cov0_equation, RationalMap};
pub use sphere::SpherePoint;
