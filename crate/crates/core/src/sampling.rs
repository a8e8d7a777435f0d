//! Deterministic pseudo-random streams keyed by `(seed, stream)`.
//!
//! ChaCha is counter based, so the stream for a given key does not depend on
//! how many other streams were drawn before it or on which thread.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{MobiusMap, Polynomial};

pub fn keyed_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Area-uniform point in the disk `|z| <= radius`.
pub fn disk_point<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    let t = std::f64::consts::TAU * rng.random::<f64>();
    Complex64::from_polar(r, t)
}

pub fn disk_points(n: usize, radius: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = keyed_rng(seed, 0);
    (0..n).map(|_| disk_point(&mut rng, radius)).collect()
}

fn unit_square<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Möbius map with entries uniform in the unit square, redrawn until the
/// determinant is comfortably away from zero.
pub fn random_mobius<R: Rng>(rng: &mut R) -> MobiusMap {
    loop {
        let (a, b, c, d) = (unit_square(rng), unit_square(rng), unit_square(rng), unit_square(rng));
        if (a * d - b * c).norm() > 0.1 {
            if let Ok(m) = MobiusMap::new(a, b, c, d) {
                return m;
            }
        }
    }
}

/// A random Möbius involution `g ∘ (z -> -z) ∘ g⁻¹`.
pub fn random_involution<R: Rng>(rng: &mut R) -> MobiusMap {
    MobiusMap::negation().conjugate_by(&random_mobius(rng).inverse())
}

/// Monic polynomial of the given degree with lower coefficients in the unit
/// square.
pub fn random_monic<R: Rng>(rng: &mut R, degree: usize) -> Polynomial {
    let mut coeffs: Vec<Complex64> = (0..degree).map(|_| unit_square(rng)).collect();
    coeffs.push(Complex64::new(1.0, 0.0));
    Polynomial::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_independent() {
        let a: Vec<f64> = (0..4).map(|_| keyed_rng(7, 3).random()).collect();
        let b: Vec<f64> = (0..4).map(|_| keyed_rng(7, 3).random()).collect();
        assert_eq!(a, b);
        let x: f64 = keyed_rng(7, 3).random();
        let y: f64 = keyed_rng(7, 4).random();
        assert_ne!(x, y);
    }

    #[test]
    fn involutions_square_to_identity() {
        let mut rng = keyed_rng(1, 0);
        for _ in 0..50 {
            let j = random_involution(&mut rng);
            assert!(j.compose(&j).is_identity(1e-10));
        }
    }
}
