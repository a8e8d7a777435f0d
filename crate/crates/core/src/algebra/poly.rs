use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C = Complex64;

const TRIM: f64 = 1e-14;
const MAX_ABERTH_ITERATIONS: usize = 500;
/// `1/φ`, the fractional part of the golden ratio.
const GOLDEN_FRACTION: f64 = 0.618_033_988_749_894_9;

/// Polynomial with complex coefficients in ascending degree.
///
/// Trailing coefficients below `1e-14` times the largest modulus are trimmed
/// on construction. The zero polynomial is stored as `[0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C>", into = "Vec<C>")]
pub struct Polynomial {
    coeffs: Vec<C>,
}

impl TryFrom<Vec<C>> for Polynomial {
    type Error = Error;

    fn try_from(coeffs: Vec<C>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("non-finite polynomial coefficient".into()));
        }
        Ok(Polynomial::new(coeffs))
    }
}

impl From<Polynomial> for Vec<C> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= TRIM * max {
            coeffs.pop();
        }
        if coeffs.is_empty() || max == 0.0 {
            coeffs = vec![C::new(0.0, 0.0)];
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C::new(c, 0.0)).collect())
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![C::new(0.0, 0.0); n + 1];
        coeffs[n] = C::new(1.0, 0.0);
        Self { coeffs }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C]) -> Self {
        roots.iter().fold(Self::constant(C::new(1.0, 0.0)), |acc, &r| {
            acc.mul(&Self::new(vec![-r, C::new(1.0, 0.0)]))
        })
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].norm() == 0.0
    }

    pub fn leading(&self) -> C {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, z: C) -> C {
        self.coeffs.iter().rev().fold(C::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: C) -> (C, C) {
        let mut p = C::new(0.0, 0.0);
        let mut dp = C::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `Σ |c_k| |z|^k`, the natural scale of rounding errors in `eval(z)`.
    pub fn eval_scale(&self, z: C) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(C::new(0.0, 0.0));
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = C::new(0.0, 0.0);
        Self::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(zero)
                        + other.coeffs.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![C::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Self::constant(C::new(1.0, 0.0)), |acc, _| acc.mul(self))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::constant(C::new(0.0, 0.0)), |acc, &c| {
                acc.mul(inner).add(&Self::constant(c))
            })
    }

    /// Synthetic division by `(w - z)`: returns quotient and remainder.
    pub fn deflate(&self, z: C) -> (Self, C) {
        let n = self.degree();
        if n == 0 {
            return (Self::constant(C::new(0.0, 0.0)), self.coeffs[0]);
        }
        let mut q = vec![C::new(0.0, 0.0); n];
        q[n - 1] = self.coeffs[n];
        for k in (1..n).rev() {
            q[k - 1] = self.coeffs[k] + z * q[k];
        }
        let rem = self.coeffs[0] + z * q[0];
        (Self { coeffs: q }, rem)
    }

    /// `1 + max |c_k / c_n|`, an upper bound on root moduli.
    pub fn cauchy_bound(&self) -> f64 {
        let lead = self.leading().norm();
        let n = self.degree();
        1.0 + self.coeffs[..n]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(0.0, f64::max)
    }

    /// All `degree` roots with multiplicity.
    ///
    /// Degrees one and two use closed forms; higher degrees use Aberth–Ehrlich
    /// iteration started on a circle of Cauchy-bound radius at angles shifted
    /// by a golden-ratio fraction of the spacing. Each returned root satisfies
    /// `|p(r)| <= tol * Σ|c_k||r|^k`.
    pub fn roots(&self, tol: f64) -> Result<Vec<C>> {
        if self.degree() == 0 {
            return Err(Error::ConstantPolynomial);
        }
        let zeros = self.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
        let mut roots = vec![C::new(0.0, 0.0); zeros];
        let rest = Self {
            coeffs: self.coeffs[zeros..].to_vec(),
        };
        match rest.degree() {
            0 => {}
            1 => roots.push(-rest.coeffs[0] / rest.coeffs[1]),
            2 => {
                let (a, b) = quadratic_roots(rest.coeffs[2], rest.coeffs[1], rest.coeffs[0]);
                roots.push(a);
                roots.push(b);
            }
            _ => roots.extend(rest.aberth(tol)?),
        }
        Ok(roots)
    }

    fn aberth(&self, tol: f64) -> Result<Vec<C>> {
        let n = self.degree();
        let radius = self.cauchy_bound();
        let mut z: Vec<C> = (0..n)
            .map(|k| C::from_polar(radius, 2.0 * PI * (k as f64 + GOLDEN_FRACTION) / n as f64))
            .collect();
        let mut done = vec![false; n];
        let stop = 4.0 * f64::EPSILON * n as f64;
        let mut iterations = 0;
        while iterations < MAX_ABERTH_ITERATIONS && done.iter().any(|d| !d) {
            iterations += 1;
            for i in 0..n {
                if done[i] {
                    continue;
                }
                let (p, dp) = self.eval_with_derivative(z[i]);
                if p.norm() <= stop * self.eval_scale(z[i]) {
                    done[i] = true;
                    continue;
                }
                let repulsion: C = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (z[i] - z[j]).inv())
                    .sum();
                let ratio = p / dp;
                let mut step = ratio / (C::new(1.0, 0.0) - ratio * repulsion);
                if !step.is_finite() {
                    step = C::new(1e-8 * (1.0 + z[i].norm()), 1e-8);
                }
                z[i] -= step;
                if step.norm() <= f64::EPSILON * z[i].norm() {
                    done[i] = true;
                }
            }
        }
        let ok = z
            .iter()
            .all(|&r| r.is_finite() && self.eval(r).norm() <= tol * self.eval_scale(r));
        if ok {
            Ok(z)
        } else {
            Err(Error::NoConvergence {
                iterations,
                partial: z,
            })
        }
    }
}

/// Roots of `a w² + b w + c` without cancellation.
pub fn quadratic_roots(a: C, b: C, c: C) -> (C, C) {
    let s = (b * b - 4.0 * a * c).sqrt();
    let sum = if (b + s).norm() >= (b - s).norm() {
        b + s
    } else {
        b - s
    };
    let q = -0.5 * sum;
    if q.norm() == 0.0 {
        return (C::new(0.0, 0.0), C::new(0.0, 0.0));
    }
    (q / a, c / q)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})w"),
                _ => format!("({c})w^{k}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn contains(roots: &[C], r: C, tol: f64) -> bool {
        roots.iter().any(|x| (x - r).norm() < tol)
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = Polynomial::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1e-16, 0.0)]);
        assert_eq!(p.degree(), 1);
        assert!(Polynomial::new(vec![]).is_zero());
        assert!(Polynomial::from_real(&[0.0, 0.0]).is_zero());
    }

    #[test]
    fn roots_of_cyclotomic_quadratic() {
        let roots = Polynomial::from_real(&[1.0, 1.0, 1.0]).roots(1e-12).unwrap();
        let w = C::from_polar(1.0, 2.0 * PI / 3.0);
        assert!(contains(&roots, w, 1e-14));
        assert!(contains(&roots, w.conj(), 1e-14));
    }

    #[test]
    fn cube_roots_of_unity() {
        let roots = Polynomial::from_real(&[-1.0, 0.0, 0.0, 1.0]).roots(1e-12).unwrap();
        assert_eq!(roots.len(), 3);
        for k in 0..3 {
            assert!(contains(&roots, C::from_polar(1.0, 2.0 * PI * k as f64 / 3.0), 1e-13));
        }
    }

    #[test]
    fn zero_roots_are_exact() {
        let roots = Polynomial::monomial(4).roots(1e-12).unwrap();
        assert_eq!(roots, vec![c(0.0, 0.0); 4]);
    }

    #[test]
    fn clustered_and_spread_roots() {
        let want = [c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 1.0), c(100.0, -3.0), c(0.01, 0.02)];
        let p = Polynomial::from_roots(&want);
        let roots = p.roots(1e-12).unwrap();
        for r in &roots {
            assert!(p.eval(*r).norm() <= 1e-12 * p.eval_scale(*r));
        }
        assert!(contains(&roots, c(100.0, -3.0), 1e-10));
        assert!(contains(&roots, c(-2.0, 1.0), 1e-12));
    }

    #[test]
    fn constant_has_no_roots() {
        assert_eq!(
            Polynomial::constant(c(3.0, 0.0)).roots(1e-12),
            Err(Error::ConstantPolynomial)
        );
    }

    #[test]
    fn deflation_removes_root() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 0.0, 1.0]);
        let (q, rem) = p.deflate(c(1.0, 0.0));
        assert!(rem.norm() < 1e-15);
        assert_eq!(q, Polynomial::from_real(&[1.0, 1.0, 1.0]));
    }

    #[test]
    fn compose_matches_pointwise() {
        let p = Polynomial::new(vec![c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.0)]);
        let q = Polynomial::new(vec![c(0.5, 0.0), c(-1.0, 1.0)]);
        let z = c(0.3, -0.7);
        let lhs = p.compose(&q).eval(z);
        assert!((lhs - p.eval(q.eval(z))).norm() < 1e-13);
    }

    #[test]
    fn derivative_via_horner_pass() {
        let p = Polynomial::new(vec![c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.0), c(0.5, 0.5)]);
        let z = c(-0.4, 1.1);
        let (v, dv) = p.eval_with_derivative(z);
        assert!((v - p.eval(z)).norm() < 1e-14);
        assert!((dv - p.derivative().eval(z)).norm() < 1e-14);
    }
}
