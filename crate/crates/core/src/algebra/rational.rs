use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mobius::MobiusMap;
use super::poly::Polynomial;
use super::sphere::SpherePoint;
use crate::error::{Error, Result};
use crate::tol;

type C = Complex64;

/// Quotient `num / den` of coprime polynomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalMap {
    num: Polynomial,
    den: Polynomial,
}

impl RationalMap {
    /// Fails when the denominator vanishes, the map is constant, or the two
    /// polynomials share a root within chordal `1e-10`.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Config("zero denominator".into()));
        }
        let map = Self { num, den };
        if map.degree() == 0 {
            return Err(Error::ConstantPolynomial);
        }
        if map.num.degree() > 0 && map.den.degree() > 0 && !map.num.is_zero() {
            let zeros = map.num.roots(tol::ALGEBRAIC)?;
            let poles = map.den.roots(tol::ALGEBRAIC)?;
            for z in &zeros {
                for p in &poles {
                    if SpherePoint::Finite(*z).chordal(&SpherePoint::Finite(*p)) < tol::CHORDAL {
                        return Err(Error::CommonRoot(*z));
                    }
                }
            }
        }
        Ok(map)
    }

    pub fn polynomial(p: Polynomial) -> Result<Self> {
        Self::new(p, Polynomial::constant(C::new(1.0, 0.0)))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.num.degree().max(self.den.degree())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    /// Homogeneous value `[P : D]` at `z`, using the reversed polynomials in
    /// the chart at infinity.
    pub fn eval_projective(&self, z: SpherePoint) -> (C, C) {
        let (x, y) = z.to_projective();
        if y == C::new(1.0, 0.0) {
            (self.num.eval(x), self.den.eval(x))
        } else {
            let n = self.degree();
            (reversed_eval(&self.num, n, y), reversed_eval(&self.den, n, y))
        }
    }

    pub fn eval(&self, z: SpherePoint) -> SpherePoint {
        let (p, d) = self.eval_projective(z);
        SpherePoint::from_projective(p, d)
    }

    /// Numerator `P'D - PD'` of the derivative.
    pub fn derivative_numerator(&self) -> Polynomial {
        self.num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()))
    }

    /// `self ∘ m`, with both parts homogenized to the degree of `self`.
    pub fn compose_mobius(&self, m: &MobiusMap) -> Result<RationalMap> {
        let n = self.degree();
        let top = Polynomial::new(vec![m.b, m.a]);
        let bottom = Polynomial::new(vec![m.d, m.c]);
        let homogenize = |p: &Polynomial| {
            let mut acc = Polynomial::constant(C::new(0.0, 0.0));
            for (k, &c) in p.coeffs().iter().enumerate() {
                let term = top.pow(k).mul(&bottom.pow(n - k)).scale(c);
                acc = acc.add(&term);
            }
            acc
        };
        RationalMap::new(homogenize(&self.num), homogenize(&self.den))
    }

    /// `m ∘ self`.
    pub fn post_compose_mobius(&self, m: &MobiusMap) -> Result<RationalMap> {
        let num = self.num.scale(m.a).add(&self.den.scale(m.b));
        let den = self.num.scale(m.c).add(&self.den.scale(m.d));
        RationalMap::new(num, den)
    }
}

// Σ c_k y^{n-k}
fn reversed_eval(p: &Polynomial, n: usize, y: C) -> C {
    let mut acc = C::new(0.0, 0.0);
    for k in 0..=n {
        let c = p.coeffs().get(k).copied().unwrap_or_default();
        acc = acc * y + c;
    }
    acc
}

/// Polynomial in `w` whose roots form the deleted-covering image of `z`.
///
/// Builds `D(z)·P(w) - P(z)·D(w)` and removes one factor `(w - z)` by
/// synthetic division, then normalizes to a monic polynomial. Infinite (or chart-swapped) inputs are rejected with
/// [`Error::InfiniteInput`]; callers conjugate first.
pub fn cov0_equation(q: &RationalMap, z: SpherePoint) -> Result<Polynomial> {
    let zc = match z {
        SpherePoint::Finite(v) if v.norm() <= tol::CHART_SWAP => v,
        _ => return Err(Error::InfiniteInput),
    };
    let (vx, vy) = q.eval_projective(z);
    let norm = (vx.norm_sqr() + vy.norm_sqr()).sqrt();
    let (vx, vy) = (vx / norm, vy / norm);
    let eq = q.num().scale(vy).sub(&q.den().scale(vx));
    let (quotient, _) = eq.deflate(zc);
    let lead = quotient.leading();
    if lead.norm() == 0.0 {
        return Ok(quotient);
    }
    Ok(quotient.scale(lead.inv()))
}
