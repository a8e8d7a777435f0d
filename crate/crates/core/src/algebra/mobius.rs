use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sphere::SpherePoint;
use crate::error::{Error, Result};
use crate::tol;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Points used to measure how far a map is from another map. A Möbius map
/// is determined by the images of any three of them.
const PROBES: [SpherePoint; 6] = [
    SpherePoint::Finite(C::new(0.0, 0.0)),
    SpherePoint::Infinity,
    SpherePoint::Finite(C::new(1.0, 0.0)),
    SpherePoint::Finite(C::new(-1.0, 0.0)),
    SpherePoint::Finite(C::new(0.0, 1.0)),
    SpherePoint::Finite(C::new(0.0, -1.0)),
];

/// `z -> (az + b)/(cz + d)`, stored with `ad - bc = 1`.
///
/// The sign of the matrix is not canonical (PSL, not SL).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: C,
    pub b: C,
    pub c: C,
    pub d: C,
}

impl MobiusMap {
    pub fn new(a: C, b: C, c: C, d: C) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if scale == 0.0 || !(det.norm() > 1e-15 * scale * scale) {
            return Err(Error::SingularMatrix);
        }
        let k = det.sqrt().inv();
        Ok(Self {
            a: a * k,
            b: b * k,
            c: c * k,
            d: d * k,
        })
    }

    /// Builds from real entries; convenient for the classical generators.
    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self {
            a: ONE,
            b: ZERO,
            c: ZERO,
            d: ONE,
        }
    }

    /// `z -> -z`.
    pub fn negation() -> Self {
        Self::new(C::i(), ZERO, ZERO, -C::i()).expect("nonsingular")
    }

    pub fn translation(t: C) -> Self {
        Self {
            a: ONE,
            b: t,
            c: ZERO,
            d: ONE,
        }
    }

    pub fn apply(&self, z: SpherePoint) -> SpherePoint {
        let (x, y) = z.to_projective();
        SpherePoint::from_projective(self.a * x + self.b * y, self.c * x + self.d * y)
    }

    /// Applies the map to a finite value.
    pub fn apply_c(&self, z: C) -> SpherePoint {
        self.apply(SpherePoint::finite(z))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let (e, f, g, h) = (other.a, other.b, other.c, other.d);
        Self::renormalized(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }

    pub fn inverse(&self) -> MobiusMap {
        Self::renormalized(self.d, -self.b, -self.c, self.a)
    }

    /// `g⁻¹ ∘ self ∘ g`.
    pub fn conjugate_by(&self, g: &MobiusMap) -> MobiusMap {
        g.inverse().compose(self).compose(g)
    }

    pub fn pow(&self, n: i32) -> MobiusMap {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut out = Self::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.compose(&base);
        }
        out
    }

    // Products of unit-determinant matrices drift only by rounding; rescale
    // instead of failing.
    fn renormalized(a: C, b: C, c: C, d: C) -> MobiusMap {
        Self::new(a, b, c, d).unwrap_or(Self { a, b, c, d })
    }

    /// Trace of the unit-determinant matrix, defined up to sign.
    pub fn trace(&self) -> C {
        self.a + self.d
    }

    /// Sign-independent trace invariant.
    pub fn trace_squared(&self) -> C {
        let t = self.trace();
        t * t
    }

    /// Largest chordal displacement of the probe points.
    pub fn identity_residual(&self) -> f64 {
        PROBES
            .iter()
            .map(|p| self.apply(*p).chordal(p))
            .fold(0.0, f64::max)
    }

    /// Largest chordal distance between the images of the probe points.
    pub fn distance(&self, other: &MobiusMap) -> f64 {
        PROBES
            .iter()
            .map(|p| self.apply(*p).chordal(&other.apply(*p)))
            .fold(0.0, f64::max)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.identity_residual() <= tol
    }

    /// Roots of `cz² + (d-a)z - b = 0`, sorted lexicographically with
    /// infinity last. Parabolic maps return the same point twice.
    pub fn fixed_points(&self) -> Result<(SpherePoint, SpherePoint)> {
        let scale = 1.0 + self.a.norm() + self.d.norm();
        let off = self.b.norm().max(self.c.norm()).max((self.a - self.d).norm());
        if off <= tol::ALGEBRAIC * scale {
            return Err(Error::IdentityMap);
        }
        // Homogeneous quadratic A x² + B xy + C y² = 0.
        let (qa, qb, qc) = (self.c, self.d - self.a, -self.b);
        let s = (qb * qb - 4.0 * qa * qc).sqrt();
        let sum = if (qb + s).norm() >= (qb - s).norm() {
            qb + s
        } else {
            qb - s
        };
        let q = -0.5 * sum;
        let (p1, p2) = if q.norm() == 0.0 {
            if qa.norm() == 0.0 {
                (SpherePoint::Infinity, SpherePoint::Infinity)
            } else {
                (SpherePoint::ZERO, SpherePoint::ZERO)
            }
        } else {
            (
                SpherePoint::from_projective(q, qa),
                SpherePoint::from_projective(qc, q),
            )
        };
        Ok(order_pair(p1, p2))
    }

    /// Eigenvalue `λ` of the matrix at the fixed point `p`; the derivative of
    /// the map there is `1/λ²`.
    pub fn eigenvalue_at(&self, p: SpherePoint) -> C {
        let (x, y) = p.to_projective();
        if y.norm() >= x.norm() {
            (self.c * x + self.d * y) / y
        } else {
            (self.a * x + self.b * y) / x
        }
    }

    /// The fixed point with derivative of modulus at most one (the first one
    /// when both are neutral).
    pub fn attracting_fixed_point(&self) -> Result<SpherePoint> {
        let (p, q) = self.fixed_points()?;
        if self.eigenvalue_at(q).norm() > self.eigenvalue_at(p).norm() + 1e-12 {
            Ok(q)
        } else {
            Ok(p)
        }
    }

    /// Elliptic map fixing `p` and `q` with derivative `e^{iθ}` at `p`:
    /// `g ∘ (z -> e^{iθ}z) ∘ g⁻¹` where `g(0) = p`, `g(∞) = q`.
    pub fn elliptic_about(p: SpherePoint, q: SpherePoint, theta: f64) -> Result<MobiusMap> {
        if p.chordal(&q) < tol::CHORDAL {
            return Err(Error::DegenerateAxis);
        }
        let (px, py) = p.to_projective();
        let (qx, qy) = q.to_projective();
        let g = MobiusMap::new(qx, px, qy, py).map_err(|_| Error::DegenerateAxis)?;
        let half = C::from_polar(1.0, 0.5 * theta);
        let rot = MobiusMap {
            a: half,
            b: ZERO,
            c: ZERO,
            d: half.inv(),
        };
        Ok(g.compose(&rot).compose(&g.inverse()))
    }

    /// The map sending `z1 -> 0`, `z2 -> 1`, `z3 -> ∞`.
    pub fn from_three_points(z1: SpherePoint, z2: SpherePoint, z3: SpherePoint) -> Result<Self> {
        if z1.chordal(&z2) < tol::CHORDAL
            || z1.chordal(&z3) < tol::CHORDAL
            || z2.chordal(&z3) < tol::CHORDAL
        {
            return Err(Error::DegenerateConfiguration);
        }
        let (x1, y1) = z1.to_projective();
        let (x2, y2) = z2.to_projective();
        let (x3, y3) = z3.to_projective();
        let k1 = pdet(x2, y2, x3, y3);
        let k2 = pdet(x2, y2, x1, y1);
        MobiusMap::new(k1 * y1, -k1 * x1, k2 * y3, -k2 * x3)
            .map_err(|_| Error::DegenerateConfiguration)
    }
}

fn pdet(x1: C, y1: C, x2: C, y2: C) -> C {
    x1 * y2 - y1 * x2
}

fn order_pair(p: SpherePoint, q: SpherePoint) -> (SpherePoint, SpherePoint) {
    if p.lex_cmp(&q).is_gt() {
        (q, p)
    } else {
        (p, q)
    }
}

/// Image of `z1` under the Möbius map sending `w1 -> 0`, `w2 -> ∞`,
/// `z2 -> 1`.
pub fn cross_ratio(
    z1: SpherePoint,
    z2: SpherePoint,
    w1: SpherePoint,
    w2: SpherePoint,
) -> Result<C> {
    let pts = [z1, z2, w1, w2];
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i].chordal(&pts[j]) < tol::CHORDAL {
                return Err(Error::DegenerateConfiguration);
            }
        }
    }
    let (a1, b1) = z1.to_projective();
    let (a2, b2) = z2.to_projective();
    let (c1, d1) = w1.to_projective();
    let (c2, d2) = w2.to_projective();
    Ok(pdet(a1, b1, c1, d1) * pdet(a2, b2, c2, d2) / (pdet(a1, b1, c2, d2) * pdet(a2, b2, c1, d1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sp(re: f64, im: f64) -> SpherePoint {
        SpherePoint::new(re, im)
    }

    fn sigma() -> MobiusMap {
        MobiusMap::from_real(0.0, -1.0, 1.0, 0.0).unwrap()
    }

    fn modular_rho() -> MobiusMap {
        MobiusMap::from_real(-1.0, -1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert!(sigma().apply(sp(0.0, 1.0)).approx_eq(&sp(0.0, 1.0), 1e-15));
        let id = MobiusMap::identity();
        assert_eq!(id.apply(sp(3.0, 4.0)), sp(3.0, 4.0));
        let rho = modular_rho();
        assert!(rho.apply(sp(-1.0, 0.0)).approx_eq(&SpherePoint::ZERO, 1e-15));
        assert!(rho.apply(SpherePoint::ZERO).is_infinity());
        assert!(rho.apply(SpherePoint::Infinity).approx_eq(&sp(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn compose_and_inverse_examples() {
        assert!(sigma().compose(&sigma()).is_identity(1e-15));
        let t = MobiusMap::translation(1.0.into());
        assert!(t.inverse().distance(&MobiusMap::translation((-1.0).into())) < 1e-15);
        let rho = modular_rho();
        assert!(rho.compose(&rho.compose(&rho)).is_identity(1e-14));
    }

    #[test]
    fn singular_matrix_rejected() {
        assert_eq!(
            MobiusMap::from_real(1.0, 2.0, 2.0, 4.0),
            Err(Error::SingularMatrix)
        );
    }

    #[test]
    fn fixed_point_examples() {
        let (p, q) = MobiusMap::negation().fixed_points().unwrap();
        assert_eq!((p, q), (SpherePoint::ZERO, SpherePoint::Infinity));

        let (p, q) = sigma().fixed_points().unwrap();
        assert!(p.approx_eq(&sp(0.0, -1.0), 1e-15));
        assert!(q.approx_eq(&sp(0.0, 1.0), 1e-15));

        // z² + z + 1 = 0 by the quadratic formula.
        let r = 3f64.sqrt() / 2.0;
        let (p, q) = modular_rho().fixed_points().unwrap();
        assert!(p.approx_eq(&sp(-0.5, -r), 1e-14));
        assert!(q.approx_eq(&sp(-0.5, r), 1e-14));
    }

    #[test]
    fn parabolic_fixed_points_coincide() {
        let (p, q) = MobiusMap::translation(C::new(2.0, 1.0)).fixed_points().unwrap();
        assert!(p.is_infinity() && q.is_infinity());
        let m = MobiusMap::from_real(1.0, 0.0, 1.0, 1.0).unwrap();
        let (p, q) = m.fixed_points().unwrap();
        assert_eq!(p, SpherePoint::ZERO);
        assert_eq!(q, SpherePoint::ZERO);
    }

    #[test]
    fn identity_has_no_fixed_points() {
        assert_eq!(MobiusMap::identity().fixed_points(), Err(Error::IdentityMap));
    }

    #[test]
    fn elliptic_examples() {
        let m = MobiusMap::elliptic_about(SpherePoint::ZERO, SpherePoint::Infinity, PI).unwrap();
        assert!(m.distance(&MobiusMap::negation()) < 1e-15);

        let m =
            MobiusMap::elliptic_about(SpherePoint::ZERO, SpherePoint::Infinity, 2.0 * PI / 3.0)
                .unwrap();
        let w = C::from_polar(1.0, 2.0 * PI / 3.0);
        assert!(m.apply(SpherePoint::ONE).approx_eq(&w.into(), 1e-15));

        let kappa = sp(2.0, 1.0);
        let m = MobiusMap::elliptic_about(kappa, SpherePoint::ONE, 2.0 * PI / 3.0).unwrap();
        assert!(m.apply(kappa).chordal(&kappa) < 1e-12);
        assert!(m.apply(SpherePoint::ONE).chordal(&SpherePoint::ONE) < 1e-12);
        assert!(m.pow(3).is_identity(1e-12));
        assert!(!m.is_identity(1e-3));
    }

    #[test]
    fn elliptic_degenerate_axis() {
        assert_eq!(
            MobiusMap::elliptic_about(SpherePoint::ONE, SpherePoint::ONE, 1.0),
            Err(Error::DegenerateAxis)
        );
    }

    #[test]
    fn three_point_map() {
        let (z1, z2, z3) = (sp(2.0, 1.0), SpherePoint::Infinity, sp(-1.0, 0.5));
        let m = MobiusMap::from_three_points(z1, z2, z3).unwrap();
        assert!(m.apply(z1).approx_eq(&SpherePoint::ZERO, 1e-14));
        assert!(m.apply(z2).approx_eq(&SpherePoint::ONE, 1e-14));
        assert!(m.apply(z3).is_infinity());
    }

    #[test]
    fn cross_ratio_examples() {
        let k = C::new(0.3, -1.2);
        let cr = cross_ratio(k.into(), SpherePoint::ONE, SpherePoint::ZERO, SpherePoint::Infinity)
            .unwrap();
        assert!((cr - k).norm() < 1e-15);
        let cr = cross_ratio(sp(-1.0, 0.0), SpherePoint::ONE, SpherePoint::ZERO, SpherePoint::Infinity)
            .unwrap();
        assert!((cr + 1.0).norm() < 1e-15);
        assert_eq!(
            cross_ratio(SpherePoint::ONE, SpherePoint::ONE, SpherePoint::ZERO, SpherePoint::Infinity),
            Err(Error::DegenerateConfiguration)
        );
    }

    #[test]
    fn attracting_fixed_point_of_dilation() {
        let m = MobiusMap::new(C::new(0.5, 0.0), ZERO, ZERO, C::new(2.0, 0.0)).unwrap();
        // z -> z/4 attracts to 0.
        assert_eq!(m.attracting_fixed_point().unwrap(), SpherePoint::ZERO);
        assert!(m.inverse().attracting_fixed_point().unwrap().is_infinity());
    }
}
