use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::tol;

/// A point of the Riemann sphere.
///
/// Infinity is a distinct tag rather than a large float. Finite values are
/// never NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub const ZERO: SpherePoint = SpherePoint::Finite(Complex64::new(0.0, 0.0));
    pub const ONE: SpherePoint = SpherePoint::Finite(Complex64::new(1.0, 0.0));

    /// Wraps a complex number; infinite components map to `Infinity`.
    ///
    /// Panics on NaN, which never represents a sphere point.
    pub fn finite(z: Complex64) -> Self {
        assert!(!z.is_nan(), "NaN is not a point of the sphere");
        if z.is_infinite() {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite(z)
        }
    }

    pub fn new(re: f64, im: f64) -> Self {
        Self::finite(Complex64::new(re, im))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn as_complex(&self) -> Option<Complex64> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    /// Homogeneous coordinates `[x : y]`, using the chart `1/z` for large
    /// moduli so both entries stay of moderate size.
    pub fn to_projective(&self) -> (Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            SpherePoint::Infinity => (one, Complex64::new(0.0, 0.0)),
            SpherePoint::Finite(z) if z.norm() > tol::CHART_SWAP => (one, z.inv()),
            SpherePoint::Finite(z) => (z, one),
        }
    }

    pub fn from_projective(x: Complex64, y: Complex64) -> Self {
        if y.norm_sqr() == 0.0 {
            return SpherePoint::Infinity;
        }
        let z = x / y;
        if z.is_nan() || z.is_infinite() {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite(z)
        }
    }

    /// Chordal distance, in `[0, 2]`.
    pub fn chordal(&self, other: &SpherePoint) -> f64 {
        let (x1, y1) = self.to_projective();
        let (x2, y2) = other.to_projective();
        let n1 = (x1.norm_sqr() + y1.norm_sqr()).sqrt();
        let n2 = (x2.norm_sqr() + y2.norm_sqr()).sqrt();
        2.0 * (x1 * y2 - x2 * y1).norm() / (n1 * n2)
    }

    pub fn approx_eq(&self, other: &SpherePoint, tol: f64) -> bool {
        self.chordal(other) <= tol
    }

    /// `-z`, with infinity fixed.
    pub fn neg(&self) -> SpherePoint {
        match *self {
            SpherePoint::Finite(z) => SpherePoint::Finite(-z),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }

    /// Lexicographic order on `(Re, Im)` with infinity last. Real parts that
    /// agree to rounding level count as equal.
    pub fn lex_cmp(&self, other: &SpherePoint) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => Ordering::Equal,
            (SpherePoint::Infinity, _) => Ordering::Greater,
            (_, SpherePoint::Infinity) => Ordering::Less,
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
                let slack = 1e-12 * (1.0 + a.norm() + b.norm());
                if (a.re - b.re).abs() <= slack {
                    a.im.total_cmp(&b.im)
                } else {
                    a.re.total_cmp(&b.re)
                }
            }
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::finite(z)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            SpherePoint::Infinity => write!(f, "inf"),
        }
    }
}

// Serialized as `[re, im]`, or `null` for infinity.
impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_complex().map(|z| [z.re, z.im]).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Option<[f64; 2]> = Option::deserialize(d)?;
        match v {
            None => Ok(SpherePoint::Infinity),
            Some([re, im]) if re.is_nan() || im.is_nan() => {
                Err(serde::de::Error::custom("NaN coordinate"))
            }
            Some([re, im]) => Ok(SpherePoint::new(re, im)),
        }
    }
}
