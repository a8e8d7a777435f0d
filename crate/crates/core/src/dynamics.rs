//! Escape-time dynamics of polynomials, connectedness loci, Green's function
//! and the inverse Böttcher coordinate.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{quadratic_roots, Polynomial};
use crate::error::{Error, Result};
use crate::tol;

type C = Complex64;

/// Orbits beyond this modulus are treated as asymptotically `z^d`.
const GREEN_BAILOUT: f64 = 1e16;

/// Modulus from which the inverse Böttcher coordinate is approximated by
/// the identity.
const BOTTCHER_RADIUS: f64 = 1e8;

/// Continuation substeps per pullback level.
const SUBSTEPS: usize = 12;

pub const DEFAULT_MAX_ITER: usize = 1000;
pub const DEFAULT_DEPTH: usize = 24;

/// A one-parameter family of polynomials, or a single polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `z^d + c`.
    Unicritical { d: usize },
    /// `z³ + az² + z`.
    ParabolicCubic,
    /// A fixed polynomial; the parameter is ignored.
    Fixed { poly: Polynomial },
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FamilySpec::Unicritical { d } if *d < 2 => {
                Err(Error::DegenerateParams("unicritical degree must be at least 2".into()))
            }
            FamilySpec::Fixed { poly } if poly.degree() < 2 => {
                Err(Error::DegenerateParams("polynomial degree must be at least 2".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            FamilySpec::Unicritical { d } => *d,
            FamilySpec::ParabolicCubic => 3,
            FamilySpec::Fixed { poly } => poly.degree(),
        }
    }

    pub fn polynomial(&self, lambda: C) -> Result<Polynomial> {
        self.validate()?;
        let one = C::new(1.0, 0.0);
        let zero = C::new(0.0, 0.0);
        Ok(match self {
            FamilySpec::Unicritical { d } => {
                let mut coeffs = vec![zero; d + 1];
                coeffs[0] = lambda;
                coeffs[*d] = one;
                Polynomial::new(coeffs)
            }
            FamilySpec::ParabolicCubic => Polynomial::new(vec![zero, one, lambda, one]),
            FamilySpec::Fixed { poly } => poly.clone(),
        })
    }

    /// Finite critical points of the member at `lambda`, with multiplicity.
    pub fn critical_points(&self, lambda: C) -> Result<Vec<C>> {
        match self {
            FamilySpec::Unicritical { d } => {
                self.validate()?;
                Ok(vec![C::new(0.0, 0.0); d - 1])
            }
            FamilySpec::ParabolicCubic => {
                let (r1, r2) = quadratic_roots(C::new(3.0, 0.0), 2.0 * lambda, C::new(1.0, 0.0));
                Ok(vec![r1, r2])
            }
            FamilySpec::Fixed { poly } => critical_points(poly),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EscapeStatus {
    Bounded,
    /// First orbit index whose modulus exceeds the escape radius.
    Escaped(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EscapeResult {
    pub status: EscapeStatus,
    pub last_point: C,
}

impl EscapeResult {
    pub fn escaped(&self) -> bool {
        matches!(self.status, EscapeStatus::Escaped(_))
    }
}

/// `max(2, (1 + Σ_{k<n} |c_k|) / |c_n|)`. Beyond this radius `|f(z)| > |z|`
/// and orbits tend to infinity.
pub fn escape_radius(f: &Polynomial) -> f64 {
    let n = f.degree();
    let lower: f64 = f.coeffs()[..n].iter().map(|c| c.norm()).sum();
    ((1.0 + lower) / f.leading().norm()).max(2.0)
}

pub fn escape_time(f: &Polynomial, z0: C, max_iter: usize, radius: Option<f64>) -> EscapeResult {
    let r = radius.unwrap_or_else(|| escape_radius(f));
    let mut z = z0;
    for n in 0..=max_iter {
        if z.norm() > r {
            return EscapeResult {
                status: EscapeStatus::Escaped(n),
                last_point: z,
            };
        }
        if n < max_iter {
            z = f.eval(z);
        }
    }
    EscapeResult {
        status: EscapeStatus::Bounded,
        last_point: z,
    }
}

/// Roots of `f'` with multiplicity.
pub fn critical_points(f: &Polynomial) -> Result<Vec<C>> {
    if f.degree() < 2 {
        return Err(Error::DegenerateParams("polynomial degree must be at least 2".into()));
    }
    f.derivative().roots(tol::ALGEBRAIC)
}

/// Whether every finite critical orbit of the member at `lambda` stays
/// bounded for `max_iter` steps.
pub fn in_connectedness_locus(
    family: &FamilySpec,
    lambda: C,
    max_iter: usize,
    radius: Option<f64>,
) -> Result<bool> {
    let f = family.polynomial(lambda)?;
    let r = radius.unwrap_or_else(|| escape_radius(&f));
    let crit = family.critical_points(lambda)?;
    Ok(crit
        .iter()
        .all(|&c| !escape_time(&f, c, max_iter, Some(r)).escaped()))
}

/// Affine change of coordinates `h(z) = αz + β` and the conjugate
/// `g = h ∘ f ∘ h⁻¹`, which is monic with vanishing subleading coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicCentered {
    pub g: Polynomial,
    pub alpha: C,
    pub beta: C,
}

impl MonicCentered {
    pub fn new(f: &Polynomial) -> Result<Self> {
        let d = f.degree();
        if d < 2 {
            return Err(Error::DegenerateParams("polynomial degree must be at least 2".into()));
        }
        let lead = f.leading();
        let alpha = lead.powf(1.0 / (d - 1) as f64);
        let beta = alpha * f.coeffs()[d - 1] / (d as f64 * lead);
        let h_inv = Polynomial::new(vec![-beta / alpha, C::new(1.0, 0.0) / alpha]);
        let mut coeffs = f.compose(&h_inv).scale(alpha).coeffs().to_vec();
        coeffs[0] += beta;
        coeffs[d] = C::new(1.0, 0.0);
        coeffs[d - 1] = C::new(0.0, 0.0);
        Ok(Self {
            g: Polynomial::new(coeffs),
            alpha,
            beta,
        })
    }

    pub fn to_normal(&self, z: C) -> C {
        self.alpha * z + self.beta
    }

    pub fn from_normal(&self, w: C) -> C {
        (w - self.beta) / self.alpha
    }

    /// Green's function of the original map at `z`.
    pub fn green(&self, z: C, max_iter: usize, radius: Option<f64>) -> f64 {
        green_normal(&self.g, self.to_normal(z), max_iter, radius)
    }
}

/// `lim d⁻ⁿ log|fⁿ(z)|`, zero for points whose orbit stays within the escape
/// radius for `max_iter` steps.
pub fn green_function(f: &Polynomial, z: C, max_iter: usize, radius: Option<f64>) -> Result<f64> {
    Ok(MonicCentered::new(f)?.green(z, max_iter, radius))
}

fn green_normal(g: &Polynomial, w0: C, max_iter: usize, radius: Option<f64>) -> f64 {
    let d = g.degree() as f64;
    let r = radius.unwrap_or_else(|| escape_radius(g));
    let mut w = w0;
    let mut scale = 1.0;
    let mut n = 0;
    while w.norm() <= GREEN_BAILOUT {
        if n >= max_iter && w.norm() <= r {
            return 0.0;
        }
        w = g.eval(w);
        scale /= d;
        n += 1;
    }
    scale * w.norm().ln()
}

/// `(g^n(z), (g^n)'(z))`.
fn iterate_with_derivative(g: &Polynomial, z: C, n: usize) -> (C, C) {
    let mut w = z;
    let mut dw = C::new(1.0, 0.0);
    for _ in 0..n {
        let (v, dv) = g.eval_with_derivative(w);
        dw *= dv;
        w = v;
    }
    (w, dw)
}

fn newton_iterate(g: &Polynomial, n: usize, target: C, start: C) -> Result<C> {
    let mut z = start;
    for _ in 0..60 {
        let (w, dw) = iterate_with_derivative(g, z, n);
        if dw.norm() == 0.0 || !dw.is_finite() || !w.is_finite() {
            break;
        }
        let step = (w - target) / dw;
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence {
        iterations: 60,
        partial: vec![z],
    })
}

/// `frac(d^n x)`, computed one multiplication at a time.
fn angle_multiple(x: f64, d: usize, n: usize) -> f64 {
    (0..n).fold(x.rem_euclid(1.0), |a, _| (a * d as f64).rem_euclid(1.0))
}

fn is_monomial(g: &Polynomial) -> bool {
    let d = g.degree();
    g.coeffs()[..d].iter().all(|c| *c == C::new(0.0, 0.0))
}

/// Largest Green's function value over the finite critical points.
fn critical_potential(g: &Polynomial) -> Result<f64> {
    Ok(critical_points(g)?
        .into_iter()
        .map(|c| green_normal(g, c, DEFAULT_MAX_ITER, None))
        .fold(0.0, f64::max))
}

/// Fails with `BranchAmbiguity` if some point of the orbit `z, g(z), ...,
/// g^{n-1}(z)` has another `g`-preimage of its image within `1e-9`.
fn check_branch_separation(g: &Polynomial, z: C, n: usize) -> Result<()> {
    let mut y = z;
    for _ in 0..n {
        let image = g.eval(y);
        let fiber = g.sub(&Polynomial::constant(image)).deflate(y).0;
        if fiber.degree() > 0 {
            let separation = fiber
                .roots(tol::ALGEBRAIC)
                .map(|rs| rs.iter().map(|r| (r - y).norm()).fold(f64::INFINITY, f64::min))
                .unwrap_or(0.0);
            if separation < 1e-9 {
                return Err(Error::BranchAmbiguity { separation });
            }
        }
        y = image;
    }
    Ok(())
}

/// Approximates `φ⁻¹(t e^{iθ})` for the Böttcher coordinate `φ` of `f`
/// (normalized by the monic-centered conjugate).
///
/// The point is followed down the external ray of angle `θ` from a large
/// radius. At each stage the equation `gⁿ(z) = (r e^{iθ})^{dⁿ}` is solved by
/// Newton's method from the previous solution, with `n` chosen so that the
/// right-hand side stays at modulus at least `1e8`, where `φ` is the identity
/// to working precision. At most `depth` pullback levels are used.
pub fn bottcher_equipotential_point(f: &Polynomial, t: f64, theta: f64, depth: usize) -> Result<C> {
    if !(t > 1.0) {
        return Err(Error::DegenerateParams("equipotential level must exceed 1".into()));
    }
    let mc = MonicCentered::new(f)?;
    let g = &mc.g;
    let d = g.degree();
    if is_monomial(g) {
        return Ok(mc.from_normal(C::from_polar(t, theta)));
    }
    if t.ln() <= critical_potential(g)? {
        return Err(Error::Disconnected);
    }
    let x = (theta / TAU).rem_euclid(1.0);
    let ln_d = (d as f64).ln();
    let l_start = BOTTCHER_RADIUS.ln().ln();
    let l_end = t.ln().ln();
    let mut z = C::from_polar(BOTTCHER_RADIUS.max(t), TAU * x);
    let mut n = 0;
    if l_end < l_start {
        let steps = ((l_start - l_end) / ln_d * SUBSTEPS as f64).ceil() as usize;
        for k in 1..=steps {
            let l = if k == steps {
                l_end
            } else {
                l_start - (l_start - l_end) * k as f64 / steps as f64
            };
            n = (((l_start - l) / ln_d).ceil() as usize).min(depth);
            let modulus = ((d as f64).powi(n as i32) * l.exp()).exp();
            let target = C::from_polar(modulus, TAU * angle_multiple(x, d, n));
            z = newton_iterate(g, n, target, z)?;
        }
    }
    check_branch_separation(g, z, n)?;
    Ok(mc.from_normal(z))
}

/// Sampled equipotentials `G = log t` (inner) and `G = d log t` (outer) at
/// the angles `2πi/n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusSample {
    pub t: f64,
    pub d: usize,
    pub inner_boundary: Vec<C>,
    pub outer_boundary: Vec<C>,
}

impl AnnulusSample {
    /// `max_i |f(inner_i) - outer_{d·i mod n}|`: how well `f` maps the inner
    /// boundary onto the outer one as a `d`-fold cover.
    pub fn covering_residual(&self, f: &Polynomial) -> f64 {
        let n = self.inner_boundary.len();
        self.inner_boundary
            .iter()
            .enumerate()
            .map(|(i, z)| (f.eval(*z) - self.outer_boundary[(self.d * i) % n]).norm())
            .fold(0.0, f64::max)
    }
}

pub fn fundamental_annulus(f: &Polynomial, t: f64, n_points: usize, depth: usize) -> Result<AnnulusSample> {
    let d = f.degree();
    let outer_t = t.powi(d as i32);
    let mut inner = Vec::with_capacity(n_points);
    let mut outer = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let theta = TAU * i as f64 / n_points as f64;
        inner.push(bottcher_equipotential_point(f, t, theta, depth)?);
        outer.push(bottcher_equipotential_point(f, outer_t, theta, depth)?);
    }
    Ok(AnnulusSample {
        t,
        d,
        inner_boundary: inner,
        outer_boundary: outer,
    })
}

/// The canonical orientation-reversing involution of the outer boundary:
/// `φ⁻¹(t^d e^{iθ}) ↦ φ⁻¹(t^d e^{-iθ})`.
pub fn boundary_involution_j(f: &Polynomial, t: f64, theta: f64) -> Result<C> {
    bottcher_equipotential_point(f, t.powi(f.degree() as i32), -theta, DEFAULT_DEPTH)
}
