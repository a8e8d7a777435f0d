//! Correspondences `J ∘ Cov₀^q` and the structural checks they satisfy.
//!
//! A correspondence is kept as the pair `(J, q)`; images are computed by
//! solving `q(w) = q(z)` with the diagonal copy `w = z` divided out, then
//! applying `J`. Image lists keep multiplicity, so at critical values a point
//! appears as many times as it is a root.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{cov0_equation, MobiusMap, Polynomial, RationalMap, SpherePoint};
use crate::error::{Error, Result};
use crate::sampling;
use crate::tol;

type C = Complex64;

/// Radius of the disk from which structural checks draw sample points.
pub const SAMPLE_RADIUS: f64 = 2.5;

/// Relative size of `E(z)` below which `z` counts as a root of the deflated
/// equation `E` (i.e. `z` is critical and belongs to its own image).
const SELF_ROOT: f64 = 1e-10;

/// Rotation of the sphere sending `1 -> ∞`, used to move infinite inputs
/// into a finite chart.
fn chart_rotation() -> MobiusMap {
    MobiusMap::from_real(1.0, 1.0, -1.0, 1.0).expect("nonsingular")
}

/// A relation on the sphere with computable images and preimages.
pub trait Correspondence {
    fn forward_image(&self, z: SpherePoint) -> Result<Vec<SpherePoint>>;
    fn backward_image(&self, w: SpherePoint) -> Result<Vec<SpherePoint>>;
    /// The involution expected to conjugate the relation with its inverse.
    fn involution(&self) -> MobiusMap;
}

fn cov0_image_finite(q: &RationalMap, z: C) -> Result<Vec<SpherePoint>> {
    let mut eq = cov0_equation(q, SpherePoint::Finite(z))?;
    let mut out = Vec::with_capacity(q.degree() - 1);
    while eq.degree() > 0 && eq.eval(z).norm() <= SELF_ROOT * eq.eval_scale(z) {
        out.push(SpherePoint::Finite(z));
        eq = eq.deflate(z).0;
    }
    if eq.degree() > 0 {
        out.extend(eq.roots(tol::ALGEBRAIC)?.into_iter().map(SpherePoint::finite));
    }
    // Roots lost to a drop in degree sit at infinity.
    out.resize(q.degree() - 1, SpherePoint::Infinity);
    Ok(out)
}

/// Deleted-covering image: every `w` with `q(w) = q(z)`, minus one copy of
/// `z`, listed with multiplicity (`deg q - 1` points).
pub fn cov0_image(q: &RationalMap, z: SpherePoint) -> Result<Vec<SpherePoint>> {
    match z {
        SpherePoint::Finite(v) if v.norm() <= tol::CHART_SWAP => cov0_image_finite(q, v),
        _ => {
            let phi = chart_rotation();
            let q_chart = q.compose_mobius(&phi)?;
            cov0_image_chart(&q_chart, &phi, z)
        }
    }
}

fn cov0_image_chart(q_chart: &RationalMap, phi: &MobiusMap, z: SpherePoint) -> Result<Vec<SpherePoint>> {
    let zeta = phi.inverse().apply(z).as_complex().ok_or(Error::InfiniteInput)?;
    Ok(cov0_image_finite(q_chart, zeta)?
        .into_iter()
        .map(|w| phi.apply(w))
        .collect())
}

/// Clusters of nearby roots merged into `(mean, count)`.
fn cluster_roots(roots: &[C]) -> Vec<(C, usize)> {
    let mut clusters: Vec<(C, usize)> = Vec::new();
    for &r in roots {
        match clusters
            .iter_mut()
            .find(|(c, n)| (*c / *n as f64 - r).norm() <= tol::CLUSTER * (1.0 + r.norm()))
        {
            Some((sum, n)) => {
                *sum += r;
                *n += 1;
            }
            None => clusters.push((r, 1)),
        }
    }
    clusters.into_iter().map(|(s, n)| (s / n as f64, n)).collect()
}

/// Relative size below which `p, p', …` count as vanishing at a candidate
/// multiple root.
const MULTIPLE_ROOT_TOL: f64 = 1e-12;
/// Largest relative size of the non-constant terms dropped from the
/// denominator of the polynomial normal form.
const NORMAL_FORM_TOL: f64 = 1e-8;

/// Whether `c` is a root of multiplicity `k`, given all derivatives of `p`.
///
/// Either the terms of order below `k` of the Taylor expansion at `c` vanish
/// to rounding, or at radius `1e-3 (1 + |c|)` each of them is below `1e-3` of
/// the largest term of order `k` or more. The second test tolerates the
/// error in `c` when `p^{(k)}(c)` is itself small.
fn is_multiple_root(derivs: &[Polynomial], c: C, k: usize) -> bool {
    let r = 1e-3 * (1.0 + c.norm());
    let mut factorial = 1.0;
    let terms: Vec<f64> = derivs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            if i > 0 {
                factorial *= i as f64;
            }
            g.eval(c).norm() * r.powi(i as i32) / factorial
        })
        .collect();
    let top = terms[k..].iter().copied().fold(0.0, f64::max);
    (0..k).all(|j| {
        derivs[j].eval(c).norm() <= MULTIPLE_ROOT_TOL * derivs[j].eval_scale(c) || terms[j] <= 1e-3 * top
    })
}

fn newton_polish(p: &Polynomial, z0: C) -> C {
    let mut z = z0;
    for _ in 0..8 {
        let (v, dv) = p.eval_with_derivative(z);
        if dv.norm() == 0.0 {
            break;
        }
        let step = v / dv;
        z -= step;
        if step.norm() <= 1e-17 * (1.0 + z.norm()) {
            break;
        }
    }
    if z.is_finite() {
        z
    } else {
        z0
    }
}

/// Roots of `p` of multiplicity at least two, and `p` with them divided out.
///
/// A `k`-fold root comes back from the root finder as `k` points about
/// `ε^{1/k}` apart, but it is a simple root of `p^{(k-1)}`. Candidates are
/// taken from the roots of the derivatives, highest order first, and kept
/// when all lower derivatives vanish there as well.
fn split_multiple_roots(p: &Polynomial) -> Result<(Vec<(C, usize)>, Polynomial)> {
    let mut found = Vec::new();
    let mut rest = p.clone();
    'search: while rest.degree() >= 2 {
        let mut derivs = vec![rest.clone()];
        for _ in 0..rest.degree() {
            let next = derivs[derivs.len() - 1].derivative();
            derivs.push(next);
        }
        for m in (1..rest.degree()).rev() {
            for c in derivs[m].roots(tol::ALGEBRAIC)? {
                let c = newton_polish(&derivs[m], c);
                if is_multiple_root(&derivs, c, m + 1) {
                    for _ in 0..=m {
                        rest = rest.deflate(c).0;
                    }
                    found.push((c, m + 1));
                    continue 'search;
                }
            }
        }
        break;
    }
    Ok((found, rest))
}

/// A root of multiplicity `m` is a simple root of the `(m-1)`-th
/// derivative; a few Newton steps there recover full precision.
fn polish_multiple_root(p: &Polynomial, z0: C, m: usize, radius: f64) -> C {
    if m < 2 {
        return z0;
    }
    let mut g = p.clone();
    for _ in 1..m {
        g = g.derivative();
    }
    let z = newton_polish(&g, z0);
    if (z - z0).norm() <= radius {
        z
    } else {
        z0
    }
}

/// Critical points of a rational map with multiplicities: the roots of
/// `P'D - PD'`, plus infinity when that polynomial falls short of the
/// `2 deg q - 2` total.
pub fn critical_points(q: &RationalMap) -> Result<Vec<(SpherePoint, usize)>> {
    let w = q.derivative_numerator();
    let mut out: Vec<(SpherePoint, usize)> = Vec::new();
    if w.degree() > 0 {
        let (multiple, rest) = split_multiple_roots(&w)?;
        out.extend(multiple.into_iter().map(|(c, k)| (SpherePoint::Finite(c), k)));
        if rest.degree() > 0 {
            for (c, n) in cluster_roots(&rest.roots(tol::ALGEBRAIC)?) {
                let radius = tol::CLUSTER * (1.0 + c.norm());
                out.push((SpherePoint::Finite(polish_multiple_root(&w, c, n, radius)), n));
            }
        }
    }
    let total = 2 * q.degree() - 2;
    if w.degree() < total {
        out.push((SpherePoint::Infinity, total - w.degree()));
    }
    out.sort_by(|a, b| a.0.lex_cmp(&b.0));
    Ok(out)
}

/// A point `p` with `q⁻¹(q(p)) = {p}`: a critical point of multiplicity
/// `deg q - 1`, where `q` has local degree `deg q`.
fn find_totally_invariant(q: &RationalMap) -> Result<Option<SpherePoint>> {
    if q.is_polynomial() {
        return Ok(Some(SpherePoint::Infinity));
    }
    let d = q.degree() - 1;
    Ok(critical_points(q)?.into_iter().find(|&(_, mult)| mult == d).map(|(p, _)| p))
}

/// The `d:d` correspondence `J ∘ Cov₀^q` with `J` an involution and `q` of
/// degree `d + 1` conjugate to a polynomial.
#[derive(Debug, Clone)]
pub struct JCovCorrespondence {
    j: MobiusMap,
    q: RationalMap,
    d: usize,
    invariant_point: SpherePoint,
    /// `(ψ, q̃)` where `ψ(∞)` is the totally invariant point and `q̃` the
    /// polynomial `L ∘ q ∘ ψ` for a Möbius `L`. The fibres of `q` are the
    /// `ψ`-images of the fibres of `q̃`, which are computed more accurately.
    normal: (MobiusMap, RationalMap),
    normal_chart: RationalMap,
}

impl JCovCorrespondence {
    pub fn new(j: MobiusMap, q: RationalMap) -> Result<Self> {
        if !j.compose(&j).is_identity(tol::CHORDAL) {
            return Err(Error::InvalidCorrespondence("J is not an involution".into()));
        }
        if q.degree() < 2 {
            return Err(Error::InvalidCorrespondence("q must have degree at least 2".into()));
        }
        let invariant_point = find_totally_invariant(&q)?.ok_or_else(|| {
            Error::InvalidCorrespondence("q has no totally invariant point".into())
        })?;
        let normal = polynomial_normal_form(&q, invariant_point)?;
        let normal_chart = normal.1.compose_mobius(&chart_rotation())?;
        Ok(Self {
            j,
            d: q.degree() - 1,
            q,
            invariant_point,
            normal,
            normal_chart,
        })
    }

    /// `Cov₀^q` itself (`J` the identity).
    pub fn deleted_covering(q: RationalMap) -> Result<Self> {
        Self::new(MobiusMap::identity(), q)
    }

    pub fn j(&self) -> &MobiusMap {
        &self.j
    }

    pub fn q(&self) -> &RationalMap {
        &self.q
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn totally_invariant_point(&self) -> SpherePoint {
        self.invariant_point
    }

    pub fn cov0(&self, z: SpherePoint) -> Result<Vec<SpherePoint>> {
        let (psi, q) = &self.normal;
        let images = match psi.inverse().apply(z) {
            SpherePoint::Finite(v) if v.norm() <= tol::CHART_SWAP => cov0_image_finite(q, v)?,
            u => cov0_image_chart(&self.normal_chart, &chart_rotation(), u)?,
        };
        Ok(images.into_iter().map(|w| psi.apply(w)).collect())
    }

    /// `φ⁻¹ ∘ F ∘ φ = (φ⁻¹ J φ) ∘ Cov₀^{q∘φ}`.
    pub fn conjugate(&self, phi: &MobiusMap) -> Result<Self> {
        Self::new(self.j.conjugate_by(phi), self.q.compose_mobius(phi)?)
    }

    pub fn critical_points_of_q(&self) -> Result<Vec<(SpherePoint, usize)>> {
        critical_points(&self.q)
    }
}

/// Moves the totally invariant point `p` to infinity and the value `q(p)`
/// to infinity, which turns `q` into a polynomial. The identity chart is
/// kept when `p` is already infinite, and whenever rounding leaves a
/// denominator that is not numerically constant.
fn polynomial_normal_form(q: &RationalMap, p: SpherePoint) -> Result<(MobiusMap, RationalMap)> {
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let identity = || Ok((MobiusMap::identity(), q.clone()));
    let SpherePoint::Finite(c) = p else {
        return identity();
    };
    let psi = MobiusMap::new(c, one, one, zero)?;
    let r = q.compose_mobius(&psi)?;
    // Homogeneous value [a : b] of q at p, normalized so the Möbius map
    // (N : D) ↦ (ā N + b̄ D : b N − a D) has determinant −1.
    let (a, b) = q.eval_projective(p);
    let s = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / s, b / s);
    let num = r.num().scale(a.conj()).add(&r.den().scale(b.conj()));
    let den = r.num().scale(b).sub(&r.den().scale(a));
    let lead = den.coeffs()[0];
    let tail = den.coeffs()[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    if lead.norm() == 0.0 || tail > NORMAL_FORM_TOL * lead.norm() {
        return identity();
    }
    Ok((psi, RationalMap::polynomial(num.scale(lead.inv()))?))
}

impl Correspondence for JCovCorrespondence {
    fn forward_image(&self, z: SpherePoint) -> Result<Vec<SpherePoint>> {
        Ok(self.cov0(z)?.into_iter().map(|w| self.j.apply(w)).collect())
    }

    fn backward_image(&self, w: SpherePoint) -> Result<Vec<SpherePoint>> {
        self.cov0(self.j.apply(w))
    }

    fn involution(&self) -> MobiusMap {
        self.j
    }
}

/// Graph of a single Möbius map, paired with a candidate involution. Used as
/// a control: such a relation is generally not time-reversible.
#[derive(Debug, Clone)]
pub struct MobiusGraph {
    pub map: MobiusMap,
    pub involution: MobiusMap,
}

impl Correspondence for MobiusGraph {
    fn forward_image(&self, z: SpherePoint) -> Result<Vec<SpherePoint>> {
        Ok(vec![self.map.apply(z)])
    }

    fn backward_image(&self, w: SpherePoint) -> Result<Vec<SpherePoint>> {
        Ok(vec![self.map.inverse().apply(w)])
    }

    fn involution(&self) -> MobiusMap {
        self.involution
    }
}

/// Distance from `w` to the nearest point of a list (2, the sphere's
/// diameter, when the list is empty).
pub fn distance_to_set(w: &SpherePoint, set: &[SpherePoint]) -> f64 {
    set.iter().map(|p| p.chordal(w)).fold(2.0, f64::min)
}

/// Chordal distance from `w` to the nearest point of `F(z)`.
pub fn membership_residual<F: Correspondence + ?Sized>(
    f: &F,
    z: SpherePoint,
    w: SpherePoint,
) -> Result<f64> {
    Ok(distance_to_set(&w, &f.forward_image(z)?))
}

fn sample_points(n: usize, seed: u64) -> Vec<SpherePoint> {
    sampling::disk_points(n, SAMPLE_RADIUS, seed)
        .into_iter()
        .map(SpherePoint::Finite)
        .collect()
}

/// Count of distinct points (chordal `1e-9`) in a list.
fn distinct_count(points: &[SpherePoint]) -> usize {
    let mut seen: Vec<SpherePoint> = Vec::new();
    for p in points {
        if seen.iter().all(|s| s.chordal(p) > 1e-9) {
            seen.push(*p);
        }
    }
    seen.len()
}

fn mode(values: &[usize]) -> usize {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &v in values {
        *counts.entry(v).or_default() += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(v, _)| v)
        .unwrap_or(0)
}

/// `(d₁, d₂)`: modal number of distinct preimages and images over sampled
/// points.
pub fn bidegree_check<F: Correspondence + ?Sized>(
    f: &F,
    n_samples: usize,
    seed: u64,
) -> Result<(usize, usize)> {
    let mut forward = Vec::with_capacity(n_samples);
    let mut backward = Vec::with_capacity(n_samples);
    for z in sample_points(n_samples.max(1), seed) {
        forward.push(distinct_count(&f.forward_image(z)?));
        backward.push(distinct_count(&f.backward_image(z)?));
    }
    Ok((mode(&backward), mode(&forward)))
}

/// Largest residual of `(J(w), J(z)) ∈ F` over sampled `z` and `w ∈ F(z)`.
pub fn time_reversal_check<F: Correspondence + ?Sized>(
    f: &F,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    let j = f.involution();
    let mut worst: f64 = 0.0;
    for z in sample_points(n_samples, seed) {
        for w in f.forward_image(z)? {
            worst = worst.max(membership_residual(f, j.apply(w), j.apply(z))?);
        }
    }
    Ok(worst)
}

/// Largest duality residual: for sampled `z` and `w ∈ F(z)`, distance from
/// `z` to `F⁻¹(w)`.
pub fn duality_check<F: Correspondence + ?Sized>(f: &F, n_samples: usize, seed: u64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in sample_points(n_samples, seed) {
        for w in f.forward_image(z)? {
            worst = worst.max(distance_to_set(&z, &f.backward_image(w)?));
        }
    }
    Ok(worst)
}

fn covering_image(q: &RationalMap, z: SpherePoint, include_diagonal: bool) -> Result<Vec<SpherePoint>> {
    let mut image = cov0_image(q, z)?;
    if include_diagonal {
        image.push(z);
    }
    Ok(image)
}

/// Reflexivity, symmetry and transitivity residual of `Cov₀^q` (with or
/// without the diagonal) over sampled points.
pub fn equivalence_relation_residual(
    q: &RationalMap,
    n_samples: usize,
    seed: u64,
    include_diagonal: bool,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in sample_points(n_samples, seed) {
        let first = covering_image(q, z, include_diagonal)?;
        worst = worst.max(distance_to_set(&z, &first));
        for w in &first {
            let second = covering_image(q, *w, include_diagonal)?;
            worst = worst.max(distance_to_set(&z, &second));
            for v in &second {
                worst = worst.max(distance_to_set(v, &first));
            }
        }
    }
    Ok(worst)
}

/// Checks that `Cov^q = Cov₀^q ∪ Diag` is an equivalence relation.
pub fn equivalence_relation_check(q: &RationalMap, n_samples: usize, seed: u64) -> Result<f64> {
    equivalence_relation_residual(q, n_samples, seed, true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitNode {
    pub point: SpherePoint,
    /// Number of branch paths from the root reaching this node.
    pub multiplicity: usize,
    /// Index into the previous level.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitTree {
    pub root: SpherePoint,
    pub levels: Vec<Vec<OrbitNode>>,
    pub truncated: bool,
}

impl OrbitTree {
    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Depth actually reached (levels past the root).
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }
}

/// Breadth-first forward orbit, merging nodes within chordal `1e-12` on each
/// level. Stops adding nodes once `max_nodes` is reached.
pub fn orbit_tree<F: Correspondence + ?Sized>(
    f: &F,
    z: SpherePoint,
    depth: usize,
    max_nodes: usize,
) -> Result<OrbitTree> {
    orbit_tree_within(f, z, depth, max_nodes, |_| true)
}

/// As [`orbit_tree`], but only points satisfying `keep` are expanded or
/// recorded. An empty level ends the tree.
pub fn orbit_tree_within<F, K>(
    f: &F,
    z: SpherePoint,
    depth: usize,
    max_nodes: usize,
    keep: K,
) -> Result<OrbitTree>
where
    F: Correspondence + ?Sized,
    K: Fn(&SpherePoint) -> bool,
{
    let mut tree = OrbitTree {
        root: z,
        levels: vec![vec![OrbitNode {
            point: z,
            multiplicity: 1,
            parent: None,
        }]],
        truncated: false,
    };
    let mut count = 1;
    for _ in 0..depth {
        let prev = tree.levels.last().unwrap();
        let mut next: Vec<OrbitNode> = Vec::new();
        'expand: for (pi, node) in prev.iter().enumerate() {
            for w in f.forward_image(node.point)? {
                if !keep(&w) {
                    continue;
                }
                if let Some(existing) = next.iter_mut().find(|n| n.point.chordal(&w) <= 1e-12) {
                    existing.multiplicity += node.multiplicity;
                    continue;
                }
                if count >= max_nodes {
                    tree.truncated = true;
                    break 'expand;
                }
                count += 1;
                next.push(OrbitNode {
                    point: w,
                    multiplicity: node.multiplicity,
                    parent: Some(pi),
                });
            }
        }
        if next.is_empty() {
            break;
        }
        tree.levels.push(next);
    }
    Ok(tree)
}

/// Parameters `(a, k)` of the family
/// `M(z)² + M(z)M(-w) + M(-w)² = 3k` with `M(z) = (az + 1)/(z + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatingFamilyParams {
    pub a: C,
    pub k: C,
}

impl MatingFamilyParams {
    /// The parameters of the example quadratic mating with a representation
    /// of `H₃`.
    pub fn figure_example() -> Self {
        Self {
            a: C::new(4.53926, 0.439437),
            k: C::new(0.9, 0.1),
        }
    }

    /// `M(z) = (az + 1)/(z + 1)`.
    pub fn coordinate_map(&self) -> Result<MobiusMap> {
        if (self.a - 1.0).norm() < 1e-12 || (self.a + 1.0).norm() < 1e-12 {
            return Err(Error::DegenerateParams("a must differ from ±1".into()));
        }
        MobiusMap::new(self.a, C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0))
            .map_err(|_| Error::DegenerateParams("singular coordinate map".into()))
    }

    /// `|M(z)² + M(z)N(w) + N(w)² - 3k|` with `N(w) = (aw - 1)/(w - 1)`,
    /// evaluated directly from the defining relation. Infinite when either
    /// coordinate is a pole.
    pub fn relation_residual(&self, z: SpherePoint, w: SpherePoint) -> f64 {
        let m = |x: C| (self.a * x + 1.0) / (x + 1.0);
        let n = |x: C| (self.a * x - 1.0) / (x - 1.0);
        let (Some(z), Some(w)) = (z.as_complex(), w.as_complex()) else {
            return f64::INFINITY;
        };
        let (u, v) = (m(z), n(w));
        let r = (u * u + u * v + v * v - 3.0 * self.k).norm();
        if r.is_finite() {
            r
        } else {
            f64::INFINITY
        }
    }
}

/// `J(z) = -z` and `q = Q ∘ M` with `Q(t) = t³ - 3kt`.
pub fn mating_family(params: &MatingFamilyParams) -> Result<JCovCorrespondence> {
    let m = params.coordinate_map()?;
    let zero = C::new(0.0, 0.0);
    let cubic = Polynomial::new(vec![zero, -3.0 * params.k, zero, C::new(1.0, 0.0)]);
    let q = RationalMap::polynomial(cubic)?.compose_mobius(&m)?;
    JCovCorrespondence::new(MobiusMap::negation(), q)
}
