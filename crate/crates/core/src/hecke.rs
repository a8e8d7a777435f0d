//! Representations of the Hecke group `H_{d+1} = C₂ ∗ C_{d+1}` into
//! `PSL(2, ℂ)`, parametrized by the cross-ratio of the generators' fixed
//! points.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{cross_ratio, MobiusMap, SpherePoint};
use crate::error::{Error, Result};
use crate::sampling;
use crate::tol;

type C = Complex64;

/// Residual allowed in the defining relations of a representation.
pub const RELATION_TOL: f64 = 1e-9;

/// `|tr² - 4|` below which an element is flagged as nearly parabolic.
pub const PARABOLIC_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeckeParams {
    pub d: usize,
    pub kappa: C,
}

impl HeckeParams {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::DegenerateParams("d must be at least 2".into()));
        }
        if !self.kappa.is_finite() || self.kappa.norm() < 1e-12 || (self.kappa - 1.0).norm() < 1e-12 {
            return Err(Error::DegenerateParams("cross-ratio must avoid 0, 1 and ∞".into()));
        }
        Ok(())
    }
}

/// Generators `ρ` (order `d+1`), `σ` (order 2), the involution `χ`
/// anti-commuting with both, and the fixed points of `ρ`, `σ`, `χρ`, `χσ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeckeRep {
    pub d: usize,
    pub rho: MobiusMap,
    pub sigma: MobiusMap,
    pub chi: MobiusMap,
    pub p: SpherePoint,
    pub p_prime: SpherePoint,
    pub q: SpherePoint,
    pub q_prime: SpherePoint,
    pub r: SpherePoint,
    pub r_prime: SpherePoint,
    pub s: SpherePoint,
    pub s_prime: SpherePoint,
}

impl HeckeRep {
    pub fn from_generators(d: usize, rho: MobiusMap, sigma: MobiusMap) -> Result<Self> {
        let (p, p_prime) = rho.fixed_points()?;
        let (q, q_prime) = sigma.fixed_points()?;
        let chi = chi_involution(&rho, &sigma)?;
        let (r, r_prime) = chi.compose(&rho).fixed_points()?;
        let (s, s_prime) = chi.compose(&sigma).fixed_points()?;
        Ok(Self {
            d,
            rho,
            sigma,
            chi,
            p,
            p_prime,
            q,
            q_prime,
            r,
            r_prime,
            s,
            s_prime,
        })
    }

    /// `g⁻¹ r g`.
    pub fn conjugate(&self, g: &MobiusMap) -> Result<Self> {
        Self::from_generators(self.d, self.rho.conjugate_by(g), self.sigma.conjugate_by(g))
    }

    /// Largest chordal residual among `ρ^{d+1}`, `σ²`, `χ²`, `χρχρ`, `χσχσ`.
    pub fn relation_residual(&self) -> f64 {
        let chi_rho = self.chi.compose(&self.rho);
        let chi_sigma = self.chi.compose(&self.sigma);
        [
            self.rho.pow(self.d as i32 + 1),
            self.sigma.compose(&self.sigma),
            self.chi.compose(&self.chi),
            chi_rho.compose(&chi_rho),
            chi_sigma.compose(&chi_sigma),
        ]
        .iter()
        .map(MobiusMap::identity_residual)
        .fold(0.0, f64::max)
    }

    pub fn letter_map(&self, letter: Letter) -> MobiusMap {
        match letter {
            Letter::Sigma => self.sigma,
            Letter::Rho(i) => self.rho.pow(i as i32),
        }
    }
}

/// `σ(z) = -1/z` and `ρ(z) = -(2cos(π/(d+1))z + 1)/z`.
pub fn standard_hecke(d: usize) -> Result<HeckeRep> {
    if d < 2 {
        return Err(Error::DegenerateParams("d must be at least 2".into()));
    }
    let lambda = 2.0 * (PI / (d as f64 + 1.0)).cos();
    let sigma = MobiusMap::from_real(0.0, -1.0, 1.0, 0.0)?;
    let rho = MobiusMap::from_real(-lambda, -1.0, 1.0, 0.0)?;
    HeckeRep::from_generators(d, rho, sigma)
}

/// `σ` the half-turn about `0, ∞` and `ρ` the rotation by `2π/(d+1)` about
/// `κ, 1`.
pub fn rep_from_cross_ratio(params: &HeckeParams) -> Result<HeckeRep> {
    params.validate()?;
    let sigma = MobiusMap::elliptic_about(SpherePoint::ZERO, SpherePoint::Infinity, PI)?;
    let rho = MobiusMap::elliptic_about(
        SpherePoint::finite(params.kappa),
        SpherePoint::ONE,
        TAU / (params.d as f64 + 1.0),
    )
    .map_err(|_| Error::DegenerateParams("cross-ratio too close to 1".into()))?;
    HeckeRep::from_generators(params.d, rho, sigma)
}

/// Cross-ratio of `(P, P'; Q, Q')`.
pub fn cross_ratio_of_rep(rep: &HeckeRep) -> Result<C> {
    cross_ratio(rep.p, rep.p_prime, rep.q, rep.q_prime)
}

/// `(κ + 1/κ)/2`, which identifies `κ` with `1/κ`.
pub fn normalized_parameter(kappa: C) -> Result<C> {
    if kappa.norm() == 0.0 {
        return Err(Error::ZeroInput);
    }
    Ok((kappa + kappa.inv()) / 2.0)
}

/// A cross-ratio with the given normalized parameter, `x + √(x² - 1)`.
pub fn kappa_from_normalized(x: C) -> C {
    x + (x * x - 1.0).sqrt()
}

/// The Möbius involution exchanging the fixed points of `ρ` with each other
/// and those of `σ` with each other.
pub fn chi_involution(rho: &MobiusMap, sigma: &MobiusMap) -> Result<MobiusMap> {
    let (p, p_prime) = rho.fixed_points().map_err(|_| Error::DegenerateAxes)?;
    let (q, q_prime) = sigma.fixed_points().map_err(|_| Error::DegenerateAxes)?;
    let pts = [p, p_prime, q, q_prime];
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i].chordal(&pts[j]) < tol::CLASSIFICATION {
                return Err(Error::DegenerateAxes);
            }
        }
    }
    let a = MobiusMap::from_three_points(p, p_prime, q).map_err(|_| Error::DegenerateAxes)?;
    let b = MobiusMap::from_three_points(p_prime, p, q_prime).map_err(|_| Error::DegenerateAxes)?;
    let chi = b.inverse().compose(&a);
    let residual = [
        chi.apply(q_prime).chordal(&q),
        chi.compose(&chi).identity_residual(),
        chi.compose(rho).compose(&chi).distance(&rho.inverse()),
        chi.compose(sigma).compose(&chi).distance(&sigma.inverse()),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if residual >= RELATION_TOL {
        return Err(Error::DegenerateAxes);
    }
    Ok(chi)
}

/// `σ`, or `ρ^i` with `1 <= i <= d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    Sigma,
    Rho(u32),
}

impl Letter {
    fn factor(&self) -> u8 {
        match self {
            Letter::Sigma => 0,
            Letter::Rho(_) => 1,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Sigma => write!(f, "s"),
            Letter::Rho(1) => write!(f, "r"),
            Letter::Rho(i) => write!(f, "r{i}"),
        }
    }
}

/// A reduced word in `C₂ ∗ C_{d+1}`: letters alternate between the two
/// factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroupWord {
    d: usize,
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn new(d: usize, letters: Vec<Letter>) -> Result<Self> {
        for l in &letters {
            if let Letter::Rho(i) = l {
                if *i == 0 || *i as usize > d {
                    return Err(Error::InvalidWord(format!("exponent {i} outside 1..={d}")));
                }
            }
        }
        if letters.windows(2).any(|w| w[0].factor() == w[1].factor()) {
            return Err(Error::InvalidWord("adjacent letters from the same factor".into()));
        }
        Ok(Self { d, letters })
    }

    pub fn empty(d: usize) -> Self {
        Self { d, letters: Vec::new() }
    }

    /// Parses words such as `"sr2sr"` (`σρ²σρ`); the empty string is the
    /// empty word.
    pub fn parse(d: usize, text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut i = 0;
        while i < chars.len() {
            match chars[i] {
                's' => {
                    letters.push(Letter::Sigma);
                    i += 1;
                }
                'r' => {
                    i += 1;
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let exp: String = chars[start..i].iter().collect();
                    let exp = if exp.is_empty() {
                        1
                    } else {
                        exp.parse().map_err(|_| Error::InvalidWord(text.into()))?
                    };
                    letters.push(Letter::Rho(exp));
                }
                c => return Err(Error::InvalidWord(format!("unexpected character {c:?}"))),
            }
        }
        Self::new(d, letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// First and last letters come from different factors, so no cyclic
    /// permutation shortens the word.
    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(a), Some(b)) => self.letters.len() == 1 || a.factor() != b.factor(),
            _ => true,
        }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// All reduced words of length at most `max_len`, ordered by length and
/// then lexicographically with `σ < ρ < ρ² < ...`.
pub fn enumerate_words(d: usize, max_len: usize) -> Vec<GroupWord> {
    let mut out = vec![GroupWord::empty(d)];
    let mut level: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &level {
            let allowed: Vec<Letter> = match w.last() {
                None => std::iter::once(Letter::Sigma)
                    .chain((1..=d as u32).map(Letter::Rho))
                    .collect(),
                Some(Letter::Sigma) => (1..=d as u32).map(Letter::Rho).collect(),
                Some(Letter::Rho(_)) => vec![Letter::Sigma],
            };
            for l in allowed {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        next.sort();
        out.extend(next.iter().map(|letters| GroupWord {
            d,
            letters: letters.clone(),
        }));
        level = next;
    }
    out
}

/// The Möbius map of a word: `w₁ ∘ w₂ ∘ ... ∘ wₙ`.
pub fn word_map(rep: &HeckeRep, word: &GroupWord) -> MobiusMap {
    word.letters
        .iter()
        .fold(MobiusMap::identity(), |acc, l| acc.compose(&rep.letter_map(*l)))
}

/// `w₁(w₂(...wₙ(z)))`.
pub fn apply_word(rep: &HeckeRep, word: &GroupWord, z: SpherePoint) -> SpherePoint {
    word.letters
        .iter()
        .rev()
        .fold(z, |p, l| rep.letter_map(*l).apply(p))
}

/// Base point for limit-set sampling: the attracting (or neutral) fixed
/// point of `σρ`.
pub fn limit_base_point(rep: &HeckeRep) -> Result<SpherePoint> {
    rep.sigma.compose(&rep.rho).attracting_fixed_point()
}

/// Limit points of `n_points` word cylinders of comparable size.
///
/// The cylinder of a reduced word `w` is the set of limit points of the
/// words beginning with `w`. Starting from the empty word, the largest
/// cylinder is repeatedly replaced by its one-letter extensions until there
/// are `n_points` of them; words of length `max_word_len` are not split.
/// Sample `i` is `w(p)` where `w` is the `i`-th cylinder word and `p` is the
/// attracting fixed point of a two-letter word `gh` starting the tail of
/// `w`, with `g` and `h` drawn from the stream keyed by `(seed, i)`. Points
/// for different seeds therefore differ by at most a cylinder diameter.
pub fn limit_set_sample(
    rep: &HeckeRep,
    n_points: usize,
    max_word_len: usize,
    seed: u64,
) -> Result<Vec<SpherePoint>> {
    sample_with(rep, n_points, max_word_len, seed, false)
}

/// As [`limit_set_sample`], with `χ` applied to about half the samples, so
/// points come from the extended group `⟨ρ, σ, χ⟩`.
pub fn limit_set_sample_with_chi(
    rep: &HeckeRep,
    n_points: usize,
    max_word_len: usize,
    seed: u64,
) -> Result<Vec<SpherePoint>> {
    sample_with(rep, n_points, max_word_len, seed, true)
}

/// Attracting fixed points of `σρ^k` and `ρ^kσ`.
struct TailPoints {
    sigma_first: Vec<SpherePoint>,
    rho_first: Vec<SpherePoint>,
}

impl TailPoints {
    fn new(rep: &HeckeRep, rho_powers: &[MobiusMap]) -> Result<Self> {
        let mut sigma_first = Vec::with_capacity(rep.d);
        let mut rho_first = Vec::with_capacity(rep.d);
        for r in &rho_powers[1..] {
            sigma_first.push(rep.sigma.compose(r).attracting_fixed_point()?);
            rho_first.push(r.compose(&rep.sigma).attracting_fixed_point()?);
        }
        Ok(Self { sigma_first, rho_first })
    }

    /// Points in the cylinder of the tails that may follow `last`.
    fn after(&self, last: Option<Letter>) -> Vec<SpherePoint> {
        match last {
            Some(Letter::Sigma) => self.rho_first.clone(),
            Some(Letter::Rho(_)) => self.sigma_first.clone(),
            None => self.sigma_first.iter().chain(&self.rho_first).copied().collect(),
        }
    }
}

struct Cylinder {
    size: f64,
    order: u64,
    map: MobiusMap,
    last: Option<Letter>,
    len: usize,
}

impl PartialEq for Cylinder {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}

impl Eq for Cylinder {}

impl PartialOrd for Cylinder {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cylinder {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.size
            .total_cmp(&other.size)
            .then(other.order.cmp(&self.order))
    }
}

fn cylinder_size(map: &MobiusMap, points: &[SpherePoint]) -> f64 {
    let images: Vec<SpherePoint> = points.iter().map(|p| map.apply(*p)).collect();
    let mut size: f64 = 0.0;
    for (i, a) in images.iter().enumerate() {
        for b in &images[i + 1..] {
            size = size.max(a.chordal(b));
        }
    }
    size
}

fn sample_with(
    rep: &HeckeRep,
    n_points: usize,
    max_word_len: usize,
    seed: u64,
    with_chi: bool,
) -> Result<Vec<SpherePoint>> {
    if n_points == 0 {
        return Ok(Vec::new());
    }
    let rho_powers: Vec<MobiusMap> = (0..=rep.d).map(|i| rep.rho.pow(i as i32)).collect();
    let tails = TailPoints::new(rep, &rho_powers)?;
    let letters: Vec<Letter> = std::iter::once(Letter::Sigma)
        .chain((1..=rep.d as u32).map(Letter::Rho))
        .collect();
    let letter_map = |l: Letter| match l {
        Letter::Sigma => rep.sigma,
        Letter::Rho(k) => rho_powers[k as usize],
    };
    let mut heap = std::collections::BinaryHeap::new();
    let mut done = Vec::new();
    let mut order = 0u64;
    heap.push(Cylinder {
        size: f64::INFINITY,
        order,
        map: MobiusMap::identity(),
        last: None,
        len: 0,
    });
    while heap.len() + done.len() < n_points {
        let Some(top) = heap.pop() else { break };
        if top.len >= max_word_len {
            done.push(top);
            continue;
        }
        for &l in &letters {
            if top.last.is_some_and(|last| same_factor(last, l)) {
                continue;
            }
            let map = top.map.compose(&letter_map(l));
            order += 1;
            heap.push(Cylinder {
                size: cylinder_size(&map, &tails.after(Some(l))),
                order,
                map,
                last: Some(l),
                len: top.len + 1,
            });
        }
    }
    let mut leaves = heap.into_sorted_vec();
    leaves.reverse();
    leaves.extend(done);
    leaves.truncate(n_points);
    Ok((0..n_points)
        .map(|i| {
            let leaf = &leaves[i % leaves.len()];
            let mut rng = sampling::keyed_rng(seed, i as u64);
            let candidates = tails.after(leaf.last);
            let p = candidates[rng.random_range(0..candidates.len())];
            let z = leaf.map.apply(p);
            if with_chi && rng.random::<bool>() {
                rep.chi.apply(z)
            } else {
                z
            }
        })
        .collect())
}

fn same_factor(a: Letter, b: Letter) -> bool {
    matches!(
        (a, b),
        (Letter::Sigma, Letter::Sigma) | (Letter::Rho(_), Letter::Rho(_))
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JorgensenResult {
    /// No pair violated the inequality (inconclusive, consistent with
    /// discreteness).
    pub passes: bool,
    /// Smallest value of `|tr²A - 4| + |tr[A,B] - 2|` over tested pairs
    /// (infinite if no pair was tested).
    pub worst_value: f64,
}

/// Maps of the non-identity words up to `max_len`, precomputed once for
/// repeated use.
pub fn word_maps(rep: &HeckeRep, words: &[GroupWord]) -> Vec<MobiusMap> {
    words
        .iter()
        .filter(|w| !w.is_empty())
        .map(|w| word_map(rep, w))
        .collect()
}

/// Jørgensen's inequality over ordered pairs of the given maps. Pairs with
/// `tr[A,B]` within `1e-8` of 2 share a fixed point and generate an
/// elementary group, so they are skipped, as are identity elements.
pub fn jorgensen_over(maps: &[MobiusMap]) -> JorgensenResult {
    let mut worst = f64::INFINITY;
    for a in maps {
        if a.is_identity(tol::CHORDAL) {
            continue;
        }
        let ta = (a.trace_squared() - 4.0).norm();
        let a_inv = a.inverse();
        for b in maps {
            if b.is_identity(tol::CHORDAL) {
                continue;
            }
            let comm = a.compose(b).compose(&a_inv).compose(&b.inverse());
            let tc = (comm.trace() - 2.0).norm();
            if tc < tol::CLASSIFICATION {
                continue;
            }
            worst = worst.min(ta + tc);
        }
    }
    JorgensenResult {
        passes: worst >= 1.0 - tol::CLASSIFICATION,
        worst_value: worst,
    }
}

pub fn jorgensen_test(rep: &HeckeRep, max_word_len: usize) -> JorgensenResult {
    jorgensen_over(&word_maps(rep, &enumerate_words(rep.d, max_word_len)))
}

/// Heuristic class of a point of the normalized parameter plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiscretenessClass {
    /// No short certificate either way.
    Inconclusive = 0,
    /// Some pair of short words violates Jørgensen's inequality.
    CertifiedNondiscrete = 1,
    /// A short cyclically reduced word is nearly parabolic.
    ParabolicSuspect = 2,
    /// The parameter does not define a representation (`κ = 1`).
    Degenerate = 3,
}

/// Words up to this length are tested pairwise in a scan; longer words are
/// paired with the generators only.
pub const SCAN_PAIR_LEN: usize = 4;

/// Cyclically reduced words up to this length also have their powers up to
/// `SCAN_MAX_POWER` tested against the generators; powers of a nearly
/// elliptic element come close to the identity.
pub const SCAN_POWER_LEN: usize = 6;
pub const SCAN_MAX_POWER: usize = 24;

/// `tr[A,B]` from the traces of `A`, `B` and `AB`.
fn commutator_trace(ta: C, tb: C, tab: C) -> C {
    ta * ta + tb * tb + tab * tab - ta * tb * tab - 2.0
}

fn product_trace(a: &MobiusMap, b: &MobiusMap) -> C {
    a.a * b.a + a.b * b.c + a.c * b.b + a.d * b.d
}

fn is_near_identity(m: &MobiusMap) -> bool {
    m.b.norm() < tol::CLASSIFICATION
        && m.c.norm() < tol::CLASSIFICATION
        && (m.a - m.d).norm() < tol::CLASSIFICATION
}

/// Word list shared by every pixel of a scan.
///
/// Words are stored in shortlex order with the index of their prefix, so the
/// maps of all words cost one composition each.
#[derive(Debug, Clone)]
pub struct DiscretenessProbe {
    d: usize,
    /// `(prefix index or None for one-letter words, last letter)`.
    words: Vec<(Option<usize>, Letter)>,
    lengths: Vec<usize>,
    cyclic: Vec<bool>,
}

impl DiscretenessProbe {
    pub fn new(d: usize, max_word_len: usize) -> Self {
        let all: Vec<GroupWord> = enumerate_words(d, max_word_len)
            .into_iter()
            .filter(|w| !w.is_empty())
            .collect();
        let index: std::collections::HashMap<&[Letter], usize> =
            all.iter().enumerate().map(|(k, w)| (w.letters(), k)).collect();
        let words = all
            .iter()
            .map(|w| {
                let n = w.len();
                let prefix = (n > 1).then(|| index[&w.letters()[..n - 1]]);
                (prefix, w.letters()[n - 1])
            })
            .collect();
        let lengths = all.iter().map(GroupWord::len).collect();
        let cyclic = all
            .iter()
            .map(|w| w.len() >= 2 && w.is_cyclically_reduced())
            .collect();
        Self {
            d,
            words,
            lengths,
            cyclic,
        }
    }

    /// Class and worst Jørgensen value at normalized parameter `x`.
    pub fn classify(&self, x: C) -> (DiscretenessClass, f64) {
        let params = HeckeParams {
            d: self.d,
            kappa: kappa_from_normalized(x),
        };
        let Ok(rep) = rep_from_cross_ratio(&params) else {
            return (DiscretenessClass::Degenerate, 0.0);
        };
        self.classify_rep(&rep)
    }

    pub fn classify_rep(&self, rep: &HeckeRep) -> (DiscretenessClass, f64) {
        let letters: Vec<MobiusMap> = std::iter::once(rep.sigma)
            .chain((1..=self.d).map(|i| rep.rho.pow(i as i32)))
            .collect();
        let letter_index = |l: Letter| match l {
            Letter::Sigma => 0,
            Letter::Rho(i) => i as usize,
        };
        let mut maps: Vec<MobiusMap> = Vec::with_capacity(self.words.len());
        for &(prefix, last) in &self.words {
            let m = letters[letter_index(last)];
            maps.push(match prefix {
                Some(p) => maps[p].compose(&m),
                None => m,
            });
        }
        let traces: Vec<C> = maps.iter().map(MobiusMap::trace).collect();
        let mut worst = f64::INFINITY;
        let mut test = |ia: usize, b: &MobiusMap, tb: C| {
            let (a, ta) = (&maps[ia], traces[ia]);
            let tc = (commutator_trace(ta, tb, product_trace(a, b)) - 2.0).norm();
            if tc >= tol::CLASSIFICATION {
                worst = worst.min((ta * ta - 4.0).norm() + tc);
            }
        };
        let live: Vec<usize> = (0..maps.len()).filter(|&k| !is_near_identity(&maps[k])).collect();
        let short: Vec<usize> = live
            .iter()
            .copied()
            .filter(|&k| self.lengths[k] <= SCAN_PAIR_LEN)
            .collect();
        for &ia in &live {
            if self.lengths[ia] <= SCAN_PAIR_LEN {
                for &ib in &short {
                    test(ia, &maps[ib], traces[ib]);
                }
            } else {
                for b in &letters {
                    test(ia, b, b.trace());
                }
            }
        }
        let mut near_identity = (0..maps.len()).any(|k| self.cyclic[k] && is_near_identity(&maps[k]));
        for k in 0..maps.len() {
            if !self.cyclic[k] || self.lengths[k] > SCAN_POWER_LEN || near_identity {
                continue;
            }
            let mut power = maps[k];
            for _ in 2..=SCAN_MAX_POWER {
                power = power.compose(&maps[k]);
                if is_near_identity(&power) {
                    near_identity = true;
                    break;
                }
                let tp = power.trace();
                for b in &letters {
                    let tc = (commutator_trace(tp, b.trace(), product_trace(&power, b)) - 2.0).norm();
                    if tc >= tol::CLASSIFICATION {
                        worst = worst.min((tp * tp - 4.0).norm() + tc);
                    }
                }
            }
        }
        if near_identity || worst < 1.0 - tol::CLASSIFICATION {
            return (DiscretenessClass::CertifiedNondiscrete, worst);
        }
        let near_parabolic = traces
            .iter()
            .zip(&self.cyclic)
            .any(|(t, &c)| c && (t * t - 4.0).norm() < PARABOLIC_TOL);
        if near_parabolic {
            (DiscretenessClass::ParabolicSuspect, worst)
        } else {
            (DiscretenessClass::Inconclusive, worst)
        }
    }
}
