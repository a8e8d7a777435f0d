use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::SpherePoint;
use crate::correspondence::{orbit_tree_within, Correspondence, JCovCorrespondence};
use crate::error::{Error, Result};

type C = Complex64;

/// Trap radius as a fraction of `|c - J(c)|`.
const TRAP_FRACTION: f64 = 0.45;

/// Disk around the critical point of the polynomial-like branch of a mating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatingTrap {
    pub center: C,
    pub radius: f64,
}

impl MatingTrap {
    pub fn contains(&self, z: &SpherePoint) -> bool {
        z.as_complex().is_some_and(|w| (w - self.center).norm() < self.radius)
    }
}

/// At a critical point `c` of `q` with `Cov₀(c) = {c, c'}`, the branch
/// `z -> J(c'(z))` folds, with critical value `J(c')`. The polynomial-like
/// branch is the one whose critical value lies closest to its critical
/// point; the trap is a disk about that point.
pub fn auto_trap(f: &JCovCorrespondence, radius: Option<f64>) -> Result<MatingTrap> {
    let invariant = f.totally_invariant_point();
    let mut best: Option<(f64, C)> = None;
    for (p, _) in f.critical_points_of_q()? {
        if p.chordal(&invariant) < 1e-6 {
            continue;
        }
        let Some(c) = p.as_complex() else { continue };
        let far = f
            .cov0(p)?
            .into_iter()
            .max_by(|a, b| a.chordal(&p).total_cmp(&b.chordal(&p)))
            .ok_or(Error::Config("correspondence has degree one".into()))?;
        let score = f.j().apply(far).chordal(&p);
        if best.is_none_or(|(s, _)| score < s) {
            best = Some((score, c));
        }
    }
    let (_, center) = best.ok_or(Error::Config("no finite free critical point".into()))?;
    let mirror = f
        .j()
        .apply_c(center)
        .as_complex()
        .ok_or(Error::Config("J sends the trap center to ∞".into()))?;
    Ok(MatingTrap {
        center,
        radius: radius.unwrap_or(TRAP_FRACTION * (center - mirror).norm()),
    })
}

/// Pixel classes of a mating raster.
pub const OMEGA: u8 = 0;
pub const LAMBDA_MINUS: u8 = 1;
pub const LAMBDA_PLUS: u8 = 2;

#[derive(Debug, Clone)]
pub struct MatingClassifier {
    pub f: JCovCorrespondence,
    pub trap: MatingTrap,
    pub depth: usize,
    pub max_nodes: usize,
}

impl MatingClassifier {
    /// Whether some forward branch from `z` stays in the trap for `depth`
    /// steps; also reports whether the node cap was hit.
    pub fn stays_trapped(&self, z: SpherePoint) -> Result<(bool, bool)> {
        if self.depth == 0 || !self.trap.contains(&z) {
            return Ok((false, false));
        }
        let tree = orbit_tree_within(&self.f, z, self.depth, self.max_nodes, |w| self.trap.contains(w))?;
        Ok((tree.depth() == self.depth, tree.truncated))
    }

    /// `Λ⁻` if trapped, `Λ⁺` if `J(z)` is trapped, otherwise `Ω`.
    pub fn classify(&self, z: SpherePoint) -> Result<(u8, bool)> {
        let (minus, t1) = self.stays_trapped(z)?;
        if minus {
            return Ok((LAMBDA_MINUS, t1));
        }
        let (plus, t2) = self.stays_trapped(self.f.involution().apply(z))?;
        Ok((if plus { LAMBDA_PLUS } else { OMEGA }, t1 || t2))
    }
}
