//! Invariant suites behind `corrlab check`.
//!
//! Each suite runs a batch of numerical cases and counts passes and failures.
//! Sizes are the ones used by the acceptance tests, so a clean `check` run is
//! a quick smoke test of the same properties.

use num_complex::Complex64 as C;
use rand::Rng;
use serde::Serialize;

use crate::algebra::{MobiusMap, Polynomial, RationalMap};
use crate::correspondence::{
    bidegree_check, critical_points, equivalence_relation_check, equivalence_relation_residual,
    mating_family, membership_residual, time_reversal_check, JCovCorrespondence,
    MatingFamilyParams,
};
use crate::dynamics::{
    boundary_involution_j, bottcher_equipotential_point, fundamental_annulus,
    green_function, in_connectedness_locus, FamilySpec,
};
use crate::hecke::{
    cross_ratio_of_rep, normalized_parameter, rep_from_cross_ratio, HeckeParams, RELATION_TOL,
};
use crate::render::{render_with_threads, GridSpec, JobSpec, LocusParams, RenderJob};
use crate::sampling::{disk_point, keyed_rng, random_involution, random_mobius, random_monic};
use crate::{Error, Result};

pub const SUITES: &[&str] = &[
    "relations",
    "parametrization",
    "correspondence",
    "bidegree",
    "critical",
    "bottcher",
    "loci",
    "determinism",
];

const SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    /// One line per failed case.
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Self::default()
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            self.failures.push(what());
        }
    }

    fn record_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.record(ok, what),
            Err(e) => self.record(false, || format!("{}: {e}", what())),
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

pub fn run_suite(name: &str) -> Result<SuiteReport> {
    match name {
        "relations" => Ok(relations()),
        "parametrization" => Ok(parametrization()),
        "correspondence" => Ok(correspondence()),
        "bidegree" => Ok(bidegree()),
        "critical" => Ok(critical()),
        "bottcher" => Ok(bottcher()),
        "loci" => Ok(loci()),
        "determinism" => Ok(determinism()),
        _ => Err(Error::Config(format!(
            "unknown suite {name:?}; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

/// A random cross-ratio away from the excluded values 0 and 1.
pub fn random_kappa<R: Rng>(rng: &mut R) -> C {
    loop {
        let k = disk_point(rng, 3.0);
        if k.norm() > 0.05 && (k - 1.0).norm() > 0.05 {
            return k;
        }
    }
}

/// A correspondence `J ∘ Cov₀^q` with random involution `J` and random monic
/// `q` of degree 3 to 6.
pub fn random_correspondence(seed: u64, index: u64) -> Result<JCovCorrespondence> {
    let mut rng = keyed_rng(seed, index);
    let degree = rng.random_range(3..=6);
    let q = RationalMap::polynomial(random_monic(&mut rng, degree))?;
    let j = random_involution(&mut rng);
    JCovCorrespondence::new(j, q)
}

fn relations() -> SuiteReport {
    let mut report = SuiteReport::new("relations");
    for d in 2..=6usize {
        let mut rng = keyed_rng(SEED, d as u64);
        for _ in 0..200 {
            let kappa = random_kappa(&mut rng);
            let r = rep_from_cross_ratio(&HeckeParams { d, kappa })
                .map(|rep| rep.relation_residual() < RELATION_TOL);
            report.record_result(r, || format!("d={d} kappa={kappa}"));
        }
    }
    report
}

fn parametrization() -> SuiteReport {
    let mut report = SuiteReport::new("parametrization");
    let mut rng = keyed_rng(SEED, 100);
    for i in 0..500 {
        let d = 2 + i % 5;
        let kappa = random_kappa(&mut rng);
        let g = random_mobius(&mut rng);
        let r = (|| {
            let x = normalized_parameter(kappa)?;
            let swapped = normalized_parameter(kappa.inv())?;
            let rep = rep_from_cross_ratio(&HeckeParams { d, kappa })?;
            let round = normalized_parameter(cross_ratio_of_rep(&rep)?)?;
            let conj = normalized_parameter(cross_ratio_of_rep(&rep.conjugate(&g)?)?)?;
            let tol = 1e-9 * (1.0 + x.norm());
            Ok((x - swapped).norm() < tol && (x - round).norm() < tol && (x - conj).norm() < tol)
        })();
        report.record_result(r, || format!("d={d} kappa={kappa}"));
    }
    report
}

/// The fifty random correspondences plus the mating family at the figure
/// parameters.
pub fn test_correspondences() -> Vec<(String, Result<JCovCorrespondence>)> {
    let mut out: Vec<_> = (0..50)
        .map(|i| (format!("random #{i}"), random_correspondence(SEED, 1000 + i)))
        .collect();
    out.push((
        "mating figure example".into(),
        mating_family(&MatingFamilyParams::figure_example()),
    ));
    out
}

fn correspondence() -> SuiteReport {
    let mut report = SuiteReport::new("correspondence");
    for (i, (label, f)) in test_correspondences().into_iter().enumerate() {
        let r = f.and_then(|f| {
            let tr = time_reversal_check(&f, 20, i as u64)?;
            let eq = equivalence_relation_check(f.q(), 20, i as u64)?;
            Ok(tr < 1e-8 && eq < 1e-8)
        });
        report.record_result(r, || label);
    }
    // Negative controls: dropping the diagonal breaks reflexivity, and a
    // non-involution is rejected outright.
    let q = RationalMap::polynomial(Polynomial::from_real(&[0.3, -1.0, 0.0, 1.0])).unwrap();
    let r = equivalence_relation_residual(&q, 20, 0, false).map(|res| res > 1e-3);
    report.record_result(r, || "negative control: deleted covering without diagonal".into());
    let shift = MobiusMap::translation(C::new(0.5, 0.0));
    report.record(JCovCorrespondence::new(shift, q).is_err(), || {
        "negative control: translation accepted as J".into()
    });
    report
}

fn bidegree() -> SuiteReport {
    let mut report = SuiteReport::new("bidegree");
    for (i, (label, f)) in test_correspondences().into_iter().enumerate() {
        let r = f.and_then(|f| {
            let d = f.d();
            Ok(bidegree_check(&f, 20, i as u64)? == (d, d))
        });
        report.record_result(r, || label);
    }
    report
}

fn critical() -> SuiteReport {
    let mut report = SuiteReport::new("critical");
    for (label, f) in test_correspondences() {
        let r = f.and_then(|f| {
            let cov = JCovCorrespondence::deleted_covering(f.q().clone())?;
            let mut ok = true;
            for (c, _) in critical_points(f.q())? {
                ok &= membership_residual(&cov, c, c)? < 1e-8;
            }
            Ok(ok)
        });
        report.record_result(r, || label);
    }
    report
}

fn bottcher() -> SuiteReport {
    let mut report = SuiteReport::new("bottcher");
    for i in 0..20u64 {
        let mut rng = keyed_rng(SEED, 2000 + i);
        let degree = 2 + (i as usize) % 2;
        let f = random_monic(&mut rng, degree);
        let mut worst: f64 = 0.0;
        let mut escaping = 0;
        let mut attempts = 0;
        let mut failed = None;
        while escaping < 500 && attempts < 100_000 {
            attempts += 1;
            let z = disk_point(&mut rng, 4.0);
            let g = match green_function(&f, z, 1000, None) {
                Ok(g) => g,
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            };
            if g <= 0.0 {
                continue;
            }
            escaping += 1;
            let gf = green_function(&f, f.eval(z), 1000, None).unwrap_or(f64::NAN);
            worst = worst.max((gf - degree as f64 * g).abs());
        }
        report.record(failed.is_none() && escaping == 500 && worst < 1e-8, || {
            format!("green functional equation for {f}: worst {worst:e}, {escaping} points")
        });
    }
    let f = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
    let t = 1.2;
    let r = fundamental_annulus(&f, t, 256, 24).map(|a| a.covering_residual(&f) < 1e-6);
    report.record_result(r, || "fundamental annulus of z^2 - 1".into());
    let r = (|| {
        let mut worst: f64 = 0.0;
        for i in 0..32 {
            let theta = std::f64::consts::TAU * i as f64 / 32.0;
            let once = boundary_involution_j(&f, t, theta)?;
            let back = boundary_involution_j(&f, t, -theta)?;
            let start = bottcher_equipotential_point(&f, t * t, theta, 24)?;
            let on_curve = (green_function(&f, once, 1000, None)? - 2.0 * t.ln()).abs();
            worst = worst.max((back - start).norm()).max(on_curve);
        }
        Ok(worst < 1e-8)
    })();
    report.record_result(r, || "boundary involution j is an involution".into());
    report
}

/// Bounded-orbit classification of `c ↦ z² + c` at the pixels of a grid,
/// written directly against the recurrence.
pub fn mandelbrot_oracle(grid: &GridSpec, max_iter: usize) -> Vec<bool> {
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..grid.pixels_y {
        for i in 0..grid.pixels_x {
            let c = grid.point(i, j);
            let radius = (1.0 + c.norm()).max(2.0);
            let mut z = C::new(0.0, 0.0);
            let mut bounded = true;
            for n in 0..=max_iter {
                if z.norm() > radius {
                    bounded = false;
                    break;
                }
                if n < max_iter {
                    z = z * z + c;
                }
            }
            out.push(bounded);
        }
    }
    out
}

fn loci() -> SuiteReport {
    let mut report = SuiteReport::new("loci");
    let grid = GridSpec::new(C::new(-0.5, 0.0), 3.0, 64, 64).expect("valid grid");
    let job = RenderJob::new(
        JobSpec::ConnectednessLocus(LocusParams {
            family: FamilySpec::Unicritical { d: 2 },
            max_iter: 200,
        }),
        grid,
    );
    let r = render_with_threads(&job, Some(1)).map(|raster| {
        let oracle = mandelbrot_oracle(&grid, 200);
        raster
            .classes
            .iter()
            .zip(&oracle)
            .all(|(&class, &bounded)| (class == 1) == bounded)
    });
    report.record_result(r, || "64x64 Mandelbrot raster against per-pixel oracle".into());
    let family = FamilySpec::Unicritical { d: 2 };
    for k in 0..100 {
        let c = -2.0 + 2.25 * k as f64 / 99.0;
        let r = in_connectedness_locus(&family, C::new(c, 0.0), 5000, None);
        report.record_result(r, || format!("real parameter {c} not in the Mandelbrot set"));
    }
    let cubic = FamilySpec::ParabolicCubic;
    let mut rng = keyed_rng(SEED, 3000);
    for _ in 0..200 {
        let a = disk_point(&mut rng, 4.0);
        let r = (|| Ok(in_connectedness_locus(&cubic, a, 500, None)? == in_connectedness_locus(&cubic, -a, 500, None)?))();
        report.record_result(r, || format!("butterfly asymmetric at a={a}"));
    }
    report
}

fn determinism() -> SuiteReport {
    let mut report = SuiteReport::new("determinism");
    for job in sample_jobs(48) {
        let name = job.kind().name();
        let r = (|| {
            let one = render_with_threads(&job, Some(1))?.to_ppm();
            let three = render_with_threads(&job, Some(3))?.to_ppm();
            Ok(one == three)
        })();
        report.record_result(r, || format!("{name} differs across thread counts"));
    }
    report
}

/// One small job of each kind, on an `n × n` grid.
pub fn sample_jobs(n: usize) -> Vec<RenderJob> {
    use crate::render::{DiscretenessParams, HeckeLimitParams, JuliaParams, MatingParams};
    let grid = |re: f64, width: f64| GridSpec::new(C::new(re, 0.0), width, n, n).expect("valid grid");
    vec![
        RenderJob::new(
            JobSpec::ConnectednessLocus(LocusParams {
                family: FamilySpec::ParabolicCubic,
                max_iter: 200,
            }),
            grid(0.0, 8.0),
        ),
        RenderJob::new(
            JobSpec::FilledJulia(JuliaParams {
                poly: Polynomial::from_real(&[-1.0, 0.0, 1.0]),
                max_iter: 200,
            }),
            grid(0.0, 4.0),
        ),
        RenderJob::new(
            JobSpec::HeckeLimitSet(HeckeLimitParams {
                d: 2,
                kappa: Some(C::new(0.3, 0.2)),
                n_points: 20_000,
                word_len: 40,
            }),
            grid(0.0, 6.0),
        )
        .with_seed(11),
        RenderJob::new(
            JobSpec::DiscretenessScan(DiscretenessParams { d: 2, max_word_len: 4 }),
            grid(1.0, 16.0),
        ),
        RenderJob::new(
            JobSpec::MatingLimitSet(MatingParams {
                a: MatingFamilyParams::figure_example().a,
                k: MatingFamilyParams::figure_example().k,
                depth: 60,
                max_nodes: 256,
                trap_radius: None,
            }),
            grid(0.0, 1.2),
        ),
    ]
}
