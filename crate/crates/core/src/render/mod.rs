//! Raster renderers for connectedness loci, filled Julia sets, Hecke limit
//! sets, discreteness scans and mating limit sets.

mod grid;
mod job;
pub mod mating;
mod raster;

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

pub use grid::GridSpec;
pub use job::{
    DiscretenessParams, HeckeLimitParams, JobKind, JobSpec, JuliaParams, LocusParams, MatingParams,
    RenderJob, SCHEMA_VERSION,
};
pub use raster::{legend, Raster};

use crate::algebra::SpherePoint;
use crate::correspondence::mating_family;
use crate::dynamics::{escape_time, EscapeStatus, FamilySpec, MonicCentered};
use crate::error::{Error, Result};
use crate::hecke::{rep_from_cross_ratio, standard_hecke, DiscretenessProbe, HeckeParams, HeckeRep};
use mating::{auto_trap, MatingClassifier};

type C = Complex64;

/// Per-pixel outcome: class, scalar, and whether a cap was hit.
type Pixel = (u8, f64, bool);

fn per_pixel<F>(kind: JobKind, grid: &GridSpec, with_scalar: bool, f: F) -> Result<Raster>
where
    F: Fn(C) -> Result<Pixel> + Sync,
{
    let rows: Vec<Vec<Pixel>> = (0..grid.pixels_y)
        .into_par_iter()
        .map(|j| (0..grid.pixels_x).map(|i| f(grid.point(i, j))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let pixels: Vec<Pixel> = rows.into_iter().flatten().collect();
    Ok(Raster {
        kind,
        width: grid.pixels_x,
        height: grid.pixels_y,
        classes: pixels.iter().map(|p| p.0).collect(),
        scalar: with_scalar.then(|| pixels.iter().map(|p| p.1).collect()),
        truncated_pixels: pixels.iter().filter(|p| p.2).count(),
    })
}

fn wrong_kind(expected: JobKind) -> Error {
    Error::Config(format!("job is not a {} job", expected.name()))
}

/// Class 1 where every critical orbit stays bounded; the scalar is the
/// first escape index of a critical orbit (0 inside).
pub fn render_connectedness_locus(job: &RenderJob) -> Result<Raster> {
    let JobSpec::ConnectednessLocus(p) = &job.spec else {
        return Err(wrong_kind(JobKind::ConnectednessLocus));
    };
    job.validate()?;
    per_pixel(JobKind::ConnectednessLocus, &job.grid, true, |lambda| {
        let f = p.family.polynomial(lambda)?;
        let mut first_escape: Option<usize> = None;
        for c in p.family.critical_points(lambda)? {
            if let EscapeStatus::Escaped(n) = escape_time(&f, c, p.max_iter, None).status {
                first_escape = Some(first_escape.map_or(n, |m| m.min(n)));
            }
        }
        Ok(match first_escape {
            Some(n) => (0, n as f64, false),
            None => (1, 0.0, false),
        })
    })
}

/// Class 1 for bounded orbits; the scalar is Green's function.
pub fn render_filled_julia(job: &RenderJob) -> Result<Raster> {
    let JobSpec::FilledJulia(p) = &job.spec else {
        return Err(wrong_kind(JobKind::FilledJulia));
    };
    job.validate()?;
    let mc = MonicCentered::new(&p.poly)?;
    per_pixel(JobKind::FilledJulia, &job.grid, true, |z| {
        let r = escape_time(&p.poly, z, p.max_iter, None);
        Ok(if r.escaped() {
            (0, mc.green(z, p.max_iter, None), false)
        } else {
            (1, 0.0, false)
        })
    })
}

pub fn hecke_rep_for(d: usize, kappa: Option<C>) -> Result<HeckeRep> {
    match kappa {
        Some(kappa) => rep_from_cross_ratio(&HeckeParams { d, kappa }),
        None => standard_hecke(d),
    }
    .map_err(|e| Error::Config(e.to_string()))
}

/// Limit-set samples splatted onto the grid; the scalar is the hit count.
pub fn render_hecke_limit_set(job: &RenderJob) -> Result<Raster> {
    let JobSpec::HeckeLimitSet(p) = &job.spec else {
        return Err(wrong_kind(JobKind::HeckeLimitSet));
    };
    job.validate()?;
    let rep = hecke_rep_for(p.d, p.kappa)?;
    let points = crate::hecke::limit_set_sample(&rep, p.n_points, p.word_len, job.seed)?;
    let grid = &job.grid;
    let mut counts = vec![0.0; grid.len()];
    for z in points.iter().filter_map(SpherePoint::as_complex) {
        if let Some((i, j)) = grid.pixel_of(z) {
            counts[grid.index(i, j)] += 1.0;
        }
    }
    Ok(Raster {
        kind: JobKind::HeckeLimitSet,
        width: grid.pixels_x,
        height: grid.pixels_y,
        classes: counts.iter().map(|&c| u8::from(c > 0.0)).collect(),
        scalar: Some(counts),
        truncated_pixels: 0,
    })
}

/// Heuristic discreteness classes over the normalized parameter plane; the
/// scalar is the worst Jørgensen value.
pub fn render_discreteness_scan(job: &RenderJob) -> Result<Raster> {
    let JobSpec::DiscretenessScan(p) = &job.spec else {
        return Err(wrong_kind(JobKind::DiscretenessScan));
    };
    job.validate()?;
    let probe = DiscretenessProbe::new(p.d, p.max_word_len);
    per_pixel(JobKind::DiscretenessScan, &job.grid, true, |x| {
        let (class, worst) = probe.classify(x);
        Ok((class as u8, worst.min(1e300), false))
    })
}

/// `Ω`, `Λ⁻`, `Λ⁺` by trapped forward exploration.
pub fn render_mating_limit_set(job: &RenderJob) -> Result<Raster> {
    let JobSpec::MatingLimitSet(p) = &job.spec else {
        return Err(wrong_kind(JobKind::MatingLimitSet));
    };
    job.validate()?;
    let f = mating_family(&p.family())?;
    let trap = auto_trap(&f, p.trap_radius)?;
    let cls = MatingClassifier {
        f,
        trap,
        depth: p.depth,
        max_nodes: p.max_nodes,
    };
    per_pixel(JobKind::MatingLimitSet, &job.grid, false, |z| {
        let (class, truncated) = cls.classify(SpherePoint::Finite(z))?;
        Ok((class, 0.0, truncated))
    })
}

/// Renders on the current rayon pool.
pub fn render(job: &RenderJob) -> Result<Raster> {
    match job.kind() {
        JobKind::ConnectednessLocus => render_connectedness_locus(job),
        JobKind::FilledJulia => render_filled_julia(job),
        JobKind::HeckeLimitSet => render_hecke_limit_set(job),
        JobKind::DiscretenessScan => render_discreteness_scan(job),
        JobKind::MatingLimitSet => render_mating_limit_set(job),
    }
}

/// Renders on a dedicated pool of `threads` workers (rayon's default when
/// `None`). Output does not depend on the thread count.
pub fn render_with_threads(job: &RenderJob, threads: Option<usize>) -> Result<Raster> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| render(job))
}

#[derive(Debug, Clone, Serialize)]
pub struct RenderMetadata {
    pub version: &'static str,
    pub job: RenderJob,
    pub width: usize,
    pub height: usize,
    pub threads: usize,
    pub elapsed_ms: f64,
    pub truncated_pixels: usize,
    pub class_counts: std::collections::BTreeMap<u8, usize>,
    pub legend: Vec<(u8, &'static str)>,
    pub notes: Option<&'static str>,
}

impl RenderMetadata {
    pub fn new(job: &RenderJob, raster: &Raster, threads: usize, elapsed_ms: f64) -> Self {
        let notes = match job.kind() {
            JobKind::DiscretenessScan => Some(
                "heuristic: class 1 is a Jørgensen certificate over short words; \
                 classes 0 and 2 are not proofs of discreteness",
            ),
            JobKind::MatingLimitSet => Some(
                "heuristic: Λ⁻ is approximated by points with a forward branch staying \
                 in a trap disk for `depth` steps; Λ⁺ is its image under J",
            ),
            JobKind::ConnectednessLocus | JobKind::FilledJulia => {
                Some("finite-iteration approximation: slow escapers may be counted as bounded")
            }
            JobKind::HeckeLimitSet => None,
        };
        Self {
            version: env!("CARGO_PKG_VERSION"),
            job: job.clone(),
            width: raster.width,
            height: raster.height,
            threads,
            elapsed_ms,
            truncated_pixels: raster.truncated_pixels,
            class_counts: raster.class_counts(),
            legend: legend(job.kind()).to_vec(),
            notes,
        }
    }
}

/// Path of the JSON sidecar next to an image.
pub fn sidecar_path(image: &Path) -> PathBuf {
    image.with_extension("json")
}

/// Renders a job and writes the PPM and its sidecar.
pub fn render_to_files(job: &RenderJob, out: &Path, threads: Option<usize>) -> Result<RenderMetadata> {
    let start = Instant::now();
    let raster = render_with_threads(job, threads)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let used = threads.unwrap_or_else(rayon::current_num_threads);
    let meta = RenderMetadata::new(job, &raster, used, elapsed_ms);
    let io = |e: std::io::Error| Error::Config(format!("{}: {e}", out.display()));
    std::fs::write(out, raster.to_ppm()).map_err(io)?;
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    std::fs::write(sidecar_path(out), text).map_err(io)?;
    Ok(meta)
}

pub fn family_job(family: FamilySpec, max_iter: usize, grid: GridSpec) -> RenderJob {
    RenderJob::new(JobSpec::ConnectednessLocus(LocusParams { family, max_iter }), grid)
}

