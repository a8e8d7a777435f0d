//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Golden image hashes live in `tests/golden/*.sha256`. Set `CORRLAB_BLESS=1`
//! to (re)write them after inspecting the renders.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64 as C;
use rand::Rng;
use sha2::{Digest, Sha256};

use corrlab::algebra::{MobiusMap, Polynomial, RationalMap};
use corrlab::check::{random_kappa, sample_jobs};
use corrlab::correspondence::{
    bidegree_check, critical_points, equivalence_relation_check, equivalence_relation_residual,
    mating_family, membership_residual, time_reversal_check, JCovCorrespondence,
    MatingFamilyParams, MobiusGraph,
};
use corrlab::dynamics::{
    boundary_involution_j, bottcher_equipotential_point, fundamental_annulus, green_function,
    in_connectedness_locus, FamilySpec,
};
use corrlab::hecke::{cross_ratio_of_rep, normalized_parameter, rep_from_cross_ratio, HeckeParams};
use corrlab::render::mating::{LAMBDA_MINUS, LAMBDA_PLUS};
use corrlab::render::{render_with_threads, GridSpec, JobSpec, LocusParams, Raster, RenderJob};
use corrlab::sampling::{disk_point, keyed_rng, random_involution, random_mobius, random_monic};

type Outcome = Result<String, String>;

const SEED: u64 = 20_240_601;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within_time(start: Instant, limit: f64) -> Result<f64, String> {
    let t = start.elapsed().as_secs_f64();
    ensure(t < limit, || format!("took {t:.1} s, limit {limit} s"))?;
    Ok(t)
}

fn group_relations() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for d in 2..=6usize {
        let mut rng = keyed_rng(SEED, d as u64);
        for _ in 0..200 {
            let kappa = random_kappa(&mut rng);
            let rep = rep_from_cross_ratio(&HeckeParams { d, kappa }).map_err(err)?;
            worst = worst.max(rep.relation_residual());
        }
    }
    ensure(worst < 1e-9, || format!("worst relation residual {worst:e}"))?;
    let t = within_time(start, 10.0)?;
    Ok(format!("1000 reps, worst residual {worst:.1e}, {t:.2} s"))
}

fn parametrization() -> Outcome {
    let mut rng = keyed_rng(SEED, 10);
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let d = 2 + i % 5;
        let kappa = random_kappa(&mut rng);
        let g = random_mobius(&mut rng);
        let x = normalized_parameter(kappa).map_err(err)?;
        let rep = rep_from_cross_ratio(&HeckeParams { d, kappa }).map_err(err)?;
        let conj = rep.conjugate(&g).map_err(err)?;
        let values = [
            normalized_parameter(kappa.inv()).map_err(err)?,
            normalized_parameter(cross_ratio_of_rep(&rep).map_err(err)?).map_err(err)?,
            normalized_parameter(cross_ratio_of_rep(&conj).map_err(err)?).map_err(err)?,
        ];
        for v in values {
            worst = worst.max((v - x).norm() / (1.0 + x.norm()));
        }
    }
    ensure(worst < 1e-9, || format!("worst relative deviation {worst:e}"))?;
    Ok(format!("500 trials, worst relative deviation {worst:.1e}"))
}

/// Fifty `J ∘ Cov₀^q` with random involution and random monic `q` of degree
/// 3 to 6, plus the mating family at the figure parameters.
fn corpus() -> Result<Vec<JCovCorrespondence>, String> {
    let mut out = Vec::new();
    for i in 0..50u64 {
        let mut rng = keyed_rng(SEED, 100 + i);
        let degree = rng.random_range(3..=6);
        let q = RationalMap::polynomial(random_monic(&mut rng, degree)).map_err(err)?;
        out.push(JCovCorrespondence::new(random_involution(&mut rng), q).map_err(err)?);
    }
    out.push(mating_family(&MatingFamilyParams::figure_example()).map_err(err)?);
    Ok(out)
}

fn correspondence_calculus() -> Outcome {
    let mut worst_tr: f64 = 0.0;
    let mut worst_eq: f64 = 0.0;
    for (i, f) in corpus()?.iter().enumerate() {
        worst_tr = worst_tr.max(time_reversal_check(f, 30, i as u64).map_err(err)?);
        worst_eq = worst_eq.max(equivalence_relation_check(f.q(), 30, i as u64).map_err(err)?);
    }
    ensure(worst_tr < 1e-8 && worst_eq < 1e-8, || {
        format!("time reversal {worst_tr:e}, equivalence {worst_eq:e}")
    })?;
    // Negative controls.
    let mut rng = keyed_rng(SEED, 200);
    let graph = MobiusGraph {
        map: random_mobius(&mut rng),
        involution: random_involution(&mut rng),
    };
    let graph_tr = time_reversal_check(&graph, 30, 0).map_err(err)?;
    ensure(graph_tr > 1e-3, || format!("Möbius graph passed time reversal ({graph_tr:e})"))?;
    let q = RationalMap::polynomial(random_monic(&mut rng, 4)).map_err(err)?;
    let no_diag = equivalence_relation_residual(&q, 30, 0, false).map_err(err)?;
    ensure(no_diag > 1e-3, || format!("Cov₀ without diagonal passed ({no_diag:e})"))?;
    let shift = MobiusMap::translation(C::new(0.3, 0.1));
    ensure(JCovCorrespondence::new(shift, q).is_err(), || "non-involution accepted".into())?;
    Ok(format!(
        "51 correspondences, time reversal {worst_tr:.1e}, equivalence {worst_eq:.1e}; \
         controls fail ({graph_tr:.2}, {no_diag:.2}, rejected)"
    ))
}

fn bidegree() -> Outcome {
    for (i, f) in corpus()?.iter().enumerate() {
        let got = bidegree_check(f, 30, i as u64).map_err(err)?;
        let d = f.d();
        ensure(got == (d, d), || format!("correspondence {i}: expected ({d},{d}), got {got:?}"))?;
        ensure(d + 1 == f.q().degree(), || format!("correspondence {i}: d = {d}"))?;
    }
    Ok("all 51 correspondences are d:d".into())
}

fn critical_fixed() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for f in corpus()? {
        let cov = JCovCorrespondence::deleted_covering(f.q().clone()).map_err(err)?;
        for (c, _) in critical_points(f.q()).map_err(err)? {
            worst = worst.max(membership_residual(&cov, c, c).map_err(err)?);
            count += 1;
        }
    }
    ensure(worst < 1e-8, || format!("worst membership residual {worst:e}"))?;
    Ok(format!("{count} critical points, worst residual {worst:.1e}"))
}

/// `φ(z)` for a monic polynomial with vanishing subleading coefficient, from
/// the product `z ∏ (f(zₙ)/zₙ^d)^{1/d^{n+1}}` on principal branches. Valid
/// where every factor stays in the right half plane.
fn bottcher_forward(f: &Polynomial, z: C) -> C {
    let d = f.degree() as f64;
    let mut log_phi = z.ln();
    let mut zn = z;
    let mut weight = 1.0 / d;
    for _ in 0..60 {
        let next = f.eval(zn);
        log_phi += weight * (next / zn.powf(d)).ln();
        zn = next;
        weight /= d;
        if zn.norm() > 1e40 {
            break;
        }
    }
    log_phi.exp()
}

fn bottcher_suite() -> Outcome {
    let mut worst_green: f64 = 0.0;
    for i in 0..20u64 {
        let mut rng = keyed_rng(SEED, 300 + i);
        let degree = 2 + (i as usize % 2);
        let f = random_monic(&mut rng, degree);
        let mut escaping = 0;
        while escaping < 500 {
            let z = disk_point(&mut rng, 4.0);
            let g = green_function(&f, z, 1000, None).map_err(err)?;
            if g <= 0.0 {
                continue;
            }
            escaping += 1;
            let gf = green_function(&f, f.eval(z), 1000, None).map_err(err)?;
            worst_green = worst_green.max((gf - degree as f64 * g).abs());
        }
    }
    ensure(worst_green < 1e-8, || format!("Green functional equation {worst_green:e}"))?;

    let f = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
    let t = 1.2;
    let annulus = fundamental_annulus(&f, t, 256, 24).map_err(err)?;
    let covering = annulus.covering_residual(&f);
    ensure(covering < 1e-6, || format!("annulus covering residual {covering:e}"))?;

    // j reflects the Böttcher angle on the outer boundary; the angle is read
    // back with the forward product.
    let mut worst_j: f64 = 0.0;
    for i in 0..64 {
        let theta = TAU * (i as f64 + 0.25) / 64.0;
        let z = bottcher_equipotential_point(&f, t * t, theta, 24).map_err(err)?;
        let jz = boundary_involution_j(&f, t, bottcher_forward(&f, z).arg()).map_err(err)?;
        let phi_jz = bottcher_forward(&f, jz);
        worst_j = worst_j.max((phi_jz - C::from_polar(t * t, -theta)).norm());
        let jjz = boundary_involution_j(&f, t, phi_jz.arg()).map_err(err)?;
        worst_j = worst_j.max((jjz - z).norm());
    }
    ensure(worst_j < 1e-8, || format!("j∘j residual {worst_j:e}"))?;
    Ok(format!(
        "Green {worst_green:.1e} over 10000 points, annulus {covering:.1e}, j∘j {worst_j:.1e}"
    ))
}

fn mandelbrot_oracle(grid: &GridSpec, max_iter: usize) -> Vec<bool> {
    let mut out = Vec::new();
    for j in 0..grid.pixels_y {
        for i in 0..grid.pixels_x {
            let c = grid.point(i, j);
            let r2 = (1.0 + c.norm()).max(2.0).powi(2);
            let (mut x, mut y) = (0.0f64, 0.0f64);
            let mut bounded = x * x + y * y <= r2;
            for _ in 0..max_iter {
                if !bounded {
                    break;
                }
                let nx = x * x - y * y + c.re;
                y = 2.0 * x * y + c.im;
                x = nx;
                bounded = x * x + y * y <= r2;
            }
            out.push(bounded);
        }
    }
    out
}

fn flip_symmetric(r: &Raster) -> bool {
    (0..r.height).all(|j| {
        (0..r.width).all(|i| r.class_at(i, j) == r.class_at(r.width - 1 - i, r.height - 1 - j))
    })
}

fn connectedness_loci() -> Outcome {
    let start = Instant::now();
    let grid = GridSpec::new(C::new(-0.5, 0.0), 3.0, 64, 64).map_err(err)?;
    let job = RenderJob::new(
        JobSpec::ConnectednessLocus(LocusParams {
            family: FamilySpec::Unicritical { d: 2 },
            max_iter: 200,
        }),
        grid,
    );
    let raster = render_with_threads(&job, None).map_err(err)?;
    let oracle = mandelbrot_oracle(&grid, 200);
    let mismatches = raster
        .classes
        .iter()
        .zip(&oracle)
        .filter(|(&c, &b)| (c == 1) != b)
        .count();
    ensure(mismatches == 0, || format!("{mismatches} pixels differ from the oracle"))?;

    let family = FamilySpec::Unicritical { d: 2 };
    for k in 0..100 {
        let c = -2.0 + 2.25 * k as f64 / 99.0;
        let inside = in_connectedness_locus(&family, C::new(c, 0.0), 5000, None).map_err(err)?;
        ensure(inside, || format!("real parameter {c} classified exterior"))?;
    }

    let grid = GridSpec::new(C::new(0.0, 0.0), 8.0, 160, 160).map_err(err)?;
    let job = RenderJob::new(
        JobSpec::ConnectednessLocus(LocusParams {
            family: FamilySpec::ParabolicCubic,
            max_iter: 1000,
        }),
        grid,
    );
    let butterfly = render_with_threads(&job, None).map_err(err)?;
    ensure(flip_symmetric(&butterfly), || "butterfly raster not symmetric under a -> -a".into())?;
    let t = within_time(start, 30.0)?;
    Ok(format!(
        "Mandelbrot 64x64 matches oracle ({} interior), [-2, 0.25] interior, butterfly symmetric; {t:.1} s",
        raster.count(1)
    ))
}

fn jobs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../jobs")
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.sha256"))
}

fn load_job(name: &str) -> Result<RenderJob, String> {
    let path = jobs_dir().join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    RenderJob::from_json(&text).map_err(err)
}

fn check_golden(name: &str, ppm: &[u8]) -> Result<(), String> {
    let digest = format!("{:x}", Sha256::digest(ppm));
    let path = golden_path(name);
    if std::env::var_os("CORRLAB_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).map_err(err)?;
        std::fs::write(&path, format!("{digest}\n")).map_err(err)?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path)
        .map_err(|e| format!("missing golden {}: {e}", path.display()))?;
    ensure(expected.trim() == digest, || format!("{name}: hash {digest} differs from golden"))
}

/// Every `from` pixel has a `to` pixel within one pixel of its mirror image.
fn flip_matches(r: &Raster, from: u8, to: u8) -> bool {
    let (w, h) = (r.width as i64, r.height as i64);
    (0..h).all(|j| {
        (0..w).all(|i| {
            if r.class_at(i as usize, j as usize) != from {
                return true;
            }
            let (mi, mj) = (w - 1 - i, h - 1 - j);
            (-1..=1).any(|dj| {
                (-1..=1).any(|di| {
                    let (x, y) = (mi + di, mj + dj);
                    x >= 0 && y >= 0 && x < w && y < h && r.class_at(x as usize, y as usize) == to
                })
            })
        })
    })
}

fn figure_reproductions() -> Outcome {
    let threads = rayon::current_num_threads();
    let mut notes = Vec::new();
    for name in [
        "fig1_mandelbrot",
        "fig1_multibrot5",
        "fig1_butterfly",
        "fig2_discreteness",
        "fig4_mating",
    ] {
        let job = load_job(name)?;
        ensure(job.grid.pixels_x == 512 && job.grid.pixels_y == 512, || format!("{name} is not 512x512"))?;
        let start = Instant::now();
        let raster = render_with_threads(&job, None).map_err(err)?;
        let t = within_time(start, 120.0)?;
        check_golden(name, &raster.to_ppm())?;
        if name == "fig4_mating" {
            let minus = raster.count(LAMBDA_MINUS);
            let plus = raster.count(LAMBDA_PLUS);
            ensure(minus > 0, || "Λ⁻ is empty".into())?;
            ensure(raster.is_connected(LAMBDA_MINUS), || "Λ⁻ is not pixel-connected".into())?;
            let diff = (minus as f64 - plus as f64).abs() / minus as f64;
            ensure(diff <= 0.01, || format!("Λ⁻ {minus} vs Λ⁺ {plus} pixels"))?;
            ensure(
                flip_matches(&raster, LAMBDA_MINUS, LAMBDA_PLUS)
                    && flip_matches(&raster, LAMBDA_PLUS, LAMBDA_MINUS),
                || "J-flip does not exchange Λ⁻ and Λ⁺".into(),
            )?;
            notes.push(format!("{name} {t:.1} s (Λ⁻ {minus} px, Λ⁺ {plus} px)"));
        } else {
            notes.push(format!("{name} {t:.1} s"));
        }
    }
    Ok(format!("{} on {threads} thread(s)", notes.join(", ")))
}

fn determinism() -> Outcome {
    let mut jobs = sample_jobs(96);
    jobs.push(load_job("fig4_mating")?);
    jobs.push(load_job("hecke_quasifuchsian")?);
    jobs.push(load_job("julia_basilica")?);
    for job in &jobs {
        let reference = render_with_threads(job, Some(1)).map_err(err)?.to_ppm();
        for threads in [2, 4, 7] {
            let again = render_with_threads(job, Some(threads)).map_err(err)?.to_ppm();
            ensure(again == reference, || {
                format!("{} differs between 1 and {threads} threads", job.kind().name())
            })?;
        }
    }
    Ok(format!("{} jobs identical at 1, 2, 4 and 7 threads", jobs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("group relations", group_relations),
        ("parametrization round-trip", parametrization),
        ("correspondence calculus", correspondence_calculus),
        ("bidegree", bidegree),
        ("fixed points are critical", critical_fixed),
        ("Böttcher suite", bottcher_suite),
        ("connectedness loci", connectedness_loci),
        ("figure reproductions", figure_reproductions),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        match run() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
