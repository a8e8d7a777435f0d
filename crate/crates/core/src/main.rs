use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C;
use serde_json::{json, Value};

use corrlab::algebra::{MobiusMap, Polynomial, RationalMap, SpherePoint};
use corrlab::check::{run_suite, SUITES};
use corrlab::correspondence::{mating_family, Correspondence, JCovCorrespondence, MatingFamilyParams};
use corrlab::dynamics::{bottcher_equipotential_point, escape_time, green_function, DEFAULT_DEPTH};
use corrlab::hecke::{apply_word, GroupWord};
use corrlab::render::{hecke_rep_for, render_to_files, RenderJob};
use corrlab::Error;

#[derive(Parser)]
#[command(name = "corrlab", version, about = "Correspondence, Hecke group and polynomial dynamics laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a JSON job to a PPM image and a JSON sidecar.
    Render {
        job: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, env = "CORRLAB_THREADS")]
        threads: Option<usize>,
        /// Overrides the seed stored in the job.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the invariant suites.
    Check {
        #[arg(long)]
        suite: Option<String>,
    },
    /// One-shot evaluations printed as JSON.
    Probe {
        #[command(subcommand)]
        kind: Probe,
    },
}

#[derive(Subcommand)]
enum Probe {
    /// Forward and backward images under `J ∘ Cov₀^q`.
    Forward {
        #[command(flatten)]
        corr: CorrArgs,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Apply a group word of a Hecke representation to a point.
    Word {
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Cross-ratio parameter; the standard Hecke group when omitted.
        #[arg(long, allow_hyphen_values = true)]
        kappa: Option<String>,
        /// Letters such as `sr2sr`.
        #[arg(long)]
        word: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Green function and escape time of a polynomial.
    Green {
        /// Coefficients, constant term first, as a JSON list of `[re, im]`.
        #[arg(long)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
    },
    /// Point on an equipotential via the inverse Böttcher coordinate.
    Bottcher {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
}

#[derive(Args)]
struct CorrArgs {
    /// Deleted covering of this polynomial, composed with `z ↦ -z`; the
    /// mating family otherwise.
    #[arg(long)]
    poly: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
}

fn parse_complex(text: &str) -> Result<SpherePoint, Error> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("inf") || t == "∞" {
        return Ok(SpherePoint::Infinity);
    }
    let parts: Vec<&str> = t.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Config(format!("bad number {s:?} in {text:?}")));
    match parts.as_slice() {
        [re] => Ok(SpherePoint::finite(C::new(num(re)?, 0.0))),
        [re, im] => Ok(SpherePoint::finite(C::new(num(re)?, num(im)?))),
        _ => Err(Error::Config(format!("expected `re,im` or `inf`, got {text:?}"))),
    }
}

fn parse_finite(text: &str) -> Result<C, Error> {
    parse_complex(text)?
        .as_complex()
        .ok_or_else(|| Error::Config(format!("{text:?} must be finite")))
}

fn parse_poly(text: &str) -> Result<Polynomial, Error> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("polynomial: {e}")))
}

fn points_json(points: &[SpherePoint]) -> Value {
    serde_json::to_value(points).expect("points serialize")
}

fn probe(kind: Probe) -> Result<Value, Error> {
    match kind {
        Probe::Forward { corr, z } => {
            let z = parse_complex(&z)?;
            let f = match corr.poly {
                Some(p) => {
                    let q = RationalMap::polynomial(parse_poly(&p)?)?;
                    JCovCorrespondence::new(MobiusMap::negation(), q)?
                }
                None => {
                    let mut params = MatingFamilyParams::figure_example();
                    if let Some(a) = corr.a {
                        params.a = parse_finite(&a)?;
                    }
                    if let Some(k) = corr.k {
                        params.k = parse_finite(&k)?;
                    }
                    mating_family(&params)?
                }
            };
            Ok(json!({
                "probe": "forward",
                "z": z,
                "forward": points_json(&f.forward_image(z)?),
                "backward": points_json(&f.backward_image(z)?),
                "cov0": points_json(&f.cov0(z)?),
            }))
        }
        Probe::Word { d, kappa, word, z } => {
            let kappa = kappa.as_deref().map(parse_finite).transpose()?;
            let rep = hecke_rep_for(d, kappa)?;
            let w = GroupWord::parse(d, &word)?;
            let z = parse_complex(&z)?;
            Ok(json!({
                "probe": "word",
                "word": w.to_string(),
                "z": z,
                "image": apply_word(&rep, &w, z),
            }))
        }
        Probe::Green { poly, z, max_iter } => {
            let f = parse_poly(&poly)?;
            let z = parse_finite(&z)?;
            let g = green_function(&f, z, max_iter, None)?;
            let escape = escape_time(&f, z, max_iter, None);
            Ok(json!({ "probe": "green", "z": [z.re, z.im], "green": g, "escape": escape }))
        }
        Probe::Bottcher { poly, t, theta, depth } => {
            let f = parse_poly(&poly)?;
            let w = bottcher_equipotential_point(&f, t, theta, depth)?;
            Ok(json!({ "probe": "bottcher", "t": t, "theta": theta, "point": [w.re, w.im] }))
        }
    }
}

/// Prints a line, ignoring a closed stdout.
fn out(args: std::fmt::Arguments) {
    let _ = writeln!(std::io::stdout(), "{args}");
}

fn exit_for(e: &Error) -> ExitCode {
    match e {
        Error::Config(_) | Error::InvalidWord(_) => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn render(job: PathBuf, out: PathBuf, threads: Option<usize>, seed: Option<u64>) -> Result<(), Error> {
    let text = std::fs::read_to_string(&job).map_err(|e| Error::Config(format!("{}: {e}", job.display())))?;
    let mut job = RenderJob::from_json(&text)?;
    if let Some(s) = seed {
        job = job.with_seed(s);
    }
    let meta = render_to_files(&job, &out, threads)?;
    eprintln!(
        "{} {}x{} in {:.0} ms -> {}",
        job.kind().name(),
        meta.width,
        meta.height,
        meta.elapsed_ms,
        out.display()
    );
    Ok(())
}

fn check(suite: Option<String>) -> Result<bool, Error> {
    let names: Vec<String> = match suite {
        Some(s) => vec![s],
        None => SUITES.iter().map(|s| s.to_string()).collect(),
    };
    let mut all_ok = true;
    for name in names {
        let start = Instant::now();
        let report = run_suite(&name)?;
        out(format_args!(
            "{:<16} {} passed {:>4} failed {:>3} ({:.1} s)",
            report.name,
            if report.ok() { "PASS" } else { "FAIL" },
            report.passed,
            report.failed,
            start.elapsed().as_secs_f64()
        ));
        for f in &report.failures {
            out(format_args!("    {f}"));
        }
        all_ok &= report.ok();
    }
    Ok(all_ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Render { job, out, threads, seed } => render(job, out, threads, seed).map(|_| true),
        Command::Check { suite } => check(suite),
        Command::Probe { kind } => probe(kind).map(|v| {
            out(format_args!("{}", serde_json::to_string_pretty(&v).expect("json")));
            true
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("corrlab: {e}");
            exit_for(&e)
        }
    }
}
