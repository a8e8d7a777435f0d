use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::grid::GridSpec;
use crate::algebra::Polynomial;
use crate::correspondence::MatingFamilyParams;
use crate::dynamics::{FamilySpec, DEFAULT_MAX_ITER};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    ConnectednessLocus,
    FilledJulia,
    HeckeLimitSet,
    DiscretenessScan,
    MatingLimitSet,
}

impl JobKind {
    pub fn name(&self) -> &'static str {
        match self {
            JobKind::ConnectednessLocus => "connectedness_locus",
            JobKind::FilledJulia => "filled_julia",
            JobKind::HeckeLimitSet => "hecke_limit_set",
            JobKind::DiscretenessScan => "discreteness_scan",
            JobKind::MatingLimitSet => "mating_limit_set",
        }
    }
}

fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocusParams {
    pub family: FamilySpec,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JuliaParams {
    /// Coefficients in ascending degree.
    pub poly: Polynomial,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_word_len() -> usize {
    40
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeckeLimitParams {
    pub d: usize,
    /// Cross-ratio of the representation; the standard Hecke group when
    /// absent.
    #[serde(default)]
    pub kappa: Option<Complex64>,
    pub n_points: usize,
    #[serde(default = "default_word_len")]
    pub word_len: usize,
}

fn default_scan_len() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretenessParams {
    pub d: usize,
    #[serde(default = "default_scan_len")]
    pub max_word_len: usize,
}

fn default_depth() -> usize {
    60
}

fn default_max_nodes() -> usize {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatingParams {
    pub a: Complex64,
    pub k: Complex64,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_max_nodes")]
    pub max_nodes: usize,
    /// Radius of the trap disk; chosen from the critical points when absent.
    #[serde(default)]
    pub trap_radius: Option<f64>,
}

impl MatingParams {
    pub fn family(&self) -> MatingFamilyParams {
        MatingFamilyParams { a: self.a, k: self.k }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum JobSpec {
    ConnectednessLocus(LocusParams),
    FilledJulia(JuliaParams),
    HeckeLimitSet(HeckeLimitParams),
    DiscretenessScan(DiscretenessParams),
    MatingLimitSet(MatingParams),
}

impl JobSpec {
    pub fn kind(&self) -> JobKind {
        match self {
            JobSpec::ConnectednessLocus(_) => JobKind::ConnectednessLocus,
            JobSpec::FilledJulia(_) => JobKind::FilledJulia,
            JobSpec::HeckeLimitSet(_) => JobKind::HeckeLimitSet,
            JobSpec::DiscretenessScan(_) => JobKind::DiscretenessScan,
            JobSpec::MatingLimitSet(_) => JobKind::MatingLimitSet,
        }
    }
}

/// A complete, serializable description of one raster.
///
/// On disk:
///
/// ```json
/// { "schema_version": 1, "kind": "connectedness_locus",
///   "params": { "family": { "kind": "unicritical", "d": 2 }, "max_iter": 1000 },
///   "grid": { "center": [-0.5, 0.0], "width": 3.0, "pixels_x": 512, "pixels_y": 512 },
///   "seed": 0 }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJob", into = "RawJob")]
pub struct RenderJob {
    pub spec: JobSpec,
    pub grid: GridSpec,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    schema_version: u32,
    kind: JobKind,
    params: Value,
    grid: GridSpec,
    #[serde(default)]
    seed: u64,
}

fn parse_params<T: serde::de::DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Config(format!("params: {e}")))
}

impl TryFrom<RawJob> for RenderJob {
    type Error = Error;

    fn try_from(raw: RawJob) -> Result<Self> {
        if raw.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                raw.schema_version
            )));
        }
        let spec = match raw.kind {
            JobKind::ConnectednessLocus => JobSpec::ConnectednessLocus(parse_params(raw.params)?),
            JobKind::FilledJulia => JobSpec::FilledJulia(parse_params(raw.params)?),
            JobKind::HeckeLimitSet => JobSpec::HeckeLimitSet(parse_params(raw.params)?),
            JobKind::DiscretenessScan => JobSpec::DiscretenessScan(parse_params(raw.params)?),
            JobKind::MatingLimitSet => JobSpec::MatingLimitSet(parse_params(raw.params)?),
        };
        let job = RenderJob {
            spec,
            grid: raw.grid,
            seed: raw.seed,
        };
        job.validate()?;
        Ok(job)
    }
}

impl From<RenderJob> for RawJob {
    fn from(job: RenderJob) -> Self {
        let kind = job.spec.kind();
        let params = match job.spec {
            JobSpec::ConnectednessLocus(p) => serde_json::to_value(p),
            JobSpec::FilledJulia(p) => serde_json::to_value(p),
            JobSpec::HeckeLimitSet(p) => serde_json::to_value(p),
            JobSpec::DiscretenessScan(p) => serde_json::to_value(p),
            JobSpec::MatingLimitSet(p) => serde_json::to_value(p),
        }
        .expect("params serialize");
        RawJob {
            schema_version: SCHEMA_VERSION,
            kind,
            params,
            grid: job.grid,
            seed: job.seed,
        }
    }
}

impl RenderJob {
    pub fn new(spec: JobSpec, grid: GridSpec) -> Self {
        Self { spec, grid, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn kind(&self) -> JobKind {
        self.spec.kind()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawJob = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("job serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        let cfg = |e: Error| Error::Config(e.to_string());
        match &self.spec {
            JobSpec::ConnectednessLocus(p) => {
                if matches!(p.family, FamilySpec::Fixed { .. }) {
                    return Err(Error::Config(
                        "connectedness_locus needs a parametrized family".into(),
                    ));
                }
                p.family.validate().map_err(cfg)
            }
            JobSpec::FilledJulia(p) => FamilySpec::Fixed { poly: p.poly.clone() }.validate().map_err(cfg),
            JobSpec::HeckeLimitSet(p) => {
                if p.d < 2 {
                    return Err(Error::Config("d must be at least 2".into()));
                }
                Ok(())
            }
            JobSpec::DiscretenessScan(p) => {
                if p.d < 2 {
                    return Err(Error::Config("d must be at least 2".into()));
                }
                Ok(())
            }
            JobSpec::MatingLimitSet(p) => {
                if let Some(r) = p.trap_radius {
                    if !(r > 0.0 && r.is_finite()) {
                        return Err(Error::Config("trap_radius must be positive".into()));
                    }
                }
                p.family().coordinate_map().map(|_| ()).map_err(cfg)
            }
        }
    }
}
