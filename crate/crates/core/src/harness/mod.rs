//! Config-driven experiment sweeps: every `(method, N, rep)` triple gets its
//! own seed, a quadrature rule and its exact squared error.

use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    gauss_hermite_tensor_nodes, grid_nodes, halton_nodes, herding_nodes, lvsq_rule, mc_nodes, sbq_rule, BaselineConfig,
};
use crate::error::{Error, Result};
use crate::quadrature::{solve_weights, squared_error, uniform_weight_rule, QuadratureRule};
use crate::rng::{derive_seed, RngStream};
use crate::sampling::sample_dpp;
use crate::spectral::{Integrand, KernelSpec};

mod records;
mod suites;

pub use records::{aggregate, fit_rate, fit_semilog, read_records, write_aggregate, write_records, AggregatePoint, RateFit};
pub use suites::{run_oracles, OracleConfig, OracleEntry, OracleOptions, OracleReport, Suite};

/// Header of the record CSV.
pub const CSV_HEADER: &str = "method,N,rep,seed,squared_error,wall_time_ms,status";

/// A node design paired with a weight rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method")]
pub enum Method {
    /// DPP nodes, optimal weights.
    DPPKQ,
    /// DPP nodes, uniform weights.
    DPPUQ,
    /// Leverage-score sampling with regularization `lambda`.
    LVSQ { lambda: f64 },
    Herding,
    SBQ,
    /// Uniform grid, optimal weights.
    UGBQ,
    /// Halton points, optimal weights.
    HaltonBQ,
    /// i.i.d. draws from the measure, uniform weights.
    MC,
    /// Tensor Gauss–Hermite nodes, optimal weights.
    GHBQ,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::LVSQ { lambda } => write!(f, "LVSQ({lambda})"),
            other => write!(f, "{other:?}"),
        }
    }
}

impl Method {
    /// Whether the rule depends on the seed. Seed-free methods run once per `N`.
    pub fn is_random(&self) -> bool {
        !matches!(self, Method::UGBQ | Method::HaltonBQ | Method::GHBQ)
    }

    fn check(&self, spec: &KernelSpec, g: &Integrand) -> Result<()> {
        let uniform = matches!(self, Method::DPPUQ | Method::MC | Method::Herding);
        if uniform && !g.is_constant_one() {
            return Err(Error::InvalidConfig(format!("{self} needs the constant integrand")));
        }
        match self {
            Method::LVSQ { lambda } if !(*lambda >= 0.0) => {
                Err(Error::InvalidConfig(format!("{self}: lambda must be non-negative")))
            }
            Method::LVSQ { .. } if !spec.family().is_periodic() => {
                Err(Error::InvalidConfig(format!("{self} needs a periodic kernel")))
            }
            Method::GHBQ if spec.family().is_periodic() => {
                Err(Error::InvalidConfig("GHBQ needs the Gaussian kernel".into()))
            }
            _ => Ok(()),
        }
    }

    /// Builds the quadrature rule for `n` nodes.
    pub fn build(
        &self,
        spec: &KernelSpec,
        n: usize,
        g: &Integrand,
        baselines: &BaselineConfig,
        rng: &mut RngStream,
    ) -> Result<QuadratureRule> {
        match *self {
            Method::DPPKQ => solve_weights(spec, &sample_dpp(spec, n, rng)?, g),
            Method::DPPUQ => uniform_weight_rule(spec, &sample_dpp(spec, n, rng)?, g),
            Method::LVSQ { lambda } => lvsq_rule(spec, n, lambda, g, rng),
            Method::Herding => uniform_weight_rule(spec, &herding_nodes(spec, n, g, baselines, rng)?, g),
            Method::SBQ => sbq_rule(spec, n, g, baselines, rng),
            Method::UGBQ => solve_weights(spec, &grid_nodes(spec, n)?, g),
            Method::HaltonBQ => solve_weights(spec, &halton_nodes(spec, n)?, g),
            Method::MC => uniform_weight_rule(spec, &mc_nodes(spec, n, rng), g),
            Method::GHBQ => solve_weights(spec, &gauss_hermite_tensor_nodes(spec, n)?, g),
        }
    }
}

fn default_true() -> bool {
    true
}

/// JSON experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec: KernelSpec,
    #[serde(default)]
    pub integrand: Integrand,
    pub methods: Vec<Method>,
    pub n_values: Vec<usize>,
    pub repetitions: usize,
    pub master_seed: u64,
    /// Where the record CSV goes; nothing is written when absent.
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub baselines: BaselineConfig,
    /// With `false`, every wall time is written as 0 so reruns are byte-identical.
    #[serde(default = "default_true")]
    pub record_wall_time: bool,
}

impl ExperimentConfig {
    pub fn new(spec: KernelSpec, methods: Vec<Method>, n_values: Vec<usize>, repetitions: usize, master_seed: u64) -> Self {
        Self {
            spec,
            integrand: Integrand::ConstantOne,
            methods,
            n_values,
            repetitions,
            master_seed,
            output_path: None,
            baselines: BaselineConfig::default(),
            record_wall_time: true,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("no methods".into()));
        }
        if self.n_values.is_empty() || self.n_values[0] == 0 {
            return Err(Error::InvalidConfig("n_values must be non-empty and positive".into()));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("n_values must be strictly increasing".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
        }
        self.baselines.validate()?;
        for m in &self.methods {
            m.check(&self.spec, &self.integrand)?;
        }
        Ok(())
    }

    /// All `(method, N, rep)` triples in output order.
    pub fn tasks(&self) -> Vec<(Method, usize, usize)> {
        let mut out = Vec::new();
        for &m in &self.methods {
            let reps = if m.is_random() { self.repetitions } else { 1 };
            for &n in &self.n_values {
                out.extend((0..reps).map(|rep| (m, n, rep)));
            }
        }
        out
    }
}

/// One row of the record CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub method: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub rep: usize,
    pub seed: u64,
    /// NaN when the rule could not be built.
    pub squared_error: f64,
    pub wall_time_ms: f64,
    /// `ok`, `jittered` when the Gram matrix needed a diagonal shift, or `error: ...`.
    pub status: String,
}

impl ExperimentRecord {
    pub fn is_ok(&self) -> bool {
        !self.status.starts_with("error")
    }
}

fn run_task(config: &ExperimentConfig, method: Method, n: usize, rep: usize) -> ExperimentRecord {
    let label = method.to_string();
    let seed = derive_seed(config.master_seed, &label, n, rep);
    let mut rng = RngStream::new(seed);
    let start = Instant::now();
    let outcome = method
        .build(&config.spec, n, &config.integrand, &config.baselines, &mut rng)
        .and_then(|rule| Ok((squared_error(&rule)?, rule.jittered())));
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let (squared_error, status) = match outcome {
        Ok((e, false)) => (e, "ok".to_string()),
        Ok((e, true)) => (e, "jittered".to_string()),
        Err(e) => (f64::NAN, format!("error: {e}")),
    };
    ExperimentRecord {
        method: label,
        n,
        rep,
        seed,
        squared_error,
        wall_time_ms: if config.record_wall_time { elapsed } else { 0.0 },
        status,
    }
}

/// Runs the sweep in parallel and returns records in task order. Failures
/// become records with an error status. Writes the CSV when the config has
/// an output path.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let records: Vec<ExperimentRecord> = config
        .tasks()
        .into_par_iter()
        .map(|(m, n, rep)| run_task(config, m, n, rep))
        .collect();
    if let Some(path) = &config.output_path {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        write_records(std::fs::File::create(path)?, &records)?;
    }
    Ok(records)
}
