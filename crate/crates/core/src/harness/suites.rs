use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::mc_nodes;
use crate::error::Result;
use crate::oracles::{
    cauchy_binet_sides, cos_product_statistic, elementary_symmetric, eigenvalue_rate_proxy, expected_cos_product,
    leverage_rank1_update, leverage_scores, maclaurin_check, principal_angles, theorem_bound,
};
use crate::quadrature::{solve_weights, squared_error};
use crate::rng::{derive_seed, RngStream};
use crate::sampling::sample_dpp;
use crate::spectral::{spectral_basis, truncate, Family, Integrand, KernelSpec};
use crate::stats::mean_stderr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    CosProduct,
    ErrorBound,
    FiniteRank,
    CauchyBinet,
    PrincipalAngles,
    Rank1,
    Maclaurin,
    RateProxy,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::CosProduct,
        Suite::ErrorBound,
        Suite::FiniteRank,
        Suite::CauchyBinet,
        Suite::PrincipalAngles,
        Suite::Rank1,
        Suite::Maclaurin,
        Suite::RateProxy,
    ];

    fn name(self) -> &'static str {
        match self {
            Suite::CosProduct => "cos_product",
            Suite::ErrorBound => "error_bound",
            Suite::FiniteRank => "finite_rank",
            Suite::CauchyBinet => "cauchy_binet",
            Suite::PrincipalAngles => "principal_angles",
            Suite::Rank1 => "rank1",
            Suite::Maclaurin => "maclaurin",
            Suite::RateProxy => "rate_proxy",
        }
    }
}

/// Sizes and sample counts for [`run_oracles`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleOptions {
    pub seed: u64,
    pub suites: Vec<Suite>,
    pub cos_product_n: Vec<usize>,
    pub cos_product_draws: usize,
    pub bound_n: Vec<usize>,
    pub bound_draws: usize,
    pub finite_rank_n: usize,
    pub finite_rank_trials: usize,
    /// Cases for each of the randomized identity checks.
    pub cases: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            suites: Suite::ALL.to_vec(),
            cos_product_n: vec![2, 3],
            cos_product_draws: 2000,
            bound_n: (5..=15).collect(),
            bound_draws: 200,
            finite_rank_n: 10,
            finite_rank_trials: 100,
            cases: 100,
        }
    }
}

/// One checked quantity. `bound` is the reference value or limit it was
/// compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleEntry {
    pub quantity: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub bound: Option<f64>,
    pub pass: bool,
}

/// JSON input of an oracle run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub spec: KernelSpec,
    #[serde(default)]
    pub options: OracleOptions,
    /// Where the JSON report goes; nothing is written when absent.
    #[serde(default)]
    pub output_path: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub spec: KernelSpec,
    pub entries: Vec<OracleEntry>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

fn entry(quantity: String, value: f64, stderr: Option<f64>, bound: Option<f64>, pass: bool) -> OracleEntry {
    OracleEntry {
        quantity,
        value,
        stderr,
        bound,
        pass,
    }
}

/// Runs `f` for `count` independent streams and returns results in stream order.
fn draws<T: Send>(seed: u64, label: &str, n: usize, count: usize, f: impl Fn(&mut RngStream) -> T + Sync) -> Vec<T> {
    (0..count)
        .into_par_iter()
        .map(|i| f(&mut RngStream::new(derive_seed(seed, label, n, i))))
        .collect()
}

fn random_matrix(rows: usize, cols: usize, rng: &mut RngStream) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.normal())
}

fn cos_product(spec: &KernelSpec, opts: &OracleOptions) -> Vec<OracleEntry> {
    opts.cos_product_n
        .iter()
        .map(|&n| {
            let basis = spectral_basis(spec, n);
            let stats = draws(opts.seed, "cos_product", n, opts.cos_product_draws, |rng| {
                sample_dpp(spec, n, rng).and_then(|x| cos_product_statistic(&basis, &x))
            });
            let quantity = format!("cos_product(N={n})");
            let exact = expected_cos_product(spec, n, None);
            let Ok(stats) = stats.into_iter().collect::<Result<Vec<f64>>>() else {
                return entry(quantity, f64::NAN, None, Some(exact.value), false);
            };
            let (mean, se) = mean_stderr(&stats);
            let slack = 3.0 * se + exact.error_estimate + 1e-8 * exact.value;
            entry(quantity, mean, Some(se), Some(exact.value), (mean - exact.value).abs() <= slack)
        })
        .collect()
}

fn dpp_errors(spec: &KernelSpec, n: usize, count: usize, seed: u64, label: &str) -> Result<Vec<f64>> {
    let g = Integrand::ConstantOne;
    draws(seed, label, n, count, |rng| {
        squared_error(&solve_weights(spec, &sample_dpp(spec, n, rng)?, &g)?)
    })
    .into_iter()
    .collect()
}

fn error_bound(spec: &KernelSpec, opts: &OracleOptions) -> Vec<OracleEntry> {
    let g = Integrand::ConstantOne;
    opts.bound_n
        .iter()
        .map(|&n| {
            let bound = theorem_bound(spec, n, g.projected_l1_norm(spec, n));
            let quantity = format!("error_bound(N={n})");
            match dpp_errors(spec, n, opts.bound_draws, opts.seed, "error_bound") {
                Ok(errs) => {
                    let (mean, se) = mean_stderr(&errs);
                    entry(quantity, mean, Some(se), Some(bound), mean <= bound)
                }
                Err(_) => entry(quantity, f64::NAN, None, Some(bound), false),
            }
        })
        .collect()
}

fn finite_rank(spec: &KernelSpec, opts: &OracleOptions) -> Vec<OracleEntry> {
    let n = opts.finite_rank_n;
    let value = truncate(spec, n)
        .and_then(|t| dpp_errors(&t, n, opts.finite_rank_trials, opts.seed, "finite_rank"))
        .map(|errs| errs.into_iter().fold(0.0, f64::max))
        .unwrap_or(f64::NAN);
    vec![entry(format!("finite_rank(N={n})"), value, None, Some(1e-8), value <= 1e-8)]
}

fn cauchy_binet(spec: &KernelSpec, opts: &OracleOptions) -> Vec<OracleEntry> {
    let slacks = draws(opts.seed, "cauchy_binet", 0, opts.cases, |rng| {
        let n = 1 + rng.below(8);
        let basis = spectral_basis(spec, n);
        cauchy_binet_sides(&basis, &mc_nodes(spec, n, rng)).map(|(lhs, rhs)| lhs - rhs)
    });
    let value = slacks.into_iter().map(|s| s.unwrap_or(f64::NAN)).fold(f64::INFINITY, f64::min);
    vec![entry("cauchy_binet".into(), value, None, Some(-1e-8), value >= -1e-8)]
}

fn principal_angle_suite(opts: &OracleOptions) -> Vec<OracleEntry> {
    let checks = draws(opts.seed, "principal_angles", 0, opts.cases, |rng| {
        let k = 1 + rng.below(8);
        let a = random_matrix(20, k, rng).qr().q();
        let b = random_matrix(20, k, rng).qr().q();
        let w = a.transpose() * b;
        let cos = principal_angles(&w);
        let prod: f64 = cos.iter().map(|c| c * c).product();
        let det2 = w.determinant().powi(2);
        let last = cos[k - 1];
        let chain_ok = 1.0 / (last * last) - 1.0 <= 1.0 / prod - 1.0 + 1e-12 * (1.0 / prod);
        let rel = (prod - det2).abs() / det2.max(1e-300);
        if chain_ok { rel } else { f64::INFINITY }
    });
    let value = checks.into_iter().fold(0.0, f64::max);
    vec![entry("principal_angles".into(), value, None, Some(1e-8), value <= 1e-8)]
}

fn rank1(opts: &OracleOptions) -> Vec<OracleEntry> {
    let diffs = draws(opts.seed, "rank1", 0, opts.cases, |rng| {
        let n = 2 + rng.below(5);
        let m = n + 1 + rng.below(8);
        let a = random_matrix(n, m, rng);
        let i = rng.below(m);
        let rho = 0.01 + 5.0 * rng.uniform();
        let mut scaled = a.clone();
        scaled.column_mut(i).scale_mut((1.0 + rho).sqrt());
        match (leverage_rank1_update(&a, i, rho), leverage_scores(&scaled)) {
            (Ok(p), Ok(d)) => p.iter().zip(&d.scores).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
            _ => f64::INFINITY,
        }
    });
    let value = diffs.into_iter().fold(0.0, f64::max);
    vec![entry("rank1".into(), value, None, Some(1e-10), value <= 1e-10)]
}

fn maclaurin(opts: &OracleOptions) -> Vec<OracleEntry> {
    let ratios = draws(opts.seed, "maclaurin", 0, opts.cases, |rng| {
        let len = if rng.below(2) == 0 { 12 } else { 20 };
        let nu: Vec<f64> = (0..len).map(|_| rng.uniform()).collect();
        let ell = 2 + rng.below(9);
        let (p, bound) = maclaurin_check(&nu, ell);
        if len <= 12 {
            let brute: f64 = (0u32..1 << len)
                .filter(|m| m.count_ones() as usize == ell)
                .map(|m| (0..len).filter(|i| m >> i & 1 == 1).map(|i| nu[i]).product::<f64>())
                .sum();
            if (brute - elementary_symmetric(&nu, ell)[ell]).abs() > 1e-12 * brute {
                return f64::INFINITY;
            }
        }
        p / bound
    });
    let value = ratios.into_iter().fold(0.0, f64::max);
    vec![entry("maclaurin".into(), value, None, Some(1.0), value <= 1.0)]
}

fn rate_proxy(spec: &KernelSpec) -> Vec<OracleEntry> {
    let ns: Vec<usize> = match spec.family() {
        Family::GaussianHermite { .. } => (10..=200).step_by(10).collect(),
        _ => (50..=500).step_by(25).collect(),
    };
    let logs: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let r = eigenvalue_rate_proxy(spec, n);
            (r.sigma_next / r.proxy).ln()
        })
        .collect();
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let value = hi - lo;
    vec![entry("rate_proxy".into(), value, None, Some(2.0), value < 2.0)]
}

/// Runs the selected suites on `spec`. Failed checks are entries with
/// `pass = false`, never errors.
pub fn run_oracles(spec: &KernelSpec, opts: &OracleOptions) -> OracleReport {
    let base = spec.base();
    let mut entries = Vec::new();
    for &suite in &opts.suites {
        let found = match suite {
            Suite::CosProduct => cos_product(spec, opts),
            Suite::ErrorBound => error_bound(spec, opts),
            Suite::FiniteRank => finite_rank(&base, opts),
            Suite::CauchyBinet => cauchy_binet(spec, opts),
            Suite::PrincipalAngles => principal_angle_suite(opts),
            Suite::Rank1 => rank1(opts),
            Suite::Maclaurin => maclaurin(opts),
            Suite::RateProxy => rate_proxy(&base),
        };
        debug_assert!(found.iter().all(|e| e.quantity.starts_with(suite.name())));
        entries.extend(found);
    }
    OracleReport { spec: spec.clone(), entries }
}
