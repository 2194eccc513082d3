//! Competing node designs and weight rules.

mod greedy;
mod pool;

pub use greedy::{herding_nodes, sbq_rule};
pub use pool::candidate_pool;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::gauss_hermite_normal;
use crate::quadrature::{gram_matrix, mean_vector, solve_weights, QuadratureRule};
use crate::rng::RngStream;
use crate::sampling::{NodeSet, Provenance};
use crate::spectral::{Family, Integrand, KernelSpec};

/// Tuning shared by the greedy baselines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    /// Number of candidates scanned by herding and SBQ at every step.
    pub candidate_pool_size: usize,
    /// Ridge added to the Gram diagonal while SBQ selects nodes.
    pub sbq_jitter: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            candidate_pool_size: 4096,
            sbq_jitter: 1e-10,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.candidate_pool_size < 64 {
            return Err(Error::InvalidConfig("candidate_pool_size must be at least 64".into()));
        }
        if !(self.sbq_jitter > 0.0) {
            return Err(Error::InvalidConfig("sbq_jitter must be positive".into()));
        }
        Ok(())
    }
}

fn require_periodic(spec: &KernelSpec, what: &str) -> Result<()> {
    if spec.family().is_periodic() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("{what} needs a periodic (Sobolev or Korobov) kernel")))
    }
}

/// `n` i.i.d. draws from `dω`.
pub fn mc_nodes(spec: &KernelSpec, n: usize, rng: &mut RngStream) -> NodeSet {
    let d = spec.dim();
    let coords = match *spec.family() {
        Family::GaussianHermite { sigma, .. } => (0..n * d).map(|_| sigma * rng.normal()).collect(),
        _ => (0..n * d).map(|_| rng.uniform()).collect(),
    };
    NodeSet::new(d, coords, Provenance::IID, rng.seed())
}

/// Leverage-score quadrature with the uniform proposal.
///
/// Nodes are i.i.d. uniform; weights solve the ridge system
/// `(K + λ N I) w = μ`. With `λ = 0` this is the optimal-weight rule.
pub fn lvsq_rule(spec: &KernelSpec, n: usize, lambda: f64, g: &Integrand, rng: &mut RngStream) -> Result<QuadratureRule> {
    require_periodic(spec, "LVSQ")?;
    if !(lambda >= 0.0) {
        return Err(Error::InvalidConfig("lambda must be non-negative".into()));
    }
    let nodes = mc_nodes(spec, n, rng);
    if lambda == 0.0 {
        return solve_weights(spec, &nodes, g);
    }
    let mut k = gram_matrix(spec, &nodes);
    for i in 0..n {
        k[(i, i)] += lambda * n as f64;
    }
    let chol = k.cholesky().ok_or(Error::SingularGram)?;
    let w: DVector<f64> = chol.solve(&mean_vector(spec, g, &nodes));
    QuadratureRule::new(spec.clone(), nodes, w.iter().copied().collect(), g.clone())
}

/// Cell-centred uniform grid. In `d` dimensions the `m^d` product grid with
/// `m = ⌈N^{1/d}⌉` is truncated to its first `N` points in row-major order.
pub fn grid_nodes(spec: &KernelSpec, n: usize) -> Result<NodeSet> {
    require_periodic(spec, "the uniform grid")?;
    let d = spec.dim();
    let mut m = (n as f64).powf(1.0 / d as f64).round() as usize;
    while m.pow(d as u32) < n {
        m += 1;
    }
    let mut coords = Vec::with_capacity(n * d);
    for i in 0..n {
        let mut rest = i;
        let mut digits = vec![0usize; d];
        for k in (0..d).rev() {
            digits[k] = rest % m;
            rest /= m;
        }
        coords.extend(digits.iter().map(|&j| (j as f64 + 0.5) / m as f64));
    }
    Ok(NodeSet::new(d, coords, Provenance::Grid, 0))
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut x = 0.0;
    let step = inv;
    while i > 0 {
        x += (i % base) as f64 * inv;
        i /= base;
        inv *= step;
    }
    x
}

/// First `n` Halton points (indices `1..=n`), bases 2, 3, 5, ...
pub fn halton_nodes(spec: &KernelSpec, n: usize) -> Result<NodeSet> {
    require_periodic(spec, "the Halton sequence")?;
    let d = spec.dim();
    if d > PRIMES.len() {
        return Err(Error::Unsupported(format!("Halton points in dimension {d}")));
    }
    let coords = (1..=n as u64)
        .flat_map(|i| PRIMES[..d].iter().map(move |&b| radical_inverse(i, b)))
        .collect();
    Ok(NodeSet::new(d, coords, Provenance::Halton, 0))
}

/// Tensor product of the `m`-point Gauss–Hermite rule for `N(0, σ²)`,
/// where `N = m^d`.
pub fn gauss_hermite_tensor_nodes(spec: &KernelSpec, n: usize) -> Result<NodeSet> {
    let (sigma, d) = match *spec.family() {
        Family::GaussianHermite { sigma, d, .. } => (sigma, d),
        _ => return Err(Error::Unsupported("Gauss–Hermite nodes need the Gaussian kernel".into())),
    };
    let m = (n as f64).powf(1.0 / d as f64).round() as usize;
    if m == 0 || m.pow(d as u32) != n {
        return Err(Error::NotAPower { n, d });
    }
    let (x, _) = gauss_hermite_normal(m, sigma);
    let mut coords = Vec::with_capacity(n * d);
    for i in 0..n {
        let mut rest = i;
        let mut digits = vec![0usize; d];
        for k in (0..d).rev() {
            digits[k] = rest % m;
            rest /= m;
        }
        coords.extend(digits.iter().map(|&j| x[j]));
    }
    Ok(NodeSet::new(d, coords, Provenance::GaussHermiteTensor, 0))
}
