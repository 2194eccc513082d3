use super::{candidate_pool, BaselineConfig};
use crate::error::{Error, Result};
use crate::quadrature::{solve_weights, QuadratureRule};
use crate::rng::RngStream;
use crate::sampling::{NodeSet, Provenance};
use crate::spectral::{kernel_eval, mean_element_eval, Integrand, KernelSpec};

/// Pool points with their mean-element and diagonal kernel values.
struct Pool {
    points: NodeSet,
    mean: Vec<f64>,
    diag: Vec<f64>,
    used: Vec<bool>,
}

impl Pool {
    fn new(spec: &KernelSpec, g: &Integrand, config: &BaselineConfig, rng: &mut RngStream) -> Result<Self> {
        config.validate()?;
        let points = candidate_pool(spec, config.candidate_pool_size, rng);
        let mean = points.points().map(|x| mean_element_eval(spec, g, x)).collect();
        let diag = points.points().map(|x| kernel_eval(spec, x, x)).collect();
        let used = vec![false; points.len()];
        Ok(Self { points, mean, diag, used })
    }

    /// Index of the unused candidate with the smallest score; ties go to
    /// the earliest candidate.
    fn argmin(&self, score: impl Fn(usize) -> f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in (0..self.points.len()).filter(|&i| !self.used[i]) {
            let s = score(i);
            if s.is_finite() && best.is_none_or(|(_, b)| s < b) {
                best = Some((i, s));
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Kernel herding: greedily add the candidate minimizing the worst-case
/// error of the uniform-weight rule `(1/t) Σ k(x_j, ·)`.
pub fn herding_nodes(
    spec: &KernelSpec,
    n: usize,
    g: &Integrand,
    config: &BaselineConfig,
    rng: &mut RngStream,
) -> Result<NodeSet> {
    if !g.is_constant_one() {
        return Err(Error::UnsupportedIntegrand);
    }
    let mut pool = Pool::new(spec, g, config, rng)?;
    if n > pool.points.len() {
        return Err(Error::InvalidConfig("candidate pool smaller than the node count".into()));
    }
    let mut nodes = NodeSet::empty(spec.dim(), Provenance::Herding, rng.seed());
    // cross[i] = Σ_{selected j} k(x_j, candidate i)
    let mut cross = vec![0.0; pool.points.len()];
    for t in 1..=n {
        let tf = t as f64;
        let pick = pool
            .argmin(|i| -2.0 / tf * pool.mean[i] + (2.0 * cross[i] + pool.diag[i]) / (tf * tf))
            .expect("pool has unused candidates");
        pool.used[pick] = true;
        let x = pool.points.point(pick).to_vec();
        for (i, c) in cross.iter_mut().enumerate() {
            *c += kernel_eval(spec, &x, pool.points.point(i));
        }
        nodes.push(&x);
    }
    Ok(nodes)
}

/// Sequential Bayesian quadrature: greedily add the candidate that most
/// reduces the optimal-weight error, then solve for optimal weights.
pub fn sbq_rule(
    spec: &KernelSpec,
    n: usize,
    g: &Integrand,
    config: &BaselineConfig,
    rng: &mut RngStream,
) -> Result<QuadratureRule> {
    let mut pool = Pool::new(spec, g, config, rng)?;
    let size = pool.points.len();
    if n > size {
        return Err(Error::InvalidConfig("candidate pool smaller than the node count".into()));
    }
    let jitter = config.sbq_jitter;
    // Incremental Cholesky of the jittered Gram matrix K_t = L Lᵀ:
    // proj[i] = L⁻¹ k_t(x_i) for every candidate, alpha = L⁻¹ μ_t.
    let mut proj: Vec<Vec<f64>> = vec![Vec::with_capacity(n); size];
    let mut alpha: Vec<f64> = Vec::with_capacity(n);
    let mut nodes = NodeSet::empty(spec.dim(), Provenance::SBQ, rng.seed());
    for _ in 0..n {
        let gain = |i: usize| {
            let var = pool.diag[i] + jitter - proj[i].iter().map(|v| v * v).sum::<f64>();
            if var <= 0.0 {
                return f64::INFINITY;
            }
            let r = pool.mean[i] - proj[i].iter().zip(&alpha).map(|(a, b)| a * b).sum::<f64>();
            -(r * r) / var
        };
        let pick = pool.argmin(gain).ok_or(Error::SingularGram)?;
        pool.used[pick] = true;
        let row = proj[pick].clone();
        let pivot = (pool.diag[pick] + jitter - row.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let a = (pool.mean[pick] - row.iter().zip(&alpha).map(|(a, b)| a * b).sum::<f64>()) / pivot;
        alpha.push(a);
        let x = pool.points.point(pick).to_vec();
        for (i, p) in proj.iter_mut().enumerate() {
            let k = kernel_eval(spec, &x, pool.points.point(i));
            let v = (k - p.iter().zip(&row).map(|(a, b)| a * b).sum::<f64>()) / pivot;
            p.push(v);
        }
        nodes.push(&x);
    }
    solve_weights(spec, &nodes, g)
}
