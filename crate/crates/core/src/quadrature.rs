//! Quadrature rules, optimal weights and exact RKHS errors.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::NodeSet;
use crate::spectral::{kernel_eval, mean_element_eval, mean_element_norm_sq, Integrand, KernelSpec};

/// Squared errors down to this negative value are rounding noise.
const NEGATIVE_CLAMP: f64 = -1e-10;
/// Relative size of the diagonal jitter used on a failed factorization.
const JITTER: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Warning {
    /// The Gram matrix needed diagonal jitter to factorize.
    JitteredGram,
}

/// Nodes, weights and the integrand they target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub spec: KernelSpec,
    pub nodes: NodeSet,
    pub weights: Vec<f64>,
    pub g: Integrand,
    #[serde(default)]
    pub warnings: Vec<Warning>,
}

impl QuadratureRule {
    pub fn new(spec: KernelSpec, nodes: NodeSet, weights: Vec<f64>, g: Integrand) -> Result<Self> {
        if weights.len() != nodes.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                found: weights.len(),
            });
        }
        Ok(Self {
            spec,
            nodes,
            weights,
            g,
            warnings: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn jittered(&self) -> bool {
        self.warnings.contains(&Warning::JitteredGram)
    }
}

/// `K(x) = (k(x_i, x_j))`.
pub fn gram_matrix(spec: &KernelSpec, nodes: &NodeSet) -> DMatrix<f64> {
    let n = nodes.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = kernel_eval(spec, nodes.point(i), nodes.point(j));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// `(μ_g(x_j))_j`.
pub fn mean_vector(spec: &KernelSpec, g: &Integrand, nodes: &NodeSet) -> DVector<f64> {
    DVector::from_iterator(nodes.len(), nodes.points().map(|x| mean_element_eval(spec, g, x)))
}

/// Cholesky factor of `k`, retrying once with jitter. The flag reports
/// whether jitter was needed.
pub(crate) fn factorize(k: DMatrix<f64>) -> Result<(Cholesky<f64, nalgebra::Dyn>, bool)> {
    factorize_with_shift(k).map(|(c, shift)| (c, shift > 0.0))
}

/// Like [`factorize`] but returns the diagonal shift that was added.
fn factorize_with_shift(k: DMatrix<f64>) -> Result<(Cholesky<f64, nalgebra::Dyn>, f64)> {
    let n = k.nrows();
    if n == 0 {
        return Ok((Cholesky::new(k).expect("empty matrix factorizes"), 0.0));
    }
    match Cholesky::new(k.clone()) {
        Some(c) => Ok((c, 0.0)),
        None => {
            let jitter = JITTER * k.trace() / n as f64;
            let mut kj = k;
            for i in 0..n {
                kj[(i, i)] += jitter;
            }
            Cholesky::new(kj).map(|c| (c, jitter)).ok_or(Error::SingularGram)
        }
    }
}

/// Optimal weights `ŵ = K(x)⁻¹ μ_g(x)`.
pub fn solve_weights(spec: &KernelSpec, nodes: &NodeSet, g: &Integrand) -> Result<QuadratureRule> {
    let (chol, jittered) = factorize(gram_matrix(spec, nodes))?;
    let w = chol.solve(&mean_vector(spec, g, nodes));
    let mut rule = QuadratureRule::new(spec.clone(), nodes.clone(), w.iter().copied().collect(), g.clone())?;
    if jittered {
        rule.warnings.push(Warning::JitteredGram);
    }
    Ok(rule)
}

/// Uniform weights `1/N`, for `g ≡ 1` only.
pub fn uniform_weight_rule(spec: &KernelSpec, nodes: &NodeSet, g: &Integrand) -> Result<QuadratureRule> {
    if !g.is_constant_one() {
        return Err(Error::UnsupportedIntegrand);
    }
    let n = nodes.len();
    QuadratureRule::new(spec.clone(), nodes.clone(), vec![1.0 / n as f64; n], g.clone())
}

/// `‖μ_g‖² − 2 wᵀμ + wᵀ K w` given the pieces.
pub(crate) fn quadratic_error(norm_sq: f64, k: &DMatrix<f64>, mu: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
    // Written as ‖μ‖² − wᵀμ + wᵀ(Kw − μ) so that the second term is a small
    // residual near the optimum.
    let resid = k * w - mu;
    let e = norm_sq - w.dot(mu) + w.dot(&resid);
    if e < NEGATIVE_CLAMP {
        Err(Error::NegativeError(e))
    } else {
        Ok(e.max(0.0))
    }
}

/// Squared worst-case error `‖μ_g − Σ w_j k(x_j, ·)‖²` in the RKHS norm.
pub fn squared_error(rule: &QuadratureRule) -> Result<f64> {
    let k = gram_matrix(&rule.spec, &rule.nodes);
    let mu = mean_vector(&rule.spec, &rule.g, &rule.nodes);
    let w = DVector::from_column_slice(&rule.weights);
    let norm_sq = mean_element_norm_sq(&rule.spec, &rule.g);
    let Ok((chol, shift)) = factorize_with_shift(k.clone()) else {
        return quadratic_error(norm_sq, &k, &mu, &w);
    };
    // With K + εI = LLᵀ and z = L⁻¹μ the error splits into the optimal error
    // ‖μ‖² − ‖z‖² plus the non-negative excess ‖Lᵀw − z‖², less ε‖w‖².
    let l = chol.l();
    let z = l.solve_lower_triangular(&mu).ok_or(Error::SingularGram)?;
    let excess = (l.transpose() * &w - &z).norm_squared();
    let e = (norm_sq - z.norm_squared()) + excess - shift * w.norm_squared();
    if e < NEGATIVE_CLAMP {
        Err(Error::NegativeError(e))
    } else {
        Ok(e.max(0.0))
    }
}

/// `Σ_j w_j f(x_j)`.
pub fn integrate(rule: &QuadratureRule, f_values: &[f64]) -> Result<f64> {
    if f_values.len() != rule.len() {
        return Err(Error::LengthMismatch {
            expected: rule.len(),
            found: f_values.len(),
        });
    }
    Ok(rule.weights.iter().zip(f_values).map(|(w, f)| w * f).sum())
}
