//! Computable forms of the error bound and spectral identities, used to
//! check the implementation numerically.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{linear_fit, ln_factorial};
use crate::quadrature::{factorize, gram_matrix};
use crate::sampling::NodeSet;
use crate::spectral::{spectral_basis, spectral_tail, Family, KernelSpec, SpectralBasis};

pub use crate::spectral::flat_capped_spec;

/// Upper bound on the expected squared error of DPP kernel quadrature with
/// `n` nodes, for an integrand with projected ℓ1 norm `g_norm1`:
///
/// `2σ_{N+1} + 2‖g‖₁² (N r_N + Σ_{ℓ=2}^{N} σ₁/ℓ!² (N r_N/σ₁)^ℓ)`.
///
/// Returns `+∞` when the series overflows, where the bound is vacuous.
pub fn theorem_bound(spec: &KernelSpec, n: usize, g_norm1: f64) -> f64 {
    let basis = spectral_basis(spec, n + 1);
    let ev = basis.eigenvalues();
    let (top, next) = (ev[0], ev[n]);
    let r = spectral_tail(spec, n);
    let nr = n as f64 * r;
    let mut series = nr;
    if nr > 0.0 {
        let ln_z = (nr / top).ln();
        for l in 2..=n {
            let ln_term = top.ln() - 2.0 * ln_factorial(l) + l as f64 * ln_z;
            if ln_term > 700.0 {
                return f64::INFINITY;
            }
            let term = ln_term.exp();
            series += term;
            // Terms are log-concave in ℓ, so once past the peak and tiny we stop.
            let past_peak = l as f64 * l as f64 > nr / top;
            if past_peak && term < 1e-30 * series {
                break;
            }
        }
    }
    2.0 * next + 2.0 * g_norm1 * g_norm1 * series
}

/// Elementary symmetric polynomials `p_0..=p_kmax` of `values`.
pub fn elementary_symmetric(values: &[f64], kmax: usize) -> Vec<f64> {
    let mut e = vec![0.0; kmax + 1];
    e[0] = 1.0;
    for &v in values {
        for k in (1..=kmax).rev() {
            e[k] += v * e[k - 1];
        }
    }
    e
}

/// `(p_ℓ(ν), p_1(ν)^ℓ / ℓ!)`; Maclaurin's inequality says the first is at
/// most the second for non-negative `ν`.
pub fn maclaurin_check(nu: &[f64], ell: usize) -> (f64, f64) {
    assert!(ell >= 1 && ell <= nu.len());
    let p = elementary_symmetric(nu, ell);
    (p[ell], (ell as f64 * p[1].ln() - ln_factorial(ell)).exp())
}

/// Expected value of `Π 1/cos² θ_ℓ` under the DPP, with an upper estimate
/// of the error from truncating the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CosProduct {
    pub value: f64,
    pub error_estimate: f64,
    pub truncation: usize,
}

/// Cap used by the automatic truncation.
pub const MAX_TRUNCATION: usize = 10_000;

/// `Σ_{|T| = N} Π_{t ∈ T} σ_t / Π_{n ≤ N} σ_n` over subsets of the first
/// `truncation` eigenvalues. With `truncation = None`, the smallest
/// truncation up to [`MAX_TRUNCATION`] whose error estimate is below
/// `10⁻³` of the value is used.
pub fn expected_cos_product(spec: &KernelSpec, n: usize, truncation: Option<usize>) -> CosProduct {
    let limit = truncation.unwrap_or(MAX_TRUNCATION).max(n);
    let ev = spectral_basis(spec, limit).eigenvalues().to_vec();
    let pivot = ev[n - 1];
    // Split T into the dropped head indices V and the added tail indices W:
    // the ratio is Σ_ℓ p_ℓ(σ_N/σ_v : v ≤ N) p_ℓ(σ_w/σ_N : w > N).
    let head: Vec<f64> = ev[..n].iter().map(|s| pivot / s).collect();
    let ph = elementary_symmetric(&head, n);
    // Tails beyond each truncation point, relative to the pivot.
    let mut rest = vec![0.0; limit + 1];
    rest[limit] = spectral_tail(spec, limit) / pivot;
    for m in (n..limit).rev() {
        rest[m] = rest[m + 1] + ev[m] / pivot;
    }
    let mut tail = vec![0.0; n + 1];
    tail[0] = 1.0;
    let evaluate = |tail: &[f64], m: usize| {
        let value: f64 = (0..=n).map(|l| ph[l] * tail[l]).sum();
        // p_ℓ(all) − p_ℓ(kept) ≤ Σ_k p_{ℓ−k}(kept) R^k / k!.
        let r = rest[m];
        let mut est = 0.0;
        for l in 1..=n {
            let mut inner = 0.0;
            let mut rk = 1.0;
            for k in 1..=l {
                rk *= r / k as f64;
                inner += tail[l - k] * rk;
            }
            est += ph[l] * inner;
        }
        CosProduct {
            value,
            error_estimate: est,
            truncation: m,
        }
    };
    let mut m = n;
    loop {
        let current = evaluate(&tail, m);
        let done = match truncation {
            Some(t) => m >= t,
            None => current.error_estimate < 1e-3 * current.value || m >= limit,
        };
        if done {
            return current;
        }
        let v = ev[m] / pivot;
        for k in (1..=n).rev() {
            tail[k] += v * tail[k - 1];
        }
        m += 1;
    }
}

fn ln_abs_det_real(mut e: DMatrix<f64>) -> Result<f64> {
    let mut shift = 0.0;
    for mut row in e.row_iter_mut() {
        let s = row.amax();
        if s == 0.0 {
            return Err(Error::DegenerateNodes);
        }
        row /= s;
        shift += s.ln();
    }
    let det = e.lu().determinant().abs();
    if !(det > 1e-300) {
        return Err(Error::DegenerateNodes);
    }
    Ok(shift + det.ln())
}

/// `ln |det E|` of a square feature matrix after scaling each row to unit
/// max-norm. Fails when the scaled determinant is not above `floor`.
pub fn ln_abs_det_scaled(e: &DMatrix<Complex64>, floor: f64) -> Result<f64> {
    let mut e = e.clone();
    let mut shift = 0.0;
    for mut row in e.row_iter_mut() {
        let s = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if s == 0.0 {
            return Err(Error::DegenerateNodes);
        }
        row.unscale_mut(s);
        shift += s.ln();
    }
    let det = e.lu().determinant().norm();
    if !(det > floor) {
        return Err(Error::DegenerateNodes);
    }
    Ok(shift + det.ln())
}

fn ln_det_spd(k: DMatrix<f64>) -> Result<f64> {
    let chol = k.cholesky().ok_or(Error::DegenerateNodes)?;
    Ok(2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>())
}

/// `det K(x) / (Π σ_n det² E(x))`, the product of `1/cos²` of the principal
/// angles between the span of the kernel sections at the nodes and the span
/// of the first `N` eigenfunctions.
pub fn cos_product_statistic(basis: &SpectralBasis, nodes: &NodeSet) -> Result<f64> {
    if nodes.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            found: nodes.len(),
        });
    }
    let ln_det_k = ln_det_spd(gram_matrix(basis.spec(), nodes))?;
    let ln_det_e = ln_abs_det_real(basis.eigenfunction_matrix(nodes))?;
    let ln_sigma: f64 = basis.eigenvalues().iter().map(|s| s.ln()).sum();
    Ok((ln_det_k - ln_sigma - 2.0 * ln_det_e).exp())
}

/// `(ln det K(x), ln Π σ_n + 2 ln |det E(x)|)`; the first is never below the
/// second.
pub fn cauchy_binet_sides(basis: &SpectralBasis, nodes: &NodeSet) -> Result<(f64, f64)> {
    let ln_det_k = ln_det_spd(gram_matrix(basis.spec(), nodes))?;
    let ln_det_e = ln_abs_det_real(basis.eigenfunction_matrix(nodes))?;
    let ln_sigma: f64 = basis.eigenvalues().iter().map(|s| s.ln()).sum();
    Ok((ln_det_k, ln_sigma + 2.0 * ln_det_e))
}

/// Cosines of the principal angles between two subspaces, given the matrix
/// of inner products between orthonormal bases of each. Sorted descending.
pub fn principal_angles(cross_gram: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = cross_gram
        .clone()
        .singular_values()
        .iter()
        .map(|v| v.clamp(0.0, 1.0))
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Leverage scores of the columns of a full-row-rank `N × M` matrix.
#[derive(Debug, Clone)]
pub struct LeverageScores {
    /// `τ_i = a_iᵀ (AAᵀ)⁻¹ a_i`.
    pub scores: Vec<f64>,
    /// `τ_{ij} = a_iᵀ (AAᵀ)⁻¹ a_j`.
    pub cross: DMatrix<f64>,
}

impl LeverageScores {
    pub fn cross_score(&self, i: usize, j: usize) -> f64 {
        self.cross[(i, j)]
    }
}

pub fn leverage_scores(a: &DMatrix<f64>) -> Result<LeverageScores> {
    if a.nrows() > a.ncols() {
        return Err(Error::RankDeficient);
    }
    let g = a * a.transpose();
    let chol = g.cholesky().ok_or(Error::RankDeficient)?;
    let cross = a.transpose() * chol.solve(a);
    let scores = cross.diagonal().iter().copied().collect();
    Ok(LeverageScores { scores, cross })
}

/// Leverage scores after scaling column `i` of `A` by `√(1+ρ)`, from the
/// closed-form rank-one update. Entry `i` of the result is the updated
/// `τ_i`; the others are the updated `τ_j`.
pub fn leverage_rank1_update(a: &DMatrix<f64>, i: usize, rho: f64) -> Result<Vec<f64>> {
    let lv = leverage_scores(a)?;
    let ti = lv.scores[i];
    let denom = 1.0 + rho * ti;
    Ok((0..a.ncols())
        .map(|j| {
            if j == i {
                (1.0 + rho) * ti / denom
            } else {
                lv.scores[j] - rho * lv.cross[(i, j)].powi(2) / denom
            }
        })
        .collect())
}

/// Exact `σ_{N+1}` next to its asymptotic proxy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateProxy {
    pub sigma_next: f64,
    pub proxy: f64,
}

/// Periodic families: `(log N)^{2s(d−1)} N^{−2s}`. Gaussian family:
/// `β^d exp(−δ (d!)^{1/d} N^{1/d})` with `β, δ` fitted by least squares on
/// `log σ_{N+1}` over `N ∈ [10, 200]`.
pub fn eigenvalue_rate_proxy(spec: &KernelSpec, n: usize) -> RateProxy {
    let basis = spectral_basis(spec, n.max(200) + 1);
    let ev = basis.eigenvalues();
    let nf = n as f64;
    let proxy = match *spec.family() {
        Family::PeriodicSobolev { s } => nf.powf(-2.0 * s as f64),
        Family::Korobov { s, d } => nf.ln().powf(2.0 * s as f64 * (d as f64 - 1.0)) * nf.powf(-2.0 * s as f64),
        Family::GaussianHermite { d, .. } => {
            let df = d as f64;
            let c = (ln_factorial(d) / df).exp();
            let xs: Vec<f64> = (10..=200).map(|m| c * (m as f64).powf(1.0 / df)).collect();
            let ys: Vec<f64> = (10..=200).map(|m| ev[m].ln()).collect();
            let fit = linear_fit(&xs, &ys);
            (fit.intercept + fit.slope * c * nf.powf(1.0 / df)).exp()
        }
    };
    RateProxy {
        sigma_next: ev[n],
        proxy,
    }
}

/// `1 − e_n^F(x)ᵀ K(x)⁻¹ e_n^F(x)` with `e_n^F = √σ_n e_n`: the squared
/// distance from the unit-norm eigenfunction `e_n^F` to the span of the
/// kernel sections at the nodes.
pub fn interpolation_residual(basis: &SpectralBasis, nodes: &NodeSet, n: usize) -> Result<f64> {
    let spec = basis.spec();
    let (chol, _) = factorize(gram_matrix(spec, nodes))?;
    let scale = basis.eigenvalues()[n].sqrt();
    let v = DVector::from_iterator(nodes.len(), nodes.points().map(|x| scale * basis.eval(x)[n]));
    Ok(1.0 - v.dot(&chol.solve(&v)))
}
