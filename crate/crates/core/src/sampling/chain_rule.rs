use num_complex::Complex64;

use super::{NodeSet, Provenance};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::spectral::{Family, SpectralBasis};

const MAX_PROPOSALS: u64 = 10_000_000;
const GRID_POINTS: usize = 10_000;
const ENVELOPE_SAFETY: f64 = 1.2;

/// Sequential exact sampler for the projection DPP of `basis`.
///
/// Point `i` is drawn from the density proportional to the squared norm of
/// the feature vector's component orthogonal to the features of the points
/// already chosen, by rejection from `dω` (uniform for the periodic
/// families).
pub fn sample_chain_rule(basis: &SpectralBasis, rng: &mut RngStream) -> Result<NodeSet> {
    let n = basis.len();
    let d = basis.dim();
    let spec = basis.spec();
    let sigma = match *spec.family() {
        Family::GaussianHermite { sigma, .. } => Some(sigma),
        _ => None,
    };
    // Bound on K_DPP(x,x) relative to the proposal. Periodic features have
    // unit modulus, so the diagonal is exactly N.
    let envelope = match sigma {
        None => n as f64,
        Some(_) => ENVELOPE_SAFETY * gaussian_diagonal_sup(basis),
    };

    let mut nodes = NodeSet::empty(d, Provenance::ChainRule, rng.seed());
    let mut ortho: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut x = vec![0.0; d];
    let mut phi = vec![Complex64::new(0.0, 0.0); n];
    for step in 0..n {
        let mut proposals = 0u64;
        loop {
            if proposals >= MAX_PROPOSALS {
                return Err(Error::RejectionStalled { step, proposals });
            }
            proposals += 1;
            for xi in x.iter_mut() {
                *xi = match sigma {
                    None => rng.uniform(),
                    Some(s) => s * rng.normal(),
                };
            }
            basis.features_into(&x, &mut phi);
            for b in &ortho {
                let c: Complex64 = b.iter().zip(&phi).map(|(bk, pk)| bk.conj() * pk).sum();
                for (pk, bk) in phi.iter_mut().zip(b) {
                    *pk -= c * bk;
                }
            }
            let residual: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
            if rng.uniform() * envelope < residual {
                let norm = residual.sqrt();
                ortho.push(phi.iter().map(|z| z / norm).collect());
                nodes.push(&x);
                break;
            }
        }
    }
    Ok(nodes)
}

/// Grid estimate of `sup_x K_DPP(x, x)` for the Gaussian family, where the
/// proposal is `dω` itself so the density ratio is the bare diagonal.
fn gaussian_diagonal_sup(basis: &SpectralBasis) -> f64 {
    let d = basis.dim();
    let g = basis.spec().gauss_consts().expect("gaussian family");
    // The diagonal eventually decays like exp(-2(c-a)x²); widen the window
    // until its edge is negligible along every axis.
    let along_axis = |t: f64| {
        (0..d)
            .map(|k| {
                let mut x = vec![0.0; d];
                x[k] = t;
                basis.dpp_diagonal(&x)
            })
            .fold(0.0, f64::max)
    };
    // The diagonal is even in each coordinate.
    let mut half = 1.0 / (g.c - g.a).sqrt();
    loop {
        let bulk = (0..=64).map(|i| along_axis(half * i as f64 / 64.0)).fold(0.0, f64::max);
        if along_axis(half) <= 1e-8 * bulk {
            break;
        }
        half *= 1.5;
    }
    let per_axis = ((GRID_POINTS as f64).powf(1.0 / d as f64).floor() as usize).max(2);
    let mut best: f64 = 0.0;
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    loop {
        for k in 0..d {
            x[k] = -half + 2.0 * half * idx[k] as f64 / (per_axis - 1) as f64;
        }
        best = best.max(basis.dpp_diagonal(&x));
        let mut k = 0;
        loop {
            if k == d {
                return best;
            }
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
