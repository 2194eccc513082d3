use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{NodeSet, Provenance};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::spectral::{Family, KernelSpec};

/// Eigenangles of a Haar unitary, scaled to `[0, 1)`.
///
/// The result is the projection DPP of `N` consecutive Fourier modes on the
/// unit interval, i.e. the periodic Sobolev DPP.
pub fn sample_cue(n: usize, rng: &mut RngStream) -> NodeSet {
    assert!(n >= 1);
    let seed = rng.seed();
    loop {
        let z = DMatrix::<Complex64>::from_fn(n, n, |_, _| rng.complex_normal());
        let qr = z.qr();
        let r = qr.r();
        if (0..n).any(|i| r[(i, i)].norm() < 1e-300) {
            continue;
        }
        let mut q = qr.q();
        // Fix the phases so that R has a positive diagonal; only then is Q
        // Haar distributed.
        for j in 0..n {
            let phase = r[(j, j)] / r[(j, j)].norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
        let Some(eigs) = q.schur().eigenvalues() else {
            continue;
        };
        let mut angles: Vec<f64> = eigs
            .iter()
            .map(|z| {
                let t = z.arg() / (2.0 * PI);
                let t = t - t.floor();
                if t >= 1.0 {
                    0.0
                } else {
                    t
                }
            })
            .collect();
        angles.sort_by(f64::total_cmp);
        return NodeSet::from_scalars(angles, Provenance::CUE, seed);
    }
}

/// β = 2 Hermite ensemble rescaled to the Gaussian-kernel DPP in one dimension.
///
/// The tridiagonal model has eigenvalue density proportional to
/// `Π (λ_i − λ_j)² Π exp(−λ_i²/2)`; dividing by `2√c` turns the weight into
/// `exp(−2c x²)`, the weight under which the Gaussian eigenfunctions are
/// polynomials.
pub fn sample_hermite_ensemble(spec: &KernelSpec, n: usize, rng: &mut RngStream) -> Result<NodeSet> {
    let g = match *spec.family() {
        Family::GaussianHermite { d: 1, .. } => spec.gauss_consts().expect("gaussian family"),
        _ => {
            return Err(Error::Unsupported(
                "the Hermite ensemble only samples the one-dimensional Gaussian family".into(),
            ))
        }
    };
    assert!(n >= 1);
    let seed = rng.seed();
    let mut t = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        t[(i, i)] = rng.normal();
    }
    for k in 1..n {
        let v = rng.chi(2.0 * (n - k) as f64) / 2f64.sqrt();
        t[(k - 1, k)] = v;
        t[(k, k - 1)] = v;
    }
    let scale = 1.0 / (2.0 * g.c.sqrt());
    let mut x: Vec<f64> = t.symmetric_eigenvalues().iter().map(|l| l * scale).collect();
    x.sort_by(f64::total_cmp);
    Ok(NodeSet::from_scalars(x, Provenance::HermiteEnsemble, seed))
}
