use statrs::distribution::{ContinuousCDF, Normal};

use crate::rng::RngStream;
use crate::sampling::{NodeSet, Provenance};
use crate::spectral::{Family, KernelSpec};

/// Generator of the `d`-dimensional Kronecker sequence: powers of the
/// inverse of the positive root of `x^{d+1} = x + 1`.
fn kronecker_alpha(d: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d).map(|k| phi.powi(-(k as i32))).collect()
}

/// Randomly shifted Kronecker points on `[0, 1)^d`.
fn shifted_kronecker(d: usize, size: usize, rng: &mut RngStream) -> Vec<f64> {
    let alpha = kronecker_alpha(d);
    let shift: Vec<f64> = (0..d).map(|_| rng.uniform()).collect();
    let mut coords = Vec::with_capacity(size * d);
    for j in 0..size {
        for k in 0..d {
            let t = shift[k] + j as f64 * alpha[k];
            coords.push(t - t.floor());
        }
    }
    coords
}

/// Candidate pool for the greedy baselines.
///
/// Periodic families get a randomly shifted Kronecker lattice. The Gaussian
/// family in one dimension gets one jittered point per equal-mass stratum of
/// `dω`; in higher dimensions the Kronecker lattice is pushed through the
/// Gaussian quantile function.
pub fn candidate_pool(spec: &KernelSpec, size: usize, rng: &mut RngStream) -> NodeSet {
    let d = spec.dim();
    let coords = match *spec.family() {
        Family::GaussianHermite { sigma, .. } => {
            let normal = Normal::new(0.0, sigma).expect("positive scale");
            let unit: Vec<f64> = if d == 1 {
                (0..size).map(|j| (j as f64 + rng.uniform()) / size as f64).collect()
            } else {
                shifted_kronecker(d, size, rng)
            };
            unit.into_iter()
                .map(|u| normal.inverse_cdf(u.clamp(1e-12, 1.0 - 1e-12)))
                .collect()
        }
        _ => shifted_kronecker(d, size, rng),
    };
    NodeSet::new(d, coords, Provenance::IID, rng.seed())
}
