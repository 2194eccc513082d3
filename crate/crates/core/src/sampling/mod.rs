//! Node sets and exact samplers for projection DPPs.

mod chain_rule;
mod matrix_models;
mod nodes;

pub use chain_rule::sample_chain_rule;
pub use matrix_models::{sample_cue, sample_hermite_ensemble};
pub use nodes::{NodeSet, Provenance};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::spectral::{spectral_basis, Family, KernelSpec, SpectralBasis};

/// One-point intensity of the DPP divided by `N`: `K_DPP(x,x) ω(x) / N`.
pub fn inclusion_density(basis: &SpectralBasis, x: &[f64]) -> f64 {
    basis.dpp_diagonal(x) * basis.spec().measure_density(x) / basis.len() as f64
}

/// Draw `n` nodes from the projection DPP of the first `n` eigenfunctions
/// of `spec`, using a matrix model where one exists.
pub fn sample_dpp(spec: &KernelSpec, n: usize, rng: &mut RngStream) -> Result<NodeSet> {
    if n == 0 {
        return Err(Error::InvalidConfig("DPP needs at least one node".into()));
    }
    match *spec.family() {
        Family::PeriodicSobolev { .. } | Family::Korobov { d: 1, .. } => Ok(sample_cue(n, rng)),
        Family::GaussianHermite { d: 1, .. } => sample_hermite_ensemble(spec, n, rng),
        _ => sample_chain_rule(&spectral_basis(spec, n), rng),
    }
}
