//! Shared fixtures for the criterion benchmarks.

use dppq::{KernelSpec, NodeSet, RngStream};

pub fn sobolev(s: u32) -> KernelSpec {
    KernelSpec::sobolev(s).expect("valid smoothness")
}

pub fn gaussian_1d() -> KernelSpec {
    KernelSpec::gaussian(0.5, 1.0, 1).expect("valid parameters")
}

pub fn korobov_2d() -> KernelSpec {
    KernelSpec::korobov(1, 2).expect("valid parameters")
}

/// CUE nodes of size `n` from a fixed seed.
pub fn cue_nodes(n: usize) -> NodeSet {
    dppq::sampling::sample_cue(n, &mut RngStream::new(n as u64))
}
