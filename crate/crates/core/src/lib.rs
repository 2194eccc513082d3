//! Kernel quadrature with nodes drawn from projection determinantal point
//! processes (DPPs).
//!
//! The crate covers three reproducing kernel families with known Mercer
//! decompositions (periodic Sobolev, Korobov and Gaussian), exact DPP
//! samplers, optimal quadrature weights, a set of baseline designs,
//! numerical checks of the spectral identities behind the error analysis,
//! and an experiment harness that writes CSV records.
//!
//! ```
//! use dppq::{quadrature, sampling, Integrand, KernelSpec, RngStream};
//!
//! let spec = KernelSpec::sobolev(1).unwrap();
//! let mut rng = RngStream::new(7);
//! let nodes = sampling::sample_cue(10, &mut rng);
//! let rule = quadrature::solve_weights(&spec, &nodes, &Integrand::ConstantOne).unwrap();
//! let err = quadrature::squared_error(&rule).unwrap();
//! assert!(err < 0.05);
//! ```

pub mod baselines;
pub mod error;
pub mod harness;
pub mod numeric;
pub mod oracles;
pub mod quadrature;
pub mod rng;
pub mod sampling;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use quadrature::QuadratureRule;
pub use rng::RngStream;
pub use sampling::{NodeSet, Provenance};
pub use spectral::{Family, Integrand, KernelSpec, MultiIndex, SpectralBasis};
