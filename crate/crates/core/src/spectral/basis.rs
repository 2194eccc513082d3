use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{periodic_ordinal, GaussConsts, KernelSpec, MultiIndex};
use crate::sampling::NodeSet;

/// The first `N` eigenpairs of a kernel in non-increasing eigenvalue order.
///
/// Besides the real eigenfunctions, a basis exposes the feature map that
/// defines its projection DPP. For the Gaussian family the two coincide.
/// For the periodic families the DPP uses the complex Fourier mode with the
/// same frequency and eigenvalue as each real basis element, so that the
/// repulsion kernel is translation invariant whatever `N` is.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    spec: KernelSpec,
    indices: Vec<MultiIndex>,
    eigenvalues: Vec<f64>,
    ordinals: Vec<Vec<u32>>,
    max_ordinal: Vec<u32>,
    gauss: Option<GaussConsts>,
}

impl SpectralBasis {
    pub(crate) fn new(spec: KernelSpec, indices: Vec<MultiIndex>, eigenvalues: Vec<f64>) -> Self {
        let d = spec.dim();
        let periodic = spec.family().is_periodic();
        let ordinals: Vec<Vec<u32>> = indices
            .iter()
            .map(|u| {
                u.0.iter()
                    .map(|&i| if periodic { periodic_ordinal(i) } else { i as u32 })
                    .collect()
            })
            .collect();
        let max_ordinal = (0..d)
            .map(|k| ordinals.iter().map(|o| o[k]).max().unwrap_or(0))
            .collect();
        let gauss = spec.gauss_consts();
        Self {
            spec,
            indices,
            eigenvalues,
            ordinals,
            max_ordinal,
            gauss,
        }
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn real_tables(&self, x: &[f64]) -> Vec<Vec<f64>> {
        x.iter()
            .zip(&self.max_ordinal)
            .map(|(&t, &max)| match &self.gauss {
                Some(g) => {
                    let mut v = Vec::with_capacity(max as usize + 1);
                    g.eigenfunctions(t, max as usize, &mut v);
                    v
                }
                None => (0..=max)
                    .map(|o| {
                        let f = o.div_ceil(2) as f64;
                        match o {
                            0 => 1.0,
                            o if o % 2 == 1 => SQRT_2 * (2.0 * PI * f * t).cos(),
                            _ => SQRT_2 * (2.0 * PI * f * t).sin(),
                        }
                    })
                    .collect(),
            })
            .collect()
    }

    fn complex_tables(&self, x: &[f64]) -> Vec<Vec<Complex64>> {
        match &self.gauss {
            Some(_) => self
                .real_tables(x)
                .into_iter()
                .map(|v| v.into_iter().map(|r| Complex64::new(r, 0.0)).collect())
                .collect(),
            None => x
                .iter()
                .zip(&self.max_ordinal)
                .map(|(&t, &max)| {
                    (0..=max)
                        .map(|o| {
                            let m = super::periodic_from_ordinal(o) as f64;
                            Complex64::from_polar(1.0, 2.0 * PI * m * t)
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Real eigenfunction values `e_n(x)` for all `n`.
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        let tables = self.real_tables(x);
        for (o, slot) in self.ordinals.iter().zip(out.iter_mut()) {
            *slot = o.iter().zip(&tables).map(|(&i, t)| t[i as usize]).product();
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(x, &mut out);
        out
    }

    /// DPP feature vector at `x`.
    pub fn features_into(&self, x: &[f64], out: &mut [Complex64]) {
        let tables = self.complex_tables(x);
        for (o, slot) in self.ordinals.iter().zip(out.iter_mut()) {
            *slot = o.iter().zip(&tables).map(|(&i, t)| t[i as usize]).product();
        }
    }

    pub fn features(&self, x: &[f64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        self.features_into(x, &mut out);
        out
    }

    /// Diagonal of the DPP kernel, `K_DPP(x, x)`.
    pub fn dpp_diagonal(&self, x: &[f64]) -> f64 {
        self.features(x).iter().map(|z| z.norm_sqr()).sum()
    }

    /// Matrix `E` with `E[(n, j)] = e_n(x_j)`.
    pub fn eigenfunction_matrix(&self, nodes: &NodeSet) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.len(), nodes.len());
        let mut col = vec![0.0; self.len()];
        for (j, x) in nodes.points().enumerate() {
            self.eval_into(x, &mut col);
            m.column_mut(j).copy_from_slice(&col);
        }
        m
    }

    /// Matrix of DPP features, one column per node.
    pub fn feature_matrix(&self, nodes: &NodeSet) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.len(), nodes.len());
        let mut col = vec![Complex64::new(0.0, 0.0); self.len()];
        for (j, x) in nodes.points().enumerate() {
            self.features_into(x, &mut col);
            m.column_mut(j).copy_from_slice(&col);
        }
        m
    }
}
