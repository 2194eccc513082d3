use serde::{Deserialize, Serialize};

use super::{eigenvalue, spectral_basis, Family, GaussConsts, KernelSpec, Modifier, MultiIndex};

/// Weight function `g` of the target integral `∫ f g dω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub enum Integrand {
    #[default]
    ConstantOne,
    /// Finite expansion `g = Σ c_u e_u`.
    EigenCoefficients(Vec<(MultiIndex, f64)>),
}

impl Integrand {
    pub fn is_constant_one(&self) -> bool {
        matches!(self, Integrand::ConstantOne)
    }

    /// `‖g‖_dω`.
    pub fn l2_norm(&self) -> f64 {
        match self {
            Integrand::ConstantOne => 1.0,
            Integrand::EigenCoefficients(t) => t.iter().map(|(_, c)| c * c).sum::<f64>().sqrt(),
        }
    }

    /// `⟨g, e_u⟩_dω`.
    pub fn coefficient(&self, spec: &KernelSpec, u: &MultiIndex) -> f64 {
        match self {
            Integrand::ConstantOne => match spec.family() {
                Family::GaussianHermite { gamma, sigma, .. } => {
                    let g = GaussConsts::new(*gamma, *sigma);
                    u.0.iter()
                        .map(|&m| {
                            let m = m as usize;
                            g.constant_coefficients(m)[m]
                        })
                        .product()
                }
                _ => {
                    if u.0.iter().all(|&j| j == 0) {
                        1.0
                    } else {
                        0.0
                    }
                }
            },
            Integrand::EigenCoefficients(t) => t.iter().filter(|(v, _)| v == u).map(|(_, c)| c).sum(),
        }
    }

    /// `‖g‖_{dω,1} = Σ_{n ≤ N} |⟨e_n, g⟩|` over the first `n` eigenfunctions.
    pub fn projected_l1_norm(&self, spec: &KernelSpec, n: usize) -> f64 {
        let basis = spectral_basis(&spec.base(), n);
        basis.indices().iter().map(|u| self.coefficient(spec, u).abs()).sum()
    }
}

fn eigenvalue_or_zero(spec: &KernelSpec, u: &MultiIndex) -> f64 {
    eigenvalue(spec, u).unwrap_or(0.0)
}

fn closed_form_mean(spec: &KernelSpec, x: &[f64]) -> f64 {
    match *spec.family() {
        Family::GaussianHermite { gamma, sigma, .. } => {
            let v = gamma * gamma + sigma * sigma;
            x.iter().map(|&t| gamma / v.sqrt() * (-t * t / (2.0 * v)).exp()).product()
        }
        _ => 1.0,
    }
}

fn closed_form_norm_sq(spec: &KernelSpec) -> f64 {
    match *spec.family() {
        Family::GaussianHermite { gamma, sigma, d } => {
            (gamma / (gamma * gamma + 2.0 * sigma * sigma).sqrt()).powi(d as i32)
        }
        _ => 1.0,
    }
}

pub(super) fn mean_element(spec: &KernelSpec, g: &Integrand, x: &[f64]) -> f64 {
    let family = spec.family();
    match (g, spec.modifier()) {
        (Integrand::ConstantOne, Modifier::Full) => closed_form_mean(spec, x),
        (Integrand::ConstantOne, Modifier::Truncated(r)) => {
            let vals = super::retained_values(family, r, x);
            r.indices
                .iter()
                .zip(&r.eigenvalues)
                .zip(vals)
                .map(|((u, s), e)| s * g.coefficient(spec, u) * e)
                .sum()
        }
        (Integrand::ConstantOne, Modifier::Capped(r)) => {
            let vals = super::retained_values(family, r, x);
            let top = r.eigenvalues[0];
            closed_form_mean(spec, x)
                + r.indices
                    .iter()
                    .zip(&r.eigenvalues)
                    .zip(vals)
                    .map(|((u, s), e)| (top - s) * g.coefficient(spec, u) * e)
                    .sum::<f64>()
        }
        (Integrand::EigenCoefficients(terms), _) => terms
            .iter()
            .map(|(u, c)| {
                let e = super::eigenfunction_eval(spec, u, x).unwrap_or(0.0);
                eigenvalue_or_zero(spec, u) * c * e
            })
            .sum(),
    }
}

pub(super) fn mean_norm_sq(spec: &KernelSpec, g: &Integrand) -> f64 {
    match (g, spec.modifier()) {
        (Integrand::ConstantOne, Modifier::Full) => closed_form_norm_sq(spec),
        (Integrand::ConstantOne, Modifier::Truncated(r)) => r
            .indices
            .iter()
            .zip(&r.eigenvalues)
            .map(|(u, s)| s * g.coefficient(spec, u).powi(2))
            .sum(),
        (Integrand::ConstantOne, Modifier::Capped(r)) => {
            let top = r.eigenvalues[0];
            closed_form_norm_sq(spec)
                + r.indices
                    .iter()
                    .zip(&r.eigenvalues)
                    .map(|(u, s)| (top - s) * g.coefficient(spec, u).powi(2))
                    .sum::<f64>()
        }
        (Integrand::EigenCoefficients(terms), _) => {
            // Merge repeated indices before squaring.
            let mut merged: Vec<(MultiIndex, f64)> = Vec::new();
            for (u, c) in terms {
                match merged.iter_mut().find(|(v, _)| v == u) {
                    Some((_, acc)) => *acc += c,
                    None => merged.push((u.clone(), *c)),
                }
            }
            merged.iter().map(|(u, c)| eigenvalue_or_zero(spec, u) * c * c).sum()
        }
    }
}
