//! Kernel families, their Mercer spectra and closed forms.
//!
//! Three families are supported:
//!
//! * periodic Sobolev on `[0, 1]` with the uniform measure,
//! * Korobov, the tensor product of periodic Sobolev on `[0, 1]^d`,
//! * Gaussian on `R^d` with the measure `N(0, σ² I)`.
//!
//! A [`MultiIndex`] has one signed integer per coordinate. For the periodic
//! families, `0` is the constant, `j > 0` is `√2 cos(2πjx)` and `j < 0` is
//! `√2 sin(2π|j|x)`. For the Gaussian family each coordinate is a
//! non-negative Hermite degree.

mod basis;
mod integrand;

use std::collections::{BinaryHeap, HashMap, HashSet};
use std::cmp::Reverse;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bernoulli_poly, factorial, zeta, MAX_BERNOULLI};

pub use basis::SpectralBasis;
pub use integrand::Integrand;

/// Kernel family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    PeriodicSobolev { s: u32 },
    Korobov { s: u32, d: usize },
    GaussianHermite { gamma: f64, sigma: f64, d: usize },
}

impl Family {
    pub fn dim(&self) -> usize {
        match *self {
            Family::PeriodicSobolev { .. } => 1,
            Family::Korobov { d, .. } | Family::GaussianHermite { d, .. } => d,
        }
    }

    pub fn is_periodic(&self) -> bool {
        !matches!(self, Family::GaussianHermite { .. })
    }
}

/// Constants of the Gaussian kernel's Mercer decomposition in one coordinate.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GaussConsts {
    pub a: f64,
    pub c: f64,
    /// Ratio of consecutive eigenvalues.
    pub ratio: f64,
    /// Leading eigenvalue.
    pub lead: f64,
    /// Normalisation making the eigenfunctions unit-norm in `L2(dω)`.
    pub norm: f64,
    pub sigma: f64,
}

impl GaussConsts {
    pub fn new(gamma: f64, sigma: f64) -> Self {
        let a = 1.0 / (4.0 * sigma * sigma);
        let b = 1.0 / (2.0 * gamma * gamma);
        let c = (a * a + 2.0 * a * b).sqrt();
        let big_a = a + b + c;
        Self {
            a,
            c,
            ratio: b / big_a,
            lead: (2.0 * a / big_a).sqrt(),
            norm: (4.0 * c * sigma * sigma).powf(0.25),
            sigma,
        }
    }

    #[cfg(test)]
    pub fn eigenvalue(&self, m: u32) -> f64 {
        self.lead * self.ratio.powi(m as i32)
    }

    /// Sum of all one-dimensional eigenvalues.
    pub fn trace(&self) -> f64 {
        self.lead / (1.0 - self.ratio)
    }

    /// Values of `e_0..=e_max` at `x`.
    pub fn eigenfunctions(&self, x: f64, max: usize, out: &mut Vec<f64>) {
        out.clear();
        let pre = self.norm * (-(self.c - self.a) * x * x).exp();
        let y = 2.0 * self.c.sqrt() * x;
        // Orthonormal probabilists' Hermite recurrence.
        let (mut prev, mut cur) = (0.0, 1.0);
        out.push(pre);
        for m in 0..max {
            let next = (y * cur - (m as f64).sqrt() * prev) / ((m + 1) as f64).sqrt();
            prev = cur;
            cur = next;
            out.push(pre * cur);
        }
    }

    /// `∫ e_m dω` for `m = 0..=max` (zero for odd `m`).
    pub fn constant_coefficients(&self, max: usize) -> Vec<f64> {
        // e_m = norm·exp(-(c-a)x²)·p_m(2√c x); against N(0,σ²) this is a
        // Gaussian moment of p_m with variance tau2 = 2c/(c+a).
        let tau2 = 2.0 * self.c / (self.c + self.a);
        let mut out = vec![0.0; max + 1];
        let mut q = 1.0;
        out[0] = self.norm * tau2.sqrt() / (2.0 * self.c.sqrt() * self.sigma);
        let lead = out[0];
        for k in 1..=max / 2 {
            q *= (tau2 - 1.0) * ((2 * k - 1) as f64 / (2 * k) as f64).sqrt();
            out[2 * k] = lead * q;
        }
        out
    }
}

/// Top eigenpairs retained by a truncated or capped spec.
#[derive(Debug)]
pub(crate) struct Retained {
    pub indices: Vec<MultiIndex>,
    pub eigenvalues: Vec<f64>,
    pub lookup: HashMap<MultiIndex, usize>,
}

impl Retained {
    fn new(family: &Family, n: usize) -> Self {
        let (indices, eigenvalues) = ordered_spectrum(family, n);
        let lookup = indices.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();
        Self {
            indices,
            eigenvalues,
            lookup,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Modifier {
    Full,
    /// Only the top `indices.len()` eigenpairs survive.
    Truncated(Arc<Retained>),
    /// The top `indices.len()` eigenvalues are raised to the leading one.
    Capped(Arc<Retained>),
}

/// A kernel family together with an optional spectral modification.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct KernelSpec {
    family: Family,
    modifier: Modifier,
}

impl PartialEq for KernelSpec {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.rank() == other.rank() && self.cap() == other.cap()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpecRepr {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
    #[serde(default)]
    rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cap: Option<usize>,
}

impl TryFrom<SpecRepr> for KernelSpec {
    type Error = Error;

    fn try_from(r: SpecRepr) -> Result<Self> {
        let need = |name: &str| Error::InvalidSpec(format!("family {} requires `{name}`", r.family));
        let base = match r.family.to_ascii_lowercase().as_str() {
            "sobolev" => {
                if r.d.is_some_and(|d| d != 1) {
                    return Err(Error::InvalidSpec("sobolev is one-dimensional".into()));
                }
                KernelSpec::sobolev(r.s.ok_or_else(|| need("s"))?)?
            }
            "korobov" => KernelSpec::korobov(r.s.ok_or_else(|| need("s"))?, r.d.ok_or_else(|| need("d"))?)?,
            "gaussian" => KernelSpec::gaussian(
                r.gamma.ok_or_else(|| need("gamma"))?,
                r.sigma.ok_or_else(|| need("sigma"))?,
                r.d.unwrap_or(1),
            )?,
            other => return Err(Error::InvalidSpec(format!("unknown family `{other}`"))),
        };
        match (r.rank, r.cap) {
            (Some(_), Some(_)) => Err(Error::InvalidSpec("`rank` and `cap` are exclusive".into())),
            (Some(rank), None) => base.truncate(rank),
            (None, Some(n)) => base.flat_capped(n),
            (None, None) => Ok(base),
        }
    }
}

impl From<KernelSpec> for SpecRepr {
    fn from(k: KernelSpec) -> Self {
        let (family, s, d, gamma, sigma) = match k.family {
            Family::PeriodicSobolev { s } => ("sobolev", Some(s), Some(1), None, None),
            Family::Korobov { s, d } => ("korobov", Some(s), Some(d), None, None),
            Family::GaussianHermite { gamma, sigma, d } => ("gaussian", None, Some(d), Some(gamma), Some(sigma)),
        };
        SpecRepr {
            family: family.into(),
            s,
            d,
            gamma,
            sigma,
            rank: k.rank(),
            cap: k.cap(),
        }
    }
}

/// One index per coordinate; see the module docs for the encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<i64>);

impl MultiIndex {
    pub fn zero(d: usize) -> Self {
        Self(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

/// Position of a periodic coordinate index in the one-dimensional order
/// constant, cos 1, sin 1, cos 2, sin 2, ...
pub(crate) fn periodic_ordinal(j: i64) -> u32 {
    match j {
        0 => 0,
        j if j > 0 => (2 * j - 1) as u32,
        j => (2 * (-j)) as u32,
    }
}

pub(crate) fn periodic_from_ordinal(o: u32) -> i64 {
    if o == 0 {
        0
    } else if o % 2 == 1 {
        o.div_ceil(2) as i64
    } else {
        -((o / 2) as i64)
    }
}

impl KernelSpec {
    pub fn new(family: Family) -> Result<Self> {
        match family {
            Family::PeriodicSobolev { s } | Family::Korobov { s, .. } => {
                if s == 0 || 2 * s as usize > MAX_BERNOULLI {
                    return Err(Error::InvalidSpec(format!("smoothness s = {s} outside 1..=10")));
                }
            }
            Family::GaussianHermite { gamma, sigma, .. } => {
                if !(gamma > 0.0 && sigma > 0.0 && gamma.is_finite() && sigma.is_finite()) {
                    return Err(Error::InvalidSpec("gamma and sigma must be positive".into()));
                }
            }
        }
        if family.dim() == 0 {
            return Err(Error::InvalidSpec("dimension must be at least 1".into()));
        }
        Ok(Self {
            family,
            modifier: Modifier::Full,
        })
    }

    pub fn sobolev(s: u32) -> Result<Self> {
        Self::new(Family::PeriodicSobolev { s })
    }

    pub fn korobov(s: u32, d: usize) -> Result<Self> {
        Self::new(Family::Korobov { s, d })
    }

    pub fn gaussian(gamma: f64, sigma: f64, d: usize) -> Result<Self> {
        Self::new(Family::GaussianHermite { gamma, sigma, d })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    /// Rank of a truncated spec.
    pub fn rank(&self) -> Option<usize> {
        match &self.modifier {
            Modifier::Truncated(r) => Some(r.indices.len()),
            _ => None,
        }
    }

    /// Number of capped eigenvalues of a flat-capped spec.
    pub fn cap(&self) -> Option<usize> {
        match &self.modifier {
            Modifier::Capped(r) => Some(r.indices.len()),
            _ => None,
        }
    }

    /// The same family without spectral modification.
    pub fn base(&self) -> KernelSpec {
        KernelSpec {
            family: self.family,
            modifier: Modifier::Full,
        }
    }

    pub(crate) fn modifier(&self) -> &Modifier {
        &self.modifier
    }

    pub(crate) fn gauss_consts(&self) -> Option<GaussConsts> {
        match self.family {
            Family::GaussianHermite { gamma, sigma, .. } => Some(GaussConsts::new(gamma, sigma)),
            _ => None,
        }
    }

    /// Keep only the top `rank` eigenpairs.
    pub fn truncate(&self, rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidSpec("rank must be at least 1".into()));
        }
        Ok(Self {
            family: self.family,
            modifier: Modifier::Truncated(Arc::new(Retained::new(&self.family, rank))),
        })
    }

    /// Raise the first `n` eigenvalues to the leading eigenvalue.
    pub fn flat_capped(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("cap must be at least 1".into()));
        }
        Ok(Self {
            family: self.family,
            modifier: Modifier::Capped(Arc::new(Retained::new(&self.family, n))),
        })
    }

    fn check_point(&self, x: &[f64]) {
        debug_assert_eq!(x.len(), self.dim(), "point dimension does not match the spec");
    }

    fn check_index(&self, u: &MultiIndex) -> Result<()> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        if !self.family.is_periodic() {
            if let Some(&m) = u.0.iter().find(|&&m| m < 0) {
                return Err(Error::NegativeIndex(m));
            }
        }
        Ok(())
    }

    /// Density of `dω` at `x`.
    pub fn measure_density(&self, x: &[f64]) -> f64 {
        match self.family {
            Family::GaussianHermite { sigma, .. } => x
                .iter()
                .map(|&t| (-0.5 * (t / sigma).powi(2)).exp() / ((2.0 * PI).sqrt() * sigma))
                .product(),
            _ => {
                if x.iter().all(|&t| (0.0..=1.0).contains(&t)) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Eigenvalue of the unmodified family. Computed from the order key so that
/// indices that tie in the order get bitwise equal eigenvalues.
fn family_eigenvalue(family: &Family, u: &MultiIndex) -> f64 {
    match *family {
        Family::PeriodicSobolev { s } | Family::Korobov { s, .. } => {
            let prod: f64 = u.0.iter().map(|&j| j.unsigned_abs().max(1) as f64).product();
            prod.powi(-2 * s as i32)
        }
        Family::GaussianHermite { gamma, sigma, d } => {
            let g = GaussConsts::new(gamma, sigma);
            let total: i64 = u.0.iter().sum();
            g.lead.powi(d as i32) * g.ratio.powi(total as i32)
        }
    }
}

/// Mercer eigenvalue of `u` under `spec`.
pub fn eigenvalue(spec: &KernelSpec, u: &MultiIndex) -> Result<f64> {
    spec.check_index(u)?;
    Ok(match spec.modifier() {
        Modifier::Full => family_eigenvalue(&spec.family, u),
        Modifier::Truncated(r) => r.lookup.get(u).map_or(0.0, |&i| r.eigenvalues[i]),
        Modifier::Capped(r) => {
            if r.lookup.contains_key(u) {
                r.eigenvalues[0]
            } else {
                family_eigenvalue(&spec.family, u)
            }
        }
    })
}

/// Value of the one-dimensional eigenfunction `index` at `x`.
fn coord_eigenfunction(family: &Family, index: i64, x: f64) -> f64 {
    match *family {
        Family::GaussianHermite { gamma, sigma, .. } => {
            let mut v = Vec::new();
            GaussConsts::new(gamma, sigma).eigenfunctions(x, index as usize, &mut v);
            v[index as usize]
        }
        _ => match index {
            0 => 1.0,
            j if j > 0 => 2f64.sqrt() * (2.0 * PI * j as f64 * x).cos(),
            j => 2f64.sqrt() * (2.0 * PI * (-j) as f64 * x).sin(),
        },
    }
}

/// Eigenfunction `e_u` at `x`.
pub fn eigenfunction_eval(spec: &KernelSpec, u: &MultiIndex, x: &[f64]) -> Result<f64> {
    spec.check_index(u)?;
    if x.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: x.len(),
        });
    }
    Ok(u.0.iter().zip(x).map(|(&i, &t)| coord_eigenfunction(&spec.family, i, t)).product())
}

/// Order key and tie-break for the enumeration heap. A smaller key means a
/// larger eigenvalue; ties are broken colexicographically on ordinals.
fn order_key(family: &Family, ords: &[u32]) -> (u128, Vec<u32>) {
    let key = if family.is_periodic() {
        ords.iter().map(|&o| o.div_ceil(2).max(1) as u128).product()
    } else {
        ords.iter().map(|&o| o as u128).sum()
    };
    (key, ords.iter().rev().copied().collect())
}

fn ordinals_to_index(family: &Family, ords: &[u32]) -> MultiIndex {
    if family.is_periodic() {
        MultiIndex(ords.iter().map(|&o| periodic_from_ordinal(o)).collect())
    } else {
        MultiIndex(ords.iter().map(|&o| o as i64).collect())
    }
}

/// The `n` leading multi-indices of the unmodified family with their
/// eigenvalues, in non-increasing eigenvalue order.
pub(crate) fn ordered_spectrum(family: &Family, n: usize) -> (Vec<MultiIndex>, Vec<f64>) {
    let d = family.dim();
    let mut heap = BinaryHeap::new();
    let mut seen = HashSet::new();
    let start = vec![0u32; d];
    heap.push(Reverse((order_key(family, &start), start.clone())));
    seen.insert(start);
    let mut indices = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    while indices.len() < n {
        let Reverse((_, ords)) = heap.pop().expect("spectrum is infinite");
        for k in 0..d {
            let mut next = ords.clone();
            next[k] += 1;
            if seen.insert(next.clone()) {
                heap.push(Reverse((order_key(family, &next), next)));
            }
        }
        let u = ordinals_to_index(family, &ords);
        values.push(family_eigenvalue(family, &u));
        indices.push(u);
    }
    (indices, values)
}

/// The `n` leading eigenpairs of `spec`.
pub fn spectral_basis(spec: &KernelSpec, n: usize) -> SpectralBasis {
    let (indices, base_values) = ordered_spectrum(&spec.family, n);
    let eigenvalues = match spec.modifier() {
        Modifier::Full => base_values,
        Modifier::Truncated(r) => (0..n)
            .map(|i| if i < r.indices.len() { r.eigenvalues[i] } else { 0.0 })
            .collect(),
        Modifier::Capped(r) => base_values
            .iter()
            .enumerate()
            .map(|(i, &v)| if i < r.indices.len() { r.eigenvalues[0] } else { v })
            .collect(),
    };
    SpectralBasis::new(spec.clone(), indices, eigenvalues)
}

/// One coordinate factor of the periodic Sobolev kernel.
pub(crate) fn sobolev_factor(s: u32, t: f64) -> f64 {
    let n = 2 * s as usize;
    // The factor is even and 1-periodic; reducing |t| keeps k(x,y) = k(y,x) exact.
    let t = t.abs();
    let frac = t - t.floor();
    let sign = if s % 2 == 1 { 1.0 } else { -1.0 };
    1.0 + sign * (2.0 * PI).powi(n as i32) / factorial(n) * bernoulli_poly(n, frac)
}

fn family_kernel(family: &Family, x: &[f64], y: &[f64]) -> f64 {
    match *family {
        Family::PeriodicSobolev { s } | Family::Korobov { s, .. } => {
            x.iter().zip(y).map(|(a, b)| sobolev_factor(s, a - b)).product()
        }
        Family::GaussianHermite { gamma, .. } => {
            let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
            (-r2 / (2.0 * gamma * gamma)).exp()
        }
    }
}

/// Values of the retained eigenfunctions at `x`.
pub(crate) fn retained_values(family: &Family, r: &Retained, x: &[f64]) -> Vec<f64> {
    r.indices
        .iter()
        .map(|u| u.0.iter().zip(x).map(|(&i, &t)| coord_eigenfunction(family, i, t)).product())
        .collect()
}

/// Reproducing kernel `k(x, y)`.
pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> f64 {
    spec.check_point(x);
    spec.check_point(y);
    match spec.modifier() {
        Modifier::Full => family_kernel(&spec.family, x, y),
        Modifier::Truncated(r) => {
            let ex = retained_values(&spec.family, r, x);
            let ey = retained_values(&spec.family, r, y);
            r.eigenvalues.iter().zip(ex.iter().zip(&ey)).map(|(s, (a, b))| s * a * b).sum()
        }
        Modifier::Capped(r) => {
            let ex = retained_values(&spec.family, r, x);
            let ey = retained_values(&spec.family, r, y);
            let top = r.eigenvalues[0];
            family_kernel(&spec.family, x, y)
                + r.eigenvalues.iter().zip(ex.iter().zip(&ey)).map(|(s, (a, b))| (top - s) * a * b).sum::<f64>()
        }
    }
}

/// Total trace `Σ σ_m` of the unmodified family.
fn family_trace(family: &Family) -> f64 {
    match *family {
        Family::PeriodicSobolev { s } | Family::Korobov { s, .. } => {
            (1.0 + 2.0 * zeta(2.0 * s as f64)).powi(family.dim() as i32)
        }
        Family::GaussianHermite { gamma, sigma, d } => GaussConsts::new(gamma, sigma).trace().powi(d as i32),
    }
}

/// Total trace of `spec`.
pub fn total_trace(spec: &KernelSpec) -> f64 {
    match spec.modifier() {
        Modifier::Full => family_trace(&spec.family),
        Modifier::Truncated(r) => r.eigenvalues.iter().sum(),
        Modifier::Capped(r) => {
            let top = r.eigenvalues[0];
            family_trace(&spec.family) + r.eigenvalues.iter().map(|s| top - s).sum::<f64>()
        }
    }
}

fn family_tail(family: &Family, n: usize) -> f64 {
    match *family {
        Family::PeriodicSobolev { s } | Family::Korobov { s, d: 1 } => {
            let p = 2.0 * s as f64;
            // Remaining ordinals start at n: an odd ordinal opens a full
            // cos/sin pair, an even one is the sine left over from a pair.
            if n % 2 == 1 {
                2.0 * crate::numeric::hurwitz_zeta(p, n.div_ceil(2) as u64)
            } else {
                let f = (n / 2) as u64;
                (f as f64).powf(-p) + 2.0 * crate::numeric::hurwitz_zeta(p, f + 1)
            }
        }
        Family::GaussianHermite { gamma, sigma, d: 1 } => {
            let g = GaussConsts::new(gamma, sigma);
            g.lead * g.ratio.powi(n as i32) / (1.0 - g.ratio)
        }
        _ => {
            let (_, vals) = ordered_spectrum(family, n);
            let partial: f64 = vals.iter().rev().sum();
            (family_trace(family) - partial).max(0.0)
        }
    }
}

/// Spectral tail `r_N = Σ_{m > N} σ_m`.
pub fn spectral_tail(spec: &KernelSpec, n: usize) -> f64 {
    match spec.modifier() {
        Modifier::Full => family_tail(&spec.family, n),
        Modifier::Truncated(r) => r.eigenvalues.iter().skip(n).rev().sum(),
        Modifier::Capped(r) => {
            let top = r.eigenvalues[0];
            family_tail(&spec.family, n) + r.eigenvalues.iter().skip(n).map(|s| top - s).sum::<f64>()
        }
    }
}

/// Mean element `μ_g(x) = ∫ g(y) k(x, y) dω(y)`.
pub fn mean_element_eval(spec: &KernelSpec, g: &Integrand, x: &[f64]) -> f64 {
    integrand::mean_element(spec, g, x)
}

/// Squared RKHS norm of the mean element.
pub fn mean_element_norm_sq(spec: &KernelSpec, g: &Integrand) -> f64 {
    integrand::mean_norm_sq(spec, g)
}

/// The spec with its first `n` eigenvalues raised to `σ_1`.
pub fn flat_capped_spec(spec: &KernelSpec, n: usize) -> Result<KernelSpec> {
    spec.base().flat_capped(n)
}

/// Top-`rank` truncation of `spec`.
pub fn truncate(spec: &KernelSpec, rank: usize) -> Result<KernelSpec> {
    spec.base().truncate(rank)
}

#[cfg(test)]
mod tests;
