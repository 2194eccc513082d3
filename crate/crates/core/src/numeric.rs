//! Special functions, quadrature rules and small regression helpers.

use nalgebra::{DMatrix, SymmetricEigen};

/// Bernoulli numbers `B_0..=B_20` (convention `B_1 = -1/2`).
const BERNOULLI: [f64; 21] = [
    1.0,
    -0.5,
    1.0 / 6.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    1.0 / 42.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    5.0 / 66.0,
    0.0,
    -691.0 / 2730.0,
    0.0,
    7.0 / 6.0,
    0.0,
    -3617.0 / 510.0,
    0.0,
    43867.0 / 798.0,
    0.0,
    -174611.0 / 330.0,
];

/// Largest Bernoulli index available to [`bernoulli_poly`].
pub const MAX_BERNOULLI: usize = 20;

pub fn bernoulli_number(n: usize) -> f64 {
    BERNOULLI[n]
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Natural log of `n!`.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Bernoulli polynomial `B_n(t)`.
pub fn bernoulli_poly(n: usize, t: f64) -> f64 {
    assert!(n <= MAX_BERNOULLI, "Bernoulli polynomial degree {n} too large");
    // Horner on the coefficients C(n,k) B_k of t^{n-k}.
    let mut acc = 0.0;
    for k in 0..=n {
        acc = acc * t + binomial(n, k) * BERNOULLI[k];
    }
    acc
}

/// Hurwitz zeta `Σ_{m ≥ a} m^{-s}` for `s > 1` and integer `a ≥ 1`.
///
/// Sums directly up to a cutoff and closes with an Euler–Maclaurin remainder.
pub fn hurwitz_zeta(s: f64, a: u64) -> f64 {
    assert!(s > 1.0 && a >= 1);
    const CUT: u64 = 64;
    let start = a.max(1);
    let m = start.max(CUT);
    let mut direct = 0.0;
    // Smallest terms first.
    for k in (start..m).rev() {
        direct += (k as f64).powf(-s);
    }
    let mf = m as f64;
    let mut tail = mf.powf(1.0 - s) / (s - 1.0) + 0.5 * mf.powf(-s);
    // Derivative terms: f^{(2j-1)}(m) = -s(s+1)...(s+2j-2) m^{-s-2j+1}.
    let mut rising = s;
    let mut pow = mf.powf(-s - 1.0);
    for j in 1..=5 {
        let b = BERNOULLI[2 * j] / factorial(2 * j);
        tail += b * rising * pow;
        rising *= (s + 2.0 * j as f64 - 1.0) * (s + 2.0 * j as f64);
        pow /= mf * mf;
    }
    direct + tail
}

/// Riemann zeta at `s > 1`.
pub fn zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1)
}

/// Gauss–Legendre rule on `[0, 1]`: `(nodes, weights)`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp;
        loop {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        let wi = 1.0 / ((1.0 - z * z) * pp * pp);
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Hermite rule for the `N(0, scale²)` probability measure via the
/// Golub–Welsch eigenproblem. Nodes ascend; weights sum to one.
pub fn gauss_hermite_normal(n: usize, scale: f64) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.0], vec![1.0]);
    }
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Exact symmetry about zero.
    for k in 0..n / 2 {
        let x = 0.5 * (pairs[n - 1 - k].0 - pairs[k].0);
        let w = 0.5 * (pairs[n - 1 - k].1 + pairs[k].1);
        pairs[k] = (-x, w);
        pairs[n - 1 - k] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    pairs
        .into_iter()
        .map(|(x, w)| (x * scale, w / total))
        .unzip()
}

/// Ordinary least squares fit `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let stderr = if x.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    LinearFit {
        slope,
        intercept,
        stderr,
        r_squared,
    }
}
