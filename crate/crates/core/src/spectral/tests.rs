use std::f64::consts::PI;

use approx::assert_relative_eq;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

use super::*;
use crate::numeric::{gauss_hermite_normal, gauss_legendre_unit};
use crate::rng::RngStream;

fn idx(v: &[i64]) -> MultiIndex {
    MultiIndex(v.to_vec())
}

fn gauss() -> KernelSpec {
    KernelSpec::gaussian(0.5, 1.0, 1).unwrap()
}

/// Quadrature rule for `dω` in one dimension.
fn measure_rule(spec: &KernelSpec) -> (Vec<f64>, Vec<f64>) {
    match spec.family() {
        Family::GaussianHermite { sigma, .. } => gauss_hermite_normal(200, *sigma),
        _ => gauss_legendre_unit(2001),
    }
}

#[test]
fn eigenvalue_examples() {
    let s1 = KernelSpec::sobolev(1).unwrap();
    assert_eq!(eigenvalue(&s1, &idx(&[0])).unwrap(), 1.0);
    assert_eq!(eigenvalue(&s1, &idx(&[2])).unwrap(), 0.25);
    assert_eq!(eigenvalue(&s1, &idx(&[-2])).unwrap(), 0.25);
    // Leading Gaussian eigenvalue, evaluated independently in extended precision.
    assert_relative_eq!(eigenvalue(&gauss(), &idx(&[0])).unwrap(), 0.390388203202207568, max_relative = 1e-14);
    assert!(matches!(eigenvalue(&gauss(), &idx(&[-1])), Err(Error::NegativeIndex(-1))));
    assert!(matches!(eigenvalue(&gauss(), &idx(&[0, 0])), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn gaussian_spectrum_matches_discretized_operator() {
    // Nyström discretization of the integral operator on a Gauss–Hermite rule.
    let spec = gauss();
    let (x, w) = gauss_hermite_normal(120, 1.0);
    let n = x.len();
    let m = DMatrix::from_fn(n, n, |i, j| w[i].sqrt() * kernel_eval(&spec, &[x[i]], &[x[j]]) * w[j].sqrt());
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    for (k, v) in ev.iter().take(6).enumerate() {
        let exact = eigenvalue(&spec, &idx(&[k as i64])).unwrap();
        assert_relative_eq!(*v, exact, max_relative = 1e-8);
    }
}

#[test]
fn eigenfunction_examples() {
    let s1 = KernelSpec::sobolev(1).unwrap();
    assert_eq!(eigenfunction_eval(&s1, &idx(&[0]), &[0.37]).unwrap(), 1.0);
    assert_relative_eq!(eigenfunction_eval(&s1, &idx(&[1]), &[0.0]).unwrap(), 2f64.sqrt());
    assert_eq!(eigenfunction_eval(&gauss(), &idx(&[1]), &[0.0]).unwrap(), 0.0);
}

#[test]
fn spectral_basis_examples() {
    let b = spectral_basis(&KernelSpec::sobolev(1).unwrap(), 3);
    assert_eq!(b.eigenvalues(), &[1.0, 1.0, 1.0]);
    assert_eq!(b.indices(), &[idx(&[0]), idx(&[1]), idx(&[-1])]);

    let b = spectral_basis(&KernelSpec::gaussian(0.5, 1.0, 2).unwrap(), 4);
    assert_eq!(b.indices(), &[idx(&[0, 0]), idx(&[1, 0]), idx(&[0, 1]), idx(&[2, 0])]);

    let b = spectral_basis(&KernelSpec::korobov(1, 2).unwrap(), 1);
    assert_eq!(b.indices(), &[idx(&[0, 0])]);
    assert_eq!(b.eigenvalues(), &[1.0]);
}

#[test]
fn korobov_order_matches_brute_force() {
    // Sort every index with frequencies up to 12 by eigenvalue, breaking
    // ties colexicographically on the 1-d ordinals.
    let spec = KernelSpec::korobov(2, 2).unwrap();
    let mut all = Vec::new();
    for a in -12i64..=12 {
        for b in -12i64..=12 {
            all.push(idx(&[a, b]));
        }
    }
    all.sort_by(|u, v| {
        let eu = eigenvalue(&spec, u).unwrap();
        let ev = eigenvalue(&spec, v).unwrap();
        ev.partial_cmp(&eu).unwrap().then_with(|| {
            let cu: Vec<u32> = u.0.iter().rev().map(|&j| periodic_ordinal(j)).collect();
            let cv: Vec<u32> = v.0.iter().rev().map(|&j| periodic_ordinal(j)).collect();
            cu.cmp(&cv)
        })
    });
    let b = spectral_basis(&spec, 60);
    assert_eq!(b.indices(), &all[..60]);
}

#[test]
fn kernel_closed_forms() {
    let s1 = KernelSpec::sobolev(1).unwrap();
    assert_eq!(kernel_eval(&gauss(), &[0.3], &[0.3]), 1.0);
    assert_relative_eq!(kernel_eval(&s1, &[0.2], &[0.2]), 4.289868133696453, max_relative = 1e-14);
    let k2 = KernelSpec::korobov(1, 2).unwrap();
    let d = 1.0 + PI * PI / 3.0;
    assert_relative_eq!(kernel_eval(&k2, &[0.1, 0.7], &[0.1, 0.7]), d * d, max_relative = 1e-14);
}

#[test]
fn sobolev_equals_one_dimensional_korobov() {
    let s = KernelSpec::sobolev(2).unwrap();
    let k = KernelSpec::korobov(2, 1).unwrap();
    let mut r = RngStream::new(4);
    for _ in 0..50 {
        let (x, y) = ([r.uniform()], [r.uniform()]);
        assert_eq!(kernel_eval(&s, &x, &y), kernel_eval(&k, &x, &y));
    }
    assert_eq!(spectral_basis(&s, 20).eigenvalues(), spectral_basis(&k, 20).eigenvalues());
    assert_eq!(spectral_tail(&s, 7), spectral_tail(&k, 7));
}

/// `1 + 2 Σ_{m ≤ M} m^{-2s} cos(2πmt)` summed smallest terms first.
fn mercer_series(s: u32, t: f64, m: usize) -> f64 {
    let mut acc = 0.0;
    for k in (1..=m).rev() {
        acc += (k as f64).powi(-2 * s as i32) * (2.0 * PI * k as f64 * t).cos();
    }
    1.0 + 2.0 * acc
}

#[test]
fn kernel_matches_long_mercer_series() {
    let mut r = RngStream::new(8);
    for s in [1u32, 2, 3] {
        let spec = KernelSpec::sobolev(s).unwrap();
        for _ in 0..10 {
            let (x, y) = (r.uniform(), r.uniform());
            let series = mercer_series(s, x - y, 1_000_000);
            assert_relative_eq!(kernel_eval(&spec, &[x], &[y]), series, max_relative = 1e-6);
        }
    }
}

#[test]
fn mercer_consistency_bound() {
    // With |e_n| ≤ √2, the truncation error is at most 2 r_M.
    let mut r = RngStream::new(2);
    for s in [1u32, 3] {
        let spec = KernelSpec::sobolev(s).unwrap();
        let basis = spectral_basis(&spec, 10_000);
        let pairs: Vec<(f64, f64)> = (0..100).map(|_| (r.uniform(), r.uniform())).collect();
        let mut prev = f64::INFINITY;
        for m in [100usize, 1000, 10_000] {
            let bound = 2.0 * spectral_tail(&spec, m);
            let mut worst: f64 = 0.0;
            for &(x, y) in &pairs {
                let ex = basis.eval(&[x]);
                let ey = basis.eval(&[y]);
                let partial: f64 = (0..m).map(|n| basis.eigenvalues()[n] * ex[n] * ey[n]).sum();
                worst = worst.max((kernel_eval(&spec, &[x], &[y]) - partial).abs());
            }
            assert!(worst <= bound + 1e-12, "s={s} M={m}: {worst} > {bound}");
            assert!(bound < prev);
            prev = bound;
        }
    }
}

#[test]
fn orthonormality_of_leading_eigenfunctions() {
    for spec in [KernelSpec::sobolev(1).unwrap(), gauss()] {
        let (x, w) = measure_rule(&spec);
        let basis = spectral_basis(&spec, 12);
        let vals: Vec<Vec<f64>> = x.iter().map(|&t| basis.eval(&[t])).collect();
        for u in 0..12 {
            for v in 0..12 {
                let ip: f64 = vals.iter().zip(&w).map(|(e, w)| w * e[u] * e[v]).sum();
                let want = if u == v { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-6, "{u},{v}: {ip}");
            }
        }
    }
    // Korobov: tensor rule.
    let spec = KernelSpec::korobov(1, 2).unwrap();
    let (x, w) = gauss_legendre_unit(101);
    let basis = spectral_basis(&spec, 12);
    let mut gram = DMatrix::<f64>::zeros(12, 12);
    for (a, wa) in x.iter().zip(&w) {
        for (b, wb) in x.iter().zip(&w) {
            let e = basis.eval(&[*a, *b]);
            for u in 0..12 {
                for v in 0..12 {
                    gram[(u, v)] += wa * wb * e[u] * e[v];
                }
            }
        }
    }
    assert!((gram - DMatrix::identity(12, 12)).amax() < 1e-6);
}

#[test]
fn eigenrelation_holds_numerically() {
    let mut r = RngStream::new(12);
    for spec in [KernelSpec::sobolev(1).unwrap(), KernelSpec::sobolev(3).unwrap(), gauss()] {
        let (y, w) = measure_rule(&spec);
        let basis = spectral_basis(&spec, 6);
        let ey: Vec<Vec<f64>> = y.iter().map(|&t| basis.eval(&[t])).collect();
        for _ in 0..20 {
            let x = match spec.family() {
                Family::GaussianHermite { .. } => r.normal(),
                _ => r.uniform(),
            };
            let ex = basis.eval(&[x]);
            for u in 0..6 {
                let integral: f64 =
                    y.iter().zip(&w).zip(&ey).map(|((&t, w), e)| w * kernel_eval(&spec, &[x], &[t]) * e[u]).sum();
                let want = basis.eigenvalues()[u] * ex[u];
                let scale = basis.eigenvalues()[u] * ex.iter().map(|v| v.abs()).fold(0.0, f64::max);
                assert!((integral - want).abs() <= 1e-4 * scale.max(want.abs()), "u={u} x={x}");
            }
        }
    }
}

#[test]
fn mean_element_examples() {
    let s1 = KernelSpec::sobolev(1).unwrap();
    let g1 = Integrand::ConstantOne;
    assert_eq!(mean_element_eval(&s1, &g1, &[0.123]), 1.0);
    assert_eq!(mean_element_norm_sq(&s1, &g1), 1.0);

    let spec = gauss();
    let (y, w) = gauss_hermite_normal(200, 1.0);
    let numeric: f64 = y.iter().zip(&w).map(|(&t, w)| w * kernel_eval(&spec, &[0.0], &[t])).sum();
    assert_relative_eq!(mean_element_eval(&spec, &g1, &[0.0]), 0.5 / 1.25f64.sqrt(), max_relative = 1e-14);
    assert_relative_eq!(mean_element_eval(&spec, &g1, &[0.0]), numeric, max_relative = 1e-10);

    let double: f64 = y
        .iter()
        .zip(&w)
        .map(|(&a, wa)| wa * y.iter().zip(&w).map(|(&b, wb)| wb * kernel_eval(&spec, &[a], &[b])).sum::<f64>())
        .sum();
    assert_relative_eq!(mean_element_norm_sq(&spec, &g1), 1.0 / 3.0, max_relative = 1e-14);
    assert_relative_eq!(mean_element_norm_sq(&spec, &g1), double, max_relative = 1e-10);

    for spec in [s1, spec] {
        let u = idx(&[2]);
        let g = Integrand::EigenCoefficients(vec![(u.clone(), 1.0)]);
        let sig = eigenvalue(&spec, &u).unwrap();
        let x = [0.3];
        assert_relative_eq!(
            mean_element_eval(&spec, &g, &x),
            sig * eigenfunction_eval(&spec, &u, &x).unwrap(),
            max_relative = 1e-14
        );
        assert_relative_eq!(mean_element_norm_sq(&spec, &g), sig, max_relative = 1e-14);
    }
}

#[test]
fn gaussian_constant_coefficients() {
    let g = GaussConsts::new(0.5, 1.0);
    let c = g.constant_coefficients(200);
    let (x, w) = gauss_hermite_normal(200, 1.0);
    let mut vals = Vec::new();
    for m in [0usize, 1, 2, 4, 7, 10] {
        let numeric: f64 = x
            .iter()
            .zip(&w)
            .map(|(&t, w)| {
                g.eigenfunctions(t, m, &mut vals);
                w * vals[m]
            })
            .sum();
        assert!((numeric - c[m]).abs() < 1e-10, "m={m}");
    }
    // Parseval: ‖1‖² = 1.
    assert_relative_eq!(c.iter().map(|v| v * v).sum::<f64>(), 1.0, max_relative = 1e-10);
    // Mercer: ‖μ‖² = Σ σ_m c_m².
    let s: f64 = c.iter().enumerate().map(|(m, v)| g.eigenvalue(m as u32) * v * v).sum();
    assert_relative_eq!(s, 1.0 / 3.0, max_relative = 1e-12);
}

#[test]
fn tail_examples() {
    let spec = gauss();
    let g = spec.gauss_consts().unwrap();
    for n in [1usize, 5, 20] {
        let direct: f64 = (n..10_000).rev().map(|m| g.eigenvalue(m as u32)).sum();
        assert_relative_eq!(spectral_tail(&spec, n), direct, max_relative = 1e-12);
    }
    let s3 = KernelSpec::sobolev(3).unwrap();
    assert_relative_eq!(spectral_tail(&s3, 5), 0.00343612396889827943, max_relative = 1e-12);
    // Direct summation over 10^7 ordinals, smallest first.
    let direct: f64 = (5u32..10_000_000)
        .rev()
        .map(|o| eigenvalue(&s3, &idx(&[periodic_from_ordinal(o)])).unwrap())
        .sum();
    assert_relative_eq!(spectral_tail(&s3, 5), direct, max_relative = 1e-10);
    let s1 = KernelSpec::sobolev(1).unwrap();
    let direct: f64 = (6u32..4_000_000).rev().map(|o| eigenvalue(&s1, &idx(&[periodic_from_ordinal(o)])).unwrap()).sum();
    assert_relative_eq!(spectral_tail(&s1, 6), direct + spectral_tail(&s1, 4_000_000), max_relative = 1e-12);
}

#[test]
fn tail_consistency_in_two_dimensions() {
    for spec in [KernelSpec::korobov(1, 2).unwrap(), KernelSpec::gaussian(0.5, 1.0, 2).unwrap()] {
        for n in [1usize, 10, 57, 200] {
            let partial: f64 = spectral_basis(&spec, n).eigenvalues().iter().sum();
            assert_relative_eq!(spectral_tail(&spec, n) + partial, total_trace(&spec), max_relative = 1e-8);
        }
    }
}

#[test]
fn truncation_examples() {
    let one = truncate(&KernelSpec::sobolev(1).unwrap(), 1).unwrap();
    assert_relative_eq!(kernel_eval(&one, &[0.1], &[0.8]), 1.0, max_relative = 1e-15);
    for spec in [KernelSpec::sobolev(2).unwrap(), gauss(), KernelSpec::korobov(1, 2).unwrap()] {
        let t = truncate(&spec, 7).unwrap();
        assert_eq!(spectral_tail(&t, 7), 0.0);
        let basis = spectral_basis(&t, 7);
        let x = vec![0.3; spec.dim()];
        let e = basis.eval(&x);
        let diag: f64 = basis.eigenvalues().iter().zip(&e).map(|(s, v)| s * v * v).sum();
        assert_relative_eq!(kernel_eval(&t, &x, &x), diag, max_relative = 1e-13);
        assert_eq!(t.rank(), Some(7));
    }
}

#[test]
fn capped_spec_raises_leading_eigenvalues() {
    let spec = gauss();
    let capped = flat_capped_spec(&spec, 3).unwrap();
    let b = spectral_basis(&capped, 5);
    let top = eigenvalue(&spec, &idx(&[0])).unwrap();
    assert_eq!(&b.eigenvalues()[..3], &[top, top, top]);
    assert_eq!(b.eigenvalues()[3], eigenvalue(&spec, &idx(&[3])).unwrap());
    // Kernel and Mercer sum agree.
    let full = spectral_basis(&capped, 60);
    let (x, y) = ([0.2], [-0.4]);
    let (ex, ey) = (full.eval(&x), full.eval(&y));
    let series: f64 = (0..60).map(|n| full.eigenvalues()[n] * ex[n] * ey[n]).sum();
    assert_relative_eq!(kernel_eval(&capped, &x, &y), series, max_relative = 1e-10);
    let partial: f64 = full.eigenvalues()[..4].iter().sum();
    assert_relative_eq!(spectral_tail(&capped, 4) + partial, total_trace(&capped), max_relative = 1e-12);
}

#[test]
fn spec_json_round_trip() {
    let text = r#"{"family":"gaussian","s":null,"d":1,"gamma":0.5,"sigma":1.0,"rank":null}"#;
    let spec: KernelSpec = serde_json::from_str(text).unwrap();
    assert_eq!(spec, gauss());
    for spec in [
        KernelSpec::sobolev(3).unwrap(),
        KernelSpec::korobov(1, 2).unwrap().truncate(9).unwrap(),
        gauss().flat_capped(4).unwrap(),
    ] {
        let s = serde_json::to_string(&spec).unwrap();
        assert!(s.contains("\"rank\""));
        assert_eq!(serde_json::from_str::<KernelSpec>(&s).unwrap(), spec);
    }
    assert!(serde_json::from_str::<KernelSpec>(r#"{"family":"sobolev","s":0}"#).is_err());
    assert!(serde_json::from_str::<KernelSpec>(r#"{"family":"gaussian","gamma":-1,"sigma":1}"#).is_err());
}

fn any_spec() -> impl Strategy<Value = KernelSpec> {
    prop_oneof![
        (1u32..5).prop_map(|s| KernelSpec::sobolev(s).unwrap()),
        (1u32..4, 2usize..4).prop_map(|(s, d)| KernelSpec::korobov(s, d).unwrap()),
        (0.1f64..3.0, 0.2f64..3.0, 1usize..4).prop_map(|(g, s, d)| KernelSpec::gaussian(g, s, d).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn basis_is_ordered_and_consistent(spec in any_spec(), n in 1usize..120) {
        let b = spectral_basis(&spec, n + 1);
        let ev = b.eigenvalues();
        for i in 0..n {
            prop_assert!(ev[i] >= ev[i + 1]);
        }
        for (u, &v) in b.indices().iter().zip(ev) {
            prop_assert_eq!(eigenvalue(&spec, u).unwrap(), v);
        }
        let distinct: HashSet<_> = b.indices().iter().collect();
        prop_assert_eq!(distinct.len(), n + 1);
        let shorter = spectral_basis(&spec, n);
        prop_assert_eq!(shorter.indices(), &b.indices()[..n]);
    }

    #[test]
    fn tail_plus_partial_is_trace(spec in any_spec(), n in 1usize..150) {
        let partial: f64 = spectral_basis(&spec, n).eigenvalues().iter().sum();
        let total = total_trace(&spec);
        prop_assert!(((spectral_tail(&spec, n) + partial) - total).abs() <= 1e-8 * total);
    }

    #[test]
    fn kernel_is_symmetric_and_tensorizes(spec in any_spec(), seed in any::<u64>()) {
        let mut r = RngStream::new(seed);
        let d = spec.dim();
        let x: Vec<f64> = (0..d).map(|_| r.uniform()).collect();
        let y: Vec<f64> = (0..d).map(|_| r.uniform()).collect();
        let kxy = kernel_eval(&spec, &x, &y);
        prop_assert_eq!(kxy, kernel_eval(&spec, &y, &x));
        let one_d = match *spec.family() {
            Family::GaussianHermite { gamma, sigma, .. } => KernelSpec::gaussian(gamma, sigma, 1).unwrap(),
            Family::Korobov { s, .. } | Family::PeriodicSobolev { s } => KernelSpec::sobolev(s).unwrap(),
        };
        let prod: f64 = x.iter().zip(&y).map(|(a, b)| kernel_eval(&one_d, &[*a], &[*b])).product();
        prop_assert!((kxy - prod).abs() <= 1e-12 * prod.abs().max(1.0));
    }
}
