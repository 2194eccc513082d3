use dppq::oracles::ln_abs_det_scaled;
use dppq::sampling::{inclusion_density, sample_cue, sample_dpp, sample_hermite_ensemble};
use dppq::spectral::spectral_basis;
use dppq::stats::{chi_square_uniform, ks_one_sample, mean_stderr};
use dppq::{KernelSpec, RngStream};

fn gauss() -> KernelSpec {
    KernelSpec::gaussian(0.5, 1.0, 1).unwrap()
}

#[test]
fn cue_counts_are_negatively_correlated() {
    // For i.i.d. uniforms the count in [0, 1/2) has variance N/4; a DPP
    // concentrates it much more tightly.
    let n = 10;
    let mut rng = RngStream::new(1);
    let counts: Vec<f64> = (0..2000)
        .map(|_| sample_cue(n, &mut rng).coords().iter().filter(|x| **x < 0.5).count() as f64)
        .collect();
    let (mean, _) = mean_stderr(&counts);
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
    assert!((mean - 5.0).abs() < 0.1, "{mean}");
    assert!(var < 0.5 * n as f64 / 4.0, "{var}");
}

#[test]
fn cue_pooled_points_are_uniform() {
    let mut rng = RngStream::new(2);
    let mut counts = [0u64; 10];
    for _ in 0..1000 {
        for x in sample_cue(20, &mut rng).coords() {
            counts[(x * 10.0) as usize] += 1;
        }
    }
    assert!(chi_square_uniform(&counts) > 0.001, "{counts:?}");
}

#[test]
fn sampled_feature_matrices_are_invertible() {
    let mut rng = RngStream::new(3);
    for spec in [KernelSpec::sobolev(1).unwrap(), gauss(), KernelSpec::korobov(1, 2).unwrap()] {
        for n in [2, 7, 15] {
            let basis = spectral_basis(&spec, n);
            for _ in 0..20 {
                let nodes = sample_dpp(&spec, n, &mut rng).unwrap();
                assert!(ln_abs_det_scaled(&basis.feature_matrix(&nodes), 1e-12).is_ok());
            }
        }
    }
}

#[test]
fn hermite_ensemble_matches_inclusion_density() {
    let spec = gauss();
    let n = 5;
    let basis = spectral_basis(&spec, n);
    let mut rng = RngStream::new(4);
    let (lo, hi, bins) = (-4.0, 4.0, 40);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0.0; bins];
    let draws = 5000;
    for _ in 0..draws {
        for x in sample_hermite_ensemble(&spec, n, &mut rng).unwrap().coords() {
            let b = ((x - lo) / width).floor();
            if (0.0..bins as f64).contains(&b) {
                counts[b as usize] += 1.0;
            }
        }
    }
    let total = (draws * n) as f64;
    let mut tv = 0.0;
    let mut mass = 0.0;
    for (b, c) in counts.iter().enumerate() {
        // Midpoint rule with 20 sub-steps per bin.
        let p: f64 = (0..20)
            .map(|k| inclusion_density(&basis, &[lo + width * (b as f64 + (k as f64 + 0.5) / 20.0)]) * width / 20.0)
            .sum();
        mass += p;
        tv += (c / total - p).abs();
    }
    tv = 0.5 * (tv + (1.0 - mass).abs());
    assert!(tv < 0.05, "total variation {tv}");
}

#[test]
fn cue_single_point_is_uniform() {
    let mut rng = RngStream::new(5);
    let xs: Vec<f64> = (0..5000).map(|_| sample_cue(1, &mut rng).coords()[0]).collect();
    assert!(ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).1 > 0.001);
}
