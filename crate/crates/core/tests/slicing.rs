use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use turborecon::rng::SeededRng;
use turborecon::slicing::{
    empirical_entropy, estimate_slice, hamming, labels_from_slices, quantize, SliceConfig, SliceSet,
};

fn correlated(l: usize, sigma: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = SeededRng::new(seed);
    let x: Vec<f64> = (0..l).map(|_| rng.normal()).collect();
    let y = x.iter().map(|&v| v + sigma * rng.normal()).collect();
    (x, y)
}

#[test]
fn sign_quantizer_examples() {
    let cfg = SliceConfig {
        m: 1,
        boundaries: vec![0.0],
        noise_sigma: 0.5,
    };
    let (_, s) = quantize(&[-1.3, 0.2], &cfg);
    assert_eq!(s[0], vec![0, 1]);
}

#[test]
fn quartile_example() {
    let cfg = SliceConfig::equiprobable(2, 0.1).unwrap();
    for (b, want) in cfg.boundaries.iter().zip([-0.6745, 0.0, 0.6745]) {
        assert!((b - want).abs() < 1e-4, "{b} vs {want}");
    }
    let (labels, s) = quantize(&[0.3], &cfg);
    assert_eq!(labels, vec![2]);
    assert_eq!((s[0][0], s[1][0]), (0, 1));
}

#[test]
fn quantizer_is_a_partition() {
    let cfg = SliceConfig::equiprobable(4, 0.2).unwrap();
    let (x, _) = correlated(50_000, 0.2, 5);
    let (labels, slices) = quantize(&x, &cfg);
    let mut hist = vec![0usize; cfg.cells()];
    for &c in &labels {
        hist[c as usize] += 1;
    }
    assert_eq!(hist.iter().sum::<usize>(), x.len());
    assert_eq!(labels_from_slices(&slices), labels);
    for (&v, &c) in x.iter().zip(&labels) {
        let (lo, hi) = cfg.cell_edges(c as usize);
        assert!(lo <= v && v < hi);
    }
}

#[test]
fn noiseless_estimates_are_exact() {
    let cfg = SliceConfig::equiprobable(5, 0.0).unwrap();
    let (x, _) = correlated(20_000, 0.0, 8);
    let set = SliceSet::build(&x, &x, &cfg).unwrap();
    assert_eq!(set.estimates, set.slices);
    assert!(set.ber.iter().all(|&e| e == 0.0));
}

#[test]
fn sign_slice_ber_matches_closed_form() {
    // P(sign x != sign(x + n)) = atan(sigma) / pi
    let l = 100_000;
    for (k, sigma) in [0.3f64, 0.7, 1.0].into_iter().enumerate() {
        let cfg = SliceConfig {
            m: 1,
            boundaries: vec![0.0],
            noise_sigma: sigma,
        };
        let (x, y) = correlated(l, sigma, 100 + k as u64);
        let set = SliceSet::build(&x, &y, &cfg).unwrap();
        let p = sigma.atan() / std::f64::consts::PI;
        let tol = 3.0 * (p * (1.0 - p) / l as f64).sqrt();
        assert!(
            (set.ber[0] - p).abs() <= tol,
            "sigma {sigma}: {} vs {p} +- {tol}",
            set.ber[0]
        );
    }
}

/// Joint density of (x, y) integrated over a cell with composite Simpson.
fn cell_mass(lo: f64, hi: f64, y: f64, sigma: f64) -> f64 {
    let lo = lo.max(-12.0);
    let hi = hi.min(12.0);
    if hi <= lo {
        return 0.0;
    }
    let prior = Normal::new(0.0, 1.0).unwrap();
    let noise = Normal::new(0.0, sigma).unwrap();
    let f = |x: f64| prior.pdf(x) * noise.pdf(y - x);
    let n = 4000;
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + k as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn estimate_matches_numerical_integration() {
    let mut rng = SeededRng::new(77);
    let mut compared = 0;
    for _ in 0..100 {
        let m = 1 + rng.below(5) as usize;
        let sigma = 0.05 + 0.95 * rng.uniform();
        let cfg = SliceConfig::equiprobable(m, sigma).unwrap();
        let x = rng.normal();
        let y = x + sigma * rng.normal();
        let i = 1 + rng.below(m as u64) as usize;
        let label = cfg.cell_of(x);
        let lower_bits = label & ((1 << (i - 1)) - 1);
        let lower: Vec<Vec<u8>> = (0..i - 1).map(|j| vec![((label >> j) & 1) as u8]).collect();

        let mut mass = [0.0f64; 2];
        for c in 0..cfg.cells() {
            if c & ((1 << (i - 1)) - 1) == lower_bits {
                let (lo, hi) = cfg.cell_edges(c);
                mass[(c >> (i - 1)) & 1] += cell_mass(lo, hi, y, sigma);
            }
        }
        let got = estimate_slice(&[y], i, &lower, &cfg).unwrap()[0];
        if (mass[1] - mass[0]).abs() <= 1e-9 * (mass[0] + mass[1]) {
            continue;
        }
        assert_eq!(
            got,
            (mass[1] > mass[0]) as u8,
            "m {m} i {i} y {y} masses {mass:?}"
        );
        compared += 1;
    }
    assert!(compared >= 95);
}

/// MAP of slice `i` ignoring the lower slices.
fn unconditioned_estimate(y: &[f64], i: usize, cfg: &SliceConfig) -> Vec<u8> {
    let s2 = cfg.noise_sigma * cfg.noise_sigma;
    y.iter()
        .map(|&v| {
            let post = Normal::new(v / (1.0 + s2), cfg.noise_sigma / (1.0 + s2).sqrt()).unwrap();
            let mut mass = [0.0f64; 2];
            for c in 0..cfg.cells() {
                let (lo, hi) = cfg.cell_edges(c);
                mass[(c >> (i - 1)) & 1] += post.cdf(hi) - post.cdf(lo);
            }
            (mass[1] > mass[0]) as u8
        })
        .collect()
}

#[test]
fn sequential_refinement_lowers_error_rates() {
    let l = 20_000;
    for (k, sigma) in [0.1, 0.3, 0.6].into_iter().enumerate() {
        let cfg = SliceConfig::equiprobable(3, sigma).unwrap();
        let (x, y) = correlated(l, sigma, 300 + k as u64);
        let set = SliceSet::build(&x, &y, &cfg).unwrap();
        for i in 2..=3 {
            let blind = unconditioned_estimate(&y, i, &cfg);
            let e_blind = hamming(&blind, &set.slices[i - 1]) as f64 / l as f64;
            assert!(
                set.ber[i - 1] <= e_blind,
                "sigma {sigma} slice {i}: {} > {e_blind}",
                set.ber[i - 1]
            );
        }
    }
}

#[test]
fn error_profile_decreases_across_slices() {
    let cfg = SliceConfig::equiprobable(5, 0.104).unwrap();
    let (x, y) = correlated(100_000, 0.104, 9);
    let set = SliceSet::build(&x, &y, &cfg).unwrap();
    assert!(set.ber[0] > 0.4);
    assert!(
        set.ber.windows(2).all(|w| w[0] > w[1] || w[1] == 0.0),
        "{:?}",
        set.ber
    );
    assert!(set.ber[4] < 1e-3);
}

#[test]
fn entropy_examples() {
    assert_eq!(empirical_entropy(&[3; 1000], 5), 0.0);
    let uniform: Vec<u32> = (0..32_000).map(|k| k % 32).collect();
    assert!((empirical_entropy(&uniform, 5) - 5.0 * 32_000.0).abs() < 1e-6);

    let l = 1_000_000;
    let cfg = SliceConfig::equiprobable(5, 0.1).unwrap();
    let (x, _) = correlated(l, 0.0, 11);
    let (labels, _) = quantize(&x, &cfg);
    let per_sample = empirical_entropy(&labels, 5) / l as f64;
    assert!((per_sample - 5.0).abs() < 1e-3, "{per_sample}");
}
