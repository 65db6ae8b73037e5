use qchaos::spectra::*;
use qchaos::{C64, CMat};
use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn disk(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let x: f64 = rng.random_range(-1.0..1.0);
        let y: f64 = rng.random_range(-1.0..1.0);
        if x * x + y * y <= 1.0 { pts.push(C64::new(x, y)); }
    }
    pts
}

fn ginibre_eigs(dim: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: CMat = Array2::from_shape_fn((dim, dim), |_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    qchaos::linalg::complex_eigenvalues(&g).unwrap()
}

fn pooled(spectra: &[Vec<C64>], k: usize) -> Vec<f64> {
    let mut all = Vec::new();
    for eigs in spectra {
        let sp = ComplexSpectrum::new(eigs.clone(), "x").unwrap();
        let s = spacing_sample(&sp, Unfolding::LocalKnn(k)).unwrap();
        all.extend(s.spacings);
    }
    let mean: f64 = all.iter().sum::<f64>() / all.len() as f64;
    for v in all.iter_mut() { *v /= mean; }
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all
}

fn main() {
    // 30 disk realizations of 1200 points; 40 Ginibre dim-200 realizations x2 batches
    let disks: Vec<Vec<C64>> = (0..30).map(|i| disk(1200, 100 + i)).collect();
    let gin_a: Vec<Vec<C64>> = (0..40).map(|i| ginibre_eigs(200, 500 + i)).collect();
    let gin_b: Vec<Vec<C64>> = (0..40).map(|i| ginibre_eigs(200, 900 + i)).collect();
    for k in [10usize, 20, 30, 40] {
        let d = pooled(&disks, k);
        let ga = pooled(&gin_a, k);
        let gb = pooled(&gin_b, k);
        let ks_d_p2d = ks_vs_cdf(&d, poisson2d_cdf);
        let ks_d_gin = ks_two_sample(&d, &ga);
        let ks_g_p2d = ks_vs_cdf(&gb, poisson2d_cdf);
        let ks_g_gin = ks_two_sample(&gb, &ga);
        println!("k={k:2}: disk: [p2d {ks_d_p2d:.3} | gin {ks_d_gin:.3}]   ginibre: [p2d {ks_g_p2d:.3} | gin {ks_g_gin:.3}]");
    }
}
