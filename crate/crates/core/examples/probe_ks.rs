use qchaos::rmt::*;
use qchaos::spectra::*;
use std::time::Instant;

fn main() {
    let seeds: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    let reference = ginibre_reference(60, 200, 0x1234).unwrap();
    println!("reference: {} spacings", reference.sorted_spacings.len());
    for (mu, chi) in [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)] {
        let t0 = Instant::now();
        let cfg = ToyModelConfig { n_total: 49, mu, chi, gamma: 1.0, seed: 4242, ensemble_size: seeds };
        let mut spectra = Vec::new();
        for idx in 0..seeds as u64 {
            let real = sample_realization(&cfg, idx).unwrap();
            let steady = if mu > 0.0 && chi > 0.0 { Some(regular_steady_state(&real, 1.0).unwrap()) } else { None };
            let h = build_hamiltonian(&real, mu, chi, steady.as_ref()).unwrap();
            let eigs = liouvillian_spectrum(&h, &real.jump, 1.0).unwrap();
            spectra.push(ComplexSpectrum::new(eigs, "probe").unwrap().filter_conjugate_symmetry());
        }
        let dist = pooled_nn_spacings(&spectra, Unfolding::default(), &reference).unwrap();
        let c = classify(&dist);
        println!("mu={mu} chi={chi}: {} spacings, KS_p2d={:.4} KS_gin={:.4} -> {} ({:.0}s)",
            dist.spacings.len(), c.ks_poisson2d, c.ks_ginibre, c.label, t0.elapsed().as_secs_f64());
    }
}
