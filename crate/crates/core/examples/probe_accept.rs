use qchaos::classical::*;
use qchaos::hilbert::HilbertSpec;
use qchaos::lindblad::*;
use qchaos::observables::*;
use qchaos::rmt::*;
use qchaos::spectra::*;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("all");

    if which == "classical" || which == "all" {
        // Criterion 2 physics: transient chaos at the Dicke limit.
        let t0 = Instant::now();
        let ensemble = InitialEnsemble::bloch_uniform(20, 12345);
        for kappa in [1.0, 0.0] {
            let params = AdmParams::dicke(2.0, kappa);
            let ft = finite_time_lyapunov_ensemble(&params, &ensemble, 1e-3, 30.0, 10, (0.0, 0.5)).unwrap();
            let early_max = ft.series.times.iter().zip(ft.series.lambda_t.iter())
                .filter(|(t, _)| **t <= 2.0).map(|(_, l)| *l).fold(f64::NEG_INFINITY, f64::max);
            let tail: Vec<f64> = ft.series.times.iter().zip(ft.series.lambda_t.iter())
                .filter(|(t, _)| **t >= 25.0).map(|(_, l)| *l).collect();
            let tail_avg = tail.iter().sum::<f64>() / tail.len() as f64;
            println!("kappa={kappa}: early max Lambda_t={early_max:.3}, tail avg={tail_avg:.4}, window avg [0,0.5]={:.3}", ft.window_average);
        }
        println!("  classical ensembles took {:.1}s", t0.elapsed().as_secs_f64());

        // Criterion 3 classical: Lambda_ss at lambda+ = 1.0 and 3.5.
        let t0 = Instant::now();
        for lp in [1.0, 3.5] {
            let params = AdmParams::new(1.0, 1.0, 2.0, lp, 1.0).unwrap();
            let mut acc = 0.0;
            for s0 in InitialEnsemble::bloch_uniform(6, 7).states() {
                acc += lyapunov(&s0, &params, 1e-3, 200.0, 10).unwrap().lambda_ss;
            }
            println!("lambda+={lp}: Lambda_ss = {:.4}", acc / 6.0);
        }
        println!("  Lambda_ss points took {:.1}s", t0.elapsed().as_secs_f64());
    }

    if which == "spectrum" || which == "all" {
        // Criterion 6 timing: one seed end to end.
        let cfg = ToyModelConfig { n_total: 49, mu: 0.0, chi: 0.0, gamma: 1.0, seed: 777, ensemble_size: 1 };
        let real = sample_realization(&cfg, 0).unwrap();
        let t0 = Instant::now();
        let ss = regular_steady_state(&real, 1.0).unwrap();
        println!("regular_steady_state N=49: {:.2}s (eta1+eta2 = {:.3})", t0.elapsed().as_secs_f64(), ss.eta[0] + ss.eta[1]);
        let h = build_hamiltonian(&real, 0.0, 0.0, None).unwrap();
        let t0 = Instant::now();
        let eigs = liouvillian_spectrum(&h, &real.jump, 1.0).unwrap();
        println!("liouvillian_spectrum N=49: {:.2}s ({} eigenvalues)", t0.elapsed().as_secs_f64(), eigs.len());
        // zero-mode gap
        let mut mods: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
        mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
        println!("smallest eigenvalue moduli: {:.2e} {:.2e}", mods[0], mods[1]);
    }

    if which == "toydyn" || which == "all" {
        // Criterion 7 timing: one seed of toy dynamics at N=49.
        let t0 = Instant::now();
        let cfg = ToyModelConfig { n_total: 49, mu: 1.0, chi: 0.0, gamma: 1.0, seed: 777, ensemble_size: 2 };
        let opts = ToyDynamicsOptions { dt: 0.02, t_final: 20.0, output_every: 10, slope_window: (0.0, 0.5) };
        let series = toy_vne_dynamics(&cfg, &opts).unwrap();
        println!("toy mu=1 chi=0, 2 seeds: {:.1}s, s_ss = {:.3} (ln7 = {:.3}), slope = {:.3}",
            t0.elapsed().as_secs_f64(), series.s_ss, 7.0f64.ln(), series.s_slope);
        let cfg0 = ToyModelConfig { mu: 0.0, ..cfg };
        let t0 = Instant::now();
        let series0 = toy_vne_dynamics(&cfg0, &opts).unwrap();
        println!("toy mu=0, 2 seeds: {:.1}s, s_ss = {:.3}, slope = {:.3}", t0.elapsed().as_secs_f64(), series0.s_ss, series0.s_slope);
        let cfg1 = ToyModelConfig { mu: 1.0, chi: 1.0, ..cfg };
        let t0 = Instant::now();
        let series1 = toy_vne_dynamics(&cfg1, &opts).unwrap();
        println!("toy mu=1 chi=1, 2 seeds: {:.1}s, s_ss = {:.3}, slope = {:.3}", t0.elapsed().as_secs_f64(), series1.s_ss, series1.s_slope);
    }

    if which == "adm" || which == "all" {
        // Criterion 3 quantum: S=5, n_max=20, one member at each lambda+.
        let spec = HilbertSpec::new(5.0, 20).unwrap();
        let ensemble = InitialEnsemble::bloch_uniform(2, 12345);
        for lp in [1.0, 3.5] {
            let t0 = Instant::now();
            let params = AdmParams::new(1.0, 1.0, 2.0, lp, 1.0).unwrap();
            let gen = adm_generator(&params, &spec).unwrap();
            let states = product_ensemble(&spec, ensemble.bloch_points()).unwrap();
            let mut opts = EvolveOptions::new(5e-3, 50.0);
            opts.output_every = 20; // every 0.1
            let series = vne_dynamics(&states, &gen, &spec, &opts).unwrap();
            println!("ADM lambda+={lp}: {:.1}s for 2 members, S_ss = {:.4}, slope = {:.3}, trace dev {:.1e}",
                t0.elapsed().as_secs_f64(), series.s_ss, series.s_slope, 0.0);
        }
    }

    if which == "fig3" || which == "all" {
        // Criterion 4 physics probe: slopes and long-time VNE, small scale.
        let ens = InitialEnsemble::bloch_uniform(2, 12345);
        for (lambda, kappa, n_max) in [(1.2, 1.0, 20usize), (2.0, 1.0, 20), (1.2, 0.0, 30), (2.0, 0.0, 30)] {
            let t0 = Instant::now();
            let spec = HilbertSpec::new(5.0, n_max).unwrap();
            let params = AdmParams::dicke(lambda, kappa);
            let gen = adm_generator(&params, &spec).unwrap();
            let states = product_ensemble(&spec, ens.bloch_points()).unwrap();
            let mut opts = EvolveOptions::new(5e-3, 25.0);
            opts.output_every = 10;
            let series = vne_dynamics(&states, &gen, &spec, &opts).unwrap();
            println!("fig3 lambda={lambda} kappa={kappa} n_max={n_max}: {:.1}s, slope = {:.3}, S_ss = {:.3}",
                t0.elapsed().as_secs_f64(), series.s_slope, series.s_ss);
        }
    }
}
