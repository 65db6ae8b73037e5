use qchaos::lindblad::*;
use qchaos::observables::{reduce_bipartite, von_neumann_entropy, Keep};
use qchaos::rmt::*;

fn main() {
    let base = ToyModelConfig { n_total: 49, mu: 1.0, chi: 0.0, gamma: 1.0, seed: 2024, ensemble_size: 6 };
    // time profiles
    for chi in [0.0, 0.5, 1.0] {
        let cfg = ToyModelConfig { chi, ..base };
        let opts = ToyDynamicsOptions { dt: 0.02, t_final: 40.0, output_every: 25, slope_window: (0.0, 0.5) };
        let series = toy_vne_dynamics(&cfg, &opts).unwrap();
        let total = series.s_total();
        let at = |target: f64| {
            let idx = series.times.iter().position(|t| (*t - target).abs() < 1e-9).unwrap();
            total[idx]
        };
        println!("chi={chi}: S(2)={:.3} S(5)={:.3} S(10)={:.3} S(20)={:.3} S(30)={:.3} S(40)={:.3} slope={:.3}",
            at(2.0), at(5.0), at(10.0), at(20.0), at(30.0), at(40.0), series.s_slope);
    }
    // true steady-state subsystem entropy per seed
    for chi in [0.0, 1.0] {
        let mut vals = Vec::new();
        for idx in 0..6u64 {
            let real = sample_realization(&base, idx).unwrap();
            let steady = if chi > 0.0 { Some(regular_steady_state(&real, 1.0).unwrap()) } else { None };
            let h = build_hamiltonian(&real, 1.0, chi, steady.as_ref()).unwrap();
            let m = build_liouvillian(&h, &real.jump, 1.0).unwrap();
            let ss = steady_state_with(&m, false).unwrap();
            let red = reduce_bipartite(ss.data(), 7, 7, Keep::A).unwrap();
            vals.push(von_neumann_entropy(&red).unwrap());
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        println!("chi={chi}: steady-state S_A per seed {:?} mean {:.3}", vals.iter().map(|v| (v*100.0).round()/100.0).collect::<Vec<_>>(), mean);
    }
}
