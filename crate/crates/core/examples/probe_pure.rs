use qchaos::classical::*;
use qchaos::hilbert::HilbertSpec;
use qchaos::lindblad::*;
use qchaos::observables::*;
use std::time::Instant;

fn main() {
    let ens = InitialEnsemble::bloch_uniform(6, 12345);
    for lambda in [1.2f64, 2.0] {
        for n_max in [40usize, 60, 90, 120] {
            let t0 = Instant::now();
            let spec = HilbertSpec::new(5.0, n_max).unwrap();
            let params = AdmParams::dicke(lambda, 0.0);
            let h = build_adm_hamiltonian(&params, &spec).unwrap();
            let psis = product_ensemble_states(&spec, ens.bloch_points()).unwrap();
            let mut opts = EvolveOptions::new(1e-3, 25.0);
            opts.output_every = 50;
            match vne_dynamics_pure(&psis, &h, &spec, &opts) {
                Ok(s) => println!("k0 l={lambda} n_max={n_max}: {:.0}s slope={:.3} S_ss={:.3} failed={}",
                    t0.elapsed().as_secs_f64(), s.s_slope, s.s_ss, s.failed_members),
                Err(e) => println!("k0 l={lambda} n_max={n_max}: ERROR {e}"),
            }
        }
    }
}
