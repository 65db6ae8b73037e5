use qchaos::classical::*;
use qchaos::hilbert::HilbertSpec;
use qchaos::lindblad::*;
use qchaos::observables::*;
use std::time::Instant;

fn main() {
    let ens = InitialEnsemble::bloch_uniform(3, 12345);
    // kappa = 0 at smaller dt, t=25 (plateau reached early)
    for lambda in [1.2, 2.0] {
        let t0 = Instant::now();
        let spec = HilbertSpec::new(5.0, 30).unwrap();
        let params = AdmParams::dicke(lambda, 0.0);
        let gen = adm_generator(&params, &spec).unwrap();
        let states = product_ensemble(&spec, ens.bloch_points()).unwrap();
        let mut opts = EvolveOptions::new(2.5e-3, 25.0);
        opts.output_every = 20;
        match vne_dynamics(&states, &gen, &spec, &opts) {
            Ok(s) => println!("k0 lambda={lambda}: {:.0}s slope={:.3} S_ss={:.3} failed={}", t0.elapsed().as_secs_f64(), s.s_slope, s.s_ss, s.failed_members),
            Err(e) => println!("k0 lambda={lambda}: ERROR {e}"),
        }
    }
    // kappa = 1 with longer window to relax to the steady value
    for lambda in [1.2, 2.0] {
        let t0 = Instant::now();
        let spec = HilbertSpec::new(5.0, 20).unwrap();
        let params = AdmParams::dicke(lambda, 1.0);
        let gen = adm_generator(&params, &spec).unwrap();
        let states = product_ensemble(&spec, ens.bloch_points()).unwrap();
        let mut opts = EvolveOptions::new(5e-3, 40.0);
        opts.output_every = 10;
        match vne_dynamics(&states, &gen, &spec, &opts) {
            Ok(s) => println!("k1 lambda={lambda} t40: {:.0}s slope={:.3} S_ss={:.3}", t0.elapsed().as_secs_f64(), s.s_slope, s.s_ss),
            Err(e) => println!("k1 lambda={lambda}: ERROR {e}"),
        }
    }
}
