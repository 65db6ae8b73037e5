use qchaos::classical::*;
use qchaos::hilbert::HilbertSpec;
use qchaos::lindblad::*;
use qchaos::observables::*;

fn main() {
    let spec = HilbertSpec::new(5.0, 30).unwrap();
    let params = AdmParams::dicke(1.2, 0.0);
    let gen = adm_generator(&params, &spec).unwrap();
    let ens = InitialEnsemble::bloch_uniform(2, 12345);
    let states = product_ensemble(&spec, ens.bloch_points()).unwrap();
    let mut opts = EvolveOptions::new(5e-3, 25.0);
    opts.output_every = 10;
    for (i, rho0) in states.iter().enumerate() {
        let res = propagate_with(rho0, &gen, &opts, |_, _| Ok(()));
        match res {
            Ok((_, mon)) => println!("member {i}: ok, max trace dev {:.2e}, herm {:.2e}", mon.max_trace_dev, mon.max_herm_defect),
            Err(e) => println!("member {i}: ERROR {e}"),
        }
    }
}
