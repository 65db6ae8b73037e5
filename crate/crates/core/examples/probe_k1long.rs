use qchaos::classical::*;
use qchaos::hilbert::HilbertSpec;
use qchaos::lindblad::*;
use qchaos::observables::*;

fn main() {
    let spec = HilbertSpec::new(5.0, 20).unwrap();
    let ens = InitialEnsemble::bloch_uniform(2, 12345);
    for lambda in [2.0f64, 1.2] {
        let params = AdmParams::dicke(lambda, 1.0);
        let gen = adm_generator(&params, &spec).unwrap();
        let states = product_ensemble(&spec, ens.bloch_points()).unwrap();
        let mut opts = EvolveOptions::new(5e-3, 150.0);
        opts.output_every = 400;
        let mut profile: Vec<(f64, f64)> = Vec::new();
        let _ = propagate_with(&states[0], &gen, &opts, |t, rho| {
            let dm = DensityMatrix::new_unchecked(rho.clone());
            let s_spin = von_neumann_entropy(&partial_trace(&dm, &spec, Subsystem::Spin)?)?;
            let s_ph = von_neumann_entropy(&partial_trace(&dm, &spec, Subsystem::Photon)?)?;
            profile.push((t, s_spin + s_ph));
            Ok(())
        }).unwrap();
        for (t, s) in profile.iter().filter(|(t, _)| *t > 0.0 && (*t % 20.0).abs() < 1e-9) {
            println!("k1 l={lambda}: S({t:.0}) = {s:.3}");
        }
    }
}
