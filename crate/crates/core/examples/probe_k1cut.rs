use qchaos::classical::*;
use qchaos::hilbert::HilbertSpec;
use qchaos::lindblad::*;
use qchaos::observables::*;
use std::time::Instant;

fn main() {
    let ens = InitialEnsemble::bloch_uniform(1, 12345);
    for n_max in [20usize, 30, 40] {
        let t0 = Instant::now();
        let spec = HilbertSpec::new(5.0, n_max).unwrap();
        let params = AdmParams::dicke(2.0, 1.0);
        let gen = adm_generator(&params, &spec).unwrap();
        let states = product_ensemble(&spec, ens.bloch_points()).unwrap();
        let (a, adag) = qchaos::hilbert::boson_operators(n_max).unwrap();
        let n_op = spec.lift_photon(&adag.dot(&a));
        let mut opts = EvolveOptions::new(4e-3, 100.0);
        opts.output_every = 250;
        let mut s_tail = Vec::new();
        let mut n_tail = Vec::new();
        let mut top_occ = 0.0f64;
        let res = propagate_with(&states[0], &gen, &opts, |t, rho| {
            if t >= 70.0 {
                let dm = DensityMatrix::new_unchecked(rho.clone());
                let s_spin = von_neumann_entropy(&partial_trace(&dm, &spec, Subsystem::Spin)?)?;
                let s_ph_red = partial_trace(&dm, &spec, Subsystem::Photon)?;
                let s_ph = von_neumann_entropy(&s_ph_red)?;
                s_tail.push(s_spin + s_ph);
                n_tail.push(qchaos::linalg::trace(&n_op.dot(rho)).re);
                let top: f64 = (0..spec.d_photon()).rev().take(2).map(|n| s_ph_red[[n, n]].re).sum();
                top_occ = top_occ.max(top);
            }
            Ok(())
        });
        match res {
            Ok(_) => {
                let s_ss = s_tail.iter().sum::<f64>() / s_tail.len() as f64;
                let n_ss = n_tail.iter().sum::<f64>() / n_tail.len() as f64;
                println!("k1 l=2 n_max={n_max}: {:.0}s S_ss[70,100]={s_ss:.3} <n>={n_ss:.2} top2_occ={top_occ:.2e}", t0.elapsed().as_secs_f64());
            }
            Err(e) => println!("k1 l=2 n_max={n_max}: ERROR {e}"),
        }
    }
}
