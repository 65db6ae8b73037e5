use qchaos::classical::*;
use qchaos::hilbert::HilbertSpec;
use qchaos::lindblad::*;
use qchaos::observables::*;
use std::time::Instant;

fn main() {
    let ens = InitialEnsemble::bloch_uniform(2, 12345);
    // kappa=0 lambda=2: cutoff scan
    for n_max in [30usize, 40, 50] {
        let t0 = Instant::now();
        let spec = HilbertSpec::new(5.0, n_max).unwrap();
        let params = AdmParams::dicke(2.0, 0.0);
        let gen = adm_generator(&params, &spec).unwrap();
        let states = product_ensemble(&spec, ens.bloch_points()).unwrap();
        let (a, adag) = qchaos::hilbert::boson_operators(n_max).unwrap();
        let n_op = spec.lift_photon(&adag.dot(&a));
        let dt = 2e-3;
        let mut opts = EvolveOptions::new(dt, 20.0);
        opts.output_every = 50;
        let mut smax = 0.0f64;
        let mut tail_occ: f64 = 0.0;
        let mut nbar_max = 0.0f64;
        let mut s_tail = Vec::new();
        for rho0 in &states {
            let res = propagate_with(rho0, &gen, &opts, |t, rho| {
                let dm = DensityMatrix::new_unchecked(rho.clone());
                let s_spin = von_neumann_entropy(&partial_trace(&dm, &spec, Subsystem::Spin)?)?;
                let s_ph = von_neumann_entropy(&partial_trace(&dm, &spec, Subsystem::Photon)?)?;
                let red_ph = partial_trace(&dm, &spec, Subsystem::Photon)?;
                let occ_top: f64 = (0..spec.d_photon()).rev().take(3).map(|n| red_ph[[n, n]].re).sum();
                let nbar = qchaos::linalg::trace(&n_op.dot(rho)).re;
                tail_occ = tail_occ.max(occ_top);
                nbar_max = nbar_max.max(nbar);
                smax = smax.max(s_spin + s_ph);
                if t > 15.0 { s_tail.push(s_spin + s_ph); }
                Ok(())
            });
            if let Err(e) = res { println!("  n_max={n_max}: member failed: {e}"); }
        }
        let s_ss = s_tail.iter().sum::<f64>() / s_tail.len().max(1) as f64;
        println!("k0 l=2 n_max={n_max}: {:.0}s S_ss={s_ss:.3} smax={smax:.3} top3_occ={tail_occ:.2e} nbar_max={nbar_max:.2}", t0.elapsed().as_secs_f64());
    }
    // kappa=1 lambda=2: long relaxation
    let spec = HilbertSpec::new(5.0, 20).unwrap();
    let params = AdmParams::dicke(2.0, 1.0);
    let gen = adm_generator(&params, &spec).unwrap();
    let states = product_ensemble(&spec, ens.bloch_points()).unwrap();
    let mut opts = EvolveOptions::new(5e-3, 80.0);
    opts.output_every = 100;
    let mut profile = Vec::new();
    let _ = propagate_with(&states[0], &gen, &opts, |t, rho| {
        let dm = DensityMatrix::new_unchecked(rho.clone());
        let s_spin = von_neumann_entropy(&partial_trace(&dm, &spec, Subsystem::Spin)?)?;
        let s_ph = von_neumann_entropy(&partial_trace(&dm, &spec, Subsystem::Photon)?)?;
        profile.push((t, s_spin + s_ph));
        Ok(())
    }).unwrap();
    for (t, s) in profile.iter().filter(|(t, _)| (t / 10.0).fract().abs() < 1e-9) {
        println!("k1 l=2 member0: S({t}) = {s:.3}");
    }
}
