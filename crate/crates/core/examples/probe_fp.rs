use ndarray_linalg::EigVals;
use qchaos::classical::*;
use qchaos::C64;

fn main() {
    // Superradiant fixed point of the Dicke-limit equations at lambda, kappa.
    for (lambda, kappa) in [(2.0f64, 1.0f64), (1.2, 1.0), (1.0, 1.0), (2.0, 0.5)] {
        let (w, w0) = (1.0f64, 1.0f64);
        let sz = -w0 * (kappa * kappa + w * w) / (4.0 * lambda * lambda * w);
        if sz.abs() > 1.0 { println!("lambda={lambda}: no SR fixed point (|sz|>1)"); continue; }
        let sx = -(1.0 - sz * sz).sqrt();
        let x = -2.0 * 2.0f64.sqrt() * lambda * w * sx / (kappa * kappa + w * w);
        let p = kappa / w * x;
        let fp = ClassicalState { x, p, sx, sy: 0.0, sz };
        let params = AdmParams::dicke(lambda, kappa);
        let d = eom_rhs(&fp, &params).unwrap();
        let resid = [d.x, d.p, d.sx, d.sy, d.sz].iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        let jac = jacobian(&fp, &params);
        let eigs = jac.eigvals().unwrap();
        let mut re: Vec<f64> = eigs.iter().map(|z: &C64| z.re).collect();
        re.sort_by(|a, b| b.partial_cmp(a).unwrap());
        println!("lambda={lambda} kappa={kappa}: sz*={sz:.3} n*={:.3} resid={resid:.1e} max Re eig = {:.4} {:.4}", fp.photon_number(), re[0], re[1]);
    }
    // Where does a trajectory end up at (2,2,kappa=1)?
    let params = AdmParams::dicke(2.0, 1.0);
    let s0 = ClassicalState::from_bloch(1.1, 2.2);
    let traj = integrate(&s0, &params, 1e-3, 300.0).unwrap();
    let last = traj.states.last().unwrap();
    println!("final state: x={:.3} p={:.3} sx={:.3} sy={:.3} sz={:.3} n={:.3}", last.x, last.p, last.sx, last.sy, last.sz, last.photon_number());
    // oscillation amplitude of n over the last 50 time units:
    let tail: Vec<f64> = traj.states.iter().rev().take(50_000).map(|s| s.photon_number()).collect();
    let (nmin, nmax) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    println!("late n range: [{nmin:.3}, {nmax:.3}]");
}
