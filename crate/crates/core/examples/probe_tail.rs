use qchaos::classical::*;

fn main() {
    let params = AdmParams::dicke(2.0, 1.0);
    let ensemble = InitialEnsemble::bloch_uniform(20, 12345);
    // ensemble average profile
    let ft = finite_time_lyapunov_ensemble(&params, &ensemble, 1e-3, 100.0, 10, (0.0, 0.5)).unwrap();
    for target in [5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 60.0, 80.0, 100.0] {
        let idx = ft.series.times.iter().position(|t| (*t - target).abs() < 1e-6).unwrap();
        println!("Lambda_t({}) = {:.4}", target, ft.series.lambda_t[idx]);
    }
    // per-member Lambda at t=30 and instantaneous late rate
    println!("per-member Lambda(30) and rate(60->100):");
    for (i, s0) in ensemble.states().iter().enumerate() {
        let series = lyapunov(s0, &params, 1e-3, 100.0, 10).unwrap();
        let at = |target: f64| {
            let idx = series.times.iter().position(|t| (*t - target).abs() < 1e-6).unwrap();
            series.lambda_t[idx]
        };
        let rate_late = (at(100.0) * 100.0 - at(60.0) * 60.0) / 40.0;
        println!("  member {i:2}: L(30)={:+.3} late inst rate={:+.4}", at(30.0), rate_late);
    }
}
