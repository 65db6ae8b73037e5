//! Experiment execution: compute, CSV emission, metadata sidecars, plot
//! scripts, and FAILED markers on partial results.

use crate::config::{ExperimentConfig, ExperimentKind};
use anyhow::{anyhow, Context, Result};
use qchaos::classical::{
    self, AdmParams, InitialEnsemble, ScanConfig,
};
use qchaos::hilbert::{self, HilbertSpec};
use qchaos::lindblad::{adm_generator, product_ensemble, EvolveOptions};
use qchaos::observables::{self, FotocPath};
use qchaos::rmt::{
    build_hamiltonian, liouvillian_spectrum, regular_steady_state, sample_realization,
    toy_vne_chi_sweep, ToyDynamicsOptions, ToyModelConfig,
};
use qchaos::spectra::{
    classify, ginibre_reference, poisson2d_pdf, pooled_nn_spacings, ComplexSpectrum, Unfolding,
};
use qchaos::CMat;
use std::fs;
use std::path::Path;

pub fn run(cfg: &ExperimentConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out)
        .with_context(|| format!("creating output directory {}", cfg.out.display()))?;
    write_metadata(cfg)?;
    let result = match cfg.kind {
        ExperimentKind::ClassicalScan => run_classical_scan(cfg),
        ExperimentKind::QuantumScan => run_quantum_scan(cfg),
        ExperimentKind::DickeDynamics => run_dicke_dynamics(cfg),
        ExperimentKind::Fotoc => run_fotoc(cfg),
        ExperimentKind::ToySpectrum => run_toy_spectrum(cfg),
        ExperimentKind::ToyDynamics => run_toy_dynamics(cfg),
    };
    if let Err(e) = &result {
        // Partial results stay on disk; the marker names the failure.
        let _ = fs::write(cfg.out.join("FAILED"), format!("{e:#}\n"));
    }
    result
}

fn write_metadata(cfg: &ExperimentConfig) -> Result<()> {
    let text = format!(
        "# qchaos {} experiment metadata\n# rerun with: qchaos run --config <this file>\n{}",
        env!("CARGO_PKG_VERSION"),
        cfg.echo()
    );
    fs::write(cfg.out.join("metadata.txt"), text).context("writing metadata sidecar")?;
    Ok(())
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    qchaos::io::write_csv(path, header, rows).map_err(|e| anyhow!("{e}"))
}

fn adm_from(cfg: &ExperimentConfig, lm: f64, lp: f64, kappa: f64) -> Result<AdmParams> {
    AdmParams::new(
        cfg.f64_or("omega", 1.0)?,
        cfg.f64_or("omega0", 1.0)?,
        lm,
        lp,
        kappa,
    )
    .map_err(|e| anyhow!("{e}"))
}

fn run_classical_scan(cfg: &ExperimentConfig) -> Result<()> {
    let lm = cfg.f64_list_or("lambda_minus", &[0.0])?;
    let lp = cfg.f64_list_or("lambda_plus", &[0.0])?;
    let base = adm_from(cfg, 0.0, 0.0, cfg.f64_or("kappa", 1.0)?)?;
    let scan_cfg = ScanConfig {
        dt: cfg.f64_or("dt", 1e-3)?,
        t_final: cfg.f64_or("t_final", classical::DEFAULT_T_FINAL)?,
        renorm_every: cfg.usize_or("renorm_every", classical::DEFAULT_RENORM_EVERY)?,
        ensemble_size: cfg.usize_or("ensemble", classical::DEFAULT_ENSEMBLE)?,
        seed: cfg.seed,
    };
    let scan = classical::phase_scan(&lm, &lp, &base, &scan_cfg)?;
    let mut rows = Vec::new();
    for (i, lam_m) in scan.lambda_minus.iter().enumerate() {
        for (j, lam_p) in scan.lambda_plus.iter().enumerate() {
            rows.push(vec![
                *lam_m,
                *lam_p,
                scan.lambda_ss[i * scan.lambda_plus.len() + j],
                scan.ensemble_size as f64,
            ]);
        }
    }
    write_csv(
        &cfg.out.join("lambda_ss.csv"),
        &["lambda_minus", "lambda_plus", "lambda_ss", "n_ensemble"],
        &rows,
    )?;
    if !scan.failures.is_empty() {
        let mut text = String::new();
        for (i, j, msg) in &scan.failures {
            text.push_str(&format!("cell ({i},{j}): {msg}\n"));
        }
        fs::write(cfg.out.join("cell_failures.txt"), text)?;
    }
    fs::write(
        cfg.out.join("plot_lambda_ss.gp"),
        heatmap_script("lambda_ss.csv", "lambda_ss_map", "{/Symbol L}_{ss}"),
    )?;
    Ok(())
}

/// Quantum scan: ensemble-averaged steady-state entropy per grid point, with
/// optional steady-state spin/photon fluctuations.
fn run_quantum_scan(cfg: &ExperimentConfig) -> Result<()> {
    let lm = cfg.f64_list_or("lambda_minus", &[2.0])?;
    let lp = cfg.f64_list_or("lambda_plus", &[1.0])?;
    let kappa = cfg.f64_or("kappa", 1.0)?;
    let spec = HilbertSpec::new(cfg.f64_or("spin", 5.0)?, cfg.usize_or("photon_cutoff", 20)?)?;
    let dt = cfg.f64_or("dt", 5e-3)?;
    let t_final = cfg.f64_or("t_final", 50.0)?;
    let ensemble_size = cfg.usize_or("ensemble", 4)?;
    let fluctuations = cfg.bool_or("fluctuations", false)?;
    let ensemble = InitialEnsemble::bloch_uniform(ensemble_size, cfg.seed);
    let states = product_ensemble(&spec, ensemble.bloch_points())?;

    let (sz_full, n_full) = lifted_observables(&spec)?;
    let header: Vec<&str> = if fluctuations {
        vec!["lambda_minus", "lambda_plus", "s_ss", "dsz_ss", "dn_ss"]
    } else {
        vec!["lambda_minus", "lambda_plus", "s_ss"]
    };
    let mut rows = Vec::new();
    let mut failures = String::new();
    for lam_m in &lm {
        for lam_p in &lp {
            let cell = (|| -> Result<Vec<f64>> {
                let params = adm_from(cfg, *lam_m, *lam_p, kappa)?;
                let gen = adm_generator(&params, &spec)?;
                let mut opts = EvolveOptions::new(dt, t_final);
                opts.output_every = ((0.1 / dt).round() as usize).max(1);
                let series = observables::vne_dynamics(&states, &gen, &spec, &opts)?;
                let mut row = vec![*lam_m, *lam_p, series.s_ss];
                if fluctuations {
                    let sz2 = sz_full.dot(&sz_full);
                    let n2 = n_full.dot(&n_full);
                    let obs =
                        qchaos::lindblad::evolve(&states[0], &gen, &opts, &[sz_full.clone(), sz2, n_full.clone(), n2])?;
                    let tail = |k: usize, k2: usize| {
                        let sigmas: Vec<f64> = obs.expectations[k]
                            .iter()
                            .zip(obs.expectations[k2].iter())
                            .map(|(m1, m2)| (m2.re - m1.re * m1.re).max(0.0).sqrt())
                            .collect();
                        qchaos::linalg::tail_average(&sigmas, 0.2)
                    };
                    row.push(tail(0, 1));
                    row.push(tail(2, 3));
                }
                Ok(row)
            })();
            match cell {
                Ok(row) => rows.push(row),
                Err(e) => failures.push_str(&format!("({lam_m}, {lam_p}): {e:#}\n")),
            }
        }
    }
    write_csv(&cfg.out.join("s_ss.csv"), &header, &rows)?;
    if !failures.is_empty() {
        fs::write(cfg.out.join("cell_failures.txt"), failures)?;
    }
    fs::write(
        cfg.out.join("plot_s_ss.gp"),
        heatmap_script("s_ss.csv", "s_ss_map", "S_{ss}^{VN}"),
    )?;
    Ok(())
}

fn lifted_observables(spec: &HilbertSpec) -> Result<(CMat, CMat)> {
    let (sz, _, _) = hilbert::spin_operators(spec.spin_s())?;
    let (a, adag) = hilbert::boson_operators(spec.photon_cutoff())?;
    Ok((spec.lift_spin(&sz), spec.lift_photon(&adag.dot(&a))))
}

/// (λ₋, λ₊, κ) combinations from either `lambda` (Dicke limit) or explicit
/// `lambda_minus`/`lambda_plus` lists crossed with the `kappa` list.
fn coupling_combos(cfg: &ExperimentConfig) -> Result<Vec<(f64, f64, f64)>> {
    let kappas = cfg.f64_list_or("kappa", &[1.0])?;
    let pairs: Vec<(f64, f64)> = if cfg.params.contains_key("lambda") {
        cfg.f64_list_or("lambda", &[2.0])?
            .into_iter()
            .map(|l| (l, l))
            .collect()
    } else {
        let lm = cfg.f64_list_or("lambda_minus", &[2.0])?;
        let lp = cfg.f64_list_or("lambda_plus", &[2.0])?;
        lm.iter()
            .flat_map(|a| lp.iter().map(move |b| (*a, *b)))
            .collect()
    };
    Ok(pairs
        .into_iter()
        .flat_map(|(a, b)| kappas.iter().map(move |k| (a, b, *k)))
        .collect())
}

fn combo_tag(lm: f64, lp: f64, kappa: f64) -> String {
    format!("lm{lm}_lp{lp}_k{kappa}")
}

fn run_dicke_dynamics(cfg: &ExperimentConfig) -> Result<()> {
    let combos = coupling_combos(cfg)?;
    let classical_only = cfg.bool_or("classical_only", false)?;
    let trajectories = cfg.bool_or("trajectories", false)?;
    let classical_ensemble =
        InitialEnsemble::bloch_uniform(cfg.usize_or("classical_ensemble", 20)?, cfg.seed);
    let quantum_ensemble_size = cfg.usize_or("ensemble", 6)?;
    let dt_classical = cfg.f64_or("classical_dt", 1e-3)?;
    let t_classical = cfg.f64_or("classical_t_final", 30.0)?;
    let dt = cfg.f64_or("dt", 5e-3)?;
    let t_final = cfg.f64_or("t_final", 25.0)?;

    let mut summary_rows = Vec::new();
    for (lm, lp, kappa) in combos {
        let params = adm_from(cfg, lm, lp, kappa)?;
        let tag = combo_tag(lm, lp, kappa);

        // Classical finite-time exponents.
        let ft = classical::finite_time_lyapunov_ensemble(
            &params,
            &classical_ensemble,
            dt_classical,
            t_classical,
            classical::DEFAULT_RENORM_EVERY,
            (0.0, 0.5),
        )?;
        let rows: Vec<Vec<f64>> = ft
            .series
            .times
            .iter()
            .zip(ft.series.lambda_t.iter())
            .map(|(t, l)| vec![*t, *l])
            .collect();
        write_csv(&cfg.out.join(format!("lambda_t_{tag}.csv")), &["t", "lambda_t"], &rows)?;

        if trajectories {
            let s0 = classical_ensemble.states()[0];
            let traj = classical::integrate(&s0, &params, dt_classical, t_classical)?;
            let rows: Vec<Vec<f64>> = traj
                .times
                .iter()
                .zip(traj.states.iter())
                .map(|(t, s)| vec![*t, s.x, s.p, s.sx, s.sy, s.sz])
                .collect();
            write_csv(
                &cfg.out.join(format!("trajectory_{tag}.csv")),
                &["t", "x", "p", "sx", "sy", "sz"],
                &rows,
            )?;
        }

        let mut s_slope = f64::NAN;
        let mut s_ss = f64::NAN;
        if !classical_only {
            // Larger photon cutoff for closed-system runs.
            let n_max = if kappa == 0.0 {
                cfg.usize_or("photon_cutoff_closed", cfg.usize_or("photon_cutoff", 20)? + 10)?
            } else {
                cfg.usize_or("photon_cutoff", 20)?
            };
            let spec = HilbertSpec::new(cfg.f64_or("spin", 5.0)?, n_max)?;
            let quantum_points =
                InitialEnsemble::bloch_uniform(quantum_ensemble_size, cfg.seed);
            let states = product_ensemble(&spec, quantum_points.bloch_points())?;
            let mut opts = EvolveOptions::new(dt, t_final);
            opts.output_every = ((0.05 / dt).round() as usize).max(1);
            let series = observables::vne_dynamics(&states, &gen_for(&params, &spec)?, &spec, &opts)?;
            let rows: Vec<Vec<f64>> = series
                .times
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    vec![
                        *t,
                        series.s_spin[k],
                        series.s_photon[k],
                        series.s_spin[k] + series.s_photon[k],
                    ]
                })
                .collect();
            write_csv(
                &cfg.out.join(format!("vne_{tag}.csv")),
                &["t", "s_spin", "s_photon", "s_total"],
                &rows,
            )?;
            s_slope = series.s_slope;
            s_ss = series.s_ss;
        }
        summary_rows.push(vec![lm, lp, kappa, ft.window_average, ft.series.lambda_ss, s_slope, s_ss]);
    }
    write_csv(
        &cfg.out.join("summary.csv"),
        &["lambda_minus", "lambda_plus", "kappa", "lambda_bar_early", "lambda_ss", "s_slope", "s_ss"],
        &summary_rows,
    )?;
    fs::write(cfg.out.join("plot_series.gp"), series_script("vne", "S^{VN}(t)"))?;
    Ok(())
}

fn gen_for(params: &AdmParams, spec: &HilbertSpec) -> Result<qchaos::lindblad::LindbladGenerator> {
    adm_generator(params, spec).map_err(|e| anyhow!("{e}"))
}

fn run_fotoc(cfg: &ExperimentConfig) -> Result<()> {
    let combos = coupling_combos(cfg)?;
    let delta_phi = cfg.f64_or("delta_phi", 1e-4)?;
    let both_paths = cfg.bool_or("adjoint", false)?;
    let ensemble_size = cfg.usize_or("ensemble", 6)?;
    let dt = cfg.f64_or("dt", 5e-3)?;
    let t_final = cfg.f64_or("t_final", 25.0)?;
    let generator_name = cfg.str_or("generator", "sz");

    let mut summary_rows = Vec::new();
    for (lm, lp, kappa) in combos {
        let n_max = if kappa == 0.0 {
            cfg.usize_or("photon_cutoff_closed", cfg.usize_or("photon_cutoff", 20)? + 10)?
        } else {
            cfg.usize_or("photon_cutoff", 20)?
        };
        let spec = HilbertSpec::new(cfg.f64_or("spin", 5.0)?, n_max)?;
        let params = adm_from(cfg, lm, lp, kappa)?;
        let gen = gen_for(&params, &spec)?;
        let (sz_full, n_full) = lifted_observables(&spec)?;
        let g = match generator_name.as_str() {
            "sz" => sz_full,
            "n" => n_full,
            other => return Err(anyhow!("unknown FOTOC generator '{other}'")),
        };
        let points = InitialEnsemble::bloch_uniform(ensemble_size, cfg.seed);
        let states = product_ensemble(&spec, points.bloch_points())?;
        let mut opts = EvolveOptions::new(dt, t_final);
        opts.output_every = ((0.05 / dt).round() as usize).max(1);
        let path = if both_paths { FotocPath::Both } else { FotocPath::VarianceOnly };

        let mut times: Option<Vec<f64>> = None;
        let mut sigma_mean: Vec<f64> = Vec::new();
        let mut f_mean: Vec<f64> = Vec::new();
        let mut n_ok = 0usize;
        for rho0 in &states {
            let res = observables::fotoc(rho0, &gen, &g, delta_phi, &opts, path, &generator_name)?;
            if times.is_none() {
                times = Some(res.times.clone());
                sigma_mean = vec![0.0; res.sigma_series.len()];
                f_mean = vec![0.0; res.sigma_series.len()];
            }
            for (acc, v) in sigma_mean.iter_mut().zip(res.sigma_series.iter()) {
                *acc += v;
            }
            if let Some(f) = &res.f_values {
                for (acc, v) in f_mean.iter_mut().zip(f.iter()) {
                    *acc += v;
                }
            }
            n_ok += 1;
        }
        let times = times.ok_or_else(|| anyhow!("no FOTOC members succeeded"))?;
        for v in sigma_mean.iter_mut() {
            *v /= n_ok as f64;
        }
        let sigma_ss = qchaos::linalg::tail_average(&sigma_mean, 0.2);
        let tag = combo_tag(lm, lp, kappa);
        let rows: Vec<Vec<f64>> = times
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let f = if both_paths { f_mean[k] / n_ok as f64 } else { f64::NAN };
                vec![*t, f, sigma_mean[k]]
            })
            .collect();
        write_csv(&cfg.out.join(format!("fotoc_{tag}.csv")), &["t", "f", "delta_g"], &rows)?;
        summary_rows.push(vec![lm, lp, kappa, delta_phi, sigma_ss]);
    }
    write_csv(
        &cfg.out.join("summary.csv"),
        &["lambda_minus", "lambda_plus", "kappa", "delta_phi", "sigma_ss"],
        &summary_rows,
    )?;
    fs::write(cfg.out.join("plot_series.gp"), series_script("fotoc", "{/Symbol D}G(t)"))?;
    Ok(())
}

fn run_toy_spectrum(cfg: &ExperimentConfig) -> Result<()> {
    let n_total = cfg.usize_or("n_total", 49)?;
    let gamma = cfg.f64_or("gamma", 1.0)?;
    let mu = cfg.f64_or("mu", 0.0)?;
    let chi = cfg.f64_or("chi", 0.0)?;
    let seeds = cfg.usize_or("seeds", 100)?;
    let toy = ToyModelConfig {
        n_total,
        mu,
        chi,
        gamma,
        seed: cfg.seed,
        ensemble_size: seeds,
    };
    toy.validate()?;

    let mut eig_rows = Vec::new();
    let mut spectra = Vec::with_capacity(seeds);
    for idx in 0..seeds as u64 {
        let real = sample_realization(&toy, idx)?;
        let steady = if mu > 0.0 && chi > 0.0 {
            Some(regular_steady_state(&real, gamma)?)
        } else {
            None
        };
        let h = build_hamiltonian(&real, mu, chi, steady.as_ref())?;
        let eigs = liouvillian_spectrum(&h, &real.jump, gamma)?;
        for z in &eigs {
            eig_rows.push(vec![z.re, z.im, idx as f64]);
        }
        let spectrum = ComplexSpectrum::new(eigs, format!("toy seed stream {idx}"))?
            .filter_conjugate_symmetry();
        spectra.push(spectrum);
    }
    write_csv(&cfg.out.join("eigenvalues.csv"), &["re", "im", "seed"], &eig_rows)?;

    let reference = ginibre_reference(
        cfg.usize_or("reference_samples", 60)?,
        cfg.usize_or("reference_dim", 200)?,
        cfg.seed ^ 0x517e_c0de,
    )?;
    let dist = pooled_nn_spacings(&spectra, Unfolding::default(), &reference)?;
    let verdict = classify(&dist);

    // Histogram with both reference densities at bin centers.
    let (ref_edges, ref_density) = qchaos::spectra::histogram(&reference.sorted_spacings, 40);
    let mut hist_rows = Vec::new();
    for k in 0..dist.densities.len() {
        let center = 0.5 * (dist.bin_edges[k] + dist.bin_edges[k + 1]);
        let gin = interp_density(&ref_edges, &ref_density, center);
        hist_rows.push(vec![center, dist.densities[k], poisson2d_pdf(center), gin]);
    }
    write_csv(
        &cfg.out.join("spacing_histogram.csv"),
        &["s", "density", "poisson2d", "ginibre"],
        &hist_rows,
    )?;
    fs::write(
        cfg.out.join("classification.txt"),
        format!(
            "label = {}\nks_vs_poisson2d = {:.4}\nks_vs_ginibre = {:.4}\nspacings = {}\ndegenerate = {}\n",
            verdict.label,
            verdict.ks_poisson2d,
            verdict.ks_ginibre,
            dist.spacings.len(),
            dist.degenerate_count,
        ),
    )?;
    fs::write(cfg.out.join("plot_histogram.gp"), histogram_script())?;
    Ok(())
}

fn interp_density(edges: &[f64], density: &[f64], x: f64) -> f64 {
    for k in 0..density.len() {
        if x >= edges[k] && x < edges[k + 1] {
            return density[k];
        }
    }
    0.0
}

fn run_toy_dynamics(cfg: &ExperimentConfig) -> Result<()> {
    let chis = cfg.f64_list_or("chi", &[0.0])?;
    let toy = ToyModelConfig {
        n_total: cfg.usize_or("n_total", 49)?,
        mu: cfg.f64_or("mu", 1.0)?,
        chi: chis[0],
        gamma: cfg.f64_or("gamma", 1.0)?,
        seed: cfg.seed,
        ensemble_size: cfg.usize_or("seeds", 50)?,
    };
    let opts = ToyDynamicsOptions {
        dt: cfg.f64_or("dt", 0.02)?,
        t_final: cfg.f64_or("t_final", 40.0)?,
        output_every: cfg.usize_or("output_every", 10)?,
        slope_window: (0.0, cfg.f64_or("slope_window", 0.5)?),
    };
    let sweep = toy_vne_chi_sweep(&toy, &chis, &opts)?;
    let mut summary_rows = Vec::new();
    for (chi, series) in &sweep {
        let total = series.s_total();
        let rows: Vec<Vec<f64>> = series
            .times
            .iter()
            .zip(total.iter())
            .map(|(t, s)| vec![*t, *s, toy.mu, *chi])
            .collect();
        write_csv(
            &cfg.out.join(format!("entropy_chi{chi}.csv")),
            &["t", "s_vn", "mu", "chi"],
            &rows,
        )?;
        summary_rows.push(vec![
            toy.mu,
            *chi,
            series.s_slope,
            series.s_ss,
            series.ensemble_size as f64,
            series.failed_members as f64,
        ]);
    }
    write_csv(
        &cfg.out.join("summary.csv"),
        &["mu", "chi", "s_slope", "s_ss", "n_ensemble", "failed"],
        &summary_rows,
    )?;
    fs::write(cfg.out.join("plot_series.gp"), series_script("entropy", "S_{VN}(t)"))?;
    Ok(())
}

fn heatmap_script(csv: &str, out: &str, label: &str) -> String {
    format!(
        "# gnuplot script; run from the output directory\n\
         set terminal pngcairo size 900,780\n\
         set output '{out}.png'\n\
         set datafile separator ','\n\
         set xlabel 'lambda_-'\n\
         set ylabel 'lambda_+'\n\
         set cblabel '{label}'\n\
         set view map\n\
         # negative values preserved in the CSV; display clamps at zero\n\
         set cbrange [0:*]\n\
         splot '{csv}' skip 1 using 1:2:3 with points pt 5 ps 2 palette notitle\n"
    )
}

fn series_script(prefix: &str, ylabel: &str) -> String {
    format!(
        "# gnuplot script; run from the output directory\n\
         set terminal pngcairo size 900,600\n\
         set output '{prefix}_series.png'\n\
         set datafile separator ','\n\
         set xlabel 't'\n\
         set ylabel '{ylabel}'\n\
         plot for [f in system('ls {prefix}_*.csv')] f skip 1 using 1:2 with lines title f\n"
    )
}

fn histogram_script() -> String {
    "# gnuplot script; run from the output directory\n\
     set terminal pngcairo size 900,600\n\
     set output 'spacing_histogram.png'\n\
     set datafile separator ','\n\
     set xlabel 's'\n\
     set ylabel 'p(s)'\n\
     plot 'spacing_histogram.csv' skip 1 using 1:2 with boxes title 'data', \\\n\
     \x20    '' skip 1 using 1:3 with lines lw 2 title '2d Poisson', \\\n\
     \x20    '' skip 1 using 1:4 with lines lw 2 title 'Ginibre'\n"
        .to_string()
}
