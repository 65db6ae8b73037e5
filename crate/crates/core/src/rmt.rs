//! Random-matrix Liouvillian with tunable regular-to-chaotic interpolation.
//!
//! The Hamiltonian is H = H_TD + (μ/√N) P(χ) H_GOE P(χ) with H_TD a real
//! symmetric tridiagonal random matrix, H_GOE a full real symmetric random
//! matrix, and P(χ) = I - χ(u₁u₁ᵀ + u₂u₂ᵀ) built from the two dominant
//! eigenvectors of the μ = 0 steady state. Dissipation enters through a
//! real random jump operator with nonzero entries only on the first
//! subdiagonal, at strength γ. All random entries are i.i.d. standard
//! normal, drawn in a fixed documented order per seed stream.
//!
//! The total dimension is N = M² and the basis index factorizes as
//! k = i·M + j over two M-dimensional subsystems (i major).

use crate::error::{QchaosError, Result};
use crate::lindblad::{
    steady_state_with, vectorize_generator, DensityMatrix, EvolveOptions, LindbladGenerator,
    VECTORIZE_GUARD,
};
use crate::linalg;
use crate::observables::{reduce_bipartite, von_neumann_entropy, EntropySeries, Keep};
use crate::{C64, CMat, CVec};
use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// One point in toy-model parameter space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyModelConfig {
    /// Total dimension N; must be a perfect square M².
    pub n_total: usize,
    /// Strength of the GOE perturbation, in [0, 1].
    pub mu: f64,
    /// Projector deformation strength, in [0, 1].
    pub chi: f64,
    /// Dissipation strength, ≥ 0.
    pub gamma: f64,
    /// Root seed; realizations use per-index RNG streams.
    pub seed: u64,
    pub ensemble_size: usize,
}

impl ToyModelConfig {
    pub fn validate(&self) -> Result<()> {
        let m = self.subsystem_dim();
        if m < 2 || m * m != self.n_total {
            return Err(QchaosError::domain(format!(
                "n_total = {} must be a perfect square M² with M ≥ 2",
                self.n_total
            )));
        }
        if !(0.0..=1.0).contains(&self.mu) || !(0.0..=1.0).contains(&self.chi) {
            return Err(QchaosError::domain("mu and chi must lie in [0, 1]"));
        }
        if self.gamma < 0.0 || !self.gamma.is_finite() {
            return Err(QchaosError::domain("gamma must be finite and ≥ 0"));
        }
        if self.ensemble_size == 0 {
            return Err(QchaosError::domain("ensemble_size must be ≥ 1"));
        }
        Ok(())
    }

    pub fn subsystem_dim(&self) -> usize {
        (self.n_total as f64).sqrt().round() as usize
    }
}

/// Matrices of one disorder realization.
#[derive(Debug, Clone)]
pub struct ToyRealization {
    /// Real symmetric tridiagonal, N(0,1) diagonal and off-diagonal.
    pub h_td: Array2<f64>,
    /// Real symmetric, N(0,1) entries for i ≤ j mirrored.
    pub h_goe: Array2<f64>,
    /// First-subdiagonal real random jump operator.
    pub jump: Array2<f64>,
    /// Stream index within the ensemble.
    pub index: u64,
}

/// Draw one realization from stream `index` of the root seed.
///
/// Draw order (fixed for reproducibility): H_TD diagonal, H_TD
/// superdiagonal, H_GOE upper triangle row-major including the diagonal,
/// jump subdiagonal.
pub fn sample_realization(config: &ToyModelConfig, index: u64) -> Result<ToyRealization> {
    config.validate()?;
    let n = config.n_total;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index);

    let mut h_td = Array2::zeros((n, n));
    for i in 0..n {
        h_td[[i, i]] = rng.sample::<f64, _>(StandardNormal);
    }
    for i in 0..n - 1 {
        let v: f64 = rng.sample(StandardNormal);
        h_td[[i, i + 1]] = v;
        h_td[[i + 1, i]] = v;
    }

    let mut h_goe = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.sample(StandardNormal);
            h_goe[[i, j]] = v;
            h_goe[[j, i]] = v;
        }
    }

    let mut jump = Array2::zeros((n, n));
    for m in 0..n - 1 {
        jump[[m + 1, m]] = rng.sample::<f64, _>(StandardNormal);
    }

    Ok(ToyRealization {
        h_td,
        h_goe,
        jump,
        index,
    })
}

/// Steady state of the regular (μ = 0) Liouvillian.
#[derive(Debug, Clone)]
pub struct RegularSteadyState {
    /// ρ_R, complex Hermitian.
    pub rho: CMat,
    /// Eigenvalues of ρ_R, descending.
    pub eta: Vec<f64>,
    pub u1: CVec,
    pub u2: CVec,
}

fn to_complex(a: &Array2<f64>) -> CMat {
    a.mapv(|x| C64::new(x, 0.0))
}

/// Null-space steady state of the μ = 0 Liouvillian, with its dominant
/// eigenvectors u₁, u₂.
///
/// Zero-mode uniqueness at γ > 0 is established once per parameter set by
/// the spectral-gap property suite, so the per-realization solve skips the
/// double-solve degeneracy probe.
pub fn regular_steady_state(realization: &ToyRealization, gamma: f64) -> Result<RegularSteadyState> {
    let n = realization.h_td.nrows();
    if n > VECTORIZE_GUARD {
        return Err(QchaosError::Guard(format!(
            "dense steady-state extraction refused for N = {n} > {VECTORIZE_GUARD}"
        )));
    }
    let gen = LindbladGenerator::new(
        to_complex(&realization.h_td),
        vec![(to_complex(&realization.jump), gamma)],
    )?;
    let superop = vectorize_generator(&gen)?;
    let rho = steady_state_with(&superop, false)?.into_data();

    let (w, v) = linalg::eigh_hermitian(&rho)?;
    // Ascending from LAPACK; flip to descending.
    let mut eta: Vec<f64> = w.to_vec();
    eta.reverse();
    let u1 = v.column(n - 1).to_owned();
    let u2 = v.column(n - 2).to_owned();
    Ok(RegularSteadyState { rho, eta, u1, u2 })
}

/// P(χ) = I - χ(u₁u₁† + u₂u₂†), Hermitian with eigenvalues {1, 1-χ}.
pub fn projector(chi: f64, u1: &CVec, u2: &CVec) -> CMat {
    let n = u1.len();
    let mut p: CMat = linalg::eye(n);
    let chi = C64::new(chi, 0.0);
    for i in 0..n {
        for j in 0..n {
            p[[i, j]] -= chi * (u1[i] * u1[j].conj() + u2[i] * u2[j].conj());
        }
    }
    p
}

/// H = H_TD + (μ/√N) P(χ) H_GOE P(χ). The steady-state data is required
/// whenever μ > 0 and χ > 0; the deformed Hamiltonian is complex Hermitian
/// because the dominant steady-state eigenvectors are complex.
pub fn build_hamiltonian(
    realization: &ToyRealization,
    mu: f64,
    chi: f64,
    steady: Option<&RegularSteadyState>,
) -> Result<CMat> {
    let n = realization.h_td.nrows();
    if mu == 0.0 {
        return Ok(to_complex(&realization.h_td));
    }
    let perturb = if chi == 0.0 {
        to_complex(&realization.h_goe)
    } else {
        let st = steady.ok_or_else(|| {
            QchaosError::domain("projector vectors required when chi > 0; run regular_steady_state")
        })?;
        let p = projector(chi, &st.u1, &st.u2);
        p.dot(&to_complex(&realization.h_goe)).dot(&p)
    };
    let scale = C64::new(mu / (n as f64).sqrt(), 0.0);
    Ok(&to_complex(&realization.h_td) + &perturb.mapv(|z| z * scale))
}

/// Dense complex Liouvillian matrix of (H, L, γ), column-stacked.
pub fn build_liouvillian(h: &CMat, jump: &Array2<f64>, gamma: f64) -> Result<CMat> {
    let gen = LindbladGenerator::new(h.clone(), vec![(to_complex(jump), gamma)])?;
    vectorize_generator(&gen)
}

/// Eigenvalues of the Liouvillian of (H, L, γ) for complex Hermitian H and
/// real L, via a real similarity transformation (half the cost of a complex
/// eigensolver).
///
/// Write H = H_re + iH_im with H_re real symmetric and H_im real
/// antisymmetric, and split matrices into symmetric and antisymmetric
/// parts. With D = LᵀL,
///
/// ```text
/// F[X]  = γ(2LXLᵀ - DX - XD)   (preserves the symmetry class)
/// Gi[X] = H_im X - X H_im       (preserves the symmetry class)
/// Gr[X] = -(H_re X - X H_re)    (flips the symmetry class)
/// ```
///
/// so with P = F + Gi the Liouvillian action is M = P + i·Gr, and absorbing
/// a factor of i into the antisymmetric block gives the similar real matrix
///
/// ```text
/// R = [ P_ss    Gr_sa ]
///     [ -Gr_as  P_aa  ]
/// ```
///
/// whose eigenvalues equal those of the Liouvillian.
pub fn liouvillian_spectrum(h: &CMat, jump: &Array2<f64>, gamma: f64) -> Result<Vec<C64>> {
    let n = h.nrows();
    if n > VECTORIZE_GUARD {
        return Err(QchaosError::Guard(format!(
            "dense spectrum refused for N = {n} > {VECTORIZE_GUARD}"
        )));
    }
    if h.ncols() != n || jump.nrows() != n || jump.ncols() != n {
        return Err(QchaosError::Dimension {
            expected: n,
            actual: h.ncols().max(jump.nrows()),
        });
    }
    if linalg::hermiticity_defect(h) > 1e-10 {
        return Err(QchaosError::domain("liouvillian_spectrum requires Hermitian H"));
    }
    let h_re = h.mapv(|z| z.re);
    let h_im = h.mapv(|z| z.im);
    let d = jump.t().dot(jump);

    // Basis: symmetric block first (E_kk, then E_kl + E_lk for k < l),
    // antisymmetric block after (E_kl - E_lk for k < l).
    let n_sym = n * (n + 1) / 2;
    let n_tot = n * n;
    let sym_idx = |k: usize, l: usize| -> usize {
        // k ≤ l; diagonal entries first.
        if k == l {
            k
        } else {
            n + (k * (2 * n - k - 1)) / 2 + (l - k - 1)
        }
    };
    let asym_idx = |k: usize, l: usize| -> usize {
        // k < l.
        n_sym + (k * (2 * n - k - 1)) / 2 + (l - k - 1)
    };

    // F and G applied to E_kl (single matrix unit), accumulated into dense
    // scratch with the given weight.
    let apply_f = |k: usize, l: usize, weight: f64, out: &mut Array2<f64>| {
        // γ(2 L E_kl Lᵀ - D E_kl - E_kl D) with L E_kl Lᵀ = L[:,k] L[:,l]ᵀ.
        for i in 0..n {
            let li = jump[[i, k]];
            if li != 0.0 {
                for j in 0..n {
                    out[[i, j]] += weight * gamma * 2.0 * li * jump[[j, l]];
                }
            }
        }
        for i in 0..n {
            out[[i, l]] -= weight * gamma * d[[i, k]];
        }
        for j in 0..n {
            out[[k, j]] -= weight * gamma * d[[l, j]];
        }
    };
    let apply_gr = |k: usize, l: usize, weight: f64, out: &mut Array2<f64>| {
        // -(H_re E_kl - E_kl H_re)
        for i in 0..n {
            out[[i, l]] -= weight * h_re[[i, k]];
        }
        for j in 0..n {
            out[[k, j]] += weight * h_re[[l, j]];
        }
    };
    let apply_gi = |k: usize, l: usize, weight: f64, out: &mut Array2<f64>| {
        // H_im E_kl - E_kl H_im
        for i in 0..n {
            out[[i, l]] += weight * h_im[[i, k]];
        }
        for j in 0..n {
            out[[k, j]] -= weight * h_im[[l, j]];
        }
    };

    let mut r = Array2::<f64>::zeros((n_tot, n_tot));
    let mut p_img = Array2::<f64>::zeros((n, n));
    let mut gr_img = Array2::<f64>::zeros((n, n));

    let scatter =
        |col: usize, p_img: &Array2<f64>, gr_img: &Array2<f64>, r: &mut Array2<f64>, from_sym: bool| {
            // P = F + Gi preserves the symmetry type; Gr flips it.
            for k in 0..n {
                for l in k..n {
                    if from_sym {
                        // P image is symmetric: coefficient of E_kk or E_kl+E_lk.
                        r[[sym_idx(k, l), col]] = p_img[[k, l]];
                        // -Gr image is antisymmetric.
                        if k < l {
                            r[[asym_idx(k, l), col]] = -gr_img[[k, l]];
                        }
                    } else {
                        // P image antisymmetric, Gr image symmetric.
                        if k < l {
                            r[[asym_idx(k, l), col]] = p_img[[k, l]];
                        }
                        r[[sym_idx(k, l), col]] = gr_img[[k, l]];
                    }
                }
            }
        };

    // Symmetric basis columns.
    for k in 0..n {
        for l in k..n {
            let col = sym_idx(k, l);
            p_img.fill(0.0);
            gr_img.fill(0.0);
            apply_f(k, l, 1.0, &mut p_img);
            apply_gi(k, l, 1.0, &mut p_img);
            apply_gr(k, l, 1.0, &mut gr_img);
            if k < l {
                apply_f(l, k, 1.0, &mut p_img);
                apply_gi(l, k, 1.0, &mut p_img);
                apply_gr(l, k, 1.0, &mut gr_img);
            }
            scatter(col, &p_img, &gr_img, &mut r, true);
        }
    }
    // Antisymmetric basis columns.
    for k in 0..n {
        for l in (k + 1)..n {
            let col = asym_idx(k, l);
            p_img.fill(0.0);
            gr_img.fill(0.0);
            apply_f(k, l, 1.0, &mut p_img);
            apply_gi(k, l, 1.0, &mut p_img);
            apply_gr(k, l, 1.0, &mut gr_img);
            apply_f(l, k, -1.0, &mut p_img);
            apply_gi(l, k, -1.0, &mut p_img);
            apply_gr(l, k, -1.0, &mut gr_img);
            scatter(col, &p_img, &gr_img, &mut r, false);
        }
    }

    use ndarray_linalg::EigVals;
    Ok(r.eigvals()?.to_vec())
}

/// Propagation options for [`toy_vne_dynamics`].
#[derive(Debug, Clone)]
pub struct ToyDynamicsOptions {
    pub dt: f64,
    pub t_final: f64,
    pub output_every: usize,
    pub slope_window: (f64, f64),
}

impl Default for ToyDynamicsOptions {
    fn default() -> Self {
        ToyDynamicsOptions {
            dt: 0.02,
            t_final: 20.0,
            output_every: 5,
            slope_window: (0.0, 0.5),
        }
    }
}

/// Entropy trace of one realization at the given (μ, χ).
fn toy_member_entropy(
    real: &ToyRealization,
    mu: f64,
    chi: f64,
    gamma: f64,
    steady: Option<&RegularSteadyState>,
    m: usize,
    opts: &ToyDynamicsOptions,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = build_hamiltonian(real, mu, chi, steady)?;
    let rho0 = block_ground_product(&real.h_td, m)?;
    let gen = LindbladGenerator::new(h, vec![(to_complex(&real.jump), gamma)])?;
    let evolve_opts = EvolveOptions {
        dt: opts.dt,
        t_final: opts.t_final,
        output_every: opts.output_every,
        positivity_tol: 1e-6,
        positivity_check_every: 20,
    };
    let mut times = Vec::new();
    let mut s_values = Vec::new();
    crate::lindblad::propagate_with(&rho0, &gen, &evolve_opts, |t, rho| {
        let reduced = reduce_bipartite(rho, m, m, Keep::A)?;
        times.push(t);
        s_values.push(von_neumann_entropy(&reduced)?);
        Ok(())
    })?;
    Ok((times, s_values))
}

fn assemble_series(
    results: Vec<Result<(Vec<f64>, Vec<f64>)>>,
    slope_window: (f64, f64),
) -> Result<EntropySeries> {
    let mut times = None;
    let mut members = Vec::new();
    let mut failed = 0usize;
    let mut last_err = None;
    for r in results {
        match r {
            Ok((t, s)) => {
                if times.is_none() {
                    times = Some(t);
                }
                let zeros = vec![0.0; s.len()];
                members.push((s, zeros));
            }
            Err(e) => {
                last_err = Some(e);
                failed += 1;
            }
        }
    }
    match times {
        Some(t) => EntropySeries::from_members(t, members, slope_window, failed),
        None => Err(last_err.unwrap_or_else(|| QchaosError::Integration("every realization failed".into()))),
    }
}

/// Ensemble-averaged entropy growth of one M-dimensional subsystem.
///
/// The initial state is a pure product over the M×M factorization of the
/// basis (k = i·M + j): each factor holds the ground eigenvector of the
/// corresponding M×M diagonal block of H_TD. The subsystem entropy is
/// reported in the `s_spin` slot of [`EntropySeries`] with `s_photon` at
/// zero, so `s_total` equals the subsystem entropy.
pub fn toy_vne_dynamics(config: &ToyModelConfig, opts: &ToyDynamicsOptions) -> Result<EntropySeries> {
    let sweep = toy_vne_chi_sweep(config, &[config.chi], opts)?;
    Ok(sweep.into_iter().next().expect("one chi value").1)
}

/// [`toy_vne_dynamics`] over a χ grid, sharing each realization's μ = 0
/// steady-state solve across all χ values.
pub fn toy_vne_chi_sweep(
    config: &ToyModelConfig,
    chis: &[f64],
    opts: &ToyDynamicsOptions,
) -> Result<Vec<(f64, EntropySeries)>> {
    config.validate()?;
    if chis.is_empty() {
        return Err(QchaosError::domain("chi grid must be nonempty"));
    }
    for chi in chis {
        if !(0.0..=1.0).contains(chi) {
            return Err(QchaosError::domain(format!("chi = {chi} outside [0, 1]")));
        }
    }
    let m = config.subsystem_dim();
    let needs_steady = config.mu > 0.0 && chis.iter().any(|c| *c > 0.0);

    // per_member[idx][chi_idx]
    let per_member: Vec<Vec<Result<(Vec<f64>, Vec<f64>)>>> = (0..config.ensemble_size as u64)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|idx| {
            let prep = || -> Result<(ToyRealization, Option<RegularSteadyState>)> {
                let real = sample_realization(config, *idx)?;
                let steady = if needs_steady {
                    Some(regular_steady_state(&real, config.gamma)?)
                } else {
                    None
                };
                Ok((real, steady))
            };
            match prep() {
                Ok((real, steady)) => chis
                    .iter()
                    .map(|chi| {
                        toy_member_entropy(&real, config.mu, *chi, config.gamma, steady.as_ref(), m, opts)
                    })
                    .collect(),
                Err(e) => chis
                    .iter()
                    .map(|_| Err(QchaosError::Numeric(e.to_string())))
                    .collect(),
            }
        })
        .collect();

    let mut out = Vec::with_capacity(chis.len());
    for (ci, chi) in chis.iter().enumerate() {
        let column: Vec<Result<(Vec<f64>, Vec<f64>)>> = per_member
            .iter()
            .map(|row| match &row[ci] {
                Ok(v) => Ok(v.clone()),
                Err(e) => Err(QchaosError::Numeric(e.to_string())),
            })
            .collect();
        out.push((*chi, assemble_series(column, opts.slope_window)?));
    }
    Ok(out)
}

/// Pure product state over the M×M factorization: ground eigenvectors of
/// the leading and following M×M diagonal blocks of H_TD.
fn block_ground_product(h_td: &Array2<f64>, m: usize) -> Result<DensityMatrix> {
    use ndarray_linalg::Eigh;
    let block_a = h_td.slice(ndarray::s![0..m, 0..m]).to_owned();
    let block_b = h_td.slice(ndarray::s![m..2 * m, m..2 * m]).to_owned();
    let (_, va) = block_a.eigh(ndarray_linalg::UPLO::Lower)?;
    let (_, vb) = block_b.eigh(ndarray_linalg::UPLO::Lower)?;
    let ga = va.column(0);
    let gb = vb.column(0);
    let mut psi = Array1::zeros(m * m);
    for i in 0..m {
        for j in 0..m {
            psi[i * m + j] = C64::new(ga[i] * gb[j], 0.0);
        }
    }
    DensityMatrix::from_pure(&psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::exact_evolve;
    use crate::testkit;
    use approx::assert_abs_diff_eq;
    use ndarray_linalg::EigVals;

    fn config(n: usize, mu: f64, chi: f64, seed: u64) -> ToyModelConfig {
        ToyModelConfig {
            n_total: n,
            mu,
            chi,
            gamma: 1.0,
            seed,
            ensemble_size: 1,
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed_and_stream() {
        let cfg = config(16, 1.0, 0.0, 42);
        let a = sample_realization(&cfg, 3).unwrap();
        let b = sample_realization(&cfg, 3).unwrap();
        assert_eq!(a.h_td, b.h_td);
        assert_eq!(a.h_goe, b.h_goe);
        assert_eq!(a.jump, b.jump);
        let c = sample_realization(&cfg, 4).unwrap();
        assert_ne!(a.h_td, c.h_td);
    }

    #[test]
    fn sparsity_patterns_are_exact() {
        let cfg = config(25, 0.5, 0.5, 7);
        let real = sample_realization(&cfg, 0).unwrap();
        for i in 0..25 {
            for j in 0..25 {
                if (i as i64 - j as i64).abs() > 1 {
                    assert_eq!(real.h_td[[i, j]], 0.0, "tridiagonal violated at ({i},{j})");
                }
                if j + 1 != i {
                    assert_eq!(real.jump[[i, j]], 0.0, "subdiagonal violated at ({i},{j})");
                }
            }
        }
        assert_eq!(real.h_td[[1, 3]], 0.0);
        // Symmetry is exact by construction.
        assert_eq!(real.h_td, real.h_td.t().to_owned());
        assert_eq!(real.h_goe, real.h_goe.t().to_owned());
    }

    #[test]
    fn goe_offdiagonal_variance_is_unit() {
        // Pool off-diagonal entries across realizations until 10⁴ samples.
        let cfg = config(16, 1.0, 0.0, 11);
        let mut samples = Vec::with_capacity(10_000);
        let mut idx = 0u64;
        while samples.len() < 10_000 {
            let real = sample_realization(&cfg, idx).unwrap();
            for i in 0..16 {
                for j in (i + 1)..16 {
                    samples.push(real.h_goe[[i, j]]);
                }
            }
            idx += 1;
        }
        let n = samples.len() as f64;
        let mean: f64 = samples.iter().sum::<f64>() / n;
        let var: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        assert!((var - 1.0).abs() < 0.05, "off-diagonal variance {var}");
    }

    #[test]
    fn regular_steady_state_is_normalized_with_dominant_eigenvalues() {
        let cfg = config(49, 0.0, 0.0, 5);
        let real = sample_realization(&cfg, 0).unwrap();
        let ss = regular_steady_state(&real, 1.0).unwrap();
        let tr = linalg::trace(&ss.rho);
        assert_abs_diff_eq!(tr.re, 1.0, epsilon = 1e-10);
        assert!(tr.im.abs() < 1e-12);
        // Descending spectrum with only a few significantly large values.
        for w in ss.eta.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
        assert!(
            ss.eta[0] + ss.eta[1] > 0.5,
            "η₁+η₂ = {} should dominate",
            ss.eta[0] + ss.eta[1]
        );
        let purity: f64 = ss.eta.iter().map(|e| e * e).sum();
        assert!(purity > 0.2, "steady state should retain purity, got {purity}");
    }

    #[test]
    fn regular_steady_state_matches_long_time_dynamics_at_n16() {
        let cfg = config(16, 0.0, 0.0, 9);
        let real = sample_realization(&cfg, 0).unwrap();
        let gamma = 1.0;
        let ss = regular_steady_state(&real, gamma).unwrap();

        let gen = LindbladGenerator::new(to_complex(&real.h_td), vec![(to_complex(&real.jump), gamma)]).unwrap();
        let superop = vectorize_generator(&gen).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let rho0 = testkit::random_pure_state(&mut rng, 16);
        let late = exact_evolve(&rho0, &superop, 200.0).unwrap();
        let diff = late.data() - &ss.rho;
        assert!(
            linalg::trace_norm(&diff).unwrap() < 1e-6,
            "distance {}",
            linalg::trace_norm(&diff).unwrap()
        );
    }

    #[test]
    fn projector_algebra() {
        let cfg = config(25, 0.0, 0.0, 13);
        let real = sample_realization(&cfg, 0).unwrap();
        let ss = regular_steady_state(&real, 1.0).unwrap();
        // χ = 1: orthogonal projector, P² = P.
        let p1 = projector(1.0, &ss.u1, &ss.u2);
        let diff = p1.dot(&p1) - &p1;
        assert!(linalg::max_abs(&diff) < 1e-12, "P(1)² - P(1) defect {}", linalg::max_abs(&diff));
        // General χ: P² = I - (2χ - χ²)(u₁u₁† + u₂u₂†).
        let chi = 0.6;
        let p = projector(chi, &ss.u1, &ss.u2);
        assert!(linalg::hermiticity_defect(&p) < 1e-12);
        let expected = projector(2.0 * chi - chi * chi, &ss.u1, &ss.u2);
        let diff = p.dot(&p) - &expected;
        assert!(linalg::max_abs(&diff) < 1e-12, "P(χ)² defect {}", linalg::max_abs(&diff));
    }

    #[test]
    fn hamiltonian_construction_limits() {
        let cfg = config(16, 0.7, 0.8, 21);
        let real = sample_realization(&cfg, 0).unwrap();
        // μ = 0 ignores χ entirely.
        let bare = build_hamiltonian(&real, 0.0, 0.9, None).unwrap();
        assert!(linalg::max_abs(&(&bare - &to_complex(&real.h_td))) == 0.0);
        // χ = 0 adds the undeformed GOE matrix.
        let plain = build_hamiltonian(&real, 1.0, 0.0, None).unwrap();
        let expected = to_complex(&(&real.h_td + &real.h_goe.mapv(|x| x / 4.0)));
        assert!(linalg::max_abs(&(&plain - &expected)) < 1e-14);
        // χ > 0 without steady-state data is an error.
        assert!(build_hamiltonian(&real, 1.0, 0.5, None).is_err());
        // χ = 1 annihilates u₁: ⟨u₁|H - H_TD|v⟩ = 0 for all v.
        let ss = regular_steady_state(&real, 1.0).unwrap();
        let h = build_hamiltonian(&real, 1.0, 1.0, Some(&ss)).unwrap();
        let delta = &h - &to_complex(&real.h_td);
        let mut worst = 0.0f64;
        for j in 0..16 {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..16 {
                acc += ss.u1[i].conj() * delta[[i, j]];
            }
            worst = worst.max(acc.norm());
        }
        assert!(worst < 1e-10, "u₁ row of the perturbation: {worst}");
        // Result stays Hermitian.
        assert!(linalg::hermiticity_defect(&h) < 1e-12);
    }

    #[test]
    fn liouvillian_without_dissipation_has_imaginary_spectrum() {
        let cfg = config(9, 1.0, 0.0, 31);
        let real = sample_realization(&cfg, 0).unwrap();
        let h = build_hamiltonian(&real, 1.0, 0.0, None).unwrap();
        let m = build_liouvillian(&h, &real.jump, 0.0).unwrap();
        let eigs = m.eigvals().unwrap();
        for z in eigs.iter() {
            assert!(z.re.abs() < 1e-10, "eigenvalue {z} should be imaginary");
        }
    }

    #[test]
    fn liouvillian_action_matches_lindblad_rhs() {
        let cfg = config(9, 1.0, 0.0, 33);
        let real = sample_realization(&cfg, 0).unwrap();
        let h = build_hamiltonian(&real, 1.0, 0.0, None).unwrap();
        let gamma = 0.8;
        let m = build_liouvillian(&h, &real.jump, gamma).unwrap();
        let gen = LindbladGenerator::new(h.clone(), vec![(to_complex(&real.jump), gamma)]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let rho = testkit::random_density_matrix(&mut rng, 9);
        let direct = crate::lindblad::lindblad_rhs(&rho, &gen).unwrap();
        let vectored = linalg::unvec_col(&m.dot(&linalg::vec_col(rho.data())), 9).unwrap();
        assert!(linalg::max_abs(&(&direct - &vectored)) < 1e-12);
    }

    #[test]
    fn real_similarity_spectrum_matches_complex_eigensolver() {
        // Oracle for the halved-cost eigenvalue route, including a deformed
        // (complex Hermitian) Hamiltonian.
        for (n, mu, chi, seed) in [(4usize, 1.0, 0.0, 41u64), (9, 1.0, 0.0, 43), (9, 1.0, 0.8, 45)] {
            let cfg = config(n, mu, chi, seed);
            let real = sample_realization(&cfg, 0).unwrap();
            let steady = if chi > 0.0 {
                Some(regular_steady_state(&real, 1.0).unwrap())
            } else {
                None
            };
            let h = build_hamiltonian(&real, mu, chi, steady.as_ref()).unwrap();
            let gamma = 0.7;
            let m = build_liouvillian(&h, &real.jump, gamma).unwrap();
            let reference: Vec<C64> = m.eigvals().unwrap().to_vec();
            let fast = liouvillian_spectrum(&h, &real.jump, gamma).unwrap();
            assert_eq!(reference.len(), fast.len());
            // Greedy nearest matching; lexicographic sorting is unstable for
            // conjugate pairs with equal real parts.
            let mut used = vec![false; fast.len()];
            let mut worst = 0.0f64;
            for a in &reference {
                let (best_idx, best) = fast
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !used[*i])
                    .map(|(i, b)| (i, (a - b).norm()))
                    .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                    .unwrap();
                used[best_idx] = true;
                worst = worst.max(best);
            }
            assert!(worst < 1e-9, "N = {n}, χ = {chi}: worst pairing distance {worst}");
        }
    }

    #[test]
    fn spectrum_is_conjugate_symmetric() {
        let cfg = config(16, 1.0, 0.0, 47);
        let real = sample_realization(&cfg, 0).unwrap();
        let h = build_hamiltonian(&real, 1.0, 0.0, None).unwrap();
        let eigs = liouvillian_spectrum(&h, &real.jump, 1.0).unwrap();
        assert_eq!(eigs.len(), 256);
        // Every eigenvalue with Im > 0 has a conjugate partner.
        let mut worst = 0.0f64;
        for z in eigs.iter().filter(|z| z.im > 1e-9) {
            let best = eigs
                .iter()
                .map(|w| (w - z.conj()).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
        assert!(worst < 1e-9, "pairing mismatch {worst}");
    }

    #[test]
    fn toy_dynamics_entropy_grows_from_zero_and_respects_bound() {
        let cfg = ToyModelConfig {
            n_total: 9,
            mu: 1.0,
            chi: 0.0,
            gamma: 1.0,
            seed: 3,
            ensemble_size: 4,
        };
        let opts = ToyDynamicsOptions {
            dt: 0.01,
            t_final: 8.0,
            output_every: 10,
            slope_window: (0.0, 0.5),
        };
        let series = toy_vne_dynamics(&cfg, &opts).unwrap();
        let total = series.s_total();
        assert!(total[0].abs() < 1e-10);
        assert!(series.s_ss > 0.2, "entropy should grow, s_ss = {}", series.s_ss);
        for s in &total {
            assert!(*s <= 3.0f64.ln() + 1e-8, "subsystem entropy above ln M: {s}");
        }
        assert_eq!(series.failed_members, 0);
    }

    #[test]
    fn toy_config_validation() {
        let mut cfg = config(10, 0.5, 0.5, 1);
        assert!(cfg.validate().is_err());
        cfg.n_total = 16;
        cfg.mu = 1.5;
        assert!(cfg.validate().is_err());
        cfg.mu = 0.5;
        cfg.gamma = -1.0;
        assert!(cfg.validate().is_err());
    }
}
