//! Subsystem entropies, fidelity out-of-time-order correlators and
//! steady-state fluctuations.
//!
//! These are the quantum chaos diagnostics: the total von Neumann entropy
//! S_spin + S_photon tracks phase-space mixing, its early-time slope probes
//! transient chaos, and the perturbative correlator F_G(t) ≈ 1 - δφ²(ΔG)²
//! relates fidelity decay to operator-variance growth.

use crate::error::{QchaosError, Result};
use crate::hilbert::HilbertSpec;
use crate::lindblad::{
    adjoint_evolve_with, evolve, propagate_with, steady_state, vectorize_generator, DensityMatrix,
    EvolveOptions, LindbladGenerator, VECTORIZE_GUARD,
};
use crate::linalg::{self, hermiticity_defect, tail_average, trace, window_slope};
use crate::sparse::OpRepr;
use crate::{C64, CMat};
use ndarray::Array2;
use rayon::prelude::*;

/// Eigenvalue floor inside -η ln η; spectral weight below this is noise.
pub const ENTROPY_EIGENVALUE_FLOOR: f64 = 1e-12;
/// Early-time slope window for entropy growth rates.
pub const SLOPE_WINDOW: (f64, f64) = (0.0, 0.5);
/// Fraction of the run regarded as the steady-state tail.
pub const TAIL_FRACTION: f64 = 0.2;

/// Which tensor factor survives the partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Spin,
    Photon,
}

/// Which factor of a generic d_a ⊗ d_b bipartition to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    /// The major (slow) index of dimension d_a.
    A,
    /// The minor (fast) index of dimension d_b.
    B,
}

/// Partial trace over one factor of a bipartite space with composite index
/// k = i·d_b + j (factor A major).
pub fn reduce_bipartite(rho: &CMat, d_a: usize, d_b: usize, keep: Keep) -> Result<CMat> {
    if rho.nrows() != d_a * d_b || rho.ncols() != d_a * d_b {
        return Err(QchaosError::Dimension {
            expected: d_a * d_b,
            actual: rho.nrows(),
        });
    }
    match keep {
        Keep::A => {
            let mut out: CMat = Array2::zeros((d_a, d_a));
            for i in 0..d_a {
                for i2 in 0..d_a {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..d_b {
                        acc += rho[[i * d_b + j, i2 * d_b + j]];
                    }
                    out[[i, i2]] = acc;
                }
            }
            Ok(out)
        }
        Keep::B => {
            let mut out: CMat = Array2::zeros((d_b, d_b));
            for j in 0..d_b {
                for j2 in 0..d_b {
                    let mut acc = C64::new(0.0, 0.0);
                    for i in 0..d_a {
                        acc += rho[[i * d_b + j, i * d_b + j2]];
                    }
                    out[[j, j2]] = acc;
                }
            }
            Ok(out)
        }
    }
}

/// Reduced density matrix of the spin or photon subsystem (photon index major).
pub fn partial_trace(rho: &DensityMatrix, spec: &HilbertSpec, keep: Subsystem) -> Result<CMat> {
    let keep = match keep {
        Subsystem::Photon => Keep::A,
        Subsystem::Spin => Keep::B,
    };
    reduce_bipartite(rho.data(), spec.d_photon(), spec.d_spin(), keep)
}

/// Von Neumann entropy -Σ η ln η in nats.
///
/// Eigenvalues below the floor are dropped; an eigenvalue under -1e-6 is a
/// positivity error.
pub fn von_neumann_entropy(rho_reduced: &CMat) -> Result<f64> {
    if hermiticity_defect(rho_reduced) > 1e-10 {
        return Err(QchaosError::domain("entropy input must be Hermitian"));
    }
    let evals = linalg::eigvalsh(rho_reduced)?;
    let mut s = 0.0;
    for eta in evals.iter() {
        if *eta < -1e-6 {
            return Err(QchaosError::numeric(format!(
                "reduced density matrix eigenvalue {eta:.3e} below -1e-6"
            )));
        }
        if *eta > ENTROPY_EIGENVALUE_FLOOR {
            s -= eta * eta.ln();
        }
    }
    Ok(s)
}

/// Ensemble-averaged subsystem entropy dynamics.
#[derive(Debug, Clone)]
pub struct EntropySeries {
    pub times: Vec<f64>,
    pub s_spin: Vec<f64>,
    pub s_photon: Vec<f64>,
    /// Early-time window of the linear fit for `s_slope`.
    pub slope_window: (f64, f64),
    /// Least-squares slope of s_total over the slope window.
    pub s_slope: f64,
    /// Tail average of s_total over the final 20% of the run.
    pub s_ss: f64,
    pub ensemble_size: usize,
    pub failed_members: usize,
}

impl EntropySeries {
    /// s_total = s_spin + s_photon, pointwise by construction.
    pub fn s_total(&self) -> Vec<f64> {
        self.s_spin
            .iter()
            .zip(self.s_photon.iter())
            .map(|(a, b)| a + b)
            .collect()
    }

    pub(crate) fn from_members(
        times: Vec<f64>,
        members: Vec<(Vec<f64>, Vec<f64>)>,
        slope_window: (f64, f64),
        failed_members: usize,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(QchaosError::Integration(
                "every ensemble member failed to evolve".into(),
            ));
        }
        let n_pts = times.len();
        let n = members.len() as f64;
        let mut s_spin = vec![0.0; n_pts];
        let mut s_photon = vec![0.0; n_pts];
        for (spin, photon) in &members {
            for k in 0..n_pts {
                s_spin[k] += spin[k];
                s_photon[k] += photon[k];
            }
        }
        for k in 0..n_pts {
            s_spin[k] /= n;
            s_photon[k] /= n;
        }
        let s_total: Vec<f64> = s_spin.iter().zip(s_photon.iter()).map(|(a, b)| a + b).collect();
        let s_slope = window_slope(&times, &s_total, slope_window.0, slope_window.1).unwrap_or(f64::NAN);
        let s_ss = tail_average(&s_total, TAIL_FRACTION);
        Ok(EntropySeries {
            times,
            s_spin,
            s_photon,
            slope_window,
            s_slope,
            s_ss,
            ensemble_size: members.len(),
            failed_members,
        })
    }
}

/// Ensemble-averaged spin/photon entropy evolution under `gen`.
///
/// Members run in parallel; failures are excluded and counted.
pub fn vne_dynamics(
    initial_states: &[DensityMatrix],
    gen: &LindbladGenerator,
    spec: &HilbertSpec,
    opts: &EvolveOptions,
) -> Result<EntropySeries> {
    if initial_states.is_empty() {
        return Err(QchaosError::domain("ensemble must be nonempty"));
    }
    type Member = (Vec<f64>, (Vec<f64>, Vec<f64>));
    let results: Vec<Result<Member>> = initial_states
        .par_iter()
        .map(|rho0| {
            let mut times = Vec::new();
            let mut spin = Vec::new();
            let mut photon = Vec::new();
            propagate_with(rho0, gen, opts, |t, rho| {
                let dm = DensityMatrix::new_unchecked(rho.clone());
                let rho_spin = partial_trace(&dm, spec, Subsystem::Spin)?;
                let rho_photon = partial_trace(&dm, spec, Subsystem::Photon)?;
                times.push(t);
                spin.push(von_neumann_entropy(&rho_spin)?);
                photon.push(von_neumann_entropy(&rho_photon)?);
                Ok(())
            })?;
            Ok((times, (spin, photon)))
        })
        .collect();

    let mut times = None;
    let mut members = Vec::new();
    let mut failed = 0usize;
    for r in results {
        match r {
            Ok((t, member)) => {
                if times.is_none() {
                    times = Some(t);
                }
                members.push(member);
            }
            Err(_) => failed += 1,
        }
    }
    EntropySeries::from_members(
        times.ok_or_else(|| QchaosError::Integration("every ensemble member failed".into()))?,
        members,
        SLOPE_WINDOW,
        failed,
    )
}

/// Closed-system entropy dynamics on pure states: Schrödinger propagation
/// plus Schmidt-decomposition entropies of the photon/spin split.
///
/// Exactly equivalent to [`vne_dynamics`] with a zero-rate generator when
/// every initial state is pure, at O(d) instead of O(d²) storage. The two
/// reduced entropies of a pure state coincide, so both series carry the
/// common value.
pub fn vne_dynamics_pure(
    initial_states: &[crate::CVec],
    hamiltonian: &CMat,
    spec: &HilbertSpec,
    opts: &EvolveOptions,
) -> Result<EntropySeries> {
    use ndarray_linalg::SVD;
    if initial_states.is_empty() {
        return Err(QchaosError::domain("ensemble must be nonempty"));
    }
    if hamiltonian.nrows() != spec.d_total() {
        return Err(QchaosError::Dimension {
            expected: spec.d_total(),
            actual: hamiltonian.nrows(),
        });
    }
    type Member = (Vec<f64>, (Vec<f64>, Vec<f64>));
    let results: Vec<Result<Member>> = initial_states
        .par_iter()
        .map(|psi0| {
            let mut times = Vec::new();
            let mut entropies = Vec::new();
            crate::lindblad::schroedinger_evolve_with(psi0, hamiltonian, opts, |t, psi| {
                // Schmidt values of the photon-major reshape.
                let matrix = Array2::from_shape_fn((spec.d_photon(), spec.d_spin()), |(n, m)| {
                    psi[n * spec.d_spin() + m]
                });
                let (_, sv, _) = matrix.svd(false, false)?;
                let mut s = 0.0;
                for sigma in sv.iter() {
                    let eta = sigma * sigma;
                    if eta > ENTROPY_EIGENVALUE_FLOOR {
                        s -= eta * eta.ln();
                    }
                }
                times.push(t);
                entropies.push(s);
                Ok(())
            })?;
            let twin = entropies.clone();
            Ok((times, (entropies, twin)))
        })
        .collect();

    let mut times = None;
    let mut members = Vec::new();
    let mut failed = 0usize;
    for r in results {
        match r {
            Ok((t, member)) => {
                if times.is_none() {
                    times = Some(t);
                }
                members.push(member);
            }
            Err(_) => failed += 1,
        }
    }
    EntropySeries::from_members(
        times.ok_or_else(|| QchaosError::Integration("every ensemble member failed".into()))?,
        members,
        SLOPE_WINDOW,
        failed,
    )
}

/// Which computation paths [`fotoc`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FotocPath {
    /// Variance path only: ΔG²(t) from the Schrödinger picture.
    VarianceOnly,
    /// Variance path plus the adjoint-evolved fidelity
    /// F(t) = Tr(W†(t) ρ₀ W(t) ρ₀), W = e^{iδφG}.
    Both,
}

/// Fidelity correlator output.
#[derive(Debug, Clone)]
pub struct FotocResult {
    pub times: Vec<f64>,
    /// Adjoint-path fidelity F(t) when computed.
    pub f_values: Option<Vec<f64>>,
    pub delta_phi: f64,
    pub generator_label: String,
    /// ΔG(t) from the variance path.
    pub sigma_series: Vec<f64>,
    /// Tail average of ΔG(t).
    pub sigma_ss: f64,
    /// False when δφ‖G‖ was too large for the perturbative identity.
    pub perturbative: bool,
}

/// Fidelity out-of-time-order correlator for W = e^{iδφG}, V = ρ(0).
///
/// The variance path evolves ρ and forms ΔG²(t) = ⟨G²⟩ - ⟨G⟩²; the adjoint
/// path evolves W in the Heisenberg picture and forms
/// F(t) = Tr(W†(t) ρ₀ W(t) ρ₀). For a pure ρ₀ (the physical preparation
/// here) F(0) = 1, and in the perturbative regime F ≈ 1 - δφ²ΔG²; a mixed
/// ρ₀ would instead start at its purity.
pub fn fotoc(
    rho0: &DensityMatrix,
    gen: &LindbladGenerator,
    g: &CMat,
    delta_phi: f64,
    opts: &EvolveOptions,
    path: FotocPath,
    label: impl Into<String>,
) -> Result<FotocResult> {
    if hermiticity_defect(g) > 1e-10 {
        return Err(QchaosError::domain("FOTOC generator G must be Hermitian"));
    }
    if delta_phi <= 0.0 {
        return Err(QchaosError::domain("delta_phi must be positive"));
    }
    let g_norm = linalg::eigvalsh(g)?
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let perturbative = delta_phi <= 0.01 / g_norm.max(1e-300);

    // Variance path.
    let g2 = g.dot(g);
    let series = evolve(rho0, gen, opts, &[g.clone(), g2])?;
    let times = series.times.clone();
    let sigma_series: Vec<f64> = series.expectations[0]
        .iter()
        .zip(series.expectations[1].iter())
        .map(|(g_mean, g2_mean)| (g2_mean.re - g_mean.re * g_mean.re).max(0.0).sqrt())
        .collect();
    let sigma_ss = tail_average(&sigma_series, TAIL_FRACTION);

    let f_values = match path {
        FotocPath::VarianceOnly => None,
        FotocPath::Both => {
            let w0 = linalg::expm(&g.mapv(|z| z * C64::new(0.0, delta_phi)))?;
            let rho_repr = OpRepr::from_dense(rho0.data());
            let mut f = Vec::new();
            adjoint_evolve_with(&w0, gen, opts, |_t, w| {
                // Tr(W† ρ₀ W ρ₀)
                let wdag = linalg::dagger(w);
                let m = wdag.dot(rho0.data()).dot(w);
                f.push(rho_repr.trace_mul(&m).re);
                Ok(())
            })?;
            Some(f)
        }
    };

    Ok(FotocResult {
        times,
        f_values,
        delta_phi,
        generator_label: label.into(),
        sigma_series,
        sigma_ss,
        perturbative,
    })
}

/// How a steady-state fluctuation was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceMethod {
    /// Null space of the vectorized generator.
    NullSpace,
    /// Tail of a long-time evolution.
    LongTime,
}

#[derive(Debug, Clone)]
pub struct SteadyVariance {
    pub sigma: f64,
    pub method: VarianceMethod,
}

/// Options for the long-time fallback of [`steady_state_variance`].
#[derive(Debug, Clone)]
pub struct SteadyVarianceOptions {
    pub dt: f64,
    pub t_final: f64,
    /// Start state for the long-time route; maximally mixed when absent.
    pub rho0: Option<DensityMatrix>,
    /// Skip the null-space route even when the dimension allows it; needed
    /// when the asymptotic state depends on conserved quantities of ρ₀.
    pub force_long_time: bool,
}

/// Standard deviation of G in the steady state.
///
/// Uses the null-space steady state when the dense vectorization guard
/// allows it, otherwise the tail of a long-time evolution. A degenerate
/// null space propagates as a multiplicity error.
pub fn steady_state_variance(
    gen: &LindbladGenerator,
    g: &CMat,
    opts: &SteadyVarianceOptions,
) -> Result<SteadyVariance> {
    if hermiticity_defect(g) > 1e-10 {
        return Err(QchaosError::domain("observable G must be Hermitian"));
    }
    if gen.dim() <= VECTORIZE_GUARD && !opts.force_long_time {
        let m = vectorize_generator(gen)?;
        let rho_ss = steady_state(&m)?;
        let mean = trace(&g.dot(rho_ss.data())).re;
        let mean_sq = trace(&g.dot(g).dot(rho_ss.data())).re;
        return Ok(SteadyVariance {
            sigma: (mean_sq - mean * mean).max(0.0).sqrt(),
            method: VarianceMethod::NullSpace,
        });
    }
    let rho0 = opts
        .rho0
        .clone()
        .unwrap_or_else(|| DensityMatrix::maximally_mixed(gen.dim()));
    let evolve_opts = EvolveOptions::new(opts.dt, opts.t_final);
    let g2 = g.dot(g);
    let series = evolve(&rho0, gen, &evolve_opts, &[g.clone(), g2])?;
    let sigmas: Vec<f64> = series.expectations[0]
        .iter()
        .zip(series.expectations[1].iter())
        .map(|(m1, m2)| (m2.re - m1.re * m1.re).max(0.0).sqrt())
        .collect();
    Ok(SteadyVariance {
        sigma: tail_average(&sigmas, TAIL_FRACTION),
        method: VarianceMethod::LongTime,
    })
}
