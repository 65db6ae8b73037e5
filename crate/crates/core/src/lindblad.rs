//! Lindblad generator construction and master-equation propagation.
//!
//! The generator acts as
//!
//! ```text
//! dρ/dt = -i[H, ρ] + Σ_j κ_j (2 L_j ρ L_j† - {L_j†L_j, ρ})
//! ```
//!
//! (rates carry the factor-2 convention, so a photon mode damped through
//! jump operator a at rate κ loses occupation as e^{-2κt}).
//!
//! Schrödinger-picture propagation is fixed-step RK4 on the d×d density
//! matrix; the d²-dimensional vectorized form is reserved for spectra,
//! steady states and the exact-exponential oracle. Vectorization uses
//! column stacking, vec(AXB) = (Bᵀ ⊗ A) vec(X).

use crate::classical::AdmParams;
use crate::error::{QchaosError, Result};
use crate::hilbert::{self, HilbertSpec};
use crate::linalg::{self, dagger, hermiticity_defect, kron, trace};
use crate::sparse::OpRepr;
use crate::{C64, CMat, CVec};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Cholesky, Norm, UPLO};

/// Dense-superoperator dimension guard: vectorization refuses d_total above this.
pub const VECTORIZE_GUARD: usize = 100;
/// Below this superoperator dimension the steady state is found by a full
/// eigendecomposition; above it by a constrained linear solve.
const EIG_STEADY_STATE_LIMIT: usize = 400;

/// Trace-one positive-semidefinite Hermitian state.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    data: CMat,
}

impl DensityMatrix {
    /// Validates trace (1e-10), Hermiticity (1e-12) and positivity
    /// (min eigenvalue ≥ -1e-8, via a shifted Cholesky probe).
    pub fn new(data: CMat) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(QchaosError::Dimension {
                expected: data.nrows(),
                actual: data.ncols(),
            });
        }
        let tr = trace(&data);
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(QchaosError::numeric(format!(
                "density matrix trace {tr} deviates from 1"
            )));
        }
        if hermiticity_defect(&data) > 1e-12 {
            return Err(QchaosError::numeric("density matrix is not Hermitian"));
        }
        let dm = DensityMatrix { data };
        if !dm.positivity_probe(1e-8) {
            return Err(QchaosError::numeric(
                "density matrix has an eigenvalue below -1e-8",
            ));
        }
        Ok(dm)
    }

    /// No invariant checks; for internal propagation states that are
    /// monitored separately.
    pub fn new_unchecked(data: CMat) -> Self {
        DensityMatrix { data }
    }

    pub fn from_pure(psi: &CVec) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(QchaosError::numeric("pure state is not normalized"));
        }
        let d = psi.len();
        let data = Array2::from_shape_fn((d, d), |(i, j)| psi[i] * psi[j].conj());
        Ok(DensityMatrix { data })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        let data = linalg::eye(d).mapv(|z| z / C64::new(d as f64, 0.0));
        DensityMatrix { data }
    }

    pub fn data(&self) -> &CMat {
        &self.data
    }

    pub fn into_data(self) -> CMat {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn trace(&self) -> C64 {
        trace(&self.data)
    }

    pub fn purity(&self) -> f64 {
        let sq = self.data.dot(&self.data);
        trace(&sq).re
    }

    pub fn expect(&self, op: &CMat) -> C64 {
        trace(&op.dot(&self.data))
    }

    /// True when all eigenvalues are ≥ -tol, checked by attempting a
    /// Cholesky factorization of ρ + tol·I.
    pub fn positivity_probe(&self, tol: f64) -> bool {
        let mut shifted = self.data.clone();
        let d = shifted.nrows();
        for i in 0..d {
            shifted[[i, i]] += C64::new(tol, 0.0);
        }
        shifted.cholesky(UPLO::Lower).is_ok()
    }
}

/// Hamiltonian plus weighted jump operators.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    hamiltonian: CMat,
    jumps: Vec<(CMat, f64)>,
    h_repr: OpRepr,
    jump_reprs: Vec<JumpCache>,
}

#[derive(Debug, Clone)]
struct JumpCache {
    op: OpRepr,
    op_dagger: OpRepr,
    /// L†L, Hermitian.
    dd: OpRepr,
    rate: f64,
}

impl LindbladGenerator {
    /// Hamiltonian must be Hermitian within 1e-12; rates nonnegative.
    pub fn new(hamiltonian: CMat, jumps: Vec<(CMat, f64)>) -> Result<Self> {
        let d = hamiltonian.nrows();
        if hamiltonian.ncols() != d {
            return Err(QchaosError::Dimension {
                expected: d,
                actual: hamiltonian.ncols(),
            });
        }
        if hermiticity_defect(&hamiltonian) > 1e-12 {
            return Err(QchaosError::domain("Hamiltonian is not Hermitian"));
        }
        for (op, rate) in &jumps {
            if op.nrows() != d || op.ncols() != d {
                return Err(QchaosError::Dimension {
                    expected: d,
                    actual: op.nrows(),
                });
            }
            if *rate < 0.0 || !rate.is_finite() {
                return Err(QchaosError::domain("jump rates must be finite and ≥ 0"));
            }
        }
        let h_repr = OpRepr::from_dense(&hamiltonian);
        let jump_reprs = jumps
            .iter()
            .map(|(op, rate)| {
                let ldag = dagger(op);
                let dd = ldag.dot(op);
                JumpCache {
                    op: OpRepr::from_dense(op),
                    op_dagger: OpRepr::from_dense(&ldag),
                    dd: OpRepr::from_dense(&dd),
                    rate: *rate,
                }
            })
            .collect();
        Ok(LindbladGenerator {
            hamiltonian,
            jumps,
            h_repr,
            jump_reprs,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[(CMat, f64)] {
        &self.jumps
    }
}

/// ADM Hamiltonian on the photon ⊗ spin space:
/// H = ω a†a + ω₀ Sz + (λ₋/√(2S))(aS₊ + a†S₋) + (λ₊/√(2S))(aS₋ + a†S₊).
pub fn build_adm_hamiltonian(params: &AdmParams, spec: &HilbertSpec) -> Result<CMat> {
    params.validate()?;
    let (a, adag) = hilbert::boson_operators(spec.photon_cutoff())?;
    let (sz, sp, sm) = hilbert::spin_operators(spec.spin_s())?;
    let scale = 1.0 / (2.0 * spec.spin_s()).sqrt();

    let number = adag.dot(&a);
    let mut h = spec.lift_photon(&number).mapv(|z| z * params.omega);
    h = h + spec.lift_spin(&sz).mapv(|z| z * params.omega0);
    let co = kron(&a, &sp) + kron(&adag, &sm);
    let counter = kron(&a, &sm) + kron(&adag, &sp);
    h = h + co.mapv(|z| z * (params.lambda_minus * scale));
    h = h + counter.mapv(|z| z * (params.lambda_plus * scale));
    Ok(h)
}

/// Full open-model generator: ADM Hamiltonian with photon loss at rate κ.
pub fn adm_generator(params: &AdmParams, spec: &HilbertSpec) -> Result<LindbladGenerator> {
    let h = build_adm_hamiltonian(params, spec)?;
    let (a, _) = hilbert::boson_operators(spec.photon_cutoff())?;
    let a_full = spec.lift_photon(&a);
    LindbladGenerator::new(h, vec![(a_full, params.kappa)])
}

/// Scratch space for the master-equation right-hand side.
struct RhsBuffers {
    z: CMat,
    u: CMat,
    v: CMat,
}

impl RhsBuffers {
    fn new(d: usize) -> Self {
        RhsBuffers {
            z: Array2::zeros((d, d)),
            u: Array2::zeros((d, d)),
            v: Array2::zeros((d, d)),
        }
    }
}

/// out = -i(Hρ - ρH) + Σ κ (2 (Lρ)L† - Dρ - ρD), D = L†L.
///
/// Every term is formed by explicit left/right products. Folding the right
/// products into conjugate transposes of left products is tempting for
/// Hermitian ρ but turned out to excite a spurious growing mode of the
/// floating-point map on strongly non-normal generators; the two-sided form
/// is the one that inherits the contractivity of the exact flow.
fn rhs_core(gen: &LindbladGenerator, rho: &CMat, out: &mut CMat, buf: &mut RhsBuffers) {
    let d = gen.dim();
    let i_unit = C64::new(0.0, 1.0);
    gen.h_repr.mul_dense(rho, &mut buf.z);
    gen.h_repr.mul_dense_right(rho, &mut buf.u);
    for r in 0..d {
        for c in 0..d {
            out[[r, c]] = -i_unit * (buf.z[[r, c]] - buf.u[[r, c]]);
        }
    }
    for jump in &gen.jump_reprs {
        if jump.rate == 0.0 {
            continue;
        }
        let k = C64::new(jump.rate, 0.0);
        // v = (Lρ)L†
        jump.op.mul_dense(rho, &mut buf.z);
        jump.op_dagger.mul_dense_right(&buf.z, &mut buf.v);
        // z = Dρ, u = ρD
        jump.dd.mul_dense(rho, &mut buf.z);
        jump.dd.mul_dense_right(rho, &mut buf.u);
        for r in 0..d {
            for c in 0..d {
                out[[r, c]] += k * (2.0 * buf.v[[r, c]] - buf.z[[r, c]] - buf.u[[r, c]]);
            }
        }
    }
}

/// Right-hand side -i[H,ρ] + Σ κ(2LρL† - {L†L, ρ}) with input validation.
pub fn lindblad_rhs(rho: &DensityMatrix, gen: &LindbladGenerator) -> Result<CMat> {
    if rho.dim() != gen.dim() {
        return Err(QchaosError::Dimension {
            expected: gen.dim(),
            actual: rho.dim(),
        });
    }
    let d = gen.dim();
    let mut out = Array2::zeros((d, d));
    let mut buf = RhsBuffers::new(d);
    rhs_core(gen, rho.data(), &mut out, &mut buf);
    Ok(out)
}

/// Propagation options for [`evolve`] and [`adjoint_evolve`].
#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub dt: f64,
    pub t_final: f64,
    /// Emit output every this many steps.
    pub output_every: usize,
    /// Positivity monitor threshold (min eigenvalue ≥ -tol).
    pub positivity_tol: f64,
    /// Run the Cholesky positivity probe every this many output events;
    /// 0 disables the monitor.
    pub positivity_check_every: usize,
}

impl EvolveOptions {
    /// Output cadence defaults to every 0.05 time units.
    pub fn new(dt: f64, t_final: f64) -> Self {
        EvolveOptions {
            dt,
            t_final,
            output_every: ((0.05 / dt).round() as usize).max(1),
            positivity_tol: 1e-6,
            positivity_check_every: 10,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dt <= 0.0 || self.t_final <= 0.0 || self.output_every == 0 {
            return Err(QchaosError::domain(
                "dt, t_final and output_every must be positive",
            ));
        }
        Ok(())
    }
}

/// Invariant drift observed along an evolution.
#[derive(Debug, Clone, Copy, Default)]
pub struct MonitorStats {
    pub max_trace_dev: f64,
    pub max_herm_defect: f64,
    pub positivity_checks: usize,
}

/// RK4 propagation of the master equation with a callback at output times.
///
/// The callback receives (t, ρ(t)); the initial state is emitted first.
/// Trace and Hermiticity are monitored at every output; positivity through
/// a shifted Cholesky probe at the configured cadence and on the final state.
pub fn propagate_with<F>(
    rho0: &DensityMatrix,
    gen: &LindbladGenerator,
    opts: &EvolveOptions,
    mut on_output: F,
) -> Result<(DensityMatrix, MonitorStats)>
where
    F: FnMut(f64, &CMat) -> Result<()>,
{
    opts.validate()?;
    if rho0.dim() != gen.dim() {
        return Err(QchaosError::Dimension {
            expected: gen.dim(),
            actual: rho0.dim(),
        });
    }
    let d = gen.dim();
    let dt = opts.dt;
    let n_steps = (opts.t_final / dt).round() as usize;
    let mut rho = rho0.data().clone();
    let mut buf = RhsBuffers::new(d);
    let mut k1 = Array2::zeros((d, d));
    let mut k2 = Array2::zeros((d, d));
    let mut k3 = Array2::zeros((d, d));
    let mut k4 = Array2::zeros((d, d));
    let mut stage = Array2::zeros((d, d));
    let mut monitors = MonitorStats::default();
    let mut outputs = 0usize;

    let check = |t: f64, rho: &CMat, outputs: &mut usize, monitors: &mut MonitorStats| -> Result<()> {
        let tr_dev = (trace(rho) - C64::new(1.0, 0.0)).norm();
        let herm = hermiticity_defect(rho);
        monitors.max_trace_dev = monitors.max_trace_dev.max(tr_dev);
        monitors.max_herm_defect = monitors.max_herm_defect.max(herm);
        if tr_dev > 1e-6 {
            return Err(QchaosError::Integration(format!(
                "trace deviation {tr_dev:.2e} at t = {t:.3}; reduce dt"
            )));
        }
        let check_now = opts.positivity_check_every > 0 && *outputs % opts.positivity_check_every == 0;
        if check_now {
            monitors.positivity_checks += 1;
            let dm = DensityMatrix::new_unchecked(rho.clone());
            if !dm.positivity_probe(opts.positivity_tol) {
                return Err(QchaosError::Integration(format!(
                    "positivity violation beyond -{:.0e} at t = {t:.3}; \
                     reduce dt or enlarge the photon cutoff",
                    opts.positivity_tol
                )));
            }
        }
        *outputs += 1;
        Ok(())
    };

    check(0.0, &rho, &mut outputs, &mut monitors)?;
    on_output(0.0, &rho)?;

    for step in 1..=n_steps {
        rhs_core(gen, &rho, &mut k1, &mut buf);
        stage_assign(&mut stage, &rho, &k1, 0.5 * dt);
        rhs_core(gen, &stage, &mut k2, &mut buf);
        stage_assign(&mut stage, &rho, &k2, 0.5 * dt);
        rhs_core(gen, &stage, &mut k3, &mut buf);
        stage_assign(&mut stage, &rho, &k3, dt);
        rhs_core(gen, &stage, &mut k4, &mut buf);

        let w = dt / 6.0;
        ndarray::Zip::from(&mut rho)
            .and(&k1)
            .and(&k2)
            .and(&k3)
            .and(&k4)
            .for_each(|r, a, b, c, e| {
                *r += w * (*a + 2.0 * *b + 2.0 * *c + *e);
            });

        if step % opts.output_every == 0 || step == n_steps {
            let t = step as f64 * dt;
            if !rho.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(QchaosError::TrajectoryEscape { t });
            }
            check(t, &rho, &mut outputs, &mut monitors)?;
            on_output(t, &rho)?;
        }
    }
    let final_dm = DensityMatrix::new_unchecked(rho);
    if opts.positivity_check_every > 0 && !final_dm.positivity_probe(opts.positivity_tol) {
        return Err(QchaosError::Integration(
            "positivity violation in the final state".into(),
        ));
    }
    Ok((final_dm, monitors))
}

fn stage_assign(stage: &mut CMat, base: &CMat, k: &CMat, h: f64) {
    ndarray::Zip::from(stage).and(base).and(k).for_each(|s, b, kk| {
        *s = *b + h * *kk;
    });
}

/// Expectation-value time series from Schrödinger-picture propagation.
#[derive(Debug, Clone)]
pub struct EvolutionSeries {
    pub times: Vec<f64>,
    /// expectations[k][i] = ⟨observers[k]⟩ at times[i].
    pub expectations: Vec<Vec<C64>>,
    pub final_state: DensityMatrix,
    pub monitors: MonitorStats,
}

/// Evolve ρ and record ⟨O⟩ = Tr(Oρ) for each observer at output times.
pub fn evolve(
    rho0: &DensityMatrix,
    gen: &LindbladGenerator,
    opts: &EvolveOptions,
    observers: &[CMat],
) -> Result<EvolutionSeries> {
    for o in observers {
        if o.nrows() != gen.dim() || o.ncols() != gen.dim() {
            return Err(QchaosError::Dimension {
                expected: gen.dim(),
                actual: o.nrows(),
            });
        }
    }
    let reprs: Vec<OpRepr> = observers.iter().map(OpRepr::from_dense).collect();
    let mut times = Vec::new();
    let mut expectations: Vec<Vec<C64>> = vec![Vec::new(); observers.len()];
    let (final_state, monitors) = propagate_with(rho0, gen, opts, |t, rho| {
        times.push(t);
        for (series, repr) in expectations.iter_mut().zip(reprs.iter()) {
            series.push(repr.trace_mul(rho));
        }
        Ok(())
    })?;
    Ok(EvolutionSeries {
        times,
        expectations,
        final_state,
        monitors,
    })
}

/// [`evolve`] with automatic dt halving when the positivity monitor trips.
pub fn evolve_adaptive(
    rho0: &DensityMatrix,
    gen: &LindbladGenerator,
    opts: &EvolveOptions,
    observers: &[CMat],
    max_halvings: usize,
) -> Result<(EvolutionSeries, f64)> {
    let mut attempt = opts.clone();
    for _ in 0..=max_halvings {
        match evolve(rho0, gen, &attempt, observers) {
            Ok(series) => return Ok((series, attempt.dt)),
            Err(QchaosError::Integration(_)) => {
                attempt.dt *= 0.5;
                attempt.output_every *= 2;
            }
            Err(e) => return Err(e),
        }
    }
    Err(QchaosError::Integration(format!(
        "positivity monitor still failing after {max_halvings} dt halvings"
    )))
}

/// Heisenberg-picture propagation dW/dt = i[H,W] + Σ κ(2L†WL - {L†L, W})
/// with a callback at output times.
///
/// Works on arbitrary (not necessarily Hermitian) operators, so products are
/// formed densely; intended for small dimensions and correlator evaluation.
pub fn adjoint_evolve_with<F>(
    w0: &CMat,
    gen: &LindbladGenerator,
    opts: &EvolveOptions,
    mut on_output: F,
) -> Result<CMat>
where
    F: FnMut(f64, &CMat) -> Result<()>,
{
    opts.validate()?;
    let d = gen.dim();
    if w0.nrows() != d || w0.ncols() != d {
        return Err(QchaosError::Dimension {
            expected: d,
            actual: w0.nrows(),
        });
    }
    let h = &gen.hamiltonian;
    let jumps: Vec<(CMat, CMat, CMat, f64)> = gen
        .jumps
        .iter()
        .map(|(l, rate)| {
            let ld = dagger(l);
            let dd = ld.dot(l);
            (l.clone(), ld, dd, *rate)
        })
        .collect();
    let rhs = |w: &CMat| -> CMat {
        let i_unit = C64::new(0.0, 1.0);
        let mut out = (h.dot(w) - w.dot(h)).mapv(|z| z * i_unit);
        for (l, ld, dd, rate) in &jumps {
            let sandwich = ld.dot(w).dot(l);
            let anti = dd.dot(w) + w.dot(dd);
            out = out + (sandwich.mapv(|z| 2.0 * z) - anti).mapv(|z| z * C64::new(*rate, 0.0));
        }
        out
    };

    let dt = opts.dt;
    let n_steps = (opts.t_final / dt).round() as usize;
    let mut w = w0.clone();
    on_output(0.0, &w)?;
    for step in 1..=n_steps {
        let k1 = rhs(&w);
        let k2 = rhs(&(&w + &k1.mapv(|z| z * C64::new(0.5 * dt, 0.0))));
        let k3 = rhs(&(&w + &k2.mapv(|z| z * C64::new(0.5 * dt, 0.0))));
        let k4 = rhs(&(&w + &k3.mapv(|z| z * C64::new(dt, 0.0))));
        let incr =
            (&k1 + &k2.mapv(|z| 2.0 * z) + &k3.mapv(|z| 2.0 * z) + &k4).mapv(|z| z * C64::new(dt / 6.0, 0.0));
        w = &w + &incr;
        if step % opts.output_every == 0 || step == n_steps {
            let t = step as f64 * dt;
            if !w.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(QchaosError::TrajectoryEscape { t });
            }
            on_output(t, &w)?;
        }
    }
    Ok(w)
}

/// Operator time series in the Heisenberg picture.
pub fn adjoint_evolve(
    w0: &CMat,
    gen: &LindbladGenerator,
    opts: &EvolveOptions,
) -> Result<Vec<(f64, CMat)>> {
    let mut series = Vec::new();
    adjoint_evolve_with(w0, gen, opts, |t, w| {
        series.push((t, w.clone()));
        Ok(())
    })?;
    Ok(series)
}

/// Column-stacked superoperator matrix M with vec(L[ρ]) = M vec(ρ):
/// M = -i(I⊗H - Hᵀ⊗I) + Σ κ(2 L*⊗L - I⊗L†L - (L†L)ᵀ⊗I).
pub fn vectorize_generator(gen: &LindbladGenerator) -> Result<CMat> {
    let d = gen.dim();
    if d > VECTORIZE_GUARD {
        return Err(QchaosError::Guard(format!(
            "dense vectorization refused for d = {d} > {VECTORIZE_GUARD}"
        )));
    }
    let id = linalg::eye(d);
    let h = &gen.hamiltonian;
    let i_unit = C64::new(0.0, 1.0);
    let mut m = (kron(&id, h) - kron(&h.t().to_owned(), &id)).mapv(|z| -i_unit * z);
    for (l, rate) in &gen.jumps {
        let lconj = l.mapv(|z| z.conj());
        let ld = dagger(l);
        let dd = ld.dot(l);
        let term = kron(&lconj, l).mapv(|z| 2.0 * z) - kron(&id, &dd) - kron(&dd.t().to_owned(), &id);
        m = m + term.mapv(|z| z * C64::new(*rate, 0.0));
    }
    Ok(m)
}

/// Exact propagation ρ(t) = unvec(e^{Mt} vec(ρ₀)); the correctness oracle
/// for [`evolve`] at small dimension.
pub fn exact_evolve(rho0: &DensityMatrix, superop: &CMat, t: f64) -> Result<DensityMatrix> {
    let n = superop.nrows();
    let d = rho0.dim();
    if n != d * d {
        return Err(QchaosError::Dimension {
            expected: d * d,
            actual: n,
        });
    }
    let propagator = linalg::expm(&superop.mapv(|z| z * C64::new(t, 0.0)))?;
    let v = propagator.dot(&linalg::vec_col(rho0.data()));
    Ok(DensityMatrix::new_unchecked(linalg::unvec_col(&v, d)?))
}

/// Steady state from the null space of the vectorized generator.
///
/// Small problems use a full eigendecomposition, which also detects null
/// space degeneracy within tolerance 1e-10. Larger problems solve the
/// trace-constrained linear system and cross-check uniqueness with a second
/// constrained solve. The result is Hermitized, trace-normalized, and must
/// satisfy ‖M vec(ρ_ss)‖ < 1e-8.
pub fn steady_state(superop: &CMat) -> Result<DensityMatrix> {
    steady_state_with(superop, true)
}

/// [`steady_state`] with the large-dimension uniqueness probe optional.
///
/// Skipping the probe saves two dense LU factorizations per call; only do so
/// when zero-mode uniqueness is established separately (e.g. a spectral-gap
/// check over the ensemble).
pub fn steady_state_with(superop: &CMat, check_uniqueness: bool) -> Result<DensityMatrix> {
    let n = superop.nrows();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(QchaosError::Dimension { expected: d * d, actual: n });
    }

    let v = if n <= EIG_STEADY_STATE_LIMIT {
        let (vals, vecs) = linalg::complex_eig(superop)?;
        let scale = vals.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
        let candidates: Vec<usize> = (0..n).filter(|k| vals[*k].norm() < 1e-10 * scale).collect();
        if candidates.is_empty() {
            return Err(QchaosError::numeric("no zero eigenvalue found"));
        }
        if candidates.len() > 1 {
            return Err(QchaosError::SteadyStateMultiplicity(candidates.len()));
        }
        vecs.column(candidates[0]).to_owned()
    } else {
        if check_uniqueness && linalg::steady_state_candidates_differ(superop, d)? {
            return Err(QchaosError::SteadyStateMultiplicity(2));
        }
        let (v, _res) = linalg::null_vector_trace_row(superop, d, 0)?;
        v
    };

    let raw = linalg::unvec_col(&v, d)?;
    let herm = linalg::hermitize(&raw);
    let tr = trace(&herm);
    if tr.norm() < 1e-12 {
        return Err(QchaosError::numeric("steady-state candidate has zero trace"));
    }
    let rho = herm.mapv(|z| z / tr);
    let residual = superop.dot(&linalg::vec_col(&rho)).norm_l2();
    if residual > 1e-8 {
        return Err(QchaosError::numeric(format!(
            "steady-state residual {residual:.2e} exceeds 1e-8"
        )));
    }
    Ok(DensityMatrix::new_unchecked(rho))
}

/// RK4 Schrödinger propagation of a pure state under a Hamiltonian, with a
/// callback at output times. Exact shortcut for closed-system (κ = 0)
/// dynamics at a fraction of the density-matrix cost.
pub fn schroedinger_evolve_with<F>(
    psi0: &CVec,
    hamiltonian: &CMat,
    opts: &EvolveOptions,
    mut on_output: F,
) -> Result<CVec>
where
    F: FnMut(f64, &CVec) -> Result<()>,
{
    opts.validate()?;
    let d = hamiltonian.nrows();
    if psi0.len() != d {
        return Err(QchaosError::Dimension {
            expected: d,
            actual: psi0.len(),
        });
    }
    let h_repr = OpRepr::from_dense(hamiltonian);
    let minus_i = C64::new(0.0, -1.0);
    let mul = |psi: &CVec| -> CVec { h_repr.mul_vec(psi).mapv(|z| minus_i * z) };

    let dt = opts.dt;
    let n_steps = (opts.t_final / dt).round() as usize;
    let mut psi = psi0.clone();
    on_output(0.0, &psi)?;
    for step in 1..=n_steps {
        let k1 = mul(&psi);
        let k2 = mul(&(&psi + &k1.mapv(|z| z * C64::new(0.5 * dt, 0.0))));
        let k3 = mul(&(&psi + &k2.mapv(|z| z * C64::new(0.5 * dt, 0.0))));
        let k4 = mul(&(&psi + &k3.mapv(|z| z * C64::new(dt, 0.0))));
        let incr = (&k1 + &k2.mapv(|z| 2.0 * z) + &k3.mapv(|z| 2.0 * z) + &k4)
            .mapv(|z| z * C64::new(dt / 6.0, 0.0));
        psi = &psi + &incr;
        if step % opts.output_every == 0 || step == n_steps {
            let t = step as f64 * dt;
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            if !norm.is_finite() {
                return Err(QchaosError::TrajectoryEscape { t });
            }
            if (norm - 1.0).abs() > 1e-6 {
                return Err(QchaosError::Integration(format!(
                    "state norm drift {:.2e} at t = {t:.3}; reduce dt",
                    (norm - 1.0).abs()
                )));
            }
            on_output(t, &psi)?;
        }
    }
    Ok(psi)
}

/// Product states (spin coherent ⊗ photon vacuum) mirroring a classical
/// Bloch-point ensemble, as state vectors.
pub fn product_ensemble_states(spec: &HilbertSpec, bloch_points: &[(f64, f64)]) -> Result<Vec<CVec>> {
    let vacuum = {
        let mut v: CVec = Array1::zeros(spec.d_photon());
        v[0] = C64::new(1.0, 0.0);
        v
    };
    bloch_points
        .iter()
        .map(|(theta, phi)| {
            let chi = hilbert::spin_coherent_state(*theta, *phi, spec.spin_s())?;
            spec.product_state(&vacuum, &chi)
        })
        .collect()
}

/// Product states (spin coherent ⊗ photon vacuum) mirroring a classical
/// Bloch-point ensemble.
pub fn product_ensemble(spec: &HilbertSpec, bloch_points: &[(f64, f64)]) -> Result<Vec<DensityMatrix>> {
    let vacuum = {
        let mut v: CVec = Array1::zeros(spec.d_photon());
        v[0] = C64::new(1.0, 0.0);
        v
    };
    bloch_points
        .iter()
        .map(|(theta, phi)| {
            let chi = hilbert::spin_coherent_state(*theta, *phi, spec.spin_s())?;
            let psi = spec.product_state(&vacuum, &chi)?;
            DensityMatrix::from_pure(&psi)
        })
        .collect()
}
