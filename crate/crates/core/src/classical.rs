//! Mean-field dynamics of the open anisotropic Dicke model.
//!
//! State variables are the scaled photon quadratures (x, p) with
//! α = (x + ip)/√2 and the unit Bloch vector (sx, sy, sz). The equations of
//! motion in complex form are
//!
//! ```text
//! α̇  = -(κ + iω) α - i (λ₋ s₋ + λ₊ s₊)
//! ṡ₊ = iω₀ s₊ - i s_z (λ₋ α* + λ₊ α)
//! ṡ_z = -(i/2) [ λ₋ (α s₊ - α* s₋) + λ₊ (α* s₊ - α s₋) ]
//! ```
//!
//! with s± = sx ± i sy. They conserve sx² + sy² + sz² exactly. Lyapunov
//! exponents use the Benettin tangent-vector method: the linearized flow is
//! co-integrated with the trajectory and periodically renormalized.

use crate::error::{QchaosError, Result};
use crate::linalg::{tail_average, window_slope};
use crate::C64;
use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_FINAL: f64 = 200.0;
pub const DEFAULT_RENORM_EVERY: usize = 10;
pub const DEFAULT_ENSEMBLE: usize = 20;
pub const TAIL_FRACTION: f64 = 0.2;
const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Couplings and rates of the open anisotropic Dicke model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmParams {
    pub omega: f64,
    pub omega0: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub kappa: f64,
}

impl AdmParams {
    pub fn new(omega: f64, omega0: f64, lambda_minus: f64, lambda_plus: f64, kappa: f64) -> Result<Self> {
        let p = AdmParams {
            omega,
            omega0,
            lambda_minus,
            lambda_plus,
            kappa,
        };
        p.validate()?;
        Ok(p)
    }

    /// Dicke limit λ₋ = λ₊ = λ at unit frequencies.
    pub fn dicke(lambda: f64, kappa: f64) -> Self {
        AdmParams {
            omega: 1.0,
            omega0: 1.0,
            lambda_minus: lambda,
            lambda_plus: lambda,
            kappa,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.omega, self.omega0, self.lambda_minus, self.lambda_plus, self.kappa];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(QchaosError::domain("model parameters must be finite"));
        }
        if self.kappa < 0.0 {
            return Err(QchaosError::domain("kappa must be ≥ 0"));
        }
        Ok(())
    }
}

/// Phase-space point: photon quadratures plus unit Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub x: f64,
    pub p: f64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl ClassicalState {
    /// Bloch point (θ, φ) with the photon field at the vacuum.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        ClassicalState {
            x: 0.0,
            p: 0.0,
            sx: theta.sin() * phi.cos(),
            sy: theta.sin() * phi.sin(),
            sz: theta.cos(),
        }
    }

    pub fn alpha(&self) -> C64 {
        C64::new(self.x, self.p) / SQRT2
    }

    /// Scaled photon number n = |α|².
    pub fn photon_number(&self) -> f64 {
        0.5 * (self.x * self.x + self.p * self.p)
    }

    pub fn bloch_norm_sq(&self) -> f64 {
        self.sx * self.sx + self.sy * self.sy + self.sz * self.sz
    }

    pub fn is_finite(&self) -> bool {
        [self.x, self.p, self.sx, self.sy, self.sz].iter().all(|v| v.is_finite())
    }

    fn as_array(&self) -> [f64; 5] {
        [self.x, self.p, self.sx, self.sy, self.sz]
    }
}

#[inline]
fn rhs_raw(s: &ClassicalState, pr: &AdmParams) -> ClassicalState {
    let lm = pr.lambda_minus;
    let lp = pr.lambda_plus;
    let sum = lm + lp;
    let diff = lp - lm;
    ClassicalState {
        x: -pr.kappa * s.x + pr.omega * s.p + SQRT2 * diff * s.sy,
        p: -pr.kappa * s.p - pr.omega * s.x - SQRT2 * sum * s.sx,
        sx: -pr.omega0 * s.sy + diff / SQRT2 * s.sz * s.p,
        sy: pr.omega0 * s.sx - sum / SQRT2 * s.sz * s.x,
        sz: (sum * s.x * s.sy - diff * s.p * s.sx) / SQRT2,
    }
}

/// Time derivative of the mean-field state.
pub fn eom_rhs(state: &ClassicalState, params: &AdmParams) -> Result<ClassicalState> {
    if !state.is_finite() {
        return Err(QchaosError::numeric("state contains non-finite components"));
    }
    params.validate()?;
    Ok(rhs_raw(state, params))
}

/// Jacobian of the equations of motion at `state`, ordered (x, p, sx, sy, sz).
pub fn jacobian(state: &ClassicalState, params: &AdmParams) -> Array2<f64> {
    let lm = params.lambda_minus;
    let lp = params.lambda_plus;
    let sum = lm + lp;
    let diff = lp - lm;
    let k = params.kappa;
    let w = params.omega;
    let w0 = params.omega0;
    let s = state;
    ndarray::array![
        [-k, w, 0.0, SQRT2 * diff, 0.0],
        [-w, -k, -SQRT2 * sum, 0.0, 0.0],
        [0.0, diff / SQRT2 * s.sz, 0.0, -w0, diff / SQRT2 * s.p],
        [-sum / SQRT2 * s.sz, 0.0, w0, 0.0, -sum / SQRT2 * s.x],
        [sum / SQRT2 * s.sy, -diff / SQRT2 * s.sx, -diff / SQRT2 * s.p, sum / SQRT2 * s.x, 0.0],
    ]
}

#[inline]
fn add_scaled(a: &ClassicalState, b: &ClassicalState, h: f64) -> ClassicalState {
    ClassicalState {
        x: a.x + h * b.x,
        p: a.p + h * b.p,
        sx: a.sx + h * b.sx,
        sy: a.sy + h * b.sy,
        sz: a.sz + h * b.sz,
    }
}

#[inline]
fn rk4_step(s: &ClassicalState, pr: &AdmParams, dt: f64) -> ClassicalState {
    let k1 = rhs_raw(s, pr);
    let k2 = rhs_raw(&add_scaled(s, &k1, 0.5 * dt), pr);
    let k3 = rhs_raw(&add_scaled(s, &k2, 0.5 * dt), pr);
    let k4 = rhs_raw(&add_scaled(s, &k3, dt), pr);
    ClassicalState {
        x: s.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        p: s.p + dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p),
        sx: s.sx + dt / 6.0 * (k1.sx + 2.0 * k2.sx + 2.0 * k3.sx + k4.sx),
        sy: s.sy + dt / 6.0 * (k1.sy + 2.0 * k2.sy + 2.0 * k3.sy + k4.sy),
        sz: s.sz + dt / 6.0 * (k1.sz + 2.0 * k2.sz + 2.0 * k3.sz + k4.sz),
    }
}

/// Jacobian-vector product without forming the matrix.
#[inline]
fn jac_mul(s: &ClassicalState, pr: &AdmParams, v: &[f64; 5]) -> [f64; 5] {
    let lm = pr.lambda_minus;
    let lp = pr.lambda_plus;
    let sum = lm + lp;
    let diff = lp - lm;
    [
        -pr.kappa * v[0] + pr.omega * v[1] + SQRT2 * diff * v[3],
        -pr.omega * v[0] - pr.kappa * v[1] - SQRT2 * sum * v[2],
        diff / SQRT2 * (s.sz * v[1] + s.p * v[4]) - pr.omega0 * v[3],
        -sum / SQRT2 * (s.sz * v[0] + s.x * v[4]) + pr.omega0 * v[2],
        sum / SQRT2 * (s.sy * v[0] + s.x * v[3]) - diff / SQRT2 * (s.sx * v[1] + s.p * v[2]),
    ]
}

/// An integrated trajectory sampled at every step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ClassicalState>,
}

/// Fixed-step RK4 integration. Fails if the Bloch norm drifts beyond 1e-6
/// or the state leaves the finite domain.
pub fn integrate(state0: &ClassicalState, params: &AdmParams, dt: f64, t_final: f64) -> Result<Trajectory> {
    if dt <= 0.0 || t_final <= 0.0 {
        return Err(QchaosError::domain("dt and t_final must be positive"));
    }
    params.validate()?;
    let n_steps = (t_final / dt).round() as usize;
    let mut s = *state0;
    let norm0 = s.bloch_norm_sq();
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    states.push(s);
    for step in 1..=n_steps {
        s = rk4_step(&s, params, dt);
        let t = step as f64 * dt;
        if !s.is_finite() {
            return Err(QchaosError::TrajectoryEscape { t });
        }
        let drift = (s.bloch_norm_sq() - norm0).abs();
        if drift > 1e-6 {
            return Err(QchaosError::Integration(format!(
                "Bloch norm drift {drift:.2e} at t = {t:.3} exceeds 1e-6"
            )));
        }
        times.push(t);
        states.push(s);
    }
    Ok(Trajectory { times, states })
}

/// Finite-time Lyapunov data: Λ(t) = (1/t) Σ ln(growth factors).
#[derive(Debug, Clone)]
pub struct LyapunovSeries {
    pub times: Vec<f64>,
    pub lambda_t: Vec<f64>,
    /// Tail average of lambda_t over the final 20% of the run.
    pub lambda_ss: f64,
    pub ensemble_size: usize,
}

impl LyapunovSeries {
    fn from_series(times: Vec<f64>, lambda_t: Vec<f64>, ensemble_size: usize) -> Self {
        let lambda_ss = tail_average(&lambda_t, TAIL_FRACTION);
        LyapunovSeries {
            times,
            lambda_t,
            lambda_ss,
            ensemble_size,
        }
    }
}

/// Benettin largest-Lyapunov estimator for a five-dimensional flow given by
/// `rhs` and its Jacobian-vector product `jmul` (evaluated at the same
/// phase-space point as the flow stages).
///
/// Requires at least 100 renormalization events. The raw (possibly negative)
/// exponent is preserved; map displays clamp at zero separately.
pub fn benettin<F, J>(
    y0: [f64; 5],
    rhs: F,
    jmul: J,
    dt: f64,
    t_final: f64,
    renorm_every: usize,
) -> Result<LyapunovSeries>
where
    F: Fn(&[f64; 5]) -> [f64; 5],
    J: Fn(&[f64; 5], &[f64; 5]) -> [f64; 5],
{
    if dt <= 0.0 || t_final <= 0.0 || renorm_every == 0 {
        return Err(QchaosError::domain("dt, t_final and renorm_every must be positive"));
    }
    let n_steps = (t_final / dt).round() as usize;
    if n_steps / renorm_every < 100 {
        return Err(QchaosError::domain(
            "t_final too short: need at least 100 renormalizations",
        ));
    }

    let mut y = y0;
    let mut v = [1.0f64, 1.0, 1.0, 1.0, 1.0].map(|x| x / 5.0f64.sqrt());
    let mut log_acc = 0.0f64;
    let n_records = n_steps / renorm_every;
    let mut times = Vec::with_capacity(n_records);
    let mut lambda_t = Vec::with_capacity(n_records);

    for step in 1..=n_steps {
        // RK4 on the combined flow; tangent stages use the Jacobian at the
        // matching trajectory stage points.
        let k1 = rhs(&y);
        let q1 = jmul(&y, &v);
        let y2 = axpy(&y, &k1, 0.5 * dt);
        let v2 = axpy(&v, &q1, 0.5 * dt);
        let k2 = rhs(&y2);
        let q2 = jmul(&y2, &v2);
        let y3 = axpy(&y, &k2, 0.5 * dt);
        let v3 = axpy(&v, &q2, 0.5 * dt);
        let k3 = rhs(&y3);
        let q3 = jmul(&y3, &v3);
        let y4 = axpy(&y, &k3, dt);
        let v4 = axpy(&v, &q3, dt);
        let k4 = rhs(&y4);
        let q4 = jmul(&y4, &v4);

        for i in 0..5 {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            v[i] += dt / 6.0 * (q1[i] + 2.0 * q2[i] + 2.0 * q3[i] + q4[i]);
        }

        let t = step as f64 * dt;
        if y.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(QchaosError::TrajectoryEscape { t });
        }
        if step % renorm_every == 0 {
            let g = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            log_acc += g.ln();
            for x in v.iter_mut() {
                *x /= g;
            }
            times.push(t);
            lambda_t.push(log_acc / t);
        }
    }
    Ok(LyapunovSeries::from_series(times, lambda_t, 1))
}

/// Largest Lyapunov exponent along one model trajectory.
pub fn lyapunov(
    state0: &ClassicalState,
    params: &AdmParams,
    dt: f64,
    t_final: f64,
    renorm_every: usize,
) -> Result<LyapunovSeries> {
    params.validate()?;
    if !state0.is_finite() {
        return Err(QchaosError::numeric("initial state contains non-finite components"));
    }
    let pr = *params;
    benettin(
        state0.as_array(),
        move |y| {
            let s = ClassicalState { x: y[0], p: y[1], sx: y[2], sy: y[3], sz: y[4] };
            rhs_raw(&s, &pr).as_array()
        },
        move |y, v| {
            let s = ClassicalState { x: y[0], p: y[1], sx: y[2], sy: y[3], sz: y[4] };
            jac_mul(&s, &pr, v)
        },
        dt,
        t_final,
        renorm_every,
    )
}

fn axpy(a: &[f64; 5], b: &[f64; 5], h: f64) -> [f64; 5] {
    [
        a[0] + h * b[0],
        a[1] + h * b[1],
        a[2] + h * b[2],
        a[3] + h * b[3],
        a[4] + h * b[4],
    ]
}

/// Ensemble of initial phase-space points: Bloch vectors uniform on the
/// sphere, photon field at the vacuum (α = 0).
#[derive(Debug, Clone)]
pub struct InitialEnsemble {
    points: Vec<(f64, f64)>,
}

impl InitialEnsemble {
    pub fn bloch_uniform(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..n)
            .map(|_| {
                let z: f64 = rng.random_range(-1.0..1.0);
                let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                (z.acos(), phi)
            })
            .collect();
        InitialEnsemble { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// (θ, φ) Bloch angles; the quantum ensemble mirrors these points.
    pub fn bloch_points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn states(&self) -> Vec<ClassicalState> {
        self.points
            .iter()
            .map(|(theta, phi)| ClassicalState::from_bloch(*theta, *phi))
            .collect()
    }
}

/// Ensemble-averaged finite-time Lyapunov exponent.
#[derive(Debug, Clone)]
pub struct FiniteTimeLyapunov {
    pub series: LyapunovSeries,
    /// Average expansion rate over the requested window.
    pub window_average: f64,
    pub window: (f64, f64),
    pub failed_members: usize,
}

/// Pointwise ensemble mean of Λ(t) plus the window-averaged exponent over
/// `window`. Members whose integration fails are excluded and counted.
pub fn finite_time_lyapunov_ensemble(
    params: &AdmParams,
    ensemble: &InitialEnsemble,
    dt: f64,
    t_final: f64,
    renorm_every: usize,
    window: (f64, f64),
) -> Result<FiniteTimeLyapunov> {
    if ensemble.is_empty() {
        return Err(QchaosError::domain("ensemble must be nonempty"));
    }
    let states = ensemble.states();
    let results: Vec<Result<LyapunovSeries>> = states
        .par_iter()
        .map(|s0| lyapunov(s0, params, dt, t_final, renorm_every))
        .collect();

    let mut ok: Vec<&LyapunovSeries> = Vec::new();
    let mut failed = 0usize;
    for r in &results {
        match r {
            Ok(series) => ok.push(series),
            Err(_) => failed += 1,
        }
    }
    if ok.is_empty() {
        return Err(QchaosError::Integration(
            "every ensemble member failed to integrate".into(),
        ));
    }
    let times = ok[0].times.clone();
    let n_pts = times.len();
    let mut mean = vec![0.0f64; n_pts];
    for series in &ok {
        for (m, l) in mean.iter_mut().zip(series.lambda_t.iter()) {
            *m += l;
        }
    }
    for m in mean.iter_mut() {
        *m /= ok.len() as f64;
    }
    let series = LyapunovSeries::from_series(times, mean, ok.len());
    let window_average = window_averaged_exponent(&series, window)?;
    Ok(FiniteTimeLyapunov {
        series,
        window_average,
        window,
        failed_members: failed,
    })
}

/// Average of the instantaneous expansion rate over [t_lo, t_hi], recovered
/// from the cumulative Λ(t) as (Λ(t_hi)·t_hi - Λ(t_lo)·t_lo)/(t_hi - t_lo).
pub fn window_averaged_exponent(series: &LyapunovSeries, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    if hi <= lo {
        return Err(QchaosError::domain("window must satisfy t_hi > t_lo"));
    }
    let acc_at = |t: f64| -> Option<f64> {
        if t <= 0.0 {
            return Some(0.0);
        }
        let idx = series
            .times
            .iter()
            .position(|tt| (*tt - t).abs() < 1e-9)
            .or_else(|| series.times.iter().position(|tt| *tt >= t))?;
        Some(series.lambda_t[idx] * series.times[idx])
    };
    let a_hi = acc_at(hi).ok_or_else(|| QchaosError::domain("window exceeds series range"))?;
    let a_lo = acc_at(lo).ok_or_else(|| QchaosError::domain("window exceeds series range"))?;
    Ok((a_hi - a_lo) / (hi - lo))
}

/// Least-squares slope of an observable series over a time window.
pub fn series_slope(times: &[f64], values: &[f64], window: (f64, f64)) -> Option<f64> {
    window_slope(times, values, window.0, window.1)
}

/// Options for [`phase_scan`].
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub dt: f64,
    pub t_final: f64,
    pub renorm_every: usize,
    pub ensemble_size: usize,
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            dt: DEFAULT_DT,
            t_final: DEFAULT_T_FINAL,
            renorm_every: DEFAULT_RENORM_EVERY,
            ensemble_size: DEFAULT_ENSEMBLE,
            seed: 1,
        }
    }
}

/// Λ_ss over a (λ₋, λ₊) grid.
#[derive(Debug, Clone)]
pub struct PhaseScan {
    pub lambda_minus: Vec<f64>,
    pub lambda_plus: Vec<f64>,
    /// Row-major [i_minus][i_plus] ensemble-averaged Λ_ss; NaN where every
    /// member failed.
    pub lambda_ss: Vec<f64>,
    pub ensemble_size: usize,
    /// (i_minus, i_plus, message) for cells with at least one failed member.
    pub failures: Vec<(usize, usize, String)>,
}

/// Ensemble-averaged Λ_ss on a coupling grid. Cells are independent and run
/// in parallel; a fixed seed makes the scan reproducible bit-for-bit.
pub fn phase_scan(
    grid_minus: &[f64],
    grid_plus: &[f64],
    base: &AdmParams,
    cfg: &ScanConfig,
) -> Result<PhaseScan> {
    if grid_minus.is_empty() || grid_plus.is_empty() {
        return Err(QchaosError::domain("scan grid must be nonempty"));
    }
    let ensemble = InitialEnsemble::bloch_uniform(cfg.ensemble_size, cfg.seed);
    let states = ensemble.states();
    let cells: Vec<(usize, usize)> = (0..grid_minus.len())
        .flat_map(|i| (0..grid_plus.len()).map(move |j| (i, j)))
        .collect();

    let computed: Vec<(f64, Option<String>)> = cells
        .par_iter()
        .map(|(i, j)| {
            let params = AdmParams {
                lambda_minus: grid_minus[*i],
                lambda_plus: grid_plus[*j],
                ..*base
            };
            let mut acc = 0.0f64;
            let mut n_ok = 0usize;
            let mut err_msg = None;
            for s0 in &states {
                match lyapunov(s0, &params, cfg.dt, cfg.t_final, cfg.renorm_every) {
                    Ok(series) => {
                        acc += series.lambda_ss;
                        n_ok += 1;
                    }
                    Err(e) => err_msg = Some(e.to_string()),
                }
            }
            if n_ok == 0 {
                (f64::NAN, err_msg)
            } else {
                (acc / n_ok as f64, err_msg)
            }
        })
        .collect();

    let mut lambda_ss = vec![0.0f64; cells.len()];
    let mut failures = Vec::new();
    for ((i, j), (val, err)) in cells.iter().zip(computed.into_iter()) {
        lambda_ss[i * grid_plus.len() + j] = val;
        if let Some(msg) = err {
            failures.push((*i, *j, msg));
        }
    }
    Ok(PhaseScan {
        lambda_minus: grid_minus.to_vec(),
        lambda_plus: grid_plus.to_vec(),
        lambda_ss,
        ensemble_size: cfg.ensemble_size,
        failures,
    })
}
