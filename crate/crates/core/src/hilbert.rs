//! Operator algebra for a collective spin of magnitude S tensored with a
//! photon mode truncated at `n_max` excitations.
//!
//! Basis convention, used everywhere in this crate: the full space is
//! photon ⊗ spin with the Fock index major, i.e. basis state
//! `|n⟩ ⊗ |S, m⟩` has index `n · d_spin + idx(m)` where `idx(m)` runs over
//! m = S, S-1, …, -S. Full-space operators are Kronecker products
//! `photon_op ⊗ spin_op`.

use crate::error::{QchaosError, Result};
use crate::linalg::{self, kron};
use crate::{C64, CMat, CVec};
use ndarray::{Array1, Array2};

/// Truncated spin ⊗ photon space: spin magnitude S and photon cutoff n_max.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertSpec {
    two_s: u32,
    n_max: usize,
}

impl HilbertSpec {
    /// `spin_s` must be a positive multiple of 1/2, `photon_cutoff ≥ 1`.
    pub fn new(spin_s: f64, photon_cutoff: usize) -> Result<Self> {
        let two_s = 2.0 * spin_s;
        if !(two_s.fract().abs() < 1e-9) || spin_s < 0.5 || !spin_s.is_finite() {
            return Err(QchaosError::domain(format!(
                "spin_s must be a half-integer ≥ 1/2, got {spin_s}"
            )));
        }
        if photon_cutoff < 1 {
            return Err(QchaosError::domain("photon_cutoff must be ≥ 1"));
        }
        Ok(HilbertSpec {
            two_s: two_s.round() as u32,
            n_max: photon_cutoff,
        })
    }

    pub fn spin_s(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn photon_cutoff(&self) -> usize {
        self.n_max
    }

    pub fn d_spin(&self) -> usize {
        self.two_s as usize + 1
    }

    pub fn d_photon(&self) -> usize {
        self.n_max + 1
    }

    pub fn d_total(&self) -> usize {
        self.d_spin() * self.d_photon()
    }

    /// Lift a photon-space operator to the full space: op ⊗ I_spin.
    pub fn lift_photon(&self, op: &CMat) -> CMat {
        kron(op, &linalg::eye(self.d_spin()))
    }

    /// Lift a spin-space operator to the full space: I_photon ⊗ op.
    pub fn lift_spin(&self, op: &CMat) -> CMat {
        kron(&linalg::eye(self.d_photon()), op)
    }

    /// Product state |photon⟩ ⊗ |spin⟩ in the full-space index convention.
    pub fn product_state(&self, photon: &CVec, spin: &CVec) -> Result<CVec> {
        if photon.len() != self.d_photon() {
            return Err(QchaosError::Dimension {
                expected: self.d_photon(),
                actual: photon.len(),
            });
        }
        if spin.len() != self.d_spin() {
            return Err(QchaosError::Dimension {
                expected: self.d_spin(),
                actual: spin.len(),
            });
        }
        let ds = self.d_spin();
        let mut v = Array1::zeros(self.d_total());
        for (n, pn) in photon.iter().enumerate() {
            for (m, sm) in spin.iter().enumerate() {
                v[n * ds + m] = *pn * *sm;
            }
        }
        Ok(v)
    }
}

/// Collective spin operators (Sz, S+, S-) in the |S, m⟩ basis ordered
/// m = S … -S. Satisfy [Sz, S±] = ±S± and S+ = (S-)†.
pub fn spin_operators(spin_s: f64) -> Result<(CMat, CMat, CMat)> {
    let spec = HilbertSpec::new(spin_s, 1)?;
    let s = spec.spin_s();
    let d = spec.d_spin();
    let m_of = |idx: usize| s - idx as f64;

    let mut sz: CMat = Array2::zeros((d, d));
    let mut sp: CMat = Array2::zeros((d, d));
    for idx in 0..d {
        let m = m_of(idx);
        sz[[idx, idx]] = C64::new(m, 0.0);
        // S+|S,m⟩ = √(S(S+1) − m(m+1)) |S,m+1⟩; m+1 sits at idx-1.
        if idx > 0 {
            let c = (s * (s + 1.0) - m * (m + 1.0)).sqrt();
            sp[[idx - 1, idx]] = C64::new(c, 0.0);
        }
    }
    let sm = linalg::dagger(&sp);
    Ok((sz, sp, sm))
}

/// Spin x and y components, (S+ + S-)/2 and (S+ - S-)/(2i).
pub fn spin_xy(spin_s: f64) -> Result<(CMat, CMat)> {
    let (_, sp, sm) = spin_operators(spin_s)?;
    let sx = (&sp + &sm).mapv(|z| 0.5 * z);
    let sy = (&sp - &sm).mapv(|z| z * C64::new(0.0, -0.5));
    Ok((sx, sy))
}

/// Truncated boson ladder operators (a, a†) on Fock states 0..=n_max.
pub fn boson_operators(n_max: usize) -> Result<(CMat, CMat)> {
    if n_max < 1 {
        return Err(QchaosError::domain("n_max must be ≥ 1"));
    }
    let d = n_max + 1;
    let mut a: CMat = Array2::zeros((d, d));
    for n in 1..d {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    let adag = linalg::dagger(&a);
    Ok((a, adag))
}

/// Kronecker product of two square matrices, photon ⊗ spin ordering.
pub fn tensor(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.nrows() != a.ncols() {
        return Err(QchaosError::Dimension {
            expected: a.nrows(),
            actual: a.ncols(),
        });
    }
    if b.nrows() != b.ncols() {
        return Err(QchaosError::Dimension {
            expected: b.nrows(),
            actual: b.ncols(),
        });
    }
    Ok(kron(a, b))
}

/// Spin coherent state |θ, φ⟩ = exp(-iφSz) exp(-iθSy) |S, S⟩.
///
/// Expanded in the |S, m⟩ basis this is
/// Σ_m √C(2S, S+m) cos(θ/2)^{S+m} sin(θ/2)^{S-m} e^{-imφ} |S, m⟩,
/// giving ⟨Sz⟩ = S cos θ.
pub fn spin_coherent_state(theta: f64, phi: f64, spin_s: f64) -> Result<CVec> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(QchaosError::domain(format!(
            "theta must lie in [0, π], got {theta}"
        )));
    }
    let spec = HilbertSpec::new(spin_s, 1)?;
    let s = spec.spin_s();
    let d = spec.d_spin();
    let c = (theta / 2.0).cos();
    let sn = (theta / 2.0).sin();

    let mut v: CVec = Array1::zeros(d);
    // idx = S - m, so S+m = 2S - idx and S-m = idx; C(2S, S+m) = C(2S, idx).
    let two_s = spec.two_s as usize;
    let mut binom = 1.0f64; // C(2S, 0)
    for idx in 0..d {
        let m = s - idx as f64;
        let amp = binom.sqrt() * c.powi((two_s - idx) as i32) * sn.powi(idx as i32);
        let phase = C64::new(0.0, -m * phi).exp();
        v[idx] = phase * C64::new(amp, 0.0);
        binom *= (two_s - idx) as f64 / (idx + 1) as f64;
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv_inplace(|z| z / C64::new(norm, 0.0));
    Ok(v)
}

/// Truncated photon coherent state.
#[derive(Debug, Clone)]
pub struct CoherentState {
    /// Normalized amplitudes on Fock states 0..=n_max.
    pub amplitudes: CVec,
    /// Probability weight lost to the truncation, before renormalization.
    pub truncated_weight: f64,
    /// Set when the truncated weight exceeds 1e-8.
    pub truncated: bool,
}

/// Normalized truncation of e^{-|α|²/2} Σ αⁿ/√n! |n⟩.
pub fn photon_coherent_state(alpha: C64, n_max: usize) -> Result<CoherentState> {
    if n_max < 1 {
        return Err(QchaosError::domain("n_max must be ≥ 1"));
    }
    let d = n_max + 1;
    let mut v: CVec = Array1::zeros(d);
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..d {
        v[n] = c;
        c = c * alpha / C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    let kept: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let truncated_weight = (1.0 - kept).max(0.0);
    let norm = kept.sqrt();
    v.mapv_inplace(|z| z / C64::new(norm, 0.0));
    Ok(CoherentState {
        amplitudes: v,
        truncated_weight,
        truncated: truncated_weight > 1e-8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, hermiticity_defect, max_abs, trace};
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_distr::StandardNormal;

    fn random_cmat(rng: &mut impl Rng, d: usize) -> CMat {
        Array2::from_shape_fn((d, d), |_| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
    }

    #[test]
    fn spec_dimensions() {
        let spec = HilbertSpec::new(5.0, 20).unwrap();
        assert_eq!(spec.d_spin(), 11);
        assert_eq!(spec.d_photon(), 21);
        assert_eq!(spec.d_total(), 231);
        assert!(HilbertSpec::new(0.75, 20).is_err());
        assert!(HilbertSpec::new(0.0, 20).is_err());
        assert!(HilbertSpec::new(1.0, 0).is_err());
    }

    #[test]
    fn spin_half_matrices() {
        let (sz, sp, _sm) = spin_operators(0.5).unwrap();
        assert_abs_diff_eq!(sz[[0, 0]].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(sz[[1, 1]].re, -0.5, epsilon = 1e-15);
        // Single nonzero entry couples m = -1/2 to m = +1/2 with amplitude 1.
        assert_abs_diff_eq!(sp[[0, 1]].re, 1.0, epsilon = 1e-15);
        let nnz = sp.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nnz, 1);
    }

    #[test]
    fn spin_five_spectrum() {
        let (sz, _, _) = spin_operators(5.0).unwrap();
        assert_eq!(sz.nrows(), 11);
        let mut diag: Vec<f64> = sz.diag().iter().map(|z| z.re).collect();
        diag.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (k, m) in diag.iter().enumerate() {
            assert_abs_diff_eq!(*m, -5.0 + k as f64, epsilon = 1e-14);
        }
    }

    #[test]
    fn spin_algebra_commutators() {
        for s in [0.5, 1.0, 2.5, 5.0] {
            let (sz, sp, sm) = spin_operators(s).unwrap();
            assert!(max_abs(&(&sp - &dagger(&sm))) == 0.0);
            let comm_p = sz.dot(&sp) - sp.dot(&sz);
            let comm_m = sz.dot(&sm) - sm.dot(&sz);
            assert!(max_abs(&(&comm_p - &sp)) < 1e-14);
            assert!(max_abs(&(&comm_m + &sm)) < 1e-14);
        }
    }

    #[test]
    fn boson_ladder_action() {
        let (a, adag) = boson_operators(6).unwrap();
        // a|0⟩ = 0
        let mut f0: CVec = Array1::zeros(7);
        f0[0] = C64::new(1.0, 0.0);
        assert!(a.dot(&f0).iter().all(|z| z.norm() == 0.0));
        // a|3⟩ = √3 |2⟩
        let mut f3: CVec = Array1::zeros(7);
        f3[3] = C64::new(1.0, 0.0);
        let out = a.dot(&f3);
        assert_abs_diff_eq!(out[2].re, 3.0f64.sqrt(), epsilon = 1e-15);
        // [a, a†] = I except the last diagonal entry, which is -n_max.
        let comm = a.dot(&adag) - adag.dot(&a);
        assert_abs_diff_eq!(comm[[0, 0]].re, 1.0, epsilon = 1e-15);
        for n in 0..6 {
            assert_abs_diff_eq!(comm[[n, n]].re, 1.0, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(comm[[6, 6]].re, -6.0, epsilon = 1e-13);
    }

    #[test]
    fn tensor_identity_and_dims() {
        let i2 = linalg::eye(2);
        let i3 = linalg::eye(3);
        let t = tensor(&i2, &i3).unwrap();
        assert!(max_abs(&(&t - &linalg::eye(6))) == 0.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let a = random_cmat(&mut rng, 3);
        let b = random_cmat(&mut rng, 4);
        assert_eq!(tensor(&a, &b).unwrap().nrows(), 12);
    }

    #[test]
    fn tensor_mixed_product_oracle() {
        // (A⊗B)(C⊗D) = AC ⊗ BD, checked by direct multiplication.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let a = random_cmat(&mut rng, 3);
        let b = random_cmat(&mut rng, 3);
        let c = random_cmat(&mut rng, 3);
        let d = random_cmat(&mut rng, 3);
        let lhs = tensor(&a, &b).unwrap().dot(&tensor(&c, &d).unwrap());
        let rhs = tensor(&a.dot(&c), &b.dot(&d)).unwrap();
        assert!(max_abs(&(&lhs - &rhs)) < 1e-12);
    }

    #[test]
    fn tensor_index_formula_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let a = random_cmat(&mut rng, 3);
        let b = random_cmat(&mut rng, 4);
        let t = tensor(&a, &b).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..4 {
                    for l in 0..4 {
                        let expect = a[[i, j]] * b[[k, l]];
                        assert!((t[[4 * i + k, 4 * j + l]] - expect).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_rejects_non_square() {
        let a = Array2::<C64>::zeros((2, 3));
        let b = linalg::eye(2);
        assert!(tensor(&a, &b).is_err());
    }

    #[test]
    fn coherent_spin_poles() {
        let north = spin_coherent_state(0.0, 0.3, 2.5).unwrap();
        assert_abs_diff_eq!(north[0].norm(), 1.0, epsilon = 1e-14);
        let south = spin_coherent_state(std::f64::consts::PI, 0.0, 2.5).unwrap();
        assert_abs_diff_eq!(south[5].norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn coherent_spin_sz_expectation() {
        let s = 5.0;
        let (sz, _, _) = spin_operators(s).unwrap();
        for theta in [0.3, 1.1, 2.0] {
            let v = spin_coherent_state(theta, 0.7, s).unwrap();
            let exp_sz = v
                .iter()
                .enumerate()
                .map(|(i, z)| z.norm_sqr() * sz[[i, i]].re)
                .sum::<f64>();
            assert_abs_diff_eq!(exp_sz, s * theta.cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn coherent_spin_sx_via_rotation_matrix_oracle() {
        // Independent construction: rotate |S,S⟩ with the exponential of
        // -iθSy obtained from the eigendecomposition of Sy.
        let s = 5.0;
        let theta = std::f64::consts::FRAC_PI_2;
        let (sx, sy) = spin_xy(s).unwrap();
        let (w, u) = linalg::eigh_hermitian(&sy).unwrap();
        let udag = dagger(&u);
        let mut highest: CVec = Array1::zeros(11);
        highest[0] = C64::new(1.0, 0.0);
        let phases = Array1::from_iter(w.iter().map(|ev| C64::new(0.0, -theta * ev).exp()));
        let rotated = u.dot(&Array2::from_diag(&phases)).dot(&udag).dot(&highest);

        let implemented = spin_coherent_state(theta, 0.0, s).unwrap();
        // Same state up to a global phase; compare via |⟨a|b⟩| and ⟨Sx⟩.
        let overlap: C64 = rotated
            .iter()
            .zip(implemented.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-12);
        let exp_sx: C64 = implemented
            .iter()
            .enumerate()
            .map(|(i, zi)| {
                (0..11)
                    .map(|j| zi.conj() * sx[[i, j]] * implemented[j])
                    .sum::<C64>()
            })
            .sum();
        assert_abs_diff_eq!(exp_sx.re, s, epsilon = 1e-12);
        assert!(exp_sx.im.abs() < 1e-12);
    }

    #[test]
    fn coherent_spin_unit_norm() {
        for (theta, phi, s) in [(0.7, 1.9, 3.5), (2.9, -0.4, 7.0), (1.2, 4.0, 0.5)] {
            let v = spin_coherent_state(theta, phi, s).unwrap();
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn coherent_photon_vacuum_and_mean() {
        let vac = photon_coherent_state(C64::new(0.0, 0.0), 10).unwrap();
        assert_abs_diff_eq!(vac.amplitudes[0].re, 1.0, epsilon = 1e-15);
        assert!(!vac.truncated);

        // ⟨a†a⟩ = |α|² for α = 1, n_max = 30 (Poisson mean).
        let st = photon_coherent_state(C64::new(1.0, 0.0), 30).unwrap();
        let mean_n: f64 = st
            .amplitudes
            .iter()
            .enumerate()
            .map(|(n, z)| n as f64 * z.norm_sqr())
            .sum();
        assert_abs_diff_eq!(mean_n, 1.0, epsilon = 1e-10);

        let st2 = photon_coherent_state(C64::new(2.0, 0.0), 40).unwrap();
        let norm: f64 = st2.amplitudes.iter().map(|z| z.norm_sqr()).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        assert!(!st2.truncated);

        // Heavy truncation must raise the flag.
        let clipped = photon_coherent_state(C64::new(3.0, 0.0), 5).unwrap();
        assert!(clipped.truncated);
        assert!(clipped.truncated_weight > 1e-3);
    }

    #[test]
    fn lift_operators_commute_across_factors() {
        let spec = HilbertSpec::new(1.5, 4).unwrap();
        let (a, _) = boson_operators(spec.photon_cutoff()).unwrap();
        let (sz, _, _) = spin_operators(spec.spin_s()).unwrap();
        let af = spec.lift_photon(&a);
        let szf = spec.lift_spin(&sz);
        let comm = af.dot(&szf) - szf.dot(&af);
        assert!(max_abs(&comm) < 1e-14);
        assert_eq!(af.nrows(), spec.d_total());
    }

    #[test]
    fn product_state_matches_tensor_of_projectors() {
        let spec = HilbertSpec::new(1.0, 3).unwrap();
        let ph = photon_coherent_state(C64::new(0.4, 0.2), 3).unwrap().amplitudes;
        let sp = spin_coherent_state(1.0, 0.5, 1.0).unwrap();
        let v = spec.product_state(&ph, &sp).unwrap();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        // ψψ† = (φφ†) ⊗ (χχ†)
        let outer = Array2::from_shape_fn((v.len(), v.len()), |(i, j)| v[i] * v[j].conj());
        let ph_proj = Array2::from_shape_fn((4, 4), |(i, j)| ph[i] * ph[j].conj());
        let sp_proj = Array2::from_shape_fn((3, 3), |(i, j)| sp[i] * sp[j].conj());
        let want = tensor(&ph_proj, &sp_proj).unwrap();
        assert!(max_abs(&(&outer - &want)) < 1e-13);
        assert!(hermiticity_defect(&outer) < 1e-15);
        assert!((trace(&outer) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
