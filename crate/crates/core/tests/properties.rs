//! Standalone property suites: structural invariants that must hold
//! independently of any figure reproduction.

use ndarray::Array2;
use qchaos::classical::{eom_rhs, integrate, jacobian, AdmParams, ClassicalState, InitialEnsemble};
use qchaos::lindblad::LindbladGenerator;
use qchaos::linalg;
use qchaos::observables::{reduce_bipartite, von_neumann_entropy, Keep};
use qchaos::rmt::{build_liouvillian, projector, regular_steady_state, sample_realization, ToyModelConfig};
use qchaos::testkit;
use qchaos::{C64, CMat};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_params(rng: &mut impl Rng) -> AdmParams {
    AdmParams::new(
        rng.random_range(0.5..1.5),
        rng.random_range(0.5..1.5),
        rng.random_range(0.0..3.0),
        rng.random_range(0.0..3.0),
        rng.random_range(0.0..2.0),
    )
    .unwrap()
}

fn random_state(rng: &mut impl Rng) -> ClassicalState {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let mut s = ClassicalState::from_bloch(theta, phi);
    s.x = rng.random_range(-2.0..2.0);
    s.p = rng.random_range(-2.0..2.0);
    s
}

#[test]
fn bloch_norm_conservation() {
    // max_t |s·s - 1| < 1e-8 over t = 100 across the scan domain (unit
    // frequencies, λ± in [0, 3]). Dissipative runs hold this at dt = 1e-3;
    // closed-system strong-coupling trajectories move faster (the photon
    // field is undamped) and need dt = 2.5e-4 for the same bound.
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut worst = 0.0f64;
    for k in 0..12 {
        let kappa = if k % 2 == 0 { 0.0 } else { 1.0 };
        let dt = if kappa == 0.0 { 2.5e-4 } else { 1e-3 };
        let params = AdmParams::new(
            1.0,
            1.0,
            rng.random_range(0.0..3.0),
            rng.random_range(0.0..3.0),
            kappa,
        )
        .unwrap();
        let s0 = InitialEnsemble::bloch_uniform(1, rng.random()).states()[0];
        let traj = integrate(&s0, &params, dt, 100.0).unwrap();
        for s in &traj.states {
            worst = worst.max((s.bloch_norm_sq() - 1.0).abs());
        }
    }
    println!("bloch-norm conservation: worst drift {worst:.2e}");
    assert!(worst < 1e-8);
}

#[test]
fn jacobian_matches_finite_differences_everywhere() {
    // Relative agreement < 1e-5 componentwise on 100 random states.
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let params = random_params(&mut rng);
        let s = random_state(&mut rng);
        let jac = jacobian(&s, &params);
        let fields = |st: &ClassicalState| [st.x, st.p, st.sx, st.sy, st.sz];
        let base = fields(&s);
        for col in 0..5 {
            let mut fwd = base;
            let mut bwd = base;
            fwd[col] += h;
            bwd[col] -= h;
            let sf = ClassicalState { x: fwd[0], p: fwd[1], sx: fwd[2], sy: fwd[3], sz: fwd[4] };
            let sb = ClassicalState { x: bwd[0], p: bwd[1], sx: bwd[2], sy: bwd[3], sz: bwd[4] };
            let df = fields(&eom_rhs(&sf, &params).unwrap());
            let db = fields(&eom_rhs(&sb, &params).unwrap());
            for row in 0..5 {
                let fd = (df[row] - db[row]) / (2.0 * h);
                let rel = (fd - jac[[row, col]]).abs() / jac[[row, col]].abs().max(1.0);
                worst = worst.max(rel);
            }
        }
    }
    println!("jacobian vs finite differences: worst relative error {worst:.2e}");
    assert!(worst < 1e-5);
}

#[test]
fn partial_trace_brute_force_oracle() {
    // Explicit index-sum oracle at dimensions up to 16, error < 1e-13.
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let mut worst = 0.0f64;
    for (d_a, d_b) in [(2usize, 2usize), (2, 8), (4, 4), (8, 2), (4, 3)] {
        let rho = testkit::random_density_matrix(&mut rng, d_a * d_b).into_data();
        let red_a = reduce_bipartite(&rho, d_a, d_b, Keep::A).unwrap();
        let red_b = reduce_bipartite(&rho, d_a, d_b, Keep::B).unwrap();
        for i in 0..d_a {
            for i2 in 0..d_a {
                let mut expect = C64::new(0.0, 0.0);
                for j in 0..d_b {
                    expect += rho[[i * d_b + j, i2 * d_b + j]];
                }
                worst = worst.max((red_a[[i, i2]] - expect).norm());
            }
        }
        for j in 0..d_b {
            for j2 in 0..d_b {
                let mut expect = C64::new(0.0, 0.0);
                for i in 0..d_a {
                    expect += rho[[i * d_b + j, i * d_b + j2]];
                }
                worst = worst.max((red_b[[j, j2]] - expect).norm());
            }
        }
        // Entropy bounds on the reductions.
        let s_a = von_neumann_entropy(&red_a).unwrap();
        assert!(s_a >= -1e-10 && s_a <= (d_a as f64).ln() + 1e-8);
    }
    println!("partial trace vs index-sum oracle: worst error {worst:.2e}");
    assert!(worst < 1e-13);
}

#[test]
fn projector_is_idempotent_at_full_strength() {
    // P(1)² = P(1) within 1e-12, plus the general χ algebra.
    let cfg = ToyModelConfig {
        n_total: 49,
        mu: 0.0,
        chi: 0.0,
        gamma: 1.0,
        seed: 74,
        ensemble_size: 1,
    };
    let real = sample_realization(&cfg, 0).unwrap();
    let ss = regular_steady_state(&real, 1.0).unwrap();
    let p1 = projector(1.0, &ss.u1, &ss.u2);
    let idem = linalg::max_abs(&(&p1.dot(&p1) - &p1));
    println!("projector idempotency defect at χ = 1: {idem:.2e}");
    assert!(idem < 1e-12);
    for chi in [0.25, 0.5, 0.75] {
        let p = projector(chi, &ss.u1, &ss.u2);
        let expected = projector(2.0 * chi - chi * chi, &ss.u1, &ss.u2);
        assert!(linalg::max_abs(&(&p.dot(&p) - &expected)) < 1e-12);
    }
}

#[test]
fn liouvillian_zero_mode_is_unique_across_seeds() {
    // Gap between the two smallest eigenvalue moduli > 1e-8 for 50 seeds of
    // the regular toy Liouvillian at N = 49, γ = 1, via inverse iteration.
    let cfg = ToyModelConfig {
        n_total: 49,
        mu: 0.0,
        chi: 0.0,
        gamma: 1.0,
        seed: 75,
        ensemble_size: 50,
    };
    let mut smallest_gap = f64::INFINITY;
    for idx in 0..50u64 {
        let real = sample_realization(&cfg, idx).unwrap();
        let h = qchaos::rmt::build_hamiltonian(&real, 0.0, 0.0, None).unwrap();
        let m = build_liouvillian(&h, &real.jump, 1.0).unwrap();
        let (l1, l2) = linalg::smallest_two_eigenvalues(&m, idx, 40).unwrap();
        assert!(l1.norm() < 1e-8, "seed {idx}: smallest modulus {:.2e}", l1.norm());
        smallest_gap = smallest_gap.min(l2.norm());
    }
    println!("zero-mode gap across 50 seeds: smallest second modulus {smallest_gap:.3e}");
    assert!(smallest_gap > 1e-8);
}

mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn small_cmat(d: usize, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        testkit::random_complex_matrix(&mut rng, d)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn tensor_is_associative_and_bilinear(seed in 0u64..1000, da in 2usize..4, db in 2usize..4, dc in 2usize..4) {
            let a = small_cmat(da, seed);
            let b = small_cmat(db, seed ^ 0xabc);
            let c = small_cmat(dc, seed ^ 0xdef);
            let left = qchaos::hilbert::tensor(&qchaos::hilbert::tensor(&a, &b).unwrap(), &c).unwrap();
            let right = qchaos::hilbert::tensor(&a, &qchaos::hilbert::tensor(&b, &c).unwrap()).unwrap();
            prop_assert!(linalg::max_abs(&(&left - &right)) < 1e-12);

            let scale = C64::new(1.5, -0.25);
            let lhs = qchaos::hilbert::tensor(&a.mapv(|z| z * scale), &b).unwrap();
            let rhs = qchaos::hilbert::tensor(&a, &b).unwrap().mapv(|z| z * scale);
            prop_assert!(linalg::max_abs(&(&lhs - &rhs)) < 1e-12);

            let a2 = small_cmat(da, seed ^ 0x123);
            let sum_first = qchaos::hilbert::tensor(&(&a + &a2), &b).unwrap();
            let sum_after = qchaos::hilbert::tensor(&a, &b).unwrap() + qchaos::hilbert::tensor(&a2, &b).unwrap();
            prop_assert!(linalg::max_abs(&(&sum_first - &sum_after)) < 1e-12);
        }

        #[test]
        fn lindblad_rhs_preserves_trace_and_hermiticity(seed in 0u64..1000, d in 2usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let gen = testkit::random_generator(&mut rng, d, 2);
            let rho = testkit::random_density_matrix(&mut rng, d);
            let rhs = qchaos::lindblad::lindblad_rhs(&rho, &gen).unwrap();
            prop_assert!(linalg::trace(&rhs).norm() < 1e-11);
            prop_assert!(linalg::hermiticity_defect(&rhs) < 1e-11);
        }

        #[test]
        fn entropy_bounds_on_random_states(seed in 0u64..1000, d in 2usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = testkit::random_density_matrix(&mut rng, d);
            let s = von_neumann_entropy(rho.data()).unwrap();
            prop_assert!(s >= -1e-10);
            prop_assert!(s <= (d as f64).ln() + 1e-8);
        }

        #[test]
        fn spin_norm_derivative_vanishes(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let params = random_params(&mut rng);
            let s = random_state(&mut rng);
            let d = eom_rhs(&s, &params).unwrap();
            let dot = s.sx * d.sx + s.sy * d.sy + s.sz * d.sz;
            prop_assert!(dot.abs() < 1e-13);
        }
    }

    #[test]
    fn generator_rejects_bad_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let non_herm = testkit::random_complex_matrix(&mut rng, 4);
        assert!(LindbladGenerator::new(non_herm, vec![]).is_err());
        let h = testkit::random_hermitian(&mut rng, 4);
        let l: CMat = Array2::zeros((4, 4));
        assert!(LindbladGenerator::new(h, vec![(l, -0.5)]).is_err());
    }
}
