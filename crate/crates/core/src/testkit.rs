//! Seeded random fixtures shared by unit, property and acceptance tests.

use crate::lindblad::{DensityMatrix, LindbladGenerator};
use crate::linalg::hermitize;
use crate::{C64, CMat};
use ndarray::Array2;
use rand::prelude::*;
use rand_distr::StandardNormal;

pub fn random_complex_matrix(rng: &mut impl Rng, d: usize) -> CMat {
    Array2::from_shape_fn((d, d), |_| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_hermitian(rng: &mut impl Rng, d: usize) -> CMat {
    hermitize(&random_complex_matrix(rng, d))
}

/// Random full-rank density matrix AA†/Tr(AA†).
pub fn random_density_matrix(rng: &mut impl Rng, d: usize) -> DensityMatrix {
    let a = random_complex_matrix(rng, d);
    let adag = a.t().mapv(|z| z.conj());
    let pos = a.dot(&adag);
    let tr = pos.diag().sum();
    DensityMatrix::new_unchecked(pos.mapv(|z| z / tr))
}

/// Haar-ish random pure state ψψ†.
pub fn random_pure_state(rng: &mut impl Rng, d: usize) -> DensityMatrix {
    let mut psi = ndarray::Array1::from_shape_fn(d, |_| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.mapv_inplace(|z| z / C64::new(norm, 0.0));
    DensityMatrix::from_pure(&psi).expect("normalized pure state")
}

/// Random Lindblad generator: Hermitian Hamiltonian plus `n_jumps` dense
/// complex jump operators with rates in (0, 1].
pub fn random_generator(rng: &mut impl Rng, d: usize, n_jumps: usize) -> LindbladGenerator {
    let h = random_hermitian(rng, d);
    let jumps = (0..n_jumps)
        .map(|_| {
            let l = random_complex_matrix(rng, d).mapv(|z| 0.5 * z);
            let rate: f64 = rng.random_range(0.1..1.0);
            (l, rate)
        })
        .collect();
    LindbladGenerator::new(h, jumps).expect("random generator construction")
}
