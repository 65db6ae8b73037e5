//! Dense complex linear algebra helpers shared across the crate.
//!
//! Thin wrappers over LAPACK via `ndarray-linalg`, plus a Padé matrix
//! exponential and null-space extraction for Liouvillian steady states.

use crate::error::{QchaosError, Result};
use crate::{C64, CMat, CVec};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Inverse, Norm, OperationNorm, Solve, SVD};

/// Conjugate transpose.
pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

/// Hermitian part (a + a†)/2.
pub fn hermitize(a: &CMat) -> CMat {
    let ad = dagger(a);
    (a + &ad).mapv(|z| 0.5 * z)
}

/// Largest entrywise deviation from Hermiticity, max |a - a†|.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[[i, j]] - a[[j, i]].conj()).norm();
            if d > defect {
                defect = d;
            }
        }
    }
    defect
}

/// Largest entry modulus.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

pub fn trace(a: &CMat) -> C64 {
    a.diag().sum()
}

/// Trace norm (sum of singular values).
pub fn trace_norm(a: &CMat) -> Result<f64> {
    let (_, s, _) = a.svd(false, false)?;
    Ok(s.sum())
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) - b.dot(a)
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) + b.dot(a)
}

pub fn eye(d: usize) -> CMat {
    Array2::eye(d)
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    ndarray::linalg::kron(a, b)
}

/// Column-stacking vectorization: vec(ρ)[r + c·d] = ρ[r, c].
pub fn vec_col(rho: &CMat) -> CVec {
    let d = rho.nrows();
    let mut v = Array1::zeros(d * d);
    for c in 0..d {
        for r in 0..d {
            v[r + c * d] = rho[[r, c]];
        }
    }
    v
}

/// Inverse of [`vec_col`].
pub fn unvec_col(v: &CVec, d: usize) -> Result<CMat> {
    if v.len() != d * d {
        return Err(QchaosError::Dimension {
            expected: d * d,
            actual: v.len(),
        });
    }
    let mut m = Array2::zeros((d, d));
    for c in 0..d {
        for r in 0..d {
            m[[r, c]] = v[r + c * d];
        }
    }
    Ok(m)
}

/// Matrix exponential by Padé(13) approximation with scaling and squaring.
pub fn expm(a: &CMat) -> Result<CMat> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA_13: f64 = 5.371920351148152;

    let d = a.nrows();
    if a.ncols() != d {
        return Err(QchaosError::Dimension {
            expected: d,
            actual: a.ncols(),
        });
    }
    let norm = a.opnorm_one()?;
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scale = C64::new(0.5f64.powi(s), 0.0);
    let a = a.mapv(|z| z * scale);

    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let id: CMat = Array2::eye(d);

    let b = |k: usize| C64::new(B[k], 0.0);
    let u_inner = a6.mapv(|z| z * b(13)) + a4.mapv(|z| z * b(11)) + a2.mapv(|z| z * b(9));
    let u_poly =
        a6.dot(&u_inner) + a6.mapv(|z| z * b(7)) + a4.mapv(|z| z * b(5)) + a2.mapv(|z| z * b(3)) + id.mapv(|z| z * b(1));
    let u = a.dot(&u_poly);
    let v_inner = a6.mapv(|z| z * b(12)) + a4.mapv(|z| z * b(10)) + a2.mapv(|z| z * b(8));
    let v = a6.dot(&v_inner) + a6.mapv(|z| z * b(6)) + a4.mapv(|z| z * b(4)) + a2.mapv(|z| z * b(2)) + id.mapv(|z| z * b(0));

    let denom = &v - &u;
    let numer = &v + &u;
    let mut r = denom.inv()?.dot(&numer);
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}

/// Null vector of a singular matrix `m` (dimension d²×d² of a vectorized
/// Liouvillian) normalized so that the reshaped matrix has unit trace.
///
/// One row of `m` is replaced by the trace functional and the resulting
/// nonsingular system is solved; the residual ‖m·v‖₂ is returned alongside.
/// This assumes the zero eigenvalue is simple; callers cross-check with
/// [`steady_state_candidates_differ`] or an explicit spectral gap.
pub fn null_vector_trace_row(m: &CMat, d: usize, replace_row: usize) -> Result<(CVec, f64)> {
    let n = d * d;
    if m.nrows() != n || m.ncols() != n {
        return Err(QchaosError::Dimension {
            expected: n,
            actual: m.nrows(),
        });
    }
    let mut sys = m.clone();
    for j in 0..n {
        sys[[replace_row, j]] = C64::new(0.0, 0.0);
    }
    for r in 0..d {
        sys[[replace_row, r + r * d]] = C64::new(1.0, 0.0);
    }
    let mut rhs: CVec = Array1::zeros(n);
    rhs[replace_row] = C64::new(1.0, 0.0);
    let v = sys.solve(&rhs)?;
    let residual = m.dot(&v).norm_l2();
    Ok((v, residual))
}

/// Second solve with a different constrained row; a unique null space gives
/// the same vector, a degenerate one generically does not.
pub fn steady_state_candidates_differ(m: &CMat, d: usize) -> Result<bool> {
    let n = d * d;
    let (v1, _) = null_vector_trace_row(m, d, 0)?;
    let (v2, _) = null_vector_trace_row(m, d, n / 2)?;
    let diff = (&v1 - &v2).norm_l2() / v1.norm_l2().max(1e-300);
    Ok(diff > 1e-6)
}

/// The two smallest-modulus eigenvalues of `m`, by block inverse subspace
/// iteration (block size 3, so a conjugate pair next to the zero mode is
/// still resolved) with a small Rayleigh projection.
///
/// Intended for Liouvillians whose smallest eigenvalue is (numerically) zero
/// and well separated from the rest; used for zero-mode gap checks where a
/// full eigendecomposition would be wasteful.
pub fn smallest_two_eigenvalues(m: &CMat, seed: u64, max_iter: usize) -> Result<(C64, C64)> {
    use ndarray_linalg::Factorize;
    use rand::prelude::*;
    use rand_distr::StandardNormal;

    const BLOCK: usize = 3;
    let n = m.nrows();
    let lu = match m.factorize() {
        Ok(lu) => lu,
        Err(_) => {
            // Exactly singular pivot; retry with a tiny regularizing shift.
            let eps = 1e-14 * max_abs(m).max(1.0);
            let mut shifted = m.clone();
            for i in 0..n {
                shifted[[i, i]] += C64::new(eps, 0.0);
            }
            shifted.factorize()?
        }
    };

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<CVec> = (0..BLOCK)
        .map(|_| {
            Array1::from_shape_fn(n, |_| {
                C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            })
        })
        .collect();
    orthonormalize(&mut basis);

    let mut prev: Option<(C64, C64)> = None;
    for iter in 0..max_iter {
        for v in basis.iter_mut() {
            *v = lu.solve(v)?;
        }
        orthonormalize(&mut basis);
        // Rayleigh projection onto span(basis).
        let images: Vec<CVec> = basis.iter().map(|v| m.dot(v)).collect();
        let mut t: CMat = Array2::zeros((BLOCK, BLOCK));
        for i in 0..BLOCK {
            for j in 0..BLOCK {
                t[[i, j]] = inner(&basis[i], &images[j]);
            }
        }
        let mut ritz = complex_eigenvalues(&t)?;
        ritz.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        let (e1, e2) = (ritz[0], ritz[1]);
        // The zero mode locks in almost instantly; the second value is only
        // needed to order of magnitude for gap checks, so 10% suffices once
        // a few iterations have purged the starting block.
        if let Some((p1, p2)) = prev {
            let scale = e2.norm().max(1e-300);
            if iter >= 4 && (e1 - p1).norm() < 1e-10 * scale && (e2 - p2).norm() < 0.1 * scale {
                return Ok((e1, e2));
            }
        }
        prev = Some((e1, e2));
    }
    prev.ok_or_else(|| QchaosError::numeric("inverse iteration produced no estimate"))
}

fn inner(a: &CVec, b: &CVec) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

fn orthonormalize(basis: &mut [CVec]) {
    for i in 0..basis.len() {
        for j in 0..i {
            let proj = inner(&basis[j], &basis[i]);
            let bj = basis[j].clone();
            basis[i].zip_mut_with(&bj, |x, y| *x -= proj * y);
        }
        let norm = basis[i].norm_l2();
        basis[i].mapv_inplace(|z| z / C64::new(norm, 0.0));
    }
}

/// Eigenvalues of a general complex matrix (LAPACK zgeev, values only).
pub fn complex_eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    use ndarray_linalg::EigVals;
    Ok(m.eigvals()?.to_vec())
}

/// Eigendecomposition of a Hermitian complex matrix with eigenvectors as
/// columns paired with ascending eigenvalues.
///
/// `ndarray-linalg`'s complex `eigh` hands row-major data to column-major
/// LAPACK, so it effectively diagonalizes Aᵀ = A* and its output columns are
/// the conjugates of A's eigenvectors. This wrapper undoes that.
pub fn eigh_hermitian(a: &CMat) -> Result<(Array1<f64>, CMat)> {
    use ndarray_linalg::Eigh;
    let (w, u) = a.eigh(ndarray_linalg::UPLO::Lower)?;
    Ok((w, u.mapv(|z| z.conj())))
}

/// Eigenvalues of a Hermitian complex matrix, ascending.
pub fn eigvalsh(a: &CMat) -> Result<Array1<f64>> {
    use ndarray_linalg::EigValsh;
    Ok(a.eigvalsh(ndarray_linalg::UPLO::Lower)?)
}

/// Eigendecomposition of a general complex matrix, values and right vectors.
pub fn complex_eig(m: &CMat) -> Result<(CVec, CMat)> {
    Ok(m.eig()?)
}

/// Least-squares slope of y(t) restricted to the window [t_lo, t_hi].
pub fn window_slope(times: &[f64], values: &[f64], t_lo: f64, t_hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values.iter())
        .filter(|(t, _)| **t >= t_lo - 1e-12 && **t <= t_hi + 1e-12)
        .map(|(t, v)| (*t, *v))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let st: f64 = pts.iter().map(|(t, _)| t).sum();
    let sv: f64 = pts.iter().map(|(_, v)| v).sum();
    let stt: f64 = pts.iter().map(|(t, _)| t * t).sum();
    let stv: f64 = pts.iter().map(|(t, v)| t * v).sum();
    let denom = n * stt - st * st;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * stv - st * sv) / denom)
}

/// Mean of the final `fraction` of a series (by index).
pub fn tail_average(values: &[f64], fraction: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let start = ((values.len() as f64) * (1.0 - fraction)).floor() as usize;
    let start = start.min(values.len() - 1);
    let tail = &values[start..];
    tail.iter().sum::<f64>() / tail.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn eigh_hermitian_returns_true_eigenvectors() {
        use rand::prelude::*;
        use rand_distr::StandardNormal;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let d = 7;
        let a0: CMat = Array2::from_shape_fn((d, d), |_| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let a = hermitize(&a0);
        let (w, u) = eigh_hermitian(&a).unwrap();
        for k in 0..d {
            let v = u.column(k).to_owned();
            let resid = (&a.dot(&v) - &v.mapv(|z| z * C64::new(w[k], 0.0)))
                .iter()
                .map(|z| z.norm())
                .fold(0.0f64, f64::max);
            assert!(resid < 1e-12, "column {k} residual {resid}");
        }
    }

    #[test]
    fn smallest_two_eigenvalues_match_dense_solver() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let gen = crate::testkit::random_generator(&mut rng, 5, 2);
        let m = crate::lindblad::vectorize_generator(&gen).unwrap();
        let mut reference: Vec<f64> = complex_eigenvalues(&m).unwrap().iter().map(|z| z.norm()).collect();
        reference.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (l1, l2) = smallest_two_eigenvalues(&m, 3, 60).unwrap();
        assert!(l1.norm() < 1e-9, "zero mode modulus {:.2e}", l1.norm());
        // Clustered low-lying modes converge slowly, so the second value is
        // an order-of-magnitude estimate; that is all a gap check needs.
        let ratio = l2.norm() / reference[1];
        assert!(
            (0.33..=3.0).contains(&ratio),
            "second modulus {:.4e} vs {:.4e}",
            l2.norm(),
            reference[1]
        );
    }

    #[test]
    fn expm_zero_is_identity() {
        let a: CMat = Array2::zeros((4, 4));
        let e = expm(&a).unwrap();
        assert!(max_abs(&(&e - &eye(4))) < 1e-14);
    }

    #[test]
    fn expm_diagonal() {
        let a = array![
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(0.0, -2.0)]
        ];
        let e = expm(&a).unwrap();
        assert_abs_diff_eq!(e[[0, 0]].re, 1.0f64.exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(e[[1, 1]].re, 2.0f64.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(e[[1, 1]].im, -(2.0f64.sin()), epsilon = 1e-12);
        assert!(e[[0, 1]].norm() < 1e-14);
    }

    #[test]
    fn expm_rotation_block() {
        // exp(θ [[0,-1],[1,0]]) is a rotation by θ.
        let th = 0.7;
        let a = array![
            [C64::new(0.0, 0.0), C64::new(-th, 0.0)],
            [C64::new(th, 0.0), C64::new(0.0, 0.0)]
        ];
        let e = expm(&a).unwrap();
        assert_abs_diff_eq!(e[[0, 0]].re, th.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(e[[1, 0]].re, th.sin(), epsilon = 1e-12);
    }

    #[test]
    fn expm_large_norm_scaling() {
        // exp of a matrix with norm far above the Padé threshold.
        let a = array![
            [C64::new(0.0, 30.0), C64::new(8.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(0.0, -30.0)]
        ];
        let e = expm(&a).unwrap();
        // Closed form for the upper-triangular case.
        let e00 = C64::new(0.0, 30.0).exp();
        let e11 = C64::new(0.0, -30.0).exp();
        let e01 = C64::new(8.0, 0.0) * (e00 - e11) / C64::new(0.0, 60.0);
        assert!((e[[0, 0]] - e00).norm() < 1e-10);
        assert!((e[[0, 1]] - e01).norm() < 1e-9);
    }

    #[test]
    fn vec_unvec_roundtrip() {
        let m = array![
            [C64::new(1.0, 2.0), C64::new(3.0, 4.0)],
            [C64::new(5.0, 6.0), C64::new(7.0, 8.0)]
        ];
        let v = vec_col(&m);
        // Column stacking: first column first.
        assert_eq!(v[0], m[[0, 0]]);
        assert_eq!(v[1], m[[1, 0]]);
        assert_eq!(v[2], m[[0, 1]]);
        let back = unvec_col(&v, 2).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn window_slope_linear() {
        let t: Vec<f64> = (0..100).map(|i| i as f64 * 0.01).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * t + 1.0).collect();
        let s = window_slope(&t, &y, 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(s, 3.0, epsilon = 1e-10);
    }

    #[test]
    fn tail_average_takes_final_fraction() {
        let v: Vec<f64> = (0..10).map(|i| i as f64).collect();
        // Final 20% of 10 entries = indices 8, 9.
        assert_abs_diff_eq!(tail_average(&v, 0.2), 8.5, epsilon = 1e-14);
    }
}
