//! Nearest-neighbor spacing statistics of complex spectra.
//!
//! Liouvillian eigenvalues live in the complex plane, so level statistics
//! use planar nearest-neighbor distances, locally unfolded to unit mean
//! spacing and compared against two references: uncorrelated points
//! (2d Poisson) and the complex Ginibre ensemble, realized by direct
//! sampling.

use crate::error::{QchaosError, Result};
use crate::linalg;
use crate::C64;
use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Default neighbor count for local-density unfolding.
pub const DEFAULT_KNN: usize = 10;
/// Fraction of points dropped from the low-density edge of the spectrum.
pub const EDGE_EXCLUSION: f64 = 0.05;
/// Minimum eigenvalue count for single-spectrum statistics.
pub const MIN_EIGENVALUES: usize = 200;
/// KS margin below which a classification is reported indeterminate.
pub const CLASSIFY_MARGIN: f64 = 0.05;
/// Eigenvalues closer to the real axis than this count as real.
pub const REAL_AXIS_TOL: f64 = 1e-10;

/// Eigenvalue set with provenance and symmetry bookkeeping.
#[derive(Debug, Clone)]
pub struct ComplexSpectrum {
    pub eigenvalues: Vec<C64>,
    pub provenance: String,
    pub symmetry_filtered: bool,
}

impl ComplexSpectrum {
    pub fn new(eigenvalues: Vec<C64>, provenance: impl Into<String>) -> Result<Self> {
        if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QchaosError::numeric("spectrum contains non-finite eigenvalues"));
        }
        Ok(ComplexSpectrum {
            eigenvalues,
            provenance: provenance.into(),
            symmetry_filtered: false,
        })
    }

    /// Drop the lower-half-plane partners of a conjugate-symmetric spectrum.
    ///
    /// Eigenvalues with Im > tol are kept; near-real ones (|Im| ≤ tol) are
    /// kept only when Im ≥ 0, so each conjugate pair contributes once while
    /// genuinely real eigenvalues survive.
    pub fn filter_conjugate_symmetry(mut self) -> Self {
        self.eigenvalues.retain(|z| {
            z.im > REAL_AXIS_TOL || (z.im.abs() <= REAL_AXIS_TOL && z.im >= 0.0)
        });
        self.symmetry_filtered = true;
        self
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Unfolding prescription for planar spacings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unfolding {
    /// Divide by the global mean spacing.
    GlobalMean,
    /// Rescale by the local density estimated from the k-th neighbor
    /// distance: s = d₁ √(k/(π r_k²)), then normalize to unit mean.
    LocalKnn(usize),
}

impl Default for Unfolding {
    fn default() -> Self {
        Unfolding::LocalKnn(DEFAULT_KNN)
    }
}

/// Unfolded spacing sample from one spectrum.
#[derive(Debug, Clone)]
pub struct SpacingSample {
    /// Unfolded spacings, mean 1.
    pub spacings: Vec<f64>,
    /// Number of (numerically) exactly degenerate pairs encountered.
    pub degenerate_count: usize,
}

/// Spacings of one spectrum: per-eigenvalue nearest-neighbor distance in the
/// complex plane, unfolded, with the lowest-density 5% (the spectral edge)
/// excluded.
pub fn spacing_sample(spectrum: &ComplexSpectrum, unfolding: Unfolding) -> Result<SpacingSample> {
    let pts = &spectrum.eigenvalues;
    let n = pts.len();
    let k = match unfolding {
        Unfolding::LocalKnn(k) => k.max(1),
        Unfolding::GlobalMean => 1,
    };
    if n < k + 2 {
        return Err(QchaosError::InsufficientStatistics(format!(
            "{n} eigenvalues is too few for k = {k} unfolding"
        )));
    }

    // Pairwise nearest-neighbor and k-th neighbor distances.
    let mut d1 = vec![f64::INFINITY; n];
    let mut rk = vec![0.0f64; n];
    let mut dists = vec![0.0f64; n - 1];
    for i in 0..n {
        let mut m = 0;
        for j in 0..n {
            if i != j {
                dists[m] = (pts[i] - pts[j]).norm();
                m += 1;
            }
        }
        dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
        d1[i] = dists[0];
        rk[i] = dists[(k - 1).min(m - 1)];
    }

    // Edge exclusion: drop the 5% of points with the largest k-neighbor
    // distance (lowest local density). Neighbors were computed over the
    // full set, so interior points keep their true spacings.
    let mut rk_sorted = rk.clone();
    rk_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cut_idx = (((n as f64) * (1.0 - EDGE_EXCLUSION)).floor() as usize).min(n - 1);
    let rk_cut = rk_sorted[cut_idx];

    let span = pts
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut spacings = Vec::with_capacity(n);
    let mut degenerate_count = 0usize;
    for i in 0..n {
        if rk[i] > rk_cut {
            continue;
        }
        if d1[i] < 1e-14 * span {
            degenerate_count += 1;
            spacings.push(0.0);
            continue;
        }
        let s = match unfolding {
            Unfolding::GlobalMean => d1[i],
            Unfolding::LocalKnn(k) => {
                let density = k as f64 / (std::f64::consts::PI * rk[i] * rk[i]);
                d1[i] * density.sqrt()
            }
        };
        spacings.push(s);
    }
    if spacings.is_empty() {
        return Err(QchaosError::InsufficientStatistics(
            "no spacings survived edge exclusion".into(),
        ));
    }
    normalize_mean(&mut spacings);
    Ok(SpacingSample {
        spacings,
        degenerate_count,
    })
}

fn normalize_mean(spacings: &mut [f64]) {
    let mean: f64 = spacings.iter().sum::<f64>() / spacings.len() as f64;
    if mean > 0.0 {
        for s in spacings.iter_mut() {
            *s /= mean;
        }
    }
}

/// Spacing distribution with histogram and reference scores.
#[derive(Debug, Clone)]
pub struct SpacingDistribution {
    /// Normalized spacings, mean 1.
    pub spacings: Vec<f64>,
    pub bin_edges: Vec<f64>,
    /// Probability densities per bin (integrate to 1).
    pub densities: Vec<f64>,
    pub ks_vs_poisson2d: f64,
    pub ks_vs_ginibre: f64,
    pub degenerate_count: usize,
}

/// Spacing distribution of a single spectrum (needs ≥ 200 eigenvalues).
pub fn nn_spacings(
    spectrum: &ComplexSpectrum,
    unfolding: Unfolding,
    ginibre: &GinibreReference,
) -> Result<SpacingDistribution> {
    if spectrum.len() < MIN_EIGENVALUES {
        return Err(QchaosError::InsufficientStatistics(format!(
            "{} eigenvalues < {MIN_EIGENVALUES}; aggregate over an ensemble instead",
            spectrum.len()
        )));
    }
    let sample = spacing_sample(spectrum, unfolding)?;
    distribution_from_samples(sample.spacings, sample.degenerate_count, ginibre)
}

/// Pooled spacing distribution over an ensemble of spectra; each spectrum is
/// unfolded separately, then the pool is renormalized to unit mean.
pub fn pooled_nn_spacings(
    spectra: &[ComplexSpectrum],
    unfolding: Unfolding,
    ginibre: &GinibreReference,
) -> Result<SpacingDistribution> {
    let samples: Vec<Result<SpacingSample>> = spectra
        .par_iter()
        .map(|sp| spacing_sample(sp, unfolding))
        .collect();
    let mut pooled = Vec::new();
    let mut degenerate = 0usize;
    for s in samples {
        let s = s?;
        degenerate += s.degenerate_count;
        pooled.extend(s.spacings);
    }
    if pooled.len() < MIN_EIGENVALUES {
        return Err(QchaosError::InsufficientStatistics(format!(
            "{} pooled spacings < {MIN_EIGENVALUES}",
            pooled.len()
        )));
    }
    normalize_mean(&mut pooled);
    distribution_from_samples(pooled, degenerate, ginibre)
}

fn distribution_from_samples(
    mut spacings: Vec<f64>,
    degenerate_count: usize,
    ginibre: &GinibreReference,
) -> Result<SpacingDistribution> {
    spacings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (bin_edges, densities) = histogram(&spacings, 40);
    let ks_vs_poisson2d = ks_vs_cdf(&spacings, poisson2d_cdf);
    let ks_vs_ginibre = ks_two_sample(&spacings, &ginibre.sorted_spacings);
    Ok(SpacingDistribution {
        spacings,
        bin_edges,
        densities,
        ks_vs_poisson2d,
        ks_vs_ginibre,
        degenerate_count,
    })
}

/// Equal-width histogram normalized to unit integral.
pub fn histogram(sorted: &[f64], n_bins: usize) -> (Vec<f64>, Vec<f64>) {
    let max = sorted.last().copied().unwrap_or(1.0).max(1e-12);
    let width = max / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for s in sorted {
        let b = ((s / width) as usize).min(n_bins - 1);
        counts[b] += 1;
    }
    let total = sorted.len() as f64;
    let edges: Vec<f64> = (0..=n_bins).map(|i| i as f64 * width).collect();
    let densities: Vec<f64> = counts.iter().map(|c| *c as f64 / (total * width)).collect();
    (edges, densities)
}

/// 2d-Poisson nearest-neighbor spacing density, unit mean:
/// p(s) = (π/2) s exp(-π s²/4).
pub fn poisson2d_pdf(s: f64) -> f64 {
    if s < 0.0 {
        return 0.0;
    }
    0.5 * std::f64::consts::PI * s * (-0.25 * std::f64::consts::PI * s * s).exp()
}

/// CDF of [`poisson2d_pdf`]: 1 - exp(-π s²/4).
pub fn poisson2d_cdf(s: f64) -> f64 {
    if s < 0.0 {
        return 0.0;
    }
    1.0 - (-0.25 * std::f64::consts::PI * s * s).exp()
}

/// Empirical Ginibre spacing reference from directly sampled complex
/// Gaussian matrices, processed through the same unfolding pipeline.
#[derive(Debug, Clone)]
pub struct GinibreReference {
    /// Pooled unfolded spacings, sorted ascending, mean 1.
    pub sorted_spacings: Vec<f64>,
    pub dim: usize,
    pub n_samples: usize,
    pub seed: u64,
}

impl GinibreReference {
    pub fn cdf(&self, s: f64) -> f64 {
        let idx = self.sorted_spacings.partition_point(|x| *x <= s);
        idx as f64 / self.sorted_spacings.len() as f64
    }
}

/// Sample `n_samples` complex Ginibre matrices of dimension `dim` (≥ 100)
/// and pool their bulk unfolded spacings.
pub fn ginibre_reference(n_samples: usize, dim: usize, seed: u64) -> Result<GinibreReference> {
    if dim < 100 {
        return Err(QchaosError::domain("Ginibre reference requires dim ≥ 100"));
    }
    if n_samples == 0 {
        return Err(QchaosError::domain("n_samples must be ≥ 1"));
    }
    let samples: Vec<Result<SpacingSample>> = (0..n_samples as u64)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(*idx);
            let scale = 1.0 / (2.0f64).sqrt();
            let g: Array2<C64> = Array2::from_shape_fn((dim, dim), |_| {
                C64::new(
                    rng.sample::<f64, _>(StandardNormal) * scale,
                    rng.sample::<f64, _>(StandardNormal) * scale,
                )
            });
            let eigs = linalg::complex_eigenvalues(&g)?;
            let spectrum = ComplexSpectrum::new(eigs, format!("ginibre dim {dim} stream {idx}"))?;
            spacing_sample(&spectrum, Unfolding::LocalKnn(DEFAULT_KNN))
        })
        .collect();

    let mut pooled = Vec::new();
    for s in samples {
        pooled.extend(s?.spacings);
    }
    normalize_mean(&mut pooled);
    pooled.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(GinibreReference {
        sorted_spacings: pooled,
        dim,
        n_samples,
        seed,
    })
}

/// Kolmogorov-Smirnov distance of a sorted sample against a reference CDF.
pub fn ks_vs_cdf(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut worst = 0.0f64;
    for (i, s) in sorted.iter().enumerate() {
        let f = cdf(*s);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        worst = worst.max((f - lo).abs()).max((hi - f).abs());
    }
    worst
}

/// Two-sample Kolmogorov-Smirnov distance (both inputs sorted).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut ia = 0usize;
    let mut ib = 0usize;
    let mut worst = 0.0f64;
    while ia < a.len() && ib < b.len() {
        if a[ia] <= b[ib] {
            ia += 1;
        } else {
            ib += 1;
        }
        worst = worst.max((ia as f64 / na - ib as f64 / nb).abs());
    }
    worst
}

/// Spectral-statistics label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralClass {
    Poisson2d,
    Ginibre,
    Indeterminate,
}

impl std::fmt::Display for SpectralClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectralClass::Poisson2d => write!(f, "poisson2d"),
            SpectralClass::Ginibre => write!(f, "ginibre"),
            SpectralClass::Indeterminate => write!(f, "indeterminate"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Classification {
    pub label: SpectralClass,
    pub ks_poisson2d: f64,
    pub ks_ginibre: f64,
}

/// Label a spacing distribution by its closer reference; indeterminate when
/// the KS scores differ by less than the margin.
pub fn classify(dist: &SpacingDistribution) -> Classification {
    let (kp, kg) = (dist.ks_vs_poisson2d, dist.ks_vs_ginibre);
    let label = if (kp - kg).abs() <= CLASSIFY_MARGIN {
        SpectralClass::Indeterminate
    } else if kp < kg {
        SpectralClass::Poisson2d
    } else {
        SpectralClass::Ginibre
    };
    Classification {
        label,
        ks_poisson2d: kp,
        ks_ginibre: kg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn disk_points(n: usize, seed: u64) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts = Vec::with_capacity(n);
        while pts.len() < n {
            let x: f64 = rng.random_range(-1.0..1.0);
            let y: f64 = rng.random_range(-1.0..1.0);
            if x * x + y * y <= 1.0 {
                pts.push(C64::new(x, y));
            }
        }
        pts
    }

    fn small_reference() -> GinibreReference {
        ginibre_reference(20, 100, 99).unwrap()
    }

    #[test]
    fn poisson2d_density_properties() {
        assert_eq!(poisson2d_pdf(0.0), 0.0);
        // Normalization and mean by Simpson quadrature on [0, 12].
        let n = 24_000usize;
        let h = 12.0 / n as f64;
        let mut norm = 0.0;
        let mut mean = 0.0;
        for i in 0..=n {
            let s = i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            norm += w * poisson2d_pdf(s);
            mean += w * s * poisson2d_pdf(s);
        }
        norm *= h / 3.0;
        mean *= h / 3.0;
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-10);
        // CDF consistency.
        assert_abs_diff_eq!(poisson2d_cdf(1.0), 1.0 - (-0.25 * std::f64::consts::PI).exp(), epsilon = 1e-15);
    }

    #[test]
    fn uniform_disk_matches_poisson2d() {
        // Synthetic 2d-Poisson oracle: i.i.d. uniform points in a disk.
        let spectrum = ComplexSpectrum::new(disk_points(10_000, 5), "disk").unwrap();
        let sample = spacing_sample(&spectrum, Unfolding::LocalKnn(DEFAULT_KNN)).unwrap();
        let mut sorted = sample.spacings.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ks = ks_vs_cdf(&sorted, poisson2d_cdf);
        assert!(ks < 0.03, "KS to 2d-Poisson {ks:.4}");
        // Mean is 1 by construction.
        let mean: f64 = sorted.iter().sum::<f64>() / sorted.len() as f64;
        assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn ginibre_reference_is_reproducible_and_self_consistent() {
        let a = ginibre_reference(10, 100, 7).unwrap();
        let b = ginibre_reference(10, 100, 7).unwrap();
        assert_eq!(a.sorted_spacings, b.sorted_spacings);

        // Two independent batches agree within KS 0.02.
        let c = ginibre_reference(40, 120, 11).unwrap();
        let d = ginibre_reference(40, 120, 13).unwrap();
        let ks = ks_two_sample(&c.sorted_spacings, &d.sorted_spacings);
        assert!(ks < 0.02, "KS between independent references {ks:.4}");
    }

    #[test]
    fn sampled_ginibre_classified_against_references() {
        let reference = ginibre_reference(30, 150, 21).unwrap();
        // Fresh Ginibre spectra (different seed), via the pooled pipeline.
        let spectra: Vec<ComplexSpectrum> = (0..30u64)
            .map(|idx| {
                let mut rng = ChaCha8Rng::seed_from_u64(23);
                rng.set_stream(idx);
                let g: Array2<C64> = Array2::from_shape_fn((150, 150), |_| {
                    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                });
                ComplexSpectrum::new(linalg::complex_eigenvalues(&g).unwrap(), "fresh").unwrap()
            })
            .collect();
        let dist = pooled_nn_spacings(&spectra, Unfolding::default(), &reference).unwrap();
        assert!(dist.ks_vs_ginibre < 0.03, "KS to Ginibre {:.4}", dist.ks_vs_ginibre);
        let label = classify(&dist);
        assert_eq!(label.label, SpectralClass::Ginibre);
        assert!(label.ks_poisson2d > label.ks_ginibre + CLASSIFY_MARGIN);
    }

    #[test]
    fn ginibre_small_spacing_repulsion_is_cubic() {
        // Power-law fit of p(s) ∝ s^β over [0, 0.3] on a large pooled
        // reference. The maximum-likelihood estimator
        // β = -1 - n / Σ ln(s_i/a) is the log-domain fit that uses every
        // spacing in the window; binned log-log fits agree but are noisier.
        let cutoff = 0.3f64;
        let reference = ginibre_reference(600, 150, 31).unwrap();
        let small: Vec<f64> = reference
            .sorted_spacings
            .iter()
            .copied()
            .filter(|s| *s > 0.0 && *s <= cutoff)
            .collect();
        assert!(small.len() > 300, "only {} spacings below {cutoff}", small.len());
        let beta = -1.0 - small.len() as f64 / small.iter().map(|s| (s / cutoff).ln()).sum::<f64>();
        assert!(
            (2.7..=3.3).contains(&beta),
            "fitted repulsion exponent {beta:.3} from {} spacings",
            small.len()
        );
    }

    #[test]
    fn degenerate_pair_recorded_as_zero_spacing() {
        // Duplicate an interior point so the pair survives edge exclusion.
        let mut pts = disk_points(300, 9);
        let central = *pts
            .iter()
            .min_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap();
        pts.push(central);
        let spectrum = ComplexSpectrum::new(pts, "degenerate").unwrap();
        let sample = spacing_sample(&spectrum, Unfolding::default()).unwrap();
        assert!(sample.degenerate_count >= 2, "count {}", sample.degenerate_count);
        assert!(sample.spacings.iter().any(|s| *s == 0.0));
    }

    #[test]
    fn conjugate_filter_keeps_upper_half_plane_once() {
        let mut eigs = Vec::new();
        for k in 0..50 {
            let re = -(k as f64) * 0.1;
            let im = 0.3 + k as f64 * 0.01;
            eigs.push(C64::new(re, im));
            eigs.push(C64::new(re, -im));
        }
        for k in 0..7 {
            eigs.push(C64::new(-(k as f64), 0.0));
        }
        let spectrum = ComplexSpectrum::new(eigs, "synthetic").unwrap().filter_conjugate_symmetry();
        assert!(spectrum.symmetry_filtered);
        assert_eq!(spectrum.len(), 57);
        assert!(spectrum.eigenvalues.iter().all(|z| z.im >= 0.0));
    }

    #[test]
    fn classification_invariant_under_affine_rescaling() {
        let reference = small_reference();
        let pts = disk_points(2_000, 17);
        let base = ComplexSpectrum::new(pts.clone(), "base").unwrap();
        let dist0 = nn_spacings(&base, Unfolding::default(), &reference).unwrap();
        for (a, b) in [(3.5, C64::new(1.0, -2.0)), (0.02, C64::new(-4.0, 0.3))] {
            let moved: Vec<C64> = pts.iter().map(|z| a * z + b).collect();
            let sp = ComplexSpectrum::new(moved, "affine").unwrap();
            let dist = nn_spacings(&sp, Unfolding::default(), &reference).unwrap();
            assert!((dist.ks_vs_poisson2d - dist0.ks_vs_poisson2d).abs() < 1e-9);
            assert!((dist.ks_vs_ginibre - dist0.ks_vs_ginibre).abs() < 1e-9);
            assert_eq!(classify(&dist).label, classify(&dist0).label);
        }
    }

    #[test]
    fn single_spectrum_needs_enough_eigenvalues() {
        let reference = small_reference();
        let spectrum = ComplexSpectrum::new(disk_points(50, 3), "small").unwrap();
        assert!(matches!(
            nn_spacings(&spectrum, Unfolding::default(), &reference),
            Err(QchaosError::InsufficientStatistics(_))
        ));
    }

    #[test]
    fn histogram_integrates_to_one() {
        let spectrum = ComplexSpectrum::new(disk_points(3_000, 13), "hist").unwrap();
        let reference = small_reference();
        let dist = nn_spacings(&spectrum, Unfolding::default(), &reference).unwrap();
        let mut integral = 0.0;
        for (i, d) in dist.densities.iter().enumerate() {
            integral += d * (dist.bin_edges[i + 1] - dist.bin_edges[i]);
        }
        assert_abs_diff_eq!(integral, 1.0, epsilon = 1e-6);
        // Mean of spacings is 1 after unfolding.
        let mean: f64 = dist.spacings.iter().sum::<f64>() / dist.spacings.len() as f64;
        assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-3);
    }
}
