//! Built-in experiment bundles reproducing the headline figures.
//!
//! A recipe is an ordered list of experiment configs, each writing into its
//! own subdirectory of the recipe output directory.

use crate::config::{ExperimentConfig, ExperimentKind};
use anyhow::{bail, Result};
use std::collections::BTreeMap;
use std::path::Path;

pub struct Recipe {
    pub name: &'static str,
    pub description: &'static str,
    pub parts: Vec<ExperimentConfig>,
}

fn part(
    kind: ExperimentKind,
    out: &Path,
    sub: &str,
    seed: u64,
    params: &[(&str, &str)],
) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        out: out.join(sub),
        seed,
        threads: 0,
        params: params
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect::<BTreeMap<_, _>>(),
    }
}

pub fn recipe_names() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "fig2",
            "coupling-plane maps of the long-time Lyapunov exponent (40x40) and \
             steady-state entropy (coarse 20x20) with and without photon loss",
        ),
        (
            "fig3",
            "Dicke-limit transient chaos: finite-time Lyapunov exponents, entropy \
             growth and spin-fluctuation correlators at lambda = 1.2, 2.0 for \
             kappa = 0, 1, plus early-time rates across lambda",
        ),
        (
            "fig4",
            "random-matrix Liouvillian entropy growth: regular (mu=0), chaotic \
             (mu=1) and projector-deformed (chi grid) ensembles at N = 49",
        ),
        (
            "figS1",
            "classical phase diagram at kappa = 1 and Bloch-sphere trajectories \
             along the lambda+ axis at lambda- = 2",
        ),
        (
            "figS2",
            "steady-state entropy and spin/photon fluctuations along lambda+ at \
             lambda- = 2, kappa = 1",
        ),
        (
            "figS3",
            "steady-state entropy contrast across lambda+ for spin sizes S = 5 \
             and S = 10 (long runtime)",
        ),
        (
            "figS4",
            "toy-Liouvillian spectra and spacing statistics for mu = 0 and \
             mu = 1 with chi = 0, 1 (100 seeds of 2401x2401 eigenproblems)",
        ),
    ]
}

pub fn build(name: &str, out: &Path, seed: u64) -> Result<Recipe> {
    let parts = match name {
        "fig2" => vec![
            part(
                ExperimentKind::ClassicalScan,
                out,
                "classical_k0",
                seed,
                &[
                    ("lambda_minus", "0:3:40"),
                    ("lambda_plus", "0:3:40"),
                    ("kappa", "0"),
                    ("t_final", "200"),
                    ("ensemble", "20"),
                ],
            ),
            part(
                ExperimentKind::ClassicalScan,
                out,
                "classical_k1",
                seed,
                &[
                    ("lambda_minus", "0:3:40"),
                    ("lambda_plus", "0:3:40"),
                    ("kappa", "1"),
                    ("t_final", "200"),
                    ("ensemble", "20"),
                ],
            ),
            part(
                ExperimentKind::QuantumScan,
                out,
                "quantum_k0",
                seed,
                &[
                    ("lambda_minus", "0:3:20"),
                    ("lambda_plus", "0:3:20"),
                    ("kappa", "0"),
                    ("spin", "5"),
                    ("photon_cutoff", "30"),
                    ("dt", "0.005"),
                    ("t_final", "30"),
                    ("ensemble", "4"),
                ],
            ),
            part(
                ExperimentKind::QuantumScan,
                out,
                "quantum_k1",
                seed,
                &[
                    ("lambda_minus", "0:3:20"),
                    ("lambda_plus", "0:3:20"),
                    ("kappa", "1"),
                    ("spin", "5"),
                    ("photon_cutoff", "20"),
                    ("dt", "0.005"),
                    ("t_final", "50"),
                    ("ensemble", "4"),
                ],
            ),
        ],
        "fig3" => vec![
            part(
                ExperimentKind::DickeDynamics,
                out,
                "dynamics",
                seed,
                &[
                    ("lambda", "1.2,2.0"),
                    ("kappa", "0,1"),
                    ("spin", "5"),
                    ("photon_cutoff", "20"),
                    ("photon_cutoff_closed", "30"),
                    ("dt", "0.005"),
                    ("t_final", "25"),
                    ("ensemble", "6"),
                    ("classical_t_final", "30"),
                    ("classical_ensemble", "20"),
                ],
            ),
            part(
                ExperimentKind::Fotoc,
                out,
                "fotoc_sz",
                seed,
                &[
                    ("lambda", "1.2,2.0"),
                    ("kappa", "0,1"),
                    ("generator", "sz"),
                    ("delta_phi", "0.0001"),
                    ("spin", "5"),
                    ("photon_cutoff", "20"),
                    ("photon_cutoff_closed", "30"),
                    ("dt", "0.005"),
                    ("t_final", "25"),
                    ("ensemble", "6"),
                ],
            ),
            part(
                ExperimentKind::DickeDynamics,
                out,
                "early_rates",
                seed,
                &[
                    ("lambda", "1.0:2.5:7"),
                    ("kappa", "1"),
                    ("spin", "5"),
                    ("photon_cutoff", "20"),
                    ("dt", "0.005"),
                    ("t_final", "1.0"),
                    ("ensemble", "6"),
                    ("classical_t_final", "30"),
                    ("classical_ensemble", "20"),
                ],
            ),
        ],
        "fig4" => vec![
            part(
                ExperimentKind::ToyDynamics,
                out,
                "regular",
                seed,
                &[
                    ("n_total", "49"),
                    ("gamma", "1"),
                    ("mu", "0"),
                    ("chi", "0"),
                    ("seeds", "50"),
                    ("dt", "0.02"),
                    ("t_final", "60"),
                ],
            ),
            part(
                ExperimentKind::ToyDynamics,
                out,
                "chi_sweep",
                seed,
                &[
                    ("n_total", "49"),
                    ("gamma", "1"),
                    ("mu", "1"),
                    ("chi", "0,0.25,0.5,0.75,1"),
                    ("seeds", "50"),
                    ("dt", "0.02"),
                    ("t_final", "60"),
                ],
            ),
        ],
        "figS1" => vec![
            part(
                ExperimentKind::ClassicalScan,
                out,
                "phase_diagram",
                seed,
                &[
                    ("lambda_minus", "0:3:40"),
                    ("lambda_plus", "0:4:40"),
                    ("kappa", "1"),
                    ("t_final", "200"),
                    ("ensemble", "20"),
                ],
            ),
            part(
                ExperimentKind::DickeDynamics,
                out,
                "bloch_trajectories",
                seed,
                &[
                    ("lambda_minus", "2.0"),
                    ("lambda_plus", "0.5,1.5,2.5,3.0,3.5,4.5"),
                    ("kappa", "1"),
                    ("classical_only", "true"),
                    ("trajectories", "true"),
                    ("classical_t_final", "60"),
                    ("classical_ensemble", "1"),
                ],
            ),
        ],
        "figS2" => vec![part(
            ExperimentKind::QuantumScan,
            out,
            "lambda_plus_sweep",
            seed,
            &[
                ("lambda_minus", "2.0"),
                ("lambda_plus", "0.5:5:10"),
                ("kappa", "1"),
                ("spin", "5"),
                ("photon_cutoff", "20"),
                ("dt", "0.005"),
                ("t_final", "50"),
                ("ensemble", "4"),
                ("fluctuations", "true"),
            ],
        )],
        "figS3" => vec![
            part(
                ExperimentKind::QuantumScan,
                out,
                "spin5",
                seed,
                &[
                    ("lambda_minus", "2.0"),
                    ("lambda_plus", "2.5:4.5:5"),
                    ("kappa", "1"),
                    ("spin", "5"),
                    ("photon_cutoff", "20"),
                    ("dt", "0.005"),
                    ("t_final", "50"),
                    ("ensemble", "4"),
                ],
            ),
            part(
                ExperimentKind::QuantumScan,
                out,
                "spin10",
                seed,
                &[
                    ("lambda_minus", "2.0"),
                    ("lambda_plus", "2.5:4.5:5"),
                    ("kappa", "1"),
                    ("spin", "10"),
                    ("photon_cutoff", "26"),
                    ("dt", "0.0025"),
                    ("t_final", "50"),
                    ("ensemble", "4"),
                ],
            ),
        ],
        "figS4" => {
            let mut parts = Vec::new();
            for (sub, mu, chi) in [("mu0", "0", "0"), ("mu1_chi0", "1", "0"), ("mu1_chi1", "1", "1")] {
                parts.push(part(
                    ExperimentKind::ToySpectrum,
                    out,
                    sub,
                    seed,
                    &[
                        ("n_total", "49"),
                        ("gamma", "1"),
                        ("mu", mu),
                        ("chi", chi),
                        ("seeds", "100"),
                        ("reference_samples", "60"),
                        ("reference_dim", "200"),
                    ],
                ));
            }
            parts
        }
        other => bail!("unknown recipe '{other}'; see `qchaos list-recipes`"),
    };
    let description = recipe_names()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, d)| d)
        .unwrap_or("");
    Ok(Recipe {
        name: match name {
            "fig2" => "fig2",
            "fig3" => "fig3",
            "fig4" => "fig4",
            "figS1" => "figS1",
            "figS2" => "figS2",
            "figS3" => "figS3",
            _ => "figS4",
        },
        description,
        parts,
    })
}
