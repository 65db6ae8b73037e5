//! Flat key-value experiment configuration.
//!
//! Two sections: `[experiment]` holds the kind, output directory, seed and
//! thread count; `[params]` holds the per-kind numeric parameters. Values
//! are numbers, comma lists, `start:stop:count` ranges, or booleans — no
//! deeper nesting, so files stay diffable and hand-editable.

use anyhow::{anyhow, bail, Context, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    ClassicalScan,
    QuantumScan,
    DickeDynamics,
    Fotoc,
    ToySpectrum,
    ToyDynamics,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "classical-scan" => Ok(ExperimentKind::ClassicalScan),
            "quantum-scan" => Ok(ExperimentKind::QuantumScan),
            "dicke-dynamics" => Ok(ExperimentKind::DickeDynamics),
            "fotoc" => Ok(ExperimentKind::Fotoc),
            "toy-spectrum" => Ok(ExperimentKind::ToySpectrum),
            "toy-dynamics" => Ok(ExperimentKind::ToyDynamics),
            other => bail!(
                "unknown experiment kind '{other}' (expected classical-scan, quantum-scan, \
                 dicke-dynamics, fotoc, toy-spectrum or toy-dynamics)"
            ),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::ClassicalScan => "classical-scan",
            ExperimentKind::QuantumScan => "quantum-scan",
            ExperimentKind::DickeDynamics => "dicke-dynamics",
            ExperimentKind::Fotoc => "fotoc",
            ExperimentKind::ToySpectrum => "toy-spectrum",
            ExperimentKind::ToyDynamics => "toy-dynamics",
        }
    }
}

/// One experiment: a kind plus its flat parameter map.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub out: PathBuf,
    pub seed: u64,
    pub threads: usize,
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    /// Parse the flat INI-style text; errors carry line numbers.
    pub fn parse(text: &str) -> Result<Self> {
        let mut section = String::new();
        let mut experiment: BTreeMap<String, String> = BTreeMap::new();
        let mut params: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| anyhow!("line {}: unterminated section header", lineno + 1))?;
                section = name.trim().to_string();
                if section != "experiment" && section != "params" {
                    bail!("line {}: unknown section '[{}]'", lineno + 1, section);
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected 'key = value'", lineno + 1))?;
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if key.is_empty() || value.is_empty() {
                bail!("line {}: empty key or value", lineno + 1);
            }
            match section.as_str() {
                "experiment" => experiment.insert(key, value),
                "params" => params.insert(key, value),
                _ => bail!("line {}: key before any [section]", lineno + 1),
            };
        }

        let kind = ExperimentKind::parse(
            experiment
                .get("kind")
                .ok_or_else(|| anyhow!("[experiment] must set 'kind'"))?,
        )?;
        let out = PathBuf::from(
            experiment
                .get("out")
                .ok_or_else(|| anyhow!("[experiment] must set 'out'"))?,
        );
        let seed: u64 = experiment
            .get("seed")
            .map(|s| s.parse().context("seed must be an unsigned integer"))
            .transpose()?
            .unwrap_or(1);
        let threads: usize = experiment
            .get("threads")
            .map(|s| s.parse().context("threads must be an unsigned integer"))
            .transpose()?
            .unwrap_or(0);
        Ok(ExperimentConfig {
            kind,
            out,
            seed,
            threads,
            params,
        })
    }

    /// Canonical text form; parse(echo(cfg)) reproduces the config.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[experiment]");
        let _ = writeln!(s, "kind = {}", self.kind.name());
        let _ = writeln!(s, "out = {}", self.out.display());
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "threads = {}", self.threads);
        let _ = writeln!(s);
        let _ = writeln!(s, "[params]");
        for (k, v) in &self.params {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.parse().with_context(|| format!("param '{key}' must be a number, got '{v}'")),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .with_context(|| format!("param '{key}' must be an unsigned integer, got '{v}'")),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => match v.as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                other => bail!("param '{key}' must be a boolean, got '{other}'"),
            },
        }
    }

    pub fn str_or(&self, key: &str, default: &str) -> String {
        self.params.get(key).cloned().unwrap_or_else(|| default.to_string())
    }

    /// Comma list or `start:stop:count` range of numbers.
    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.params.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => parse_f64_list(v).with_context(|| format!("param '{key}'")),
        }
    }
}

pub fn parse_f64_list(v: &str) -> Result<Vec<f64>> {
    if v.contains(':') {
        let parts: Vec<&str> = v.split(':').collect();
        if parts.len() != 3 {
            bail!("range must be start:stop:count, got '{v}'");
        }
        let start: f64 = parts[0].trim().parse().context("range start")?;
        let stop: f64 = parts[1].trim().parse().context("range stop")?;
        let count: usize = parts[2].trim().parse().context("range count")?;
        if count < 1 {
            bail!("range count must be ≥ 1");
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        let step = (stop - start) / (count - 1) as f64;
        Ok((0..count).map(|i| start + step * i as f64).collect())
    } else {
        v.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| anyhow!("'{p}': {e}")))
            .collect()
    }
}

/// Dry-run validation report.
#[derive(Debug)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<String>,
    pub memory_estimate_mb: f64,
    pub summary: String,
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.ok {
            writeln!(f, "ok: {}", self.summary)?;
            write!(f, "estimated peak memory: {:.1} MB", self.memory_estimate_mb)?;
        } else {
            writeln!(f, "invalid configuration:")?;
            for v in &self.violations {
                writeln!(f, "  - {v}")?;
            }
            write!(f, "(no compute was started)")?;
        }
        Ok(())
    }
}

/// Check every precondition and dimension guard without computing.
pub fn validate(cfg: &ExperimentConfig) -> Result<ValidationReport> {
    let mut violations: Vec<String> = Vec::new();
    let mut mem_mb = 1.0f64;
    let mut summary = String::new();

    let check_positive = |key: &str, value: f64, violations: &mut Vec<String>| {
        if !(value > 0.0) || !value.is_finite() {
            violations.push(format!("{key} must be positive and finite, got {value}"));
        }
    };

    match cfg.kind {
        ExperimentKind::ClassicalScan | ExperimentKind::QuantumScan => {
            let lm = cfg.f64_list_or("lambda_minus", &[0.0])?;
            let lp = cfg.f64_list_or("lambda_plus", &[0.0])?;
            let kappa = cfg.f64_or("kappa", 1.0)?;
            if lm.is_empty() || lp.is_empty() {
                violations.push("scan grids must be nonempty".into());
            }
            if kappa < 0.0 {
                violations.push(format!("kappa must be ≥ 0, got {kappa}"));
            }
            let dt = cfg.f64_or("dt", 1e-3)?;
            let t_final = cfg.f64_or("t_final", 200.0)?;
            check_positive("dt", dt, &mut violations);
            check_positive("t_final", t_final, &mut violations);
            let ensemble = cfg.usize_or("ensemble", 20)?;
            if ensemble == 0 {
                violations.push("ensemble must be ≥ 1".into());
            }
            if cfg.kind == ExperimentKind::QuantumScan {
                let spin = cfg.f64_or("spin", 5.0)?;
                let n_max = cfg.usize_or("photon_cutoff", 20)?;
                match qchaos::hilbert::HilbertSpec::new(spin, n_max) {
                    Err(e) => violations.push(e.to_string()),
                    Ok(spec) => {
                        let d = spec.d_total();
                        // state + four stage buffers + scratch, complex f64
                        mem_mb = (8 * d * d * 16) as f64 / 1e6;
                        if d > 2000 {
                            violations.push(format!(
                                "d_total = {d} too large for dense density-matrix propagation (max 2000); \
                                 reduce spin or photon_cutoff"
                            ));
                        }
                        summary = format!(
                            "{} grid points at d_total = {d}, ensemble {ensemble}",
                            lm.len() * lp.len()
                        );
                    }
                }
            } else {
                summary = format!("{} grid cells, ensemble {ensemble}", lm.len() * lp.len());
            }
        }
        ExperimentKind::DickeDynamics | ExperimentKind::Fotoc => {
            let spin = cfg.f64_or("spin", 5.0)?;
            let n_max = cfg.usize_or("photon_cutoff", 20)?;
            let dt = cfg.f64_or("dt", 5e-3)?;
            let t_final = cfg.f64_or("t_final", 25.0)?;
            check_positive("dt", dt, &mut violations);
            check_positive("t_final", t_final, &mut violations);
            match qchaos::hilbert::HilbertSpec::new(spin, n_max) {
                Err(e) => violations.push(e.to_string()),
                Ok(spec) => {
                    let d = spec.d_total();
                    mem_mb = (8 * d * d * 16) as f64 / 1e6;
                    if d > 2000 {
                        violations.push(format!("d_total = {d} exceeds the dense guard (2000)"));
                    }
                    let combos = cfg.f64_list_or("lambda", &[2.0])?.len()
                        * cfg.f64_list_or("kappa", &[1.0])?.len();
                    summary = format!("{combos} parameter combinations at d_total = {d}");
                }
            }
            if cfg.kind == ExperimentKind::Fotoc {
                let delta_phi = cfg.f64_or("delta_phi", 1e-4)?;
                check_positive("delta_phi", delta_phi, &mut violations);
                let g = cfg.str_or("generator", "sz");
                if g != "sz" && g != "n" {
                    violations.push(format!("generator must be 'sz' or 'n', got '{g}'"));
                }
            }
        }
        ExperimentKind::ToySpectrum | ExperimentKind::ToyDynamics => {
            let n_total = cfg.usize_or("n_total", 49)?;
            let m = (n_total as f64).sqrt().round() as usize;
            if m * m != n_total || m < 2 {
                violations.push(format!("n_total = {n_total} must be a perfect square M² with M ≥ 2"));
            }
            for key in ["mu", "chi"] {
                for v in cfg.f64_list_or(key, &[0.0])? {
                    if !(0.0..=1.0).contains(&v) {
                        violations.push(format!("{key} values must lie in [0, 1], got {v}"));
                    }
                }
            }
            let gamma = cfg.f64_or("gamma", 1.0)?;
            if gamma < 0.0 {
                violations.push(format!("gamma must be ≥ 0, got {gamma}"));
            }
            let seeds = cfg.usize_or("seeds", 50)?;
            if seeds == 0 {
                violations.push("seeds must be ≥ 1".into());
            }
            if n_total > qchaos::lindblad::VECTORIZE_GUARD {
                violations.push(format!(
                    "n_total = {n_total} exceeds the dense superoperator guard ({})",
                    qchaos::lindblad::VECTORIZE_GUARD
                ));
            }
            // Dense real similarity matrix plus eigensolver workspace.
            mem_mb = (3 * n_total * n_total * n_total * n_total * 8) as f64 / 1e6;
            summary = format!("N = {n_total}, {seeds} seeds");
        }
    }

    Ok(ValidationReport {
        ok: violations.is_empty(),
        violations,
        memory_estimate_mb: mem_mb,
        summary,
    })
}
