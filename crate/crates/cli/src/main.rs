//! Experiment driver: parse a config or recipe, validate, compute, and write
//! CSV artifacts with metadata sidecars.

mod config;
mod recipes;
mod runner;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "qchaos", version, about = "Open-system chaos experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment config or a built-in figure recipe.
    Run {
        /// Path to a flat key-value config file.
        #[arg(long, conflicts_with = "recipe")]
        config: Option<PathBuf>,
        /// Built-in recipe name (fig2, fig3, fig4, figS1..figS4).
        #[arg(long)]
        recipe: Option<String>,
        /// Output directory (overrides the config's `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Root seed (overrides the config's `seed`).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 0 uses all cores. Env QCHAOS_THREADS overrides.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a config or recipe without computing.
    Validate {
        #[arg(long, conflicts_with = "recipe")]
        config: Option<PathBuf>,
        #[arg(long)]
        recipe: Option<String>,
    },
    /// List built-in figure recipes.
    ListRecipes,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config: config_path,
            recipe,
            out,
            seed,
            threads,
        } => {
            let configs = gather_configs(config_path, recipe, out.clone(), seed)?;
            init_threads(threads.or_else(|| configs.first().map(|c| c.threads)))?;
            for cfg in &configs {
                let report = config::validate(cfg)?;
                if !report.ok {
                    eprintln!("{report}");
                    bail!("configuration invalid for {}", cfg.out.display());
                }
                println!(
                    "running {} -> {} ({})",
                    cfg.kind.name(),
                    cfg.out.display(),
                    report.summary
                );
                runner::run(cfg)?;
            }
            println!("done: {} experiment(s) written", configs.len());
            Ok(())
        }
        Command::Validate {
            config: config_path,
            recipe,
        } => {
            let configs = gather_configs(config_path, recipe, None, None)?;
            let mut any_bad = false;
            for cfg in &configs {
                let report = config::validate(cfg)?;
                println!("{} ({}):", cfg.kind.name(), cfg.out.display());
                println!("{report}");
                any_bad |= !report.ok;
            }
            if any_bad {
                bail!("validation failed");
            }
            Ok(())
        }
        Command::ListRecipes => {
            for (name, desc) in recipes::recipe_names() {
                println!("{name:8} {desc}");
            }
            Ok(())
        }
    }
}

fn gather_configs(
    config_path: Option<PathBuf>,
    recipe: Option<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<Vec<ExperimentConfig>> {
    let mut configs = match (config_path, recipe) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let mut cfg = ExperimentConfig::parse(&text)?;
            if let Some(out) = &out {
                cfg.out = out.clone();
            }
            vec![cfg]
        }
        (None, Some(name)) => {
            let out = out.unwrap_or_else(|| PathBuf::from("runs").join(&name));
            let seed = seed.unwrap_or(1);
            let recipe = recipes::build(&name, &out, seed)?;
            eprintln!("recipe {}: {}", recipe.name, recipe.description);
            recipe.parts
        }
        _ => bail!("exactly one of --config or --recipe is required"),
    };
    if let Some(seed) = seed {
        for cfg in configs.iter_mut() {
            cfg.seed = seed;
        }
    }
    Ok(configs)
}

fn init_threads(requested: Option<usize>) -> Result<()> {
    let n = match std::env::var("QCHAOS_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .context("QCHAOS_THREADS must be an unsigned integer")?,
        Err(_) => requested.unwrap_or(0),
    };
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("initializing the worker pool")?;
    }
    Ok(())
}
