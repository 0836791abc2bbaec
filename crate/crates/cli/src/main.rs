use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use slaas_core::experiment::{
    emit_results, load_config, presets, run_experiment, CampaignResult, ExperimentConfig,
    ExperimentKind, FullSearchSpec,
};
use slaas_core::{DecisionSpace, FeasibilitySpace};

#[derive(Parser)]
#[command(
    name = "slaas",
    version,
    about = "Slicing-strategy optimization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    overrides: Overrides,

    /// Worker threads for replicate-level parallelism (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Monte Carlo replicates.
    #[arg(long, global = true)]
    replicates: Option<usize>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Source {
    /// Experiment configuration file (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Built-in preset name.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the feasibility and free-decision spaces and codebook size.
    Spaces(Source),
    /// Exhaustively evaluate every strategy of a small codebook.
    Fullsearch(Source),
    /// Run the experiment described by a configuration file.
    Run { config: PathBuf },
    /// Run a built-in preset (`list` shows the names).
    Presets {
        name: String,
        /// Print the preset as a configuration file instead of running it.
        #[arg(long)]
        print: bool,
    },
}

fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    load_config(&text).with_context(|| format!("invalid configuration {}", path.display()))
}

fn resolve(source: &Source, fallback: &str) -> Result<ExperimentConfig> {
    match (&source.config, &source.preset) {
        (Some(path), _) => read_config(path),
        (None, Some(name)) => Ok(presets::preset(name)?),
        (None, None) => Ok(presets::preset(fallback)?),
    }
}

fn apply(mut cfg: ExperimentConfig, o: &Overrides) -> Result<ExperimentConfig> {
    if let Some(seed) = o.seed {
        cfg.seed = seed;
    }
    if let Some(r) = o.replicates {
        cfg.replicates = r;
        if let Some(fs) = &mut cfg.fullsearch {
            fs.replicates = None;
        }
    }
    if let Some(out) = &o.out {
        cfg.output = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output
        .clone()
        .unwrap_or_else(|| PathBuf::from("results").join(cfg.kind.name()))
}

fn print_spaces(cfg: &ExperimentConfig) {
    let space = FeasibilitySpace::enumerate(&cfg.model);
    let dspace = DecisionSpace::enumerate(&space);
    print!("{}", cfg.model.to_text());
    print!("{}", space.to_text());
    print!("{}", dspace.to_text());
    println!("|S| = {}", space.len());
    println!("|D| = {}", dspace.len());
    if dspace.len() < 64 {
        println!("strategies = {}", 1u64 << dspace.len());
    } else {
        println!("strategies = 2^{}", dspace.len());
    }
}

fn run_and_emit(cfg: &ExperimentConfig) -> Result<CampaignResult> {
    let result = run_experiment(cfg)?;
    let dir = out_dir(cfg);
    let written = emit_results(&result, &dir)?;
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(result)
}

fn print_result(result: &CampaignResult) {
    if let Some(o) = &result.optimum {
        println!("optimum {} utility {:.4}", o.code, o.utility);
    }
    if result.series.is_empty() {
        return;
    }
    println!(
        "{:<20} {:>10} {:>10} {:>10}",
        "series", "final", "mean", "gen@90%"
    );
    for s in &result.series {
        let threshold = result
            .generations_to_threshold(&s.name)
            .map_or_else(|| "-".to_string(), |g| g.to_string());
        println!(
            "{:<20} {:>10.4} {:>10.4} {:>10}",
            s.name,
            s.mean.last().copied().unwrap_or(0.0),
            s.window_mean(1, s.mean.len()),
            threshold
        );
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring worker pool")?;
    }

    match &cli.command {
        Command::Spaces(source) => {
            let cfg = resolve(source, "spaces")?;
            print_spaces(&cfg);
        }
        Command::Fullsearch(source) => {
            let mut cfg = resolve(source, "fullsearch")?;
            cfg.kind = ExperimentKind::Fullsearch;
            let fs = cfg.fullsearch.get_or_insert_with(FullSearchSpec::default);
            fs.dump_table = true;
            let cfg = apply(cfg, &cli.overrides)?;
            let result = run_and_emit(&cfg)?;
            print_result(&result);
        }
        Command::Run { config } => {
            let cfg = apply(read_config(config)?, &cli.overrides)?;
            if cfg.kind == ExperimentKind::Spaces {
                print_spaces(&cfg);
            }
            let result = run_and_emit(&cfg)?;
            print_result(&result);
        }
        Command::Presets { name, print } => {
            if name == "list" {
                for n in presets::PRESET_NAMES {
                    println!("{n}");
                }
                return Ok(());
            }
            let cfg = apply(presets::preset(name)?, &cli.overrides)?;
            if *print {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            if cfg.kind == ExperimentKind::Spaces {
                print_spaces(&cfg);
            }
            let result = run_and_emit(&cfg)?;
            print_result(&result);
        }
    }
    Ok(())
}
