//! Result files: `series.csv`, `summary.json`, `population_gN.csv` and
//! `fullsearch.csv`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::campaign::{CampaignResult, OptimumSummary, SpaceSummary, THRESHOLD_FRACTION};
use super::config::ExperimentConfig;
use crate::error::Result;
use crate::space::DecisionSpace;

/// `generation,series,mean,std`, series by series in campaign order.
pub fn series_csv(result: &CampaignResult) -> String {
    let mut out = String::from("generation,series,mean,std\n");
    for s in &result.series {
        for (g, (m, sd)) in s.mean.iter().zip(&s.std).enumerate() {
            let _ = writeln!(out, "{},{},{m},{sd}", g + 1, s.name);
        }
    }
    out
}

/// `series,bin_lo,bin_hi,count` for every histogram of generation `g`.
pub fn population_csv(result: &CampaignResult, generation: usize) -> String {
    let mut out = String::from("series,bin_lo,bin_hi,count\n");
    for h in result
        .histograms
        .iter()
        .filter(|h| h.generation == generation)
    {
        let width = (h.hi - h.lo) / h.counts.len() as f64;
        for (b, c) in h.counts.iter().enumerate() {
            let lo = h.lo + width * b as f64;
            let _ = writeln!(out, "{},{lo},{},{c}", h.series, lo + width);
        }
    }
    out
}

#[derive(Serialize)]
struct SeriesSummary {
    final_mean: f64,
    overall_mean: f64,
    generations_to_threshold: Option<usize>,
}

#[derive(Serialize)]
struct Summary<'a> {
    kind: &'static str,
    seed: u64,
    replicates: usize,
    generations: usize,
    term_length: usize,
    spaces: &'a SpaceSummary,
    optimum: Option<&'a OptimumSummary>,
    reference_utility: Option<f64>,
    threshold_fraction: f64,
    series: BTreeMap<&'a str, SeriesSummary>,
    config: &'a ExperimentConfig,
}

pub fn summary_json(result: &CampaignResult) -> String {
    let cfg = &result.config;
    let series = result
        .series
        .iter()
        .map(|s| {
            (
                s.name.as_str(),
                SeriesSummary {
                    final_mean: s.mean.last().copied().unwrap_or(0.0),
                    overall_mean: if s.mean.is_empty() {
                        0.0
                    } else {
                        s.window_mean(1, s.mean.len())
                    },
                    generations_to_threshold: result.generations_to_threshold(&s.name),
                },
            )
        })
        .collect();
    let summary = Summary {
        kind: cfg.kind.name(),
        seed: cfg.seed,
        replicates: cfg.replicates,
        generations: result.generations,
        term_length: cfg.term_length,
        spaces: &result.spaces,
        optimum: result.optimum.as_ref(),
        reference_utility: result.reference_utility(),
        threshold_fraction: THRESHOLD_FRACTION,
        series,
        config: cfg,
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    text
}

/// Writes every result file into `dir` (created if missing) and returns the
/// written paths.
pub fn emit_results(result: &CampaignResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put("series.csv".into(), series_csv(result))?;
    put("summary.json".into(), summary_json(result))?;
    let mut gens: Vec<usize> = result.histograms.iter().map(|h| h.generation).collect();
    gens.dedup();
    for g in gens {
        put(format!("population_g{g}.csv"), population_csv(result, g))?;
    }
    if let Some(search) = &result.search {
        let (_, dspace) = DecisionSpace::from_model(&result.config.model);
        if let Some(table) = search.table_csv(&dspace) {
            put("fullsearch.csv".into(), table)?;
        }
    }
    Ok(written)
}
