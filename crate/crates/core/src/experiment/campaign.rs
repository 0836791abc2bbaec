//! Monte Carlo campaigns: every replicate runs all optimizers and reference
//! strategies on one shared request trace; results are aggregated per
//! generation in replicate order.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind};
use crate::error::Result;
use crate::ga::run_optimizer_on_trace;
use crate::model::ResourceModel;
use crate::rng::RngStream;
use crate::search::{replicate_stream, MonteCarloBench, SearchResult};
use crate::sim::{total_utility_unchecked, SimState};
use crate::space::DecisionSpace;
use crate::strategy::StrategyCode;
use crate::traffic::build_schedule_trace;

/// Fraction of the reference utility used for generations-to-threshold.
pub const THRESHOLD_FRACTION: f64 = 0.9;

/// Name of the exhaustive-search optimum series.
pub const OPTIMUM_SERIES: &str = "optimum";

/// Per-generation mean and standard deviation across replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Series {
    /// Mean of the per-generation means over one-based generations `from..=to`.
    pub fn window_mean(&self, from: usize, to: usize) -> f64 {
        let w = &self.mean[from - 1..to];
        w.iter().sum::<f64>() / w.len() as f64
    }

    /// First one-based generation whose mean reaches `level`.
    pub fn first_reaching(&self, level: f64) -> Option<usize> {
        self.mean.iter().position(|&m| m >= level).map(|i| i + 1)
    }
}

/// Binned fitness of every population member, pooled over replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub generation: usize,
    pub series: String,
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceSummary {
    pub states: usize,
    pub decisions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimumSummary {
    pub code: String,
    /// Monte Carlo long-term utility of the optimum over the search horizon.
    pub utility: f64,
    pub segment: usize,
    pub horizon: usize,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub config: ExperimentConfig,
    pub spaces: SpaceSummary,
    pub generations: usize,
    pub series: Vec<Series>,
    pub optimum: Option<OptimumSummary>,
    pub search: Option<SearchResult>,
    pub histograms: Vec<Histogram>,
}

impl CampaignResult {
    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    /// Utility that generations-to-threshold is measured against: the
    /// exhaustive-search optimum when available, otherwise the best baseline
    /// averaged over all generations.
    pub fn reference_utility(&self) -> Option<f64> {
        if let Some(o) = &self.optimum {
            return Some(o.utility);
        }
        self.config
            .baselines
            .iter()
            .filter_map(|b| self.series(b.name()))
            .map(|s| s.window_mean(1, self.generations))
            .reduce(f64::max)
    }

    pub fn generations_to_threshold(&self, name: &str) -> Option<usize> {
        let reference = self.reference_utility()?;
        self.series(name)?
            .first_reaching(THRESHOLD_FRACTION * reference)
    }
}

struct ReplicateOutcome {
    /// Indexed by series, then generation.
    series: Vec<Vec<f64>>,
    /// Indexed by (histogram generation, optimizer), then member.
    fitness: Vec<Vec<f64>>,
}

/// Runs the configured campaign. Replicates execute on the current rayon
/// pool; aggregation is in replicate order, so output does not depend on
/// the number of worker threads.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<CampaignResult> {
    cfg.validate()?;
    let model = &cfg.model;
    let (space, dspace) = DecisionSpace::from_model(model);
    let spaces = SpaceSummary {
        states: space.len(),
        decisions: dspace.len(),
    };
    let master = RngStream::new(cfg.seed);
    let generations = cfg.total_generations();

    if cfg.kind == ExperimentKind::Spaces {
        return Ok(CampaignResult {
            config: cfg.clone(),
            spaces,
            generations,
            series: Vec::new(),
            optimum: None,
            search: None,
            histograms: Vec::new(),
        });
    }

    let (search, optimum) = match &cfg.fullsearch {
        Some(fs) => {
            let replicates = fs.replicates.unwrap_or(cfg.replicates);
            let scenario = &cfg.schedule[fs.segment].scenario;
            let bench = MonteCarloBench::new(scenario, fs.horizon, replicates, &master)?;
            let res = bench.full_search(&dspace, model, fs.guard_bits, fs.dump_table)?;
            let summary = OptimumSummary {
                code: res.best_code.to_string(),
                utility: res.best_utility,
                segment: fs.segment,
                horizon: fs.horizon,
                replicates,
            };
            (Some(res), Some(summary))
        }
        None => (None, None),
    };

    let ga_configs = cfg
        .optimizers
        .iter()
        .map(|o| o.ga_config(cfg.term_length, &dspace))
        .collect::<Result<Vec<_>>>()?;
    let mut fixed: Vec<(String, StrategyCode)> = cfg
        .baselines
        .iter()
        .map(|b| Ok((b.name().to_string(), b.code(&dspace)?)))
        .collect::<Result<Vec<_>>>()?;
    if let Some(res) = &search {
        fixed.push((OPTIMUM_SERIES.to_string(), res.best_code.clone()));
    }
    let names: Vec<String> = cfg
        .optimizers
        .iter()
        .map(|o| o.name.clone())
        .chain(fixed.iter().map(|(n, _)| n.clone()))
        .collect();
    let hist_gens: Vec<usize> = cfg
        .histogram
        .as_ref()
        .map(|h| h.generations.clone())
        .unwrap_or_default();
    let segments = cfg.period_segments();
    let t = cfg.term_length;

    let run_replicate = |r: usize| -> Result<ReplicateOutcome> {
        let stream = replicate_stream(&master, r);
        let trace = build_schedule_trace(&stream.derive("trace"), &segments)?;
        let mut series = Vec::with_capacity(names.len());
        let mut fitness = vec![Vec::new(); hist_gens.len() * ga_configs.len()];
        for (i, (spec, ga)) in cfg.optimizers.iter().zip(&ga_configs).enumerate() {
            let reports = run_optimizer_on_trace(
                model,
                &trace,
                ga,
                &stream.derive(&format!("optimizer/{}", spec.name)),
                &dspace,
            )?;
            for (h, &g) in hist_gens.iter().enumerate() {
                fitness[h * ga_configs.len() + i] = reports[g - 1].fitness.clone();
            }
            series.push(reports.iter().map(|r| r.actual_utility).collect());
        }
        for (_, code) in &fixed {
            let mut state = SimState::empty(model.slice_types());
            series.push(
                trace
                    .periods()
                    .chunks(t)
                    .map(|term| {
                        total_utility_unchecked(code, term, &mut state, &dspace, model) / t as f64
                    })
                    .collect(),
            );
        }
        Ok(ReplicateOutcome { series, fitness })
    };

    let outcomes = (0..cfg.replicates)
        .into_par_iter()
        .map(run_replicate)
        .collect::<Result<Vec<_>>>()?;

    let series = names
        .iter()
        .enumerate()
        .map(|(k, name)| aggregate(name, outcomes.iter().map(|o| &o.series[k]), generations))
        .collect();
    let histograms = build_histograms(cfg, space_max_utility(model, &space), &hist_gens, &outcomes);

    Ok(CampaignResult {
        config: cfg.clone(),
        spaces,
        generations,
        series,
        optimum,
        search,
        histograms,
    })
}

fn aggregate<'a>(
    name: &str,
    per_replicate: impl Iterator<Item = &'a Vec<f64>>,
    generations: usize,
) -> Series {
    let rows: Vec<&Vec<f64>> = per_replicate.collect();
    let n = rows.len() as f64;
    let mut mean = vec![0.0; generations];
    for row in &rows {
        for (m, v) in mean.iter_mut().zip(row.iter()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let std = (0..generations)
        .map(|g| {
            if rows.len() < 2 {
                return 0.0;
            }
            let ss: f64 = rows.iter().map(|row| (row[g] - mean[g]).powi(2)).sum();
            (ss / (n - 1.0)).sqrt()
        })
        .collect();
    Series {
        name: name.to_string(),
        mean,
        std,
    }
}

fn space_max_utility(model: &ResourceModel, space: &crate::space::FeasibilitySpace) -> f64 {
    space
        .states()
        .iter()
        .map(|s| model.utility_of_counts(s.counts()))
        .fold(0.0, f64::max)
}

fn build_histograms(
    cfg: &ExperimentConfig,
    max_utility: f64,
    hist_gens: &[usize],
    outcomes: &[ReplicateOutcome],
) -> Vec<Histogram> {
    let Some(spec) = &cfg.histogram else {
        return Vec::new();
    };
    let hi = if max_utility > 0.0 { max_utility } else { 1.0 };
    let width = hi / spec.bins as f64;
    let opts = cfg.optimizers.len();
    let mut out = Vec::new();
    for (h, &g) in hist_gens.iter().enumerate() {
        for (i, opt) in cfg.optimizers.iter().enumerate() {
            let mut counts = vec![0u64; spec.bins];
            for o in outcomes {
                for &f in &o.fitness[h * opts + i] {
                    let bin = ((f / width).floor() as usize).min(spec.bins - 1);
                    counts[bin] += 1;
                }
            }
            out.push(Histogram {
                generation: g,
                series: opt.name.clone(),
                lo: 0.0,
                hi,
                counts,
            });
        }
    }
    out
}
