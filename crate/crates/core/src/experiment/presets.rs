//! Ready-made configurations for the standard experiments.

use super::config::{
    ExperimentConfig, ExperimentKind, FullSearchSpec, HistogramSpec, OptimizerSpec, ScheduleSegment,
};
use crate::error::{Error, Result};
use crate::model::ResourceModel;
use crate::strategy::Baseline;
use crate::traffic::ScenarioParams;

pub const PRESET_NAMES: [&str; 6] = [
    "effectiveness",
    "evolution",
    "nonstationary",
    "scalability",
    "spaces",
    "fullsearch",
];

const REPLICATES: usize = 500;
const SEED: u64 = 2019;

/// Unit pool, two slice types costing 0.3 each, utilities 2 and 1.
pub fn small_model() -> ResourceModel {
    ResourceModel::single_resource(1.0, vec![0.3, 0.3], vec![2.0, 1.0]).unwrap()
}

/// Unit pool, two slice types costing 0.03 each, utilities 0.2 and 0.1.
pub fn large_model() -> ResourceModel {
    ResourceModel::single_resource(1.0, vec![0.03, 0.03], vec![0.2, 0.1]).unwrap()
}

/// Heavy traffic for the large model: `[2.5, 10, 2, 10]`.
pub fn large_scenario() -> ScenarioParams {
    ScenarioParams::new(vec![2.5, 10.0], vec![2.0, 10.0]).unwrap()
}

fn optimizer(name: &str, population: usize, crossover: f64) -> OptimizerSpec {
    OptimizerSpec {
        name: name.to_string(),
        population_size: population,
        crossover_rate: crossover,
        mutation_rounds: 1,
        mutation_rate: 0.1,
        epsilon: 1e-9,
        elite_count: 0,
        seeds: Vec::new(),
    }
}

fn enhanced(name: &str, population: usize) -> OptimizerSpec {
    OptimizerSpec {
        elite_count: 1,
        seeds: vec![Baseline::Greedy.name().to_string()],
        ..optimizer(name, population, 0.9)
    }
}

fn base(
    kind: ExperimentKind,
    model: ResourceModel,
    schedule: Vec<ScheduleSegment>,
) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        seed: SEED,
        replicates: REPLICATES,
        term_length: 6,
        output: None,
        baselines: Baseline::ALL.to_vec(),
        model,
        schedule,
        optimizers: Vec::new(),
        fullsearch: None,
        histogram: None,
    }
}

fn segment(scenario: ScenarioParams, generations: usize) -> ScheduleSegment {
    ScheduleSegment {
        generations,
        scenario,
    }
}

/// Scenario #1 for 20 generations, optimizers with 10 and 50 candidates,
/// and the exhaustive-search optimum as reference.
pub fn effectiveness() -> ExperimentConfig {
    ExperimentConfig {
        optimizers: vec![optimizer("ga_p10", 10, 1.0), optimizer("ga_p50", 50, 1.0)],
        fullsearch: Some(FullSearchSpec::default()),
        ..base(
            ExperimentKind::Effectiveness,
            small_model(),
            vec![segment(ScenarioParams::scenario1(), 20)],
        )
    }
}

/// Population fitness distributions of a 50-candidate optimizer.
pub fn evolution() -> ExperimentConfig {
    ExperimentConfig {
        optimizers: vec![optimizer("ga_p50", 50, 1.0)],
        histogram: Some(HistogramSpec {
            generations: vec![1, 2, 3, 4, 5, 10, 20],
            bins: 24,
        }),
        ..base(
            ExperimentKind::Evolution,
            small_model(),
            vec![segment(ScenarioParams::scenario1(), 20)],
        )
    }
}

/// Scenarios #1, #2, #3 in blocks of 20 generations, compared with the
/// static optimum of scenario #1.
pub fn nonstationary() -> ExperimentConfig {
    ExperimentConfig {
        optimizers: vec![optimizer("ga_p50", 50, 1.0)],
        fullsearch: Some(FullSearchSpec::default()),
        ..base(
            ExperimentKind::Nonstationary,
            small_model(),
            vec![
                segment(ScenarioParams::scenario1(), 20),
                segment(ScenarioParams::scenario2(), 20),
                segment(ScenarioParams::scenario3(), 20),
            ],
        )
    }
}

/// The 1122-bit setting with plain optimizers and with greedy seeding,
/// one elite and a 0.9 crossover rate.
pub fn scalability() -> ExperimentConfig {
    ExperimentConfig {
        optimizers: vec![
            optimizer("ga_p10", 10, 1.0),
            optimizer("ga_p50", 50, 1.0),
            enhanced("ga_p10_enhanced", 10),
            enhanced("ga_p50_enhanced", 50),
        ],
        ..base(
            ExperimentKind::Scalability,
            large_model(),
            vec![segment(large_scenario(), 20)],
        )
    }
}

pub fn spaces() -> ExperimentConfig {
    base(
        ExperimentKind::Spaces,
        small_model(),
        vec![segment(ScenarioParams::scenario1(), 20)],
    )
}

/// Exhaustive search in scenario #1 with the per-strategy table.
pub fn fullsearch() -> ExperimentConfig {
    ExperimentConfig {
        fullsearch: Some(FullSearchSpec {
            dump_table: true,
            ..FullSearchSpec::default()
        }),
        ..base(
            ExperimentKind::Fullsearch,
            small_model(),
            vec![segment(ScenarioParams::scenario1(), 20)],
        )
    }
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    match name {
        "effectiveness" => Ok(effectiveness()),
        "evolution" => Ok(evolution()),
        "nonstationary" => Ok(nonstationary()),
        "scalability" => Ok(scalability()),
        "spaces" => Ok(spaces()),
        "fullsearch" => Ok(fullsearch()),
        other => Err(Error::Parse(format!(
            "unknown preset {other:?}; expected one of {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}
