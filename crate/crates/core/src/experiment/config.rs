//! TOML experiment configuration.
//!
//! ```toml
//! kind = "effectiveness"
//! seed = 1
//! replicates = 500
//! term_length = 6
//!
//! [model]
//! resources = [1.0]
//! costs = [[0.3, 0.3]]
//! utilities = [2.0, 1.0]
//!
//! [[schedule]]
//! generations = 20
//! scenario = { lambda = [0.5, 2.0], mu = [2.0, 10.0] }
//!
//! [[optimizer]]
//! name = "ga_p50"
//! population_size = 50
//! crossover_rate = 1.0
//! mutation_rounds = 1
//! mutation_rate = 0.1
//!
//! [fullsearch]
//! horizon = 120
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ga::GaConfig;
use crate::model::ResourceModel;
use crate::search::{DEFAULT_GUARD_BITS, DEFAULT_HORIZON};
use crate::space::DecisionSpace;
use crate::strategy::{Baseline, StrategyCode};
use crate::traffic::ScenarioParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Effectiveness,
    Evolution,
    Nonstationary,
    Scalability,
    Spaces,
    Fullsearch,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Effectiveness => "effectiveness",
            ExperimentKind::Evolution => "evolution",
            ExperimentKind::Nonstationary => "nonstationary",
            ExperimentKind::Scalability => "scalability",
            ExperimentKind::Spaces => "spaces",
            ExperimentKind::Fullsearch => "fullsearch",
        }
    }
}

/// A block of generations run under one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSegment {
    pub generations: usize,
    pub scenario: ScenarioParams,
}

fn default_epsilon() -> f64 {
    1e-9
}

/// One optimizer series of the campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    pub name: String,
    pub population_size: usize,
    pub crossover_rate: f64,
    pub mutation_rounds: usize,
    pub mutation_rate: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub elite_count: usize,
    /// Baseline names or 0/1 code strings injected into the first population.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<String>,
}

impl OptimizerSpec {
    pub fn ga_config(&self, term_length: usize, dspace: &DecisionSpace) -> Result<GaConfig> {
        let seeds = self
            .seeds
            .iter()
            .map(|s| match s.parse::<Baseline>() {
                Ok(b) => b.code(dspace),
                Err(_) => StrategyCode::parse(dspace, s),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GaConfig {
            population_size: self.population_size,
            term_length,
            crossover_rate: self.crossover_rate,
            mutation_rounds: self.mutation_rounds,
            mutation_rate: self.mutation_rate,
            epsilon: self.epsilon,
            elite_count: self.elite_count,
            seeds,
        })
    }
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}

fn default_guard() -> usize {
    DEFAULT_GUARD_BITS
}

/// Exhaustive-search reference for the campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullSearchSpec {
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Defaults to the campaign's replicate count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    #[serde(default = "default_guard")]
    pub guard_bits: usize,
    /// Schedule segment whose scenario the optimum is computed for.
    #[serde(default)]
    pub segment: usize,
    /// Write the utility of every strategy to `fullsearch.csv`.
    #[serde(default)]
    pub dump_table: bool,
}

impl Default for FullSearchSpec {
    fn default() -> Self {
        FullSearchSpec {
            horizon: DEFAULT_HORIZON,
            replicates: None,
            guard_bits: DEFAULT_GUARD_BITS,
            segment: 0,
            dump_table: false,
        }
    }
}

fn default_bins() -> usize {
    20
}

/// Population fitness distributions to record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramSpec {
    /// One-based generations to record.
    pub generations: Vec<usize>,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn default_term_length() -> usize {
    6
}

fn default_baselines() -> Vec<Baseline> {
    Baseline::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub replicates: usize,
    #[serde(default = "default_term_length")]
    pub term_length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default = "default_baselines")]
    pub baselines: Vec<Baseline>,
    pub model: ResourceModel,
    pub schedule: Vec<ScheduleSegment>,
    #[serde(default, rename = "optimizer")]
    pub optimizers: Vec<OptimizerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fullsearch: Option<FullSearchSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<HistogramSpec>,
}

fn invalid(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: path.into(),
        reason: reason.into(),
    }
}

impl ExperimentConfig {
    pub fn total_generations(&self) -> usize {
        self.schedule.iter().map(|s| s.generations).sum()
    }

    /// Schedule as `(scenario, periods)` segments.
    pub fn period_segments(&self) -> Vec<(ScenarioParams, usize)> {
        self.schedule
            .iter()
            .map(|s| (s.scenario.clone(), s.generations * self.term_length))
            .collect()
    }

    /// Checks every cross-field invariant; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(invalid("replicates", "must be at least 1"));
        }
        if self.term_length == 0 {
            return Err(invalid("term_length", "must be at least 1"));
        }
        if self.schedule.is_empty() {
            return Err(invalid("schedule", "at least one segment is required"));
        }
        let types = self.model.slice_types();
        for (i, seg) in self.schedule.iter().enumerate() {
            if seg.generations == 0 {
                return Err(invalid(
                    format!("schedule[{i}].generations"),
                    "must be at least 1",
                ));
            }
            if seg.scenario.slice_types() != types {
                return Err(invalid(
                    format!("schedule[{i}].scenario"),
                    format!(
                        "has {} slice types, model has {types}",
                        seg.scenario.slice_types()
                    ),
                ));
            }
        }
        if types != 2 {
            if let Some(b) = self.baselines.iter().find(|b| **b != Baseline::Greedy) {
                return Err(invalid(
                    "baselines",
                    format!("{b} needs exactly two slice types"),
                ));
            }
        }
        let (_, dspace) = DecisionSpace::from_model(&self.model);
        let mut names = std::collections::BTreeSet::new();
        for b in &self.baselines {
            names.insert(b.name().to_string());
        }
        for (i, opt) in self.optimizers.iter().enumerate() {
            let path = |f: &str| format!("optimizer[{i}].{f}");
            if opt.name.is_empty() || opt.name.contains([',', '\n', '"']) {
                return Err(invalid(
                    path("name"),
                    "must be a non-empty plain identifier",
                ));
            }
            if !names.insert(opt.name.clone()) {
                return Err(invalid(
                    path("name"),
                    format!("duplicate series name {:?}", opt.name),
                ));
            }
            let ga = opt
                .ga_config(self.term_length, &dspace)
                .map_err(|e| invalid(path("seeds"), e.to_string()))?;
            ga.validate().map_err(|e| match e {
                Error::InvalidParameter { name, reason } => invalid(path(&name), reason),
                other => other,
            })?;
        }
        if let Some(fs) = &self.fullsearch {
            if fs.horizon == 0 {
                return Err(invalid("fullsearch.horizon", "must be at least 1"));
            }
            if fs.replicates == Some(0) {
                return Err(invalid("fullsearch.replicates", "must be at least 1"));
            }
            if fs.segment >= self.schedule.len() {
                return Err(invalid(
                    "fullsearch.segment",
                    format!("no schedule segment {}", fs.segment),
                ));
            }
        }
        if let Some(h) = &self.histogram {
            if h.bins == 0 {
                return Err(invalid("histogram.bins", "must be at least 1"));
            }
            let total = self.total_generations();
            if let Some(g) = h.generations.iter().find(|&&g| g == 0 || g > total) {
                return Err(invalid(
                    "histogram.generations",
                    format!("generation {g} outside 1..={total}"),
                ));
            }
        }
        match self.kind {
            ExperimentKind::Effectiveness
            | ExperimentKind::Evolution
            | ExperimentKind::Nonstationary
            | ExperimentKind::Scalability
                if self.optimizers.is_empty() =>
            {
                Err(invalid(
                    "optimizer",
                    format!("{} needs at least one optimizer", self.kind.name()),
                ))
            }
            ExperimentKind::Evolution if self.histogram.is_none() => Err(invalid(
                "histogram",
                "evolution experiments need a [histogram] section",
            )),
            ExperimentKind::Fullsearch if self.fullsearch.is_none() => Err(invalid(
                "fullsearch",
                "fullsearch experiments need a [fullsearch] section",
            )),
            _ => Ok(()),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config is always representable as TOML")
    }
}

/// Parses and validates a TOML configuration document.
pub fn load_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"
kind = "effectiveness"
seed = 7
replicates = 3

[model]
resources = [1.0]
costs = [[0.3, 0.3]]
utilities = [2.0, 1.0]

[[schedule]]
generations = 20
scenario = { lambda = [0.5, 2.0], mu = [2.0, 10.0] }

[[optimizer]]
name = "ga_p50"
population_size = 50
crossover_rate = 1.0
mutation_rounds = 1
mutation_rate = 0.1
"#;

    #[test]
    fn parses_scenario_block() {
        let cfg = load_config(DOC).unwrap();
        assert_eq!(cfg.schedule[0].scenario, ScenarioParams::scenario1());
        assert_eq!(cfg.term_length, 6);
        assert_eq!(cfg.baselines, Baseline::ALL.to_vec());
        assert_eq!(cfg.optimizers[0].epsilon, 1e-9);
    }

    #[test]
    fn missing_population_size_is_named() {
        let doc = DOC.replace("population_size = 50\n", "");
        let err = load_config(&doc).unwrap_err().to_string();
        assert!(err.contains("population_size"), "{err}");
    }

    #[test]
    fn invariant_violations_carry_field_path() {
        let err = load_config(&DOC.replace("mutation_rate = 0.1", "mutation_rate = 1.5"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("optimizer[0].mutation_rate"), "{err}");
        let err = load_config(&DOC.replace("mu = [2.0, 10.0]", "mu = [0.0, 10.0]"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("mu[0]"), "{err}");
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = load_config(DOC).unwrap();
        assert_eq!(load_config(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn seeds_accept_names_and_bits() {
        let doc = DOC.replace(
            "mutation_rate = 0.1\n",
            "mutation_rate = 0.1\nseeds = [\"greedy\", \"000000000001\"]\n",
        );
        let cfg = load_config(&doc).unwrap();
        let (_, d) = DecisionSpace::from_model(&cfg.model);
        let ga = cfg.optimizers[0].ga_config(6, &d).unwrap();
        assert_eq!(ga.seeds[0].count_ones(), 12);
        assert_eq!(ga.seeds[1].count_ones(), 1);
        assert!(load_config(&DOC.replace(
            "mutation_rate = 0.1\n",
            "mutation_rate = 0.1\nseeds = [\"101\"]\n"
        ))
        .is_err());
    }

    #[test]
    fn empty_schedule_rejected() {
        let doc = format!(
            "schedule = []\n{}",
            DOC.replace(
                "[[schedule]]\ngenerations = 20\nscenario = { lambda = [0.5, 2.0], mu = [2.0, 10.0] }\n",
                ""
            )
        );
        let err = load_config(&doc).unwrap_err().to_string();
        assert!(err.contains("schedule"), "{err}");
    }
}
