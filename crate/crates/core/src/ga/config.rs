use crate::error::{Error, Result};
use crate::strategy::StrategyCode;

/// Optimizer knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    /// Candidates per generation (`P`).
    pub population_size: usize,
    /// Operations periods per evolution term (`T`).
    pub term_length: usize,
    /// Probability that a pair undergoes crossover (`alpha`).
    pub crossover_rate: f64,
    /// Mutation rounds per candidate (`beta`).
    pub mutation_rounds: usize,
    /// Per-round probability of flipping one random bit (`gamma`).
    pub mutation_rate: f64,
    /// Keeps reproduction shares defined when every fitness is zero.
    pub epsilon: f64,
    /// Best candidates copied verbatim into the next generation.
    pub elite_count: usize,
    /// Codes that replace random members of the initial population.
    pub seeds: Vec<StrategyCode>,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 50,
            term_length: 6,
            crossover_rate: 1.0,
            mutation_rounds: 1,
            mutation_rate: 0.1,
            epsilon: 1e-9,
            elite_count: 0,
            seeds: Vec::new(),
        }
    }
}

impl GaConfig {
    pub fn with_population_size(mut self, p: usize) -> Self {
        self.population_size = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 {
            return Err(Error::param("population_size", "must be at least 1"));
        }
        if self.term_length == 0 {
            return Err(Error::param("term_length", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::param(
                "crossover_rate",
                format!("must be in [0, 1], got {}", self.crossover_rate),
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::param(
                "mutation_rate",
                format!("must be in [0, 1], got {}", self.mutation_rate),
            ));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::param(
                "epsilon",
                format!("must be a positive number, got {}", self.epsilon),
            ));
        }
        if self.elite_count >= self.population_size {
            return Err(Error::param(
                "elite_count",
                format!(
                    "must be below population_size ({}), got {}",
                    self.population_size, self.elite_count
                ),
            ));
        }
        if self.seeds.len() > self.population_size {
            return Err(Error::param(
                "seeds",
                format!(
                    "{} seed strategies exceed population_size {}",
                    self.seeds.len(),
                    self.population_size
                ),
            ));
        }
        Ok(())
    }
}
