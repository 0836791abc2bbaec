//! Online genetic optimizer for slicing strategies.
//!
//! Every evolution term the population is operated "virtually" against the
//! same requests the network actually receives; the term-average utility of
//! each candidate is its fitness. The fittest candidate becomes the operated
//! strategy for the next term, and the population is regenerated by
//! fitness-proportional reproduction, pairwise segment crossover and bit-flip
//! mutation, optionally keeping elites untouched.

mod config;
mod operators;
mod optimizer;

pub use config::GaConfig;
pub use operators::{
    crossover_pair, mutate, reproduce, reproduction_counts, swap_segment, EvolutionRng,
};
pub use optimizer::{
    elite_indices, evaluate_fitness, evolve_generation, reports_to_csv, run_optimizer,
    run_optimizer_on_trace, select_actual, GenerationReport, Population,
};
