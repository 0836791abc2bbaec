use std::fmt::Write as _;

use rand::seq::SliceRandom;

use super::config::GaConfig;
use super::operators::{
    crossover_pair, expand, mutate_in_place, reproduction_counts, EvolutionRng,
};
use crate::error::{Error, Result};
use crate::model::ResourceModel;
use crate::rng::RngStream;
use crate::sim::{check_trace, total_utility_unchecked, SimState};
use crate::space::DecisionSpace;
use crate::strategy::StrategyCode;
use crate::traffic::{build_schedule_trace, RequestTrace, ScenarioParams};

/// Candidate strategies and the slice sets of their virtual operation.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<StrategyCode>,
    pub virtual_states: Vec<SimState>,
}

impl Population {
    /// Population whose members all start virtual operation from `state`.
    pub fn new(members: Vec<StrategyCode>, state: &SimState) -> Self {
        let virtual_states = vec![state.clone(); members.len()];
        Population {
            members,
            virtual_states,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Re-anchors every virtual state to a copy of the actual state.
    pub fn reset_virtual_states(&mut self, actual: &SimState) {
        self.virtual_states.clear();
        self.virtual_states
            .resize(self.members.len(), actual.clone());
    }
}

/// Outcome of one evolution term.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationReport {
    /// One-based generation index `j`.
    pub generation: usize,
    /// Term-average virtual utility of every member.
    pub fitness: Vec<f64>,
    /// Strategy operated during this term (`d^j`).
    pub applied: StrategyCode,
    /// Term-average utility actually realized by `applied`.
    pub actual_utility: f64,
    /// Strategy selected for the next term (`d^{j+1}`).
    pub chosen: StrategyCode,
}

impl GenerationReport {
    pub fn best_fitness(&self) -> f64 {
        self.fitness
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean_fitness(&self) -> f64 {
        self.fitness.iter().sum::<f64>() / self.fitness.len() as f64
    }
}

/// CSV with header `generation,best_fitness,mean_fitness,actual_utility,chosen_code`.
pub fn reports_to_csv(reports: &[GenerationReport]) -> String {
    let mut out = String::from("generation,best_fitness,mean_fitness,actual_utility,chosen_code\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.generation,
            r.best_fitness(),
            r.mean_fitness(),
            r.actual_utility,
            r.chosen
        );
    }
    out
}

/// Operates every member virtually over the term from its own virtual state
/// and returns the term-average utilities. Virtual states advance to the end
/// of the term.
pub fn evaluate_fitness(
    pop: &mut Population,
    term: &RequestTrace,
    dspace: &DecisionSpace,
    model: &ResourceModel,
) -> Result<Vec<f64>> {
    if pop.members.len() != pop.virtual_states.len() {
        return Err(Error::Dimension {
            what: "virtual states vs. population",
            expected: pop.members.len(),
            actual: pop.virtual_states.len(),
        });
    }
    check_trace(term, model.slice_types())?;
    for (code, state) in pop.members.iter().zip(&pop.virtual_states) {
        code.check_against(dspace)?;
        if state.slice_types() != model.slice_types() {
            return Err(Error::Dimension {
                what: "virtual state vs. slice types",
                expected: model.slice_types(),
                actual: state.slice_types(),
            });
        }
        crate::space::ensure_feasible(model, &state.counts())?;
    }
    let horizon = term.horizon() as f64;
    Ok(pop
        .members
        .iter()
        .zip(pop.virtual_states.iter_mut())
        .map(|(code, state)| {
            total_utility_unchecked(code, term.periods(), state, dspace, model) / horizon
        })
        .collect())
}

fn argmax(fitness: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &f) in fitness.iter().enumerate() {
        if best.is_none_or(|b| f > fitness[b]) {
            best = Some(i);
        }
    }
    best
}

/// Index of the fittest member; the lowest index wins ties.
pub fn select_actual(fitness: &[f64]) -> Result<usize> {
    argmax(fitness).ok_or_else(|| Error::param("population", "must not be empty"))
}

/// The `count` fittest members, best first, lower index first among equals.
pub fn elite_indices(fitness: &[f64], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));
    order.truncate(count);
    order
}

/// Produces the next generation's strategies: elites first, then the
/// reproduced, crossed and mutated offspring.
pub fn evolve_generation(
    members: &[StrategyCode],
    fitness: &[f64],
    config: &GaConfig,
    rng: &mut EvolutionRng,
) -> Result<Vec<StrategyCode>> {
    config.validate()?;
    if members.len() != config.population_size || fitness.len() != members.len() {
        return Err(Error::Dimension {
            what: "population vs. population_size",
            expected: config.population_size,
            actual: members.len().min(fitness.len()),
        });
    }
    let elites = elite_indices(fitness, config.elite_count);
    let budget = config.population_size - elites.len();

    let mut offspring = expand(
        members,
        &reproduction_counts(fitness, config.epsilon, budget),
    );
    offspring.shuffle(&mut rng.shuffle);
    for pair in offspring.chunks_exact_mut(2) {
        let (a, b) = crossover_pair(
            &pair[0],
            &pair[1],
            config.crossover_rate,
            &mut rng.crossover,
        )?;
        pair[0] = a;
        pair[1] = b;
    }
    for child in &mut offspring {
        mutate_in_place(
            child,
            config.mutation_rounds,
            config.mutation_rate,
            &mut rng.mutation,
        );
    }

    let mut next: Vec<StrategyCode> = elites.iter().map(|&i| members[i].clone()).collect();
    next.extend(offspring);
    Ok(next)
}

/// Full online optimization over a piecewise-constant scenario schedule of
/// `(scenario, generations)` segments. Requests are drawn from the `trace`
/// sub-stream of `rng`.
pub fn run_optimizer(
    model: &ResourceModel,
    schedule: &[(ScenarioParams, usize)],
    config: &GaConfig,
    rng: &RngStream,
    dspace: &DecisionSpace,
) -> Result<Vec<GenerationReport>> {
    let segments: Vec<(ScenarioParams, usize)> = schedule
        .iter()
        .map(|(s, g)| (s.clone(), g * config.term_length))
        .collect();
    if segments.iter().all(|(_, p)| *p == 0) {
        return Err(Error::param(
            "schedule",
            "at least one generation is required",
        ));
    }
    let trace = build_schedule_trace(&rng.derive("trace"), &segments)?;
    run_optimizer_on_trace(model, &trace, config, rng, dspace)
}

/// Same as [`run_optimizer`] on a pre-built trace whose length is a whole
/// number of evolution terms. Only the `init`, `shuffle`, `crossover` and
/// `mutation` sub-streams of `rng` are consumed.
pub fn run_optimizer_on_trace(
    model: &ResourceModel,
    trace: &RequestTrace,
    config: &GaConfig,
    rng: &RngStream,
    dspace: &DecisionSpace,
) -> Result<Vec<GenerationReport>> {
    config.validate()?;
    let t = config.term_length;
    if trace.is_empty() || !trace.horizon().is_multiple_of(t) {
        return Err(Error::param(
            "trace",
            format!(
                "length {} is not a positive multiple of term_length {t}",
                trace.horizon()
            ),
        ));
    }
    check_trace(trace, model.slice_types())?;
    for seed in &config.seeds {
        seed.check_against(dspace)?;
    }

    let mut init = rng.derive("init").rng();
    let mut applied = StrategyCode::random(dspace, &mut init);
    let mut members: Vec<StrategyCode> = (0..config.population_size)
        .map(|_| StrategyCode::random(dspace, &mut init))
        .collect();
    for (slot, seed) in members.iter_mut().zip(&config.seeds) {
        *slot = seed.clone();
    }
    let mut evo = EvolutionRng::new(rng);

    let mut actual = SimState::empty(model.slice_types());
    let generations = trace.horizon() / t;
    let mut reports = Vec::with_capacity(generations);
    for j in 0..generations {
        let term = &trace.periods()[j * t..(j + 1) * t];
        let mut pop = Population::new(std::mem::take(&mut members), &actual);
        let term_trace = RequestTrace::from_periods(term.to_vec());
        let fitness = evaluate_fitness(&mut pop, &term_trace, dspace, model)?;
        let realized =
            total_utility_unchecked(&applied, term, &mut actual, dspace, model) / t as f64;
        let chosen = pop.members[select_actual(&fitness)?].clone();
        members = evolve_generation(&pop.members, &fitness, config, &mut evo)?;
        reports.push(GenerationReport {
            generation: j + 1,
            fitness,
            applied: std::mem::replace(&mut applied, chosen.clone()),
            actual_utility: realized,
            chosen,
        });
    }
    Ok(reports)
}
