//! Exhaustive evaluation of every strategy in a small codebook.
//!
//! All strategies are scored on the same replicate traces, so differences
//! between them are never due to sampling noise in the request stream.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ResourceModel;
use crate::rng::RngStream;
use crate::sim::{check_trace, total_utility_unchecked, SimState};
use crate::space::DecisionSpace;
use crate::strategy::StrategyCode;
use crate::traffic::{build_request_trace, RequestTrace, ScenarioParams};

/// Largest codeword length the full search accepts by default (16.7M codes).
pub const DEFAULT_GUARD_BITS: usize = 24;
/// Default horizon: 20 generations of six periods.
pub const DEFAULT_HORIZON: usize = 120;

/// All `2^|D|` codes in ascending binary order.
pub fn enumerate_all_strategies(
    dspace: &DecisionSpace,
    guard_bits: usize,
) -> Result<impl Iterator<Item = StrategyCode> + '_> {
    check_guard(dspace, guard_bits)?;
    Ok((0..1u64 << dspace.len()).map(move |v| StrategyCode::from_index(dspace, v)))
}

fn check_guard(dspace: &DecisionSpace, guard_bits: usize) -> Result<()> {
    let limit = guard_bits.min(63);
    if dspace.len() > limit {
        return Err(Error::SearchGuard {
            bits: dspace.len(),
            limit,
        });
    }
    Ok(())
}

/// Trace of replicate `r` under `rng`: the `trace` sub-stream of the
/// `replicate`/`r` child.
pub fn replicate_stream(rng: &RngStream, r: usize) -> RngStream {
    rng.derive_indexed("replicate", r as u64)
}

/// A fixed set of replicate traces on which strategies are compared.
#[derive(Debug, Clone)]
pub struct MonteCarloBench {
    traces: Vec<RequestTrace>,
    horizon: usize,
}

impl MonteCarloBench {
    pub fn new(
        scenario: &ScenarioParams,
        horizon: usize,
        replicates: usize,
        rng: &RngStream,
    ) -> Result<Self> {
        if replicates == 0 {
            return Err(Error::param("replicates", "must be at least 1"));
        }
        let traces = (0..replicates)
            .map(|r| {
                build_request_trace(&replicate_stream(rng, r).derive("trace"), scenario, horizon)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MonteCarloBench { traces, horizon })
    }

    pub fn from_traces(traces: Vec<RequestTrace>) -> Result<Self> {
        let horizon = traces.first().map_or(0, RequestTrace::horizon);
        if horizon == 0 || traces.iter().any(|t| t.horizon() != horizon) {
            return Err(Error::param(
                "traces",
                "need at least one trace, all of equal non-zero length",
            ));
        }
        Ok(MonteCarloBench { traces, horizon })
    }

    pub fn traces(&self) -> &[RequestTrace] {
        &self.traces
    }

    pub fn replicates(&self) -> usize {
        self.traces.len()
    }

    fn validate(&self, model: &ResourceModel) -> Result<()> {
        self.traces
            .iter()
            .try_for_each(|t| check_trace(t, model.slice_types()))
    }

    /// Per-replicate long-term average utility, each from an idle network.
    pub fn replicate_utilities(
        &self,
        code: &StrategyCode,
        dspace: &DecisionSpace,
        model: &ResourceModel,
    ) -> Result<Vec<f64>> {
        code.check_against(dspace)?;
        self.validate(model)?;
        Ok(self
            .traces
            .iter()
            .map(|t| {
                let mut state = SimState::empty(model.slice_types());
                total_utility_unchecked(code, t.periods(), &mut state, dspace, model)
                    / self.horizon as f64
            })
            .collect())
    }

    /// Mean over replicates of the long-term average utility.
    pub fn evaluate(
        &self,
        code: &StrategyCode,
        dspace: &DecisionSpace,
        model: &ResourceModel,
    ) -> Result<f64> {
        let per = self.replicate_utilities(code, dspace, model)?;
        Ok(per.iter().sum::<f64>() / per.len() as f64)
    }

    fn evaluate_unchecked(
        &self,
        code: &StrategyCode,
        dspace: &DecisionSpace,
        model: &ResourceModel,
        state: &mut SimState,
    ) -> f64 {
        let mut sum = 0.0;
        for t in &self.traces {
            *state = SimState::empty(model.slice_types());
            sum += total_utility_unchecked(code, t.periods(), state, dspace, model)
                / self.horizon as f64;
        }
        sum / self.traces.len() as f64
    }

    /// Scores every code of the codebook; argmax with ties to the lowest code.
    pub fn full_search(
        &self,
        dspace: &DecisionSpace,
        model: &ResourceModel,
        guard_bits: usize,
        keep_table: bool,
    ) -> Result<SearchResult> {
        check_guard(dspace, guard_bits)?;
        self.validate(model)?;
        let count = 1u64 << dspace.len();
        let utilities: Vec<f64> = (0..count)
            .into_par_iter()
            .map_init(
                || SimState::empty(model.slice_types()),
                |state, v| {
                    let code = StrategyCode::from_index(dspace, v);
                    self.evaluate_unchecked(&code, dspace, model, state)
                },
            )
            .collect();
        let mut best = 0usize;
        for (i, &u) in utilities.iter().enumerate() {
            if u > utilities[best] {
                best = i;
            }
        }
        Ok(SearchResult {
            best_code: StrategyCode::from_index(dspace, best as u64),
            best_utility: utilities[best],
            per_strategy_utilities: keep_table.then_some(utilities),
        })
    }
}

/// Best strategy found by the exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_code: StrategyCode,
    /// Monte Carlo mean long-term utility of `best_code`.
    pub best_utility: f64,
    /// Utility of every code, indexed by its binary value.
    pub per_strategy_utilities: Option<Vec<f64>>,
}

impl SearchResult {
    /// `code,mean_utility` rows for every evaluated strategy.
    pub fn table_csv(&self, dspace: &DecisionSpace) -> Option<String> {
        let table = self.per_strategy_utilities.as_ref()?;
        let mut out = String::from("code,mean_utility\n");
        for (v, u) in table.iter().enumerate() {
            out.push_str(&format!(
                "{},{u}\n",
                StrategyCode::from_index(dspace, v as u64)
            ));
        }
        Some(out)
    }
}

/// Monte Carlo estimate of the expected long-term average utility of `code`.
pub fn evaluate_strategy_mc(
    code: &StrategyCode,
    model: &ResourceModel,
    scenario: &ScenarioParams,
    horizon: usize,
    replicates: usize,
    rng: &RngStream,
    dspace: &DecisionSpace,
) -> Result<f64> {
    MonteCarloBench::new(scenario, horizon, replicates, rng)?.evaluate(code, dspace, model)
}

/// Exhaustive search over every code; see [`MonteCarloBench::full_search`].
pub fn find_global_optimum(
    model: &ResourceModel,
    scenario: &ScenarioParams,
    horizon: usize,
    replicates: usize,
    rng: &RngStream,
    dspace: &DecisionSpace,
    guard_bits: usize,
) -> Result<SearchResult> {
    check_guard(dspace, guard_bits)?;
    MonteCarloBench::new(scenario, horizon, replicates, rng)?
        .full_search(dspace, model, guard_bits, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::Baseline;

    fn unit_pool() -> (ResourceModel, DecisionSpace) {
        let m = ResourceModel::single_resource(1.0, vec![0.3, 0.3], vec![2.0, 1.0]).unwrap();
        let d = DecisionSpace::from_model(&m).1;
        (m, d)
    }

    #[test]
    fn enumerates_4096_codes() {
        let (_, d) = unit_pool();
        let codes: Vec<_> = enumerate_all_strategies(&d, DEFAULT_GUARD_BITS)
            .unwrap()
            .collect();
        assert_eq!(codes.len(), 4096);
        assert_eq!(codes[0].count_ones(), 0);
        assert_eq!(codes[4095].count_ones(), 12);
    }

    #[test]
    fn empty_space_has_one_code() {
        let m = ResourceModel::single_resource(0.0, vec![0.3, 0.3], vec![2.0, 1.0]).unwrap();
        let d = DecisionSpace::from_model(&m).1;
        let codes: Vec<_> = enumerate_all_strategies(&d, DEFAULT_GUARD_BITS)
            .unwrap()
            .collect();
        assert_eq!(codes.len(), 1);
        assert!(codes[0].is_empty());
    }

    #[test]
    fn guard_blocks_large_codebooks() {
        let m = ResourceModel::single_resource(1.0, vec![0.03, 0.03], vec![0.2, 0.1]).unwrap();
        let d = DecisionSpace::from_model(&m).1;
        assert!(matches!(
            enumerate_all_strategies(&d, DEFAULT_GUARD_BITS).err(),
            Some(Error::SearchGuard {
                bits: 1122,
                limit: 24
            })
        ));
    }

    #[test]
    fn silent_scenario_scores_zero() {
        let (m, d) = unit_pool();
        let silent = ScenarioParams::new(vec![0.0, 0.0], vec![2.0, 10.0]).unwrap();
        let rng = RngStream::new(1);
        let u = evaluate_strategy_mc(
            &Baseline::Greedy.code(&d).unwrap(),
            &m,
            &silent,
            30,
            5,
            &rng,
            &d,
        )
        .unwrap();
        assert_eq!(u, 0.0);
        let res = find_global_optimum(&m, &silent, 30, 3, &rng, &d, DEFAULT_GUARD_BITS).unwrap();
        assert_eq!(res.best_utility, 0.0);
        assert_eq!(res.best_code, StrategyCode::filled(&d, false));
    }

    #[test]
    fn optimum_dominates_baselines_and_is_reproducible() {
        let (m, d) = unit_pool();
        let rng = RngStream::new(11);
        let bench = MonteCarloBench::new(&ScenarioParams::scenario1(), 60, 20, &rng).unwrap();
        let res = bench.full_search(&d, &m, DEFAULT_GUARD_BITS, true).unwrap();
        for b in Baseline::ALL {
            assert!(res.best_utility >= bench.evaluate(&b.code(&d).unwrap(), &d, &m).unwrap());
        }
        let table = res.per_strategy_utilities.as_ref().unwrap();
        assert_eq!(table.len(), 4096);
        assert!(table.iter().all(|&u| u <= res.best_utility));
        assert_eq!(
            res,
            bench.full_search(&d, &m, DEFAULT_GUARD_BITS, true).unwrap()
        );
        let csv = res.table_csv(&d).unwrap();
        assert_eq!(csv.lines().count(), 4097);
    }
}
