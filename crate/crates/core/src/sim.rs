//! Period-by-period operation of the sliced network under a fixed strategy.

use crate::error::{Error, Result};
use crate::model::{ResourceModel, SliceSet};
use crate::space::{ensure_feasible, DecisionSpace};
use crate::strategy::StrategyCode;
use crate::traffic::{RequestEvent, RequestTrace};

/// Active slices, stored as remaining lifetimes per slice type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimState {
    active: Vec<Vec<u32>>,
    counts: Vec<u32>,
}

impl SimState {
    pub fn empty(types: usize) -> Self {
        SimState {
            active: vec![Vec::new(); types],
            counts: vec![0; types],
        }
    }

    /// State from explicit remaining lifetimes; all must be positive.
    pub fn from_lifetimes(active: Vec<Vec<u32>>) -> Result<Self> {
        if active.iter().flatten().any(|&l| l == 0) {
            return Err(Error::param("lifetime", "remaining lifetimes must be >= 1"));
        }
        let counts = active.iter().map(|v| v.len() as u32).collect();
        Ok(SimState { active, counts })
    }

    pub fn slice_types(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> SliceSet {
        SliceSet::new(self.counts.clone())
    }

    pub fn count_slice(&self) -> &[u32] {
        &self.counts
    }

    pub fn remaining_lifetimes(&self, ty: usize) -> &[u32] {
        &self.active[ty]
    }

    pub fn is_idle(&self) -> bool {
        self.counts.iter().all(|&k| k == 0)
    }

    /// Start-of-period bookkeeping: every survivor ages one period and
    /// slices reaching zero release their resources.
    fn expire(&mut self) {
        for (lifetimes, count) in self.active.iter_mut().zip(self.counts.iter_mut()) {
            if lifetimes.is_empty() {
                continue;
            }
            lifetimes.iter_mut().for_each(|l| *l -= 1);
            lifetimes.retain(|&l| l > 0);
            *count = lifetimes.len() as u32;
        }
    }

    #[inline]
    fn process(&mut self, events: &[RequestEvent], code: &StrategyCode, dspace: &DecisionSpace) {
        for e in events {
            // decide_counts is false outside D, which forces declines on a full pool
            if code.decide_counts(dspace, &self.counts, e.slice_type) {
                self.active[e.slice_type].push(e.lifetime);
                self.counts[e.slice_type] += 1;
            }
        }
    }

    #[inline]
    pub(crate) fn step_unchecked(
        &mut self,
        events: &[RequestEvent],
        code: &StrategyCode,
        dspace: &DecisionSpace,
        model: &ResourceModel,
    ) -> f64 {
        self.expire();
        self.process(events, code, dspace);
        model.utility_of_counts(&self.counts)
    }

    /// Runs one operations period in place and returns its overall utility,
    /// evaluated after the period's requests were handled.
    pub fn step(
        &mut self,
        events: &[RequestEvent],
        code: &StrategyCode,
        dspace: &DecisionSpace,
        model: &ResourceModel,
    ) -> Result<f64> {
        check_inputs(self, code, dspace, model)?;
        check_events(events, model.slice_types())?;
        Ok(self.step_unchecked(events, code, dspace, model))
    }
}

fn check_inputs(
    state: &SimState,
    code: &StrategyCode,
    dspace: &DecisionSpace,
    model: &ResourceModel,
) -> Result<()> {
    let types = model.slice_types();
    if state.slice_types() != types {
        return Err(Error::Dimension {
            what: "simulation state vs. slice types",
            expected: types,
            actual: state.slice_types(),
        });
    }
    if dspace.slice_types() != types {
        return Err(Error::Dimension {
            what: "decision space vs. slice types",
            expected: types,
            actual: dspace.slice_types(),
        });
    }
    code.check_against(dspace)?;
    ensure_feasible(model, &state.counts())
}

fn check_events(events: &[RequestEvent], types: usize) -> Result<()> {
    for e in events {
        if e.slice_type >= types {
            return Err(Error::SliceTypeOutOfRange {
                ty: e.slice_type,
                types,
            });
        }
        if e.lifetime == 0 {
            return Err(Error::param("lifetime", "request lifetimes must be >= 1"));
        }
    }
    Ok(())
}

pub(crate) fn check_trace(trace: &RequestTrace, types: usize) -> Result<()> {
    if trace.is_empty() {
        return Err(Error::param("trace", "must contain at least one period"));
    }
    trace
        .periods()
        .iter()
        .try_for_each(|p| check_events(p, types))
}

/// Pure form of [`SimState::step`].
pub fn step_period(
    state: &SimState,
    events: &[RequestEvent],
    code: &StrategyCode,
    dspace: &DecisionSpace,
    model: &ResourceModel,
) -> Result<(SimState, f64)> {
    let mut next = state.clone();
    let u = next.step(events, code, dspace, model)?;
    Ok((next, u))
}

/// Per-period utilities of `code` over the whole trace, and the final state.
pub fn run_horizon(
    code: &StrategyCode,
    trace: &RequestTrace,
    start: &SimState,
    dspace: &DecisionSpace,
    model: &ResourceModel,
) -> Result<(Vec<f64>, SimState)> {
    check_inputs(start, code, dspace, model)?;
    check_trace(trace, model.slice_types())?;
    let mut state = start.clone();
    let utilities = trace
        .periods()
        .iter()
        .map(|events| state.step_unchecked(events, code, dspace, model))
        .collect();
    Ok((utilities, state))
}

/// Sum of per-period utilities, advancing `state` in place. Inputs must have
/// been validated.
#[inline]
pub(crate) fn total_utility_unchecked(
    code: &StrategyCode,
    periods: &[Vec<RequestEvent>],
    state: &mut SimState,
    dspace: &DecisionSpace,
    model: &ResourceModel,
) -> f64 {
    periods
        .iter()
        .map(|events| state.step_unchecked(events, code, dspace, model))
        .sum()
}
