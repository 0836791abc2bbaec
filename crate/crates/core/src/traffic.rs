//! Tenant request traffic: Poisson arrivals per operations period and
//! whole-period slice lifetimes drawn at arrival.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Arrival rate `lambda[n]` (requests per period) and mean lifetime `mu[n]`
/// (periods) for every slice type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScenario", into = "RawScenario")]
pub struct ScenarioParams {
    lambda: Vec<f64>,
    mu: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    lambda: Vec<f64>,
    mu: Vec<f64>,
}

impl TryFrom<RawScenario> for ScenarioParams {
    type Error = Error;

    fn try_from(raw: RawScenario) -> Result<Self> {
        ScenarioParams::new(raw.lambda, raw.mu)
    }
}

impl From<ScenarioParams> for RawScenario {
    fn from(s: ScenarioParams) -> Self {
        RawScenario {
            lambda: s.lambda,
            mu: s.mu,
        }
    }
}

impl ScenarioParams {
    pub fn new(lambda: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        if lambda.len() != mu.len() {
            return Err(Error::Dimension {
                what: "mu vs. lambda",
                expected: lambda.len(),
                actual: mu.len(),
            });
        }
        for (n, &l) in lambda.iter().enumerate() {
            if !l.is_finite() || l < 0.0 {
                return Err(Error::param(
                    format!("lambda[{n}]"),
                    format!("must be finite and >= 0, got {l}"),
                ));
            }
        }
        for (n, &m) in mu.iter().enumerate() {
            if !m.is_finite() || m <= 0.0 {
                return Err(Error::param(
                    format!("mu[{n}]"),
                    format!("must be finite and > 0, got {m}"),
                ));
            }
        }
        Ok(ScenarioParams { lambda, mu })
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn slice_types(&self) -> usize {
        self.lambda.len()
    }

    /// Scenario #1: `[0.5, 2, 2, 10]`.
    pub fn scenario1() -> Self {
        ScenarioParams::new(vec![0.5, 2.0], vec![2.0, 10.0]).unwrap()
    }

    /// Scenario #2: `[0.3, 1, 2, 3]`.
    pub fn scenario2() -> Self {
        ScenarioParams::new(vec![0.3, 1.0], vec![2.0, 3.0]).unwrap()
    }

    /// Scenario #3: `[1, 0, 2, 5]`, no type-2 traffic.
    pub fn scenario3() -> Self {
        ScenarioParams::new(vec![1.0, 0.0], vec![2.0, 5.0]).unwrap()
    }
}

/// One Poisson(`lambda`) draw.
pub fn sample_arrivals<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> Result<u32> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::param(
            "lambda",
            format!("must be finite and >= 0, got {lambda}"),
        ));
    }
    if lambda == 0.0 {
        return Ok(0);
    }
    let poisson = Poisson::new(lambda).map_err(|e| Error::param("lambda", e.to_string()))?;
    let k: f64 = poisson.sample(rng);
    Ok(k as u32)
}

/// `ceil(X)` with `X ~ Exponential(mean mu)`, never below one period.
pub fn sample_lifetime<R: Rng + ?Sized>(rng: &mut R, mu: f64) -> Result<u32> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::param(
            "mu",
            format!("must be finite and > 0, got {mu}"),
        ));
    }
    let exp = Exp::new(1.0 / mu).map_err(|e| Error::param("mu", e.to_string()))?;
    let x: f64 = exp.sample(rng);
    Ok((x.ceil() as u32).max(1))
}

/// A slice-creation request with its pre-drawn lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RequestEvent {
    /// Zero-based slice type.
    pub slice_type: usize,
    /// Periods the slice stays active if accepted, at least one.
    pub lifetime: u32,
    /// Position within its period.
    pub order: u32,
}

/// Ordered request batches, one per operations period.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RequestTrace {
    periods: Vec<Vec<RequestEvent>>,
}

impl RequestTrace {
    pub fn from_periods(periods: Vec<Vec<RequestEvent>>) -> Self {
        RequestTrace { periods }
    }

    pub fn periods(&self) -> &[Vec<RequestEvent>] {
        &self.periods
    }

    pub fn horizon(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn event_count(&self) -> usize {
        self.periods.iter().map(Vec::len).sum()
    }

    /// Sub-trace covering periods `[start, start + len)`.
    pub fn window(&self, start: usize, len: usize) -> RequestTrace {
        RequestTrace {
            periods: self.periods[start..start + len].to_vec(),
        }
    }

    /// Copy without any events of slice type `ty`.
    pub fn without_type(&self, ty: usize) -> RequestTrace {
        RequestTrace {
            periods: self
                .periods
                .iter()
                .map(|p| p.iter().copied().filter(|e| e.slice_type != ty).collect())
                .collect(),
        }
    }

    /// One `period type lifetime order` line per event, type one-based.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# period type lifetime order\n");
        for (t, events) in self.periods.iter().enumerate() {
            for e in events {
                let _ = writeln!(out, "{t} {} {} {}", e.slice_type + 1, e.lifetime, e.order);
            }
        }
        out
    }

    /// Inverse of [`to_text`](Self::to_text). Periods without events must be
    /// implied by `horizon`.
    pub fn from_text(text: &str, horizon: usize) -> Result<Self> {
        let mut periods = vec![Vec::new(); horizon];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|w| {
                    w.parse::<u64>()
                        .map_err(|e| Error::Parse(format!("line {}: {w:?}: {e}", lineno + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            let [t, ty, lifetime, order] = nums[..] else {
                return Err(Error::Parse(format!(
                    "line {}: expected 4 fields",
                    lineno + 1
                )));
            };
            if ty == 0 || lifetime == 0 || t as usize >= horizon {
                return Err(Error::Parse(format!(
                    "line {}: field out of range",
                    lineno + 1
                )));
            }
            periods[t as usize].push(RequestEvent {
                slice_type: ty as usize - 1,
                lifetime: lifetime as u32,
                order: order as u32,
            });
        }
        for p in &mut periods {
            p.sort_by_key(|e| e.order);
        }
        Ok(RequestTrace { periods })
    }
}

/// Draws periods one at a time from a single stream, so a long trace is the
/// concatenation of the shorter traces drawn from the same stream.
pub struct TraceGenerator {
    rng: ChaCha8Rng,
}

impl TraceGenerator {
    pub fn new(stream: &RngStream) -> Self {
        TraceGenerator { rng: stream.rng() }
    }

    /// Per-type Poisson counts, lifetimes drawn per request, then one shuffle.
    pub fn next_period(&mut self, scenario: &ScenarioParams) -> Result<Vec<RequestEvent>> {
        let mut events = Vec::new();
        for (ty, (&lambda, &mu)) in scenario.lambda.iter().zip(&scenario.mu).enumerate() {
            let k = sample_arrivals(&mut self.rng, lambda)?;
            for _ in 0..k {
                events.push(RequestEvent {
                    slice_type: ty,
                    lifetime: sample_lifetime(&mut self.rng, mu)?,
                    order: 0,
                });
            }
        }
        events.shuffle(&mut self.rng);
        for (i, e) in events.iter_mut().enumerate() {
            e.order = i as u32;
        }
        Ok(events)
    }

    pub fn take(&mut self, scenario: &ScenarioParams, periods: usize) -> Result<RequestTrace> {
        let periods = (0..periods)
            .map(|_| self.next_period(scenario))
            .collect::<Result<Vec<_>>>()?;
        Ok(RequestTrace { periods })
    }
}

pub fn build_request_trace(
    stream: &RngStream,
    scenario: &ScenarioParams,
    horizon: usize,
) -> Result<RequestTrace> {
    if horizon == 0 {
        return Err(Error::param("horizon", "must be at least 1"));
    }
    TraceGenerator::new(stream).take(scenario, horizon)
}

/// Trace for a piecewise-constant schedule of `(scenario, periods)` segments.
pub fn build_schedule_trace(
    stream: &RngStream,
    segments: &[(ScenarioParams, usize)],
) -> Result<RequestTrace> {
    let mut generator = TraceGenerator::new(stream);
    let mut periods = Vec::new();
    for (scenario, len) in segments {
        for _ in 0..*len {
            periods.push(generator.next_period(scenario)?);
        }
    }
    if periods.is_empty() {
        return Err(Error::param("horizon", "must be at least 1"));
    }
    Ok(RequestTrace { periods })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_never_arrives() {
        let mut rng = RngStream::new(1).rng();
        assert!((0..1000).all(|_| sample_arrivals(&mut rng, 0.0).unwrap() == 0));
    }

    #[test]
    fn invalid_parameters() {
        let mut rng = RngStream::new(1).rng();
        assert!(sample_arrivals(&mut rng, -1.0).is_err());
        assert!(sample_arrivals(&mut rng, f64::INFINITY).is_err());
        assert!(sample_lifetime(&mut rng, 0.0).is_err());
        assert!(sample_lifetime(&mut rng, -3.0).is_err());
        assert!(ScenarioParams::new(vec![1.0], vec![0.0]).is_err());
        assert!(ScenarioParams::new(vec![1.0, 2.0], vec![1.0]).is_err());
    }

    #[test]
    fn lifetimes_are_at_least_one() {
        let mut rng = RngStream::new(2).rng();
        for mu in [0.01, 0.5, 2.0, 10.0] {
            assert!((0..2000).all(|_| sample_lifetime(&mut rng, mu).unwrap() >= 1));
        }
    }

    #[test]
    fn fixed_stream_is_reproducible() {
        let s = RngStream::new(42).derive("arrivals");
        let a: Vec<u32> = {
            let mut r = s.rng();
            (0..50)
                .map(|_| sample_arrivals(&mut r, 2.0).unwrap())
                .collect()
        };
        let b: Vec<u32> = {
            let mut r = s.rng();
            (0..50)
                .map(|_| sample_arrivals(&mut r, 2.0).unwrap())
                .collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn scenario3_has_no_type2_requests() {
        let trace =
            build_request_trace(&RngStream::new(3), &ScenarioParams::scenario3(), 500).unwrap();
        assert!(trace.event_count() > 0);
        assert!(trace.periods().iter().flatten().all(|e| e.slice_type == 0));
    }

    #[test]
    fn silent_scenario_is_empty() {
        let s = ScenarioParams::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let trace = build_request_trace(&RngStream::new(3), &s, 20).unwrap();
        assert_eq!(trace.horizon(), 20);
        assert!(trace.periods().iter().all(Vec::is_empty));
    }

    #[test]
    fn equal_seeds_equal_traces() {
        let s = ScenarioParams::scenario1();
        let a = build_request_trace(&RngStream::new(9), &s, 50).unwrap();
        let b = build_request_trace(&RngStream::new(9), &s, 50).unwrap();
        assert_eq!(a, b);
        let c = build_request_trace(&RngStream::new(10), &s, 50).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn long_trace_extends_short_trace() {
        let s = ScenarioParams::scenario1();
        let long = build_request_trace(&RngStream::new(4), &s, 120).unwrap();
        let short = build_request_trace(&RngStream::new(4), &s, 6).unwrap();
        assert_eq!(long.window(0, 6), short);
        let sched = build_schedule_trace(&RngStream::new(4), &[(s.clone(), 60), (s, 60)]).unwrap();
        assert_eq!(sched, long);
    }

    #[test]
    fn events_are_ordered_within_period() {
        let trace =
            build_request_trace(&RngStream::new(5), &ScenarioParams::scenario1(), 30).unwrap();
        for p in trace.periods() {
            for (i, e) in p.iter().enumerate() {
                assert_eq!(e.order as usize, i);
            }
        }
    }

    #[test]
    fn zero_horizon_rejected() {
        assert!(build_request_trace(&RngStream::new(5), &ScenarioParams::scenario1(), 0).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let trace =
            build_request_trace(&RngStream::new(6), &ScenarioParams::scenario1(), 12).unwrap();
        let back = RequestTrace::from_text(&trace.to_text(), 12).unwrap();
        assert_eq!(back, trace);
    }
}
