//! Admission control for network slices offered as a service.
//!
//! An operator with a finite resource pool receives random requests for new
//! slices of several types and must accept or decline each one. A slicing
//! strategy maps every `(active slice set, requested type)` pair to a
//! decision. Restricted to pairs where acceptance is possible at all, each
//! strategy is a fixed-length bit string, which makes the strategy space
//! searchable by a genetic algorithm that evolves alongside live operation.
//!
//! Module map:
//!
//! - [`model`], [`space`], [`strategy`]: resource model, feasibility and
//!   free-decision spaces, strategy codec and baseline strategies.
//! - [`traffic`], [`sim`], [`rng`]: request traces and period-by-period
//!   operation.
//! - [`ga`]: the online genetic optimizer.
//! - [`search`]: exhaustive search over small codebooks.
//! - [`experiment`]: configuration, presets, Monte Carlo campaigns and result files.

pub mod error;
pub mod experiment;
pub mod ga;
pub mod model;
pub mod rng;
pub mod search;
pub mod sim;
pub mod space;
pub mod strategy;
pub mod traffic;

pub use error::{Error, Result};
pub use ga::{GaConfig, GenerationReport, Population};
pub use model::{apply_decision, ResourceModel, SliceSet, FEASIBILITY_TOLERANCE};
pub use rng::RngStream;
pub use search::{MonteCarloBench, SearchResult};
pub use sim::{run_horizon, step_period, SimState};
pub use space::{DecisionSpace, FeasibilitySpace};
pub use strategy::{baseline_strategy, decide, Baseline, StrategyCode};
pub use traffic::{RequestEvent, RequestTrace, ScenarioParams};
