//! Experiment configuration, presets, campaigns and result emission.

mod campaign;
mod config;
mod emit;
pub mod presets;

pub use campaign::{
    run_experiment, CampaignResult, Histogram, OptimumSummary, Series, SpaceSummary,
    OPTIMUM_SERIES, THRESHOLD_FRACTION,
};
pub use config::{
    load_config, ExperimentConfig, ExperimentKind, FullSearchSpec, HistogramSpec, OptimizerSpec,
    ScheduleSegment,
};
pub use emit::{emit_results, population_csv, series_csv, summary_json};
