//! Experiment orchestration: configuration, replicated simulation on a
//! worker pool, statistical tests, persistence and reports.

pub mod config;
pub mod experiment;
pub mod io;
pub mod report;
pub mod stats;

pub use config::{ExperimentConfig, LawSource, ModelConfig};
pub use experiment::{
    analyze, intermediate_order_check, intermediate_study, run_experiment, simulate, sqrt_rank, topk_comparison,
    ExperimentData, IntermediateTrend, SimulationOutput, TopkComparison, TopkSettings,
};
pub use report::{Report, Status, TestRecord, Verdict};
pub use stats::{count_distribution_test, ks_one_sample, ks_two_sample};
