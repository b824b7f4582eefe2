//! Experiment runner: configuration, runs, comparison reports, seed sweeps
//! and plot data.

mod config;
mod plot;
mod report;
mod run;
mod sweep;

pub use config::{Policy, RunConfig, TraceSource};
pub use plot::{export_plot_data, parse_window, PlotKind};
pub use report::{compare, reduction_pct, ComparisonReport, PairwiseReduction};
pub use run::{
    provenance, read_report, read_run_series, read_series, run_in, run_simulation, write_series, Environment,
    PolicyAggregates, Provenance, RunReport, RunResult, TrainingSummary, CURVE_FILE, QTABLE_FILE, REPORT_FILE,
    SERIES_FILE,
};
pub use sweep::{seed_sweep, ReductionSummary, SeedRun, Stats, SweepReport};
