//! Config-driven runs of the gate characterizations and the fringe
//! measurement.
//!
//! A run is fully determined by its [`ExperimentConfig`] (seed included).
//! Each basis input and each fringe measurement draws from its own random
//! substream, so results do not depend on how many threads evaluate them.

mod config;
mod report;
mod run;

pub use config::{
    CountSettings, ExperimentConfig, ExperimentKind, Extinctions, FringeSettings, NoiseSettings,
};
pub use report::{
    reference_values, report_summary, write_outputs, FidelityReport, ProcessFidelityReport, Summary,
    SummaryRow, VisibilityReport,
};
pub use run::{
    experiment_circuit, run_experiment, run_experiment_with_threads, run_fringe, run_gate,
    ExperimentOutput, FringeModel, FringeRow, FringeRun, GateModel, GateRun,
};
