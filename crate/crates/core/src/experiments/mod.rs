//! Manufactured-solution test cases, energy errors and convergence studies.

pub mod cases;
pub mod error;
pub mod output;
pub mod study;

pub use cases::{testcase, CaseId, TestCase};
pub use error::{convergence_rate, energy_error, EnergyError};
pub use output::{
    emit_plot_data, plot_points, read_csv, read_results_csv, summarize, write_csv, PlotPoint, RateRow,
    RatioSummary, StudySummary,
};
pub use study::{data_quadrature, ratio_ladder, run_single, run_study, SingleRun, StudyConfig, StudyResult, StudyRow, STATUS_OK};
