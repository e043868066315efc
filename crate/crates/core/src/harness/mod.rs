//! Experiment driver: configuration, degree sweeps with rate fitting, the
//! analyticity-radius table and Schwarz-function reports.
//!
//! Sweeps are written as CSV (`degree,error,predicted_error_line`); reports
//! and tables as JSON. Numbers in files carry 17 significant digits.

pub mod config;
pub mod data;
pub mod report;
pub mod sweep;
pub mod table1;

pub use config::{DegreeSchedule, ExperimentConfig, Method};
pub use data::BoundaryData;
pub use report::{rates_report, schwarz_report, RatesReport, SchwarzReport};
pub use sweep::{fit_slope, plateau_floor, run_sweep, ConvergenceRecord, SweepFailure};
pub use table1::{default_rhos, table1, Table1Row};
