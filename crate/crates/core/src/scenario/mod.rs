//! Scenario files, whole-BSS runs, report CSV and comparisons.

mod bss;
mod compare;
mod config;
mod csv_out;

pub use bss::{run_scenario, RunOutput, SimError, Simulation, AP, EDCA_DATA, EDCA_VOICE};
pub use compare::{compare, deltas, run_batch, CompareError, ComparisonTable, Deltas};
pub use config::{
    parse_scenario, Accounting, Admission, ConfigError, ControllerKind, DataLoad, InvalidConfig, Placement,
    ScenarioConfig, Traffic, MAX_STATIONS,
};
pub use csv_out::{emit_csv, parse_csv, summary_row, CsvError, CSV_HEADER, SUMMARY_TAG};
