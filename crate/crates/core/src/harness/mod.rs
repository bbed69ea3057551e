//! Run orchestration, error measurement, convergence studies and output files.

pub mod config;
pub mod errors;
pub mod manifest;
pub mod output;
pub mod rates;
pub mod study;

pub use config::{OutputConfig, RunConfig, ScenarioOverrides, SchemeChoice};
pub use errors::{measure_errors, ErrorSeries, ErrorTriple, ExactFn};
pub use manifest::{file_sha256, OutputFile, RunManifest};
pub use output::{
    extract_line, extract_slice, format_table, load_field_dump, read_field_dump, read_table_csv,
    save_field_dump, save_series_csv, save_table_csv, wavefront, write_field_dump,
    write_series_csv, write_table_csv, FieldDump, Slice, TableCsvRow,
};
pub use rates::{runge_rate, theoretical_rate, theoretical_rates, NormKind};
pub use study::{
    build_stepper, convergence_study, run_scenario, run_with_errors, validate_ladder,
    ConvergenceTable, RunOptions, StudyRow,
};
