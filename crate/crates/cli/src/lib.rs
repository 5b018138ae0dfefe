//! Table reproduction and method comparison for the 3-UPU continuation solver.

pub mod compare;
pub mod config;
pub mod error;
pub mod report;
pub mod tables;

pub use compare::{bench_compare, Comparison};
pub use config::{ParamsFile, RunConfig};
pub use error::{CliError, CliResult};
pub use report::{emit, BenchRecord, Cell, Format, Report, TraceRecord};
pub use tables::{bench, forward, inverse, run_table, table3, table4, verify};
