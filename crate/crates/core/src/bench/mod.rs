//! Experiment configuration, drivers and result tables.

mod config;
mod runs;
mod table;

pub use config::{Experiment, ExperimentConfig, OutputFormat};
pub use runs::{
    build_problem, default_tolerance, rel_inf_error, run, run_arttls_bench, run_perturb, run_prony_bench,
    run_rtls_bench, run_rttls_bench, truncation_index, Table,
};
pub use table::{emit, load_table, parse_table, render, BenchRow, Cell, TableRow};
