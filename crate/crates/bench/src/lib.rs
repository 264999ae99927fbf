//! Problem generators, file formats and the benchmark runner behind the
//! `hdbench` command.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod mm;
pub mod parallel;
pub mod problems;
pub mod runner;
pub mod trace_csv;
pub mod vector_io;

pub use config::{Method, ObjectiveName, PermSpec, RunConfig, ScheduleSpec};
pub use error::{BenchError, Result};
pub use parallel::ThreadedSweep;
pub use problems::{gen_problem, problem_hash, ProblemKind, ProblemSpec};
pub use runner::{compare, merged_csv, run_benchmark, BenchReport, Summary};
