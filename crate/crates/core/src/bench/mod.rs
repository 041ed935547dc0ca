//! Seeded experiment runner: instance generation, acceptance suites, reports,
//! replay, and the exploratory sharpness probe.

mod config;
mod instances;
mod probe;
mod report;
mod suites;

pub use config::{expand_suites, ExperimentConfig, Sizes, Tolerances, Trials, SUITES};
pub use instances::{derive_seed, rng, safe_spread, Atom, AtomSymbol};
pub use probe::{sharpness_probe, ProbeRow, ProbeTable, PROBE_STEP};
pub use report::{Aggregate, Case, CaseError, Measurement, Record, Report, SCHEMA_VERSION};
pub use suites::{build_cases, evaluate, replay, run_suite, ReplayOutcome, RunOutput, SuiteTiming};
