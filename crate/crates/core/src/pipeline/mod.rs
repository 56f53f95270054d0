//! End-to-end wiring: per-scenario handoff cases and the file-based
//! commands behind the command-line tool.

pub mod case;
pub mod commands;
pub mod config;

pub use case::{adjacent_cameras, random_topk_expectation, run_case, CaseConfig, CaseOutcome, Handoff};
pub use commands::{cmd_eval, cmd_mapdoc, cmd_plan, cmd_query, cmd_sim, cmd_track, run_pipeline, Layout};
pub use config::{fleet_beam, Config, ReasonerChoice};
