//! Command-line front end for the `barysimplex` solvers.
//!
//! Four subcommands — `solve`, `perm`, `oracle`, and `synth` — read a JSON
//! problem document (or inline `--p`/`--q` weight lists), run the exact
//! solvers, and emit a `barysimplex/1` report as JSON or as a flattened
//! `key,value` CSV.
//!
//! Exit status contract: `0` on full success, `1` on any validation or I/O
//! error, `2` when a report was produced but one of its certificates failed
//! (the failure is also summarized on stderr).

pub mod commands;
pub mod input;
pub mod report;
pub mod tables;

pub use commands::{cmd_oracle, cmd_perm, cmd_solve, cmd_synth, CommandOutcome};
pub use input::{Options, Problem, ProblemInput};
