//! Run driver, sweep harness, and generator validation around
//! [`stirap_core`].
//!
//! The binary exposes three subcommands:
//!
//! - `simulate <config>` — one propagation, written as a time-series CSV
//!   plus a JSON diagnostics sidecar,
//! - `sweep <sweep-file>` — one propagation per axis value on a worker
//!   pool, with a long-format `finals.csv`, per-run records, and a summary
//!   including the exponential fit of the final target population,
//! - `validate` — the analytic-vs-oracle generator comparison over a
//!   (θ, φ, N̄) grid against the committed list of known discrepancies,
//!   plus the closed-system cross-check against the Schrödinger reference.
//!
//! Config files are TOML with `[pulse]`, `[system]`, `[run]` sections; a
//! JSON object of the same shape is accepted interchangeably.

pub mod config;
pub mod output;
pub mod run;
pub mod sweep;
pub mod validate;
