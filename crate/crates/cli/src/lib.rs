//! Command-line front end for the `pointcontact` library: TOML scenario
//! configs, the `coeffs` / `branch` / `verify` subcommands, and
//! deterministic CSV/JSON serialization of their results.

pub mod config;
pub mod output;
pub mod run;
