//! Configuration-driven front end for the `hodgefrob` solvers and transforms.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{execute, Command, Context, Outcome};
pub use config::RunConfig;
