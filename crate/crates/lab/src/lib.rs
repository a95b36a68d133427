//! Sweeps, field files and run manifests on top of `su11-core`.
//!
//! The binary `su11-phase-lab` is a thin wrapper around [`cli::run`].

// negated comparisons are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod compute;
pub mod error;
pub mod fieldio;
pub mod manifest;
pub mod options;
pub mod oracle_check;

pub use error::{LabError, LabResult};
