//! Desk-scale laboratory for the Krylov solvability of inverse linear
//! problems `A f = g`.
//!
//! The crate builds the operators of interest (shifts, compact normal
//! operators, one-dimensional Friedrichs systems), runs Krylov truncation
//! schemes on them, and computes structural diagnostics: Krylov reducibility,
//! the Krylov intersection, growth classes of the datum, and a weak gap
//! between subspaces. The [`experiments`] module bundles these into
//! reproducible, JSON-configured runs.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod gallery;
pub mod hilbert;
pub mod krylov;
pub mod weak_gap;

pub use error::{LabError, Result};
