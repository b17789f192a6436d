//! Exact optimal-pebbling engine for staircase graphs.
//!
//! A pebbling move removes two pebbles from a vertex and places one on a
//! neighbour. This crate decides reachability and solvability questions
//! exactly, searches for optimal (smallest solvable) distributions on
//! staircase graphs and grid windows, and provides the construction,
//! collapsing and cut-decomposition toolkit that the verification harness
//! drives.

pub mod cache;
pub mod constructions;
pub mod dot;
pub mod grid;
pub mod harness;
pub mod pebble;
pub mod search;

pub use grid::{build_grid_window, build_staircase, GridCoord, PebbleGraph, StaircaseSpec, Variant};
pub use pebble::{Distribution, Move};
pub use search::{optimal_pebbling_number, BudgetConfig, SearchReport, SearchValue};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("graph mismatch: {0}")]
    GraphMismatch(String),
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("invalid quotient: {0}")]
    InvalidQuotient(String),
    #[error("construction failed verification: {0}")]
    VerificationFailed(String),
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    #[error("engine limit: {0}")]
    EngineLimit(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
