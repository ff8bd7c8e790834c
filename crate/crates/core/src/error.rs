use thiserror::Error;

use crate::boolmat::ZeroBlock;
use crate::cover::CoverReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index ({row}, {col}) out of range for {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("invalid dimensions {rows}x{cols}: both must be at least 1")]
    InvalidDimensions { rows: usize, cols: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("maximal rectangle enumeration exceeded cap of {cap}")]
    EnumerationOverflow { cap: usize },

    #[error("size guard exceeded: {what} = {actual} > {limit}; use the greedy cover instead")]
    SizeGuard {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("structural failure: 2x2 all-zero block at {0}")]
    StructuralFailure(ZeroBlock),

    #[error(
        "cover check failed for m = {} ({} mode): monochromatic = {}, covered = {}, crt = {}",
        .0.m, .0.mode, .0.monochromatic, .0.covered, .0.crt
    )]
    CoverCheckFailed(Box<CoverReport>),

    #[error("construction bug: {0}")]
    ConstructionBug(String),

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
