//! Scale-wise Assouad-Nagata certificates on finite spaces.
//!
//! Two finite shadows of the dimension are exposed side by side: the
//! decomposition form (`n + 1` parts whose `r`-components are `K * r`
//! bounded) and the cover form (net balls with bounded `r/2`-multiplicity).
//! No conversion between their constants is attempted.

mod components;
mod cover;
mod decompose;
mod witness;

pub(crate) use components::max_component_diameter;
pub use components::{r_components, Component, UnionFind};
pub use cover::{cover_multiplicity, net_cover, Cover, Multiplicity};
pub use decompose::{
    greedy_parts, min_parts_exact, verify_decomposition, Decomposition, DecompositionCheck, ExactDecomposition,
    ExhaustiveLimits,
};
pub use witness::{nagata_check, nagata_margin, nagata_scan, NagataReport, NagataWitness, Verdict};

use thiserror::Error;

use crate::metric::MetricError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DimError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("scale r must be positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("bound factor K must be positive and finite, got {0}")]
    NonPositiveBound(f64),
    #[error("parts do not cover the space: point {0} is missing")]
    NotACover(usize),
    #[error("point {0} appears in more than one part")]
    OverlappingParts(usize),
    #[error("{points} points exceed the exhaustive limit of {limit}")]
    TooLarge { points: usize, limit: usize },
    #[error("no decomposition with at most {max_parts} parts exists")]
    PartLimitExceeded { max_parts: usize },
}

pub type Result<T, E = DimError> = std::result::Result<T, E>;

pub(crate) fn check_scale(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(DimError::NonPositiveScale(r))
    }
}

pub(crate) fn check_bound(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(DimError::NonPositiveBound(k))
    }
}
