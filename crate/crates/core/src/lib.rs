//! Finite certificates for Assouad-Nagata dimension.
//!
//! * [`metric`]: validated finite metric spaces and their transforms.
//! * [`dim`]: `r`-components, decompositions, net covers and Nagata witnesses.
//! * [`maps`]: Lipschitz and metrically open maps, fiber geometry, pullbacks.
//! * [`heisenberg`]: exact arithmetic in `H3(Z)` and central word lengths.
//! * [`report`]: byte-stable JSON and CSV rendering.
//! * [`cli`]: the `nagata` command-line front end.

pub mod cli;
pub mod dim;
pub mod heisenberg;
pub mod maps;
pub mod metric;
pub mod report;

pub use metric::{FiniteMetricSpace, MetricError, Tolerance, DEFAULT_REL_TOL};
