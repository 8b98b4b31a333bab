//! Finite metric spaces stored as dense distance matrices.
//!
//! Every space carries an absolute comparison tolerance derived from its
//! largest entry (`rel_tol * max_entry`). All strict and non-strict
//! comparisons elsewhere in the crate go through [`Tolerance`], so a value
//! counts as `a < b` only when it clears `b` by more than the tolerance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative tolerance applied to the largest distance of a space.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("space has no points")]
    EmptySpace,
    #[error("matrix row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("{labels} labels for a {points}-point matrix")]
    LabelMismatch { labels: usize, points: usize },
    #[error("entry ({i},{j}) is not finite")]
    NonFinite { i: usize, j: usize },
    #[error("diagonal entry {0} is not zero")]
    NonZeroDiagonal(usize),
    #[error("matrix is not symmetric at ({i},{j})")]
    AsymmetricMatrix { i: usize, j: usize },
    #[error("negative distance at ({i},{j})")]
    NegativeDistance { i: usize, j: usize },
    #[error("triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("points {i} and {j} are at distance zero")]
    DuplicatePoint { i: usize, j: usize },
    #[error("snowflake exponent must lie in (0, 1], got {0}")]
    InvalidExponent(f64),
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("relative tolerance must be finite and non-negative, got {0}")]
    InvalidTolerance(f64),
    #[error("subset is empty")]
    EmptySubset,
    #[error("point index {index} out of range for a {len}-point space")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("subset repeats point {0}")]
    RepeatedIndex(usize),
    #[error("point {index} has dimension {got}, expected {expected}")]
    DimensionMismatch { index: usize, got: usize, expected: usize },
}

pub type Result<T, E = MetricError> = std::result::Result<T, E>;

/// Absolute tolerance used for every distance comparison within one space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    abs: f64,
}

impl Tolerance {
    pub fn new(abs: f64) -> Self {
        Tolerance { abs: abs.max(0.0) }
    }

    pub fn abs(&self) -> f64 {
        self.abs
    }

    /// `a < b` with the slack convention `a < b - tol`.
    #[inline]
    pub fn lt(&self, a: f64, b: f64) -> bool {
        a < b - self.abs
    }

    #[inline]
    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b + self.abs
    }

    #[inline]
    pub fn gt(&self, a: f64, b: f64) -> bool {
        !self.le(a, b)
    }

    #[inline]
    pub fn ge(&self, a: f64, b: f64) -> bool {
        !self.lt(a, b)
    }

    #[inline]
    pub fn eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs
    }
}

/// Pointwise metric used when loading coordinate data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointMetric {
    L1,
    L2,
    Linf,
}

impl PointMetric {
    pub fn distance(self, p: &[f64], q: &[f64]) -> f64 {
        let diffs = p.iter().zip(q).map(|(a, b)| (a - b).abs());
        match self {
            PointMetric::L1 => diffs.sum(),
            PointMetric::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            PointMetric::Linf => diffs.fold(0.0, f64::max),
        }
    }
}

/// The strong triangle inequality fails on this triple:
/// `d(x, z) > max(d(x, y), d(y, z))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TripleWitness {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    len: usize,
    rel_tol: f64,
    tol: Tolerance,
}

impl FiniteMetricSpace {
    /// Validates a labelled distance matrix with the default tolerance.
    pub fn validate(labels: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        Self::validate_with_tolerance(labels, matrix, DEFAULT_REL_TOL)
    }

    pub fn validate_with_tolerance(labels: Vec<String>, matrix: Vec<Vec<f64>>, rel_tol: f64) -> Result<Self> {
        let len = matrix.len();
        if len == 0 {
            return Err(MetricError::EmptySpace);
        }
        if labels.len() != len {
            return Err(MetricError::LabelMismatch {
                labels: labels.len(),
                points: len,
            });
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != len {
                return Err(MetricError::NotSquare {
                    row,
                    len: r.len(),
                    expected: len,
                });
            }
        }
        let mut dist = Vec::with_capacity(len * len);
        for row in &matrix {
            dist.extend_from_slice(row);
        }
        Self::from_flat(labels, dist, len, rel_tol)
    }

    /// Builds a space from coordinates under an `l1`, `l2` or `linf` metric.
    pub fn from_points(points: &[Vec<f64>], metric: PointMetric) -> Result<Self> {
        Self::from_points_with_tolerance(points, metric, DEFAULT_REL_TOL)
    }

    pub fn from_points_with_tolerance(points: &[Vec<f64>], metric: PointMetric, rel_tol: f64) -> Result<Self> {
        let len = points.len();
        if len == 0 {
            return Err(MetricError::EmptySpace);
        }
        let dim = points[0].len();
        if let Some((index, p)) = points.iter().enumerate().find(|(_, p)| p.len() != dim) {
            return Err(MetricError::DimensionMismatch {
                index,
                got: p.len(),
                expected: dim,
            });
        }
        let mut dist = vec![0.0; len * len];
        for i in 0..len {
            for j in (i + 1)..len {
                let d = metric.distance(&points[i], &points[j]);
                dist[i * len + j] = d;
                dist[j * len + i] = d;
            }
        }
        Self::from_flat(default_labels(len), dist, len, rel_tol)
    }

    fn from_flat(labels: Vec<String>, mut dist: Vec<f64>, len: usize, rel_tol: f64) -> Result<Self> {
        if !rel_tol.is_finite() || rel_tol < 0.0 {
            return Err(MetricError::InvalidTolerance(rel_tol));
        }
        for i in 0..len {
            for j in 0..len {
                if !dist[i * len + j].is_finite() {
                    return Err(MetricError::NonFinite { i, j });
                }
            }
        }
        let max = dist.iter().fold(0.0_f64, |m, &d| m.max(d.abs()));
        let tol = Tolerance::new(rel_tol * max);
        for i in 0..len {
            if dist[i * len + i] != 0.0 {
                return Err(MetricError::NonZeroDiagonal(i));
            }
        }
        for i in 0..len {
            for j in 0..len {
                if dist[i * len + j] < 0.0 {
                    return Err(MetricError::NegativeDistance { i, j });
                }
            }
        }
        for i in 0..len {
            for j in (i + 1)..len {
                let (a, b) = (dist[i * len + j], dist[j * len + i]);
                if !tol.eq(a, b) {
                    return Err(MetricError::AsymmetricMatrix { i, j });
                }
                let mean = 0.5 * (a + b);
                dist[i * len + j] = mean;
                dist[j * len + i] = mean;
            }
        }
        for i in 0..len {
            for j in (i + 1)..len {
                if !tol.gt(dist[i * len + j], 0.0) {
                    return Err(MetricError::DuplicatePoint { i, j });
                }
            }
        }
        for i in 0..len {
            for j in 0..len {
                let dij = dist[i * len + j];
                for k in 0..len {
                    if tol.gt(dist[i * len + k], dij + dist[j * len + k]) {
                        return Err(MetricError::TriangleViolation { i, j, k });
                    }
                }
            }
        }
        Ok(FiniteMetricSpace {
            labels,
            dist,
            len,
            rel_tol,
            tol,
        })
    }

    /// Rebuilds a space from an already validated one after an entrywise
    /// transform that is known to keep the metric axioms.
    fn mapped(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let dist = self.dist.iter().map(|&d| if d == 0.0 { 0.0 } else { f(d) }).collect();
        Self::from_flat(self.labels.clone(), dist, self.len, self.rel_tol)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn rel_tolerance(&self) -> f64 {
        self.rel_tol
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.len..(i + 1) * self.len]
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.len).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_distance(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Sorted, de-duplicated positive pairwise distances.
    pub fn distance_grid(&self) -> Vec<f64> {
        let mut grid: Vec<f64> = (0..self.len)
            .flat_map(|i| ((i + 1)..self.len).map(move |j| (i, j)))
            .map(|(i, j)| self.d(i, j))
            .collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }

    /// Largest pairwise distance within `subset`; zero for singletons.
    pub fn diameter_of(&self, subset: &[usize]) -> f64 {
        let mut diam = 0.0_f64;
        for (a, &i) in subset.iter().enumerate() {
            for &j in &subset[a + 1..] {
                diam = diam.max(self.d(i, j));
            }
        }
        diam
    }

    /// `min_{s in subset} d(point, s)`; infinite for an empty subset.
    pub fn dist_to_set(&self, point: usize, subset: &[usize]) -> f64 {
        subset.iter().map(|&s| self.d(point, s)).fold(f64::INFINITY, f64::min)
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len {
            Ok(())
        } else {
            Err(MetricError::IndexOutOfRange { index, len: self.len })
        }
    }

    pub fn check_subset(&self, subset: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.len];
        for &i in subset {
            self.check_index(i)?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(MetricError::RepeatedIndex(i));
            }
        }
        Ok(())
    }

    /// The induced subspace on `subset`, in the given order.
    pub fn subspace(&self, subset: &[usize]) -> Result<Self> {
        if subset.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        self.check_subset(subset)?;
        let len = subset.len();
        let mut dist = Vec::with_capacity(len * len);
        for &i in subset {
            dist.extend(subset.iter().map(|&j| self.d(i, j)));
        }
        let labels = subset.iter().map(|&i| self.labels[i].clone()).collect();
        Self::from_flat(labels, dist, len, self.rel_tol)
    }

    /// Reorders points so that new point `k` is old point `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len {
            return Err(MetricError::LabelMismatch {
                labels: order.len(),
                points: self.len,
            });
        }
        self.subspace(order)
    }

    /// First triple violating the strong triangle inequality, if any.
    pub fn ultrametric_violation(&self) -> Option<TripleWitness> {
        let n = self.len;
        for x in 0..n {
            for y in 0..n {
                let dxy = self.d(x, y);
                for z in 0..n {
                    if self.tol.gt(self.d(x, z), dxy.max(self.d(y, z))) {
                        return Some(TripleWitness { x, y, z });
                    }
                }
            }
        }
        None
    }

    /// Strong-triangle check restricted to `subset`, using this space's
    /// tolerance.
    pub fn ultrametric_violation_in(&self, subset: &[usize]) -> Option<TripleWitness> {
        for &x in subset {
            for &y in subset {
                let dxy = self.d(x, y);
                for &z in subset {
                    if self.tol.gt(self.d(x, z), dxy.max(self.d(y, z))) {
                        return Some(TripleWitness { x, y, z });
                    }
                }
            }
        }
        None
    }

    pub fn is_ultrametric(&self) -> bool {
        self.ultrametric_violation().is_none()
    }

    /// Distances raised to the power `p`, `0 < p <= 1`.
    pub fn snowflake(&self, p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(MetricError::InvalidExponent(p));
        }
        if p == 1.0 {
            return Ok(self.clone());
        }
        self.mapped(|d| d.powf(p))
    }

    /// Distances divided by `s`.
    pub fn rescale(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(MetricError::NonPositiveScale(s));
        }
        self.mapped(|d| d / s)
    }

    /// Raises every positive distance below one up to exactly one.
    pub fn truncate_to_one(&self) -> Self {
        self.mapped(|d| d.max(1.0))
            .expect("truncating at 1 preserves the metric axioms")
    }

    /// Hausdorff distance between two non-empty subsets.
    pub fn hausdorff(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        for &i in a.iter().chain(b) {
            self.check_index(i)?;
        }
        Ok(hausdorff_unchecked(self, a, b))
    }

    pub fn to_file(&self) -> SpaceFile {
        SpaceFile::Matrix {
            labels: Some(self.labels.clone()),
            matrix: self.matrix(),
        }
    }
}

pub(crate) fn hausdorff_unchecked(space: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> f64 {
    let one_way = |from: &[usize], to: &[usize]| from.iter().map(|&p| space.dist_to_set(p, to)).fold(0.0, f64::max);
    one_way(a, b).max(one_way(b, a))
}

pub fn default_labels(len: usize) -> Vec<String> {
    (0..len).map(|i| i.to_string()).collect()
}

/// On-disk JSON form of a space: either an explicit matrix or coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceFile {
    Matrix {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
        matrix: Vec<Vec<f64>>,
    },
    Points {
        points: Vec<Vec<f64>>,
        metric: PointMetric,
    },
}

impl SpaceFile {
    pub fn into_space(self, rel_tol: f64) -> Result<FiniteMetricSpace> {
        match self {
            SpaceFile::Matrix { labels, matrix } => {
                let labels = labels.unwrap_or_else(|| default_labels(matrix.len()));
                FiniteMetricSpace::validate_with_tolerance(labels, matrix, rel_tol)
            }
            SpaceFile::Points { points, metric } => {
                FiniteMetricSpace::from_points_with_tolerance(&points, metric, rel_tol)
            }
        }
    }
}
