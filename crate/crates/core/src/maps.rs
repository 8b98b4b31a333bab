//! Maps between finite metric spaces: Lipschitz and openness constants,
//! the fiber space under the Hausdorff distance, the ball-image criterion
//! for openness, and the constructive bounds for pulling decompositions
//! back along maps with controlled fibers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dim::{max_component_diameter, DimError};
use crate::metric::{hausdorff_unchecked, FiniteMetricSpace, MetricError, SpaceFile, Tolerance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Dim(#[from] DimError),
    #[error("assignment has {got} entries for a {expected}-point domain")]
    AssignmentLength { got: usize, expected: usize },
    #[error("point {point} is sent to {target}, outside the codomain")]
    AssignmentOutOfRange { point: usize, target: usize },
    #[error("mu = {given} is below the openness constant {required}")]
    InvalidMu { given: f64, required: f64 },
    #[error("Lipschitz constant is zero but the image has several points")]
    DegenerateMap,
    #[error("openness constant {0} exceeds 1; rescale the codomain first")]
    MuExceedsOne(f64),
    #[error("openness constant is zero; the codomain cannot be normalised")]
    ZeroOpenness,
    #[error("fiber over codomain point {0} is not ultrametric")]
    NonUltrametricFiber(usize),
    #[error("codomain part {part} has a component of diameter {diameter} > {bound}")]
    PartHypothesisFails { part: usize, diameter: f64, bound: f64 },
    #[error("image of the subset has diameter {diameter}, not below {bound}")]
    ImageTooLarge { diameter: f64, bound: f64 },
    #[error("fiber part {part} has a component of diameter {diameter} > {bound}")]
    FiberPartsHypothesisFails { part: usize, diameter: f64, bound: f64 },
    #[error("fiber parts miss point {0} of the base fiber")]
    FiberPartsIncomplete(usize),
    #[error("fiber part {part} contains point {point}, which is not in the base fiber")]
    FiberPartOutsideFiber { part: usize, point: usize },
    #[error("point {0} of the subset lies in no constructed part")]
    NotCovered(usize),
    #[error("measured diameter {measured} exceeds the proven bound {bound}")]
    BoundViolated { measured: f64, bound: f64 },
    #[error("parameter {name} must be positive and finite, got {value}")]
    BadParameter { name: &'static str, value: f64 },
}

pub type Result<T, E = MapError> = std::result::Result<T, E>;

/// A total function from the points of `domain` to the points of `codomain`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricMap {
    domain: FiniteMetricSpace,
    codomain: FiniteMetricSpace,
    assignment: Vec<usize>,
    /// `fibers[y]` is the preimage of codomain point `y`, ascending.
    fibers: Vec<Vec<usize>>,
    image: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapAnalysis {
    pub lambda: f64,
    pub mu: f64,
    pub parallel: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParallelCheck {
    pub parallel: bool,
    /// `(x, y)`: no point of the fiber over `y` sits at distance
    /// `d_Y(f(x), y)` from `x`.
    pub counterexample: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrodskiyFailure {
    pub point: usize,
    pub radius: f64,
    /// Codomain point inside `B(f(x), R / mu)` but outside `f(B(x, R))`.
    pub missing: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrodskiyReport {
    pub mu: f64,
    pub radii: Vec<f64>,
    pub checked: usize,
    pub failure: Option<BrodskiyFailure>,
}

impl BrodskiyReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberSpaceReport {
    pub lambda: f64,
    pub mu: f64,
    pub ok: bool,
    pub pairs: usize,
    /// Smallest `d_H / d_Y` over image pairs; `1 / lambda` is the floor.
    pub min_ratio: Option<f64>,
    /// Largest `d_H / d_Y` over image pairs; `mu` is the ceiling.
    pub max_ratio: Option<f64>,
    pub failure: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PullbackReport {
    pub lambda: f64,
    pub parts: Vec<Vec<usize>>,
    pub max_component_diameter: f64,
    /// `4K + r`.
    pub bound: f64,
    pub covers_domain: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberCoverReport {
    pub base_point: usize,
    pub fiber: Vec<usize>,
    pub parts: Vec<Vec<usize>>,
    pub max_component_diameter: f64,
    pub a: f64,
    pub b: f64,
    /// `a * r_X + b * R_Y`.
    pub bound: f64,
}

/// JSON form `{"domain": .., "codomain": .., "assignment": [..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub domain: SpaceFile,
    pub codomain: SpaceFile,
    pub assignment: Vec<usize>,
}

impl MapFile {
    pub fn into_map(self, rel_tol: f64) -> Result<MetricMap> {
        MetricMap::new(
            self.domain.into_space(rel_tol)?,
            self.codomain.into_space(rel_tol)?,
            self.assignment,
        )
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(MapError::BadParameter { name, value })
    }
}

/// Relative slack used when comparing dimensionless constants such as `mu`.
fn ratio_tol(space: &FiniteMetricSpace) -> Tolerance {
    Tolerance::new(space.rel_tolerance())
}

impl MetricMap {
    pub fn new(domain: FiniteMetricSpace, codomain: FiniteMetricSpace, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != domain.len() {
            return Err(MapError::AssignmentLength {
                got: assignment.len(),
                expected: domain.len(),
            });
        }
        let mut fibers = vec![Vec::new(); codomain.len()];
        for (point, &target) in assignment.iter().enumerate() {
            if target >= codomain.len() {
                return Err(MapError::AssignmentOutOfRange { point, target });
            }
            fibers[target].push(point);
        }
        let image = (0..codomain.len()).filter(|&y| !fibers[y].is_empty()).collect();
        Ok(MetricMap {
            domain,
            codomain,
            assignment,
            fibers,
            image,
        })
    }

    /// Projection `U x Y -> Y` with the sum metric; point `(u, y)` has index
    /// `u * |Y| + y`.
    pub fn product_projection(u: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<Self> {
        let (nu, ny) = (u.len(), y.len());
        let len = nu * ny;
        let mut matrix = vec![vec![0.0; len]; len];
        for (p, row) in matrix.iter_mut().enumerate() {
            for (q, entry) in row.iter_mut().enumerate() {
                *entry = u.d(p / ny, q / ny) + y.d(p % ny, q % ny);
            }
        }
        let labels = (0..len)
            .map(|p| format!("{},{}", u.labels()[p / ny], y.labels()[p % ny]))
            .collect();
        let rel_tol = u.rel_tolerance().max(y.rel_tolerance());
        let domain = FiniteMetricSpace::validate_with_tolerance(labels, matrix, rel_tol)?;
        Self::new(domain, y.clone(), (0..len).map(|p| p % ny).collect())
    }

    pub fn domain(&self) -> &FiniteMetricSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteMetricSpace {
        &self.codomain
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn fiber(&self, y: usize) -> &[usize] {
        &self.fibers[y]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn is_surjective(&self) -> bool {
        self.image.len() == self.codomain.len()
    }

    pub fn to_file(&self) -> MapFile {
        MapFile {
            domain: self.domain.to_file(),
            codomain: self.codomain.to_file(),
            assignment: self.assignment.clone(),
        }
    }

    /// `max_{x != x'} d_Y(f x, f x') / d_X(x, x')`.
    pub fn lipschitz_constant(&self) -> f64 {
        let n = self.domain.len();
        let mut lambda = 0.0_f64;
        for x in 0..n {
            for x2 in (x + 1)..n {
                let ratio = self.codomain.d(self.apply(x), self.apply(x2)) / self.domain.d(x, x2);
                lambda = lambda.max(ratio);
            }
        }
        lambda
    }

    /// `max d_X(x, f^-1(y)) / d_Y(f x, y)` over `x` and image points
    /// `y != f(x)`.
    pub fn openness_constant(&self) -> f64 {
        let mut mu = 0.0_f64;
        for x in 0..self.domain.len() {
            let fx = self.apply(x);
            for &y in &self.image {
                if y != fx {
                    let ratio = self.domain.dist_to_set(x, &self.fibers[y]) / self.codomain.d(fx, y);
                    mu = mu.max(ratio);
                }
            }
        }
        mu
    }

    fn cross_tolerance(&self) -> Tolerance {
        Tolerance::new(self.domain.tolerance().abs().max(self.codomain.tolerance().abs()))
    }

    /// Every distance to a fiber is attained and equals the codomain distance.
    pub fn check_parallel_fibers(&self) -> ParallelCheck {
        let tol = self.cross_tolerance();
        for x in 0..self.domain.len() {
            let fx = self.apply(x);
            for &y in &self.image {
                let target = self.codomain.d(fx, y);
                if !self.fibers[y].iter().any(|&x2| tol.eq(self.domain.d(x, x2), target)) {
                    return ParallelCheck {
                        parallel: false,
                        counterexample: Some((x, y)),
                    };
                }
            }
        }
        ParallelCheck {
            parallel: true,
            counterexample: None,
        }
    }

    pub fn analysis(&self) -> MapAnalysis {
        MapAnalysis {
            lambda: self.lipschitz_constant(),
            mu: self.openness_constant(),
            parallel: self.check_parallel_fibers().parallel,
        }
    }

    /// Radii used by [`Self::check_brodskiy`] when no grid is given: domain
    /// distances, codomain distances scaled by `mu`, and midpoints between
    /// consecutive values.
    pub fn default_radii(&self, mu: f64) -> Vec<f64> {
        let mut values = self.domain.distance_grid();
        if mu > 0.0 {
            values.extend(self.codomain.distance_grid().into_iter().map(|d| mu * d));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        let mut radii = Vec::with_capacity(2 * values.len() + 1);
        for (i, &v) in values.iter().enumerate() {
            radii.push(v);
            match values.get(i + 1) {
                Some(&next) => radii.push(0.5 * (v + next)),
                None => radii.push(2.0 * v),
            }
        }
        radii
    }

    /// Checks `B(f(x), R / mu) ∩ f(X) ⊆ f(B(x, R))` for every point and every
    /// radius of the grid. Open balls throughout; `mu = 0` makes the codomain
    /// ball the whole image.
    pub fn check_brodskiy(&self, mu: f64, radii: Option<&[f64]>) -> Result<BrodskiyReport> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(MapError::BadParameter { name: "mu", value: mu });
        }
        let required = self.openness_constant();
        if mu < required * (1.0 - self.domain.rel_tolerance()) {
            return Err(MapError::InvalidMu { given: mu, required });
        }
        let radii = match radii {
            Some(r) => r.to_vec(),
            None => self.default_radii(mu),
        };
        for &r in &radii {
            positive("R", r)?;
        }
        let (tx, ty) = (self.domain.tolerance(), self.codomain.tolerance());
        let mut checked = 0;
        let mut hit = vec![false; self.codomain.len()];
        for x in 0..self.domain.len() {
            let fx = self.apply(x);
            for &radius in &radii {
                hit.iter_mut().for_each(|h| *h = false);
                for t in 0..self.domain.len() {
                    if tx.lt(self.domain.d(x, t), radius) {
                        hit[self.apply(t)] = true;
                    }
                }
                let codomain_radius = if mu == 0.0 { f64::INFINITY } else { radius / mu };
                for &y in &self.image {
                    if ty.lt(self.codomain.d(fx, y), codomain_radius) && !hit[y] {
                        return Ok(BrodskiyReport {
                            mu,
                            radii,
                            checked,
                            failure: Some(BrodskiyFailure {
                                point: x,
                                radius,
                                missing: y,
                            }),
                        });
                    }
                }
                checked += 1;
            }
        }
        Ok(BrodskiyReport {
            mu,
            radii,
            checked,
            failure: None,
        })
    }

    /// Verifies `d_Y(y1, y2) / lambda <= d_H(f^-1 y1, f^-1 y2) <= mu d_Y(y1, y2)`
    /// for every pair of image points.
    pub fn fiber_space_check(&self) -> Result<FiberSpaceReport> {
        let lambda = self.lipschitz_constant();
        let mu = self.openness_constant();
        if lambda == 0.0 && self.image.len() >= 2 {
            return Err(MapError::DegenerateMap);
        }
        let tol = self.domain.tolerance();
        let mut report = FiberSpaceReport {
            lambda,
            mu,
            ok: true,
            pairs: 0,
            min_ratio: None,
            max_ratio: None,
            failure: None,
        };
        for (i, &y1) in self.image.iter().enumerate() {
            for &y2 in &self.image[i + 1..] {
                let dy = self.codomain.d(y1, y2);
                let dh = hausdorff_unchecked(&self.domain, &self.fibers[y1], &self.fibers[y2]);
                let ratio = dh / dy;
                report.min_ratio = Some(report.min_ratio.map_or(ratio, |m| m.min(ratio)));
                report.max_ratio = Some(report.max_ratio.map_or(ratio, |m| m.max(ratio)));
                report.pairs += 1;
                let holds = tol.le(dy / lambda, dh) && tol.le(dh, mu * dy);
                if !holds && report.ok {
                    report.ok = false;
                    report.failure = Some((y1, y2));
                }
            }
        }
        Ok(report)
    }

    /// The same map with the codomain rescaled so that the openness constant
    /// becomes 1.
    pub fn normalize_openness(&self) -> Result<MetricMap> {
        let mu = self.openness_constant();
        if mu == 0.0 {
            return Err(MapError::ZeroOpenness);
        }
        let codomain = self.codomain.rescale(1.0 / mu)?;
        MetricMap::new(self.domain.clone(), codomain, self.assignment.clone())
    }

    fn require_mu_at_most_one(&self) -> Result<f64> {
        let mu = self.openness_constant();
        if ratio_tol(&self.domain).gt(mu, 1.0) {
            return Err(MapError::MuExceedsOne(mu));
        }
        Ok(mu)
    }

    /// Pulls codomain parts back to `f^-1(Y_i)`. With ultrametric fibers,
    /// `mu <= 1` and every `(lambda r)`-component of each `Y_i` of diameter at
    /// most `k`, every `r`-component of a pulled-back part has diameter at
    /// most `4k + r`; the bound is measured and enforced.
    pub fn pullback_decomposition(&self, y_parts: &[Vec<usize>], r: f64, k: f64) -> Result<PullbackReport> {
        positive("r", r)?;
        if !(k >= 0.0 && k.is_finite()) {
            return Err(MapError::BadParameter { name: "K", value: k });
        }
        for &y in &self.image {
            if self.domain.ultrametric_violation_in(&self.fibers[y]).is_some() {
                return Err(MapError::NonUltrametricFiber(y));
            }
        }
        self.require_mu_at_most_one()?;
        let lambda = self.lipschitz_constant();
        let ty = self.codomain.tolerance();
        for (part, members) in y_parts.iter().enumerate() {
            self.codomain.check_subset(members)?;
            if members.is_empty() {
                continue;
            }
            let diameter = if lambda * r > 0.0 {
                crate::dim::r_components(&self.codomain, members, lambda * r)?
                    .iter()
                    .map(|c| c.diameter)
                    .fold(0.0, f64::max)
            } else {
                0.0
            };
            if !ty.le(diameter, k) {
                return Err(MapError::PartHypothesisFails {
                    part,
                    diameter,
                    bound: k,
                });
            }
        }
        let mut covered = vec![false; self.domain.len()];
        let parts: Vec<Vec<usize>> = y_parts
            .iter()
            .map(|members| {
                let mut part: Vec<usize> = members.iter().flat_map(|&y| self.fibers[y].iter().copied()).collect();
                part.sort_unstable();
                part.iter().for_each(|&x| covered[x] = true);
                part
            })
            .collect();
        let measured = parts
            .iter()
            .map(|p| max_component_diameter(&self.domain, p, r))
            .fold(0.0, f64::max);
        let bound = 4.0 * k + r;
        if !self.domain.tolerance().le(measured, bound) {
            return Err(MapError::BoundViolated { measured, bound });
        }
        Ok(PullbackReport {
            lambda,
            parts,
            max_component_diameter: measured,
            bound,
            covers_domain: covered.iter().all(|&c| c),
        })
    }

    /// Covers `subset` (whose image has diameter `< r_y`) by the
    /// `r_y`-neighbourhoods `A_i` of the parts `F_i` of the fiber over the
    /// smallest-index image point. If the `(2 r_y + r_x)`-components of each
    /// `F_i` are `c (2 r_y + r_x)`-bounded and `mu <= 1`, the `r_x`-components
    /// of every `A_i` are bounded by `c r_x + (2c + 2) r_y`.
    pub fn fiber_cover(
        &self,
        subset: &[usize],
        r_x: f64,
        r_y: f64,
        c: f64,
        fiber_parts: &[Vec<usize>],
    ) -> Result<FiberCoverReport> {
        positive("r_X", r_x)?;
        positive("R_Y", r_y)?;
        positive("c", c)?;
        if subset.is_empty() {
            return Err(MetricError::EmptySubset.into());
        }
        self.domain.check_subset(subset)?;
        let mut images: Vec<usize> = subset.iter().map(|&x| self.apply(x)).collect();
        images.sort_unstable();
        images.dedup();
        let image_diameter = self.codomain.diameter_of(&images);
        if !self.codomain.tolerance().lt(image_diameter, r_y) {
            return Err(MapError::ImageTooLarge {
                diameter: image_diameter,
                bound: r_y,
            });
        }
        self.require_mu_at_most_one()?;

        let base_point = images[0];
        let fiber = self.fibers[base_point].clone();
        let tx = self.domain.tolerance();
        let scale = 2.0 * r_y + r_x;
        let mut in_parts = vec![false; self.domain.len()];
        for (part, members) in fiber_parts.iter().enumerate() {
            self.domain.check_subset(members)?;
            if let Some(&point) = members.iter().find(|&&p| self.apply(p) != base_point) {
                return Err(MapError::FiberPartOutsideFiber { part, point });
            }
            members.iter().for_each(|&p| in_parts[p] = true);
            let diameter = max_component_diameter(&self.domain, members, scale);
            if !tx.le(diameter, c * scale) {
                return Err(MapError::FiberPartsHypothesisFails {
                    part,
                    diameter,
                    bound: c * scale,
                });
            }
        }
        if let Some(&missing) = fiber.iter().find(|&&p| !in_parts[p]) {
            return Err(MapError::FiberPartsIncomplete(missing));
        }

        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        let parts: Vec<Vec<usize>> = fiber_parts
            .iter()
            .map(|members| {
                sorted
                    .iter()
                    .copied()
                    .filter(|&x| !members.is_empty() && tx.lt(self.domain.dist_to_set(x, members), r_y))
                    .collect()
            })
            .collect();
        let mut covered = vec![false; self.domain.len()];
        parts.iter().flatten().for_each(|&x| covered[x] = true);
        if let Some(&missing) = sorted.iter().find(|&&x| !covered[x]) {
            return Err(MapError::NotCovered(missing));
        }
        let measured = parts
            .iter()
            .map(|p| max_component_diameter(&self.domain, p, r_x))
            .fold(0.0, f64::max);
        let (a, b) = (c, 2.0 * c + 2.0);
        let bound = a * r_x + b * r_y;
        if !tx.le(measured, bound) {
            return Err(MapError::BoundViolated { measured, bound });
        }
        Ok(FiberCoverReport {
            base_point,
            fiber,
            parts,
            max_component_diameter: measured,
            a,
            b,
            bound,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{default_labels, PointMetric};

    fn line(xs: &[f64]) -> FiniteMetricSpace {
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        FiniteMetricSpace::from_points(&pts, PointMetric::L1).unwrap()
    }

    fn identity(space: &FiniteMetricSpace) -> MetricMap {
        MetricMap::new(space.clone(), space.clone(), (0..space.len()).collect()).unwrap()
    }

    fn point() -> FiniteMetricSpace {
        FiniteMetricSpace::validate(default_labels(1), vec![vec![0.0]]).unwrap()
    }

    fn ultrametric4() -> FiniteMetricSpace {
        FiniteMetricSpace::validate(
            default_labels(4),
            vec![
                vec![0.0, 1.0, 3.0, 3.0],
                vec![1.0, 0.0, 3.0, 3.0],
                vec![3.0, 3.0, 0.0, 2.0],
                vec![3.0, 3.0, 2.0, 0.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn construction_errors() {
        let s = line(&[0.0, 1.0]);
        assert_eq!(
            MetricMap::new(s.clone(), s.clone(), vec![0]),
            Err(MapError::AssignmentLength { got: 1, expected: 2 })
        );
        assert_eq!(
            MetricMap::new(s.clone(), s, vec![0, 5]),
            Err(MapError::AssignmentOutOfRange { point: 1, target: 5 })
        );
    }

    #[test]
    fn constants_of_simple_maps() {
        let s = line(&[0.0, 1.0, 3.5]);
        let id = identity(&s);
        assert_eq!(id.lipschitz_constant(), 1.0);
        assert_eq!(id.openness_constant(), 1.0);
        assert!(id.check_parallel_fibers().parallel);

        let constant = MetricMap::new(s, point(), vec![0, 0, 0]).unwrap();
        assert_eq!(constant.lipschitz_constant(), 0.0);
        assert_eq!(constant.openness_constant(), 0.0);

        let doubling = MetricMap::new(line(&[0.0, 1.0]), line(&[0.0, 2.0]), vec![0, 1]).unwrap();
        assert_eq!(doubling.lipschitz_constant(), 2.0);
    }

    #[test]
    fn product_projection_is_parallel_with_unit_constants() {
        let p = MetricMap::product_projection(&line(&[0.0, 1.0, 4.0]), &line(&[0.0, 2.0, 2.5])).unwrap();
        assert_eq!(p.domain().len(), 9);
        assert_eq!(p.openness_constant(), 1.0);
        assert_eq!(p.lipschitz_constant(), 1.0);
        assert!(p.check_parallel_fibers().parallel);
        let report = p.fiber_space_check().unwrap();
        assert!(report.ok);
        assert_eq!(report.min_ratio, Some(1.0));
        assert_eq!(report.max_ratio, Some(1.0));
        assert!(p.check_brodskiy(1.0, None).unwrap().holds());
    }

    #[test]
    fn contracting_two_point_map_is_not_parallel() {
        let f = MetricMap::new(line(&[0.0, 3.0]), line(&[0.0, 1.0]), vec![0, 1]).unwrap();
        let check = f.check_parallel_fibers();
        assert!(!check.parallel);
        assert_eq!(check.counterexample, Some((0, 1)));
        assert_eq!(f.openness_constant(), 3.0);
    }

    #[test]
    fn brodskiy_examples() {
        let s = line(&[0.0, 1.0, 3.5]);
        assert!(identity(&s).check_brodskiy(1.0, None).unwrap().holds());
        let constant = MetricMap::new(s.clone(), point(), vec![0, 0, 0]).unwrap();
        for mu in [0.0, 0.5, 3.0] {
            assert!(constant.check_brodskiy(mu, None).unwrap().holds());
        }
        assert!(matches!(
            identity(&s).check_brodskiy(0.5, None),
            Err(MapError::InvalidMu {
                given: 0.5,
                required: 1.0
            })
        ));
    }

    #[test]
    fn brodskiy_with_custom_grid() {
        let f = MetricMap::new(line(&[0.0, 3.0]), line(&[0.0, 1.0]), vec![0, 1]).unwrap();
        let report = f.check_brodskiy(3.0, Some(&[3.0, 3.5])).unwrap();
        assert!(report.holds());
        assert_eq!(report.checked, 4);
        assert!(matches!(
            f.check_brodskiy(3.0, Some(&[0.0])),
            Err(MapError::BadParameter { .. })
        ));
    }

    #[test]
    fn fiber_space_examples() {
        let s = line(&[0.0, 1.0, 3.5]);
        let report = identity(&s).fiber_space_check().unwrap();
        assert!(report.ok);
        assert_eq!((report.lambda, report.mu), (1.0, 1.0));
        let single = MetricMap::new(s, point(), vec![0, 0, 0])
            .unwrap()
            .fiber_space_check()
            .unwrap();
        assert!(single.ok);
        assert_eq!(single.pairs, 0);
    }

    #[test]
    fn normalize_sets_openness_to_one() {
        let f = MetricMap::new(line(&[0.0, 3.0, 7.0]), line(&[0.0, 1.0, 1.5]), vec![0, 1, 2]).unwrap();
        let g = f.normalize_openness().unwrap();
        assert!((g.openness_constant() - 1.0).abs() < 1e-12);
        let constant = MetricMap::new(line(&[0.0, 1.0]), point(), vec![0, 0]).unwrap();
        assert_eq!(constant.normalize_openness(), Err(MapError::ZeroOpenness));
    }

    #[test]
    fn pullback_identity_on_ultrametric() {
        let u = ultrametric4();
        let id = identity(&u);
        let all: Vec<usize> = (0..4).collect();
        let report = id
            .pullback_decomposition(std::slice::from_ref(&all), 1.5, u.max_distance())
            .unwrap();
        assert_eq!(report.parts, vec![all]);
        assert!(report.max_component_diameter <= report.bound);
        assert!(report.covers_domain);
    }

    #[test]
    fn pullback_product_with_ultrametric_factor() {
        let f = MetricMap::product_projection(&ultrametric4(), &line(&[0.0, 1.0, 2.0, 6.0, 7.0])).unwrap();
        let r = 1.5;
        // (lambda r)-components of these parts have diameter at most 1.
        let y_parts = vec![vec![0, 1, 3, 4], vec![2]];
        let report = f.pullback_decomposition(&y_parts, r, 1.0).unwrap();
        assert_eq!(report.lambda, 1.0);
        assert_eq!(report.bound, 4.0 + r);
        assert!(report.max_component_diameter <= report.bound);
        assert!(report.covers_domain);
        assert_eq!(
            f.pullback_decomposition(&[vec![0, 1, 2]], r, 1.0),
            Err(MapError::PartHypothesisFails {
                part: 0,
                diameter: 2.0,
                bound: 1.0
            })
        );
    }

    #[test]
    fn pullback_rejects_bad_fibers_and_mu() {
        let f = MetricMap::product_projection(&line(&[0.0, 1.0, 2.0]), &line(&[0.0, 1.0])).unwrap();
        assert!(matches!(
            f.pullback_decomposition(&[vec![0, 1]], 1.0, 5.0),
            Err(MapError::NonUltrametricFiber(0))
        ));
        let g = MetricMap::new(line(&[0.0, 3.0]), line(&[0.0, 1.0]), vec![0, 1]).unwrap();
        assert_eq!(
            g.pullback_decomposition(&[vec![0, 1]], 1.0, 5.0),
            Err(MapError::MuExceedsOne(3.0))
        );
    }

    #[test]
    fn fiber_cover_identity_single_point() {
        let s = line(&[0.0, 1.0, 3.5]);
        let id = identity(&s);
        let report = id.fiber_cover(&[1], 1.0, 0.5, 1.0, &[vec![1]]).unwrap();
        assert_eq!(report.parts, vec![vec![1]]);
        assert_eq!(report.base_point, 1);
        assert_eq!(report.max_component_diameter, 0.0);
        assert_eq!((report.a, report.b), (1.0, 4.0));
    }

    #[test]
    fn fiber_cover_on_product_ball() {
        let f = MetricMap::product_projection(&line(&[0.0, 1.0, 2.0, 5.0]), &line(&[0.0, 0.5, 3.0])).unwrap();
        // Points whose Y-coordinate is 0 or 0.5: image diameter 0.5.
        let subset: Vec<usize> = (0..12).filter(|p| p % 3 != 2).collect();
        let (r_x, r_y, c) = (1.0, 0.75, 1.0);
        // Fiber over y = 0 is {0, 3, 6, 9} ~ {0, 1, 2, 5}; scale 2.5 joins
        // 0,1,2 (diameter 2 <= 2.5) and leaves 5 alone.
        let fiber_parts = vec![vec![0, 3, 6, 9]];
        let report = f.fiber_cover(&subset, r_x, r_y, c, &fiber_parts).unwrap();
        assert_eq!(report.base_point, 0);
        assert_eq!(report.parts, vec![subset.clone()]);
        assert!(report.max_component_diameter <= report.bound);
        assert_eq!(report.bound, c * r_x + (2.0 * c + 2.0) * r_y);

        assert!(matches!(
            f.fiber_cover(&[0, 2], r_x, r_y, c, &fiber_parts),
            Err(MapError::ImageTooLarge { .. })
        ));
        assert!(matches!(
            f.fiber_cover(&subset, r_x, r_y, c, &[vec![0, 3]]),
            Err(MapError::FiberPartsIncomplete(6))
        ));
        assert!(matches!(
            f.fiber_cover(&subset, r_x, r_y, 0.5, &fiber_parts),
            Err(MapError::FiberPartsHypothesisFails { part: 0, .. })
        ));
    }

    #[test]
    fn map_file_round_trip() {
        let f = MetricMap::product_projection(&line(&[0.0, 0.3]), &line(&[0.0, 1.0 / 3.0])).unwrap();
        let json = serde_json::to_string(&f.to_file()).unwrap();
        let back: MapFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_map(crate::DEFAULT_REL_TOL).unwrap(), f);
    }
}
