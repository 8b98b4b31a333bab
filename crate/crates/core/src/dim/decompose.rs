use serde::Serialize;

use super::components::{components_unchecked, max_component_diameter};
use super::{check_bound, check_scale, DimError, Result};
use crate::metric::FiniteMetricSpace;

/// `X = X_0 ∪ ... ∪ X_m` with every `r`-component of each part of diameter
/// at most `factor * r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub parts: Vec<Vec<usize>>,
    pub r: f64,
    pub factor: f64,
    /// Absolute diameter bound `factor * r`.
    pub bound: f64,
}

impl Decomposition {
    pub fn part_count(&self) -> usize {
        self.parts.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DecompositionCheck {
    Ok {
        max_diameter: f64,
    },
    Violation {
        part: usize,
        component: Vec<usize>,
        diameter: f64,
    },
}

impl DecompositionCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, DecompositionCheck::Ok { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExhaustiveLimits {
    pub max_points: usize,
    pub max_parts: usize,
}

impl Default for ExhaustiveLimits {
    fn default() -> Self {
        ExhaustiveLimits {
            max_points: 14,
            max_parts: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactDecomposition {
    /// Smallest `m` such that `m + 1` parts suffice.
    pub m: usize,
    pub decomposition: Decomposition,
}

/// Checks that `parts` cover the space and that every `r`-component of every
/// part has diameter `<= factor * r` (up to tolerance). The first offending
/// component, in part order, is reported.
pub fn verify_decomposition(
    space: &FiniteMetricSpace,
    parts: &[Vec<usize>],
    r: f64,
    factor: f64,
) -> Result<DecompositionCheck> {
    check_scale(r)?;
    check_bound(factor)?;
    let mut covered = vec![false; space.len()];
    for part in parts {
        space.check_subset(part)?;
        for &i in part {
            covered[i] = true;
        }
    }
    if let Some(missing) = covered.iter().position(|&c| !c) {
        return Err(DimError::NotACover(missing));
    }
    let tol = space.tolerance();
    let bound = factor * r;
    let mut max_diameter = 0.0_f64;
    for (index, part) in parts.iter().enumerate() {
        if part.is_empty() {
            continue;
        }
        for c in components_unchecked(space, part, r) {
            if !tol.le(c.diameter, bound) {
                return Ok(DecompositionCheck::Violation {
                    part: index,
                    component: c.members,
                    diameter: c.diameter,
                });
            }
            max_diameter = max_diameter.max(c.diameter);
        }
    }
    Ok(DecompositionCheck::Ok { max_diameter })
}

/// Exhaustive search for the fewest parts. Points are assigned in index order
/// to an existing part or to the next fresh one, so each unordered partition
/// is visited once. Adding a point never shrinks a component, which lets a
/// branch be cut as soon as one part breaks the bound.
pub fn min_parts_exact(
    space: &FiniteMetricSpace,
    r: f64,
    factor: f64,
    limits: ExhaustiveLimits,
) -> Result<ExactDecomposition> {
    check_scale(r)?;
    check_bound(factor)?;
    if space.len() > limits.max_points {
        return Err(DimError::TooLarge {
            points: space.len(),
            limit: limits.max_points,
        });
    }
    let bound = factor * r;
    for count in 1..=limits.max_parts.min(space.len()) {
        let mut search = PartSearch {
            space,
            r,
            bound,
            max_parts: count,
            parts: Vec::with_capacity(count),
        };
        if search.assign(0) {
            let parts = search.parts;
            return Ok(ExactDecomposition {
                m: count - 1,
                decomposition: Decomposition {
                    parts,
                    r,
                    factor,
                    bound,
                },
            });
        }
    }
    Err(DimError::PartLimitExceeded {
        max_parts: limits.max_parts,
    })
}

struct PartSearch<'a> {
    space: &'a FiniteMetricSpace,
    r: f64,
    bound: f64,
    max_parts: usize,
    parts: Vec<Vec<usize>>,
}

impl PartSearch<'_> {
    fn assign(&mut self, point: usize) -> bool {
        if point == self.space.len() {
            return true;
        }
        let tol = self.space.tolerance();
        for index in 0..self.parts.len() {
            self.parts[index].push(point);
            let diameter = max_component_diameter(self.space, &self.parts[index], self.r);
            if tol.le(diameter, self.bound) && self.assign(point + 1) {
                return true;
            }
            self.parts[index].pop();
        }
        if self.parts.len() < self.max_parts {
            self.parts.push(vec![point]);
            if self.assign(point + 1) {
                return true;
            }
            self.parts.pop();
        }
        false
    }
}

/// First-fit assignment in index order; opens a new part whenever no existing
/// part can take the point. A singleton part is always admissible, so this
/// never fails.
pub fn greedy_parts(space: &FiniteMetricSpace, r: f64, factor: f64) -> Result<Decomposition> {
    check_scale(r)?;
    check_bound(factor)?;
    let bound = factor * r;
    let tol = space.tolerance();
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for point in 0..space.len() {
        let mut placed = false;
        for part in parts.iter_mut() {
            part.push(point);
            if tol.le(max_component_diameter(space, part, r), bound) {
                placed = true;
                break;
            }
            part.pop();
        }
        if !placed {
            parts.push(vec![point]);
        }
    }
    Ok(Decomposition {
        parts,
        r,
        factor,
        bound,
    })
}
