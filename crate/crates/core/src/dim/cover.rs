use serde::Serialize;

use super::{check_scale, DimError, Result};
use crate::metric::FiniteMetricSpace;

/// Open balls `B(a, r)` around a maximal `r`-separated net `A`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cover {
    pub net: Vec<usize>,
    pub radius: f64,
    /// `elements[i]` lists the members of the ball around `net[i]`.
    pub elements: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Multiplicity {
    pub count: usize,
    /// Smallest-index point attaining `count`.
    pub point: usize,
    pub radius: f64,
}

/// Greedy maximal `r`-separated net in index order and its ball cover.
pub fn net_cover(space: &FiniteMetricSpace, r: f64) -> Result<Cover> {
    check_scale(r)?;
    let tol = space.tolerance();
    let mut net: Vec<usize> = Vec::new();
    for p in 0..space.len() {
        if net.iter().all(|&a| tol.ge(space.d(a, p), r)) {
            net.push(p);
        }
    }
    let elements = net
        .iter()
        .map(|&a| (0..space.len()).filter(|&p| tol.lt(space.d(a, p), r)).collect())
        .collect();
    Ok(Cover {
        net,
        radius: r,
        elements,
    })
}

/// `max_x #{U : some u in U has d(x, u) < s}` over a family covering the space.
pub fn cover_multiplicity(space: &FiniteMetricSpace, elements: &[Vec<usize>], s: f64) -> Result<Multiplicity> {
    check_scale(s)?;
    let mut covered = vec![false; space.len()];
    for element in elements {
        for &p in element {
            space.check_index(p)?;
            covered[p] = true;
        }
    }
    if let Some(missing) = covered.iter().position(|&c| !c) {
        return Err(DimError::NotACover(missing));
    }
    let tol = space.tolerance();
    let mut best = Multiplicity {
        count: 0,
        point: 0,
        radius: s,
    };
    for x in 0..space.len() {
        let count = elements
            .iter()
            .filter(|u| u.iter().any(|&p| tol.lt(space.d(x, p), s)))
            .count();
        if count > best.count {
            best.count = count;
            best.point = x;
        }
    }
    Ok(best)
}
