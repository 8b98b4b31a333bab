use serde::Serialize;

use super::{check_scale, DimError, Result};
use crate::metric::FiniteMetricSpace;

/// Disjoint-set forest with path compression and union by rank.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    /// Returns `true` when the two nodes were in different classes.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] = self.rank[a].saturating_add(1);
        }
        true
    }
}

/// One `r`-component: members in ascending index order and their diameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Component {
    pub members: Vec<usize>,
    pub diameter: f64,
}

/// Partitions `subset` into classes of the chain relation "linked by hops of
/// length `< r` inside `subset`". Classes are ordered by smallest member.
pub fn r_components(space: &FiniteMetricSpace, subset: &[usize], r: f64) -> Result<Vec<Component>> {
    check_scale(r)?;
    if subset.is_empty() {
        return Err(DimError::Metric(crate::metric::MetricError::EmptySubset));
    }
    space.check_subset(subset)?;
    Ok(components_unchecked(space, subset, r))
}

pub(crate) fn components_unchecked(space: &FiniteMetricSpace, subset: &[usize], r: f64) -> Vec<Component> {
    let mut members: Vec<usize> = subset.to_vec();
    members.sort_unstable();
    let tol = space.tolerance();
    let mut uf = UnionFind::new(members.len());
    for a in 0..members.len() {
        for b in (a + 1)..members.len() {
            if tol.lt(space.d(members[a], members[b]), r) {
                uf.union(a, b);
            }
        }
    }
    let mut slot = vec![usize::MAX; members.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (a, &member) in members.iter().enumerate() {
        let root = uf.find(a);
        if slot[root] == usize::MAX {
            slot[root] = classes.len();
            classes.push(Vec::new());
        }
        classes[slot[root]].push(member);
    }
    classes
        .into_iter()
        .map(|members| {
            let diameter = space.diameter_of(&members);
            Component { members, diameter }
        })
        .collect()
}

/// Largest `r`-component diameter of `subset`, without validation.
pub(crate) fn max_component_diameter(space: &FiniteMetricSpace, subset: &[usize], r: f64) -> f64 {
    if subset.is_empty() {
        return 0.0;
    }
    components_unchecked(space, subset, r)
        .iter()
        .map(|c| c.diameter)
        .fold(0.0, f64::max)
}
