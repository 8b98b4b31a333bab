//! Seeded generators shared by the integration suites.

#![allow(dead_code)]

use nagata::maps::MetricMap;
use nagata::metric::{default_labels, PointMetric};
use nagata::FiniteMetricSpace;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` uniform points of `[0, 10)^dim` under the Euclidean metric.
pub fn random_euclidean(rng: &mut impl Rng, n: usize, dim: usize) -> FiniteMetricSpace {
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..10.0)).collect())
        .collect();
    FiniteMetricSpace::from_points(&points, PointMetric::L2).expect("random points form a metric space")
}

/// Distances of a random agglomerative hierarchy: clusters are merged in a
/// random order at non-decreasing heights (ties allowed), and `d(i, j)` is
/// the height of the merge that first joins `i` and `j`.
pub fn ultrametric_matrix(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    let mut matrix = vec![vec![0.0; n]; n];
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut height = 0.0;
    while clusters.len() > 1 {
        if height == 0.0 || rng.random_bool(0.7) {
            height += f64::from(rng.random_range(1u32..=4)) * 0.5;
        }
        let i = rng.random_range(0..clusters.len());
        let a = clusters.swap_remove(i);
        let j = rng.random_range(0..clusters.len());
        for &p in &a {
            for &q in &clusters[j] {
                matrix[p][q] = height;
                matrix[q][p] = height;
            }
        }
        clusters[j].extend(a);
    }
    matrix
}

pub fn random_ultrametric(rng: &mut impl Rng, n: usize) -> FiniteMetricSpace {
    FiniteMetricSpace::validate(default_labels(n), ultrametric_matrix(rng, n)).expect("hierarchies are ultrametric")
}

/// A random ultrametric with one distance of one triple nudged. The largest
/// side `d(x, z)` of an isosceles triple is moved by less than half the
/// smallest positive distance, which keeps the triangle inequality. Raising
/// it always breaks the strong triangle inequality; lowering it breaks it
/// unless the triple was equilateral.
pub fn perturbed_ultrametric(rng: &mut impl Rng, n: usize) -> FiniteMetricSpace {
    assert!(n >= 3);
    let mut m = ultrametric_matrix(rng, n);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let (p, q, r) = (idx[0], idx[1], idx[2]);
    let sides = [(m[p][q], p, q), (m[q][r], q, r), (m[p][r], p, r)];
    let &(_, x, z) = sides.iter().max_by(|a, b| a.0.total_cmp(&b.0)).unwrap();
    let min_positive = m
        .iter()
        .flatten()
        .copied()
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let delta = rng.random_range(0.1..0.45) * min_positive;
    let d = if rng.random_bool(0.75) {
        m[x][z] + delta
    } else {
        m[x][z] - delta
    };
    m[x][z] = d;
    m[z][x] = d;
    FiniteMetricSpace::validate(default_labels(n), m).expect("small perturbations keep the triangle inequality")
}

/// Uniform surjection from `domain_len` points onto `codomain_len` points.
pub fn random_surjection(rng: &mut impl Rng, domain_len: usize, codomain_len: usize) -> Vec<usize> {
    assert!(domain_len >= codomain_len);
    let mut assignment: Vec<usize> = (0..codomain_len).collect();
    assignment.extend((codomain_len..domain_len).map(|_| rng.random_range(0..codomain_len)));
    assignment.shuffle(rng);
    assignment
}

/// A random surjection between random spaces with at most `max_points`
/// points each and at least two image points.
pub fn random_map(rng: &mut impl Rng, max_points: usize) -> MetricMap {
    let n = rng.random_range(2..=max_points);
    let k = rng.random_range(2..=n);
    let domain = any_space(rng, n);
    let codomain = any_space(rng, k);
    let assignment = random_surjection(rng, n, k);
    MetricMap::new(domain, codomain, assignment).expect("surjection is well formed")
}

/// Euclidean or ultrametric, chosen at random.
pub fn any_space(rng: &mut impl Rng, n: usize) -> FiniteMetricSpace {
    if rng.random_bool(0.5) {
        let dim = rng.random_range(1..=3);
        random_euclidean(rng, n, dim)
    } else {
        random_ultrametric(rng, n)
    }
}

/// Uniform random partition of `points` into at most `parts` non-empty parts.
pub fn random_partition(rng: &mut impl Rng, points: &[usize], parts: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); parts.max(1)];
    for &p in points {
        out[rng.random_range(0..parts.max(1))].push(p);
    }
    out.retain(|p| !p.is_empty());
    out
}
