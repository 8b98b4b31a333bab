//! Search for violations of the n-dimensional Nagata property at one scale.
//!
//! A violation at scale `r` is a center `x`, distinct points `y_1..y_{n+2}`
//! and auxiliaries `z_1..z_{n+2}` (repeats allowed) with
//! `d(y_i, z_i) < r`, `d(x, z_i) < r/2` and `d(y_i, y_j) >= r` for `i != j`.

use serde::Serialize;

use super::{check_scale, Result};
use crate::metric::FiniteMetricSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ok,
    Violation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NagataWitness {
    pub center: usize,
    pub points: Vec<usize>,
    pub auxiliaries: Vec<usize>,
    /// `min_i min(r - d(y_i, z_i), r - 2 d(x, z_i))`.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NagataReport {
    pub n: usize,
    pub r: f64,
    pub verdict: Verdict,
    /// The violating configuration with the largest margin; first center
    /// wins ties.
    pub witness: Option<NagataWitness>,
    pub margin: f64,
}

impl NagataReport {
    pub fn is_ok(&self) -> bool {
        self.verdict == Verdict::Ok
    }

    /// Re-checks the three inequality families of the stored witness.
    pub fn witness_holds(&self, space: &FiniteMetricSpace) -> bool {
        let Some(w) = &self.witness else {
            return true;
        };
        let tol = space.tolerance();
        let r = self.r;
        let k = self.n + 2;
        if w.points.len() != k || w.auxiliaries.len() != k {
            return false;
        }
        let near = w
            .points
            .iter()
            .zip(&w.auxiliaries)
            .all(|(&y, &z)| tol.lt(space.d(y, z), r) && tol.lt(space.d(w.center, z), r / 2.0));
        let apart = (0..k).all(|i| ((i + 1)..k).all(|j| tol.ge(space.d(w.points[i], w.points[j]), r)));
        near && apart
    }
}

/// Best admissible auxiliary for `y` around `center`, with its slack.
fn best_auxiliary(space: &FiniteMetricSpace, center: usize, y: usize, r: f64) -> Option<(usize, f64)> {
    let tol = space.tolerance();
    let mut best: Option<(usize, f64)> = None;
    for z in 0..space.len() {
        let dyz = space.d(y, z);
        let dxz = space.d(center, z);
        if tol.lt(dyz, r) && tol.lt(dxz, r / 2.0) {
            let slack = (r - dyz).min(r - 2.0 * dxz);
            if best.is_none_or(|(_, s)| slack > s) {
                best = Some((z, slack));
            }
        }
    }
    best
}

struct CliqueSearch<'a> {
    space: &'a FiniteMetricSpace,
    r: f64,
    size: usize,
    /// (y, z, slack), sorted by slack descending then by y.
    candidates: Vec<(usize, usize, f64)>,
    chosen: Vec<usize>,
    best: Option<(Vec<usize>, f64)>,
}

impl CliqueSearch<'_> {
    fn run(&mut self, start: usize) {
        if self.chosen.len() == self.size {
            let slack = self.candidates[*self.chosen.last().expect("size >= 2")].2;
            if self.best.as_ref().is_none_or(|(_, s)| slack > *s) {
                self.best = Some((self.chosen.clone(), slack));
            }
            return;
        }
        let needed = self.size - self.chosen.len();
        let tol = self.space.tolerance();
        for next in start..self.candidates.len() {
            if self.candidates.len() - next < needed {
                break;
            }
            // Slacks only decrease along the list.
            if let Some((_, s)) = &self.best {
                if self.candidates[next].2 <= *s {
                    break;
                }
            }
            let y = self.candidates[next].0;
            let compatible = self
                .chosen
                .iter()
                .all(|&c| tol.ge(self.space.d(self.candidates[c].0, y), self.r));
            if compatible {
                self.chosen.push(next);
                self.run(next + 1);
                self.chosen.pop();
            }
        }
    }
}

/// Decides the n-dimensional Nagata property at scale `r`.
pub fn nagata_check(space: &FiniteMetricSpace, n: usize, r: f64) -> Result<NagataReport> {
    check_scale(r)?;
    let size = n + 2;
    let mut best: Option<NagataWitness> = None;
    for center in 0..space.len() {
        let mut candidates: Vec<(usize, usize, f64)> = (0..space.len())
            .filter_map(|y| best_auxiliary(space, center, y, r).map(|(z, s)| (y, z, s)))
            .collect();
        if candidates.len() < size {
            continue;
        }
        candidates.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
        let floor = best.as_ref().map(|w| w.margin);
        let mut search = CliqueSearch {
            space,
            r,
            size,
            candidates,
            chosen: Vec::with_capacity(size),
            best: floor.map(|m| (Vec::new(), m)),
        };
        search.run(0);
        if let Some((chosen, margin)) = search.best {
            if chosen.is_empty() {
                continue;
            }
            let mut picked: Vec<(usize, usize)> = chosen
                .iter()
                .map(|&c| (search.candidates[c].0, search.candidates[c].1))
                .collect();
            picked.sort_unstable();
            best = Some(NagataWitness {
                center,
                points: picked.iter().map(|p| p.0).collect(),
                auxiliaries: picked.iter().map(|p| p.1).collect(),
                margin,
            });
        }
    }
    Ok(match best {
        Some(w) => NagataReport {
            n,
            r,
            verdict: Verdict::Violation,
            margin: w.margin,
            witness: Some(w),
        },
        None => NagataReport {
            n,
            r,
            verdict: Verdict::Ok,
            witness: None,
            margin: 0.0,
        },
    })
}

/// Largest violation margin at scale `r`; zero when the property holds.
pub fn nagata_margin(space: &FiniteMetricSpace, n: usize, r: f64) -> Result<f64> {
    Ok(nagata_check(space, n, r)?.margin)
}

/// Runs [`nagata_check`] over a grid of scales, by default every positive
/// pairwise distance (optionally with midpoints between consecutive ones).
pub fn nagata_scan(
    space: &FiniteMetricSpace,
    n: usize,
    grid: Option<&[f64]>,
    midpoints: bool,
) -> Result<Vec<NagataReport>> {
    let scales = match grid {
        Some(g) => g.to_vec(),
        None => scale_grid(space, midpoints),
    };
    scales.into_iter().map(|r| nagata_check(space, n, r)).collect()
}

pub(crate) fn scale_grid(space: &FiniteMetricSpace, midpoints: bool) -> Vec<f64> {
    let distances = space.distance_grid();
    if !midpoints {
        return distances;
    }
    let mut grid = Vec::with_capacity(2 * distances.len());
    for (i, &d) in distances.iter().enumerate() {
        grid.push(d);
        if let Some(&next) = distances.get(i + 1) {
            grid.push(0.5 * (d + next));
        }
    }
    grid
}
