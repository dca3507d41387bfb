//! q-positive point sets.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::linalg;
use crate::space::SsdSpace;

/// Slack on `q(b − c) ≥ 0` when testing q-positivity.
pub const EPS_Q: f64 = 1e-12;

/// Where a sampled set came from. Infinite sets only ever enter as samples,
/// so the sampling is recorded alongside the points.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Generator {
    Custom,
    Diagonal { min: f64, max: f64, count: usize },
    Helix { lambda: f64, theta_min: f64, theta_max: f64, count: usize },
    Line { direction: Vec<f64>, t_min: f64, t_max: f64, count: usize },
    SgnGraph { radius: f64, count: usize },
    MonotoneGraph { breakpoints: Vec<(f64, f64)>, per_segment: usize },
    Product,
}

/// A check that failed: the quantity `value` fell below `bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub witness: Vec<Vec<f64>>,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QPositiveSet {
    space: SsdSpace,
    points: Vec<Vec<f64>>,
    generator: Generator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QPositivity {
    pub positive: bool,
    /// `min q(b − c)` over distinct index pairs (`+∞` for a singleton).
    pub min_value: f64,
    pub violation: Option<Violation>,
    pub pairs_scanned: usize,
}

impl QPositiveSet {
    /// Validates q-positivity of `points` and wraps them.
    pub fn new(space: &SsdSpace, points: Vec<Vec<f64>>, generator: Generator) -> Result<Self> {
        let check = is_q_positive(space, &points)?;
        if let Some(v) = check.violation {
            return Err(Error::InvalidParams(format!(
                "set is not q-positive: q(b - c) = {:e} at {:?}",
                v.value, v.witness
            )));
        }
        Ok(Self {
            space: space.clone(),
            points,
            generator,
        })
    }

    pub fn space(&self) -> &SsdSpace {
        &self.space
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `inf q(A − c)` with the index of a minimizer.
    pub fn inf_q_shift(&self, c: &[f64]) -> (f64, usize) {
        inf_q_shift(&self.space, &self.points, c)
    }

    /// Euclidean distance from `c` to the sample, with a nearest point index.
    pub fn distance(&self, c: &[f64]) -> (f64, usize) {
        nearest(&self.points, c)
    }

    /// Half the largest nearest-neighbour distance in the sample: the mesh of
    /// the sampling along the set it discretizes.
    pub fn covering_radius(&self) -> f64 {
        covering_radius(&self.points)
    }
}

pub(crate) fn inf_q_shift(space: &SsdSpace, points: &[Vec<f64>], c: &[f64]) -> (f64, usize) {
    let mut best = (f64::INFINITY, 0);
    for (i, a) in points.iter().enumerate() {
        let v = space.q_diff(a, c);
        if v < best.0 {
            best = (v, i);
        }
    }
    best
}

pub(crate) fn nearest(points: &[Vec<f64>], c: &[f64]) -> (f64, usize) {
    let mut best = (f64::INFINITY, 0);
    for (i, a) in points.iter().enumerate() {
        let d = linalg::dist(a, c);
        if d < best.0 {
            best = (d, i);
        }
    }
    best
}

pub fn covering_radius(points: &[Vec<f64>]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let worst = points
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            points
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, b)| linalg::dist(a, b))
                .filter(|d| *d > 0.0)
                .fold(f64::INFINITY, f64::min)
        })
        .filter(|d| d.is_finite())
        .reduce(|| 0.0, f64::max);
    0.5 * worst
}

/// Exhaustive pair scan of `q(b − c) ≥ −EPS_Q`; on failure the minimizing
/// pair is returned as the witness.
pub fn is_q_positive(space: &SsdSpace, points: &[Vec<f64>]) -> Result<QPositivity> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    for p in points {
        space.check_len(p)?;
    }
    let n = points.len();
    // Per-row minimum, then a deterministic reduction (ties to lowest index).
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = (f64::INFINITY, i, i);
            for j in (i + 1)..n {
                let v = space.q_diff(&points[i], &points[j]);
                if v < row.0 {
                    row = (v, i, j);
                }
            }
            row
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((f64::INFINITY, 0, 0), |acc, r| if r.0 < acc.0 { r } else { acc });
    let (min_value, i, j) = best;
    let positive = min_value >= -EPS_Q;
    let violation = (!positive).then(|| Violation {
        witness: vec![points[i].clone(), points[j].clone()],
        value: min_value,
        bound: -EPS_Q,
    });
    Ok(QPositivity {
        positive,
        min_value,
        violation,
        pairs_scanned: n * (n - 1) / 2,
    })
}

/// Grid points that could be added to `set` without breaking q-positivity.
///
/// A node `c` farther than `dist_floor` from every sample point with
/// `inf q(A − c) > −EPS_Q` is reported; the witness is `[c, argmin a]` and
/// `value = −inf q(A − c)` falls below `bound = EPS_Q`. An empty result only
/// means maximality was not falsified on this grid.
pub fn maximality_falsifier(
    set: &QPositiveSet,
    grid: &GridSpec,
    dist_floor: f64,
) -> Result<Vec<Violation>> {
    crate::error::check_dim(set.space().dim(), grid.dim())?;
    let found: Vec<Option<Violation>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let c = grid.node(k);
            let (d, _) = set.distance(&c);
            if d <= dist_floor {
                return None;
            }
            let (inf, idx) = set.inf_q_shift(&c);
            (inf > -EPS_Q).then(|| Violation {
                witness: vec![c, set.points()[idx].clone()],
                value: -inf,
                bound: EPS_Q,
            })
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}
