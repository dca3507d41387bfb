//! Uniform tensor grids used for discretized checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(Error::InvalidParams(format!(
                "axis needs finite min < max, got [{min}, {max}]"
            )));
        }
        if count < 2 {
            return Err(Error::InvalidParams(format!(
                "axis needs count >= 2, got {count}"
            )));
        }
        Ok(Self { min, max, count })
    }

    /// Axis with nodes `min, min + step, …` up to `max` (rounded to the
    /// nearest whole number of steps).
    pub fn with_step(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidParams(format!("step must be > 0, got {step}")));
        }
        let count = ((max - min) / step).round() as usize + 1;
        Self::new(min, max, count)
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.node(i)).collect()
    }

    /// Index of the node at `x`, allowing relative slack `1e-9` of a spacing.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let h = self.spacing();
        let t = (x - self.min) / h;
        let i = t.round();
        if i < 0.0 || i >= self.count as f64 || (t - i).abs() > 1e-9 {
            None
        } else {
            Some(i as usize)
        }
    }
}

/// Per-dimension `(min, max, count)` grid, row-major with the last axis
/// varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    axes: Vec<Axis>,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::EmptySearchGrid);
        }
        for a in &axes {
            Axis::new(a.min, a.max, a.count)?;
        }
        Ok(Self { axes })
    }

    /// The same axis repeated `dim` times.
    pub fn cube(min: f64, max: f64, count: usize, dim: usize) -> Result<Self> {
        Self::new(vec![Axis::new(min, max, count)?; dim])
    }

    pub fn cube_step(min: f64, max: f64, step: f64, dim: usize) -> Result<Self> {
        Self::new(vec![Axis::with_step(min, max, step)?; dim])
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_spacing(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).fold(0.0, f64::max)
    }

    /// Euclidean length of half a grid cell diagonal: every point of the box
    /// is within this distance of some node.
    pub fn covering_radius(&self) -> f64 {
        0.5 * self
            .axes
            .iter()
            .map(|a| a.spacing() * a.spacing())
            .sum::<f64>()
            .sqrt()
    }

    /// Euclidean diameter of the box.
    pub fn diameter(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| (a.max - a.min) * (a.max - a.min))
            .sum::<f64>()
            .sqrt()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            idx[k] = flat % a.count;
            flat /= a.count;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (i, a)| acc * a.count + i)
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.node(i))
            .collect()
    }

    pub fn nodes(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|k| self.node(k)).collect()
    }

    /// Flat index of the node at `x`, if `x` is (numerically) a node.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.dim() {
            return None;
        }
        let mut idx = Vec::with_capacity(x.len());
        for (xi, a) in x.iter().zip(&self.axes) {
            idx.push(a.index_of(*xi)?);
        }
        Some(self.flat_index(&idx))
    }

    /// True when no coordinate of the node sits on the boundary of the box.
    pub fn is_interior(&self, flat: usize) -> bool {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .all(|(&i, a)| i > 0 && i + 1 < a.count)
    }

    /// Parses the `min,max,count[;min,max,count...]` axis list.
    pub fn parse_axes(s: &str) -> Result<Self> {
        let mut axes = Vec::new();
        for part in s.split(';') {
            let fields: Vec<&str> = part.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!(
                    "axis `{part}` needs min,max,count"
                )));
            }
            let num = |f: &str| {
                f.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad number `{f}`: {e}")))
            };
            let count = fields[2]
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad count `{}`: {e}", fields[2])))?;
            axes.push(Axis::new(num(fields[0])?, num(fields[1])?, count)?);
        }
        Self::new(axes)
    }

    pub fn format_axes(&self) -> String {
        self.axes
            .iter()
            .map(|a| format!("{},{},{}", a.min, a.max, a.count))
            .collect::<Vec<_>>()
            .join(";")
    }
}
