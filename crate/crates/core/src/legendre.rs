//! Discrete Legendre–Fenchel transform on tensor grids.
//!
//! The one-dimensional transform builds the lower convex hull of the sampled
//! points and then sweeps the (sorted) slopes along the hull, which is linear
//! in the number of primal plus dual nodes. Higher dimensions factor through
//! `f*(s₁,…,s_d) = max_{x_d}[s_d x_d + … max_{x₁}[s₁x₁ − f(x)]]`, one axis
//! at a time; the factorization is exact because the sup runs over a product
//! set.

use rayon::prelude::*;

use crate::error::{check_dim, Result};
use crate::grid::GridSpec;

/// `out[j] = max_i (s[j]·x[i] − f[i])` for ascending `x` and `s`.
///
/// Entries of `f` equal to `+∞` are ignored; if every entry is `+∞` the
/// result is `−∞` everywhere.
pub fn transform_1d(x: &[f64], f: &[f64], s: &[f64], out: &mut [f64]) {
    debug_assert_eq!(x.len(), f.len());
    debug_assert_eq!(s.len(), out.len());
    // Lower hull by monotone chain over finite samples.
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(x.len());
    for (&xi, &fi) in x.iter().zip(f) {
        if fi == f64::INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let (x1, f1) = hull[hull.len() - 2];
            let (x2, f2) = hull[hull.len() - 1];
            // Drop the middle point when it lies on or above the chord.
            if (f2 - f1) * (xi - x1) >= (fi - f1) * (x2 - x1) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((xi, fi));
    }
    if hull.is_empty() {
        out.iter_mut().for_each(|o| *o = f64::NEG_INFINITY);
        return;
    }
    let mut k = 0;
    for (j, &sj) in s.iter().enumerate() {
        // Advance while the next hull vertex is at least as good.
        while k + 1 < hull.len() {
            let (xa, fa) = hull[k];
            let (xb, fb) = hull[k + 1];
            if sj * xb - fb >= sj * xa - fa {
                k += 1;
            } else {
                break;
            }
        }
        let (xk, fk) = hull[k];
        out[j] = sj * xk - fk;
    }
}

/// Conjugate of grid samples `values` (row-major over `grid`) evaluated at
/// every node of `dual_grid`.
pub fn conjugate_grid(grid: &GridSpec, values: &[f64], dual_grid: &GridSpec) -> Result<Vec<f64>> {
    check_dim(grid.dim(), dual_grid.dim())?;
    check_dim(grid.len(), values.len())?;
    let d = grid.dim();
    let mut shape: Vec<usize> = grid.axes().iter().map(|a| a.count).collect();
    let mut current = values.to_vec();
    for k in 0..d {
        let xs = grid.axes()[k].nodes();
        let ss = dual_grid.axes()[k].nodes();
        if k > 0 {
            current.iter_mut().for_each(|v| *v = -*v);
        }
        let outer: usize = shape[..k].iter().product();
        let inner: usize = shape[k + 1..].iter().product();
        let n_in = shape[k];
        let n_out = ss.len();
        let mut next = vec![0.0; outer * n_out * inner];
        next.par_chunks_mut(n_out * inner)
            .enumerate()
            .for_each(|(o, block)| {
                let mut fiber = vec![0.0; n_in];
                let mut res = vec![0.0; n_out];
                for i in 0..inner {
                    for (t, slot) in fiber.iter_mut().enumerate() {
                        *slot = current[(o * n_in + t) * inner + i];
                    }
                    transform_1d(&xs, &fiber, &ss, &mut res);
                    for (t, r) in res.iter().enumerate() {
                        block[t * inner + i] = *r;
                    }
                }
            });
        shape[k] = n_out;
        current = next;
    }
    Ok(current)
}
