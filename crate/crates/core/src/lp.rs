//! Dense two-phase simplex for small standard-form linear programs
//! `min cᵀx  s.t.  Ax = b, x ≥ 0`.
//!
//! The programs solved here have a handful of rows (dimension + 1) and up to
//! a few thousand columns, so a full tableau is the simplest thing that is
//! also fast enough.

use crate::error::{Error, Result};

/// Entries smaller than this are never used as pivots.
pub const PIVOT_TOL: f64 = 1e-11;

const MAX_ITERS: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible { residual: f64 },
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize,
    // (rows + 1) x (cols + 1); last row is the objective, last column the rhs.
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let p = self.at(pr, pc);
        for c in 0..w {
            *self.at_mut(pr, c) /= p;
        }
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.at(r, pc);
            if f == 0.0 {
                continue;
            }
            for c in 0..w {
                let v = self.at(pr, c);
                if v != 0.0 {
                    *self.at_mut(r, c) -= f * v;
                }
            }
            *self.at_mut(r, pc) = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Runs simplex iterations on the current objective row restricted to
    /// columns where `allowed` is true. Returns false if unbounded.
    fn optimize(&mut self, allowed: &dyn Fn(usize) -> bool, rc_tol: f64) -> Result<bool> {
        let mut degenerate_run = 0usize;
        for _ in 0..MAX_ITERS {
            let obj = self.rows;
            // Dantzig's rule, falling back to Bland's rule on long degenerate
            // stretches to rule out cycling.
            let use_bland = degenerate_run > 50;
            let mut enter = None;
            let mut best = -rc_tol;
            for c in 0..self.cols {
                if !allowed(c) || self.basis.contains(&c) {
                    continue;
                }
                let rc = self.at(obj, c);
                if rc < best {
                    enter = Some(c);
                    if use_bland {
                        break;
                    }
                    best = rc;
                }
            }
            let Some(pc) = enter else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - 1e-15
                                || (ratio <= lratio + 1e-15 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((pr, ratio)) = leave else {
                return Ok(false);
            };
            if ratio.abs() <= 1e-15 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(pr, pc);
        }
        Err(Error::LpNumericalFailure(format!(
            "no convergence after {MAX_ITERS} pivots ({} rows, {} columns)",
            self.rows, self.cols
        )))
    }
}

/// Solves `min cᵀx  s.t.  Ax = b, x ≥ 0` where `a` holds the rows of `A`.
pub fn solve_standard(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpOutcome> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::LpNumericalFailure("inconsistent LP shapes".into()));
    }
    if a.iter().flatten().chain(b).chain(c).any(|v| !v.is_finite()) {
        return Err(Error::LpNumericalFailure("non-finite LP data".into()));
    }
    let scale = a
        .iter()
        .flatten()
        .chain(b)
        .fold(1.0f64, |acc, v| acc.max(v.abs()));
    let feas_tol = 1e-9 * scale;
    let c_scale = c.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));

    // Columns: n structural, then m artificials.
    let cols = n + m;
    let mut t = Tableau {
        rows: m,
        cols,
        data: vec![0.0; (m + 1) * (cols + 1)],
        basis: (n..n + m).collect(),
    };
    for r in 0..m {
        let sign = if b[r] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            *t.at_mut(r, j) = sign * a[r][j];
        }
        *t.at_mut(r, n + r) = 1.0;
        *t.at_mut(r, cols) = sign * b[r];
    }
    // Phase 1 objective: sum of artificials, expressed in nonbasic terms.
    for j in 0..=cols {
        if j >= n && j < cols {
            continue;
        }
        let s: f64 = (0..m).map(|r| t.at(r, j)).sum();
        *t.at_mut(m, j) = -s;
    }
    t.optimize(&|_| true, 1e-12 * scale)?;
    let residual = -t.rhs(m);
    if residual > feas_tol {
        return Ok(LpOutcome::Infeasible { residual });
    }

    // Drive zero-level artificials out of the basis where possible; rows
    // where that is impossible are redundant and stay inert.
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(pc) = (0..n)
                .filter(|j| !t.basis.contains(j))
                .max_by(|&x, &y| t.at(r, x).abs().total_cmp(&t.at(r, y).abs()))
                .filter(|&j| t.at(r, j).abs() > PIVOT_TOL)
            {
                t.pivot(r, pc);
            }
        }
    }

    // Phase 2 objective row: c_j − c_Bᵀ B⁻¹ A_j.
    for j in 0..=cols {
        let cj = if j < n { c[j] } else { 0.0 };
        let mut v = if j == cols { 0.0 } else { cj };
        for r in 0..m {
            let bj = t.basis[r];
            let cb = if bj < n { c[bj] } else { 0.0 };
            v -= cb * t.at(r, j);
        }
        *t.at_mut(m, j) = v;
    }
    let bounded = t.optimize(&|j| j < n, 1e-12 * c_scale)?;
    if !bounded {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for r in 0..m {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    Ok(LpOutcome::Optimal { value, x })
}

/// Convex envelope value `min Σλᵢvᵢ` over `Σλᵢaᵢ = x`, `λ` in the simplex.
///
/// Returns `+∞` when `x` lies outside the convex hull of the points, together
/// with the optimal weights otherwise.
pub fn envelope(points: &[Vec<f64>], values: &[f64], x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = points.len();
    let d = x.len();
    if n == 1 {
        // Single point: exact comparison avoids tolerance questions.
        return if points[0].iter().zip(x).all(|(a, b)| a == b) {
            Ok((values[0], vec![1.0]))
        } else {
            Ok((f64::INFINITY, vec![]))
        };
    }
    let mut a = vec![vec![0.0; n]; d + 1];
    for (j, p) in points.iter().enumerate() {
        for i in 0..d {
            a[i][j] = p[i];
        }
        a[d][j] = 1.0;
    }
    let mut b = x.to_vec();
    b.push(1.0);
    match solve_standard(&a, &b, values)? {
        LpOutcome::Optimal { value, x } => Ok((value, x)),
        LpOutcome::Infeasible { .. } => Ok((f64::INFINITY, vec![])),
        LpOutcome::Unbounded => Err(Error::LpNumericalFailure(
            "envelope LP reported unbounded over a simplex".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp_optimum() {
        // min -x1 - x2  s.t. x1 + 2x2 + s1 = 4, 3x1 + x2 + s2 = 6
        let a = vec![vec![1., 2., 1., 0.], vec![3., 1., 0., 1.]];
        let b = vec![4., 6.];
        let c = vec![-1., -1., 0., 0.];
        match solve_standard(&a, &b, &c).unwrap() {
            LpOutcome::Optimal { value, x } => {
                assert!((value + 2.8).abs() < 1e-12);
                assert!((x[0] - 1.6).abs() < 1e-12 && (x[1] - 1.2).abs() < 1e-12);
            }
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![1., 1.]];
        assert!(matches!(
            solve_standard(&a, &[-1.0], &[1., 1.]).unwrap(),
            LpOutcome::Infeasible { .. }
        ));
        let a = vec![vec![1., -1.]];
        assert_eq!(
            solve_standard(&a, &[1.0], &[0., -1.]).unwrap(),
            LpOutcome::Unbounded
        );
    }

    #[test]
    fn envelope_of_two_points_at_midpoint() {
        let pts = vec![vec![-1.0, -1.0], vec![1.0, 1.0]];
        let (v, lam) = envelope(&pts, &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!((lam[0] - 0.5).abs() < 1e-12);
        let (v, _) = envelope(&pts, &[1.0, 1.0], &[2.0, 2.0]).unwrap();
        assert_eq!(v, f64::INFINITY);
    }

    #[test]
    fn envelope_picks_lower_chord() {
        // Points on the parabola t ↦ t² plus a high point in the middle.
        let pts: Vec<Vec<f64>> = vec![vec![-1.0], vec![0.0], vec![1.0], vec![0.5]];
        let vals = [1.0, 5.0, 1.0, 0.25];
        let (v, _) = envelope(&pts, &vals, &[0.0]).unwrap();
        // Chord between -1 (1.0) and 0.5 (0.25) at 0: 1 + (0.25-1)*(1/1.5) = 0.5
        assert!((v - 0.5).abs() < 1e-12, "{v}");
    }

    #[test]
    fn degenerate_duplicate_points() {
        let pts = vec![vec![0.0], vec![0.0], vec![1.0], vec![1.0]];
        let (v, _) = envelope(&pts, &[2.0, 1.0, 3.0, 0.0], &[0.5]).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }
}
