//! Quadratic functions `½xᵀHx + lᵀx + c` with arbitrary symmetric `H`.
//!
//! These need not be convex: `f − q` for a quadratic `f` usually is not,
//! and the inf-convolutions that classify VZ functions are taken over such
//! differences.

use nalgebra::DMatrix;

use crate::error::{check_dim, Result};
use crate::linalg;

#[derive(Debug, Clone, PartialEq)]
pub struct Quad {
    pub hess: DMatrix<f64>,
    pub lin: Vec<f64>,
    pub constant: f64,
}

impl Quad {
    pub fn new(hess: DMatrix<f64>, lin: Vec<f64>, constant: f64) -> Result<Self> {
        check_dim(hess.nrows(), hess.ncols())?;
        check_dim(hess.nrows(), lin.len())?;
        Ok(Self {
            hess,
            lin,
            constant,
        })
    }

    /// `½xᵀHx`.
    pub fn pure(hess: DMatrix<f64>) -> Self {
        let n = hess.nrows();
        Self {
            hess,
            lin: vec![0.0; n],
            constant: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.lin.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        0.5 * linalg::sym_bilinear(&self.hess, x, x) + linalg::dot(&self.lin, x) + self.constant
    }

    pub fn add(&self, other: &Quad) -> Quad {
        Quad {
            hess: &self.hess + &other.hess,
            lin: linalg::add(&self.lin, &other.lin),
            constant: self.constant + other.constant,
        }
    }

    pub fn sub(&self, other: &Quad) -> Quad {
        Quad {
            hess: &self.hess - &other.hess,
            lin: linalg::sub(&self.lin, &other.lin),
            constant: self.constant - other.constant,
        }
    }

    /// `x ↦ self(Tx)` for a square map `T`.
    pub fn compose(&self, t: &DMatrix<f64>) -> Quad {
        Quad {
            hess: t.transpose() * &self.hess * t,
            lin: linalg::mat_vec(&t.transpose(), &self.lin),
            constant: self.constant,
        }
    }

    /// Exact `inf_y [h(y) + k(x − y)]` with a minimizer when one exists.
    ///
    /// The value is `−∞` when the combined Hessian is indefinite, or
    /// semidefinite with the linear term outside its range.
    pub fn inf_conv(h: &Quad, k: &Quad, x: &[f64]) -> Result<(f64, Option<Vec<f64>>)> {
        check_dim(h.dim(), k.dim())?;
        check_dim(h.dim(), x.len())?;
        let total = &h.hess + &k.hess;
        let bx = linalg::mat_vec(&k.hess, x);
        let r: Vec<f64> = (0..x.len()).map(|i| bx[i] + k.lin[i] - h.lin[i]).collect();
        let constant = h.constant
            + k.constant
            + 0.5 * linalg::sym_bilinear(&k.hess, x, x)
            + linalg::dot(&k.lin, x);
        let (m, y) = linalg::min_quadratic(&total, &r);
        Ok((constant + m, y))
    }
}
