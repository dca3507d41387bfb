//! Inf-convolution `(h ∇ k)(x) = inf_y [h(y) + k(x − y)]`.
//!
//! The integrands need not be convex: classifying VZ functions convolves
//! `f − q`, which usually is not.

use rayon::prelude::*;

use crate::convex::ConvexFunction;
use crate::error::{check_dim, Error, Result};
use crate::grid::GridSpec;
use crate::linalg;
use crate::quad::Quad;

/// One side of an inf-convolution.
#[derive(Clone, Copy)]
pub enum Integrand<'a> {
    Convex(&'a ConvexFunction),
    /// A quadratic of any signature, e.g. `f − q` or `p`.
    Quadratic(&'a Quad),
    /// Any function evaluable at search nodes and their differences.
    Func(&'a (dyn Fn(&[f64]) -> f64 + Sync)),
}

impl Integrand<'_> {
    fn as_quad(&self) -> Option<&Quad> {
        match self {
            Integrand::Convex(ConvexFunction::Quadratic(q)) => Some(q),
            Integrand::Quadratic(q) => Some(q),
            _ => None,
        }
    }

    fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            Integrand::Convex(f) => f.eval(x),
            Integrand::Quadratic(q) => Ok(q.eval(x)),
            Integrand::Func(f) => Ok(f(x)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfConv {
    pub value: f64,
    pub argmin: Option<Vec<f64>>,
    /// True when the closed form for quadratics was used.
    pub exact: bool,
}

/// `(h ∇ k)(x)`. Two quadratics whose Hessians sum to a positive definite
/// matrix are convolved in closed form and `search` is ignored; otherwise the
/// infimum is taken over the nodes of `search`.
pub fn inf_conv(h: Integrand, k: Integrand, x: &[f64], search: &GridSpec) -> Result<InfConv> {
    if let (Some(qh), Some(qk)) = (h.as_quad(), k.as_quad()) {
        let total = &qh.hess + &qk.hess;
        if linalg::min_eigenvalue(&total) > 1e-10 {
            let (value, argmin) = Quad::inf_conv(qh, qk, x)?;
            return Ok(InfConv {
                value,
                argmin,
                exact: true,
            });
        }
    }
    if search.is_empty() {
        return Err(Error::EmptySearchGrid);
    }
    check_dim(search.dim(), x.len())?;
    let (value, k_best) = (0..search.len())
        .into_par_iter()
        .map(|j| {
            let y = search.node(j);
            let hy = h.eval(&y)?;
            if hy == f64::INFINITY {
                return Ok((f64::INFINITY, j));
            }
            Ok((hy + k.eval(&linalg::sub(x, &y))?, j))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((f64::INFINITY, 0), |acc, v| if v.0 < acc.0 { v } else { acc });
    Ok(InfConv {
        value,
        argmin: value.is_finite().then(|| search.node(k_best)),
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use nalgebra::DMatrix;

    #[test]
    fn half_norms_convolve_to_quarter_norm() {
        let f = ConvexFunction::half_norm_sq(2);
        let g = GridSpec::cube_step(-3.0, 3.0, 0.05, 2).unwrap();
        let x = [1.0, -2.0];
        let exact = inf_conv(Integrand::Convex(&f), Integrand::Convex(&f), &x, &g).unwrap();
        assert!(exact.exact);
        assert!((exact.value - 1.25).abs() < 1e-12);
        let brute = |y: &[f64]| 0.5 * linalg::dot(y, y);
        let grid = inf_conv(Integrand::Func(&brute), Integrand::Func(&brute), &x, &g).unwrap();
        assert!(!grid.exact);
        assert!(grid.value >= exact.value - 1e-12 && grid.value - exact.value < 1e-3);
    }

    #[test]
    fn f_minus_q_against_p_vanishes_for_the_half_norm() {
        // pairing(1), f = ½‖·‖²: (f − q)(y) = ½(y1 − y2)², p(z) = ½(z1 + z2)².
        let s = builtins::pairing(1).unwrap();
        let fq = Quad::pure(DMatrix::identity(2, 2) - s.form_matrix());
        let p = Quad::pure(DMatrix::identity(2, 2) + s.form_matrix());
        let g = GridSpec::cube_step(-2.0, 2.0, 0.1, 2).unwrap();
        for c in [[1.0, -1.0], [0.3, 1.7], [-2.0, 0.4]] {
            let r = inf_conv(Integrand::Quadratic(&fq), Integrand::Quadratic(&p), &c, &g).unwrap();
            assert!(r.exact);
            assert!(r.value.abs() < 1e-12);
            let y = r.argmin.unwrap();
            let mid = 0.5 * (c[0] + c[1]);
            assert!((y[0] - mid).abs() < 1e-12 && (y[1] - mid).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_infimum_of_k_preserves_inf_of_h() {
        let h = |y: &[f64]| (y[0] - 0.3).abs() + 1.0;
        let k = |z: &[f64]| z[0] * z[0];
        let g = GridSpec::cube_step(-1.0, 1.0, 0.1, 1).unwrap();
        let best = g
            .nodes()
            .iter()
            .map(|x| inf_conv(Integrand::Func(&h), Integrand::Func(&k), x, &g).unwrap().value)
            .fold(f64::INFINITY, f64::min);
        assert!((best - 1.0).abs() < 1e-12);
    }
}
