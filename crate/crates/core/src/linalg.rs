//! Small dense helpers. Dimensions in this crate are tiny (usually 2 to 6),
//! so everything works on `&[f64]` and `nalgebra::DMatrix`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).as_slice().to_vec()
}

/// `bᵀ M c` summed as `Σ_i M_ii b_i c_i + Σ_{i<j} M_ij (b_i c_j + b_j c_i)`.
///
/// For symmetric `M` this is bit-for-bit symmetric in `(b, c)`.
pub fn sym_bilinear(m: &DMatrix<f64>, b: &[f64], c: &[f64]) -> f64 {
    let n = b.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += m[(i, i)] * (b[i] * c[i]);
        for j in (i + 1)..n {
            acc += m[(i, j)] * (b[i] * c[j] + b[j] * c[i]);
        }
    }
    acc
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Spectral norm by power iteration on `MᵀM`, stopping once successive
/// estimates agree to relative tolerance `rel_tol`.
pub fn spectral_norm(m: &DMatrix<f64>, rel_tol: f64) -> f64 {
    let n = m.ncols();
    if n == 0 || m.iter().all(|x| *x == 0.0) {
        return 0.0;
    }
    let mtm = m.transpose() * m;
    // Deterministic start vector with no special alignment.
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.1 * (i as f64 + 1.0).sqrt());
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let w = &mtm * &v;
        let next = w.norm();
        if next == 0.0 {
            return 0.0;
        }
        v = w / next;
        if (next - lambda).abs() <= rel_tol * next {
            lambda = next;
            break;
        }
        lambda = next;
    }
    // Power iteration converges slowly for clustered top singular values;
    // cross-check with the SVD and keep the larger (both are lower bounds
    // only through rounding).
    let svd_max = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    lambda.sqrt().max(svd_max)
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Infimum of `½ yᵀ H y − rᵀ y` over all `y`, together with a minimizer.
///
/// Returns `(-inf, None)` when the problem is unbounded below: `H` has a
/// negative eigenvalue, or `r` has a component in the kernel of `H`.
pub fn min_quadratic(h: &DMatrix<f64>, r: &[f64]) -> (f64, Option<Vec<f64>>) {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h.clone());
    let scale = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, x| a.max(x.abs()))
        .max(1.0);
    let zero_tol = 1e-10 * scale;
    let r_norm = norm(r).max(1.0);
    let mut y = DVector::zeros(n);
    let mut value = 0.0;
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        let u = eig.eigenvectors.column(k);
        let rk: f64 = u.iter().zip(r).map(|(a, b)| a * b).sum();
        if lam < -zero_tol {
            return (f64::NEG_INFINITY, None);
        }
        if lam.abs() <= zero_tol {
            if rk.abs() > 1e-10 * r_norm {
                return (f64::NEG_INFINITY, None);
            }
            continue;
        }
        let coef = rk / lam;
        y += u * coef;
        value -= 0.5 * rk * coef;
    }
    (value, Some(y.as_slice().to_vec()))
}
