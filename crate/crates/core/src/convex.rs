//! Extended-real convex functions in four closed representations, their
//! standard and intrinsic conjugates, and grid-scale biconjugation.

use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::grid::GridSpec;
use crate::legendre;
use crate::linalg;
use crate::lp;
use crate::quad::Quad;
use crate::report::{CheckReport, CheckRow};
use crate::space::SsdSpace;

/// Smallest eigenvalue accepted for a convex quadratic.
pub const PSD_SLACK: f64 = 1e-10;
/// Linear maps with a larger condition number are treated as singular.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexFunction {
    /// `½xᵀQx + bᵀx + c` with `Q` positive semidefinite.
    Quadratic(Quad),
    /// `maxᵢ (mᵢᵀx − cᵢ)`.
    MaxAffine {
        slopes: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    /// Values at the nodes of a grid; `+∞` marks points outside the domain.
    GridSampled { grid: GridSpec, values: Vec<f64> },
    /// Lower convex envelope of `aᵢ ↦ vᵢ`, `+∞` off the convex hull. With
    /// `precompose = Some(T)` the value at `x` is the envelope at `Tx`.
    PointEnvelope {
        points: Vec<Vec<f64>>,
        values: Vec<f64>,
        precompose: Option<DMatrix<f64>>,
    },
}

fn same_len(rows: &[Vec<f64>]) -> Result<usize> {
    let n = rows.first().ok_or(Error::Improper("no pieces".into()))?.len();
    for r in rows {
        check_dim(n, r.len())?;
    }
    Ok(n)
}

fn invertible(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if m.nrows() != m.ncols() || linalg::condition_number(m) > MAX_CONDITION {
        return None;
    }
    m.clone().try_inverse()
}

impl ConvexFunction {
    pub fn quadratic(q: DMatrix<f64>, b: Vec<f64>, c: f64) -> Result<Self> {
        if linalg::max_asymmetry(&q) > 0.0 {
            return Err(Error::AsymmetricForm {
                asymmetry: linalg::max_asymmetry(&q),
            });
        }
        let quad = Quad::new(q, b, c)?;
        let lam = linalg::min_eigenvalue(&quad.hess);
        if lam < -PSD_SLACK {
            return Err(Error::InvalidParams(format!(
                "quadratic is not convex: smallest eigenvalue {lam:e}"
            )));
        }
        Ok(Self::Quadratic(quad))
    }

    /// `½‖x‖²` on `R^n`.
    pub fn half_norm_sq(n: usize) -> Self {
        Self::Quadratic(Quad::pure(DMatrix::identity(n, n)))
    }

    pub fn max_affine(slopes: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        same_len(&slopes)?;
        check_dim(slopes.len(), offsets.len())?;
        if offsets.iter().any(|c| !c.is_finite()) || slopes.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("max-affine pieces must be finite".into()));
        }
        Ok(Self::MaxAffine { slopes, offsets })
    }

    pub fn grid_sampled(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        check_dim(grid.len(), values.len())?;
        if !values.iter().any(|v| v.is_finite()) {
            return Err(Error::Improper("grid function has no finite value".into()));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::Improper("grid values must be finite or +inf".into()));
        }
        Ok(Self::GridSampled { grid, values })
    }

    pub fn point_envelope(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        same_len(&points)?;
        check_dim(points.len(), values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("envelope values must be finite".into()));
        }
        Ok(Self::PointEnvelope {
            points,
            values,
            precompose: None,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Quadratic(q) => q.dim(),
            Self::MaxAffine { slopes, .. } => slopes[0].len(),
            Self::GridSampled { grid, .. } => grid.dim(),
            Self::PointEnvelope {
                points, precompose, ..
            } => precompose.as_ref().map_or(points[0].len(), |t| t.ncols()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Quadratic(_) => "quadratic",
            Self::MaxAffine { .. } => "max-affine",
            Self::GridSampled { .. } => "grid-sampled",
            Self::PointEnvelope { .. } => "point-envelope",
        }
    }

    /// Value at `x`; grid functions only evaluate at nodes.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            Self::Quadratic(q) => q.eval(x),
            Self::MaxAffine { slopes, offsets } => slopes
                .iter()
                .zip(offsets)
                .map(|(m, c)| linalg::dot(m, x) - c)
                .fold(f64::NEG_INFINITY, f64::max),
            Self::GridSampled { grid, values } => {
                let k = grid.locate(x).ok_or_else(|| Error::OffGridPoint {
                    point: x.to_vec(),
                })?;
                values[k]
            }
            Self::PointEnvelope {
                points,
                values,
                precompose,
            } => match precompose {
                Some(t) => lp::envelope(points, values, &linalg::mat_vec(t, x))?.0,
                None => lp::envelope(points, values, x)?.0,
            },
        })
    }

    /// Values at every node of `grid`, in row-major order.
    pub fn sample(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        check_dim(self.dim(), grid.dim())?;
        (0..grid.len())
            .into_par_iter()
            .map(|k| self.eval(&grid.node(k)))
            .collect()
    }

    /// `x ↦ self(Tx)`.
    pub fn compose_linear(&self, t: &DMatrix<f64>) -> Result<Self> {
        check_dim(self.dim(), t.nrows())?;
        Ok(match self {
            Self::Quadratic(q) => Self::Quadratic(q.compose(t)),
            Self::MaxAffine { slopes, offsets } => {
                let tt = t.transpose();
                Self::MaxAffine {
                    slopes: slopes.iter().map(|m| linalg::mat_vec(&tt, m)).collect(),
                    offsets: offsets.clone(),
                }
            }
            Self::PointEnvelope {
                points,
                values,
                precompose,
            } => {
                let total = match precompose {
                    Some(u) => u * t,
                    None => t.clone(),
                };
                // Tx = Σλa ⟺ x = Σλ T⁻¹a, so an invertible map moves the points.
                match invertible(&total) {
                    Some(inv) => Self::PointEnvelope {
                        points: points.iter().map(|a| linalg::mat_vec(&inv, a)).collect(),
                        values: values.clone(),
                        precompose: None,
                    },
                    None => Self::PointEnvelope {
                        points: points.clone(),
                        values: values.clone(),
                        precompose: Some(total),
                    },
                }
            }
            Self::GridSampled { .. } => {
                return Err(Error::Unsupported(
                    "linear change of variables on a grid function".into(),
                ))
            }
        })
    }

    /// Standard conjugate `f*(s) = sup_x [sᵀx − f(x)]` in closed form.
    /// Grid functions go through [`ConvexFunction::conjugate_on_grid`].
    pub fn conjugate_star(&self) -> Result<Self> {
        match self {
            Self::Quadratic(q) => {
                let chol = nalgebra::Cholesky::new(q.hess.clone()).ok_or(Error::DegenerateQuadratic)?;
                if linalg::min_eigenvalue(&q.hess) <= PSD_SLACK {
                    return Err(Error::DegenerateQuadratic);
                }
                let inv = chol.inverse();
                let inv = (&inv + inv.transpose()) * 0.5;
                let ib = linalg::mat_vec(&inv, &q.lin);
                let k = 0.5 * linalg::dot(&q.lin, &ib) - q.constant;
                Ok(Self::Quadratic(Quad {
                    hess: inv,
                    lin: linalg::scale(&ib, -1.0),
                    constant: k,
                }))
            }
            Self::MaxAffine { slopes, offsets } => Ok(Self::PointEnvelope {
                points: slopes.clone(),
                values: offsets.clone(),
                precompose: None,
            }),
            Self::PointEnvelope {
                points,
                values,
                precompose,
            } => {
                let slopes = match precompose {
                    None => points.clone(),
                    Some(t) => {
                        let inv = invertible(t).ok_or_else(|| {
                            Error::Unsupported("conjugate of an envelope behind a singular map".into())
                        })?;
                        // sup_x sᵀx − env(Tx) = max (T⁻¹aᵢ)ᵀs − vᵢ
                        points.iter().map(|a| linalg::mat_vec(&inv, a)).collect()
                    }
                };
                Ok(Self::MaxAffine {
                    slopes,
                    offsets: values.clone(),
                })
            }
            Self::GridSampled { .. } => Err(Error::Unsupported(
                "grid functions are conjugated onto a dual grid with conjugate_on_grid".into(),
            )),
        }
    }

    /// Discrete Legendre transform: `max over grid nodes x of sᵀx − f(x)`
    /// at every node `s` of `dual_grid`.
    pub fn conjugate_on_grid(&self, grid: &GridSpec, dual_grid: &GridSpec) -> Result<Self> {
        let (g, vals) = match self {
            Self::GridSampled { grid: own, values } => (own.clone(), values.clone()),
            _ => (grid.clone(), self.sample(grid)?),
        };
        let out = legendre::conjugate_grid(&g, &vals, dual_grid)?;
        Ok(Self::GridSampled {
            grid: dual_grid.clone(),
            values: out,
        })
    }

    /// Intrinsic conjugate `f^@(c) = sup_b [⌊b,c⌋ − f(b)] = f*(Sc)`.
    pub fn intrinsic_conjugate(&self, space: &SsdSpace) -> Result<Self> {
        check_dim(space.dim(), self.dim())?;
        self.conjugate_star()?.compose_linear(space.form_matrix())
    }
}

/// Brute-force suprema `max over nodes b of sᵀb − f(b)` with `f` cached on a
/// search grid; an independent route to `f*` and `f^@`.
#[derive(Debug, Clone)]
pub struct GridSup {
    nodes: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl GridSup {
    pub fn new(f: &ConvexFunction, search: &GridSpec) -> Result<Self> {
        let values = f.sample(search)?;
        let (nodes, values) = search
            .nodes()
            .into_iter()
            .zip(values)
            .filter(|(_, v)| v.is_finite())
            .unzip();
        Ok(Self { nodes, values })
    }

    /// `(sup, argmax node)`; `−∞` when the search grid misses `dom f`.
    pub fn conjugate_at(&self, s: &[f64]) -> (f64, Option<&[f64]>) {
        let mut best = (f64::NEG_INFINITY, None);
        for (b, v) in self.nodes.iter().zip(&self.values) {
            let t = linalg::dot(s, b) - v;
            if t > best.0 {
                best = (t, Some(b.as_slice()));
            }
        }
        best
    }

    /// `f^@(c)` by brute force: the standard conjugate at `Sc`.
    pub fn intrinsic_at(&self, space: &SsdSpace, c: &[f64]) -> f64 {
        self.conjugate_at(&space.apply_form(c)).0
    }
}

/// `f^@(c)` as a supremum over the nodes of `search`.
pub fn intrinsic_conjugate_at(
    f: &ConvexFunction,
    space: &SsdSpace,
    c: &[f64],
    search: &GridSpec,
) -> Result<f64> {
    space.check_len(c)?;
    Ok(GridSup::new(f, search)?.intrinsic_at(space, c))
}

/// Candidates where `f = q` within `tol`. Fails with the worst witness when
/// `f` dips below `q` by more than `tol`.
pub fn p_q_extract(
    space: &SsdSpace,
    f: &ConvexFunction,
    candidates: &[Vec<f64>],
    tol: f64,
) -> Result<Vec<Vec<f64>>> {
    check_dim(space.dim(), f.dim())?;
    let gaps: Vec<f64> = candidates
        .par_iter()
        .map(|b| Ok(f.eval(b)? - space.q(b)?))
        .collect::<Result<_>>()?;
    let worst = gaps
        .iter()
        .enumerate()
        .fold((f64::INFINITY, 0), |acc, (i, g)| if *g < acc.0 { (*g, i) } else { acc });
    if worst.0 < -tol {
        return Err(Error::FBelowQ {
            witness: candidates[worst.1].clone(),
            gap: worst.0,
        });
    }
    Ok(candidates
        .iter()
        .zip(&gaps)
        .filter(|(_, g)| g.abs() <= tol)
        .map(|(b, _)| b.clone())
        .collect())
}

/// Largest finite-difference slope between neighbouring finite nodes.
pub fn lipschitz_estimate(grid: &GridSpec, values: &[f64]) -> f64 {
    let mut best: f64 = 0.0;
    for k in 0..grid.len() {
        if !values[k].is_finite() {
            continue;
        }
        let idx = grid.multi_index(k);
        for (ax, axis) in grid.axes().iter().enumerate() {
            if idx[ax] + 1 < axis.count {
                let mut j = idx.clone();
                j[ax] += 1;
                let v = values[grid.flat_index(&j)];
                if v.is_finite() {
                    best = best.max((v - values[k]).abs() / axis.spacing());
                }
            }
        }
    }
    best
}

/// Grid-scale Fenchel–Moreau check: `f − f**` at interior nodes of `grid`,
/// with `f**` computed by two discrete Legendre transforms.
///
/// The tolerance is `C·h` with `h` the dual spacing and `C = ½√d·diam(grid)`.
/// That bound holds at every node whose subgradient lies inside the dual box;
/// the Lipschitz estimate of `f` is reported next to it.
pub fn biconjugate_check(f: &ConvexFunction, grid: &GridSpec, dual_grid: &GridSpec) -> CheckReport {
    let start = Instant::now();
    const REF: &str = "f(y) = sup_L [L(y) - f*(L)]";
    let rows = match biconjugate_rows(f, grid, dual_grid) {
        Ok(rows) => rows,
        Err(e) => vec![CheckRow::errored("biconjugate", REF, e)],
    };
    CheckReport::new("biconjugate", 0, rows, start.elapsed().as_secs_f64())
}

fn biconjugate_rows(f: &ConvexFunction, grid: &GridSpec, dual_grid: &GridSpec) -> Result<Vec<CheckRow>> {
    const REF: &str = "f(y) = sup_L [L(y) - f*(L)]";
    let vals = f.sample(grid)?;
    let star = legendre::conjugate_grid(grid, &vals, dual_grid)?;
    let bi = legendre::conjugate_grid(dual_grid, &star, grid)?;
    let mut max_gap = f64::NEG_INFINITY;
    let mut min_gap = f64::INFINITY;
    let mut worst = 0;
    let mut interior = 0usize;
    for k in 0..grid.len() {
        if !grid.is_interior(k) || !vals[k].is_finite() {
            continue;
        }
        interior += 1;
        let gap = vals[k] - bi[k];
        if gap > max_gap {
            max_gap = gap;
            worst = k;
        }
        min_gap = min_gap.min(gap);
    }
    if interior == 0 {
        return Err(Error::EmptySearchGrid);
    }
    let d = grid.dim() as f64;
    let h = dual_grid.max_spacing();
    let c = 0.5 * d.sqrt() * grid.diameter();
    let lip = lipschitz_estimate(grid, &vals);
    let gap_row = CheckRow::measured("biconjugate gap f - f**", REF, max_gap, 1e-9, c * h)
        .with_witness(vec![grid.node(worst)])
        .with_metric("c_const", c)
        .with_metric("h", h)
        .with_metric("lipschitz_estimate", lip)
        .with_metric("interior_nodes", interior as f64)
        .with_note(format!(
            "bound C*h with C = sqrt(d)/2 * diam(grid); valid where subgradients lie in the dual box [{}]",
            dual_grid.format_axes()
        ));
    let fy_row = CheckRow::measured("fenchel-young f** <= f", "f(x) + f*(s) >= <x,s>", -min_gap, 1e-9, 0.0)
        .with_metric("min_gap", min_gap);
    Ok(vec![gap_row, fy_row])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn evaluation_examples() {
        let q = ConvexFunction::half_norm_sq(2);
        assert_eq!(q.eval(&[3.0, 4.0]).unwrap(), 12.5);
        let m = ConvexFunction::max_affine(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0]).unwrap();
        assert_eq!(m.eval(&[2.0, 5.0]).unwrap(), 5.0);
        let e = ConvexFunction::point_envelope(vec![vec![-1.0, -1.0], vec![1.0, 1.0]], vec![1.0, 1.0]).unwrap();
        assert!(close(e.eval(&[0.0, 0.0]).unwrap(), 1.0, 1e-12));
        assert_eq!(e.eval(&[1.0, 0.0]).unwrap(), f64::INFINITY);
        assert!(matches!(q.eval(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn off_grid_evaluation_is_an_error() {
        let g = GridSpec::cube(0.0, 1.0, 3, 1).unwrap();
        let f = ConvexFunction::grid_sampled(g, vec![0.0, 1.0, 4.0]).unwrap();
        assert_eq!(f.eval(&[0.5]).unwrap(), 1.0);
        assert!(matches!(f.eval(&[0.3]), Err(Error::OffGridPoint { .. })));
    }

    #[test]
    fn constructors_validate() {
        assert!(ConvexFunction::quadratic(DMatrix::from_row_slice(2, 2, &[0., 1., 1., 0.]), vec![0.0; 2], 0.0).is_err());
        assert!(matches!(ConvexFunction::max_affine(vec![], vec![]), Err(Error::Improper(_))));
        let g = GridSpec::cube(0.0, 1.0, 2, 1).unwrap();
        assert!(matches!(
            ConvexFunction::grid_sampled(g, vec![f64::INFINITY; 2]),
            Err(Error::Improper(_))
        ));
    }

    #[test]
    fn half_norm_is_self_conjugate() {
        let f = ConvexFunction::half_norm_sq(3);
        assert_eq!(f.conjugate_star().unwrap(), f);
    }

    #[test]
    fn conjugate_of_norm_squared_is_quarter_norm() {
        let f = ConvexFunction::quadratic(DMatrix::identity(2, 2) * 2.0, vec![0.0; 2], 0.0).unwrap();
        let fs = f.conjugate_star().unwrap();
        let brute = GridSup::new(&f, &GridSpec::cube(-3.0, 3.0, 601, 2).unwrap()).unwrap();
        for s in [[1.0, 2.0], [-0.5, 0.3], [0.0, 0.0]] {
            let exact = fs.eval(&s).unwrap();
            assert!(close(exact, 0.25 * (s[0] * s[0] + s[1] * s[1]), 1e-12));
            // sup over a grid of spacing h misses at most ‖Q‖h²/4 per axis pair
            assert!(close(brute.conjugate_at(&s).0, exact, 1e-4));
        }
    }

    #[test]
    fn singular_quadratic_has_no_closed_form_conjugate() {
        let f = ConvexFunction::quadratic(DMatrix::from_row_slice(2, 2, &[1., 0., 0., 0.]), vec![0.0; 2], 0.0).unwrap();
        assert_eq!(f.conjugate_star(), Err(Error::DegenerateQuadratic));
    }

    #[test]
    fn indicator_of_origin_conjugates_to_zero() {
        let f = ConvexFunction::point_envelope(vec![vec![0.0, 0.0]], vec![0.0]).unwrap();
        let z = f.conjugate_star().unwrap();
        assert_eq!(
            z,
            ConvexFunction::MaxAffine {
                slopes: vec![vec![0.0, 0.0]],
                offsets: vec![0.0]
            }
        );
        assert_eq!(z.eval(&[5.0, -2.0]).unwrap(), 0.0);
    }

    #[test]
    fn intrinsic_conjugate_examples() {
        let f = ConvexFunction::half_norm_sq(2);
        let swap = builtins::pairing(1).unwrap();
        let fa = f.intrinsic_conjugate(&swap).unwrap();
        let neg = builtins::hilbert_negative(2).unwrap();
        let fb = f.intrinsic_conjugate(&neg).unwrap();
        let id = builtins::hilbert_identity(2).unwrap();
        let m = ConvexFunction::max_affine(vec![vec![1.0, 0.0], vec![-1.0, 2.0]], vec![0.5, 0.0]).unwrap();
        for c in [[1.0, -2.0], [0.3, 0.7]] {
            let want = 0.5 * (c[0] * c[0] + c[1] * c[1]);
            assert!(close(fa.eval(&c).unwrap(), want, 1e-12));
            assert!(close(fb.eval(&c).unwrap(), want, 1e-12));
            let x = [0.25 * c[0] + 0.1, 0.5 * c[1]];
            assert_eq!(
                m.intrinsic_conjugate(&id).unwrap().eval(&x).unwrap(),
                m.conjugate_star().unwrap().eval(&x).unwrap()
            );
        }
    }

    #[test]
    fn intrinsic_conjugate_of_max_affine_on_singular_form() {
        // S = diag(1, 0): f^@(c) = f*(c1, 0).
        let s = SsdSpace::new(DMatrix::from_row_slice(2, 2, &[1., 0., 0., 0.]), false).unwrap();
        let m = ConvexFunction::max_affine(vec![vec![-1.0, 0.0], vec![1.0, 0.0]], vec![0.0, 0.0]).unwrap();
        let fa = m.intrinsic_conjugate(&s).unwrap();
        assert!(matches!(fa, ConvexFunction::PointEnvelope { precompose: Some(_), .. }));
        assert!(close(fa.eval(&[0.5, 9.0]).unwrap(), 0.0, 1e-12));
        assert_eq!(fa.eval(&[1.5, 0.0]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn polyhedral_round_trip() {
        let m = ConvexFunction::max_affine(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
            vec![0.0, 0.5, 1.0],
        )
        .unwrap();
        let back = m.conjugate_star().unwrap().conjugate_star().unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn p_q_extraction() {
        let s = builtins::pairing(1).unwrap();
        let f = ConvexFunction::half_norm_sq(2);
        let g = GridSpec::cube_step(-1.0, 1.0, 0.1, 2).unwrap();
        let tol = 1e-3;
        let got = p_q_extract(&s, &f, &g.nodes(), tol).unwrap();
        assert!(!got.is_empty());
        for b in &got {
            assert!((b[0] - b[1]).abs() <= (2.0 * tol).sqrt() + 1e-12);
        }
        let below = ConvexFunction::point_envelope(vec![vec![1.0, 1.0]], vec![0.0]).unwrap();
        assert!(matches!(
            p_q_extract(&s, &below, &[vec![1.0, 1.0]], 1e-9),
            Err(Error::FBelowQ { .. })
        ));
    }

    #[test]
    fn biconjugation_of_half_norm_on_a_line() {
        let g = GridSpec::cube(-2.0, 2.0, 401, 1).unwrap();
        let r = biconjugate_check(&ConvexFunction::half_norm_sq(1), &g, &g);
        assert!(r.all_passed(), "{r:?}");
        assert!(r.checks[0].max_violation <= 1e-4);
        assert!(r.checks[0].max_violation >= -1e-9);
    }

    #[test]
    fn biconjugation_is_exact_for_polyhedral_slopes_on_the_dual_grid() {
        let g = GridSpec::cube(-1.0, 1.0, 41, 2).unwrap();
        let dg = GridSpec::cube(-2.0, 2.0, 41, 2).unwrap();
        let m = ConvexFunction::max_affine(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
            vec![0.0, 0.2, 0.4],
        )
        .unwrap();
        let r = biconjugate_check(&m, &g, &dg);
        assert!(r.checks[0].max_violation.abs() <= 1e-9, "{r:?}");
    }

    #[test]
    fn envelope_biconjugate_at_origin() {
        let e = ConvexFunction::point_envelope(vec![vec![-1.0], vec![1.0]], vec![1.0, 1.0]).unwrap();
        let back = e.conjugate_star().unwrap().conjugate_star().unwrap();
        assert!(close(back.eval(&[0.0]).unwrap(), 1.0, 1e-12));
    }
}
