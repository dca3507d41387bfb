//! Fitzpatrick-type functions of a finite q-positive set `A`:
//!
//! * `Φ_A(b) = max_a [⌊a,b⌋ − q(a)]`, a max-affine function on `B`;
//! * `Θ_A(d) = max_a [aᵀd − q(a)]`, its counterpart on the dual;
//! * `Ψ_A`, the lower convex envelope of `q` restricted to `A`.

use std::time::Instant;

use rayon::prelude::*;

use crate::convex::{ConvexFunction, GridSup};
use crate::error::{check_dim, Error, Result};
use crate::grid::GridSpec;
use crate::linalg;
use crate::lp;
use crate::qpos::QPositiveSet;
use crate::report::{CheckReport, CheckRow};
use crate::space::SsdSpace;

/// Tolerance for identities that hold exactly up to rounding.
pub const IDENTITY_TOL: f64 = 1e-9;

fn same_space(space: &SsdSpace, a: &QPositiveSet) -> Result<()> {
    check_dim(space.dim(), a.space().dim())?;
    if space.form_matrix() != a.space().form_matrix() {
        return Err(Error::InvalidParams("set belongs to a different space".into()));
    }
    Ok(())
}

/// `Φ_A(b)` as a maximum of affine pieces.
pub fn phi(space: &SsdSpace, a: &QPositiveSet, b: &[f64]) -> Result<f64> {
    same_space(space, a)?;
    space.check_len(b)?;
    Ok(a
        .points()
        .iter()
        .map(|p| space.form_unchecked(p, b) - space.q_unchecked(p))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `Φ_A(b) = q(b) − inf q(A − b)`, computed independently of [`phi`].
pub fn phi_via_shift(space: &SsdSpace, a: &QPositiveSet, b: &[f64]) -> Result<f64> {
    same_space(space, a)?;
    space.check_len(b)?;
    Ok(space.q_unchecked(b) - a.inf_q_shift(b).0)
}

/// `Θ_A(d)` for a dual vector `d` under the dot pairing.
pub fn theta(space: &SsdSpace, a: &QPositiveSet, d: &[f64]) -> Result<f64> {
    same_space(space, a)?;
    space.check_len(d)?;
    Ok(a
        .points()
        .iter()
        .map(|p| linalg::dot(p, d) - space.q_unchecked(p))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `Ψ_A(b)` by linear programming; `+∞` outside `conv(A)`.
pub fn psi(space: &SsdSpace, a: &QPositiveSet, b: &[f64]) -> Result<f64> {
    same_space(space, a)?;
    space.check_len(b)?;
    let values: Vec<f64> = a.points().iter().map(|p| space.q_unchecked(p)).collect();
    Ok(lp::envelope(a.points(), &values, b)?.0)
}

/// `Φ_A`, `Θ_A` and `Ψ_A` in closed representation.
#[derive(Debug, Clone, PartialEq)]
pub struct FitzpatrickTriple {
    pub phi: ConvexFunction,
    pub theta: ConvexFunction,
    pub psi: ConvexFunction,
}

impl FitzpatrickTriple {
    /// Builds the triple and checks `Φ_A = q` and `Ψ_A ≤ q` on `A`.
    pub fn new(space: &SsdSpace, a: &QPositiveSet) -> Result<Self> {
        same_space(space, a)?;
        let pts = a.points();
        let qa: Vec<f64> = pts.iter().map(|p| space.q_unchecked(p)).collect();
        let triple = Self {
            phi: ConvexFunction::max_affine(pts.iter().map(|p| space.apply_form(p)).collect(), qa.clone())?,
            theta: ConvexFunction::max_affine(pts.to_vec(), qa.clone())?,
            psi: ConvexFunction::point_envelope(pts.to_vec(), qa.clone())?,
        };
        let worst = pts
            .par_iter()
            .zip(&qa)
            .map(|(p, q)| {
                let dphi = (triple.phi.eval(p)? - q).abs();
                let dpsi = triple.psi.eval(p)? - q;
                Ok((dphi.max(dpsi), p))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold((0.0, None), |acc, (v, p)| if v > acc.0 { (v, Some(p)) } else { acc });
        if worst.0 > IDENTITY_TOL {
            return Err(Error::InvalidParams(format!(
                "Fitzpatrick identities fail by {:e} at {:?}",
                worst.0, worst.1
            )));
        }
        Ok(triple)
    }
}

fn report(name: &str, start: Instant, rows: Result<Vec<CheckRow>>, reference: &str) -> CheckReport {
    let rows = rows.unwrap_or_else(|e| vec![CheckRow::errored(name, reference, e)]);
    CheckReport::new(name, 0, rows, start.elapsed().as_secs_f64())
}

/// Checks `Ψ_A ≥ f ≥ Φ_A` at the nodes of `grid`, plus `Φ_A ≥ q` as a
/// separate row that is only expected to pass when `A` is maximal.
/// `allowance` is the sampling allowance added to the `Φ_A ≥ q` row.
pub fn sandwich_check(
    space: &SsdSpace,
    a: &QPositiveSet,
    f: &ConvexFunction,
    grid: &GridSpec,
    tol: f64,
    allowance: f64,
) -> CheckReport {
    let start = Instant::now();
    let rows = sandwich_rows(space, a, f, grid, tol, allowance);
    report("sandwich", start, rows, "psi_A >= f >= phi_A >= q")
}

fn sandwich_rows(
    space: &SsdSpace,
    a: &QPositiveSet,
    f: &ConvexFunction,
    grid: &GridSpec,
    tol: f64,
    allowance: f64,
) -> Result<Vec<CheckRow>> {
    same_space(space, a)?;
    check_dim(space.dim(), f.dim())?;
    check_dim(space.dim(), grid.dim())?;
    let t = FitzpatrickTriple::new(space, a)?;
    // (Ψ − f deficit, f − Φ deficit, Φ − q deficit) per node; NaN marks Ψ = +∞.
    let per_node: Vec<(f64, f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let b = grid.node(k);
            let fv = f.eval(&b)?;
            let ph = t.phi.eval(&b)?;
            let ps = t.psi.eval(&b)?;
            let upper = if ps.is_finite() { fv - ps } else { f64::NAN };
            Ok((upper, ph - fv, space.q_unchecked(&b) - ph))
        })
        .collect::<Result<_>>()?;
    let worst = |sel: &dyn Fn(&(f64, f64, f64)) -> f64| {
        per_node
            .iter()
            .enumerate()
            .filter(|(_, v)| !sel(v).is_nan())
            .fold((f64::NEG_INFINITY, 0), |acc, (k, v)| if sel(v) > acc.0 { (sel(v), k) } else { acc })
    };
    let skipped = per_node.iter().filter(|v| v.0.is_nan()).count();
    let (u, ku) = worst(&|v| v.0);
    let (m, km) = worst(&|v| v.1);
    let (l, kl) = worst(&|v| v.2);
    let mut rows = Vec::new();
    if skipped == grid.len() {
        rows.push(CheckRow::skipped("psi_A >= f", "psi_A >= f", "grid misses conv(A)"));
    } else {
        rows.push(
            CheckRow::measured("psi_A >= f", "psi_A >= f", u, tol, 0.0)
                .with_witness(vec![grid.node(ku)])
                .with_metric("nodes_outside_hull", skipped as f64),
        );
    }
    rows.push(CheckRow::measured("f >= phi_A", "f >= phi_A", m, tol, 0.0).with_witness(vec![grid.node(km)]));
    rows.push(
        CheckRow::measured("phi_A >= q", "phi_A >= q", l, tol, allowance)
            .with_witness(vec![grid.node(kl)])
            .with_note("expected only for maximal A"),
    );
    Ok(rows)
}

/// Intrinsic conjugation round trip for `Φ_A`:
/// `Φ_A^@ ≤ q` on `A`, `Φ_A^@ ≥ Φ_A ∨ q` and `Φ_A^@@ = Φ_A` on `grid`, the
/// exact `Φ_A^@` against a brute-force supremum over `dual_search`, and
/// `⌊b,a⌋ ≤ q(a) + Φ_A(b)`.
pub fn conjugate_round_trip_check(
    space: &SsdSpace,
    a: &QPositiveSet,
    grid: &GridSpec,
    dual_search: &GridSpec,
    tol: f64,
) -> CheckReport {
    let start = Instant::now();
    let rows = round_trip_rows(space, a, grid, dual_search, tol);
    report("conjugate_round_trip", start, rows, "phi_A^@@ = phi_A")
}

fn round_trip_rows(
    space: &SsdSpace,
    a: &QPositiveSet,
    grid: &GridSpec,
    dual_search: &GridSpec,
    tol: f64,
) -> Result<Vec<CheckRow>> {
    same_space(space, a)?;
    check_dim(space.dim(), grid.dim())?;
    let t = FitzpatrickTriple::new(space, a)?;
    let phi_at = t.phi.intrinsic_conjugate(space)?;
    let phi_atat = phi_at.intrinsic_conjugate(space)?;

    let on_a: Vec<f64> = a
        .points()
        .par_iter()
        .map(|p| Ok(phi_at.eval(p)? - space.q_unchecked(p)))
        .collect::<Result<_>>()?;
    let (va, ka) = argmax(&on_a);

    let brute = GridSup::new(&t.phi, dual_search)?;
    // (max(Φ, q) − Φ^@, |Φ^@@ − Φ|, brute − exact, ⌊b,a⌋ − q(a) − Φ(b))
    let per_node: Vec<[f64; 4]> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let b = grid.node(k);
            let ph = t.phi.eval(&b)?;
            let at = phi_at.eval(&b)?;
            let atat = phi_atat.eval(&b)?;
            let lower = ph.max(space.q_unchecked(&b)) - at;
            let br = brute.intrinsic_at(space, &b);
            let two_route = if at.is_finite() { br - at } else { f64::NEG_INFINITY };
            let young = a
                .points()
                .iter()
                .map(|p| space.form_unchecked(&b, p) - space.q_unchecked(p) - ph)
                .fold(f64::NEG_INFINITY, f64::max);
            Ok([lower, (atat - ph).abs(), two_route, young])
        })
        .collect::<Result<_>>()?;
    let col = |i: usize| per_node.iter().map(|r| r[i]).collect::<Vec<_>>();
    let (vb, kb) = argmax(&col(0));
    let (vc, kc) = argmax(&col(1));
    let (vt, kt) = argmax(&col(2));
    let (vy, ky) = argmax(&col(3));
    let finite_at = per_node.iter().filter(|r| r[2].is_finite()).count();
    let node = |k: usize| vec![grid.node(k)];
    let mut rows = vec![
        CheckRow::measured("phi_A^@ <= q on A", "phi_A^@ <= q on A", va, tol, 0.0)
            .with_witness(vec![a.points()[ka].clone()]),
        CheckRow::measured("phi_A^@ >= max(phi_A, q)", "phi_A^@ >= phi_A v q", vb, tol, 0.0).with_witness(node(kb)),
        CheckRow::measured("phi_A^@@ = phi_A", "phi_A^@@ = phi_A", vc, tol, 0.0).with_witness(node(kc)),
        CheckRow::measured("<b,a> <= q(a) + phi_A(b)", "<b,a> <= q(a) + f(b) for a in P_q(f)", vy, tol, 0.0)
            .with_witness(node(ky)),
    ];
    if finite_at == 0 {
        rows.push(CheckRow::skipped(
            "phi_A^@ brute force <= exact",
            "f^@(c) = sup_b [<b,c> - f(b)]",
            "no grid node inside dom phi_A^@",
        ));
    } else {
        rows.push(
            CheckRow::measured("phi_A^@ brute force <= exact", "f^@(c) = sup_b [<b,c> - f(b)]", vt, tol, 0.0)
                .with_witness(node(kt))
                .with_metric("finite_nodes", finite_at as f64),
        );
    }
    if linalg::condition_number(space.form_matrix()) <= crate::convex::MAX_CONDITION {
        rows[0] = rows[0].clone().with_note("S invertible: phi_A^@ coincides with psi_A");
    }
    Ok(rows)
}

fn argmax(v: &[f64]) -> (f64, usize) {
    v.iter()
        .enumerate()
        .fold((f64::NEG_INFINITY, 0), |acc, (i, x)| if *x > acc.0 { (*x, i) } else { acc })
}
