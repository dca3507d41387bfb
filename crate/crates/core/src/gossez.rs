//! Dual structure on `B* ≅ R^n` and Gossez extensions.
//!
//! With `ι(b) = Sb` and the dot pairing between `B` and `B*`, the identity
//! `⌈ι(b), c*⌉ = ⟨b, c*⟩` forces the dual form `S̃ = S⁻¹`, so a dual exists
//! exactly when `S` is invertible.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::convex::MAX_CONDITION;
use crate::error::{check_dim, Error, Result};
use crate::fitzpatrick::{self, FitzpatrickTriple};
use crate::grid::GridSpec;
use crate::linalg;
use crate::qpos::{Generator, QPositiveSet};
use crate::report::{CheckReport, CheckRow};
use crate::space::{SsdSpace, BANACH_SLACK};

/// Tolerance for the structural identities of the dual.
pub const AXIOM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SsdDual {
    base: SsdSpace,
    iota: DMatrix<f64>,
    dual_form: DMatrix<f64>,
    involutive: bool,
    dual_norm: f64,
}

/// Builds the dual structure; fails with `SingularForm` when the condition
/// number of `S` exceeds `1e8`.
pub fn make_dual(space: &SsdSpace) -> Result<SsdDual> {
    let s = space.form_matrix();
    let cond = linalg::condition_number(s);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::SingularForm { cond });
    }
    let sq = s * s;
    let n = space.dim();
    let involutive = (&sq - DMatrix::<f64>::identity(n, n)).amax() <= AXIOM_TOL;
    let dual_form = if involutive {
        s.clone()
    } else {
        let inv = s.clone().try_inverse().ok_or(Error::SingularForm { cond })?;
        (&inv + inv.transpose()) * 0.5
    };
    let dual_norm = linalg::spectral_norm(&dual_form, 1e-10);
    Ok(SsdDual {
        base: space.clone(),
        iota: s.clone(),
        dual_form,
        involutive,
        dual_norm,
    })
}

impl SsdDual {
    pub fn base(&self) -> &SsdSpace {
        &self.base
    }

    pub fn iota_matrix(&self) -> &DMatrix<f64> {
        &self.iota
    }

    pub fn dual_form_matrix(&self) -> &DMatrix<f64> {
        &self.dual_form
    }

    pub fn is_involutive(&self) -> bool {
        self.involutive
    }

    pub fn dual_spectral_norm(&self) -> f64 {
        self.dual_norm
    }

    /// `p̃` needs the dual form to satisfy the Cauchy–Schwarz bound too.
    pub fn require_banach_dual(&self) -> Result<()> {
        self.base.require_banach()?;
        if self.dual_norm > 1.0 + BANACH_SLACK {
            return Err(Error::NotBanachDual {
                norm: self.dual_norm,
            });
        }
        Ok(())
    }

    pub fn iota(&self, b: &[f64]) -> Vec<f64> {
        linalg::mat_vec(&self.iota, b)
    }

    pub fn iota_tilde(&self, d: &[f64]) -> Vec<f64> {
        linalg::mat_vec(&self.dual_form, d)
    }

    /// `⌈c*, d*⌉ = c*ᵀS̃d*`.
    pub fn dual_pairing(&self, c: &[f64], d: &[f64]) -> f64 {
        linalg::sym_bilinear(&self.dual_form, c, d)
    }

    pub fn q_tilde(&self, d: &[f64]) -> f64 {
        0.5 * self.dual_pairing(d, d)
    }

    pub fn p_tilde(&self, d: &[f64]) -> Result<f64> {
        self.require_banach_dual()?;
        Ok(0.5 * linalg::dot(d, d) + self.q_tilde(d))
    }

    pub(crate) fn p_tilde_unchecked(&self, d: &[f64]) -> f64 {
        0.5 * linalg::dot(d, d) + self.q_tilde(d)
    }

    /// `B*` with form `S̃`, for dual-side Fitzpatrick functions.
    pub fn dual_space(&self) -> Result<SsdSpace> {
        SsdSpace::new(self.dual_form.clone(), false)
    }
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// The structural identities of the dual on `count` random vectors:
/// `⌈ιb, ιc⌉ = ⌊b,c⌋`, `q̃∘ι = q`, `⌈ιb, c*⌉ = ⟨b, c*⟩`, and `ι̃∘ι = id` when
/// `S` is involutive.
pub fn axiom_check(dual: &SsdDual, count: usize, seed: u64) -> CheckReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dual.base.dim();
    let mut worst = [0.0f64; 4];
    for _ in 0..count {
        let b = random_vec(&mut rng, n);
        let c = random_vec(&mut rng, n);
        let scale = 1.0 + linalg::norm(&b) * linalg::norm(&c);
        let (ib, ic) = (dual.iota(&b), dual.iota(&c));
        worst[0] = worst[0].max((dual.dual_pairing(&ib, &ic) - dual.base.form_unchecked(&b, &c)).abs() / scale);
        worst[1] = worst[1].max((dual.q_tilde(&ib) - dual.base.q_unchecked(&b)).abs() / (1.0 + linalg::dot(&b, &b)));
        worst[2] = worst[2].max((dual.dual_pairing(&ib, &c) - linalg::dot(&b, &c)).abs() / scale);
        if dual.involutive {
            let back = dual.iota_tilde(&ib);
            worst[3] = worst[3].max(linalg::dist(&back, &b));
        }
    }
    let mut rows = vec![
        CheckRow::measured("dual form on iota(B)", "[iota b, iota c] = <b,c>_S", worst[0], AXIOM_TOL, 0.0),
        CheckRow::measured("q~ o iota = q", "q~ o iota = q", worst[1], AXIOM_TOL, 0.0),
        CheckRow::measured("[iota b, c*] = <b, c*>", "[iota b, c*] = <b, c*>", worst[2], AXIOM_TOL, 0.0),
    ];
    if dual.involutive {
        rows.push(
            CheckRow::measured("iota~ o iota = id", "b^ = iota~ o iota (b)", worst[3], AXIOM_TOL, 0.0)
                .with_note("S involutive"),
        );
    }
    for r in &mut rows {
        r.metrics.insert("samples".into(), count as f64);
    }
    CheckReport::new("dual_axioms", seed, rows, start.elapsed().as_secs_f64())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// `inf_a q̃(ιa − d)`.
    pub gap: f64,
    /// `q̃(d) − Θ_A(d)`, the same quantity through `Θ_A`.
    pub theta_gap: f64,
    /// Whether the two expressions have the same sign (vacuous within `tol`).
    pub agree: bool,
}

fn same_base(dual: &SsdDual, a: &QPositiveSet) -> Result<()> {
    if dual.base.form_matrix() != a.space().form_matrix() {
        return Err(Error::InvalidParams("set belongs to a different space".into()));
    }
    Ok(())
}

fn membership_unchecked(dual: &SsdDual, a: &QPositiveSet, iota_a: &[Vec<f64>], d: &[f64], tol: f64) -> Membership {
    let gap = iota_a
        .iter()
        .map(|ia| {
            let diff = linalg::sub(ia, d);
            dual.q_tilde(&diff)
        })
        .fold(f64::INFINITY, f64::min);
    let th = a
        .points()
        .iter()
        .map(|p| linalg::dot(p, d) - a.space().q_unchecked(p))
        .fold(f64::NEG_INFINITY, f64::max);
    let theta_gap = dual.q_tilde(d) - th;
    let agree = gap.abs() <= tol || theta_gap.abs() <= tol || (gap >= 0.0) == (theta_gap >= 0.0);
    Membership {
        member: gap >= -tol,
        gap,
        theta_gap,
        agree,
    }
}

/// Whether `d` lies in the Gossez extension `A^G = {d : inf q̃(ι(A) − d) ≥ 0}`.
pub fn gossez_membership(dual: &SsdDual, a: &QPositiveSet, d: &[f64], tol: f64) -> Result<Membership> {
    same_base(dual, a)?;
    dual.base.check_len(d)?;
    let iota_a: Vec<Vec<f64>> = a.points().iter().map(|p| dual.iota(p)).collect();
    Ok(membership_unchecked(dual, a, &iota_a, d, tol))
}

/// Sampling allowance at `d`: the loss in `Θ_A` from replacing the true
/// maximizer by its nearest sample, `δ‖d − Sa'‖ + ½‖S‖δ²`.
fn theta_allowance(a: &QPositiveSet, d: &[f64], delta: f64) -> f64 {
    if delta == 0.0 {
        return 0.0;
    }
    let space = a.space();
    let (_, best) = a
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| (linalg::dot(p, d) - space.q_unchecked(p), i))
        .fold((f64::NEG_INFINITY, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
    let grad = linalg::sub(d, &space.apply_form(&a.points()[best]));
    delta * linalg::norm(&grad) + 0.5 * space.spectral_norm() * delta * delta
}

/// Type-(NI) inequality `Θ_A ≥ q̃` over the nodes of `dual_grid`.
pub fn ni_check(dual: &SsdDual, a: &QPositiveSet, dual_grid: &GridSpec, tol: f64) -> CheckReport {
    let start = Instant::now();
    const REF: &str = "theta_A >= q~ on B*";
    let rows = (|| -> Result<Vec<CheckRow>> {
        same_base(dual, a)?;
        check_dim(dual.base.dim(), dual_grid.dim())?;
        let delta = a.covering_radius();
        let per: Vec<(f64, f64)> = (0..dual_grid.len())
            .into_par_iter()
            .map(|k| {
                let d = dual_grid.node(k);
                let th = fitzpatrick::theta(a.space(), a, &d)?;
                Ok((dual.q_tilde(&d) - th, theta_allowance(a, &d, delta)))
            })
            .collect::<Result<_>>()?;
        let (worst, k) = per
            .iter()
            .enumerate()
            .fold((f64::NEG_INFINITY, 0), |acc, (i, v)| if v.0 > acc.0 { (v.0, i) } else { acc });
        let allowance = per.iter().map(|v| v.1).fold(0.0, f64::max);
        Ok(vec![CheckRow::measured("NI: theta_A - q~ >= 0", REF, worst, tol, allowance)
            .with_witness(vec![dual_grid.node(k)])
            .with_metric("min_gap", -worst)
            .with_metric("sample_mesh", delta)
            .with_note("min over the dual grid of theta_A - q~; allowance from sampling A")])
    })();
    let rows = rows.unwrap_or_else(|e| vec![CheckRow::errored("NI", REF, e)]);
    CheckReport::new("ni", 0, rows, start.elapsed().as_secs_f64())
}

/// Gossez extension properties: `ι(A) ⊂ A^G`, agreement of the two
/// membership expressions, `A^G = P_q̃(Θ_A)` on the grid when (NI) holds,
/// `Θ_A(d) = Φ_{ι(A)}(d)`, `Φ_{ι(A)} = q̃` on `ι(A)`, and
/// `Θ_A^@ ≥ Φ_A^* ≥ Θ_A`.
pub fn gossez_extension_check(dual: &SsdDual, a: &QPositiveSet, dual_grid: &GridSpec, tol: f64) -> CheckReport {
    let start = Instant::now();
    let rows = extension_rows(dual, a, dual_grid, tol)
        .unwrap_or_else(|e| vec![CheckRow::errored("gossez extension", "iota(A) in A^G", e)]);
    CheckReport::new("gossez", 0, rows, start.elapsed().as_secs_f64())
}

fn extension_rows(dual: &SsdDual, a: &QPositiveSet, dual_grid: &GridSpec, tol: f64) -> Result<Vec<CheckRow>> {
    same_base(dual, a)?;
    check_dim(dual.base.dim(), dual_grid.dim())?;
    let iota_a: Vec<Vec<f64>> = a.points().iter().map(|p| dual.iota(p)).collect();

    // ι(A) ⊂ A^G at a fixed tolerance of 1e-9.
    let incl = iota_a
        .par_iter()
        .map(|d| -membership_unchecked(dual, a, &iota_a, d, 1e-9).gap)
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let mut rows = vec![CheckRow::measured("iota(A) in A^G", "iota(A) in A^G", incl, 1e-9, 0.0)];

    let ms: Vec<Membership> = (0..dual_grid.len())
        .into_par_iter()
        .map(|k| membership_unchecked(dual, a, &iota_a, &dual_grid.node(k), tol))
        .collect();
    let disagree: Vec<usize> = (0..ms.len()).filter(|&k| !ms[k].agree).collect();
    let max_expr_diff = ms.iter().map(|m| (m.gap - m.theta_gap).abs()).fold(0.0, f64::max);
    let mut row = CheckRow::measured(
        "membership expressions agree in sign",
        "inf q~(iota(A) - d) >= 0 <=> theta_A(d) <= q~(d)",
        disagree.len() as f64,
        0.0,
        0.0,
    )
    .with_metric("max_expression_difference", max_expr_diff);
    if let Some(&k) = disagree.first() {
        row = row.with_witness(vec![dual_grid.node(k)]);
    }
    rows.push(row);

    let ni = ni_check(dual, a, dual_grid, tol);
    if ni.all_passed() {
        let mismatch: Vec<usize> = (0..ms.len())
            .filter(|&k| ms[k].member != (ms[k].theta_gap.abs() <= tol))
            .collect();
        let members = ms.iter().filter(|m| m.member).count();
        let mut row = CheckRow::measured(
            "A^G = P_q~(theta_A) on grid",
            "A^G = P_q~(theta_A)",
            mismatch.len() as f64,
            0.0,
            0.0,
        )
        .with_metric("members", members as f64);
        if let Some(&k) = mismatch.first() {
            row = row.with_witness(vec![dual_grid.node(k)]);
        }
        rows.push(row);
    } else {
        rows.push(CheckRow::skipped(
            "A^G = P_q~(theta_A) on grid",
            "A^G = P_q~(theta_A)",
            "NI inequality fails on this grid",
        ));
    }

    // Θ_A through the pushed-forward set in the dual space.
    let dspace = dual.dual_space()?;
    let pushed = QPositiveSet::new(&dspace, iota_a.clone(), Generator::Custom)?;
    let two_route = (0..dual_grid.len())
        .into_par_iter()
        .map(|k| {
            let d = dual_grid.node(k);
            Ok((fitzpatrick::theta(a.space(), a, &d)? - fitzpatrick::phi(&dspace, &pushed, &d)?).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    rows.push(CheckRow::measured(
        "theta_A = phi_iota(A)",
        "theta_A(d) = phi_iota(A)(d)",
        two_route,
        fitzpatrick::IDENTITY_TOL,
        0.0,
    ));
    let on_image = iota_a
        .iter()
        .map(|d| Ok((fitzpatrick::phi(&dspace, &pushed, d)? - dual.q_tilde(d)).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    rows.push(CheckRow::measured(
        "phi_iota(A) = q~ on iota(A)",
        "phi_iota(A) = q~ on iota(A)",
        on_image,
        fitzpatrick::IDENTITY_TOL,
        0.0,
    ));

    // Θ_A^@ ≥ Φ_A^* ≥ Θ_A, with Θ_A^@(d) = Θ_A^*(S̃d).
    let triple = FitzpatrickTriple::new(a.space(), a)?;
    let phi_star = triple.phi.conjugate_star()?;
    let theta_at = triple.theta.conjugate_star()?.compose_linear(&dual.dual_form)?;
    let chain: Vec<(f64, f64)> = (0..dual_grid.len())
        .into_par_iter()
        .map(|k| {
            let d = dual_grid.node(k);
            let ps = phi_star.eval(&d)?;
            let ta = theta_at.eval(&d)?;
            let th = triple.theta.eval(&d)?;
            let upper = if ta.is_finite() { ps - ta } else { f64::NEG_INFINITY };
            let lower = if ps.is_finite() { th - ps } else { f64::NEG_INFINITY };
            Ok((upper, lower))
        })
        .collect::<Result<_>>()?;
    let up = chain.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
    let lo = chain.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let finite = chain.iter().filter(|c| c.1.is_finite()).count();
    rows.push(
        CheckRow::measured("theta_A^@ >= phi_A^*", "theta_A^@ >= phi_A^* on B*", up.max(0.0), 1e-8, 0.0)
            .with_note("finite dimension, S invertible: theta_A^@ and phi_A^* coincide"),
    );
    rows.push(
        CheckRow::measured("phi_A^* >= theta_A", "phi_A^* >= theta_A on B*", lo.max(0.0), 1e-8, 0.0)
            .with_metric("finite_nodes", finite as f64),
    );
    Ok(rows)
}

/// `count` uniform draws from the cube `[−radius, radius]^n`.
pub fn random_duals(n: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| rng.random_range(-radius..=radius)).collect())
        .collect()
}
