//! Acceptance criteria AC1–AC10. Each prints one PASS/FAIL line with its
//! runtime; the test fails if any criterion does.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssdkit::builtins::{self, SetSpec};
use ssdkit::convex::biconjugate_check;
use ssdkit::fitzpatrick::{self, phi, phi_via_shift, psi};
use ssdkit::gossez::{self, gossez_membership, make_dual};
use ssdkit::nalgebra::DMatrix;
use ssdkit::qpos::is_q_positive;
use ssdkit::vz::{self, is_mas, is_vz};
use ssdkit::{CheckReport, ConvexFunction, GridSpec, QPositiveSet, SsdSpace};
use ssdkit_cli::catalog::SCENARIOS;

struct Outcome {
    ok: bool,
    detail: String,
}

fn criterion(id: &str, budget_s: f64, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let t = start.elapsed().as_secs_f64();
    let ok = out.ok && t < budget_s;
    let budget = if budget_s.is_finite() { format!("budget {budget_s}s") } else { "no budget".into() };
    println!(
        "{id} {} ({t:.2}s, {budget}) {}",
        if ok { "PASS" } else { "FAIL" },
        out.detail
    );
    ok
}

fn metric(r: &CheckReport, row: &str, key: &str) -> f64 {
    r.checks.iter().find(|c| c.name == row).unwrap_or_else(|| panic!("no row {row}")).metrics[key]
}

fn row_passed(r: &CheckReport, row: &str) -> bool {
    r.checks.iter().find(|c| c.name == row).is_some_and(|c| c.passed())
}

fn uniform(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-r..=r)).collect()
}

fn pairing_diagonal(count: usize) -> (SsdSpace, QPositiveSet) {
    let s = builtins::pairing(1).unwrap();
    let a = builtins::diagonal(&s, -3.0, 3.0, count).unwrap();
    (s, a)
}

fn ac1() -> Outcome {
    let h = 0.01;
    let (s, a) = pairing_diagonal(601);
    let f = ConvexFunction::half_norm_sq(2);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (mut e_gap, mut e_inf, mut e_dist) = (0.0f64, 0.0f64, 0.0f64);
    let mut best = (0.0, 0.0);
    for _ in 0..100 {
        let c = uniform(&mut rng, 2, 2.0);
        let d = c[0] - c[1];
        let fq = f.eval(&c).unwrap() - s.q(&c).unwrap();
        e_gap = e_gap.max((fq - 0.5 * d * d).abs());
        let iq = -a.inf_q_shift(&c).0;
        let norm = (c[0] * c[0] + c[1] * c[1]).sqrt();
        e_inf = e_inf.max((iq - 0.25 * d * d).abs() / (2.0 * h * (1.0 + norm)));
        let dist = a.distance(&c).0;
        e_dist = e_dist.max((dist - d.abs() / 2f64.sqrt()).abs() / h);
        let phi_gap = phi(&s, &a, &c).unwrap() - s.q(&c).unwrap();
        if phi_gap > best.0 {
            best = (phi_gap, dist / phi_gap.sqrt());
        }
    }
    let ratio_err = (best.1 - 2f64.sqrt()).abs();
    Outcome {
        ok: e_gap <= 1e-12 && e_inf <= 1.0 && e_dist <= 1.0 && ratio_err <= 1e-3,
        detail: format!(
            "|(f-q) - (c1-c2)^2/2| = {e_gap:.1e}; inf-q error / 2h(1+|c|) = {e_inf:.3}; \
             dist error / h = {e_dist:.3}; ratio = {:.6} (|ratio - sqrt2| = {ratio_err:.1e})",
            best.1
        ),
    }
}

fn ac2() -> Outcome {
    let (s, a) = pairing_diagonal(601);
    let f = ConvexFunction::half_norm_sq(2);
    let probes = gossez::random_duals(2, 1000, 2.0, 42);
    let r = vz::distance_bounds_check(&s, &f, &a, &probes, 1e-9);
    let row = "dist <= 5 sqrt(f - q)";
    let v = metric(&r, row, "violations");
    Outcome {
        ok: v == 0.0 && row_passed(&r, row),
        detail: format!(
            "1000 probes, violations = {v}, worst dist / 5 sqrt(f - q) = {:.4}, mesh = {:.2e}",
            metric(&r, row, "ratio"),
            metric(&r, row, "sample_mesh")
        ),
    }
}

fn ac3() -> Outcome {
    let s = builtins::r3_swap().unwrap();
    let helix = |lambda: f64| {
        builtins::sample_points(&s, &SetSpec::Helix { lambda, theta_min: -10.0, theta_max: 10.0, count: 401 })
            .unwrap()
            .0
    };
    let one = is_q_positive(&s, &helix(1.0)).unwrap();
    let half = is_q_positive(&s, &helix(0.5)).unwrap();
    // recompute the witness value without the library's q
    let witness_q = half.violation.as_ref().map(|v| {
        let (a, b) = (&v.witness[0], &v.witness[1]);
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        d[0] * d[1] + 0.5 * d[2] * d[2]
    });
    Outcome {
        ok: one.positive && one.violation.is_none() && !half.positive && witness_q.is_some_and(|w| w < 0.0),
        detail: format!(
            "lambda = 1: min q(a - b) = {:.3e} over {} pairs; lambda = 0.5: witness q(a - b) = {:.4}",
            one.min_value,
            one.pairs_scanned,
            witness_q.unwrap_or(f64::NAN)
        ),
    }
}

fn builtin_sets() -> Vec<(&'static str, SsdSpace, QPositiveSet)> {
    let mk = |label: &'static str, space: &str, spec: SetSpec| {
        let s = builtins::builtin_space(space).unwrap();
        let a = builtins::builtin_set(&s, &spec).unwrap();
        (label, s, a)
    };
    vec![
        mk("diagonal", "pairing(1)", SetSpec::Diagonal { min: -3.0, max: 3.0, count: 601 }),
        mk("diagonal(2)", "pairing(2)", SetSpec::Diagonal { min: -1.0, max: 1.0, count: 9 }),
        mk("helix", "r3-swap", SetSpec::Helix { lambda: 1.0, theta_min: -10.0, theta_max: 10.0, count: 401 }),
        mk("line", "r3-swap", SetSpec::Line { direction: vec![1.0, -1.0, 2.0], t_min: -3.0, t_max: 3.0, count: 61 }),
        mk("sgn-graph", "pairing(1)", SetSpec::SgnGraph { radius: 2.0, count: 41 }),
        mk(
            "monotone-graph",
            "pairing(1)",
            SetSpec::MonotoneGraph { breakpoints: vec![[-2.0, -2.0], [0.0, 0.0], [0.0, 1.0], [2.0, 1.5]], per_segment: 10 },
        ),
        mk(
            "product",
            "product(r3-swap,pairing(1))",
            SetSpec::Product {
                left_space: "r3-swap".into(),
                left: Box::new(SetSpec::Helix { lambda: 1.0, theta_min: -3.0, theta_max: 3.0, count: 31 }),
                right_space: "pairing(1)".into(),
                right: Box::new(SetSpec::Diagonal { min: -1.0, max: 1.0, count: 21 }),
            },
        ),
    ]
}

fn ac4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (mut two_route, mut on_a, mut psi_a) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for (_, s, a) in builtin_sets() {
        for _ in 0..1000 {
            let b = uniform(&mut rng, s.dim(), 3.0);
            two_route = two_route.max((phi(&s, &a, &b).unwrap() - phi_via_shift(&s, &a, &b).unwrap()).abs());
        }
        for p in a.points() {
            let q = s.q(p).unwrap();
            on_a = on_a.max((phi(&s, &a, p).unwrap() - q).abs());
            psi_a = psi_a.max(psi(&s, &a, p).unwrap() - q);
        }
    }
    let (s, a) = pairing_diagonal(601);
    let grid = GridSpec::cube_step(-2.0, 2.0, 0.1, 2).unwrap();
    let dual = GridSpec::cube_step(-4.0, 4.0, 0.05, 2).unwrap();
    let rt = fitzpatrick::conjugate_round_trip_check(&s, &a, &grid, &dual, 1e-8);
    let mono = builtins::builtin_set(
        &s,
        &SetSpec::MonotoneGraph { breakpoints: vec![[-1.0, -1.0], [0.0, 0.0], [0.0, 0.5], [1.0, 1.0]], per_segment: 8 },
    )
    .unwrap();
    let rt2 = fitzpatrick::conjugate_round_trip_check(&s, &mono, &grid, &dual, 1e-8);
    let grids_ok = rt.all_passed() && rt2.all_passed();
    Outcome {
        ok: two_route <= 1e-9 && on_a <= 1e-9 && psi_a <= 1e-9 && grids_ok,
        detail: format!(
            "two-route {two_route:.1e}; |phi_A - q| on A {on_a:.1e}; psi_A - q on A {psi_a:.1e}; \
             conjugate round trip rows passed: {}/{}",
            rt.summary.pass + rt2.summary.pass,
            rt.checks.len() + rt2.checks.len()
        ),
    }
}

fn ac5() -> Outcome {
    let p1 = builtins::pairing(1).unwrap();
    let h2 = builtins::hilbert_identity(2).unwrap();
    let (_, diag) = pairing_diagonal(601);
    let phi_a = {
        let qa = diag.points().iter().map(|p| p1.q(p).unwrap()).collect();
        ConvexFunction::max_affine(diag.points().iter().map(|p| p1.apply_form(p)).collect(), qa).unwrap()
    };
    let id = DMatrix::<f64>::identity(2, 2);
    let cases: Vec<(&str, &SsdSpace, ConvexFunction, bool)> = vec![
        ("pairing: 1/2|.|^2", &p1, ConvexFunction::half_norm_sq(2), true),
        ("pairing: phi_A", &p1, phi_a, true),
        ("hilbert: q", &h2, ConvexFunction::half_norm_sq(2), true),
        ("pairing: |.|^2", &p1, ConvexFunction::quadratic(&id * 2.0, vec![0.0; 2], 0.0).unwrap(), false),
        ("pairing: 1/2|.|^2 + 1/2", &p1, ConvexFunction::quadratic(id.clone(), vec![0.0; 2], 0.5).unwrap(), false),
        ("hilbert: |.|^2", &h2, ConvexFunction::quadratic(&id * 2.0, vec![0.0; 2], 0.0).unwrap(), false),
    ];
    let probes = GridSpec::cube_step(-1.0, 1.0, 0.1, 2).unwrap().nodes();
    let search = GridSpec::cube_step(-2.0, 2.0, 0.05, 2).unwrap();
    let grid = GridSpec::cube_step(-2.0, 2.0, 0.1, 2).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, s, f, want) in cases {
        let d = make_dual(s).unwrap();
        let v = is_vz(s, &f, &probes, &search, 1e-9).unwrap();
        let m = is_mas(s, &d, &f, &grid, &grid, 1e-9).all_passed();
        let case_ok = v.is_vz == want && m == want && v.routes_agree;
        ok &= case_ok;
        parts.push(format!("{label}: vz={} mas={} routes_agree={}", v.is_vz, m, v.routes_agree));
    }
    Outcome { ok, detail: parts.join("; ") }
}

fn ac6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut exact_gap = 0.0f64;
    for name in ["pairing(1)", "r3-swap"] {
        let s = builtins::builtin_space(name).unwrap();
        let n = s.dim();
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.5..0.5));
        // |S| = I for both forms, so Q = I + MᵀM gives f >= q
        let f = ConvexFunction::quadratic(DMatrix::identity(n, n) + m.transpose() * &m, vec![0.0; n], 0.0).unwrap();
        let d = make_dual(&s).unwrap();
        let probes = gossez::random_duals(n, 100, 2.0, 7);
        let g = GridSpec::cube(-1.0, 1.0, 3, n).unwrap();
        let r = vz::dual_infconv_identity_check(&s, &d, &f, &probes, &g, &g, 1e-8);
        let row = r.checks.iter().find(|c| c.name == "infconv duality (exact)").expect("exact path");
        if !row.passed() {
            exact_gap = f64::INFINITY;
        }
        exact_gap = exact_gap.max(row.max_violation);
    }
    let (s, a) = pairing_diagonal(601);
    let qa = a.points().iter().map(|p| s.q(p).unwrap()).collect();
    let phi_a = ConvexFunction::max_affine(a.points().iter().map(|p| s.apply_form(p)).collect(), qa).unwrap();
    let probes = GridSpec::cube_step(-1.0, 1.0, 0.25, 2).unwrap().nodes();
    let search = GridSpec::cube_step(-2.0, 2.0, 0.05, 2).unwrap();
    let d = make_dual(&s).unwrap();
    let r = vz::dual_infconv_identity_check(&s, &d, &phi_a, &probes, &search, &search, 1e-9);
    let row = &r.checks[0];
    Outcome {
        ok: exact_gap <= 1e-8 && row.name == "infconv duality (grid)" && row.passed(),
        detail: format!(
            "exact path max gap {exact_gap:.1e} (100 probes x 2 spaces); grid path gap {:.2e} <= C h = {:.3} \
             (C = {:.3}, h = {})",
            row.max_violation,
            row.allowance,
            row.metrics["c_const"],
            row.metrics["h"]
        ),
    }
}

fn ac7() -> Outcome {
    let mut inclusion_ok = true;
    let mut sign_ok = true;
    let mut tested = 0usize;
    let mut rng_seed = 42;
    for (label, s, a) in builtin_sets() {
        let d = make_dual(&s).unwrap();
        let n = s.dim();
        let g = GridSpec::cube(-1.0, 1.0, if n <= 2 { 21 } else { 5 }, n).unwrap();
        let r = gossez::gossez_extension_check(&d, &a, &g, 1e-9);
        if !row_passed(&r, "iota(A) in A^G") {
            inclusion_ok = false;
            println!("  inclusion fails for {label}");
        }
        rng_seed += 1;
        for x in gossez::random_duals(n, 200, 2.0, rng_seed) {
            let m = gossez_membership(&d, &a, &x, 1e-9).unwrap();
            if m.gap.abs() > 1e-6 {
                tested += 1;
                sign_ok &= m.agree && (m.gap > 0.0) == (m.theta_gap > 0.0);
            }
        }
    }
    let (s, a) = pairing_diagonal(601);
    let d = make_dual(&s).unwrap();
    let g = GridSpec::cube_step(-2.0, 2.0, 0.02, 2).unwrap();
    let (mut min_gap, mut closed) = (f64::INFINITY, 0.0f64);
    for x in g.nodes() {
        let gap = fitzpatrick::theta(&s, &a, &x).unwrap() - d.q_tilde(&x);
        min_gap = min_gap.min(gap);
        closed = closed.max((gap - 0.25 * (x[0] - x[1]).powi(2)).abs());
    }
    let ni = gossez::ni_check(&d, &a, &g, 1e-9);
    let ni_min = metric(&ni, "NI: theta_A - q~ >= 0", "min_gap");
    Outcome {
        ok: inclusion_ok && sign_ok && min_gap >= -1e-9 && ni_min >= -1e-9 && closed <= 1e-9,
        detail: format!(
            "inclusion on {} sets: {inclusion_ok}; NI min gap {min_gap:.1e} (suite {ni_min:.1e}); \
             |gap - (s1-s2)^2/4| <= {closed:.1e}; sign agreement at {tested} duals: {sign_ok}",
            builtin_sets().len()
        ),
    }
}

fn ac8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut ok = true;
    let mut parts = Vec::new();
    for dim in [1, 2] {
        let grid = GridSpec::cube_step(-1.0, 1.0, 0.01, dim).unwrap();
        let dual = GridSpec::cube_step(-1.5, 1.5, 0.01, dim).unwrap();
        let slopes = (0..8).map(|_| uniform(&mut rng, dim, 1.0)).collect();
        let offsets = (0..8).map(|_| rng.random_range(0.0..1.0)).collect();
        let fns = [
            ("1/2|.|^2", ConvexFunction::half_norm_sq(dim)),
            ("max-affine", ConvexFunction::max_affine(slopes, offsets).unwrap()),
        ];
        for (label, f) in fns {
            let r = biconjugate_check(&f, &grid, &dual);
            let gap = &r.checks[0];
            let fy = metric(&r, "fenchel-young f** <= f", "min_gap");
            ok &= r.all_passed() && fy >= -1e-9;
            parts.push(format!(
                "{dim}-D {label}: gap {:.1e} <= C h = {:.3} (C = {:.2}), min f - f** {fy:.1e}",
                gap.max_violation,
                gap.tolerance + gap.allowance,
                gap.metrics["c_const"]
            ));
        }
    }
    Outcome { ok, detail: parts.join("; ") }
}

fn ac9() -> Outcome {
    let p1 = builtins::pairing(1).unwrap();
    let r3 = builtins::r3_swap().unwrap();
    let m = DMatrix::from_row_slice(3, 3, &[0.5, -0.2, 0.1, 0.0, 0.3, 0.7, -0.4, 0.0, 0.2]);
    let fixtures = [
        (p1.clone(), ConvexFunction::half_norm_sq(2)),
        (p1.clone(), ConvexFunction::quadratic(DMatrix::from_element(2, 2, 0.5), vec![0.0; 2], 0.0).unwrap()),
        (r3, ConvexFunction::quadratic(DMatrix::identity(3, 3) + m.transpose() * &m, vec![0.0; 3], 0.1).unwrap()),
    ];
    let mut gap_violations = 0.0;
    let mut gap_ok = true;
    for (i, (s, f)) in fixtures.iter().enumerate() {
        let pairs = vz::random_pairs(s.dim(), 1000, 3.0, 42 + i as u64);
        let r = vz::q_gap_inequality_check(s, f, &pairs, 1e-9);
        gap_ok &= r.all_passed();
        gap_violations += metric(&r, "q-gap inequality (square-root form)", "violations")
            + metric(&r, "q-gap inequality (linear form)", "violations");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (mut cs, mut pneg, mut spaces) = (0usize, 0usize, 0usize);
    for name in ["hilbert-identity(2)", "hilbert-negative(3)", "r3-swap", "pairing(1)", "pairing(2)", "product(r3-swap,pairing(1))"] {
        let s = builtins::builtin_space(name).unwrap();
        assert!(s.is_banach());
        spaces += 1;
        let sm = s.form_matrix().clone();
        for _ in 0..1000 {
            let (b, c) = (uniform(&mut rng, s.dim(), 5.0), uniform(&mut rng, s.dim(), 5.0));
            // bᵀSc and the norms by hand
            let bsc: f64 = (0..s.dim()).map(|i| (0..s.dim()).map(|j| b[i] * sm[(i, j)] * c[j]).sum::<f64>()).sum();
            let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nc = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            if bsc.abs() > nb * nc * (1.0 + 1e-12) {
                cs += 1;
            }
            if s.p(&b).unwrap() < -1e-12 * (1.0 + nb * nb) {
                pneg += 1;
            }
        }
    }
    Outcome {
        ok: gap_ok && gap_violations == 0.0 && cs == 0 && pneg == 0,
        detail: format!(
            "q-gap: 3 fixtures x 1000 pairs, {gap_violations} violations; \
             Cauchy-Schwarz {cs} and p < 0 {pneg} violations over {spaces} spaces x 1000 vectors"
        ),
    }
}

fn ac10() -> Outcome {
    let strip = |json: &str| {
        let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
        v.as_object_mut().unwrap().remove("wall_time");
        serde_json::to_string_pretty(&v).unwrap()
    };
    let run = |name: &str, workers: &str| {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        ssdkit_cli::main_with_args(
            ["ssdkit", "run", name, "--seed", "42", "--workers", workers],
            &mut out,
            &mut err,
        );
        strip(&String::from_utf8(out).unwrap())
    };
    let mut differing = Vec::new();
    for (name, _) in SCENARIOS {
        if run(name, "1") != run(name, "4") {
            differing.push(*name);
        }
    }
    Outcome {
        ok: differing.is_empty(),
        detail: format!(
            "{} bundled scenarios run twice (1 and 4 workers); differing: {differing:?}",
            SCENARIOS.len()
        ),
    }
}

#[test]
fn acceptance() {
    let results = [
        criterion("AC1", 5.0, ac1),
        criterion("AC2", 5.0, ac2),
        criterion("AC3", 10.0, ac3),
        criterion("AC4", 30.0, ac4),
        criterion("AC5", 60.0, ac5),
        criterion("AC6", 30.0, ac6),
        criterion("AC7", 30.0, ac7),
        criterion("AC8", 30.0, ac8),
        criterion("AC9", 10.0, ac9),
        criterion("AC10", f64::INFINITY, ac10),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
