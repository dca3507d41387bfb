use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssdkit::builtins::{self, SetSpec};
use ssdkit::convex::p_q_extract;
use ssdkit::fitzpatrick::{phi, phi_via_shift, psi, theta};
use ssdkit::{ConvexFunction, FitzpatrickTriple, GridSpec, QPositiveSet, SsdSpace};

fn sets() -> Vec<(SsdSpace, QPositiveSet)> {
    let mk = |space: &str, spec: SetSpec| {
        let s = builtins::builtin_space(space).unwrap();
        let a = builtins::builtin_set(&s, &spec).unwrap();
        (s, a)
    };
    vec![
        mk("pairing(1)", SetSpec::Diagonal { min: -3.0, max: 3.0, count: 121 }),
        mk("pairing(2)", SetSpec::Diagonal { min: -1.0, max: 1.0, count: 9 }),
        mk("r3-swap", SetSpec::Helix { lambda: 1.0, theta_min: -10.0, theta_max: 10.0, count: 401 }),
        mk("r3-swap", SetSpec::Line { direction: vec![1.0, -1.0, 2.0], t_min: -3.0, t_max: 3.0, count: 61 }),
        mk("pairing(1)", SetSpec::SgnGraph { radius: 2.0, count: 21 }),
        mk(
            "pairing(1)",
            SetSpec::MonotoneGraph { breakpoints: vec![[-2.0, -2.0], [0.0, 0.0], [0.0, 1.0], [2.0, 1.5]], per_segment: 8 },
        ),
        mk(
            "product(hilbert-identity(1),pairing(1))",
            SetSpec::Product {
                left_space: "hilbert-identity(1)".into(),
                left: Box::new(SetSpec::Line { direction: vec![1.0], t_min: -1.0, t_max: 1.0, count: 5 }),
                right_space: "pairing(1)".into(),
                right: Box::new(SetSpec::Diagonal { min: -1.0, max: 1.0, count: 9 }),
            },
        ),
    ]
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-r..=r)).collect()
}

#[test]
fn phi_two_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for (s, a) in sets() {
        for _ in 0..1000 {
            let b = random_point(&mut rng, s.dim(), 3.0);
            let (x, y) = (phi(&s, &a, &b).unwrap(), phi_via_shift(&s, &a, &b).unwrap());
            assert!((x - y).abs() <= 1e-9, "{x} vs {y} at {b:?}");
        }
    }
}

#[test]
fn phi_equals_q_and_psi_is_below_q_on_the_set() {
    for (s, a) in sets() {
        let t = FitzpatrickTriple::new(&s, &a).unwrap();
        for p in a.points() {
            let q = s.q(p).unwrap();
            assert!((t.phi.eval(p).unwrap() - q).abs() <= 1e-9);
            assert!(psi(&s, &a, p).unwrap() <= q + 1e-9);
        }
    }
}

#[test]
fn psi_and_intrinsic_conjugate_of_phi_coincide_above_q() {
    let s = builtins::pairing(1).unwrap();
    let a = builtins::builtin_set(&s, &SetSpec::MonotoneGraph {
        breakpoints: vec![[-1.0, -1.0], [0.0, 0.0], [0.0, 0.5], [1.0, 1.0]],
        per_segment: 4,
    })
    .unwrap();
    let t = FitzpatrickTriple::new(&s, &a).unwrap();
    let at = t.phi.intrinsic_conjugate(&s).unwrap();
    let g = GridSpec::cube_step(-1.0, 1.0, 0.125, 2).unwrap();
    let mut inside = 0;
    for b in g.nodes() {
        let (ps, pa) = (t.psi.eval(&b).unwrap(), at.eval(&b).unwrap());
        if !ps.is_finite() {
            assert!(pa.is_infinite());
            continue;
        }
        inside += 1;
        assert!((ps - pa).abs() <= 1e-8, "{ps} vs {pa} at {b:?}");
        assert!(pa >= s.q(&b).unwrap() - 1e-8);
    }
    assert!(inside > 0);
}

#[test]
fn coincidence_sets_contain_the_set() {
    let s = builtins::pairing(1).unwrap();
    let a = builtins::diagonal(&s, -2.0, 2.0, 41).unwrap();
    let t = FitzpatrickTriple::new(&s, &a).unwrap();
    let f = ConvexFunction::half_norm_sq(2);
    for g in [&t.psi, &f, &t.phi] {
        let got = p_q_extract(&s, g, a.points(), 1e-8).unwrap();
        assert_eq!(got.len(), a.len());
    }
}

#[test]
fn refining_the_sample_moves_phi_up_and_psi_down() {
    let s = builtins::pairing(1).unwrap();
    let coarse = builtins::diagonal(&s, -2.0, 2.0, 21).unwrap();
    let fine = builtins::diagonal(&s, -2.0, 2.0, 41).unwrap();
    let g = GridSpec::cube_step(-2.0, 2.0, 0.1, 2).unwrap();
    for b in g.nodes() {
        assert!(phi(&s, &coarse, &b).unwrap() <= phi(&s, &fine, &b).unwrap() + 1e-12);
        let (pc, pf) = (psi(&s, &coarse, &b).unwrap(), psi(&s, &fine, &b).unwrap());
        assert!(pc >= pf - 1e-12 || (pc.is_infinite() && pf.is_infinite()));
    }
}

#[test]
fn theta_of_diagonal_approaches_closed_form() {
    let s = builtins::pairing(1).unwrap();
    let a = builtins::diagonal(&s, -3.0, 3.0, 601).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let d = random_point(&mut rng, 2, 2.0);
        let exact = 0.25 * (d[0] + d[1]).powi(2);
        let th = theta(&s, &a, &d).unwrap();
        // the sample maximum misses the peak by at most (step/2)² = 2.5e-5
        assert!(th <= exact + 1e-12 && exact - th <= 2.5e-5 + 1e-12);
    }
}
