//! Turns a parsed [`Scenario`] into a [`CheckReport`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssdkit::builtins::{self, SetSpec};
use ssdkit::gossez::{self, SsdDual};
use ssdkit::nalgebra::DMatrix;
use ssdkit::qpos::{self, Generator};
use ssdkit::report::Status;
use ssdkit::{fitzpatrick, io, vz};
use ssdkit::{CheckReport, CheckRow, ConvexFunction, GridSpec, QPositiveSet, SsdSpace};

use crate::config::{ConfigError, FunctionDef, Probes, Scenario, SpaceDef, Suite};

/// Where relative paths in a scenario are resolved, and the run seed.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub base_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

type Built<T> = Result<T, String>;

struct Context<'a> {
    scenario: &'a Scenario,
    base: PathBuf,
    seed: u64,
    space: SsdSpace,
    grids: BTreeMap<String, GridSpec>,
    sets: BTreeMap<String, Built<(Vec<Vec<f64>>, Generator)>>,
    functions: BTreeMap<String, Built<ConvexFunction>>,
    dual: Option<Built<SsdDual>>,
}

/// Runs every suite in order. Configuration problems (unknown builtins,
/// malformed grids) are returned as errors; everything else becomes a row.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<CheckReport, ConfigError> {
    let start = Instant::now();
    let mut ctx = Context::new(scenario, opts)?;
    let mut rows = Vec::new();
    for (i, suite) in scenario.suite.iter().enumerate() {
        let label = label(suite);
        let suite_seed = ctx.seed.wrapping_add(i as u64);
        for mut row in ctx.run_suite(suite, suite_seed) {
            row.name = format!("{label}: {}", row.name);
            rows.push(row);
        }
    }
    Ok(CheckReport::new(
        scenario.name.clone(),
        ctx.seed,
        rows,
        start.elapsed().as_secs_f64(),
    ))
}

fn label(s: &Suite) -> String {
    let target = match s {
        Suite::Qpos { set, .. }
        | Suite::Maximality { set, .. }
        | Suite::Fitzpatrick { set, .. }
        | Suite::Gossez { set, .. }
        | Suite::Ni { set, .. } => Some(set.clone()),
        Suite::Sandwich { set, function, .. } | Suite::Distance { function, set, .. } => {
            Some(format!("{function},{set}"))
        }
        Suite::Vz { function, .. }
        | Suite::Mas { function, .. }
        | Suite::InfconvDuality { function, .. }
        | Suite::Biconjugate { function, .. }
        | Suite::QGap { function, .. } => Some(function.clone()),
        Suite::DualAxioms { .. } => None,
    };
    match target {
        Some(t) => format!("{}[{t}]", s.kind()),
        None => s.kind().to_string(),
    }
}

fn matrix(rows: &[Vec<f64>]) -> Built<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err("matrix rows have different lengths".into());
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn config_error(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.into(),
        line: None,
        message: message.into(),
    }
}

impl<'a> Context<'a> {
    fn new(scenario: &'a Scenario, opts: &RunOptions) -> Result<Self, ConfigError> {
        let base = opts.base_dir.clone().unwrap_or_else(|| PathBuf::from("."));
        let space = match &scenario.space {
            SpaceDef::Builtin { builtin } => {
                builtins::builtin_space(builtin).map_err(|e| config_error("space.builtin", e.to_string()))?
            }
            SpaceDef::Form { form } => matrix(form)
                .and_then(|m| SsdSpace::new(m, false).map_err(|e| e.to_string()))
                .map_err(|e| config_error("space.form", e))?,
            SpaceDef::FormFile { form_file } => io::read_points_csv(&base.join(form_file))
                .map_err(|e| e.to_string())
                .and_then(|rows| matrix(&rows))
                .and_then(|m| SsdSpace::new(m, false).map_err(|e| e.to_string()))
                .map_err(|e| config_error("space.form_file", e))?,
        };
        let mut grids = BTreeMap::new();
        for (name, def) in &scenario.grids {
            let g = def
                .build(space.dim())
                .map_err(|e| config_error(&format!("grids.{name}"), e))?;
            grids.insert(name.clone(), g);
        }
        Ok(Self {
            scenario,
            base,
            seed: opts.seed.unwrap_or_else(|| scenario.seed_or_default()),
            space,
            grids,
            sets: BTreeMap::new(),
            functions: BTreeMap::new(),
            dual: None,
        })
    }

    fn grid(&self, name: &str) -> Built<GridSpec> {
        self.grids.get(name).cloned().ok_or_else(|| format!("undefined grid `{name}`"))
    }

    /// Sample points of a named set, unvalidated.
    fn raw_set(&mut self, name: &str) -> Built<(Vec<Vec<f64>>, Generator)> {
        if let Some(s) = self.sets.get(name) {
            return s.clone();
        }
        let built = match self.scenario.sets.get(name) {
            None => Err(format!("undefined set `{name}`")),
            Some(spec) => builtins::sample_points(&self.space, &self.resolve_paths(spec))
                .map_err(|e| format!("set `{name}`: {e}")),
        };
        self.sets.insert(name.to_string(), built.clone());
        built
    }

    fn resolve_paths(&self, spec: &SetSpec) -> SetSpec {
        match spec {
            SetSpec::CustomFile { path } => SetSpec::CustomFile {
                path: self.base.join(path).to_string_lossy().into_owned(),
            },
            SetSpec::Product { left_space, left, right_space, right } => SetSpec::Product {
                left_space: left_space.clone(),
                left: Box::new(self.resolve_paths(left)),
                right_space: right_space.clone(),
                right: Box::new(self.resolve_paths(right)),
            },
            other => other.clone(),
        }
    }

    fn set(&mut self, name: &str) -> Built<QPositiveSet> {
        let (pts, generator) = self.raw_set(name)?;
        QPositiveSet::new(&self.space, pts, generator).map_err(|e| format!("set `{name}`: {e}"))
    }

    fn dual(&mut self) -> Built<SsdDual> {
        if self.dual.is_none() {
            self.dual = Some(gossez::make_dual(&self.space).map_err(|e| e.to_string()));
        }
        self.dual.clone().expect("just set")
    }

    fn function(&mut self, name: &str) -> Built<ConvexFunction> {
        if let Some(f) = self.functions.get(name) {
            return f.clone();
        }
        let built = self.build_function(name).map_err(|e| format!("function `{name}`: {e}"));
        self.functions.insert(name.to_string(), built.clone());
        built
    }

    fn build_function(&mut self, name: &str) -> Built<ConvexFunction> {
        let n = self.space.dim();
        let def = self
            .scenario
            .functions
            .get(name)
            .cloned()
            .ok_or_else(|| format!("undefined function `{name}`"))?;
        let s = |e: ssdkit::Error| e.to_string();
        match def {
            FunctionDef::HalfNormSq { dim } => Ok(ConvexFunction::half_norm_sq(dim.unwrap_or(n))),
            FunctionDef::Quadratic { q, b, c } => {
                let q = matrix(&q)?;
                let b = b.unwrap_or_else(|| vec![0.0; q.nrows()]);
                ConvexFunction::quadratic(q, b, c).map_err(s)
            }
            FunctionDef::MaxAffine { slopes, offsets } => ConvexFunction::max_affine(slopes, offsets).map_err(s),
            FunctionDef::RandomMaxAffine { dim, count, radius } => {
                let d = dim.unwrap_or(n);
                let index = self.scenario.functions.keys().position(|k| k == name).unwrap_or(0);
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(1000 + index as u64));
                if !(radius > 0.0) {
                    return Err(format!("radius must be positive, got {radius}"));
                }
                let slopes: Vec<Vec<f64>> = (0..count)
                    .map(|_| (0..d).map(|_| rng.random_range(-radius..=radius)).collect())
                    .collect();
                let offsets = (0..count).map(|_| rng.random_range(0.0..=radius)).collect();
                ConvexFunction::max_affine(slopes, offsets).map_err(s)
            }
            FunctionDef::Phi { set } => {
                let a = self.set(&set)?;
                let qa = self.q_values(&a)?;
                let slopes = a.points().iter().map(|p| self.space.apply_form(p)).collect();
                ConvexFunction::max_affine(slopes, qa).map_err(s)
            }
            FunctionDef::Theta { set } => {
                let a = self.set(&set)?;
                let qa = self.q_values(&a)?;
                ConvexFunction::max_affine(a.points().to_vec(), qa).map_err(s)
            }
            FunctionDef::Psi { set } => {
                let a = self.set(&set)?;
                let qa = self.q_values(&a)?;
                ConvexFunction::point_envelope(a.points().to_vec(), qa).map_err(s)
            }
            FunctionDef::IntrinsicConjugate { of } => self.function(&of)?.intrinsic_conjugate(&self.space).map_err(s),
            FunctionDef::Sampled { of, grid } => {
                let g = self.grid(&grid)?;
                let vals = self.function(&of)?.sample(&g).map_err(s)?;
                ConvexFunction::grid_sampled(g, vals).map_err(s)
            }
            FunctionDef::GridFile { path } => {
                let (g, vals) = io::read_grid_values(&self.base.join(path)).map_err(s)?;
                ConvexFunction::grid_sampled(g, vals).map_err(s)
            }
        }
    }

    fn q_values(&self, a: &QPositiveSet) -> Built<Vec<f64>> {
        a.points().iter().map(|p| self.space.q(p).map_err(|e| e.to_string())).collect()
    }

    fn probes(&self, p: &Probes, seed: u64) -> Built<Vec<Vec<f64>>> {
        match p {
            Probes::Grid(g) => Ok(self.grid(g)?.nodes()),
            Probes::Random { count, radius } => {
                if *count == 0 || !(*radius > 0.0) {
                    return Err("random probes need count > 0 and radius > 0".into());
                }
                Ok(gossez::random_duals(self.space.dim(), *count, *radius, seed))
            }
        }
    }

    fn run_suite(&mut self, suite: &Suite, seed: u64) -> Vec<CheckRow> {
        let tol = self.scenario.tolerance(suite);
        let kind = suite.kind();
        match self.try_suite(suite, seed, tol) {
            Ok(rows) => rows,
            Err(e) => vec![CheckRow::errored(kind, "suite setup", e)],
        }
    }

    fn try_suite(&mut self, suite: &Suite, seed: u64, tol: f64) -> Built<Vec<CheckRow>> {
        let space = self.space.clone();
        let rows = match suite {
            Suite::Qpos { set, tol } => {
                let (pts, generator) = self.raw_set(set)?;
                let tol = tol
                    .or_else(|| self.scenario.tolerances.get("qpos").copied())
                    .unwrap_or(qpos::EPS_Q);
                let r = qpos::is_q_positive(&space, &pts).map_err(|e| e.to_string())?;
                let violation = if r.min_value.is_finite() { -r.min_value } else { 0.0 };
                let mut row = CheckRow::measured("q-positive", "q(a - b) >= 0 for all a, b in A", violation, tol, 0.0)
                    .with_metric("min_q_difference", r.min_value)
                    .with_metric("pairs_scanned", r.pairs_scanned as f64)
                    .with_note(format!("exhaustive scan of {} sampled points", pts.len()))
                    .with_note(sampling_note(&generator));
                if let Some(v) = r.violation {
                    row = row.with_witness(v.witness);
                }
                vec![row]
            }
            Suite::Maximality { set, grid, dist_floor } => {
                let a = self.set(set)?;
                let g = self.grid(grid)?;
                let found = qpos::maximality_falsifier(&a, &g, *dist_floor).map_err(|e| e.to_string())?;
                let mut row = CheckRow::falsifier(
                    "maximality",
                    "no c outside A has q(a - c) >= 0 for all a in A",
                    found.len(),
                )
                .with_metric("grid_nodes", g.len() as f64)
                .with_metric("dist_floor", *dist_floor)
                .with_note("a finite grid can only falsify maximality, never prove it")
                .with_note(sampling_note(a.generator()));
                if let Some(v) = found.first() {
                    row = row.with_witness(v.witness.clone());
                }
                vec![row]
            }
            Suite::Fitzpatrick { set, points, radius, grid, dual_search, .. } => {
                let a = self.set(set)?;
                let mut rows = fitzpatrick_rows(&space, &a, *points, *radius, seed, tol)?;
                match (grid, dual_search) {
                    (Some(g), Some(d)) => {
                        let (g, d) = (self.grid(g)?, self.grid(d)?);
                        rows.extend(fitzpatrick::conjugate_round_trip_check(&space, &a, &g, &d, tol.max(1e-8)).checks);
                    }
                    (None, None) => {}
                    _ => return Err("`grid` and `dual_search` go together".into()),
                }
                rows
            }
            Suite::Sandwich { set, function, grid, allowance, maximal, .. } => {
                let a = self.set(set)?;
                let f = self.function(function)?;
                let g = self.grid(grid)?;
                let mut rows = fitzpatrick::sandwich_check(&space, &a, &f, &g, tol, *allowance).checks;
                if !maximal {
                    for r in rows.iter_mut().filter(|r| r.name == "phi_A >= q") {
                        r.notes.push(format!(
                            "measured status {}, not asserted: A is not declared maximal",
                            if r.status == Status::Fail { "fail" } else { "pass" }
                        ));
                        r.status = Status::Skipped;
                    }
                }
                rows
            }
            Suite::Vz { function, probes, search, expect, .. } => {
                let f = self.function(function)?;
                let probes = self.probes(probes, seed)?;
                let search = self.grid(search)?;
                vz::is_vz(&space, &f, &probes, &search, tol).map_err(|e| e.to_string())?.rows(*expect)
            }
            Suite::Mas { function, primal, dual, expect, .. } => {
                let f = self.function(function)?;
                let d = self.dual()?;
                let (p, dg) = (self.grid(primal)?, self.grid(dual)?);
                let rows = vz::is_mas(&space, &d, &f, &p, &dg, tol).checks;
                match expect {
                    Some(want) => with_expectation(rows, *want, "mas"),
                    None => rows,
                }
            }
            Suite::InfconvDuality { function, probes, search, dual_search, .. } => {
                let f = self.function(function)?;
                let d = self.dual()?;
                let probes = self.probes(probes, seed)?;
                let (s, ds) = (self.grid(search)?, self.grid(dual_search)?);
                vz::dual_infconv_identity_check(&space, &d, &f, &probes, &s, &ds, tol).checks
            }
            Suite::Distance { function, set, probes, .. } => {
                let f = self.function(function)?;
                let a = self.set(set)?;
                let probes = self.probes(probes, seed)?;
                vz::distance_bounds_check(&space, &f, &a, &probes, tol).checks
            }
            Suite::Gossez { set, grid, .. } => {
                let a = self.set(set)?;
                let d = self.dual()?;
                let g = self.grid(grid)?;
                gossez::gossez_extension_check(&d, &a, &g, tol).checks
            }
            Suite::Ni { set, grid, .. } => {
                let a = self.set(set)?;
                let d = self.dual()?;
                let g = self.grid(grid)?;
                gossez::ni_check(&d, &a, &g, tol).checks
            }
            Suite::DualAxioms { count } => {
                let d = self.dual()?;
                gossez::axiom_check(&d, *count, seed).checks
            }
            Suite::Biconjugate { function, grid, dual_grid } => {
                let f = self.function(function)?;
                let (g, d) = (self.grid(grid)?, self.grid(dual_grid)?);
                ssdkit::convex::biconjugate_check(&f, &g, &d).checks
            }
            Suite::QGap { function, pairs, radius, .. } => {
                let f = self.function(function)?;
                let pairs = vz::random_pairs(space.dim(), *pairs, *radius, seed);
                vz::q_gap_inequality_check(&space, &f, &pairs, tol).checks
            }
        };
        Ok(rows)
    }
}

fn sampling_note(g: &Generator) -> String {
    match g {
        Generator::Custom => "sampling: explicit point list".into(),
        Generator::Diagonal { min, max, count } => format!("sampling: diagonal t in [{min}, {max}], {count} points"),
        Generator::Helix { lambda, theta_min, theta_max, count } => {
            format!("sampling: helix lambda = {lambda}, theta in [{theta_min}, {theta_max}], {count} points")
        }
        Generator::Line { direction, t_min, t_max, count } => {
            format!("sampling: line t {direction:?}, t in [{t_min}, {t_max}], {count} points")
        }
        Generator::SgnGraph { radius, count } => format!("sampling: sgn graph radius {radius}, {count} per piece"),
        Generator::MonotoneGraph { breakpoints, per_segment } => {
            format!("sampling: monotone graph through {} breakpoints, {per_segment} per segment", breakpoints.len())
        }
        Generator::Product => "sampling: product of two samples".into(),
    }
}

/// `Φ_A` by both routes at random points, and the identities on `A` itself.
fn fitzpatrick_rows(
    space: &SsdSpace,
    a: &QPositiveSet,
    points: usize,
    radius: f64,
    seed: u64,
    tol: f64,
) -> Built<Vec<CheckRow>> {
    let s = |e: ssdkit::Error| e.to_string();
    let pts = gossez::random_duals(space.dim(), points, radius, seed);
    let mut two_route = (0.0f64, None);
    for b in &pts {
        let d = (fitzpatrick::phi(space, a, b).map_err(s)? - fitzpatrick::phi_via_shift(space, a, b).map_err(s)?).abs();
        if d > two_route.0 {
            two_route = (d, Some(b.clone()));
        }
    }
    let mut on_phi = (0.0f64, None);
    let mut on_psi = (f64::NEG_INFINITY, None);
    for p in a.points() {
        let q = space.q(p).map_err(s)?;
        let d = (fitzpatrick::phi(space, a, p).map_err(s)? - q).abs();
        if d > on_phi.0 {
            on_phi = (d, Some(p.clone()));
        }
        let e = fitzpatrick::psi(space, a, p).map_err(s)? - q;
        if e > on_psi.0 {
            on_psi = (e, Some(p.clone()));
        }
    }
    let witness = |w: Option<Vec<f64>>| w.map(|w| vec![w]);
    let mut rows = vec![
        CheckRow::measured(
            "phi_A two routes agree",
            "max_a [<a,b> - q(a)] = q(b) - inf q(A - b)",
            two_route.0,
            tol,
            0.0,
        )
        .with_metric("points", points as f64),
        CheckRow::measured("phi_A = q on A", "phi_A(a) = q(a) for a in A", on_phi.0, tol, 0.0),
        CheckRow::measured("psi_A <= q on A", "psi_A(a) <= q(a) for a in A", on_psi.0, tol, 0.0),
    ];
    for (row, w) in rows.iter_mut().zip([two_route.1, on_phi.1, on_psi.1]) {
        row.witness = witness(w);
    }
    Ok(rows)
}

/// Replaces measured statuses by a single verdict row: the suite passes when
/// its rows pass exactly when `want` says they should.
fn with_expectation(rows: Vec<CheckRow>, want: bool, what: &str) -> Vec<CheckRow> {
    let verdict = rows.iter().all(CheckRow::passed);
    let mut out: Vec<CheckRow> = rows
        .into_iter()
        .map(|mut r| {
            if r.status == Status::Fail || r.status == Status::Pass {
                r.notes.push(format!(
                    "measured status {}, superseded by the verdict row",
                    if r.status == Status::Fail { "fail" } else { "pass" }
                ));
                r.status = Status::Skipped;
            }
            r
        })
        .collect();
    out.push(
        CheckRow::measured(
            format!("{what} verdict matches expectation"),
            format!("{what} verdict = {want}"),
            (verdict != want) as u8 as f64,
            0.0,
            0.0,
        )
        .with_metric("expected", want as u8 as f64)
        .with_metric("verdict", verdict as u8 as f64),
    );
    out
}

/// Reads, parses and runs a scenario file.
pub fn run_file(path: &Path, seed: Option<u64>) -> Result<CheckReport, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| config_error(&path.display().to_string(), e.to_string()))?;
    let scenario = Scenario::parse(&text)?;
    let opts = RunOptions {
        base_dir: path.parent().map(Path::to_path_buf),
        seed,
    };
    run_scenario(&scenario, &opts)
}
