//! Scenario files: TOML with named sets, functions and grids, and an ordered
//! list of suites. See `SCHEMA.md` next to this crate's manifest.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use ssdkit::builtins::SetSpec;
use ssdkit::{Axis, GridSpec};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = 1e-9;

/// A config problem, located by key and (1-based) line where possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config error at `{}` (line {l}): {}", self.key, self.message),
            None => write!(f, "config error at `{}`: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub space: SpaceDef,
    #[serde(default)]
    pub sets: BTreeMap<String, SetSpec>,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionDef>,
    #[serde(default)]
    pub grids: BTreeMap<String, GridDef>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub suite: Vec<Suite>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceDef {
    Builtin { builtin: String },
    Form { form: Vec<Vec<f64>> },
    FormFile { form_file: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionDef {
    HalfNormSq {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Quadratic {
        q: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Vec<f64>>,
        #[serde(default)]
        c: f64,
    },
    MaxAffine {
        slopes: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    /// Slopes uniform in `[−radius, radius]^dim`, offsets in `[0, radius]`,
    /// drawn from the scenario seed.
    RandomMaxAffine {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        count: usize,
        radius: f64,
    },
    Phi { set: String },
    Theta { set: String },
    Psi { set: String },
    IntrinsicConjugate { of: String },
    /// Another function sampled on a grid.
    Sampled { of: String, grid: String },
    GridFile { path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDef {
    /// Per-axis `[min, max, count]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Defaults to the space dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

impl GridDef {
    pub fn build(&self, space_dim: usize) -> Result<GridSpec, String> {
        let err = |e: ssdkit::Error| e.to_string();
        if let Some(axes) = &self.axes {
            if self.min.is_some() || self.max.is_some() || self.step.is_some() || self.count.is_some() {
                return Err("give either `axes` or `min`/`max`/`step|count`, not both".into());
            }
            let axes = axes
                .iter()
                .map(|[lo, hi, n]| {
                    if n.fract() != 0.0 || *n < 0.0 {
                        return Err(format!("axis count must be a whole number, got {n}"));
                    }
                    Axis::new(*lo, *hi, *n as usize).map_err(err)
                })
                .collect::<Result<Vec<_>, _>>()?;
            return GridSpec::new(axes).map_err(err);
        }
        let (Some(lo), Some(hi)) = (self.min, self.max) else {
            return Err("grid needs `axes` or both `min` and `max`".into());
        };
        let dim = self.dim.unwrap_or(space_dim);
        match (self.step, self.count) {
            (Some(h), None) => GridSpec::cube_step(lo, hi, h, dim).map_err(err),
            (None, Some(n)) => GridSpec::cube(lo, hi, n, dim).map_err(err),
            _ => Err("grid needs exactly one of `step` and `count`".into()),
        }
    }
}

/// Probe points: a named grid, or a seeded uniform sample of a cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Probes {
    Grid(String),
    Random { count: usize, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Suite {
    Qpos {
        set: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    Maximality {
        set: String,
        grid: String,
        dist_floor: f64,
    },
    Fitzpatrick {
        set: String,
        #[serde(default = "default_points")]
        points: usize,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dual_search: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    Sandwich {
        set: String,
        function: String,
        grid: String,
        #[serde(default)]
        allowance: f64,
        /// Whether `Φ_A ≥ q` is asserted; it only holds for maximal `A`.
        #[serde(default)]
        maximal: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    Vz {
        function: String,
        probes: Probes,
        search: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<bool>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    Mas {
        function: String,
        primal: String,
        dual: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<bool>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    InfconvDuality {
        function: String,
        probes: Probes,
        search: String,
        dual_search: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    Distance {
        function: String,
        set: String,
        probes: Probes,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    Gossez {
        set: String,
        grid: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    Ni {
        set: String,
        grid: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    DualAxioms {
        #[serde(default = "default_points")]
        count: usize,
    },
    Biconjugate {
        function: String,
        grid: String,
        dual_grid: String,
    },
    QGap {
        function: String,
        #[serde(default = "default_points")]
        pairs: usize,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
}

fn default_points() -> usize {
    1000
}

fn default_radius() -> f64 {
    3.0
}

pub const SUITE_KINDS: &[(&str, &str)] = &[
    ("qpos", "exhaustive pair scan for q(a - b) >= 0 on a set"),
    ("maximality", "grid search for points that could be added to a set (falsifier only)"),
    ("fitzpatrick", "phi_A two-route agreement, phi_A = q and psi_A <= q on A, conjugate round trip"),
    ("sandwich", "psi_A >= f >= phi_A on a grid, and phi_A >= q (maximal A only)"),
    ("vz", "((f - q) nabla p)(c) = 0 at probes, cross-checked by p-density of P_q(f)"),
    ("mas", "f >= q on B and f* >= q~ on the dual"),
    ("infconv_duality", "-((f - q) nabla p)(c) = ((f* - q~) nabla p~)(Sc)"),
    ("distance", "dist(c, P_q(f)) <= sqrt2 sqrt(-inf q(P_q(f) - c)) <= sqrt2 sqrt((f - q)(c)) <= 5 sqrt((f - q)(c))"),
    ("gossez", "Gossez extension A^G of a set in the dual and its theta_A description"),
    ("ni", "theta_A - q~ >= 0 on a dual grid"),
    ("dual_axioms", "pairing axioms of the dual SSD structure on random vectors"),
    ("biconjugate", "f = f** at interior grid nodes up to C h"),
    ("q_gap", "-q(b - c) <= [sqrt((f - q)(b)) + sqrt((f - q)(c))]^2 on random pairs"),
];

impl Suite {
    pub fn kind(&self) -> &'static str {
        match self {
            Suite::Qpos { .. } => "qpos",
            Suite::Maximality { .. } => "maximality",
            Suite::Fitzpatrick { .. } => "fitzpatrick",
            Suite::Sandwich { .. } => "sandwich",
            Suite::Vz { .. } => "vz",
            Suite::Mas { .. } => "mas",
            Suite::InfconvDuality { .. } => "infconv_duality",
            Suite::Distance { .. } => "distance",
            Suite::Gossez { .. } => "gossez",
            Suite::Ni { .. } => "ni",
            Suite::DualAxioms { .. } => "dual_axioms",
            Suite::Biconjugate { .. } => "biconjugate",
            Suite::QGap { .. } => "q_gap",
        }
    }

    pub fn tol_override(&self) -> Option<f64> {
        match self {
            Suite::Qpos { tol, .. }
            | Suite::Fitzpatrick { tol, .. }
            | Suite::Sandwich { tol, .. }
            | Suite::Vz { tol, .. }
            | Suite::Mas { tol, .. }
            | Suite::InfconvDuality { tol, .. }
            | Suite::Distance { tol, .. }
            | Suite::Gossez { tol, .. }
            | Suite::Ni { tol, .. }
            | Suite::QGap { tol, .. } => *tol,
            Suite::Maximality { .. } | Suite::DualAxioms { .. } | Suite::Biconjugate { .. } => None,
        }
    }

    /// `(field, kind, name)` for every named reference the suite makes.
    fn references(&self) -> Vec<(&'static str, Ref, &str)> {
        use Ref::*;
        fn probes(p: &Probes) -> Option<&str> {
            match p {
                Probes::Grid(g) => Some(g.as_str()),
                Probes::Random { .. } => None,
            }
        }
        let mut out = Vec::new();
        match self {
            Suite::Qpos { set, .. } => out.push(("set", Set, set.as_str())),
            Suite::Maximality { set, grid, .. } | Suite::Gossez { set, grid, .. } | Suite::Ni { set, grid, .. } => {
                out.push(("set", Set, set.as_str()));
                out.push(("grid", Grid, grid.as_str()));
            }
            Suite::Fitzpatrick { set, grid, dual_search, .. } => {
                out.push(("set", Set, set.as_str()));
                if let Some(g) = grid {
                    out.push(("grid", Grid, g.as_str()));
                }
                if let Some(g) = dual_search {
                    out.push(("dual_search", Grid, g.as_str()));
                }
            }
            Suite::Sandwich { set, function, grid, .. } => {
                out.push(("set", Set, set.as_str()));
                out.push(("function", Function, function.as_str()));
                out.push(("grid", Grid, grid.as_str()));
            }
            Suite::Vz { function, probes: p, search, .. } => {
                out.push(("function", Function, function.as_str()));
                if let Some(g) = probes(p) {
                    out.push(("probes", Grid, g));
                }
                out.push(("search", Grid, search.as_str()));
            }
            Suite::Mas { function, primal, dual, .. } => {
                out.push(("function", Function, function.as_str()));
                out.push(("primal", Grid, primal.as_str()));
                out.push(("dual", Grid, dual.as_str()));
            }
            Suite::InfconvDuality { function, probes: p, search, dual_search, .. } => {
                out.push(("function", Function, function.as_str()));
                if let Some(g) = probes(p) {
                    out.push(("probes", Grid, g));
                }
                out.push(("search", Grid, search.as_str()));
                out.push(("dual_search", Grid, dual_search.as_str()));
            }
            Suite::Distance { function, set, probes: p, .. } => {
                out.push(("function", Function, function.as_str()));
                out.push(("set", Set, set.as_str()));
                if let Some(g) = probes(p) {
                    out.push(("probes", Grid, g));
                }
            }
            Suite::DualAxioms { .. } => {}
            Suite::Biconjugate { function, grid, dual_grid } => {
                out.push(("function", Function, function.as_str()));
                out.push(("grid", Grid, grid.as_str()));
                out.push(("dual_grid", Grid, dual_grid.as_str()));
            }
            Suite::QGap { function, .. } => out.push(("function", Function, function.as_str())),
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Ref {
    Set,
    Function,
    Grid,
}

impl Scenario {
    /// Parses and validates a scenario. `text` is kept only for locating
    /// errors.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| from_toml(text, &e))?;
        scenario.validate(text)?;
        Ok(scenario)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Tolerance for a suite: its own `tol`, else `[tolerances].<kind>`, else
    /// `[tolerances].default`, else 1e-9.
    pub fn tolerance(&self, suite: &Suite) -> f64 {
        suite
            .tol_override()
            .or_else(|| self.tolerances.get(suite.kind()).copied())
            .or_else(|| self.tolerances.get("default").copied())
            .unwrap_or(DEFAULT_TOL)
    }

    fn validate(&self, text: &str) -> Result<(), ConfigError> {
        if self.name.trim().is_empty() {
            return Err(at(text, None, "name", "scenario name must be nonempty"));
        }
        for (k, v) in &self.tolerances {
            if k != "default" && !SUITE_KINDS.iter().any(|(s, _)| s == k) {
                return Err(at(text, Some("[tolerances]"), k, format!("unknown suite `{k}` in tolerances")));
            }
            if !(*v > 0.0) {
                return Err(at(text, Some("[tolerances]"), k, format!("tolerance must be positive, got {v}")));
            }
        }
        for (name, f) in &self.functions {
            let header = format!("[functions.{name}]");
            let refs: Vec<(&str, Ref, &str)> = match f {
                FunctionDef::Phi { set } | FunctionDef::Theta { set } | FunctionDef::Psi { set } => {
                    vec![("set", Ref::Set, set.as_str())]
                }
                FunctionDef::IntrinsicConjugate { of } => vec![("of", Ref::Function, of.as_str())],
                FunctionDef::Sampled { of, grid } => {
                    vec![("of", Ref::Function, of.as_str()), ("grid", Ref::Grid, grid.as_str())]
                }
                _ => vec![],
            };
            for (key, kind, target) in refs {
                self.check_ref(text, &header, key, kind, target)?;
            }
        }
        self.check_function_cycles(text)?;
        for (i, s) in self.suite.iter().enumerate() {
            let header = nth_header(text, "[[suite]]", i);
            for (key, kind, target) in s.references() {
                self.check_ref_at(text, header, key, kind, target)?;
            }
            if let Some(t) = s.tol_override() {
                if !(t > 0.0) {
                    return Err(located(text, header, "tol", format!("tolerance must be positive, got {t}")));
                }
            }
        }
        Ok(())
    }

    fn exists(&self, kind: Ref, target: &str) -> bool {
        match kind {
            Ref::Set => self.sets.contains_key(target),
            Ref::Function => self.functions.contains_key(target),
            Ref::Grid => self.grids.contains_key(target),
        }
    }

    fn check_ref(&self, text: &str, header: &str, key: &str, kind: Ref, target: &str) -> Result<(), ConfigError> {
        let start = find_line(text, |l| l.trim() == header);
        self.check_ref_at(text, start, key, kind, target)
    }

    fn check_ref_at(
        &self,
        text: &str,
        start: Option<usize>,
        key: &str,
        kind: Ref,
        target: &str,
    ) -> Result<(), ConfigError> {
        if self.exists(kind, target) {
            return Ok(());
        }
        let what = match kind {
            Ref::Set => "set",
            Ref::Function => "function",
            Ref::Grid => "grid",
        };
        Err(located(text, start, key, format!("undefined {what} `{target}`")))
    }

    fn check_function_cycles(&self, text: &str) -> Result<(), ConfigError> {
        for start in self.functions.keys() {
            let mut seen = vec![start.as_str()];
            let mut cur = start.as_str();
            while let Some(FunctionDef::IntrinsicConjugate { of } | FunctionDef::Sampled { of, .. }) =
                self.functions.get(cur)
            {
                if seen.contains(&of.as_str()) {
                    let header = format!("[functions.{start}]");
                    return Err(at(text, Some(&header), "of", format!("function `{start}` refers to itself")));
                }
                seen.push(of);
                cur = of;
            }
        }
        Ok(())
    }
}

fn from_toml(text: &str, e: &toml::de::Error) -> ConfigError {
    let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    let key = e
        .span()
        .and_then(|s| text.get(s.clone()))
        .map(|s| s.trim().trim_matches('"').to_string())
        .filter(|s| !s.is_empty() && !s.contains('\n'))
        .unwrap_or_else(|| "<document>".into());
    ConfigError {
        key,
        line,
        message: e.message().to_string(),
    }
}

fn find_line(text: &str, pred: impl Fn(&str) -> bool) -> Option<usize> {
    text.lines().position(pred)
}

fn nth_header(text: &str, header: &str, n: usize) -> Option<usize> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| l.trim() == header)
        .nth(n)
        .map(|(i, _)| i)
}

fn at(text: &str, header: Option<&str>, key: &str, message: impl Into<String>) -> ConfigError {
    let start = header.and_then(|h| find_line(text, |l| l.trim() == h));
    located(text, start.or(Some(0)), key, message)
}

/// Line of `key = …` in the section starting at 0-based line `start`.
fn located(text: &str, start: Option<usize>, key: &str, message: impl Into<String>) -> ConfigError {
    let line = start.and_then(|s| {
        text.lines()
            .enumerate()
            .skip(s)
            .take_while(|(i, l)| *i == s || !l.trim_start().starts_with('['))
            .find(|(_, l)| {
                l.trim_start()
                    .strip_prefix(key)
                    .is_some_and(|rest| rest.trim_start().starts_with('='))
            })
            .map(|(i, _)| i + 1)
            .or(Some(s + 1))
    });
    ConfigError {
        key: key.to_string(),
        line,
        message: message.into(),
    }
}
