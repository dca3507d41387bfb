//! Named spaces and sampled sets.
//!
//! Space names follow a small grammar: `name` or `name(arg, ...)`, where an
//! argument is a number or another space name, e.g. `product(r3-swap,pairing(1))`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::io;
use crate::qpos::{Generator, QPositiveSet};
use crate::space::SsdSpace;

/// One line per builtin space: name and a short description.
pub const SPACES: &[(&str, &str)] = &[
    ("hilbert-identity(n)", "R^n with S = I; q = ½‖b‖², every set is q-positive"),
    ("hilbert-negative(n)", "R^n with S = -I; only singletons are q-positive"),
    ("r3-swap", "R^3 with ⌊b,c⌋ = b1c2 + b2c1 + b3c3"),
    ("pairing(m)", "E × E* with E = R^m; ⌊(x,x*),(y,y*)⌋ = ⟨x,y*⟩ + ⟨y,x*⟩"),
    ("product(s1,s2)", "block-diagonal product of two spaces, ℓ² norm"),
];

/// One line per builtin set family.
pub const SETS: &[(&str, &str)] = &[
    ("diagonal", "graph of the identity {(x,x)} in pairing(m), sampled on a cube"),
    ("helix", "{(cos θ, sin θ, λθ)} in r3-swap; q-positive iff λ ≥ 1"),
    ("line", "{t v} for a direction v with q(v) ≥ 0"),
    ("sgn-graph", "graph of the sign multifunction in pairing(1)"),
    ("monotone-graph", "polyline through nondecreasing breakpoints in pairing(1)"),
    ("product", "cartesian product of two sets in a product space"),
    ("custom-file", "CSV point list, one point per row, no header"),
];

pub fn hilbert_identity(n: usize) -> Result<SsdSpace> {
    positive_dim(n)?;
    SsdSpace::new(DMatrix::identity(n, n), false)
}

pub fn hilbert_negative(n: usize) -> Result<SsdSpace> {
    positive_dim(n)?;
    SsdSpace::new(-DMatrix::identity(n, n), false)
}

pub fn r3_swap() -> Result<SsdSpace> {
    SsdSpace::from_rows(
        &[vec![0., 1., 0.], vec![1., 0., 0.], vec![0., 0., 1.]],
        true,
    )
}

/// `E × E*` with `E = R^m`: `S = [[0, I], [I, 0]]`.
pub fn pairing(m: usize) -> Result<SsdSpace> {
    positive_dim(m)?;
    let mut s = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        s[(i, m + i)] = 1.0;
        s[(m + i, i)] = 1.0;
    }
    SsdSpace::new(s, true)
}

fn positive_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParams("dimension must be positive".into()))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Term {
    Num(f64),
    Call(String, Vec<Term>),
}

fn parse_term(s: &str) -> Result<(Term, &str)> {
    let s = s.trim_start();
    let end = s
        .find(|ch: char| ch == '(' || ch == ')' || ch == ',')
        .unwrap_or(s.len());
    let head = s[..end].trim();
    if head.is_empty() {
        return Err(Error::Parse(format!("expected a name near {s:?}")));
    }
    let rest = &s[end..];
    if let Ok(x) = head.parse::<f64>() {
        return Ok((Term::Num(x), rest));
    }
    if let Some(mut rest) = rest.strip_prefix('(') {
        let mut args = Vec::new();
        loop {
            let (arg, r) = parse_term(rest)?;
            args.push(arg);
            let r = r.trim_start();
            if let Some(r) = r.strip_prefix(',') {
                rest = r;
            } else if let Some(r) = r.strip_prefix(')') {
                return Ok((Term::Call(head.to_string(), args), r));
            } else {
                return Err(Error::Parse(format!("unclosed argument list in {head:?}")));
            }
        }
    }
    Ok((Term::Call(head.to_string(), Vec::new()), rest))
}

fn count_arg(name: &str, args: &[Term]) -> Result<usize> {
    match args {
        [Term::Num(x)] if *x >= 1.0 && x.fract() == 0.0 => Ok(*x as usize),
        _ => Err(Error::InvalidParams(format!(
            "{name} takes one positive integer argument"
        ))),
    }
}

fn space_from_term(t: &Term) -> Result<SsdSpace> {
    let Term::Call(name, args) = t else {
        return Err(Error::Parse("expected a space name, found a number".into()));
    };
    match name.as_str() {
        "hilbert-identity" => hilbert_identity(count_arg(name, args)?),
        "hilbert-negative" => hilbert_negative(count_arg(name, args)?),
        "pairing" => pairing(count_arg(name, args)?),
        "r3-swap" if args.is_empty() => r3_swap(),
        "r3-swap" => Err(Error::InvalidParams("r3-swap takes no arguments".into())),
        "product" => match args.as_slice() {
            [a, b] => space_from_term(a)?.product(&space_from_term(b)?),
            _ => Err(Error::InvalidParams("product takes two spaces".into())),
        },
        _ => Err(Error::UnknownBuiltin(name.clone())),
    }
}

/// Resolves a builtin space name such as `pairing(1)`.
pub fn builtin_space(name: &str) -> Result<SsdSpace> {
    let (term, rest) = parse_term(name)?;
    if !rest.trim().is_empty() {
        return Err(Error::Parse(format!("trailing input {rest:?} in {name:?}")));
    }
    space_from_term(&term)
}

/// Parameters of a sampled builtin set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SetSpec {
    Diagonal {
        min: f64,
        max: f64,
        count: usize,
    },
    Helix {
        lambda: f64,
        theta_min: f64,
        theta_max: f64,
        count: usize,
    },
    Line {
        direction: Vec<f64>,
        t_min: f64,
        t_max: f64,
        count: usize,
    },
    SgnGraph {
        radius: f64,
        count: usize,
    },
    MonotoneGraph {
        breakpoints: Vec<[f64; 2]>,
        per_segment: usize,
    },
    Product {
        left_space: String,
        left: Box<SetSpec>,
        right_space: String,
        right: Box<SetSpec>,
    },
    CustomFile {
        path: String,
    },
}

fn linspace(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if count == 1 && min == max {
        return Ok(vec![min]);
    }
    Ok(crate::grid::Axis::new(min, max, count)?.nodes())
}

fn require_pairing(space: &SsdSpace, what: &str) -> Result<usize> {
    let n = space.dim();
    if n % 2 == 1 {
        return Err(Error::InvalidParams(format!("{what} needs a pairing space")));
    }
    let m = n / 2;
    let expected = pairing(m)?;
    if expected.form_matrix() != space.form_matrix() {
        return Err(Error::InvalidParams(format!("{what} needs a pairing space")));
    }
    Ok(m)
}

/// Samples the points of a set without checking q-positivity, so that
/// non-positive families (e.g. a helix with λ < 1) can be inspected.
pub fn sample_points(space: &SsdSpace, spec: &SetSpec) -> Result<(Vec<Vec<f64>>, Generator)> {
    match spec {
        SetSpec::Diagonal { min, max, count } => {
            let m = require_pairing(space, "diagonal")?;
            let grid = GridSpec::cube(*min, *max, *count, m)?;
            let pts = grid
                .nodes()
                .into_iter()
                .map(|x| x.iter().chain(x.iter()).copied().collect())
                .collect();
            let gen = Generator::Diagonal {
                min: *min,
                max: *max,
                count: *count,
            };
            Ok((pts, gen))
        }
        SetSpec::Helix {
            lambda,
            theta_min,
            theta_max,
            count,
        } => {
            if space.dim() != 3 || space.form_matrix() != r3_swap()?.form_matrix() {
                return Err(Error::InvalidParams("helix needs r3-swap".into()));
            }
            let pts = linspace(*theta_min, *theta_max, *count)?
                .into_iter()
                .map(|t| vec![t.cos(), t.sin(), lambda * t])
                .collect();
            let gen = Generator::Helix {
                lambda: *lambda,
                theta_min: *theta_min,
                theta_max: *theta_max,
                count: *count,
            };
            Ok((pts, gen))
        }
        SetSpec::Line {
            direction,
            t_min,
            t_max,
            count,
        } => {
            space.check_len(direction)?;
            let pts = linspace(*t_min, *t_max, *count)?
                .into_iter()
                .map(|t| direction.iter().map(|v| t * v).collect())
                .collect();
            let gen = Generator::Line {
                direction: direction.clone(),
                t_min: *t_min,
                t_max: *t_max,
                count: *count,
            };
            Ok((pts, gen))
        }
        SetSpec::SgnGraph { radius, count } => {
            if require_pairing(space, "sgn-graph")? != 1 {
                return Err(Error::InvalidParams("sgn-graph needs pairing(1)".into()));
            }
            if !(*radius > 0.0) || *count < 2 {
                return Err(Error::InvalidParams(
                    "sgn-graph needs radius > 0 and count ≥ 2".into(),
                ));
            }
            // Three pieces: {x < 0} × {−1}, {0} × [−1, 1], {x > 0} × {1}.
            let mut pts = Vec::new();
            for x in linspace(-radius, 0.0, *count)? {
                pts.push(vec![x, -1.0]);
            }
            for y in linspace(-1.0, 1.0, *count)?.into_iter().skip(1) {
                pts.push(vec![0.0, y]);
            }
            for x in linspace(0.0, *radius, *count)?.into_iter().skip(1) {
                pts.push(vec![x, 1.0]);
            }
            let gen = Generator::SgnGraph {
                radius: *radius,
                count: *count,
            };
            Ok((pts, gen))
        }
        SetSpec::MonotoneGraph {
            breakpoints,
            per_segment,
        } => {
            if require_pairing(space, "monotone-graph")? != 1 {
                return Err(Error::InvalidParams(
                    "monotone-graph needs pairing(1)".into(),
                ));
            }
            if breakpoints.is_empty() || *per_segment == 0 {
                return Err(Error::InvalidParams(
                    "monotone-graph needs breakpoints and per_segment ≥ 1".into(),
                ));
            }
            let mut pts = vec![breakpoints[0].to_vec()];
            for w in breakpoints.windows(2) {
                let ([x0, y0], [x1, y1]) = (w[0], w[1]);
                for k in 1..=*per_segment {
                    let t = k as f64 / *per_segment as f64;
                    pts.push(vec![x0 + t * (x1 - x0), y0 + t * (y1 - y0)]);
                }
            }
            let gen = Generator::MonotoneGraph {
                breakpoints: breakpoints.iter().map(|b| (b[0], b[1])).collect(),
                per_segment: *per_segment,
            };
            Ok((pts, gen))
        }
        SetSpec::Product {
            left_space,
            left,
            right_space,
            right,
        } => {
            let ls = builtin_space(left_space)?;
            let rs = builtin_space(right_space)?;
            let prod = ls.product(&rs)?;
            if prod.form_matrix() != space.form_matrix() {
                return Err(Error::InvalidParams(format!(
                    "product set does not live in a space of form product({left_space},{right_space})"
                )));
            }
            let (lp, _) = sample_points(&ls, left)?;
            let (rp, _) = sample_points(&rs, right)?;
            let pts = lp
                .iter()
                .flat_map(|a| rp.iter().map(move |b| a.iter().chain(b).copied().collect()))
                .collect();
            Ok((pts, Generator::Product))
        }
        SetSpec::CustomFile { path } => {
            let pts = io::read_points_csv(std::path::Path::new(path))?;
            for p in &pts {
                space.check_len(p)?;
            }
            Ok((pts, Generator::Custom))
        }
    }
}

/// Samples a builtin set and validates q-positivity.
pub fn builtin_set(space: &SsdSpace, spec: &SetSpec) -> Result<QPositiveSet> {
    let (pts, gen) = sample_points(space, spec)?;
    QPositiveSet::new(space, pts, gen)
}

/// Diagonal sample `{(t,t)}` in `pairing(1)`, or `{(x,x)}` over a cube in `pairing(m)`.
pub fn diagonal(space: &SsdSpace, min: f64, max: f64, count: usize) -> Result<QPositiveSet> {
    builtin_set(space, &SetSpec::Diagonal { min, max, count })
}
