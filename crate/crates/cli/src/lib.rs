//! Scenario runner and report emitter for ssdkit.
//!
//! Scenarios are TOML files (see `SCHEMA.md`); reports are JSON.

pub mod catalog;
pub mod config;
pub mod runner;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use ssdkit::{qpos, CheckReport, CheckRow};

pub use config::{ConfigError, Scenario};
pub use runner::{run_scenario, RunOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ssdkit", version, about = "Checks convex analysis on finite-dimensional SSD spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file, or a bundled scenario by name.
    Run {
        scenario: String,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write one CSV row per check.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for grid and probe sweeps.
        #[arg(long, env = "SSDKIT_WORKERS")]
        workers: Option<usize>,
    },
    /// List builtin spaces, sets, suites and bundled scenarios.
    List,
    /// Describe a bundled scenario, builtin or suite.
    Describe { name: String },
    /// One-off checks.
    #[command(subcommand)]
    Check(CheckCommand),
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Exhaustive pair scan of a CSV point list.
    QPositive {
        #[arg(long)]
        space: String,
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value_t = qpos::EPS_Q)]
        tol: f64,
    },
}

/// Pretty JSON with a trailing newline.
pub fn report_json(report: &CheckReport) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize") + "\n"
}

/// `name,status,max_violation,tolerance,allowance`, one line per check.
pub fn report_csv(report: &CheckReport) -> String {
    let mut out = String::from("name,status,max_violation,tolerance,allowance\n");
    for c in &report.checks {
        let status = serde_json::to_value(c.status).expect("status serializes");
        out.push_str(&format!(
            "\"{}\",{},{:e},{:e},{:e}\n",
            c.name.replace('"', "\"\""),
            status.as_str().unwrap_or_default(),
            c.max_violation,
            c.tolerance,
            c.allowance
        ));
    }
    out
}

/// Loads a scenario from a path, falling back to the bundled catalog.
pub fn load(scenario: &str) -> Result<(Scenario, Option<PathBuf>), ConfigError> {
    let path = Path::new(scenario);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            key: scenario.to_string(),
            line: None,
            message: e.to_string(),
        })?;
        return Ok((Scenario::parse(&text)?, path.parent().map(Path::to_path_buf)));
    }
    match catalog::scenario_text(scenario) {
        Some(text) => Ok((Scenario::parse(text)?, None)),
        None => Err(ConfigError {
            key: scenario.to_string(),
            line: None,
            message: "no such file and no bundled scenario of that name".into(),
        }),
    }
}

pub fn exit_code(report: &CheckReport) -> i32 {
    if report.all_passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Parses `args` and runs the command, writing to the given streams.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_CONFIG;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_PASS;
        }
    };
    match cli.command {
        Command::Run { scenario, out, csv, seed, workers } => {
            run_command(&scenario, out.as_deref(), csv.as_deref(), seed, workers, stdout, stderr)
        }
        Command::List => {
            let _ = write!(stdout, "{}", catalog::listing());
            EXIT_PASS
        }
        Command::Describe { name } => match catalog::describe(&name) {
            Ok(text) => {
                let _ = write!(stdout, "{text}");
                EXIT_PASS
            }
            Err(e) => {
                let _ = writeln!(stderr, "{e}");
                EXIT_CONFIG
            }
        },
        Command::Check(CheckCommand::QPositive { space, points, tol }) => {
            check_q_positive(&space, &points, tol, stdout, stderr)
        }
    }
}

fn run_command(
    scenario: &str,
    out: Option<&Path>,
    csv: Option<&Path>,
    seed: Option<u64>,
    workers: Option<usize>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let (sc, base_dir) = match load(scenario) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            return EXIT_CONFIG;
        }
    };
    let opts = RunOptions { base_dir, seed };
    let run = || run_scenario(&sc, &opts);
    let result = match workers {
        Some(0) => {
            let _ = writeln!(stderr, "--workers must be at least 1");
            return EXIT_CONFIG;
        }
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                let _ = writeln!(stderr, "cannot start worker pool: {e}");
                return EXIT_CONFIG;
            }
        },
        None => run(),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            return EXIT_CONFIG;
        }
    };
    let json = report_json(&report);
    let written = match out {
        Some(p) => std::fs::write(p, &json),
        None => stdout.write_all(json.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "cannot write report: {e}");
        return EXIT_CONFIG;
    }
    if let Some(p) = csv {
        if let Err(e) = std::fs::write(p, report_csv(&report)) {
            let _ = writeln!(stderr, "cannot write csv: {e}");
            return EXIT_CONFIG;
        }
    }
    let s = &report.summary;
    let _ = writeln!(
        stderr,
        "{}: {} pass, {} fail, {} not falsified, {} skipped ({:.2}s)",
        report.scenario, s.pass, s.fail, s.not_falsified, s.skipped, report.wall_time
    );
    for c in report.checks.iter().filter(|c| !c.passed()) {
        let _ = writeln!(stderr, "  FAIL {}: {:e} > {:e} + {:e}", c.name, c.max_violation, c.tolerance, c.allowance);
        for n in &c.notes {
            let _ = writeln!(stderr, "       {n}");
        }
    }
    exit_code(&report)
}

fn check_q_positive(space: &str, points: &Path, tol: f64, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let loaded = ssdkit::builtin_space(space)
        .and_then(|s| ssdkit::io::read_points_csv(points).map(|p| (s, p)))
        .and_then(|(s, p)| qpos::is_q_positive(&s, &p).map(|r| (r, p.len())));
    let (r, n) = match loaded {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            return EXIT_CONFIG;
        }
    };
    let violation = if r.min_value.is_finite() { -r.min_value } else { 0.0 };
    let mut row = CheckRow::measured("q-positive", "q(a - b) >= 0 for all a, b in A", violation, tol, 0.0)
        .with_metric("min_q_difference", r.min_value)
        .with_metric("pairs_scanned", r.pairs_scanned as f64)
        .with_note(format!("{n} points from {}", points.display()));
    if violation > tol {
        if let Some(v) = r.violation {
            row = row.with_witness(v.witness);
        }
    }
    let report = CheckReport::new(format!("check q-positive {space}"), 0, vec![row], 0.0);
    let _ = write!(stdout, "{}", report_json(&report));
    exit_code(&report)
}
