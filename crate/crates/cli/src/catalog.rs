//! Scenarios bundled into the binary.

use ssdkit::builtins;

use crate::config::{Scenario, SUITE_KINDS};

pub const SCENARIOS: &[(&str, &str)] = &[
    ("sharp-constant", include_str!("../scenarios/sharp-constant.toml")),
    ("helix", include_str!("../scenarios/helix.toml")),
    ("line-1-neg1-2", include_str!("../scenarios/line-1-neg1-2.toml")),
    ("pairing-diagonal", include_str!("../scenarios/pairing-diagonal.toml")),
    ("hilbert-self-dual", include_str!("../scenarios/hilbert-self-dual.toml")),
    ("product-space", include_str!("../scenarios/product-space.toml")),
    ("biconjugation-grid", include_str!("../scenarios/biconjugation-grid.toml")),
];

pub fn scenario_text(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn scenario(name: &str) -> Option<Scenario> {
    scenario_text(name).map(|t| Scenario::parse(t).expect("bundled scenarios are valid"))
}

/// Everything `ssdkit list` prints.
pub fn listing() -> String {
    let mut out = String::new();
    let mut section = |title: &str, items: &mut dyn Iterator<Item = (String, String)>| {
        out.push_str(title);
        out.push('\n');
        for (name, what) in items {
            out.push_str(&format!("  {name:<22} {what}\n"));
        }
        out.push('\n');
    };
    section(
        "spaces:",
        &mut builtins::SPACES.iter().map(|(n, d)| (n.to_string(), d.to_string())),
    );
    section(
        "sets:",
        &mut builtins::SETS.iter().map(|(n, d)| (n.to_string(), d.to_string())),
    );
    section(
        "suites:",
        &mut SUITE_KINDS.iter().map(|(n, d)| (n.to_string(), d.to_string())),
    );
    section(
        "scenarios:",
        &mut SCENARIOS.iter().map(|(n, _)| {
            let first = scenario(n)
                .and_then(|s| s.description)
                .and_then(|d| d.lines().find(|l| !l.trim().is_empty()).map(str::to_string))
                .unwrap_or_default();
            (n.to_string(), first)
        }),
    );
    out.trim_end().to_string() + "\n"
}

/// Describes a bundled scenario, a builtin space or set, or a suite kind.
pub fn describe(name: &str) -> Result<String, ssdkit::Error> {
    if let Some(s) = scenario(name) {
        let mut out = format!("scenario {}\n\n", s.name);
        if let Some(d) = &s.description {
            out.push_str(d.trim());
            out.push_str("\n\n");
        }
        out.push_str(&format!("space: {}\n", space_label(&s)));
        out.push_str("suites:\n");
        for suite in &s.suite {
            let what = SUITE_KINDS.iter().find(|(k, _)| *k == suite.kind()).map_or("", |(_, d)| d);
            out.push_str(&format!("  {:<16} {what}\n", suite.kind()));
        }
        return Ok(out);
    }
    for (kind, what) in SUITE_KINDS {
        if *kind == name {
            return Ok(format!("suite {kind}\n\n{what}\n"));
        }
    }
    for (n, what) in builtins::SPACES.iter().chain(builtins::SETS) {
        if *n == name || n.split('(').next() == Some(name) {
            return Ok(format!("{n}\n\n{what}\n"));
        }
    }
    Err(ssdkit::Error::UnknownBuiltin(name.to_string()))
}

fn space_label(s: &Scenario) -> String {
    match &s.space {
        crate::config::SpaceDef::Builtin { builtin } => builtin.clone(),
        crate::config::SpaceDef::Form { form } => format!("explicit {}x{} form", form.len(), form.len()),
        crate::config::SpaceDef::FormFile { form_file } => format!("form read from {form_file}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_scenario_parses_under_its_own_name() {
        for (name, _) in SCENARIOS {
            assert_eq!(scenario(name).unwrap().name, *name);
        }
    }

    #[test]
    fn listing_includes_core_builtins() {
        let l = listing();
        for needle in ["r3-swap", "pairing(m)", "diagonal", "helix", "sharp-constant"] {
            assert!(l.contains(needle), "{needle} missing from\n{l}");
        }
    }

    #[test]
    fn describe_sharp_constant_states_both_inequalities() {
        let d = describe("sharp-constant").unwrap();
        assert!(d.contains("sqrt2 sqrt(-inf q(P_q(f) - c))"));
        assert!(d.contains("sqrt2 sqrt((f - q)(c))"));
    }

    #[test]
    fn describe_unknown_is_an_error() {
        assert!(matches!(describe("nonesuch"), Err(ssdkit::Error::UnknownBuiltin(_))));
    }
}
