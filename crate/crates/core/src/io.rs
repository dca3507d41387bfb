//! CSV point lists and grid-sampled value files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    match tok.trim() {
        "inf" | "+inf" => Ok(f64::INFINITY),
        t => t
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Parse(format!("line {line}: bad number {t:?}"))),
    }
}

/// Points, one per row, comma separated, no header. Blank lines are skipped.
pub fn parse_points_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| {
                let v = parse_value(t, i + 1)?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Parse(format!("line {}: points must be finite", i + 1)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = pts.first() {
            if first.len() != row.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} columns, found {}",
                    i + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        pts.push(row);
    }
    if pts.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(pts)
}

pub fn read_points_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    parse_points_csv(&read(path)?)
}

pub fn format_points_csv(points: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for p in points {
        let row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

const GRID_HEADER: &str = "# grid:";

/// Grid values file: a header `# grid: min,max,count;...` followed by one
/// value per line in row-major order (last axis fastest); `inf` marks `+∞`.
pub fn format_grid_values(grid: &GridSpec, values: &[f64]) -> String {
    let mut out = format!("{GRID_HEADER} {}\n", grid.format_axes());
    for v in values {
        if v.is_infinite() {
            out.push_str("inf\n");
        } else {
            let _ = writeln!(out, "{v:?}");
        }
    }
    out
}

pub fn parse_grid_values(text: &str) -> Result<(GridSpec, Vec<f64>)> {
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .and_then(|(_, l)| l.strip_prefix(GRID_HEADER))
        .ok_or_else(|| Error::Parse(format!("missing `{GRID_HEADER}` header")))?;
    let grid = GridSpec::parse_axes(header.trim())?;
    let values = lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_value(l, i + 1))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != grid.len() {
        return Err(Error::Parse(format!(
            "grid has {} nodes but file lists {} values",
            grid.len(),
            values.len()
        )));
    }
    Ok((grid, values))
}

pub fn read_grid_values(path: &Path) -> Result<(GridSpec, Vec<f64>)> {
    parse_grid_values(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_round_trip() {
        let pts = vec![vec![1.0, -0.5], vec![0.1, 3e-12]];
        assert_eq!(parse_points_csv(&format_points_csv(&pts)).unwrap(), pts);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(matches!(parse_points_csv("1,2\n3\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_points_csv("1,x\n"), Err(Error::Parse(_))));
        assert_eq!(parse_points_csv("\n\n"), Err(Error::EmptySet));
    }

    #[test]
    fn grid_values_round_trip() {
        let g = GridSpec::cube(-1.0, 1.0, 3, 2).unwrap();
        let mut v: Vec<f64> = (0..9).map(|k| k as f64 * 0.25).collect();
        v[4] = f64::INFINITY;
        let text = format_grid_values(&g, &v);
        assert!(text.starts_with("# grid: "));
        let (g2, v2) = parse_grid_values(&text).unwrap();
        assert_eq!(g2, g);
        assert_eq!(v2, v);
    }

    #[test]
    fn grid_value_count_must_match() {
        assert!(parse_grid_values("# grid: 0,1,2\n1\n").is_err());
    }
}
