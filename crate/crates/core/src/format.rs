//! Text formats: matrix files, label-pair files, priors files, and the
//! fixed-precision number rendering used by every output document.
//!
//! Matrix file:
//!
//! ```text
//! 3 cat dog bird
//! orientation estimated-by-true
//! 30 2 3
//! 4 25 1
//! 1 3 31
//! ```
//!
//! The first line holds `k` and the labels. The `orientation` line is optional
//! and defaults to `estimated-by-true` (rows are estimated classes); files
//! written as `true-by-estimated` are transposed on read. Blank lines and
//! lines starting with `#` are ignored.

use std::collections::HashMap;

use thiserror::Error;

use crate::confusion::{ConfusionMatrix, LabeledDataset, WeightMatrix};
use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Data(#[from] Error),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> InputError {
    InputError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (idx, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(idx),
            (true, Some(s)) => {
                out.push((s, &line[s..idx]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (line[..byte].chars().count() + 1, tok))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    EstimatedByTrue,
    TrueByEstimated,
}

struct Grid {
    labels: Vec<String>,
    cells: Vec<f64>,
}

fn parse_grid(text: &str) -> Result<Grid, InputError> {
    let mut lines = content_lines(text).peekable();
    let (line_no, header) = lines.next().ok_or_else(|| syntax(1, 1, "empty matrix file"))?;
    let head = tokens(header);
    let (col, k_tok) = head[0];
    let k: usize = k_tok
        .parse()
        .map_err(|_| syntax(line_no, col, format!("expected class count, found `{k_tok}`")))?;
    if head.len() - 1 != k {
        return Err(syntax(
            line_no,
            col,
            format!("header declares {k} classes but lists {} labels", head.len() - 1),
        ));
    }
    let labels: Vec<String> = head[1..].iter().map(|(_, t)| t.to_string()).collect();

    let mut orientation = Orientation::EstimatedByTrue;
    if let Some(&(line_no, line)) = lines.peek() {
        let toks = tokens(line);
        if toks[0].1 == "orientation" {
            lines.next();
            orientation = match toks.get(1).map(|t| t.1) {
                Some("estimated-by-true") if toks.len() == 2 => Orientation::EstimatedByTrue,
                Some("true-by-estimated") if toks.len() == 2 => Orientation::TrueByEstimated,
                _ => {
                    return Err(syntax(
                        line_no,
                        toks.get(1).map_or(toks[0].0, |t| t.0),
                        "orientation must be `estimated-by-true` or `true-by-estimated`",
                    ))
                }
            };
        }
    }

    let mut cells = Vec::with_capacity(k * k);
    let mut last_line = line_no;
    for row in 0..k {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| syntax(last_line + 1, 1, format!("missing row {} of {k}", row + 1)))?;
        last_line = line_no;
        let toks = tokens(line);
        if toks.len() != k {
            return Err(syntax(
                line_no,
                toks.get(k).map_or(1, |t| t.0),
                format!("expected {k} values, found {}", toks.len()),
            ));
        }
        for (col, tok) in toks {
            let v: f64 = tok
                .parse()
                .map_err(|_| syntax(line_no, col, format!("`{tok}` is not a number")))?;
            if !v.is_finite() || v < 0.0 {
                return Err(syntax(line_no, col, format!("cell value {tok} must be finite and non-negative")));
            }
            cells.push(v);
        }
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(syntax(line_no, 1, format!("unexpected content after {k} rows")));
    }
    if orientation == Orientation::TrueByEstimated {
        cells = (0..k * k).map(|idx| cells[(idx % k) * k + idx / k]).collect();
    }
    Ok(Grid { labels, cells })
}

pub fn parse_matrix(text: &str) -> Result<ConfusionMatrix, InputError> {
    let grid = parse_grid(text)?;
    Ok(ConfusionMatrix::new(grid.labels, grid.cells)?)
}

/// Parses a weight matrix in the matrix format and aligns it to `labels`.
pub fn parse_weights(text: &str, labels: &[String]) -> Result<WeightMatrix, InputError> {
    let grid = parse_grid(text)?;
    let k = labels.len();
    if grid.labels.len() != k {
        return Err(Error::Dimension {
            expected: k,
            found: grid.labels.len(),
        }
        .into());
    }
    let pos: HashMap<&str, usize> = grid
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let order = labels
        .iter()
        .map(|l| pos.get(l.as_str()).copied().ok_or_else(|| Error::UnknownLabel(l.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let gk = grid.labels.len();
    let weights = (0..k * k)
        .map(|idx| grid.cells[order[idx / k] * gk + order[idx % k]])
        .collect();
    Ok(WeightMatrix::new(k, weights)?)
}

/// Writes a matrix in the matrix text format. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn emit_matrix(m: &ConfusionMatrix) -> String {
    let mut out = format!("{} {}\norientation estimated-by-true\n", m.k(), m.labels().join(" "));
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// Parses `true,estimated` pairs, with an optional `true,estimated` header.
pub fn parse_label_pairs(text: &str) -> Result<LabeledDataset, InputError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut pairs = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            syntax(line, 1, e.to_string())
        })?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(syntax(line, 1, format!("expected 2 fields, found {}", record.len())));
        }
        if idx == 0
            && record[0].eq_ignore_ascii_case("true")
            && record[1].eq_ignore_ascii_case("estimated")
        {
            continue;
        }
        for (field, col) in [(&record[0], 1), (&record[1], 2)] {
            if field.is_empty() {
                return Err(syntax(line, col, "empty label"));
            }
            if field.chars().any(char::is_whitespace) {
                return Err(syntax(line, col, format!("label `{field}` contains whitespace")));
            }
        }
        pairs.push((record[0].to_string(), record[1].to_string()));
    }
    Ok(LabeledDataset { pairs, universe: None })
}

/// Parses `label proportion` lines into a vector aligned with `labels`.
pub fn parse_priors(text: &str, labels: &[String]) -> Result<Vec<f64>, InputError> {
    let mut priors: Vec<Option<f64>> = vec![None; labels.len()];
    for (line_no, line) in content_lines(text) {
        let toks = tokens(line);
        if toks.len() != 2 {
            return Err(syntax(line_no, 1, "expected `label proportion`"));
        }
        let (col, value) = toks[1];
        let p: f64 = value
            .parse()
            .map_err(|_| syntax(line_no, col, format!("`{value}` is not a number")))?;
        let label = toks[0].1;
        let idx = labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        if priors[idx].replace(p).is_some() {
            return Err(syntax(line_no, 1, format!("duplicate prior for `{label}`")));
        }
    }
    labels
        .iter()
        .zip(priors)
        .map(|(l, p)| p.ok_or_else(|| Error::InvalidPriors(format!("no prior for `{l}`")).into()))
        .collect()
}

/// Renders a number with 12 significant digits, keeping trailing zeros.
/// Magnitudes outside `[1e-5, 1e12)` use exponent notation.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0.00000000000".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.11e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..12).contains(&exp) {
        format!("{:.*}", (11 - exp) as usize, v)
    } else {
        sci
    }
}
