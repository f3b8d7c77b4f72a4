//! Deterministic output documents.
//!
//! The machine format is flat `key value` lines under `[section]` headers,
//! LF line endings. The table format is meant for terminals. Both render
//! numbers through [`format_number`] and undefined values as `undefined`.

use std::fmt::Write as _;

use crate::class_measures::MeasureValue;
use crate::discrepancy::{GeneratorConfig, Witness};
use crate::format::{emit_matrix, format_number};
use crate::measure::Measure;
use crate::ranking::{ConcordanceMatrix, Ranking, RankingKey};
use crate::report::{EntryValues, MeasureReport, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Table,
    #[default]
    Machine,
}

pub fn render_outcome(outcome: &Outcome) -> String {
    match outcome {
        Ok(MeasureValue::Defined(v)) => format_number(*v),
        Ok(MeasureValue::Undefined(cause)) => format!("undefined ({cause})"),
        Err(e) => format!("error {e}"),
    }
}

fn bool_str(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn chance_models(report: &MeasureReport) -> String {
    let names: Vec<&str> = report
        .entries
        .iter()
        .filter_map(|e| e.measure.chance_model(None).map(|m| m.name()))
        .collect();
    if names.is_empty() {
        "none".into()
    } else {
        names.join(",")
    }
}

fn gti_lines(report: &MeasureReport) -> Vec<(String, String)> {
    let mut lines = Vec::new();
    match &report.gti {
        None => {}
        Some(Err(e)) => {
            lines.push(("status".into(), "error".into()));
            lines.push(("message".into(), e.to_string()));
        }
        Some(Ok(fit)) => {
            lines.push(("status".into(), "fitted".into()));
            lines.push(("converged".into(), bool_str(fit.converged).into()));
            lines.push(("iterations".into(), fit.iterations.to_string()));
            lines.push(("residual".into(), format_number(fit.residual)));
            lines.push(("theta_overall".into(), format_number(fit.theta_overall)));
            for (label, theta) in report.labels.iter().zip(&fit.theta_class) {
                lines.push((format!("theta_class@{label}"), format_number(*theta)));
            }
        }
    }
    lines
}

fn metadata(report: &MeasureReport) -> Vec<(&'static str, String)> {
    vec![
        ("classifier", report.classifier.clone()),
        ("k", report.k().to_string()),
        ("labels", report.labels.join(" ")),
        ("n", format_number(report.n)),
        ("integral", bool_str(report.integral).into()),
        ("weighted", bool_str(report.weighted).into()),
        ("chance", chance_models(report)),
        (
            "scott_priors",
            match &report.scott_priors {
                Some(p) => p.iter().map(|v| format_number(*v)).collect::<Vec<_>>().join(" "),
                None => "test-set".into(),
            },
        ),
    ]
}

pub fn render_report(report: &MeasureReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Machine => report_machine(report),
        OutputFormat::Table => report_table(report),
    }
}

fn report_machine(report: &MeasureReport) -> String {
    let mut out = String::from("[report]\n");
    for (key, value) in metadata(report) {
        let _ = writeln!(out, "{key} {value}");
    }
    out.push_str("[overall]\n");
    for entry in &report.entries {
        if let EntryValues::Overall(o) = &entry.values {
            let _ = writeln!(out, "{} {}", entry.measure, render_outcome(o));
        }
    }
    let classes: Vec<usize> = report
        .entries
        .iter()
        .find_map(|e| match &e.values {
            EntryValues::PerClass(v) => Some(v.iter().map(|(c, _)| *c).collect()),
            _ => None,
        })
        .unwrap_or_default();
    for class in classes {
        let _ = writeln!(out, "[class {}]", report.labels[class]);
        for entry in &report.entries {
            if let Some(o) = report.outcome(entry.measure, Some(class)) {
                let _ = writeln!(out, "{} {}", entry.measure, render_outcome(o));
            }
        }
    }
    let gti = gti_lines(report);
    if !gti.is_empty() {
        out.push_str("[gti]\n");
        for (key, value) in gti {
            let _ = writeln!(out, "{key} {value}");
        }
    }
    out
}

fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c + 1 == row.len() {
                line.push_str(cell);
            } else {
                let _ = write!(line, "{cell:<width$}  ", width = widths[c]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn report_table(report: &MeasureReport) -> String {
    let mut out = String::new();
    let meta: Vec<Vec<String>> = metadata(report)
        .into_iter()
        .map(|(k, v)| vec![k.to_string(), v])
        .collect();
    out.push_str(&table(&meta));
    out.push('\n');
    let mut rows = vec![vec!["measure".to_string(), "class".into(), "value".into()]];
    for entry in &report.entries {
        match &entry.values {
            EntryValues::Overall(o) => rows.push(vec![entry.measure.id(), "-".into(), render_outcome(o)]),
            EntryValues::PerClass(values) => {
                for (c, o) in values {
                    rows.push(vec![entry.measure.id(), report.labels[*c].clone(), render_outcome(o)]);
                }
            }
        }
    }
    out.push_str(&table(&rows));
    let gti = gti_lines(report);
    if !gti.is_empty() {
        out.push_str("\nGTI fit\n");
        let rows: Vec<Vec<String>> = gti.into_iter().map(|(k, v)| vec![format!("  {k}"), v]).collect();
        out.push_str(&table(&rows));
    }
    out
}

/// Everything `rank` reports for one set of classifiers.
#[derive(Debug, Clone)]
pub struct RankDocument {
    pub classifiers: Vec<String>,
    pub labels: Vec<String>,
    pub tolerance: f64,
    pub rankings: Vec<Ranking>,
    pub identical: Vec<Vec<RankingKey>>,
    /// Concordance over keys whose rankings have no unrankable classifier.
    pub concordance: Option<ConcordanceMatrix>,
    pub excluded: Vec<RankingKey>,
}

pub fn render_rank(doc: &RankDocument, format: OutputFormat) -> String {
    let name = |k: &RankingKey| k.display(&doc.labels);
    let mut out = String::new();
    match format {
        OutputFormat::Machine => {
            out.push_str("[rank]\n");
            let _ = writeln!(out, "classifiers {}", doc.classifiers.join(" "));
            let _ = writeln!(out, "labels {}", doc.labels.join(" "));
            let _ = writeln!(out, "tie_tolerance {}", format_number(doc.tolerance));
            for r in &doc.rankings {
                let _ = writeln!(out, "[ranking {}]", name(&r.key));
                for (i, g) in r.groups.iter().enumerate() {
                    let _ = writeln!(out, "{} {}", i + 1, g.join(" "));
                }
                if !r.unrankable.is_empty() {
                    let _ = writeln!(out, "unrankable {}", r.unrankable.join(" "));
                }
            }
            out.push_str("[identical]\n");
            for (i, g) in doc.identical.iter().enumerate() {
                let names: Vec<String> = g.iter().map(name).collect();
                let _ = writeln!(out, "group{} {}", i + 1, names.join(" "));
            }
            out.push_str("[concordance]\n");
            if !doc.excluded.is_empty() {
                let names: Vec<String> = doc.excluded.iter().map(name).collect();
                let _ = writeln!(out, "excluded {}", names.join(" "));
            }
            match &doc.concordance {
                None => out.push_str("status unavailable\n"),
                Some(c) => {
                    let _ = writeln!(out, "classifiers {}", c.classifiers.join(" "));
                    for a in 0..c.len() {
                        for b in a + 1..c.len() {
                            let _ = writeln!(
                                out,
                                "tau_b({},{}) {}",
                                name(&c.keys[a]),
                                name(&c.keys[b]),
                                format_number(c.tau(a, b))
                            );
                        }
                    }
                }
            }
        }
        OutputFormat::Table => {
            let _ = writeln!(out, "Classifiers: {}", doc.classifiers.join(", "));
            let _ = writeln!(out, "Tie tolerance: {}\n", format_number(doc.tolerance));
            let rows: Vec<Vec<String>> = doc
                .rankings
                .iter()
                .map(|r| vec![name(&r.key), r.to_string()])
                .collect();
            out.push_str(&table(&rows));
            out.push_str("\nMeasures inducing identical rankings\n");
            for g in doc.identical.iter().filter(|g| g.len() > 1) {
                let names: Vec<String> = g.iter().map(name).collect();
                let _ = writeln!(out, "  {}", names.join(", "));
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct ProbeDocument {
    pub a: Measure,
    pub b: Measure,
    pub generator: GeneratorConfig,
    pub class_label: String,
    pub budget: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub witness: Option<Witness>,
}

pub fn render_probe(doc: &ProbeDocument, format: OutputFormat) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Machine => {
            out.push_str("[probe]\n");
            let _ = writeln!(out, "measure_a {}", doc.a);
            let _ = writeln!(out, "measure_b {}", doc.b);
            let _ = writeln!(out, "k {}", doc.generator.k);
            let _ = writeln!(out, "n {}", doc.generator.n);
            let _ = writeln!(out, "class {}", doc.class_label);
            let _ = writeln!(out, "budget {}", doc.budget);
            let _ = writeln!(out, "seed {}", doc.seed);
            let _ = writeln!(out, "tie_tolerance {}", format_number(doc.tolerance));
            match &doc.witness {
                None => out.push_str("result no witness\n"),
                Some(w) => {
                    out.push_str("result witness\n[witness]\n");
                    let _ = writeln!(out, "chunk {}", w.chunk);
                    let _ = writeln!(out, "sample {}", w.sample);
                    let _ = writeln!(out, "{}_first {}", doc.a, format_number(w.a_values.0));
                    let _ = writeln!(out, "{}_second {}", doc.a, format_number(w.a_values.1));
                    let _ = writeln!(out, "{}_first {}", doc.b, format_number(w.b_values.0));
                    let _ = writeln!(out, "{}_second {}", doc.b, format_number(w.b_values.1));
                    out.push_str("[matrix first]\n");
                    out.push_str(&emit_matrix(&w.first));
                    out.push_str("[matrix second]\n");
                    out.push_str(&emit_matrix(&w.second));
                }
            }
        }
        OutputFormat::Table => {
            let _ = writeln!(
                out,
                "Probe {} vs {} (k = {}, n = {}, class {}, budget {}, seed {})",
                doc.a, doc.b, doc.generator.k, doc.generator.n, doc.class_label, doc.budget, doc.seed
            );
            match &doc.witness {
                None => out.push_str("no witness\n"),
                Some(w) => {
                    let rows = vec![
                        vec!["".to_string(), "first".into(), "second".into()],
                        vec![doc.a.id(), format_number(w.a_values.0), format_number(w.a_values.1)],
                        vec![doc.b.id(), format_number(w.b_values.0), format_number(w.b_values.1)],
                    ];
                    out.push_str(&table(&rows));
                    out.push_str("\nfirst matrix\n");
                    out.push_str(&emit_matrix(&w.first));
                    out.push_str("\nsecond matrix\n");
                    out.push_str(&emit_matrix(&w.second));
                }
            }
        }
    }
    out
}
