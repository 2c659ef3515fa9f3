use std::fmt::Write as _;

use ltbe_core::{FixpointReport, StateRel};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Convergence information printed after a matrix.
pub struct Footer {
    pub iterations: usize,
    pub converged: bool,
    pub final_gap: f64,
}

impl From<&FixpointReport> for Footer {
    fn from(r: &FixpointReport) -> Self {
        Footer { iterations: r.iterations, converged: r.converged, final_gap: r.final_gap }
    }
}

fn gap_text(gap: f64) -> String {
    if gap.is_infinite() {
        "inf".to_string()
    } else {
        format!("{gap:e}")
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv(rel: &StateRel, footer: Option<&Footer>, extra: &[(&str, Value)]) -> String {
    let mut out = String::from("state");
    for c in rel.cols() {
        write!(out, ",{}", csv_cell(c.as_str())).unwrap();
    }
    out.push('\n');
    for (i, r) in rel.rows().iter().enumerate() {
        out.push_str(&csv_cell(r.as_str()));
        for j in 0..rel.cols().len() {
            write!(out, ",{}", rel.at(i, j)).unwrap();
        }
        out.push('\n');
    }
    for (k, v) in extra {
        writeln!(out, "# {k}={v}").unwrap();
    }
    if let Some(f) = footer {
        writeln!(out, "# iterations={}", f.iterations).unwrap();
        writeln!(out, "# converged={}", f.converged).unwrap();
        writeln!(out, "# final_gap={}", gap_text(f.final_gap)).unwrap();
    }
    out
}

pub fn json(rel: &StateRel, footer: Option<&Footer>, extra: &[(&str, Value)]) -> String {
    let records: Vec<Value> = rel
        .entries()
        .map(|(r, c, v)| json!({ "row": r.as_str(), "col": c.as_str(), "value": v.to_string() }))
        .collect();
    let mut doc = json!({ "kind": rel.kind().name(), "records": records });
    for (k, v) in extra {
        doc[*k] = v.clone();
    }
    if let Some(f) = footer {
        doc["iterations"] = json!(f.iterations);
        doc["converged"] = json!(f.converged);
        doc["final_gap"] = json!(gap_text(f.final_gap));
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("JSON values always serialise");
    text.push('\n');
    text
}

pub fn render(format: Format, rel: &StateRel, footer: Option<&Footer>, extra: &[(&str, Value)]) -> String {
    match format {
        Format::Csv => csv(rel, footer, extra),
        Format::Json => json(rel, footer, extra),
    }
}
