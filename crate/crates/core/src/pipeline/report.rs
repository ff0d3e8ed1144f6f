//! Table-shaped result reports.

use serde::{Deserialize, Serialize};

use super::task::GroupMetrics;
use crate::models::Metrics;

pub const CLASSIFIERS: [&str; 3] = ["LR", "RF", "LR+RF"];
pub const MEASURES: [&str; 3] = ["accuracy", "f1", "ce"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "text" | "txt" => Ok(ReportFormat::Text),
            _ => Err(format!("unknown format {s:?} (expected csv or text)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub name: String,
    /// LR, RF, LR+RF.
    pub cells: [Metrics; 3],
}

impl ReportRow {
    pub fn new(name: impl Into<String>, lr: &Metrics, rf: &Metrics, ensemble: &Metrics) -> Self {
        ReportRow {
            name: name.into(),
            cells: [lr.clone(), rf.clone(), ensemble.clone()],
        }
    }

    pub fn from_group(g: &GroupMetrics) -> Self {
        Self::new(g.name.clone(), &g.lr, &g.rf, &g.ensemble)
    }

    fn values(&self) -> Vec<String> {
        self.cells
            .iter()
            .flat_map(|m| [m.accuracy, m.f1, m.cross_entropy])
            .map(|v| format!("{v:.6}"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportTable {
    pub rows: Vec<ReportRow>,
}

fn header() -> Vec<String> {
    let mut h = vec!["row".to_string()];
    for c in CLASSIFIERS {
        for m in MEASURES {
            h.push(format!("{c}_{m}"));
        }
    }
    h
}

/// Renders `table`; output depends only on the table contents.
pub fn emit_report(table: &ReportTable, format: ReportFormat) -> Vec<u8> {
    let mut lines: Vec<Vec<String>> = vec![header()];
    for r in &table.rows {
        let mut line = vec![r.name.clone()];
        line.extend(r.values());
        lines.push(line);
    }
    match format {
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::CRLF)
                .from_writer(Vec::new());
            for l in &lines {
                w.write_record(l).expect("in-memory write");
            }
            w.into_inner().expect("in-memory flush")
        }
        ReportFormat::Text => {
            let cols = lines[0].len();
            let widths: Vec<usize> = (0..cols)
                .map(|c| {
                    lines
                        .iter()
                        .map(|l| l[c].chars().count())
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let mut out = String::new();
            for l in &lines {
                let cells: Vec<String> = l
                    .iter()
                    .enumerate()
                    .map(|(c, v)| {
                        if c == 0 {
                            format!("{v:<w$}", w = widths[c])
                        } else {
                            format!("{v:>w$}", w = widths[c])
                        }
                    })
                    .collect();
                out.push_str(cells.join("  ").trim_end());
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}
