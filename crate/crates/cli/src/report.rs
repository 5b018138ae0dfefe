use std::fmt::Write as _;

use hcm_core::{Corrector, TracePoint};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

/// One table cell. Non-finite numbers are stored as text so JSON round-trips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn num(v: f64) -> Self {
        if v.is_finite() {
            Cell::Num(v)
        } else {
            Cell::Text(v.to_string())
        }
    }

    pub fn int(v: usize) -> Self {
        Cell::Int(v as i64)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format_number(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Seven significant digits, switching to scientific notation for very
/// small or very large magnitudes.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0.000000".into();
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..7).contains(&mag) {
        format!("{:.*}", (6 - mag) as usize, v)
    } else {
        format!("{v:.6e}")
    }
}

/// Per-method result of one case, as listed in the comparison tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub case: String,
    pub method: Corrector,
    /// Root in published units.
    pub solution: [f64; 3],
    pub converged: bool,
    pub iterations: usize,
    /// Median tracking time over the repeats.
    pub runtime_seconds: f64,
    pub final_residual_norm: f64,
    /// `(1 - t_ostrowski / t_newton) * 100`, set on both records of a pair.
    pub reduction_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub label: String,
    pub points: Vec<TracePoint>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub notes: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub records: Vec<BenchRecord>,
    pub traces: Vec<TraceRecord>,
    /// Divergences and criterion violations; non-empty means exit code 1.
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Serializes a report. JSON carries every field; CSV and markdown carry the table.
pub fn emit(report: &Report, format: Format) -> CliResult<String> {
    match format {
        Format::Json => serde_json::to_string_pretty(report).map_err(|e| CliError::Output(e.to_string())),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let out = |e: csv::Error| CliError::Output(e.to_string());
            w.write_record(&report.columns).map_err(out)?;
            for row in &report.rows {
                w.write_record(row.iter().map(Cell::render)).map_err(out)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
        }
        Format::Markdown => Ok(markdown(report)),
    }
}

fn markdown(report: &Report) -> String {
    let escape = |s: String| s.replace('|', "\\|");
    let mut out = String::new();
    let _ = writeln!(out, "## {}\n", report.title);
    for note in &report.notes {
        let _ = writeln!(out, "{note}  ");
    }
    if !report.notes.is_empty() {
        out.push('\n');
    }
    let _ = writeln!(out, "| {} |", report.columns.iter().cloned().map(escape).collect::<Vec<_>>().join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(report.columns.len()));
    for row in &report.rows {
        let cells: Vec<String> = row.iter().map(|c| escape(c.render())).collect();
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    for failure in &report.failures {
        let _ = writeln!(out, "\nFAILED: {failure}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("t", &["a", "b, c", "d"]);
        r.push_row(vec![Cell::int(3), Cell::num(1.5), Cell::text("x \"y\"")]);
        r.push_row(vec![Cell::num(f64::NAN), Cell::num(-2e-9), Cell::text("p|q")]);
        r.records.push(BenchRecord {
            case: "forward-1".into(),
            method: Corrector::Newton,
            solution: [1.0, 2.0, 3.0],
            converged: true,
            iterations: 5,
            runtime_seconds: 0.25,
            final_residual_norm: 1e-12,
            reduction_percent: Some(50.0),
        });
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back: Report = serde_json::from_str(&emit(&r, Format::Json).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_has_header_and_quotes() {
        let text = emit(&sample(), Format::Csv).unwrap();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), ["a", "b, c", "d"]);
        let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(&rows[0][2], "x \"y\"");
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn markdown_layout() {
        let text = emit(&sample(), Format::Markdown).unwrap();
        let table: Vec<&str> = text.lines().filter(|l| l.starts_with('|')).collect();
        assert_eq!(table.len(), 4);
        assert!(table[3].contains("p\\|q"));
    }

    #[test]
    fn numbers_keep_seven_significant_digits() {
        assert_eq!(format_number(288.434948822922), "288.4349");
        assert_eq!(format_number(1.36504612804), "1.365046");
        assert_eq!(format_number(-0.0296571), "-0.02965710");
        assert_eq!(format_number(2.5e-12), "2.500000e-12");
        assert_eq!(format_number(123456789.0), "1.234568e8");
        assert_eq!(format_number(0.0), "0.000000");
    }
}
