//! CSV / JSON emission of result tables and the matching loaders.
//!
//! Floats are written with 17 significant digits so a load reproduces them
//! bit for bit. Missing values are empty CSV cells and JSON `null`.

use std::fs;
use std::path::Path;

use serde_json::Value;

use super::config::OutputFormat;
use crate::error::{Error, Result};
use crate::perturb::PerturbReport;

/// One cell of an emitted table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Count(usize),
    Real(f64),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Count(c) => c.to_string(),
            Cell::Real(x) => format!("{x:.16e}"),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Text(s) => Value::String(s.clone()).to_string(),
            Cell::Count(c) => c.to_string(),
            Cell::Real(x) if x.is_finite() => format!("{x:.16e}"),
            // JSON has no infinities; keep them readable as strings
            Cell::Real(x) => Value::String(x.to_string()).to_string(),
            Cell::Missing => "null".into(),
        }
    }
}

fn opt_real(v: Option<f64>) -> Cell {
    v.map_or(Cell::Missing, Cell::Real)
}

fn opt_count(v: Option<usize>) -> Cell {
    v.map_or(Cell::Missing, Cell::Count)
}

/// A row type with a fixed column schema.
pub trait TableRow: Sized {
    const HEADER: &'static [&'static str];

    fn cells(&self) -> Vec<Cell>;

    /// Rebuilds a row from its textual cells, `None` marking a missing value.
    fn from_record(record: &[Option<String>]) -> Result<Self>;
}

/// A row of the randomized-solver benchmarks. Errors use the ∞-norm relative
/// to the full-SVD reference. In the `rtls` experiment the `ttls`/`rttls`
/// columns hold the untruncated classical and randomized solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub problem: String,
    pub m: usize,
    pub n: usize,
    /// relative noise level added to the problem
    pub noise: f64,
    pub k: usize,
    pub time_ttls: f64,
    pub time_rttls: f64,
    pub time_arttls: Option<f64>,
    pub err_rttls: f64,
    pub err_arttls: Option<f64>,
    /// adaptive tolerance `ε`
    pub eps: Option<f64>,
    /// size of the adaptive basis
    pub basis_j: Option<usize>,
}

fn field<'a>(record: &'a [Option<String>], idx: usize, name: &str) -> Result<Option<&'a str>> {
    record
        .get(idx)
        .map(|c| c.as_deref())
        .ok_or_else(|| Error::Parse { line: 0, msg: format!("missing column `{name}`") })
}

fn parse_cell<T: std::str::FromStr>(record: &[Option<String>], idx: usize, name: &str) -> Result<Option<T>> {
    match field(record, idx, name)? {
        None => Ok(None),
        Some(s) => s.parse().map(Some).map_err(|_| Error::Parse { line: 0, msg: format!("bad `{name}` value `{s}`") }),
    }
}

fn required<T: std::str::FromStr>(record: &[Option<String>], idx: usize, name: &str) -> Result<T> {
    parse_cell(record, idx, name)?.ok_or_else(|| Error::Parse { line: 0, msg: format!("`{name}` is empty") })
}

impl TableRow for BenchRow {
    const HEADER: &'static [&'static str] = &[
        "problem",
        "m",
        "n",
        "noise",
        "k",
        "time_ttls",
        "time_rttls",
        "time_arttls",
        "err_rttls_inf",
        "err_arttls_inf",
        "eps",
        "basis_j",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.problem.clone()),
            Cell::Count(self.m),
            Cell::Count(self.n),
            Cell::Real(self.noise),
            Cell::Count(self.k),
            Cell::Real(self.time_ttls),
            Cell::Real(self.time_rttls),
            opt_real(self.time_arttls),
            Cell::Real(self.err_rttls),
            opt_real(self.err_arttls),
            opt_real(self.eps),
            opt_count(self.basis_j),
        ]
    }

    fn from_record(r: &[Option<String>]) -> Result<Self> {
        let h = Self::HEADER;
        Ok(BenchRow {
            problem: field(r, 0, h[0])?.unwrap_or_default().to_string(),
            m: required(r, 1, h[1])?,
            n: required(r, 2, h[2])?,
            noise: required(r, 3, h[3])?,
            k: required(r, 4, h[4])?,
            time_ttls: required(r, 5, h[5])?,
            time_rttls: required(r, 6, h[6])?,
            time_arttls: parse_cell(r, 7, h[7])?,
            err_rttls: required(r, 8, h[8])?,
            err_arttls: parse_cell(r, 9, h[9])?,
            eps: parse_cell(r, 10, h[10])?,
            basis_j: parse_cell(r, 11, h[11])?,
        })
    }
}

impl TableRow for PerturbReport {
    const HEADER: &'static [&'static str] = &[
        "delta_ratio",
        "observed_rel_err",
        "k_zlwq",
        "k_bg",
        "k_lj",
        "bound_thm",
        "bound_cor",
        "bound_rem",
        "cond_eff",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Real(self.delta_ratio),
            opt_real(self.observed_rel_err),
            opt_real(self.k_zlwq),
            Cell::Real(self.k_bg),
            opt_real(self.k_lj),
            Cell::Real(self.bound_thm),
            Cell::Real(self.bound_cor),
            Cell::Real(self.bound_rem),
            Cell::Real(self.cond_eff),
        ]
    }

    fn from_record(r: &[Option<String>]) -> Result<Self> {
        let h = Self::HEADER;
        Ok(PerturbReport {
            delta_ratio: required(r, 0, h[0])?,
            observed_rel_err: parse_cell(r, 1, h[1])?,
            k_zlwq: parse_cell(r, 2, h[2])?,
            k_bg: required(r, 3, h[3])?,
            k_lj: parse_cell(r, 4, h[4])?,
            bound_thm: required(r, 5, h[5])?,
            bound_cor: required(r, 6, h[6])?,
            bound_rem: required(r, 7, h[7])?,
            cond_eff: required(r, 8, h[8])?,
        })
    }
}

/// Renders a table; an empty table is just the CSV header (or `[]`).
pub fn render<R: TableRow>(rows: &[R], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = R::HEADER.join(",");
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = row.cells().iter().map(Cell::csv).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let objects: Vec<String> = rows
                .iter()
                .map(|row| {
                    let fields: Vec<String> = R::HEADER
                        .iter()
                        .zip(row.cells())
                        .map(|(name, cell)| format!("\"{name}\": {}", cell.json()))
                        .collect();
                    format!("  {{{}}}", fields.join(", "))
                })
                .collect();
            if objects.is_empty() {
                "[]\n".into()
            } else {
                format!("[\n{}\n]\n", objects.join(",\n"))
            }
        }
    }
}

/// Writes a table to `path`.
pub fn emit<R: TableRow>(rows: &[R], path: impl AsRef<Path>, format: OutputFormat) -> Result<()> {
    fs::write(path, render(rows, format))?;
    Ok(())
}

/// Parses text produced by [`render`].
pub fn parse_table<R: TableRow>(text: &str, format: OutputFormat) -> Result<Vec<R>> {
    match format {
        OutputFormat::Csv => {
            let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
            let header = lines.next().map(|(_, l)| l.trim()).unwrap_or("");
            if header != R::HEADER.join(",") {
                return Err(Error::Parse { line: 1, msg: format!("unexpected header `{header}`") });
            }
            lines
                .map(|(idx, line)| {
                    let record: Vec<Option<String>> = line
                        .split(',')
                        .map(|c| Some(c.trim().to_string()).filter(|c| !c.is_empty()))
                        .collect();
                    if record.len() != R::HEADER.len() {
                        return Err(Error::Parse {
                            line: idx + 1,
                            msg: format!("expected {} columns, found {}", R::HEADER.len(), record.len()),
                        });
                    }
                    R::from_record(&record).map_err(|e| relabel(e, idx + 1))
                })
                .collect()
        }
        OutputFormat::Json => {
            let value: Value =
                serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
            let items = value.as_array().ok_or(Error::Parse { line: 1, msg: "expected a JSON array".into() })?;
            items
                .iter()
                .map(|item| {
                    let record: Vec<Option<String>> =
                        R::HEADER.iter().map(|name| item.get(name).and_then(json_text)).collect();
                    R::from_record(&record)
                })
                .collect()
        }
    }
}

fn json_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => None,
        Value::String(s) => Some(s.clone()),
        Value::Number(num) => match num.as_u64() {
            Some(u) => Some(u.to_string()),
            None => num.as_f64().map(|x| x.to_string()),
        },
        other => Some(other.to_string()),
    }
}

fn relabel(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { line: 0, msg } => Error::Parse { line, msg },
        other => other,
    }
}

/// Loads a table written by [`emit`]; the format follows the extension
/// (`.json`, anything else is CSV).
pub fn load_table<R: TableRow>(path: impl AsRef<Path>) -> Result<Vec<R>> {
    let path = path.as_ref();
    let format = if path.extension().is_some_and(|e| e == "json") { OutputFormat::Json } else { OutputFormat::Csv };
    parse_table(&fs::read_to_string(path)?, format)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> PerturbReport {
        PerturbReport {
            delta_ratio: 1e-10 / 3.0,
            observed_rel_err: Some(2.6233e-11),
            k_zlwq: None,
            k_bg: 15.815,
            k_lj: Some(15.815000000000001),
            bound_thm: 0.1 + 0.2,
            bound_cor: f64::MIN_POSITIVE,
            bound_rem: 1e300,
            cond_eff: 7.0,
        }
    }

    fn bench_row() -> BenchRow {
        BenchRow {
            problem: "shaw".into(),
            m: 100,
            n: 100,
            noise: 1e-3,
            k: 7,
            time_ttls: 0.5,
            time_rttls: 0.01,
            time_arttls: None,
            err_rttls: 1.0 / 7.0,
            err_arttls: Some(2.0 / 3.0),
            eps: None,
            basis_j: Some(7),
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(render::<PerturbReport>(&[], OutputFormat::Csv), PerturbReport::HEADER.join(",") + "\n");
        assert_eq!(render::<BenchRow>(&[], OutputFormat::Json), "[]\n");
    }

    #[test]
    fn one_report_gives_nine_columns() {
        let text = render(&[report()], OutputFormat::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), 9);
        assert_eq!(lines[1].split(',').count(), 9);
        assert!(lines[1].split(',').nth(2).unwrap().is_empty());
    }

    #[test]
    fn round_trips_are_bit_exact() {
        for format in [OutputFormat::Csv, OutputFormat::Json] {
            let back: Vec<PerturbReport> = parse_table(&render(&[report()], format), format).unwrap();
            assert_eq!(back, vec![report()]);
            let back: Vec<BenchRow> = parse_table(&render(&[bench_row()], format), format).unwrap();
            assert_eq!(back, vec![bench_row()]);
        }
    }

    #[test]
    fn seventeen_significant_digits() {
        let text = render(&[report()], OutputFormat::Csv);
        assert!(text.contains("3.0000000000000004e-1"), "{text}");
    }

    #[test]
    fn bad_header_is_rejected() {
        let err = parse_table::<BenchRow>("a,b\n", OutputFormat::Csv).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
