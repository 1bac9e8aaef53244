//! Plain CSV and Matrix Market array files.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::mat::Mat;
use crate::error::{Error, Result};

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| Error::Parse { line, msg: format!("not a number: `{}`", tok.trim()) })?;
    if !v.is_finite() {
        return Err(Error::Parse { line, msg: format!("non-finite value `{}`", tok.trim()) });
    }
    Ok(v)
}

/// Parses CSV text: one row per line, comma separated, no header.
pub fn parse_csv(text: &str) -> Result<Mat> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line.split(',').map(|t| parse_value(t, k + 1)).collect::<Result<_>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(Error::Parse { line: k + 1, msg: format!("expected {c} columns, found {}", row.len()) })
            }
            _ => {}
        }
        data.extend(row);
        rows += 1;
    }
    let cols = cols.ok_or(Error::Parse { line: 0, msg: "empty matrix file".into() })?;
    Ok(Mat::from_vec(rows, cols, data))
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Mat> {
    parse_csv(&fs::read_to_string(path)?)
}

pub fn to_csv(m: &Mat) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:.16e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn save_csv(m: &Mat, path: impl AsRef<Path>) -> Result<()> {
    fs::File::create(path)?.write_all(to_csv(m).as_bytes())?;
    Ok(())
}

/// Parses `%%MatrixMarket matrix array real general` text (column-major values).
pub fn parse_matrix_market(text: &str) -> Result<Mat> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty file".into() })?;
    let fields: Vec<String> = header.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[2] != "array" {
        return Err(Error::Parse { line: 1, msg: "expected `%%MatrixMarket matrix array real general`".into() });
    }
    if fields[3] != "real" || fields[4] != "general" {
        return Err(Error::Parse { line: 1, msg: format!("unsupported field/symmetry `{} {}`", fields[3], fields[4]) });
    }
    let mut shape = None;
    let mut values = Vec::new();
    for (k, line) in lines {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if shape.is_none() {
            let dims: Vec<usize> = t
                .split_whitespace()
                .map(|d| d.parse().map_err(|_| Error::Parse { line: k + 1, msg: format!("bad size line `{t}`") }))
                .collect::<Result<_>>()?;
            if dims.len() != 2 {
                return Err(Error::Parse { line: k + 1, msg: format!("bad size line `{t}`") });
            }
            shape = Some((dims[0], dims[1], k + 1));
            continue;
        }
        for tok in t.split_whitespace() {
            values.push(parse_value(tok, k + 1)?);
        }
    }
    let (r, c, line) = shape.ok_or(Error::Parse { line: 1, msg: "missing size line".into() })?;
    if values.len() != r * c {
        return Err(Error::Parse { line, msg: format!("expected {} values, found {}", r * c, values.len()) });
    }
    Ok(Mat::from_fn(r, c, |i, j| values[j * r + i]))
}

pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<Mat> {
    parse_matrix_market(&fs::read_to_string(path)?)
}

pub fn to_matrix_market(m: &Mat) -> String {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    out.push_str(&format!("{} {}\n", m.rows(), m.cols()));
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            out.push_str(&format!("{:.16e}\n", m[(i, j)]));
        }
    }
    out
}

pub fn save_matrix_market(m: &Mat, path: impl AsRef<Path>) -> Result<()> {
    fs::File::create(path)?.write_all(to_matrix_market(m).as_bytes())?;
    Ok(())
}

/// Loads by extension: `.mtx` as Matrix Market, anything else as CSV.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<Mat> {
    let p = path.as_ref();
    if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("mtx")) {
        load_matrix_market(p)
    } else {
        load_csv(p)
    }
}
