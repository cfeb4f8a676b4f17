//! Dataset readers (svmlight, CSV) and the `cascade-v1` model format.
//!
//! Labels are read as `-1`, `+1`/`1`, or `0` (mapped to `-1`).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use selftrain_core::{
    FeatureVector, Halfspace, HalfspaceList, Label, LabeledExample, SampleSet, ThresholdedHalfspace,
};

use crate::{Error, Result};

pub const MODEL_VERSION: &str = "cascade-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Svmlight,
    Csv,
}

impl DataFormat {
    /// `.csv` files are CSV, anything else is svmlight.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => DataFormat::Csv,
            _ => DataFormat::Svmlight,
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_label(token: &str) -> Option<Label> {
    let v: f64 = token.parse().ok()?;
    if v == 1.0 {
        Some(Label::Positive)
    } else if v == -1.0 || v == 0.0 {
        Some(Label::Negative)
    } else {
        None
    }
}

/// Reads a dataset, picking the format from the extension.
pub fn read_dataset(path: &Path, dim: Option<usize>) -> Result<SampleSet> {
    match DataFormat::from_path(path) {
        DataFormat::Svmlight => read_svmlight(path, dim),
        DataFormat::Csv => {
            let s = read_csv(path)?;
            match dim {
                Some(d) if d != s.dim() && !s.is_empty() => Err(selftrain_core::Error::DimensionMismatch {
                    expected: d,
                    found: s.dim(),
                }
                .into()),
                _ => Ok(s),
            }
        }
    }
}

pub fn read_svmlight(path: &Path, dim: Option<usize>) -> Result<SampleSet> {
    parse_svmlight(&read_text(path)?, dim)
}

/// Line number, label and the (index, value) pairs of one svmlight row.
type SparseRow = (usize, Label, Vec<(usize, f64)>);

/// Parses `label idx:val ...` lines with 1-based indices into dense rows.
///
/// Without a declared dimension, `d` is the largest index seen. Blank lines
/// and `#` comments are skipped; `qid:` tokens are ignored.
pub fn parse_svmlight(text: &str, dim: Option<usize>) -> Result<SampleSet> {
    let mut rows: Vec<SparseRow> = Vec::new();
    let mut max_index = 0usize;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_token = tokens.next().expect("non-empty line has a token");
        let label = parse_label(label_token).ok_or_else(|| {
            Error::parse(
                line_no,
                format!("label {label_token:?} is not one of -1, 0, +1, 1"),
            )
        })?;

        let mut feats = Vec::new();
        for tok in tokens {
            if tok.starts_with("qid:") {
                continue;
            }
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| Error::parse(line_no, format!("expected index:value, found {tok:?}")))?;
            let idx: i64 = idx
                .parse()
                .map_err(|_| Error::parse(line_no, format!("index {idx:?} is not an integer")))?;
            if idx <= 0 {
                return Err(Error::parse(line_no, format!("index {idx} must be 1 or greater")));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| Error::parse(line_no, format!("value {val:?} is not a number")))?;
            if !val.is_finite() {
                return Err(Error::parse(line_no, format!("value {val} is not finite")));
            }
            let idx = idx as usize;
            if feats.iter().any(|&(i, _)| i == idx) {
                return Err(Error::parse(line_no, format!("index {idx} appears twice")));
            }
            max_index = max_index.max(idx);
            feats.push((idx, val));
        }
        rows.push((line_no, label, feats));
    }

    let d = match dim {
        Some(d) => d,
        None => max_index,
    };
    if rows.is_empty() {
        return Ok(SampleSet::new(d));
    }
    if d == 0 {
        return Err(Error::parse(rows[0].0, "dataset has no features"));
    }

    let mut set = SampleSet::new(d);
    for (line_no, label, feats) in rows {
        let mut dense = vec![0.0; d];
        for (idx, val) in feats {
            if idx > d {
                return Err(Error::parse(
                    line_no,
                    format!("index {idx} exceeds declared dimension {d}"),
                ));
            }
            dense[idx - 1] = val;
        }
        set.push(LabeledExample::new(FeatureVector::new(dense)?, label))?;
    }
    Ok(set)
}

/// Writes svmlight rows. Zero coordinates are omitted except the last one,
/// which is always written so the dimension survives a round trip.
pub fn format_svmlight(set: &SampleSet) -> String {
    let mut out = String::new();
    for ex in set {
        out.push_str(if ex.y == Label::Positive { "+1" } else { "-1" });
        let coords = ex.x.as_slice();
        for (i, v) in coords.iter().enumerate() {
            if *v != 0.0 || i + 1 == coords.len() {
                write!(out, " {}:{}", i + 1, v).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_svmlight(path: &Path, set: &SampleSet) -> Result<()> {
    fs::write(path, format_svmlight(set)).map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<SampleSet> {
    parse_csv(&read_text(path)?)
}

/// Parses numeric CSV whose last column is the label. A first row with any
/// non-numeric cell is treated as a header.
pub fn parse_csv(text: &str) -> Result<SampleSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut width: Option<usize> = None;
    let mut set: Option<SampleSet> = None;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::parse(row, e.to_string()))?;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if row == 1 && record.iter().any(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        match width {
            None => {
                if record.len() < 2 {
                    return Err(Error::parse(row, "need at least one feature and a label"));
                }
                width = Some(record.len());
            }
            Some(w) if w != record.len() => {
                return Err(Error::parse(
                    row,
                    format!("expected {w} columns, found {}", record.len()),
                ));
            }
            Some(_) => {}
        }

        let n_feat = record.len() - 1;
        let mut coords = Vec::with_capacity(n_feat);
        for (c, cell) in record.iter().take(n_feat).enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Cell {
                row,
                column: c + 1,
                message: format!("{cell:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Cell {
                    row,
                    column: c + 1,
                    message: format!("{v} is not finite"),
                });
            }
            coords.push(v);
        }
        let cell = record.get(n_feat).unwrap_or("");
        let label = parse_label(cell).ok_or_else(|| Error::Cell {
            row,
            column: n_feat + 1,
            message: format!("label {cell:?} is not one of -1, 0, +1, 1"),
        })?;
        set.get_or_insert_with(|| SampleSet::new(n_feat))
            .push(LabeledExample::new(FeatureVector::new(coords)?, label))?;
    }
    Ok(set.unwrap_or_else(|| SampleSet::new(0)))
}

/// Serializes a list in the `cascade-v1` text format, reals with 17
/// significant digits.
pub fn format_model(list: &HalfspaceList) -> String {
    let mut out = format!("{MODEL_VERSION} d={} m={}\n", list.dim(), list.len());
    for pair in list.pairs() {
        writeln!(out, "gamma={:.16e}", pair.gamma()).unwrap();
        let coords: Vec<String> = pair
            .halfspace
            .weights()
            .as_slice()
            .iter()
            .map(|c| format!("{c:.16e}"))
            .collect();
        out.push_str(&coords.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_model(path: &Path, list: &HalfspaceList) -> Result<()> {
    fs::write(path, format_model(list)).map_err(|e| Error::io(path, e))
}

pub fn read_model(path: &Path) -> Result<HalfspaceList> {
    parse_model(&read_text(path)?)
}

pub fn parse_model(text: &str) -> Result<HalfspaceList> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Model("empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (d, m) = match fields.as_slice() {
        [version, d, m] if *version == MODEL_VERSION => {
            let d = header_field(d, "d")?;
            let m = header_field(m, "m")?;
            (d, m)
        }
        [version, ..] if *version != MODEL_VERSION => {
            return Err(Error::Model(format!(
                "unsupported version {version:?}, expected {MODEL_VERSION}"
            )))
        }
        _ => return Err(Error::Model(format!("malformed header {header:?}"))),
    };
    if m == 0 {
        return Err(Error::Model(
            "m=0: a halfspace list needs at least one pair".into(),
        ));
    }
    if d == 0 {
        return Err(Error::Model(
            "d=0: weight vectors need at least one coordinate".into(),
        ));
    }

    let mut pairs = Vec::with_capacity(m);
    for pair in 1..=m {
        let gamma_line = lines
            .next()
            .ok_or_else(|| Error::Model(format!("truncated before pair {pair}")))?;
        let gamma = gamma_line
            .trim()
            .strip_prefix("gamma=")
            .and_then(|g| g.parse::<f64>().ok())
            .ok_or_else(|| Error::Model(format!("pair {pair}: malformed gamma line {gamma_line:?}")))?;
        let coord_line = lines
            .next()
            .ok_or_else(|| Error::Model(format!("truncated in pair {pair}: missing coordinates")))?;
        let coords = coord_line
            .split_whitespace()
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|_| Error::Model(format!("pair {pair}: malformed coordinate")))?;
        if coords.len() != d {
            return Err(Error::Model(format!(
                "pair {pair}: expected {d} coordinates, found {}",
                coords.len()
            )));
        }
        let h = Halfspace::new(FeatureVector::new(coords)?)?;
        pairs.push(ThresholdedHalfspace::new(h, gamma)?);
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(Error::Model(format!("trailing content after {m} pairs")));
    }
    Ok(HalfspaceList::new(pairs)?)
}

fn header_field(field: &str, key: &str) -> Result<usize> {
    field
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Model(format!("malformed header field {field:?}, expected {key}=<n>")))
}
