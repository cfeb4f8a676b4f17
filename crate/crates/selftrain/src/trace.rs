//! Tab-separated round traces.

use std::fmt::Write as _;

use selftrain_core::selftrain::{RoundRecord, TrainTrace};

use crate::{Error, Result};

pub const TRACE_HEADER: &str = "round\tlabeled\tunlabeled\tgamma\tpseudo_labeled\tpruned\tappended";

/// One parsed trace line.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub round: usize,
    pub labeled: usize,
    pub unlabeled: usize,
    pub gamma: f64,
    pub pseudo_labeled: usize,
    pub pruned: usize,
    pub appended: bool,
    pub forced_stop: bool,
}

impl From<&RoundRecord> for TraceRow {
    fn from(r: &RoundRecord) -> Self {
        TraceRow {
            round: r.round,
            labeled: r.labeled_size,
            unlabeled: r.unlabeled_size,
            gamma: r.gamma,
            pseudo_labeled: r.pseudo_labeled,
            pruned: r.pruned,
            appended: r.appended,
            forced_stop: r.forced_stop,
        }
    }
}

fn appended_cell(row: &TraceRow) -> &'static str {
    match (row.appended, row.forced_stop) {
        (true, true) => "forced",
        (true, false) => "true",
        (false, _) => "false",
    }
}

pub fn format_trace(trace: &TrainTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in trace.rounds.iter().map(TraceRow::from) {
        writeln!(
            out,
            "{}\t{}\t{}\t{:.16e}\t{}\t{}\t{}",
            r.round,
            r.labeled,
            r.unlabeled,
            r.gamma,
            r.pseudo_labeled,
            r.pruned,
            appended_cell(&r)
        )
        .unwrap();
    }
    out
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line_no == 1 && line == TRACE_HEADER {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != 7 {
            return Err(Error::parse(
                line_no,
                format!("expected 7 tab-separated fields, found {}", cells.len()),
            ));
        }
        let int = |c: usize, name: &str| {
            cells[c]
                .parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("{name} {:?} is not a count", cells[c])))
        };
        let gamma: f64 = cells[3]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("gamma {:?} is not a number", cells[3])))?;
        let (appended, forced_stop) = match cells[6] {
            "true" => (true, false),
            "false" => (false, false),
            "forced" => (true, true),
            other => {
                return Err(Error::parse(
                    line_no,
                    format!("appended {other:?} is not true/false/forced"),
                ))
            }
        };
        rows.push(TraceRow {
            round: int(0, "round")?,
            labeled: int(1, "labeled")?,
            unlabeled: int(2, "unlabeled")?,
            gamma,
            pseudo_labeled: int(4, "pseudo_labeled")?,
            pruned: int(5, "pruned")?,
            appended,
            forced_stop,
        });
    }
    Ok(rows)
}

fn delta(cur: usize, prev: Option<usize>) -> String {
    match prev {
        None => "-".into(),
        Some(p) => format!("{:+}", cur as i64 - p as i64),
    }
}

/// Human-readable table of a trace with per-round size changes.
pub fn render_trace(rows: &[TraceRow]) -> String {
    if rows.is_empty() {
        return "0 rounds\n".into();
    }
    let mut out = format!(
        "{:>5}  {:>7}  {:>6}  {:>7}  {:>6}  {:>12}  {:>6}  {:>6}  {}\n",
        "round", "|S|", "d|S|", "|X_u|", "d|X_u|", "gamma", "pseudo", "pruned", "appended"
    );
    let mut prev: Option<&TraceRow> = None;
    for r in rows {
        writeln!(
            out,
            "{:>5}  {:>7}  {:>6}  {:>7}  {:>6}  {:>12.6}  {:>6}  {:>6}  {}",
            r.round,
            r.labeled,
            delta(r.labeled, prev.map(|p| p.labeled)),
            r.unlabeled,
            delta(r.unlabeled, prev.map(|p| p.unlabeled)),
            r.gamma,
            r.pseudo_labeled,
            r.pruned,
            appended_cell(r)
        )
        .unwrap();
        prev = Some(r);
    }
    let appended = rows.iter().filter(|r| r.appended).count();
    let pseudo: usize = rows.iter().map(|r| r.pseudo_labeled).sum();
    let pruned: usize = rows.iter().map(|r| r.pruned).sum();
    writeln!(
        out,
        "{} rounds, {appended} halfspaces appended, {pseudo} pseudo-labeled, {pruned} pruned",
        rows.len()
    )
    .unwrap();
    out
}
