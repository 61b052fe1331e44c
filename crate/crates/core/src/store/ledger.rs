//! Tab-separated results ledger and paper-style table export.

use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;

use num_bigint::BigUint;

use super::StoreError;
use crate::eval::{evaluate, TargetMode};
use crate::numtheory::{factorial, primorial};
use crate::program::Program;

const HEADER: &str =
    "# description\tN\tmode\tbest_length\tlower_bound\toptimal\texemplar\ttimestamp\tmax_len\thandoff";

/// One search outcome as persisted in the ledger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultRecord {
    /// `factorial n`, `primorial p` or `integer n`.
    pub description: String,
    pub n: BigUint,
    pub mode: TargetMode,
    pub best_length: Option<usize>,
    pub lower_bound: usize,
    pub optimal: bool,
    pub exemplar: Option<Program>,
    pub timestamp: String,
    pub max_len: usize,
    pub handoff: usize,
}

impl ResultRecord {
    pub fn to_line(&self) -> String {
        let dash = |s: Option<String>| s.unwrap_or_else(|| "-".into());
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.description,
            self.n,
            self.mode,
            dash(self.best_length.map(|l| l.to_string())),
            self.lower_bound,
            self.optimal,
            dash(self.exemplar.as_ref().map(Program::render)),
            self.timestamp,
            self.max_len,
            self.handoff
        )
    }

    pub fn parse_line(line: &str) -> Result<ResultRecord, String> {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 10 {
            return Err(format!("expected 10 tab-separated fields, found {}", fields.len()));
        }
        let num = |i: usize, name: &str| -> Result<usize, String> {
            fields[i]
                .parse::<usize>()
                .map_err(|_| format!("{name} '{}' is not a number", fields[i]))
        };
        let n = fields[1]
            .parse::<BigUint>()
            .map_err(|_| format!("N '{}' is not a decimal integer", fields[1]))?;
        let mode = fields[2].parse::<TargetMode>()?;
        let best_length = match fields[3] {
            "-" => None,
            _ => Some(num(3, "best length")?),
        };
        let optimal = match fields[5] {
            "true" => true,
            "false" => false,
            other => return Err(format!("optimal flag '{other}' is not true/false")),
        };
        let exemplar = match fields[6] {
            "-" => None,
            text => Some(Program::parse(text).map_err(|e| format!("exemplar: {e}"))?),
        };
        Ok(ResultRecord {
            description: fields[0].to_string(),
            n,
            mode,
            best_length,
            lower_bound: num(4, "lower bound")?,
            optimal,
            exemplar,
            timestamp: fields[7].to_string(),
            max_len: num(8, "max length")?,
            handoff: num(9, "handoff")?,
        })
    }

    /// Target kind and parameter parsed from the description.
    pub fn kind(&self) -> Option<(&str, u64)> {
        let (kind, param) = self.description.split_once(' ')?;
        Some((kind, param.parse().ok()?))
    }

    /// Re-checks the record: N agrees with the description, the exemplar is
    /// normalized, hits N under the mode and has the recorded length, and the
    /// optimality flag is consistent with the bounds.
    pub fn verify(&self) -> Result<(), String> {
        match self.kind() {
            Some(("factorial", n)) if factorial(n) != self.n => {
                return Err(format!("N is not {n}!"));
            }
            Some(("primorial", p)) if primorial(p).ok().as_ref() != Some(&self.n) => {
                return Err(format!("N is not {p}#"));
            }
            Some(("integer", v)) if BigUint::from(v) != self.n => {
                return Err(format!("N is not {v}"));
            }
            Some(("factorial" | "primorial" | "integer", _)) => {}
            _ => return Err(format!("unrecognized description '{}'", self.description)),
        }
        match (&self.exemplar, self.best_length) {
            (Some(p), Some(len)) => {
                if p.len() != len {
                    return Err(format!("exemplar has {} steps, recorded length is {len}", p.len()));
                }
                let e = evaluate::<BigUint>(p).map_err(|e| e.to_string())?;
                if !e.is_normalized() {
                    return Err("exemplar is not normalized".into());
                }
                if !e.computes_target(&self.n, self.mode) {
                    return Err(format!("exemplar does not compute {} {}", self.mode, self.n));
                }
                if self.lower_bound > len {
                    return Err("lower bound exceeds best length".into());
                }
                if self.optimal != (self.lower_bound >= len) {
                    return Err("optimal flag disagrees with the bounds".into());
                }
            }
            (None, None) => {
                if self.optimal {
                    return Err("optimal without an exemplar".into());
                }
            }
            _ => return Err("exemplar and best length must both be present or both absent".into()),
        }
        Ok(())
    }
}

/// Appends one record, writing the header first if the file is new.
pub fn append_result(record: &ResultRecord, path: &Path) -> Result<(), StoreError> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| StoreError::io(path, e))?;
    let mut text = String::new();
    if fresh {
        text.push_str(HEADER);
        text.push('\n');
    }
    text.push_str(&record.to_line());
    text.push('\n');
    file.write_all(text.as_bytes()).map_err(|e| StoreError::io(path, e))
}

/// Records in append order. Lines starting with `#` and blank lines are
/// skipped.
pub fn load_ledger(path: &Path) -> Result<Vec<ResultRecord>, StoreError> {
    let text = fs::read_to_string(path).map_err(|e| StoreError::io(path, e))?;
    parse_ledger(&text)
}

pub fn parse_ledger(text: &str) -> Result<Vec<ResultRecord>, StoreError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let record = ResultRecord::parse_line(line).map_err(|message| StoreError::CorruptLedger {
            line: i + 1,
            message,
        })?;
        out.push(record);
    }
    Ok(out)
}

/// One rendered table row, possibly covering a run of parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub first: u64,
    pub last: u64,
    pub best_length: Option<usize>,
    pub exemplar: Option<Program>,
    pub optimal: bool,
    pub lower_bound: usize,
    pub failure: Option<String>,
}

impl TableRow {
    pub fn label(&self) -> String {
        if self.first == self.last {
            self.first.to_string()
        } else {
            format!("{}-{}", self.first, self.last)
        }
    }

    pub fn render(&self) -> String {
        let f = self.best_length.map_or_else(|| "-".into(), |l| l.to_string());
        let program = self.exemplar.as_ref().map_or_else(|| "-".into(), Program::render);
        let verdict = if self.optimal {
            "Opt".to_string()
        } else {
            self.lower_bound.to_string()
        };
        let mut row = format!("{} | {f} | {program} | {verdict}", self.label());
        if let Some(msg) = &self.failure {
            let _ = write!(row, " | VERIFY FAILED: {msg}");
        }
        row
    }
}

/// Rows for one (kind, mode) table, ordered by parameter. Later records for
/// the same parameter replace earlier ones. In multiple mode, consecutive
/// parameters sharing a length and verdict are merged when the later
/// exemplar also certifies the earlier target.
pub fn table_rows(records: &[ResultRecord], kind: &str, mode: TargetMode) -> Vec<TableRow> {
    let mut latest: std::collections::BTreeMap<u64, &ResultRecord> = Default::default();
    for r in records {
        if r.mode != mode {
            continue;
        }
        if let Some((k, param)) = r.kind() {
            if k == kind {
                latest.insert(param, r);
            }
        }
    }
    let mut rows: Vec<(TableRow, &ResultRecord)> = Vec::new();
    for (param, r) in latest {
        let row = TableRow {
            first: param,
            last: param,
            best_length: r.best_length,
            exemplar: r.exemplar.clone(),
            optimal: r.optimal,
            lower_bound: r.lower_bound,
            failure: r.verify().err(),
        };
        if mode == TargetMode::Multiple {
            if let Some((prev, prev_rec)) = rows.last_mut() {
                if adjacent(kind, prev.last, param)
                    && prev.failure.is_none()
                    && row.failure.is_none()
                    && prev.best_length.is_some()
                    && prev.best_length == row.best_length
                    && prev.optimal == row.optimal
                    && (row.optimal || prev.lower_bound == row.lower_bound)
                    && certifies(&row, prev_rec)
                {
                    prev.last = param;
                    prev.exemplar = row.exemplar;
                    *prev_rec = r;
                    continue;
                }
            }
        }
        rows.push((row, r));
    }
    rows.into_iter().map(|(row, _)| row).collect()
}

/// Does `next` directly follow `prev` in the kind's parameter sequence?
fn adjacent(kind: &str, prev: u64, next: u64) -> bool {
    if kind == "primorial" {
        next > prev && !(prev + 1..next).any(crate::numtheory::is_prime_u64)
    } else {
        next == prev + 1
    }
}

fn certifies(row: &TableRow, earlier: &ResultRecord) -> bool {
    let Some(p) = &row.exemplar else { return false };
    evaluate::<BigUint>(p)
        .map(|e| e.is_normalized() && e.computes_target(&earlier.n, earlier.mode))
        .unwrap_or(false)
}

/// Rendered tables and the number of rows whose record failed verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TablesReport {
    pub text: String,
    pub failures: usize,
}

pub const TABLES: [(&str, TargetMode, &str); 5] = [
    ("factorial", TargetMode::Multiple, "Multiples of n!"),
    ("factorial", TargetMode::Exact, "n! exactly"),
    ("primorial", TargetMode::Multiple, "Multiples of p#"),
    ("primorial", TargetMode::Exact, "p# exactly"),
    ("integer", TargetMode::Exact, "Integers"),
];

/// Renders the factorial and primorial tables (plus integer targets when
/// present). Records with an unrecognized description are counted as
/// failures.
pub fn render_tables(records: &[ResultRecord]) -> TablesReport {
    let mut text = String::new();
    let mut failures = 0;
    for (kind, mode, title) in TABLES {
        let rows = table_rows(records, kind, mode);
        if kind == "integer" && rows.is_empty() {
            continue;
        }
        let param = match kind {
            "primorial" => "p",
            _ => "n",
        };
        let _ = writeln!(text, "## {title}");
        let _ = writeln!(text, "{param} | f | program | lower bound");
        for row in &rows {
            failures += usize::from(row.failure.is_some());
            let _ = writeln!(text, "{}", row.render());
        }
        text.push('\n');
    }
    let integer_multiples = table_rows(records, "integer", TargetMode::Multiple);
    if !integer_multiples.is_empty() {
        let _ = writeln!(text, "## Multiples of integers");
        let _ = writeln!(text, "n | f | program | lower bound");
        for row in &integer_multiples {
            failures += usize::from(row.failure.is_some());
            let _ = writeln!(text, "{}", row.render());
        }
        text.push('\n');
    }
    for r in records {
        if !matches!(r.kind(), Some(("factorial" | "primorial" | "integer", _))) {
            failures += 1;
            let _ = writeln!(text, "unrecognized record: {}", r.description);
        }
    }
    TablesReport { text, failures }
}
