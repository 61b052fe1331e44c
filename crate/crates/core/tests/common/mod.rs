//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use slp_core::{Program, TargetMode};

/// Every positive value computed by any program of at most `k` steps, with
/// no canonical ordering, normalization or deduplication. Values are kept
/// in `u128`; callers must keep `k` small enough to avoid overflow.
pub fn naive_min_lengths(k: usize) -> HashMap<u128, usize> {
    let mut best = HashMap::new();
    best.insert(1u128, 0usize);
    let mut values = vec![1u128];
    walk(&mut values, k, &mut best);
    best
}

fn walk(values: &mut Vec<u128>, k: usize, best: &mut HashMap<u128, usize>) {
    let len = values.len() - 1;
    if len == k {
        return;
    }
    let n = values.len();
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (values[i], values[j]);
            for v in [a.checked_add(b), a.checked_sub(b), a.checked_mul(b)].into_iter().flatten() {
                if v > 0 {
                    let e = best.entry(v).or_insert(len + 1);
                    *e = (*e).min(len + 1);
                }
                values.push(v);
                walk(values, k, best);
                values.pop();
            }
        }
    }
}

pub fn naive_reached(k: usize) -> BTreeSet<u128> {
    naive_min_lengths(k).into_keys().collect()
}

/// Least length computing `n` (exact) or a positive multiple of `n`, if any
/// program of at most `k` steps does so. `lengths` must come from
/// [`naive_min_lengths`] with the same `k`.
pub fn oracle_length(lengths: &HashMap<u128, usize>, n: u128, mode: TargetMode) -> Option<usize> {
    match mode {
        TargetMode::Exact => lengths.get(&n).copied(),
        TargetMode::Multiple => lengths.iter().filter(|(v, _)| *v % n == 0).map(|(_, l)| *l).min(),
    }
}

pub fn oracle_factorial(n: u64) -> BigUint {
    let mut acc = BigUint::from(1u8);
    for i in 2..=n {
        acc *= i;
    }
    acc
}

pub fn oracle_primorial(p: u64) -> BigUint {
    let mut acc = BigUint::from(1u8);
    for q in 2..=p {
        if (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0) {
            acc *= q;
        }
    }
    acc
}

/// One row of the published program tables.
#[derive(Debug, Clone)]
pub struct Published {
    pub table: String,
    pub label: String,
    pub kind: String,
    pub first: u64,
    pub last: u64,
    pub mode: TargetMode,
    pub f: usize,
    /// `None` when the row claims optimality.
    pub lower: Option<usize>,
    pub program: String,
}

impl Published {
    pub fn targets(&self) -> Vec<(u64, BigUint)> {
        (self.first..=self.last)
            .filter_map(|x| match self.kind.as_str() {
                "factorial" => Some((x, oracle_factorial(x))),
                _ if oracle_primorial(x) != oracle_primorial(x - 1) => Some((x, oracle_primorial(x))),
                _ => None,
            })
            .collect()
    }

    pub fn parsed(&self) -> Program {
        Program::parse(&self.program).unwrap_or_else(|e| panic!("{} {}: {e}", self.table, self.label))
    }
}

pub fn published() -> Vec<Published> {
    let text = include_str!("../data/published_programs.tsv");
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|line| {
            let c: Vec<&str> = line.split('\t').collect();
            assert_eq!(c.len(), 8, "bad fixture line {line}");
            let (first, last) = match c[3].split_once('-') {
                Some((a, b)) => (a.parse().unwrap(), b.parse().unwrap()),
                None => (c[3].parse().unwrap(), c[3].parse().unwrap()),
            };
            Published {
                table: c[0].into(),
                label: c[1].into(),
                kind: c[2].into(),
                first,
                last,
                mode: c[4].parse().unwrap(),
                f: c[5].parse().unwrap(),
                lower: (c[6] != "Opt").then(|| c[6].parse().unwrap()),
                program: c[7].into(),
            }
        })
        .collect()
}

/// Rows of the published tables whose printed program is wrong, with the
/// step replacements that make it verify. `None` means no small fix was
/// found.
/// `(table, row, replacements)` with 1-based step numbers.
pub type Erratum = (&'static str, &'static str, Option<&'static [(usize, &'static str)]>);

pub const ERRATA: [Erratum; 6] = [
    ("multiple-factorial", "23-28", Some(&[(12, "{11,12,*}")])),
    // Shares the prefix of the row above, including its wrong step.
    ("multiple-factorial", "29-34", Some(&[(12, "{11,12,*}"), (16, "{15,16,*}")])),
    ("exact-factorial", "8", Some(&[(8, "{8,2,*}")])),
    ("exact-factorial", "9", Some(&[(7, "{6,6,*}")])),
    ("exact-primorial", "23", Some(&[(10, "{10,1,-}")])),
    ("exact-primorial", "31", None),
];

/// The published program with its erratum fixed, if it has a known fix.
pub fn corrected(row: &Published) -> Option<String> {
    let fix = ERRATA.iter().find(|(t, l, _)| *t == row.table && *l == row.label);
    match fix {
        None => Some(row.program.clone()),
        Some((_, _, None)) => None,
        Some((_, _, Some(edits))) => {
            let mut steps = split_steps(&row.program);
            for (step, text) in edits.iter() {
                steps[step - 1] = text.to_string();
            }
            Some(steps.join(","))
        }
    }
}

/// Splits `{a,b,op},{...}` into step strings without relying on the parser.
pub fn split_steps(text: &str) -> Vec<String> {
    text.split('}')
        .map(|s| s.trim_start_matches(',').trim())
        .filter(|s| !s.is_empty())
        .map(|s| format!("{s}}}"))
        .collect()
}
