mod common;

use common::{corrected, published, Published, ERRATA};
use slp_core::{evaluate, BigUint, Program, TargetMode};

fn check(row: &Published, text: &str) -> Result<(), String> {
    let p = Program::parse(text).map_err(|e| format!("parse: {e}"))?;
    if p.len() != row.f {
        return Err(format!("{} steps, expected {}", p.len(), row.f));
    }
    let e = evaluate::<BigUint>(&p).map_err(|e| e.to_string())?;
    if !e.is_normalized() {
        return Err("not normalized".into());
    }
    for (x, n) in row.targets() {
        if !e.computes_target(&n, row.mode) {
            return Err(format!("misses target for parameter {x}"));
        }
    }
    Ok(())
}

#[test]
fn fixture_shape() {
    let rows = published();
    assert_eq!(rows.len(), 53);
    for table in ["multiple-factorial", "exact-factorial", "multiple-primorial", "exact-primorial"] {
        assert!(rows.iter().any(|r| r.table == table));
    }
    for r in &rows {
        let expected = if r.table.starts_with("exact") { TargetMode::Exact } else { TargetMode::Multiple };
        assert_eq!(r.mode, expected);
        assert!(r.lower.is_none_or(|l| l < r.f));
    }
}

#[test]
fn printed_programs_fail_exactly_on_the_errata() {
    let failing: Vec<(String, String)> = published()
        .iter()
        .filter(|r| check(r, &r.program).is_err())
        .map(|r| (r.table.clone(), r.label.clone()))
        .collect();
    let expected: Vec<(String, String)> = ERRATA.iter().map(|(t, l, _)| (t.to_string(), l.to_string())).collect();
    assert_eq!(failing, expected);
}

#[test]
fn corrected_programs_verify() {
    for row in published() {
        match corrected(&row) {
            Some(text) => {
                if let Err(e) = check(&row, &text) {
                    panic!("{} {}: {e}", row.table, row.label);
                }
            }
            None => assert!(check(&row, &row.program).is_err()),
        }
    }
}

#[test]
fn corrections_are_small() {
    for row in published() {
        let Some(fixed) = corrected(&row) else { continue };
        let a = common::split_steps(&row.program);
        let b = common::split_steps(&fixed);
        assert_eq!(a.len(), b.len());
        assert!(a.iter().zip(&b).filter(|(x, y)| x != y).count() <= 2);
    }
}

#[test]
fn unfixable_row_computes_a_different_multiple() {
    // The printed 31# program ends with a multiple of 29# instead.
    let row = published().into_iter().find(|r| r.table == "exact-primorial" && r.label == "31").unwrap();
    let e = evaluate::<BigUint>(&row.parsed()).unwrap();
    let expected = common::oracle_primorial(29) * 15u8;
    assert_eq!(e.last(), &expected);
}
