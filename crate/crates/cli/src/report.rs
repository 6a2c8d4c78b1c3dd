//! Human-readable and JSON rendering of reports and errors.

use std::fmt::Write as _;

use serde_json::{json, Value};

use prismalab_core::suites::SuiteReport;
use prismalab_core::Error;

use crate::checks::Outcome;

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Null => {
            let _ = writeln!(out, "  {prefix} = none");
        }
        Value::String(s) => {
            let _ = writeln!(out, "  {prefix} = {s}");
        }
        other => {
            let _ = writeln!(out, "  {prefix} = {other}");
        }
    }
}

fn status(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn outcome_text(o: &Outcome) -> String {
    let mut s = format!("{}: {}\n", o.check, status(o.passed));
    if let Some(n) = &o.note {
        let _ = writeln!(s, "  note = {n}");
    }
    flatten("", &o.report, &mut s);
    s
}

pub fn outcomes_json(outcomes: &[Outcome]) -> Value {
    json!({
        "passed": outcomes.iter().all(|o| o.passed),
        "checks": outcomes.iter().map(Outcome::to_json).collect::<Vec<_>>(),
    })
}

pub fn suite_text(r: &SuiteReport) -> String {
    let mut s = format!("suite {}: {}/{} passed\n", r.name, r.pass_count(), r.cases.len());
    for c in &r.cases {
        let _ = writeln!(s, "  [{}] {}: {}", status(c.passed), c.label, c.detail);
    }
    s
}

pub fn suites_json(reports: &[SuiteReport]) -> Value {
    json!({
        "passed": reports.iter().all(SuiteReport::passed),
        "suites": reports.iter().map(|r| json!({
            "name": r.name,
            "seed": r.seed,
            "passed": r.passed(),
            "pass_count": r.pass_count(),
            "cases": r.cases,
        })).collect::<Vec<_>>(),
    })
}

/// Variant name of an error, for machine-readable output.
pub fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

pub fn error_json(e: &Error) -> Value {
    let mut v = json!({ "status": "error", "kind": error_kind(e), "message": e.to_string() });
    match e {
        Error::ParseError { line, col, .. } => {
            v["line"] = json!(line);
            v["col"] = json!(col);
        }
        Error::IllFormedPhi(j) => v["relation"] = json!(j),
        _ => {}
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds() {
        assert_eq!(error_kind(&Error::IllFormedPhi(3)), "IllFormedPhi");
        assert_eq!(error_kind(&Error::ParseError { line: 1, col: 2, msg: "x".into() }), "ParseError");
        assert_eq!(error_kind(&Error::NotAUnit), "NotAUnit");
        assert_eq!(error_json(&Error::IllFormedPhi(3))["relation"], 3);
    }

    #[test]
    fn text_flattens_nested_reports() {
        let o = Outcome { check: "x".into(), passed: true, report: json!({"a": {"b": 1}, "c": [1, 2]}), note: None };
        assert_eq!(outcome_text(&o), "x: PASS\n  a.b = 1\n  c = [1,2]\n");
    }
}
