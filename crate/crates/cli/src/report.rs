//! Suite reports: stable key order, floats with 17 significant digits,
//! rationals as `"p/q"` strings.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Exact (rational) comparison rather than a statistical one.
    pub exact: bool,
    pub pass: bool,
    pub inputs: Value,
    pub expected: Value,
    pub got: Value,
}

impl Check {
    pub fn exact(name: impl Into<String>, inputs: Value, expected: Value, got: Value) -> Self {
        let pass = expected == got;
        Check { name: name.into(), exact: true, pass, inputs, expected, got }
    }

    pub fn stat(name: impl Into<String>, pass: bool, inputs: Value, expected: Value, got: Value) -> Self {
        Check { name: name.into(), exact: false, pass, inputs, expected, got }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl SuiteResult {
    pub fn new(suite: impl Into<String>, checks: Vec<Check>) -> Self {
        SuiteResult {
            suite: suite.into(),
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub seed: Option<u64>,
    pub pass: bool,
    pub suites: Vec<SuiteResult>,
}

impl Report {
    pub fn new(seed: Option<u64>, suites: Vec<SuiteResult>) -> Self {
        Report { seed, pass: suites.iter().all(|s| s.pass), suites }
    }
}

/// Renders any serializable value as pretty JSON with sorted keys and
/// floats printed to 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report values serialize");
    let mut out = String::new();
    render(&v, 0, &mut out);
    out.push('\n');
    out
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Number(n) if n.is_f64() => {
            let f = n.as_f64().unwrap_or(f64::NAN);
            if f.is_finite() {
                write!(out, "{f:.16e}").unwrap();
            } else {
                out.push_str("null");
            }
        }
        Value::Array(items) if !items.is_empty() => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                render(item, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            // serde_json's default map is ordered by key
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                write!(out, "{}{}: ", pad(depth + 1), Value::String(k.clone())).unwrap();
                render(item, depth + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// One row per check: `suite,check,exact,pass,expected,got`.
pub fn to_csv(report: &Report) -> String {
    let mut out = String::from("suite,check,exact,pass,expected,got\n");
    let cell = |v: &Value| {
        let s = v.to_string();
        format!("\"{}\"", s.replace('"', "\"\""))
    };
    for s in &report.suites {
        for c in &s.checks {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                s.suite,
                c.name,
                c.exact,
                c.pass,
                cell(&c.expected),
                cell(&c.got)
            )
            .unwrap();
        }
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Timestamps and timings go to `<output>.log`, never into the report.
pub fn write_sidecar_log(output: &Path, lines: &[String]) -> Result<(), CliError> {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut text = format!("written_at_unix={stamp}\n");
    for l in lines {
        text.push_str(l);
        text.push('\n');
    }
    let mut log = output.as_os_str().to_owned();
    log.push(".log");
    write_file(Path::new(&log), &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_json(&json!({"b": 0.1, "a": 1}));
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64(), Some(0.1));
    }

    #[test]
    fn empty_report_is_valid() {
        let r = Report::new(None, vec![]);
        assert!(r.pass);
        let v: Value = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(v["suites"], json!([]));
    }

    #[test]
    fn exact_entries_are_flagged() {
        let r = Report::new(
            Some(1),
            vec![SuiteResult::new(
                "mixed",
                vec![
                    Check::exact("e", json!({}), json!("1/2"), json!("1/2")),
                    Check::stat("m", true, json!({}), json!(0.5), json!(0.49)),
                ],
            )],
        );
        let v: Value = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(v["suites"][0]["checks"][0]["exact"], json!(true));
        assert_eq!(v["suites"][0]["checks"][1]["exact"], json!(false));
        assert!(to_csv(&r).lines().count() == 3);
    }
}
