//! Report documents and their serialisations.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{Config, Format};

pub const SCHEMA: &str = "ahgeo-report/1";

/// How an expected value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// Written down by hand for this geometry.
    ClosedForm,
    /// Both sides of an identity computed independently.
    Identity,
    /// Obtained by computation from other closed forms.
    Derived,
    /// Fixed by definition or convention.
    Convention,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Value,
    pub expected: Option<Value>,
    pub basis: Option<Basis>,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Check {
    /// `|value − expected| ≤ tol`.
    pub fn close(name: impl Into<String>, value: f64, expected: f64, tol: f64, basis: Basis) -> Check {
        let residual = (value - expected).abs();
        Check {
            name: name.into(),
            value: num(value),
            expected: Some(num(expected)),
            basis: Some(basis),
            residual: finite(residual),
            tolerance: Some(tol),
            passed: residual <= tol,
            error: None,
        }
    }

    /// A nonnegative residual that should vanish: `residual ≤ tol`.
    pub fn small(name: impl Into<String>, residual: f64, tol: f64, basis: Basis) -> Check {
        Check {
            name: name.into(),
            value: num(residual),
            expected: Some(num(0.0)),
            basis: Some(basis),
            residual: finite(residual.abs()),
            tolerance: Some(tol),
            passed: residual.abs() <= tol,
            error: None,
        }
    }

    /// A quantity that must exceed a threshold.
    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Check {
        Check {
            name: name.into(),
            value: num(value),
            expected: None,
            basis: None,
            residual: None,
            tolerance: Some(threshold),
            passed: value > threshold,
            error: None,
        }
    }

    pub fn flag(name: impl Into<String>, value: bool, expected: bool, basis: Basis) -> Check {
        Check {
            name: name.into(),
            value: Value::Bool(value),
            expected: Some(Value::Bool(expected)),
            basis: Some(basis),
            residual: None,
            tolerance: None,
            passed: value == expected,
            error: None,
        }
    }

    /// A check whose computation itself failed.
    pub fn failed(name: impl Into<String>, error: impl ToString) -> Check {
        Check {
            name: name.into(),
            value: Value::Null,
            expected: None,
            basis: None,
            residual: None,
            tolerance: None,
            passed: false,
            error: Some(error.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool: Tool,
    pub scenario: String,
    pub generated_unix: u64,
    pub config: Config,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, Value>,
    pub tables: Vec<Table>,
    pub series: Vec<Series>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(scenario: impl Into<String>, config: &Config) -> Report {
        Report {
            schema: SCHEMA.into(),
            tool: Tool { name: env!("CARGO_PKG_NAME").into(), version: env!("CARGO_PKG_VERSION").into() },
            scenario: scenario.into(),
            generated_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            config: config.clone(),
            passed: true,
            checks: Vec::new(),
            data: BTreeMap::new(),
            tables: Vec::new(),
            series: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn datum(&mut self, key: &str, v: impl Serialize) {
        self.data.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Exit status: 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

pub fn emit(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("reports serialise");
            out.push(b'\n');
            out
        }
        Format::Csv => emit_csv(report),
        Format::Plotdata => emit_plotdata(report),
    }
}

/// The first table of the report, or the check table when there is none.
fn emit_csv(report: &Report) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(t) = report.tables.first() {
        w.write_record(&t.columns).expect("in-memory write");
        for row in &t.rows {
            w.write_record(row.iter().map(|v| format!("{v}"))).expect("in-memory write");
        }
    } else {
        w.write_record(["name", "value", "expected", "residual", "tolerance", "passed", "basis"])
            .expect("in-memory write");
        let text = |v: &Option<Value>| v.as_ref().map_or(String::new(), |v| v.to_string());
        let float = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v}"));
        for c in &report.checks {
            let basis = c.basis.map_or(String::new(), |b| serde_json::to_value(b).unwrap().as_str().unwrap_or("").into());
            w.write_record([
                c.name.clone(),
                c.value.to_string(),
                text(&c.expected),
                float(c.residual),
                float(c.tolerance),
                c.passed.to_string(),
                basis,
            ])
            .expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

/// Whitespace-separated `x y` blocks, one per series, separated by two blank lines.
fn emit_plotdata(report: &Report) -> Vec<u8> {
    let mut out = String::new();
    for (k, s) in report.series.iter().enumerate() {
        if k > 0 {
            out.push_str("\n\n");
        }
        out.push_str(&format!("# {}\n# {} {}\n", s.name, s.x_label, s.y_label));
        for [x, y] in &s.points {
            out.push_str(&format!("{x} {y}\n"));
        }
    }
    out.into_bytes()
}
