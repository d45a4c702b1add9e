//! Report documents: checks, tables, regressions and a settings hash.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::nevanlinna::{CharacteristicTable, RegressionSummary};

/// One numeric verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Measured value; `null` when not finite.
    pub value: Option<f64>,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Check {
    /// `|value - expected| <= tolerance`.
    pub fn close(name: &str, value: f64, expected: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            passed: (value - expected).abs() <= tolerance,
            value: finite(value),
            expected: Some(expected),
            tolerance: Some(tolerance),
            detail: None,
        }
    }

    /// `|value - expected| <= rel |expected|`; the stored tolerance is absolute.
    pub fn relative(name: &str, value: f64, expected: f64, rel: f64) -> Check {
        Check::close(name, value, expected, rel * expected.abs())
    }

    /// `value <= bound`.
    pub fn at_most(name: &str, value: f64, bound: f64) -> Check {
        Check {
            name: name.into(),
            passed: value <= bound,
            value: finite(value),
            expected: None,
            tolerance: Some(bound),
            detail: None,
        }
    }

    /// `value >= bound`.
    pub fn at_least(name: &str, value: f64, bound: f64) -> Check {
        Check {
            name: name.into(),
            passed: value >= bound,
            value: finite(value),
            expected: None,
            tolerance: Some(bound),
            detail: None,
        }
    }

    pub fn flag(name: &str, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            passed,
            value: None,
            expected: None,
            tolerance: None,
            detail: Some(detail.into()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Check {
        self.detail = Some(detail.into());
        self
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("{verdict} {}", self.name);
        if let Some(v) = self.value {
            let _ = write!(s, " value={v:.6}");
        }
        if let Some(e) = self.expected {
            let _ = write!(s, " expected={e:.6}");
        }
        if let Some(t) = self.tolerance {
            let _ = write!(s, " tol={t:.3e}");
        }
        if let Some(d) = self.detail.as_deref().filter(|d| !d.is_empty()) {
            let _ = write!(s, " ({d})");
        }
        s
    }
}

/// A rectangular table with named columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

impl From<&CharacteristicTable> for Table {
    fn from(t: &CharacteristicTable) -> Table {
        Table {
            columns: t.header(),
            rows: t
                .rows
                .iter()
                .map(|r| {
                    let mut v = vec![r.r, r.t, r.m, r.n];
                    v.extend(&r.truncated);
                    v.push(r.residual);
                    v
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub version: String,
    pub settings_hash: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub regressions: BTreeMap<String, RegressionSummary>,
    pub tables: BTreeMap<String, Table>,
    pub verdicts: BTreeMap<String, serde_json::Value>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(kind: &str, settings: &impl Serialize) -> Report {
        Report {
            kind: kind.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            settings_hash: settings_hash(settings),
            passed: true,
            checks: Vec::new(),
            regressions: BTreeMap::new(),
            tables: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn regression(&mut self, name: &str, r: RegressionSummary) {
        self.regressions.insert(name.into(), r);
    }

    pub fn table(&mut self, name: &str, t: Table) {
        self.tables.insert(name.into(), t);
    }

    pub fn verdict(&mut self, name: &str, v: impl Serialize) {
        self.verdicts
            .insert(name.into(), serde_json::to_value(v).unwrap_or(serde_json::Value::Null));
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Merges checks, tables and regressions of `other` under a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}/{}", c.name);
            self.check(c);
        }
        for (k, v) in other.regressions {
            self.regressions.insert(format!("{prefix}/{k}"), v);
        }
        for (k, v) in other.tables {
            self.tables.insert(format!("{prefix}/{k}"), v);
        }
        for (k, v) in other.verdicts {
            self.verdicts.insert(format!("{prefix}/{k}"), v);
        }
        self.notes.extend(other.notes.into_iter().map(|n| format!("{prefix}: {n}")));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Hex SHA-256 of the canonical JSON form of the settings and the crate version.
pub fn settings_hash(settings: &impl Serialize) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(settings).expect("settings serialize"));
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    hex::encode(h.finalize())
}

/// File-system safe name for a table.
pub fn table_file_name(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect();
    format!("{s}.csv")
}
