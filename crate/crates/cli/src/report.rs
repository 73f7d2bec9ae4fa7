//! Report structure and its text rendering.

use std::fmt::Write as _;

use entsym::cpmaps::ChannelReport;
use entsym::DenseMatrix;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Passes when `value <= limit`.
    AtMost,
    /// Passes when `value >= limit`.
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound: Bound::AtMost,
            limit,
            passed: value <= limit,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound: Bound::AtLeast,
            limit,
            passed: value >= limit,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Item {
    pub kind: String,
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<serde_json::Value>,
}

impl Item {
    pub fn new(kind: &str, name: impl Into<String>) -> Self {
        Item {
            kind: kind.to_string(),
            name: name.into(),
            passed: true,
            checks: Vec::new(),
            values: Vec::new(),
            error: None,
            output: None,
        }
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn residual(&mut self, name: &str, value: f64, tol: f64) {
        self.check(Check::at_most(name, value, tol));
    }

    pub fn value(&mut self, name: &str, value: f64) {
        self.values.push(Quantity {
            name: name.to_string(),
            value,
        });
    }

    pub fn fail(&mut self, message: impl Into<String>) {
        self.passed = false;
        self.error = Some(message.into());
    }

    /// The CP verdict split into its two inequalities, then counit preservation.
    pub fn channel(&mut self, prefix: &str, r: &ChannelReport, tol: f64) {
        let cutoff = tol * r.scale;
        self.check(Check::at_most(format!("{prefix}cp_hermitian"), r.hermitian_residual, cutoff));
        self.check(Check::at_least(format!("{prefix}cp_min_eigenvalue"), r.min_eigenvalue, -cutoff));
        self.residual(&format!("{prefix}counit"), r.counit_residual, tol);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scene: String,
    pub tolerance: f64,
    pub seed: u64,
    pub passed: bool,
    pub items: Vec<Item>,
}

impl Report {
    pub fn new(scene: &str, tolerance: f64, seed: u64, items: Vec<Item>) -> Self {
        Report {
            scene: scene.to_string(),
            tolerance,
            seed,
            passed: items.iter().all(|i| i.passed),
            items,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scene {}  tol {:e}  seed {}", self.scene, self.tolerance, self.seed);
        for item in &self.items {
            let status = if item.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status}  {} {}", item.kind, item.name);
            for c in &item.checks {
                let op = match c.bound {
                    Bound::AtMost => "<=",
                    Bound::AtLeast => ">=",
                };
                let mark = if c.passed { "ok" } else { "VIOLATED" };
                let _ = writeln!(out, "      {:<44} {:>11.3e} {op} {:<10.3e} {mark}", c.name, c.value, c.limit);
            }
            for q in &item.values {
                let _ = writeln!(out, "      {:<44} {:.9}", q.name, q.value);
            }
            if let Some(e) = &item.error {
                let _ = writeln!(out, "      error: {e}");
            }
            if let Some(serde_json::Value::Object(fields)) = &item.output {
                for (key, v) in fields {
                    match v.as_array() {
                        Some(rows) if rows.iter().all(|r| r.is_array()) => {
                            let _ = writeln!(out, "      {key}:");
                            for r in rows {
                                let _ = writeln!(out, "        {r}");
                            }
                        }
                        _ => {
                            let _ = writeln!(out, "      {key}: {v}");
                        }
                    }
                }
            }
        }
        let failed = self.items.iter().filter(|i| !i.passed).count();
        let _ = writeln!(
            out,
            "{}: {} items, {} failed",
            if self.passed { "PASS" } else { "FAIL" },
            self.items.len(),
            failed
        );
        out
    }
}

/// `[re, im]` pairs, with negative zeros cleared so the output reads cleanly.
pub fn matrix_json(m: &DenseMatrix) -> serde_json::Value {
    let clean = |x: f64| if x == 0.0 { 0.0 } else { x };
    serde_json::Value::from(
        m.to_rows()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|z| serde_json::json!([clean(z.re), clean(z.im)]))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>(),
    )
}
