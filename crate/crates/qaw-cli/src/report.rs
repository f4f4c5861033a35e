//! Canonical, machine-readable reports.
//!
//! Serialization is canonical: UTF-8, object keys sorted (serde_json's
//! default map is ordered), rationals as `"p/q"` strings, complex numbers
//! as `{"re": …, "im": …}`. Identical exact-mode runs therefore produce
//! byte-identical documents. Wall-clock timings go to the human-readable
//! table only, never into the JSON, so determinism survives.

use serde_json::{json, Map, Value};

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u64 = 1;

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

/// One suite's entry in the report.
#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub status: Status,
    /// Largest residual measured, when the suite measures residuals.
    pub max_residual: Option<f64>,
    /// Check counters, e.g. words or pairs examined.
    pub counts: Vec<(String, u64)>,
    /// Extra structured results (convention signs, constants, labels).
    pub details: Vec<(String, Value)>,
    /// Human-readable milliseconds; excluded from the JSON report.
    pub time_ms: u128,
    /// Suite-specific pass threshold, when different from the global one.
    pub tolerance_override: Option<f64>,
}

impl SuiteOutcome {
    pub fn new(name: &'static str) -> Self {
        SuiteOutcome {
            name,
            status: Status::Pass,
            max_residual: None,
            counts: Vec::new(),
            details: Vec::new(),
            time_ms: 0,
            tolerance_override: None,
        }
    }

    pub fn record_residual(&mut self, r: f64) {
        let cur = self.max_residual.get_or_insert(0.0);
        if r > *cur {
            *cur = r;
        }
    }

    pub fn count(&mut self, key: &str, n: u64) {
        match self.counts.iter_mut().find(|(k, _)| k == key) {
            Some((_, v)) => *v += n,
            None => self.counts.push((key.to_string(), n)),
        }
    }

    pub fn detail(&mut self, key: &str, v: Value) {
        self.details.push((key.to_string(), v));
    }

    pub fn finish(&mut self, tolerance: f64) {
        if self.status == Status::Skipped {
            return;
        }
        let tol = self.tolerance_override.unwrap_or(tolerance);
        let ok = self.max_residual.map_or(true, |r| r <= tol);
        if !ok {
            self.status = Status::Fail;
        }
    }

    fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), json!(self.name));
        m.insert("status".into(), json!(self.status.as_str()));
        m.insert(
            "max_residual".into(),
            match self.max_residual {
                Some(r) => json!(r),
                None => Value::Null,
            },
        );
        let mut counts = Map::new();
        for (k, v) in &self.counts {
            counts.insert(k.clone(), json!(v));
        }
        m.insert("counts".into(), Value::Object(counts));
        let mut details = Map::new();
        for (k, v) in &self.details {
            details.insert(k.clone(), v.clone());
        }
        m.insert("details".into(), Value::Object(details));
        Value::Object(m)
    }
}

/// Aggregated run report.
#[derive(Clone, Debug)]
pub struct Report {
    pub config: Value,
    pub suites: Vec<SuiteOutcome>,
}

impl Report {
    pub fn new(cfg: &RunConfig) -> Self {
        Report {
            config: cfg.to_value(),
            suites: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.status != Status::Fail)
    }

    pub fn to_value(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "config": self.config,
            "suites": self.suites.iter().map(SuiteOutcome::to_value).collect::<Vec<_>>(),
            "passed": self.passed(),
        })
    }

    /// Canonical serialized form.
    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report serialization");
        s.push('\n');
        s
    }

    /// Human-readable summary table (this is where timings appear).
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<12} {:<8} {:>14} {:>10}\n",
            "suite", "status", "max_residual", "ms"
        ));
        for s in &self.suites {
            let res = match s.max_residual {
                Some(r) => format!("{r:.3e}"),
                None => "-".into(),
            };
            out.push_str(&format!(
                "{:<12} {:<8} {:>14} {:>10}\n",
                s.name,
                s.status.as_str(),
                res,
                s.time_ms
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.passed() { "pass" } else { "FAIL" }
        ));
        out
    }
}

/// Canonical complex rendering: exact scalars as `"p/q"` strings, floats
/// as JSON numbers.
pub fn crat_to_value(z: &qaw_core::CRat) -> Value {
    json!({
        "re": format!("{}/{}", z.re.numer(), z.re.denom()),
        "im": format!("{}/{}", z.im.numer(), z.im.denom()),
    })
}

pub fn c64_to_value(z: &qaw_core::C64) -> Value {
    json!({"re": z.re, "im": z.im})
}
