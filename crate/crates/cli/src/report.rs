//! Suite reports: JSON document, case table and convergence tables.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// How `value` is compared with `expected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantics {
    /// `value == expected`.
    Exact,
    /// `|value - expected| <= tolerance`.
    Within,
    /// `value >= expected - tolerance`.
    AtLeast,
}

impl Semantics {
    pub fn holds(self, value: f64, expected: f64, tolerance: f64) -> bool {
        if value.is_nan() {
            return false;
        }
        match self {
            Semantics::Exact => value == expected,
            Semantics::Within => (value - expected).abs() <= tolerance,
            Semantics::AtLeast => value >= expected - tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    pub status: Status,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub semantics: Semantics,
    /// Zero unless timings were requested, so that reports are reproducible.
    pub runtime_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: Vec<Case>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.cases.iter().all(|c| c.status != Status::Fail)
    }

    pub fn case(&self, name: &str) -> Option<&Case> {
        self.cases.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per case.
    pub fn cases_csv(&self) -> String {
        let mut out = String::from("name,status,value,expected,tolerance,semantics\n");
        for c in &self.cases {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Skip => "skip",
            };
            let sem = serde_json::to_value(c.semantics).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            out.push_str(&format!("{},{status},{:e},{:e},{:e},{sem}\n", c.name, c.value, c.expected, c.tolerance));
        }
        out
    }
}

/// Rows of a refinement study, with the observed order between neighbours.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub columns: Vec<String>,
    /// `(nx, dx, values...)`; the last value is the error.
    pub rows: Vec<(usize, f64, Vec<f64>)>,
}

impl ConvergenceTable {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| *r.2.last().unwrap_or(&f64::NAN)).collect()
    }

    /// `log2(e_k / e_{k+1})` for each refinement step.
    pub fn orders(&self) -> Vec<f64> {
        self.errors().windows(2).map(|w| (w[0] / w[1]).log2()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("nx,dx,{},order\n", self.columns.join(","));
        let orders = self.orders();
        for (k, (nx, dx, vals)) in self.rows.iter().enumerate() {
            let vals: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
            let order = if k == 0 { String::new() } else { format!("{:.6}", orders[k - 1]) };
            out.push_str(&format!("{nx},{dx:.16e},{},{order}\n", vals.join(",")));
        }
        out
    }
}
