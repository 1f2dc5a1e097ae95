use std::collections::BTreeMap;
use std::fmt::Write as _;

use prepsim::{Distance, OperatorRecord, RaioConditions, Tolerances64};
use serde::Serialize;
use serde_json::Value;

use crate::config::OutputFormat;

/// One pass/fail line: `residual` measures how far the invariant is from
/// violated or how large the error is; `pass` is authoritative.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `residual <= tolerance`.
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }

    pub fn with_pass(name: impl Into<String>, residual: f64, tolerance: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioEcho {
    pub path: String,
    pub label: String,
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub signature: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ToleranceEcho {
    pub validation_eps: f64,
    pub identity_eps: f64,
    pub certainty_eps: f64,
}

impl From<&Tolerances64> for ToleranceEcho {
    fn from(t: &Tolerances64) -> Self {
        Self {
            validation_eps: t.validation_eps,
            identity_eps: t.identity_eps,
            certainty_eps: t.certainty_eps,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistanceEcho {
    pub max_entry: f64,
    pub trace_norm: f64,
}

impl From<Distance<f64>> for DistanceEcho {
    fn from(d: Distance<f64>) -> Self {
        Self {
            max_entry: d.max_entry,
            trace_norm: d.trace_norm,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreparationPayload {
    pub kind: String,
    pub occurrence: String,
    pub times: [f64; 2],
    pub probability: f64,
    pub raw_probability: f64,
    /// `⟨+,z|ρ|+,z⟩` for Stern-Gerlach scenarios.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spin_up_fidelity: Option<f64>,
    pub prepared_state: OperatorRecord,
    pub evolved_state: OperatorRecord,
    pub two_route_residual: DistanceEcho,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RaioPayload {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance_seed: Option<u64>,
    pub conditions: RaioConditions<f64>,
    pub verdict: String,
    /// Residual evaluated only when the conditions hold.
    pub equality_residual: Option<f64>,
    /// Residual evaluated regardless of the conditions; `None` if an event is impossible.
    pub unconditional_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub pass: bool,
    pub residuals: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialFailure {
    pub seed: u64,
    pub checks: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPayload {
    /// `raio` for instance sweeps, `properties` for randomized invariant sweeps.
    pub sweep: String,
    pub trials: u64,
    pub passed_trials: u64,
    pub pass_counts: BTreeMap<String, u64>,
    pub max_residuals: BTreeMap<String, f64>,
    pub failures: Vec<TrialFailure>,
    pub records: Vec<TrialRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorAudit {
    pub name: String,
    pub kind: String,
    pub dims: Vec<usize>,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationPayload {
    pub operators: Vec<OperatorAudit>,
    pub trigger_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Payload {
    Preparation(PreparationPayload),
    Raio(RaioPayload),
    Sweep(SweepPayload),
    Validation(ValidationPayload),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub scenario: ScenarioEcho,
    pub root_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    pub tolerances: ToleranceEcho,
    pub payload: Payload,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub wall_time_seconds: f64,
}

impl Report {
    /// Everything except the wall time; identical configurations give identical bytes.
    pub fn numeric_payload(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(map) = &mut v {
            map.remove("wall_time_seconds");
        }
        serde_json::to_string(&v).expect("value serializes")
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            OutputFormat::Table => {
                let v = serde_json::to_value(self).expect("report serializes");
                let mut out = String::from("field\tvalue\n");
                flatten(&v, String::new(), &mut out);
                out
            }
        }
    }
}

/// Floats in table rows carry 17 significant digits.
fn flatten(v: &Value, path: String, out: &mut String) {
    let join = |key: &str| {
        if path.is_empty() {
            key.to_string()
        } else {
            format!("{path}.{key}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(child, join(k), out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(child, join(&i.to_string()), out);
            }
        }
        Value::Number(n) => {
            let _ = match (n.as_u64(), n.as_i64(), n.as_f64()) {
                (Some(u), _, _) => writeln!(out, "{path}\t{u}"),
                (None, Some(i), _) => writeln!(out, "{path}\t{i}"),
                (None, None, Some(f)) => writeln!(out, "{path}\t{f:.16e}"),
                _ => writeln!(out, "{path}\t{n}"),
            };
        }
        Value::String(s) => {
            let _ = writeln!(out, "{path}\t{s}");
        }
        Value::Bool(b) => {
            let _ = writeln!(out, "{path}\t{b}");
        }
        Value::Null => {
            let _ = writeln!(out, "{path}\tnull");
        }
    }
}
