use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::diagnostics::{DiagnosticsReport, GuardStatus, SolvabilityVerdict, VectorClassReport};
use crate::gallery::FriedrichsCheck;
use crate::krylov::IterationTrace;
use crate::weak_gap::ContinuityEntry;

pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    GuardViolation,
    NonConvergence,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::GuardViolation | Outcome::NonConvergence => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
    Equal,
}

/// A scalar measured against a tolerance. Failing an `asserted` check makes
/// the run a non-convergence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub passed: bool,
    pub asserted: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, relation: Relation::AtMost, tolerance, passed: value <= tolerance, asserted: true }
    }

    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, relation: Relation::AtLeast, tolerance, passed: value >= tolerance, asserted: true }
    }

    /// `value` compared with a target for exact (integer-like) equality.
    pub fn equal(name: impl Into<String>, value: f64, target: f64) -> Self {
        Check { name: name.into(), value, relation: Relation::Equal, tolerance: target, passed: value == target, asserted: true }
    }

    pub fn informational(mut self) -> Self {
        self.asserted = false;
        self
    }
}

/// A reported number with no pass/fail meaning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledVerdict {
    pub label: String,
    pub verdict: SolvabilityVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledTrace {
    pub label: String,
    pub trace: IterationTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDiagnostics {
    pub label: String,
    pub report: DiagnosticsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledVectorClass {
    pub label: String,
    pub report: VectorClassReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub label: String,
    pub entry: ContinuityEntry,
    /// `‖f_m − f‖` when both solutions are available.
    pub solution_distance: Option<f64>,
}

/// How the perturbation experiment relates to the limit proposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropositionOutcome {
    /// Hypotheses held and the conclusion was observed.
    Confirmed,
    /// Hypotheses did not hold; nothing is claimed.
    HypothesisFailed,
    /// Hypotheses held but the conclusion was not observed.
    Contradiction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: String,
    pub experiment_id: String,
    pub config: ExperimentConfig,
    pub outcome: Outcome,
    pub checks: Vec<Check>,
    pub measurements: Vec<Measurement>,
    pub verdicts: Vec<LabeledVerdict>,
    pub traces: Vec<LabeledTrace>,
    pub diagnostics: Vec<LabeledDiagnostics>,
    pub vector_classes: Vec<LabeledVectorClass>,
    pub gaps: Vec<GapRecord>,
    pub friedrichs: Option<FriedrichsCheck>,
    pub proposition: Option<PropositionOutcome>,
    /// Combined window guard of every guarded computation in the run.
    pub guard: GuardStatus,
    pub weak_norm_basis: String,
    pub notes: Vec<String>,
    pub wall_time_s: f64,
}

impl ExperimentReport {
    pub(crate) fn new(config: &ExperimentConfig, weak_norm_basis: &str) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION.into(),
            experiment_id: config.experiment_id.name().into(),
            config: config.clone(),
            outcome: Outcome::Success,
            checks: Vec::new(),
            measurements: Vec::new(),
            verdicts: Vec::new(),
            traces: Vec::new(),
            diagnostics: Vec::new(),
            vector_classes: Vec::new(),
            gaps: Vec::new(),
            friedrichs: None,
            proposition: None,
            guard: GuardStatus::not_applicable(),
            weak_norm_basis: weak_norm_basis.into(),
            notes: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn verdict(&self, label: &str) -> Option<&SolvabilityVerdict> {
        self.verdicts.iter().find(|v| v.label == label).map(|v| &v.verdict)
    }

    pub fn trace(&self, label: &str) -> Option<&IterationTrace> {
        self.traces.iter().find(|t| t.label == label).map(|t| &t.trace)
    }

    pub fn measurement(&self, name: &str) -> Option<f64> {
        self.measurements.iter().find(|m| m.name == name).map(|m| m.value)
    }

    pub(crate) fn push_check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub(crate) fn measure(&mut self, name: impl Into<String>, value: f64) {
        self.measurements.push(Measurement { name: name.into(), value });
    }

    pub(crate) fn merge_guard(&mut self, g: &GuardStatus) {
        if !g.applicable {
            return;
        }
        let cur = &mut self.guard;
        if !cur.applicable {
            *cur = GuardStatus { first_violation: None, ..g.clone() };
            cur.passed = g.passed;
            return;
        }
        cur.checked += g.checked;
        cur.max_outer_mass = cur.max_outer_mass.max(g.max_outer_mass);
        cur.passed &= g.passed;
    }

    /// Sets the outcome from the guard and the asserted checks.
    pub(crate) fn finalize(&mut self) {
        self.outcome = if self.guard.applicable && !self.guard.passed {
            Outcome::GuardViolation
        } else if self.checks.iter().any(|c| c.asserted && !c.passed) {
            Outcome::NonConvergence
        } else {
            Outcome::Success
        };
    }

    pub fn to_json(&self) -> crate::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Removes every object key starting with `wall_time`, recursively.
pub fn strip_timing(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            map.retain(|k, _| !k.starts_with("wall_time"));
            for v in map.values_mut() {
                strip_timing(v);
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

/// Report JSON with timing fields removed, for byte comparison.
pub fn timing_free_json(report: &ExperimentReport) -> crate::Result<String> {
    let mut v = serde_json::to_value(report)?;
    strip_timing(&mut v);
    Ok(serde_json::to_string_pretty(&v)?)
}

/// Paths of non-finite numbers (which JSON would print as `null`).
pub fn non_finite_fields(report: &ExperimentReport) -> Vec<String> {
    fn walk(v: &serde_json::Value, path: &str, out: &mut Vec<String>) {
        match v {
            serde_json::Value::Number(n) => {
                if n.as_f64().is_some_and(|x| !x.is_finite()) {
                    out.push(path.to_string());
                }
            }
            serde_json::Value::Object(m) => m.iter().for_each(|(k, v)| walk(v, &format!("{path}.{k}"), out)),
            serde_json::Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| walk(v, &format!("{path}[{i}]"), out)),
            _ => {}
        }
    }
    let mut out = Vec::new();
    if let Ok(v) = serde_json::to_value(report) {
        walk(&v, "$", &mut out);
    }
    out
}
