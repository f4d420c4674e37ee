//! JSON-configured experiments E1 to E6 and their reports.
//!
//! [`run_experiment`] builds the operator and datum described by an
//! [`ExperimentConfig`], runs the experiment and returns an
//! [`ExperimentReport`]; [`write_outputs`] stores it as `report.json` plus one
//! CSV (and optionally one SVG chart) per trace.

mod compact;
mod config;
mod limits;
mod normal_eq;
mod output;
mod prototype;
mod report;
mod selfadjoint;
mod shift;

use std::time::Instant;

pub use config::{
    build_datum, build_operator, env_seed, grid_mode, BuiltOperator, DatumSpec, ExperimentConfig, ExperimentId,
    FourierTerm, Grid, OperatorSpec, RandomStructure, Scalar, SequenceSpec, Tolerances, WindowParams, SEED_ENV,
};
pub use output::{trace_svg, write_atomic, write_outputs};
pub use report::{
    non_finite_fields, strip_timing, timing_free_json, Check, ExperimentReport, GapRecord, LabeledDiagnostics,
    LabeledTrace, LabeledVectorClass, LabeledVerdict, Measurement, Outcome, PropositionOutcome, Relation, SCHEMA_VERSION,
};

use crate::diagnostics::{DiagnoseOptions, VerdictTolerances, WindowGuard};
use crate::error::{LabError, Result};
use crate::hilbert::{CVector, DenseOperator, HVector};
use crate::krylov::{IterationTrace, KrylovBasis, TraceRow};

/// Output directory used when neither the config nor the caller names one.
pub const DEFAULT_OUTPUT_DIR: &str = "lab-out";

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let built = build_operator(&cfg.operator_spec, cfg.seed)?;
    let g = build_datum(&cfg.datum_spec, &built, cfg.seed)?;
    let mut report = ExperimentReport::new(cfg, &built.weights.basis_id);
    let ctx = Ctx { cfg, built: &built, g: &g };
    match cfg.experiment_id {
        ExperimentId::E1SelfadjointCg => selfadjoint::run(&ctx, &mut report)?,
        ExperimentId::E2ShiftLossGain => shift::run(&ctx, &mut report)?,
        ExperimentId::E3NormalEquations => normal_eq::run(&ctx, &mut report)?,
        ExperimentId::E4PrototypeFriedrichs => prototype::run(&ctx, &mut report)?,
        ExperimentId::E5CompactNormal => compact::run(&ctx, &mut report)?,
        ExperimentId::E6PerturbationLimits => limits::run(&ctx, &mut report)?,
    }
    report.finalize();
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Process exit code for a run: 0 success, 2 invalid configuration or
/// unmet precondition, 3 guard violation or asserted non-convergence, 1 for
/// anything else (such as I/O).
pub fn exit_code(result: &Result<ExperimentReport>) -> i32 {
    match result {
        Ok(r) => r.outcome.exit_code(),
        Err(e) => error_exit_code(e),
    }
}

pub fn error_exit_code(e: &LabError) -> i32 {
    match e {
        LabError::InvalidInput(_)
        | LabError::PreconditionFailed(_)
        | LabError::Serde(_)
        | LabError::NotFriedrichs { .. }
        | LabError::NoSolution { .. }
        | LabError::SingularOperator { .. } => 2,
        LabError::NotPositive { .. } | LabError::TruncationSingular { .. } => 3,
        LabError::Io(_) => 1,
    }
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    built: &'a BuiltOperator,
    g: &'a HVector,
}

impl Ctx<'_> {
    fn a(&self) -> &DenseOperator {
        &self.built.op
    }

    fn tol(&self) -> &Tolerances {
        &self.cfg.tolerances
    }

    fn guard(&self) -> Option<WindowGuard> {
        self.built.shift.map(|s| WindowGuard {
            radius: s.radius,
            outer_fraction: self.cfg.window.guard_outer_fraction,
            mass_tol: self.cfg.window.guard_mass_tol,
        })
    }

    fn verdict_tolerances(&self) -> VerdictTolerances {
        VerdictTolerances {
            distance_tol: self.tol().distance_tol,
            angle_tol: self.tol().angle_tol,
            ..VerdictTolerances::default()
        }
    }

    fn diagnose_options(&self) -> DiagnoseOptions {
        DiagnoseOptions {
            breakdown_tol: self.tol().breakdown_tol,
            guard: self.guard(),
            tolerances: self.verdict_tolerances(),
            ..DiagnoseOptions::default()
        }
    }
}

fn rel_error(x: &CVector, reference: &CVector) -> f64 {
    let d = (x - reference).norm();
    let r = reference.norm();
    if r > 0.0 {
        d / r
    } else {
        d
    }
}

/// `P_n f` for `n = 1..=basis.len()`, accumulated column by column.
fn projections(f: &CVector, basis: &KrylovBasis) -> Vec<CVector> {
    let frame = basis.frame(basis.len());
    let mut acc = CVector::zeros(f.len());
    let mut out = Vec::with_capacity(frame.dim());
    for col in frame.basis().column_iter() {
        let c = col.dotc(f);
        acc += col * c;
        out.push(acc.clone());
    }
    out
}

/// Trace rows for given approximants `x_n`, `n = 1, 2, …`.
fn approximant_trace(a: &DenseOperator, g: &CVector, reference: Option<&CVector>, xs: &[CVector]) -> IterationTrace {
    let start = Instant::now();
    IterationTrace {
        rows: xs
            .iter()
            .enumerate()
            .map(|(i, x)| TraceRow {
                n: i + 1,
                residual: (a.apply(x) - g).norm(),
                distance: reference.map(|f| (x - f).norm()),
                approximant_norm: x.norm(),
                wall_time_s: start.elapsed().as_secs_f64(),
            })
            .collect(),
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}
