use std::time::Instant;

use super::{flag, rel_error, Check, Ctx, ExperimentReport, LabeledDiagnostics, LabeledTrace, LabeledVerdict};
use crate::diagnostics::{diagnose, Solvability};
use crate::error::{LabError, Result};
use crate::hilbert::{min_norm_solve, HVector};
use crate::krylov::{krylov_basis, run_cg_traced, solve_truncated, IterationTrace, TraceRow, TruncationScheme};

/// Galerkin solutions at every `n` where the compression is invertible.
fn galerkin_sweep(ctx: &Ctx, n_max: usize, reference: &HVector) -> Result<(Option<HVector>, IterationTrace, Vec<usize>)> {
    let (a, g) = (ctx.a(), ctx.g);
    let basis = krylov_basis(a, g, n_max, ctx.tol().breakdown_tol)?;
    let start = Instant::now();
    let mut trace = IterationTrace::default();
    let mut skipped = Vec::new();
    let mut last = None;
    for n in 1..=basis.len() {
        match solve_truncated(a, g, &basis, TruncationScheme::Galerkin, n) {
            Ok(x) => {
                let xv = x.as_vector();
                trace.rows.push(TraceRow {
                    n,
                    residual: (a.apply(xv) - g.as_vector()).norm(),
                    distance: Some((xv - reference.as_vector()).norm()),
                    approximant_norm: xv.norm(),
                    wall_time_s: start.elapsed().as_secs_f64(),
                });
                last = Some(x);
            }
            Err(LabError::TruncationSingular { .. }) => skipped.push(n),
            Err(e) => return Err(e),
        }
    }
    Ok((last, trace, skipped))
}

pub(super) fn run(ctx: &Ctx, report: &mut ExperimentReport) -> Result<()> {
    let a = ctx.a();
    let flags = a.flags();
    if !(flags.self_adjoint || flags.skew_adjoint) {
        return Err(LabError::PreconditionFailed("E1 needs a self-adjoint or skew-adjoint operator".into()));
    }
    let f_star = min_norm_solve(a, ctx.g)?;
    let n_max = ctx.cfg.window.n_max.min(a.dim());

    let limit = if flags.self_adjoint && flags.positive {
        let (x, trace) = run_cg_traced(a, ctx.g, n_max, ctx.tol().residual_tol, Some(&f_star))?;
        report.push_check(Check::at_most("cg_iterations", trace.len() as f64, a.dim() as f64));
        report.traces.push(LabeledTrace { label: "cg".into(), trace });
        Some(x)
    } else {
        let (x, trace, skipped) = galerkin_sweep(ctx, n_max, &f_star)?;
        if !skipped.is_empty() {
            report.notes.push(format!("Galerkin compression singular at n = {skipped:?}; those steps are skipped"));
        }
        report.traces.push(LabeledTrace { label: "galerkin".into(), trace });
        x
    };

    match &limit {
        Some(x) => {
            report.push_check(Check::at_most(
                "limit_vs_min_norm",
                rel_error(x.as_vector(), f_star.as_vector()),
                ctx.tol().solution_tol,
            ));
        }
        None => {
            report.notes.push("no Galerkin step had an invertible compression".into());
            report.push_check(Check::at_most("limit_vs_min_norm", 1.0, ctx.tol().solution_tol));
        }
    }

    let diag = diagnose(a, ctx.g, n_max, &ctx.diagnose_options())?;
    report.merge_guard(&diag.verdict.guard);
    report.push_check(Check::equal(
        "verdict_krylov_solvable",
        flag(diag.verdict.verdict == Solvability::KrylovSolvable),
        1.0,
    ));
    report.push_check(
        Check::at_most(
            "off_block_perp_to_k",
            diag.reducibility.off_block_perp_to_k,
            ctx.verdict_tolerances().reducibility_tol * diag.a_norm.max(1.0),
        )
        .informational(),
    );
    report.verdicts.push(LabeledVerdict { label: "problem".into(), verdict: diag.verdict.clone() });
    report.diagnostics.push(LabeledDiagnostics { label: "problem".into(), report: diag });
    Ok(())
}
