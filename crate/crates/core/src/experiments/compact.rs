use std::collections::BTreeSet;

use super::{
    approximant_trace, flag, rel_error, Check, Ctx, ExperimentReport, LabeledDiagnostics, LabeledTrace, LabeledVerdict,
};
use crate::diagnostics::{diagnose, Solvability};
use crate::error::{invalid, LabError, Result};
use crate::hilbert::{min_norm_solve, CVector};
use crate::krylov::{krylov_basis, solve_truncated, TruncationScheme};

/// Number of distinct eigenvalues of a diagonal `A` on which `g` has weight.
fn active_eigenvalues(diag: &CVector, g: &CVector) -> usize {
    let mut seen: BTreeSet<(u64, u64)> = BTreeSet::new();
    for (d, x) in diag.iter().zip(g.iter()) {
        if x.norm() > 0.0 {
            seen.insert((d.re.to_bits(), d.im.to_bits()));
        }
    }
    seen.len()
}

pub(super) fn run(ctx: &Ctx, report: &mut ExperimentReport) -> Result<()> {
    let (a, g) = (ctx.a(), ctx.g);
    let tol = ctx.tol();
    if !a.flags().normal {
        return Err(LabError::PreconditionFailed("E5 needs a normal operator".into()));
    }
    if g.norm() == 0.0 {
        return invalid("E5 datum must be nonzero");
    }
    let f_mn = min_norm_solve(a, g)?;
    let n_max = ctx.cfg.window.n_max.min(a.dim());
    let basis = krylov_basis(a, g, n_max, tol.breakdown_tol)?;

    let xs: Vec<CVector> = (1..=basis.len())
        .map(|n| solve_truncated(a, g, &basis, TruncationScheme::Gmres, n).map(|x| x.into_inner()))
        .collect::<Result<_>>()?;
    let krylov = xs.last().expect("basis is nonempty");
    report.push_check(Check::at_most("krylov_vs_min_norm", rel_error(krylov, f_mn.as_vector()), tol.solution_tol));
    report.traces.push(LabeledTrace {
        label: "gmres".into(),
        trace: approximant_trace(a, g.as_vector(), Some(f_mn.as_vector()), &xs),
    });

    let m = a.matrix();
    let is_diagonal = (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() == 0.0));
    if is_diagonal {
        let active = active_eigenvalues(&m.diagonal(), g.as_vector());
        report.measure("active_eigenvalues", active as f64);
        let grade = basis.grade().unwrap_or(n_max + 1) as f64;
        report.push_check(Check::equal("grade_equals_active_eigenvalues", grade, active as f64));
    }

    let diag = diagnose(a, g, n_max, &ctx.diagnose_options())?;
    let bound = ctx.verdict_tolerances().reducibility_tol * diag.a_norm.max(1.0);
    report.push_check(Check::at_most("off_block_perp_to_k", diag.reducibility.off_block_perp_to_k, bound));
    report.push_check(Check::at_most("off_block_k_to_perp", diag.reducibility.off_block_k_to_perp, bound));
    report.push_check(Check::equal(
        "verdict_krylov_solvable",
        flag(diag.verdict.verdict == Solvability::KrylovSolvable),
        1.0,
    ));
    report.push_check(Check::equal("minimal_norm", flag(diag.verdict.minimal_norm == Some(true)), 1.0));
    report.verdicts.push(LabeledVerdict { label: "problem".into(), verdict: diag.verdict.clone() });
    report.diagnostics.push(LabeledDiagnostics { label: "problem".into(), report: diag });
    Ok(())
}
