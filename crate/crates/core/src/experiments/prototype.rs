use std::collections::BTreeSet;
use std::time::Instant;

use super::normal_eq::normal_operator;
use super::config::{grid_mode, Grid};
use super::{
    flag, rel_error, Check, Ctx, DatumSpec, ExperimentReport, LabeledDiagnostics, LabeledTrace, LabeledVectorClass,
    LabeledVerdict, OperatorSpec,
};
use crate::diagnostics::{diagnose, vector_class, ClassVerdict, Solvability};
use crate::error::{LabError, Result};
use crate::gallery::{check_friedrichs_pair, discrete_wavenumber};
use crate::hilbert::{dense_solve, CMatrix, DenseOperator, HVector, C64};
use crate::krylov::{krylov_basis, run_gmres_traced, solve_truncated, IterationTrace, TraceRow, TruncationScheme};

/// Number of powers used for the growth classes.
const CLASS_N: usize = 24;

/// Orthogonal projector onto the modes in `support`, all components.
fn band_projector(grid: &Grid, support: &BTreeSet<i64>) -> CMatrix {
    let dim = grid.points * grid.components;
    let mut p = CMatrix::zeros(dim, dim);
    for &k in support {
        for c in 0..grid.components {
            let v = grid_mode(grid, k, c);
            p += &v * v.adjoint();
        }
    }
    p
}

/// `P A P`: `A` restricted to an invariant band. Powers taken this way stay
/// on the band instead of amplifying rounding in the high modes.
fn on_band(a: &DenseOperator, p: &CMatrix) -> Result<DenseOperator> {
    DenseOperator::detect(p * a.matrix() * p)
}

pub(super) fn run(ctx: &Ctx, report: &mut ExperimentReport) -> Result<()> {
    let (a, g) = (ctx.a(), ctx.g);
    let tol = ctx.tol();
    let (Some(grid), Some(at)) = (ctx.built.grid, ctx.built.formal_adjoint.as_ref()) else {
        return Err(LabError::PreconditionFailed("E4 needs a Friedrichs operator on a periodic grid".into()));
    };
    let DatumSpec::FourierModes { modes, .. } = &ctx.cfg.datum_spec else {
        return Err(LabError::PreconditionFailed("E4 needs a band-limited (fourier_modes) datum".into()));
    };
    let support: BTreeSet<i64> = modes
        .iter()
        .filter(|t| t.amplitude.value().norm() > 0.0)
        .map(|t| t.k.rem_euclid(grid.points as i64))
        .collect();
    let constant_c0 = match &ctx.cfg.operator_spec {
        OperatorSpec::Prototype { c0, c_sin, c_cos, .. } if *c_sin == 0.0 && *c_cos == 0.0 => Some(c0.value()),
        _ => None,
    };

    let fc = check_friedrichs_pair(a, at, tol.identity_tol)?;
    report.push_check(Check::equal("friedrichs_is_pair", flag(fc.is_pair), 1.0));
    report.measure("friedrichs_bottom", fc.bottom);
    report.friedrichs = Some(fc);

    // Constant coefficients keep every Fourier band invariant.
    let band_invariant = constant_c0.is_some() || matches!(ctx.cfg.operator_spec, OperatorSpec::Friedrichs1d { .. });
    let band = band_projector(&grid, &support);

    // A*g under A*A: bounded, hence quasi-analytic.
    let ata = normal_operator(a)?;
    let atg = HVector::from_vector(a.apply_adjoint(g.as_vector()))?;
    let vc_normal = if band_invariant {
        vector_class(&on_band(&ata, &band)?, &atg, CLASS_N)?
    } else {
        vector_class(&ata, &atg, CLASS_N)?
    };
    let bounded = Check::equal("normal_datum_bounded", flag(vc_normal.bounded.verdict == ClassVerdict::Yes), 1.0);
    report.push_check(if band_invariant { bounded } else { bounded.informational() });
    report.measure("normal_datum_bound_constant", vc_normal.bounded.constant);
    report.vector_classes.push(LabeledVectorClass { label: "normal_datum".into(), report: vc_normal });

    let vc = if band_invariant { vector_class(&on_band(a, &band)?, g, CLASS_N)? } else { vector_class(a, g, CLASS_N)? };
    if let Some(c0) = constant_c0 {
        let kmax = support
            .iter()
            .map(|&k| discrete_wavenumber(grid.points, grid.length, k).abs())
            .fold(0.0, f64::max);
        let base = c0.norm() + kmax;
        let ratio = vc
            .norms
            .iter()
            .enumerate()
            .map(|(n, &x)| x / (base.powi(n as i32) * g.norm()))
            .fold(0.0, f64::max);
        report.measure("symbol_bound_base", base);
        report.push_check(Check::at_most("symbol_bound_ratio", ratio, 1.0 + 1e-10));
    } else {
        report.notes.push("variable coefficient: the symbol bound on the band does not apply".into());
    }
    report.vector_classes.push(LabeledVectorClass { label: "datum".into(), report: vc });

    let f0 = dense_solve(a, g)?;
    let n_max = ctx.cfg.window.n_max.min(a.dim());
    let (f_gmres, t_gmres) = run_gmres_traced(a, g, n_max, tol.residual_tol, Some(&f0))?;
    report.push_check(Check::at_most("gmres_vs_dense", rel_error(f_gmres.as_vector(), f0.as_vector()), tol.solution_tol));
    report.traces.push(LabeledTrace { label: "gmres".into(), trace: t_gmres });

    let basis = krylov_basis(a, g, n_max, tol.breakdown_tol)?;
    let start = Instant::now();
    let mut galerkin = IterationTrace::default();
    for n in 1..=basis.len() {
        match solve_truncated(a, g, &basis, TruncationScheme::Galerkin, n) {
            Ok(x) => galerkin.rows.push(TraceRow {
                n,
                residual: (a.apply(x.as_vector()) - g.as_vector()).norm(),
                distance: Some((x.as_vector() - f0.as_vector()).norm()),
                approximant_norm: x.norm(),
                wall_time_s: start.elapsed().as_secs_f64(),
            }),
            Err(LabError::TruncationSingular { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    report.traces.push(LabeledTrace { label: "galerkin".into(), trace: galerkin });
    match basis.grade() {
        Some(m) => {
            let x = solve_truncated(a, g, &basis, TruncationScheme::Galerkin, m)?;
            report.push_check(Check::at_most(
                "galerkin_at_grade_vs_dense",
                rel_error(x.as_vector(), f0.as_vector()),
                tol.solution_tol,
            ));
            if band_invariant {
                let bound = support.len() * grid.components;
                report.push_check(Check::at_most("grade", m as f64, bound as f64));
            }
        }
        None => {
            report.notes.push(format!("grade not reached within n_max = {n_max}"));
            report.push_check(Check::at_most("grade", (n_max + 1) as f64, n_max as f64));
        }
    }

    if let (Some(c0), [t]) = (constant_c0, modes.as_slice()) {
        let k = discrete_wavenumber(grid.points, grid.length, t.k);
        let exact = g.as_vector() / (c0 - C64::new(0.0, k));
        report.push_check(Check::at_most("single_mode_formula", rel_error(f0.as_vector(), &exact), tol.solution_tol));
    }

    let diag = diagnose(a, g, n_max, &ctx.diagnose_options())?;
    report.push_check(Check::equal(
        "verdict_krylov_solvable",
        flag(diag.verdict.verdict == Solvability::KrylovSolvable),
        1.0,
    ));
    report.verdicts.push(LabeledVerdict { label: "problem".into(), verdict: diag.verdict.clone() });
    report.diagnostics.push(LabeledDiagnostics { label: "problem".into(), report: diag });
    Ok(())
}
