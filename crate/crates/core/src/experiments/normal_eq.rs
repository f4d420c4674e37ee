use super::{rel_error, Check, Ctx, ExperimentReport, LabeledTrace};
use crate::error::{LabError, Result};
use crate::gallery::check_friedrichs_pair;
use crate::hilbert::{dense_solve, hermitian_part, spectral_norm, CMatrix, DenseOperator, HVector, OperatorFlags, C64};
use crate::krylov::{krylov_basis, run_cg_traced, run_gmres_traced, KrylovBasis};

/// `α` and `‖A + A* − α I‖` with `α` the mean of `Re diag(A + A*)`.
pub fn identity_multiple(a: &DenseOperator) -> (f64, f64) {
    let n = a.dim();
    let sum = a.matrix() + a.matrix().adjoint();
    let alpha = sum.diagonal().iter().map(|z| z.re).sum::<f64>() / n as f64;
    let defect = spectral_norm(&(sum - CMatrix::identity(n, n) * C64::new(alpha, 0.0)));
    (alpha, defect)
}

/// `max_j dist(q_j, 𝒦_{2m}(A, g))` over the columns `q_j` of `𝒦_m(A*A, A*g)`,
/// for `m = 1..=normal.len()`.
pub fn inclusion_distances(normal: &KrylovBasis, plain: &KrylovBasis) -> Vec<f64> {
    (1..=normal.len())
        .map(|m| {
            let target = plain.frame(2 * m);
            let src = normal.frame(m);
            src.basis().column_iter().map(|c| target.distance(&c.into_owned())).fold(0.0, f64::max)
        })
        .collect()
}

/// `A*A` as a positive self-adjoint operator.
pub fn normal_operator(a: &DenseOperator) -> Result<DenseOperator> {
    let m = hermitian_part(&(a.matrix().adjoint() * a.matrix()));
    DenseOperator::new(m, OperatorFlags::positive_self_adjoint())
}

pub(super) fn run(ctx: &Ctx, report: &mut ExperimentReport) -> Result<()> {
    let (a, g) = (ctx.a(), ctx.g);
    let tol = ctx.tol();
    let (alpha, defect) = identity_multiple(a);
    let scale = alpha.abs().max(1.0);
    report.measure("alpha", alpha);
    report.push_check(Check::at_most("identity_defect", defect, tol.identity_tol * scale));
    if defect > tol.identity_tol * scale {
        return Err(LabError::PreconditionFailed(format!(
            "A + A* is not a multiple of the identity: defect {defect:.3e} for alpha = {alpha:.6}"
        )));
    }
    if let Some(at) = &ctx.built.formal_adjoint {
        let fc = check_friedrichs_pair(a, at, tol.identity_tol * scale)?;
        report.push_check(Check::at_most("friedrichs_sum_defect", fc.sum_self_adjoint_defect, tol.identity_tol * scale));
        report.friedrichs = Some(fc);
    }

    let m_max = ctx.cfg.window.n_max;
    let ata = normal_operator(a)?;
    let atg = HVector::from_vector(a.apply_adjoint(g.as_vector()))?;
    let normal = krylov_basis(&ata, &atg, m_max, tol.breakdown_tol)?;
    let plain = krylov_basis(a, g, 2 * m_max, tol.breakdown_tol)?;
    let dists = inclusion_distances(&normal, &plain);
    for (m, d) in dists.iter().enumerate() {
        report.push_check(Check::at_most(format!("inclusion_m{}", m + 1), *d, tol.inclusion_tol));
    }
    report.measure("inclusion_max", dists.iter().copied().fold(0.0, f64::max));
    if normal.len() < m_max {
        report.notes.push(format!("K(A*A, A*g) reached its grade at m = {}", normal.len()));
    }

    let f0 = dense_solve(a, g)?;
    let dim = a.dim();
    let (f_normal, t_normal) = run_cg_traced(&ata, &atg, 4 * dim, tol.residual_tol, Some(&f0))?;
    let (f_gmres, t_gmres) = run_gmres_traced(a, g, dim, tol.residual_tol, Some(&f0))?;
    report.push_check(Check::at_most(
        "normal_route_vs_dense",
        rel_error(f_normal.as_vector(), f0.as_vector()),
        tol.route_tol,
    ));
    report.push_check(Check::at_most("gmres_route_vs_dense", rel_error(f_gmres.as_vector(), f0.as_vector()), tol.route_tol));
    report.push_check(Check::at_most(
        "routes_agree",
        rel_error(f_normal.as_vector(), f_gmres.as_vector()),
        2.0 * tol.route_tol,
    ));
    report.traces.push(LabeledTrace { label: "normal_cg".into(), trace: t_normal });
    report.traces.push(LabeledTrace { label: "gmres".into(), trace: t_gmres });
    Ok(())
}
