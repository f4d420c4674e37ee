use super::{CVector, DenseOperator, HVector, C64};
use crate::error::{LabError, Result};

/// Operators with a condition number at or above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Relative rank cutoff used by [`min_norm_solve`].
const DEFAULT_RCOND: f64 = 1e-10;

/// Relative range-membership tolerance used by [`min_norm_solve`].
const DEFAULT_RANGE_TOL: f64 = 1e-8;

/// Direct solve of `A x = b` by LU with one step of iterative refinement.
/// The condition number is taken from the singular values.
pub fn dense_solve(a: &DenseOperator, b: &HVector) -> Result<HVector> {
    a.check_vector(b)?;
    let sv = super::singular_values(a.matrix());
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(cond < MAX_CONDITION) {
        return Err(LabError::SingularOperator { cond });
    }
    let lu = a.matrix().clone().lu();
    let rhs = b.as_vector();
    let mut x = lu.solve(rhs).ok_or(LabError::SingularOperator { cond })?;
    let r = rhs - a.apply(&x);
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    HVector::from_vector(x)
}

/// Minimal-norm solution of `A x = b` via the SVD pseudoinverse.
pub fn min_norm_solve(a: &DenseOperator, b: &HVector) -> Result<HVector> {
    min_norm_solve_with(a, b, DEFAULT_RCOND, DEFAULT_RANGE_TOL)
}

/// As [`min_norm_solve`], with singular values below `rcond · σ_max` treated
/// as zero and `b` accepted when `‖(I − P_ran) b‖ ≤ range_tol · ‖b‖`.
pub fn min_norm_solve_with(
    a: &DenseOperator,
    b: &HVector,
    rcond: f64,
    range_tol: f64,
) -> Result<HVector> {
    a.check_vector(b)?;
    let n = a.dim();
    let bv = b.as_vector();
    let bnorm = bv.norm();
    let svd = super::checked_svd(a.matrix());
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rcond * smax;

    let mut x = CVector::zeros(n);
    let mut in_range = CVector::zeros(n);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            let ui = u.column(i);
            let coef = ui.dotc(bv);
            in_range.axpy(coef, &ui, C64::new(1.0, 0.0));
            let vi = v_t.row(i).adjoint();
            x.axpy(coef / s, &vi, C64::new(1.0, 0.0));
        }
    }
    let outside = (bv - in_range).norm();
    if outside > range_tol * bnorm {
        return Err(LabError::NoSolution { residual: outside / bnorm.max(f64::MIN_POSITIVE) });
    }
    HVector::from_vector(x)
}
