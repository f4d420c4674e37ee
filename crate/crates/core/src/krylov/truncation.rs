use serde::{Deserialize, Serialize};

use super::KrylovBasis;
use crate::error::{invalid, LabError, Result};
use crate::hilbert::{checked_svd, CMatrix, CVector, DenseOperator, HVector, C64};

/// Relative smallest singular value below which a Galerkin compression is
/// treated as singular.
pub const GALERKIN_SINGULAR_TOL: f64 = 1e-12;

/// Choice of trial space for the truncated problem `Q_n A P_n f_n = Q_n g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationScheme {
    /// `Q_n = P_n`, projection onto `𝒦_n`.
    Galerkin,
    /// Projection onto `A𝒦_n`; equivalent to minimizing `‖Af − g‖` over `𝒦_n`.
    Gmres,
    /// Galerkin on a self-adjoint positive operator, where it coincides with
    /// the CG iterate.
    Cg,
}

impl TruncationScheme {
    pub fn name(self) -> &'static str {
        match self {
            TruncationScheme::Galerkin => "galerkin",
            TruncationScheme::Gmres => "gmres",
            TruncationScheme::Cg => "cg",
        }
    }
}

fn first_unit(len: usize, scale: f64) -> CVector {
    let mut e = CVector::zeros(len);
    e[0] = C64::new(scale, 0.0);
    e
}

/// Solves the `n`-truncated problem and returns `f_n ∈ 𝒦_n(A, g)`.
pub fn solve_truncated(
    a: &DenseOperator,
    g: &HVector,
    basis: &KrylovBasis,
    scheme: TruncationScheme,
    n: usize,
) -> Result<HVector> {
    basis.check_provenance(a, g)?;
    if n == 0 || n > basis.len() {
        return invalid(format!("truncation index {n} outside 1..={}", basis.len()));
    }
    let y = match scheme {
        TruncationScheme::Cg => {
            let f = a.flags();
            if !(f.self_adjoint && f.positive) {
                return Err(LabError::PreconditionFailed(
                    "cg truncation requires a self-adjoint positive operator".into(),
                ));
            }
            galerkin_coefficients(basis, n)?
        }
        TruncationScheme::Galerkin => galerkin_coefficients(basis, n)?,
        TruncationScheme::Gmres => gmres_coefficients(&basis.hessenberg_rect(n), basis.g_norm()),
    };
    HVector::from_vector(basis.frame(n).basis() * y)
}

fn galerkin_coefficients(basis: &KrylovBasis, n: usize) -> Result<CVector> {
    let h = basis.hessenberg_square(n);
    let sv = crate::hilbert::singular_values(&h);
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    let scale = basis.a_norm().max(smax);
    if !(smin > GALERKIN_SINGULAR_TOL * scale) {
        return Err(LabError::TruncationSingular { n, sigma_min: smin });
    }
    let rhs = first_unit(n, basis.g_norm());
    h.lu().solve(&rhs).ok_or(LabError::TruncationSingular { n, sigma_min: smin })
}

/// Minimal-norm least-squares solution of `H̄ y ≈ β e₁`.
pub(crate) fn gmres_coefficients(hbar: &CMatrix, beta: f64) -> CVector {
    let rhs = first_unit(hbar.nrows(), beta);
    let svd = checked_svd(hbar);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.solve(&rhs, 1e-13 * smax.max(f64::MIN_POSITIVE)).expect("U and V were computed")
}
