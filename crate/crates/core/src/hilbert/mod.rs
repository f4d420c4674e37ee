//! Finite-dimensional complex Hilbert space primitives.
//!
//! Everything downstream works in `ℂ^N` with the standard inner product
//! `⟨x, y⟩ = Σ conj(x_i) y_i`. Vectors are [`HVector`], orthonormal bases of
//! subspaces are [`Frame`]s and bounded operators are [`DenseOperator`]s.
//! Rank and intersection decisions always take an explicit tolerance.

mod frame;
mod operator;
mod solve;
mod subspace;
mod vector;

pub use frame::{orthonormalize, project, Frame};
pub use operator::{DenseOperator, OperatorFlags, FLAG_TOL};
pub use solve::{dense_solve, min_norm_solve, min_norm_solve_with, MAX_CONDITION};
pub use subspace::{orthogonal_complement, principal_angles, subspace_intersection};
pub use vector::HVector;

pub(crate) use frame::orthonormalize_columns;
pub(crate) use operator::fingerprint_values;

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen, SVD};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

/// Default orthonormality tolerance recorded on frames built here.
pub const DEFAULT_ORTHO_TOL: f64 = 1e-12;

/// Default tolerance for rank and intersection decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub type CSvd = SVD<C64, Dyn, Dyn>;

fn reconstruction_error(m: &CMatrix, svd: &CSvd) -> f64 {
    let (Some(u), Some(v_t)) = (&svd.u, &svd.v_t) else {
        return f64::INFINITY;
    };
    let s = svd.singular_values.map(|x| C64::new(x, 0.0));
    let err = (u * CMatrix::from_diagonal(&s) * v_t - m).norm();
    if err.is_finite() {
        err
    } else {
        f64::INFINITY
    }
}

/// SVD with `U` and `V*`, checked by reconstruction.
///
/// nalgebra's bidiagonal iteration occasionally returns a wrong
/// factorization for rank-deficient complex input. When
/// `‖U Σ V* − M‖_F > 1e−11·‖M‖_F` the SVD is recomputed from a
/// column-pivoted QR, `M P = Q R`, as `(Q U_R) Σ (V_R* P⁻¹)`.
pub fn checked_svd(m: &CMatrix) -> CSvd {
    let tol = 1e-11 * m.norm().max(f64::MIN_POSITIVE);
    let direct = SVD::try_new(m.clone(), true, true, f64::EPSILON, 10_000);
    let direct_err = direct.as_ref().map_or(f64::INFINITY, |s| reconstruction_error(m, s));
    if direct_err <= tol {
        return direct.expect("finite error implies a factorization");
    }
    let qr = m.clone().col_piv_qr();
    let (q, r) = (qr.q(), qr.r());
    let inner = SVD::new(r, true, true);
    let mut v_t = inner.v_t.clone().expect("requested V^T");
    qr.p().inv_permute_columns(&mut v_t);
    let viaqr = SVD { u: inner.u.as_ref().map(|u| &q * u), v_t: Some(v_t), singular_values: inner.singular_values };
    match direct {
        Some(d) if direct_err <= reconstruction_error(m, &viaqr) => d,
        _ => viaqr,
    }
}

/// Singular values sorted in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = checked_svd(m)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Operator (spectral) norm.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Eigenvalues of a Hermitian matrix, ascending. The input is symmetrized first.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = hermitian_part(m);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `(M + M*) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub(crate) fn is_finite_vec(v: &CVector) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn is_finite_mat(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Canonical basis vector `e_k` of `ℂ^dim`.
pub fn basis_vector(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = C64::new(1.0, 0.0);
    v
}
