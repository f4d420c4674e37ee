use serde::{Deserialize, Serialize};

use super::{
    hermitian_eigenvalues, is_finite_mat, singular_values, CMatrix, CVector, HVector, C64,
};
use crate::error::{invalid, LabError, Result};

/// Relative tolerance for structure flags: defects are measured in Frobenius
/// norm (an upper bound for the operator norm) against `max(1, ‖A‖_F)`.
pub const FLAG_TOL: f64 = 1e-12;

/// Declared structure of an operator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorFlags {
    pub self_adjoint: bool,
    pub skew_adjoint: bool,
    pub normal: bool,
    /// `Re⟨x, Ax⟩ ≥ 0` for all `x` (semidefinite allowed).
    pub positive: bool,
    pub invertible_known: bool,
}

impl OperatorFlags {
    pub fn self_adjoint() -> Self {
        OperatorFlags { self_adjoint: true, normal: true, ..Default::default() }
    }

    pub fn positive_self_adjoint() -> Self {
        OperatorFlags { positive: true, ..Self::self_adjoint() }
    }
}

/// A bounded operator on `ℂ^N` stored as a dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: CMatrix,
    flags: OperatorFlags,
}

struct Defects {
    scale: f64,
    self_adjoint: f64,
    skew_adjoint: f64,
    normal: f64,
    hermitian_bottom: f64,
    cond: f64,
}

fn defects(m: &CMatrix, need_spectrum: bool) -> Defects {
    let scale = m.norm().max(1.0);
    let adj = m.adjoint();
    let self_adjoint = (m - &adj).norm();
    let skew_adjoint = (m + &adj).norm();
    let normal = (m * &adj - &adj * m).norm();
    let (hermitian_bottom, cond) = if need_spectrum {
        let bottom = hermitian_eigenvalues(m).first().copied().unwrap_or(0.0);
        let sv = singular_values(m);
        let smax = sv.first().copied().unwrap_or(0.0);
        let smin = sv.last().copied().unwrap_or(0.0);
        let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        (bottom, cond)
    } else {
        (0.0, f64::INFINITY)
    };
    Defects { scale, self_adjoint, skew_adjoint, normal, hermitian_bottom, cond }
}

impl DenseOperator {
    /// Builds an operator and verifies every declared flag.
    pub fn new(matrix: CMatrix, mut flags: OperatorFlags) -> Result<Self> {
        check_square(&matrix)?;
        if flags.self_adjoint || flags.skew_adjoint {
            flags.normal = true;
        }
        let need_spectrum = flags.positive || flags.invertible_known;
        let d = defects(&matrix, need_spectrum);
        let tol = FLAG_TOL * d.scale;
        let fail = |what: &str, value: f64| {
            Err(LabError::InvalidInput(format!(
                "operator flagged {what} but defect is {value:.3e} (tolerance {tol:.3e})"
            )))
        };
        if flags.self_adjoint && d.self_adjoint > tol {
            return fail("self-adjoint", d.self_adjoint);
        }
        if flags.skew_adjoint && d.skew_adjoint > tol {
            return fail("skew-adjoint", d.skew_adjoint);
        }
        if flags.normal && d.normal > FLAG_TOL * d.scale * d.scale {
            return fail("normal", d.normal);
        }
        if flags.positive && d.hermitian_bottom < -tol {
            return fail("positive", -d.hermitian_bottom);
        }
        if flags.invertible_known && !(d.cond < super::MAX_CONDITION) {
            return fail("invertible", d.cond);
        }
        Ok(DenseOperator { matrix, flags })
    }

    /// Builds an operator and infers its flags.
    pub fn detect(matrix: CMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let d = defects(&matrix, true);
        let tol = FLAG_TOL * d.scale;
        let self_adjoint = d.self_adjoint <= tol;
        let skew_adjoint = d.skew_adjoint <= tol;
        let flags = OperatorFlags {
            self_adjoint,
            skew_adjoint,
            normal: self_adjoint || skew_adjoint || d.normal <= FLAG_TOL * d.scale * d.scale,
            positive: d.hermitian_bottom >= -tol,
            invertible_known: d.cond < super::MAX_CONDITION,
        };
        Ok(DenseOperator { matrix, flags })
    }

    pub fn identity(dim: usize) -> Self {
        DenseOperator {
            matrix: CMatrix::identity(dim, dim),
            flags: OperatorFlags {
                self_adjoint: true,
                skew_adjoint: false,
                normal: true,
                positive: true,
                invertible_known: true,
            },
        }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("matrix rows must form a square matrix");
        }
        let m = CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0));
        Self::detect(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn flags(&self) -> OperatorFlags {
        self.flags
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        &self.matrix * x
    }

    pub fn apply_adjoint(&self, x: &CVector) -> CVector {
        self.matrix.adjoint() * x
    }

    pub fn apply_h(&self, x: &HVector) -> Result<HVector> {
        self.check_vector(x)?;
        HVector::from_vector(self.apply(x.as_vector()))
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator { matrix: self.matrix.adjoint(), flags: self.flags }
    }

    /// Exact operator norm (largest singular value).
    pub fn norm(&self) -> f64 {
        super::spectral_norm(&self.matrix)
    }

    /// Power-iteration estimate of `‖A‖` from `iters` steps on `A*A`,
    /// started from the all-ones vector. Never exceeds the true norm by more
    /// than round-off.
    pub fn norm_estimate(&self, iters: usize) -> f64 {
        let n = self.dim();
        let mut x = CVector::from_element(n, C64::new(1.0, 0.0)).unscale((n as f64).sqrt());
        let mut est = 0.0;
        for _ in 0..iters.max(1) {
            let y = self.apply(&x);
            est = y.norm();
            let z = self.apply_adjoint(&y);
            let zn = z.norm();
            if zn == 0.0 {
                break;
            }
            x = z.unscale(zn);
        }
        est
    }

    pub fn check_vector(&self, x: &HVector) -> Result<()> {
        if x.dim() != self.dim() {
            return invalid(format!(
                "vector dimension {} does not match operator dimension {}",
                x.dim(),
                self.dim()
            ));
        }
        Ok(())
    }

    /// Stable 64-bit FNV-1a hash of the matrix entries.
    pub fn fingerprint(&self) -> u64 {
        fingerprint_values(
            std::iter::once(self.dim() as f64)
                .chain(self.matrix.iter().flat_map(|z| [z.re, z.im])),
        )
    }
}

pub(crate) fn fingerprint_values(values: impl Iterator<Item = f64>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for b in v.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() == 0 || m.nrows() != m.ncols() {
        return invalid(format!("operator matrix must be square and nonempty, got {}x{}", m.nrows(), m.ncols()));
    }
    if !is_finite_mat(m) {
        return invalid("operator matrix has non-finite entries");
    }
    Ok(())
}
