use super::{spectral_norm, CMatrix, CVector, HVector, DEFAULT_ORTHO_TOL};
use crate::error::{invalid, Result};

/// Orthonormal basis of a subspace of `ℂ^N`, stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    basis: CMatrix,
    ortho_tol: f64,
}

impl Frame {
    /// Wraps columns that are claimed orthonormal, checking the Gram defect.
    pub fn from_orthonormal(basis: CMatrix, ortho_tol: f64) -> Result<Self> {
        if basis.nrows() == 0 {
            return invalid("frame ambient dimension must be positive");
        }
        if basis.ncols() > basis.nrows() {
            return invalid("frame has more columns than its ambient dimension");
        }
        if !super::is_finite_mat(&basis) {
            return invalid("frame has non-finite entries");
        }
        let frame = Frame { basis, ortho_tol };
        let defect = frame.gram_defect();
        if defect > ortho_tol {
            return invalid(format!(
                "columns are not orthonormal: Gram defect {defect:.3e} > {ortho_tol:.3e}"
            ));
        }
        Ok(frame)
    }

    pub(crate) fn from_columns_unchecked(ambient_dim: usize, columns: &[CVector]) -> Self {
        let basis = if columns.is_empty() {
            CMatrix::zeros(ambient_dim, 0)
        } else {
            CMatrix::from_columns(columns)
        };
        Frame { basis, ortho_tol: DEFAULT_ORTHO_TOL }
    }

    pub(crate) fn from_matrix_unchecked(basis: CMatrix) -> Self {
        Frame { basis, ortho_tol: DEFAULT_ORTHO_TOL }
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Frame::from_columns_unchecked(ambient_dim, &[])
    }

    /// The whole space, spanned by the canonical basis.
    pub fn full(ambient_dim: usize) -> Self {
        Frame::from_matrix_unchecked(CMatrix::identity(ambient_dim, ambient_dim))
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.ncols() == 0
    }

    pub fn ortho_tol(&self) -> f64 {
        self.ortho_tol
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn column(&self, j: usize) -> HVector {
        HVector::from_vector(self.basis.column(j).into_owned())
            .expect("frame columns are finite")
    }

    /// Frame made of the first `n` columns.
    pub fn prefix(&self, n: usize) -> Frame {
        let n = n.min(self.dim());
        Frame {
            basis: self.basis.columns(0, n).into_owned(),
            ortho_tol: self.ortho_tol,
        }
    }

    /// `‖F*F − I‖` in operator norm.
    pub fn gram_defect(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let k = self.dim();
        let gram = self.basis.adjoint() * &self.basis - CMatrix::identity(k, k);
        spectral_norm(&gram)
    }

    pub(crate) fn project_raw(&self, v: &CVector) -> CVector {
        if self.is_empty() {
            return CVector::zeros(v.len());
        }
        &self.basis * (self.basis.adjoint() * v)
    }

    /// `‖v − P v‖`, computed from the explicit residual.
    pub fn distance(&self, v: &CVector) -> f64 {
        (v - self.project_raw(v)).norm()
    }
}

/// Appends the normalized residual of `v` against `basis` (two Gram–Schmidt
/// passes) unless that residual has norm `<= drop_below`.
pub(crate) fn extend_orthonormal(basis: &mut Vec<CVector>, v: &CVector, drop_below: f64) -> bool {
    let mut w = v.clone();
    for _ in 0..2 {
        for q in basis.iter() {
            let c = q.dotc(&w);
            w.axpy(-c, q, super::c64(1.0, 0.0));
        }
    }
    let nrm = w.norm();
    if nrm <= drop_below || nrm == 0.0 {
        return false;
    }
    basis.push(w.unscale(nrm));
    true
}

/// Orthonormalizes `vectors` by modified Gram–Schmidt with one full
/// reorthogonalization pass. A vector is dropped when its residual norm is at
/// most `tol · max_i ‖v_i‖`.
pub fn orthonormalize(vectors: &[HVector], tol: f64) -> Result<Frame> {
    let Some(first) = vectors.first() else {
        return invalid("orthonormalize needs at least one vector");
    };
    if !(tol > 0.0) {
        return invalid("orthonormalize tolerance must be positive");
    }
    let dim = first.dim();
    if vectors.iter().any(|v| v.dim() != dim) {
        return invalid("vectors have mismatched dimensions");
    }
    let scale = vectors.iter().map(HVector::norm).fold(0.0, f64::max);
    let mut basis = Vec::new();
    for v in vectors {
        if basis.len() == dim {
            break;
        }
        extend_orthonormal(&mut basis, v.as_vector(), tol * scale);
    }
    Ok(Frame::from_columns_unchecked(dim, &basis))
}

/// Orthonormalizes the columns of a matrix; used internally where the
/// vectors are already validated.
pub(crate) fn orthonormalize_columns(m: &CMatrix, tol: f64) -> Frame {
    let dim = m.nrows();
    let scale = m.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut basis = Vec::new();
    for c in m.column_iter() {
        if basis.len() == dim {
            break;
        }
        extend_orthonormal(&mut basis, &c.into_owned(), tol * scale);
    }
    Frame::from_columns_unchecked(dim, &basis)
}

/// Orthogonal projection of `v` onto the span of `frame`.
pub fn project(frame: &Frame, v: &HVector) -> Result<HVector> {
    if v.dim() != frame.ambient_dim() {
        return invalid(format!(
            "vector dimension {} does not match frame ambient dimension {}",
            v.dim(),
            frame.ambient_dim()
        ));
    }
    HVector::from_vector(frame.project_raw(v.as_vector()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{c64, C64};

    fn real(v: &[f64]) -> HVector {
        HVector::from_real(v).unwrap()
    }

    #[test]
    fn already_orthonormal_pair_is_kept() {
        let f = orthonormalize(&[real(&[1.0, 0.0, 0.0]), real(&[0.0, 1.0, 0.0])], 1e-8).unwrap();
        assert_eq!(f.dim(), 2);
        assert!((f.basis()[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((f.basis()[(1, 1)] - c64(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn duplicate_is_dropped() {
        let e0 = real(&[1.0, 0.0]);
        let f = orthonormalize(&[e0.clone(), e0], 1e-8).unwrap();
        assert_eq!(f.dim(), 1);
    }

    #[test]
    fn rank_two_of_three_in_plane() {
        // Oracle: the 3x3 matrix with these columns has singular values
        // (2.449.., 1.414.., 0), so the rank is 2 and the span is the e0-e1 plane.
        let vs = [real(&[1.0, 1.0, 0.0]), real(&[1.0, -1.0, 0.0]), real(&[2.0, 0.0, 0.0])];
        let m = CMatrix::from_columns(&vs.iter().map(|v| v.as_vector().clone()).collect::<Vec<_>>());
        let sv = crate::hilbert::singular_values(&m);
        assert!(sv[2] < 1e-14 && sv[1] > 1.0);
        let f = orthonormalize(&vs, 1e-8).unwrap();
        assert_eq!(f.dim(), 2);
        for j in 0..2 {
            assert!(f.basis()[(2, j)].norm() < 1e-15);
        }
        assert!(f.gram_defect() < 1e-14);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(orthonormalize(&[], 1e-8).is_err());
        assert!(orthonormalize(&[real(&[1.0])], 0.0).is_err());
    }

    #[test]
    fn projection_examples() {
        let f = orthonormalize(&[real(&[1.0, 0.0])], 1e-8).unwrap();
        let p = project(&f, &real(&[1.0, 1.0])).unwrap();
        assert!((p.entries()[0] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!(p.entries()[1].norm() < 1e-15);

        let full = Frame::full(3);
        let v = HVector::new(vec![c64(1.0, 2.0), c64(-3.0, 0.5), c64(0.0, 1.0)]).unwrap();
        let pv = project(&full, &v).unwrap();
        assert!((pv.as_vector() - v.as_vector()).norm() < 1e-15);

        // rank-one projector (e0+e1)/√2: P e0 = ⟨q,e0⟩ q = (1/2, 1/2, 0)
        let f = orthonormalize(&[real(&[1.0, 1.0, 0.0])], 1e-8).unwrap();
        let p = project(&f, &real(&[1.0, 0.0, 0.0])).unwrap();
        let expect = [0.5, 0.5, 0.0];
        for (z, e) in p.entries().iter().zip(expect) {
            assert!((z - C64::new(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn projection_dimension_mismatch() {
        let f = Frame::full(2);
        assert!(project(&f, &real(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn from_orthonormal_checks_gram() {
        let bad = CMatrix::from_column_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0)]);
        assert!(Frame::from_orthonormal(bad, 1e-12).is_err());
        assert!(Frame::from_orthonormal(CMatrix::identity(2, 2), 1e-12).is_ok());
    }
}
