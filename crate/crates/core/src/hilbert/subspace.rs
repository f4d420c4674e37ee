use super::frame::{extend_orthonormal, Frame};
use super::{checked_svd, CVector, C64};
use crate::error::{invalid, Result};

fn check_same_ambient(u: &Frame, v: &Frame) -> Result<()> {
    if u.ambient_dim() != v.ambient_dim() {
        return invalid(format!(
            "frames live in different spaces ({} vs {})",
            u.ambient_dim(),
            v.ambient_dim()
        ));
    }
    Ok(())
}

fn sorted_desc(mut s: Vec<f64>) -> Vec<f64> {
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Principal angles between two subspaces, ascending in `[0, π/2]`.
///
/// Cosines are the singular values of the cross-Gram matrix. Angles below
/// `π/4` are taken from the sines instead, i.e. from the singular values of
/// the residual of the smaller frame against the larger one.
pub fn principal_angles(u: &Frame, v: &Frame) -> Result<Vec<f64>> {
    check_same_ambient(u, v)?;
    if u.is_empty() || v.is_empty() {
        return Ok(Vec::new());
    }
    let (big, small) = if u.dim() >= v.dim() { (u, v) } else { (v, u) };
    let cross = big.basis().adjoint() * small.basis();
    let cosines = sorted_desc(
        checked_svd(&cross).singular_values.iter().copied().collect(),
    );
    let residual = small.basis() - big.basis() * &cross;
    let mut sines: Vec<f64> =
        checked_svd(&residual).singular_values.iter().copied().collect();
    sines.sort_by(f64::total_cmp);

    let angles = cosines
        .iter()
        .zip(sines.iter())
        .map(|(&c, &s)| {
            let c = c.clamp(0.0, 1.0);
            let s = s.clamp(0.0, 1.0);
            if c * c >= 0.5 {
                s.asin()
            } else {
                c.acos()
            }
        })
        .collect();
    Ok(angles)
}

/// Span of the principal directions of `u` whose principal angle with `v`
/// is below `angle_tol`.
///
/// The directions are the right singular vectors of `(I − P_V) U` with
/// singular value (the sine of the angle) below `sin(angle_tol)`, mapped back
/// through `U`, so the result lies exactly in `u` and within `sin(angle_tol)`
/// of `v`.
pub fn subspace_intersection(u: &Frame, v: &Frame, angle_tol: f64) -> Result<Frame> {
    check_same_ambient(u, v)?;
    if !(angle_tol > 0.0) {
        return invalid("angle tolerance must be positive");
    }
    let n = u.ambient_dim();
    if u.is_empty() || v.is_empty() {
        return Ok(Frame::empty(n));
    }
    let residual = u.basis() - v.basis() * (v.basis().adjoint() * u.basis());
    let svd = checked_svd(&residual);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let cutoff = angle_tol.min(std::f64::consts::FRAC_PI_2).sin();
    let mut cols: Vec<CVector> = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s < cutoff {
            let w: CVector = v_t.row(i).adjoint();
            let dir = u.basis() * w;
            // the directions are orthonormal already; the extra pass only
            // cleans round-off
            extend_orthonormal(&mut cols, &dir, 1e-8);
        }
    }
    Ok(Frame::from_columns_unchecked(n, &cols))
}

/// Orthonormal basis of the orthogonal complement of `u` in its ambient space.
///
/// Completes `u` greedily with the canonical vector whose residual is
/// largest, which keeps every added column well conditioned.
pub fn orthogonal_complement(u: &Frame) -> Frame {
    let n = u.ambient_dim();
    let target = n - u.dim();
    let mut all: Vec<CVector> = u.basis().column_iter().map(|c| c.into_owned()).collect();
    // squared residual norm of e_k against the current span: 1 − Σ_j |Q_kj|²
    let mut resid: Vec<f64> = (0..n)
        .map(|k| 1.0 - u.basis().row(k).iter().map(|z| z.norm_sqr()).sum::<f64>())
        .collect();
    let mut out = Vec::with_capacity(target);
    while out.len() < target {
        let (k, _) = resid
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty ambient space");
        let mut e = CVector::zeros(n);
        e[k] = C64::new(1.0, 0.0);
        if !extend_orthonormal(&mut all, &e, 1e-10) {
            resid[k] = f64::NEG_INFINITY;
            continue;
        }
        let q = all.last().expect("just pushed").clone();
        for (r, z) in resid.iter_mut().zip(q.iter()) {
            *r -= z.norm_sqr();
        }
        resid[k] = f64::NEG_INFINITY;
        out.push(q);
    }
    Frame::from_columns_unchecked(n, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{orthonormalize, HVector};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn span(vs: &[&[f64]]) -> Frame {
        let hv: Vec<HVector> = vs.iter().map(|v| HVector::from_real(v).unwrap()).collect();
        orthonormalize(&hv, 1e-8).unwrap()
    }

    #[test]
    fn angle_examples() {
        let e0 = span(&[&[1.0, 0.0]]);
        let e1 = span(&[&[0.0, 1.0]]);
        let diag = span(&[&[1.0, 1.0]]);
        assert!(principal_angles(&e0, &e0).unwrap()[0].abs() < 1e-15);
        assert!((principal_angles(&e0, &e1).unwrap()[0] - FRAC_PI_2).abs() < 1e-15);
        // cos θ = ⟨e0, (e0+e1)/√2⟩ = 1/√2
        assert!((principal_angles(&e0, &diag).unwrap()[0] - FRAC_PI_4).abs() < 1e-14);
    }

    #[test]
    fn empty_frames_give_no_angles() {
        assert!(principal_angles(&Frame::empty(3), &Frame::full(3)).unwrap().is_empty());
    }

    #[test]
    fn tiny_angle_is_resolved_through_sines() {
        let t: f64 = 1e-9;
        let u = span(&[&[1.0, 0.0, 0.0]]);
        let v = span(&[&[t.cos(), t.sin(), 0.0]]);
        let a = principal_angles(&u, &v).unwrap();
        assert!((a[0] - t).abs() < 1e-20 + 1e-6 * t);
    }

    #[test]
    fn intersection_examples() {
        let a = span(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let b = span(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let i = subspace_intersection(&a, &b, 1e-8).unwrap();
        assert_eq!(i.dim(), 1);
        assert!((i.basis()[(1, 0)].norm() - 1.0).abs() < 1e-14);

        let e0 = span(&[&[1.0, 0.0]]);
        let e1 = span(&[&[0.0, 1.0]]);
        assert_eq!(subspace_intersection(&e0, &e1, 1e-8).unwrap().dim(), 0);

        let c = span(&[&[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let i = subspace_intersection(&a, &c, 1e-8).unwrap();
        assert_eq!(i.dim(), 1);
        // direct check: the column is (e0+e1)/√2 up to phase
        let q = i.basis().column(0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((q[0].norm() - s).abs() < 1e-14 && (q[1].norm() - s).abs() < 1e-14);
        assert!(q[2].norm() < 1e-14);
    }

    #[test]
    fn complement_examples() {
        let e0 = span(&[&[1.0, 0.0]]);
        let c = orthogonal_complement(&e0);
        assert_eq!(c.dim(), 1);
        assert!((c.basis()[(1, 0)].norm() - 1.0).abs() < 1e-15);

        assert_eq!(orthogonal_complement(&Frame::full(4)).dim(), 0);

        let d = span(&[&[1.0, 1.0]]);
        let c = orthogonal_complement(&d);
        let q = c.basis().column(0);
        // (e0 − e1)/√2 up to phase
        assert!((q[0] + q[1]).norm() < 1e-14);
        assert!((q[0].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    }
}
