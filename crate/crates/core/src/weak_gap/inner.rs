use super::{weak_norm_raw, WeakNormWeights};
use crate::error::{invalid, Result};
use crate::hilbert::{checked_svd, CMatrix, CVector, Frame, HVector, C64};

/// Minimizer of `‖u − V b‖_w` over `‖b‖ ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    pub value: f64,
    /// Coefficients in the frame `V`.
    pub coefficients: CVector,
    /// `v = V b`.
    pub v: CVector,
    /// Multiplier of the norm constraint (`0` when inactive).
    pub lambda: f64,
}

/// Precomputed factorization of `W^{1/2} V` for repeated inner solves
/// against one frame. With `W^{1/2} V = P Σ Z*` the problem is a
/// trust-region subproblem whose secular equation
/// `Σ |σ_i y_i|² / (σ_i² + λ)² = 1` is solved by safeguarded Newton steps.
/// `V*WV` is positive definite, so the hard case cannot occur.
#[derive(Debug, Clone)]
pub struct InnerSolver {
    v: CMatrix,
    sqrt_w: CVector,
    p: CMatrix,
    sigma: Vec<f64>,
    z: CMatrix,
}

impl InnerSolver {
    pub fn new(v: &Frame, w: &WeakNormWeights) -> Result<Self> {
        w.check_dim(v.ambient_dim())?;
        let sqrt_w = w.sqrt_by_position();
        let k = v.dim();
        let (p, sigma, z) = if k == 0 {
            (CMatrix::zeros(v.ambient_dim(), 0), Vec::new(), CMatrix::zeros(0, 0))
        } else {
            let wv = CMatrix::from_fn(v.ambient_dim(), k, |i, j| v.basis()[(i, j)] * sqrt_w[i]);
            let svd = checked_svd(&wv);
            let p = svd.u.expect("requested U");
            let z = svd.v_t.expect("requested V^T").adjoint();
            (p, svd.singular_values.iter().copied().collect(), z)
        };
        Ok(InnerSolver { v: v.basis().clone(), sqrt_w, p, sigma, z })
    }

    pub fn sqrt_weights(&self) -> &CVector {
        &self.sqrt_w
    }

    /// Solves the inner problem for `u`.
    pub fn solve(&self, u: &CVector) -> InnerSolution {
        let wu = u.component_mul(&self.sqrt_w);
        if self.sigma.is_empty() {
            return InnerSolution { value: wu.norm(), coefficients: CVector::zeros(0), v: CVector::zeros(u.len()), lambda: 0.0 };
        }
        let y = self.p.adjoint() * &wu;
        let c: Vec<f64> = self.sigma.iter().zip(y.iter()).map(|(s, yi)| s * yi.norm()).collect();
        let norm_at = |lam: f64| -> f64 {
            let mut acc = 0.0;
            for (ci, si) in c.iter().zip(&self.sigma) {
                let d = si * si + lam;
                if *ci == 0.0 {
                    continue;
                }
                if d <= 0.0 {
                    return f64::INFINITY;
                }
                acc += (ci / d).powi(2);
            }
            acc.sqrt()
        };
        let lambda = if norm_at(0.0) <= 1.0 { 0.0 } else { self.secular_root(&c, norm_at) };
        let coef = CVector::from_iterator(
            self.sigma.len(),
            self.sigma.iter().zip(y.iter()).map(|(s, yi)| {
                let d = s * s + lambda;
                if d > 0.0 {
                    yi * C64::new(s / d, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        );
        let mut b = &self.z * coef;
        let bn = b.norm();
        if bn > 1.0 {
            b.unscale_mut(bn);
        }
        let v = &self.v * &b;
        let value = weak_norm_raw(&(u - &v), &self.sqrt_w);
        InnerSolution { value, coefficients: b, v, lambda }
    }

    /// Root of `‖b(λ)‖ = 1` on `(0, ‖c‖]` by Newton's method on `1/‖b(λ)‖`
    /// (nearly linear in `λ`), falling back to bisection.
    fn secular_root(&self, c: &[f64], norm_at: impl Fn(f64) -> f64) -> f64 {
        let c_norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (mut lo, mut hi) = (0.0, c_norm.max(f64::MIN_POSITIVE));
        let mut lam = 0.5 * hi;
        for _ in 0..200 {
            let nb = norm_at(lam);
            if (nb - 1.0).abs() <= 1e-15 {
                break;
            }
            if nb > 1.0 {
                lo = lam;
            } else {
                hi = lam;
            }
            // d/dλ ‖b‖ = −Σ c_i² / d_i³ / ‖b‖
            let mut s3 = 0.0;
            for (ci, si) in c.iter().zip(&self.sigma) {
                let d = si * si + lam;
                if *ci != 0.0 && d > 0.0 {
                    s3 += ci * ci / (d * d * d);
                }
            }
            let dnb = -s3 / nb;
            // φ(λ) = 1/‖b‖ − 1, φ' = −‖b‖'/‖b‖²
            let phi = 1.0 / nb - 1.0;
            let dphi = -dnb / (nb * nb);
            let newton = lam - phi / dphi;
            lam = if dphi > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo <= 1e-16 * hi {
                break;
            }
        }
        lam
    }
}

/// `inf_{‖v‖ ≤ 1, v ∈ V} ‖u − v‖_w`.
pub fn inner_infimum(u: &HVector, v: &Frame, w: &WeakNormWeights) -> Result<InnerSolution> {
    if u.dim() != v.ambient_dim() {
        return invalid("vector and frame live in different spaces");
    }
    Ok(InnerSolver::new(v, w)?.solve(u.as_vector()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{basis_vector, orthonormalize};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn span(vs: &[CVector]) -> Frame {
        let hv: Vec<HVector> = vs.iter().map(|v| HVector::from_vector(v.clone()).unwrap()).collect();
        orthonormalize(&hv, 1e-12).unwrap()
    }

    #[test]
    fn orthogonal_spans_give_zero_minimizer() {
        let w = WeakNormWeights::canonical(3);
        let s = inner_infimum(&HVector::basis(3, 0).unwrap(), &span(&[basis_vector(3, 1)]), &w).unwrap();
        assert!(s.coefficients.norm() < 1e-15);
        assert!((s.value - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constraint_binds_for_long_targets() {
        // u = 3 e_0 and V = span{e_0}: the best v in the unit ball is e_0
        let w = WeakNormWeights::canonical(2);
        let u = HVector::from_real(&[3.0, 0.0]).unwrap();
        let s = inner_infimum(&u, &span(&[basis_vector(2, 0)]), &w).unwrap();
        assert!((s.coefficients.norm() - 1.0).abs() < 1e-12);
        assert!((s.value - 2.0 * 0.5f64.sqrt()).abs() < 1e-12);
        assert!(s.lambda > 0.0);
    }

    #[test]
    fn matches_dense_grid_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = WeakNormWeights::canonical(5);
        for _ in 0..10 {
            let v = crate::gallery::random::gaussian_vector(5, &mut rng);
            let frame = span(&[v]);
            let u = crate::gallery::random::gaussian_vector(5, &mut rng);
            let sol = InnerSolver::new(&frame, &w).unwrap().solve(&u);
            let q = frame.basis().column(0).into_owned();
            let mut best = f64::INFINITY;
            for i in 0..=400 {
                let r = (i as f64 / 400.0).sqrt();
                for j in 0..400 {
                    let t = 2.0 * std::f64::consts::PI * j as f64 / 400.0;
                    let b = C64::from_polar(r, t);
                    let cand = &u - &q * b;
                    best = best.min(weak_norm_raw(&cand, &w.sqrt_by_position()));
                }
            }
            assert!(sol.value <= best + 1e-12);
            assert!(best - sol.value < 1e-3 * best.max(1e-3));
        }
    }

    #[test]
    fn empty_frame_returns_weighted_norm() {
        let w = WeakNormWeights::canonical(2);
        let u = HVector::from_real(&[1.0, 1.0]).unwrap();
        let s = inner_infimum(&u, &Frame::empty(2), &w).unwrap();
        assert!((s.value - 0.75f64.sqrt()).abs() < 1e-15);
    }
}
