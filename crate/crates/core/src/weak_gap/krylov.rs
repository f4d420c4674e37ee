use serde::{Deserialize, Serialize};

use super::{dw_directed, dw_hat, GapEstimate, GapOptions, WeakNormWeights};
use crate::error::{invalid, Result};
use crate::hilbert::{DenseOperator, HVector};
use crate::krylov::{krylov_basis, KrylovBasis, DEFAULT_BREAKDOWN_TOL};

/// Entry `N − 1` is `d̂_w(𝒦_N, 𝒦_{n_full})` with `n_full = basis.len()`
/// standing in for the closure of the Krylov space.
pub fn inner_approx_trace(
    a: &DenseOperator,
    g: &HVector,
    basis: &KrylovBasis,
    w: &WeakNormWeights,
    opts: &GapOptions,
) -> Result<Vec<GapEstimate>> {
    basis.check_provenance(a, g)?;
    let full = basis.frame(basis.len());
    (1..=basis.len()).map(|n| dw_hat(&basis.frame(n), &full, w, opts)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityOptions {
    /// Krylov dimension used as the closure surrogate; `None` builds to the
    /// grade (at most the ambient dimension).
    pub closure_n: Option<usize>,
    pub breakdown_tol: f64,
    pub gap: GapOptions,
}

impl Default for ContinuityOptions {
    fn default() -> Self {
        ContinuityOptions { closure_n: None, breakdown_tol: DEFAULT_BREAKDOWN_TOL, gap: GapOptions::default() }
    }
}

/// Gaps between the Krylov space of one perturbed datum and that of the limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityEntry {
    /// `‖g_n − g‖`.
    pub datum_distance: f64,
    /// `d_w(B_{𝒦(A,g)}, B_{𝒦(A,g_n)})`.
    pub limit_to_perturbed: GapEstimate,
    /// `d_w(B_{𝒦(A,g_n)}, B_{𝒦(A,g)})`.
    pub perturbed_to_limit: GapEstimate,
    /// `d̂_w`.
    pub symmetric: GapEstimate,
}

/// Weak gaps between `𝒦(A, g_n)` and `𝒦(A, g)` for a sequence `g_n → g`.
/// The sequence must approach `g`: `‖g_n − g‖` may not increase.
pub fn datum_continuity_check(
    a: &DenseOperator,
    g: &HVector,
    perturbed: &[HVector],
    w: &WeakNormWeights,
    opts: &ContinuityOptions,
) -> Result<Vec<ContinuityEntry>> {
    a.check_vector(g)?;
    let n_full = opts.closure_n.unwrap_or(a.dim());
    let limit = krylov_basis(a, g, n_full, opts.breakdown_tol)?;
    let lf = limit.frame(limit.len());
    let mut prev = f64::INFINITY;
    let mut out = Vec::with_capacity(perturbed.len());
    for gn in perturbed {
        a.check_vector(gn)?;
        let dist = (gn.as_vector() - g.as_vector()).norm();
        if dist > prev * (1.0 + 1e-12) + 1e-15 {
            return invalid("perturbed data must approach the limit datum monotonically in norm");
        }
        prev = dist;
        let b = krylov_basis(a, gn, n_full, opts.breakdown_tol)?;
        let pf = b.frame(b.len());
        let lp = dw_directed(&lf, &pf, w, &opts.gap)?;
        let pl = dw_directed(&pf, &lf, w, &opts.gap)?;
        let kind = lp.kind.min(pl.kind);
        let samples = lp.samples_used + pl.samples_used;
        let top = if pl.value > lp.value { pl.clone() } else { lp.clone() };
        let symmetric = GapEstimate { kind, samples_used: samples, direction: super::GapDirection::Symmetric, ..top };
        out.push(ContinuityEntry {
            datum_distance: dist,
            limit_to_perturbed: lp,
            perturbed_to_limit: GapEstimate { direction: super::GapDirection::VToU, ..pl },
            symmetric,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build_shift, ShiftFill, ShiftSpec};
    use crate::hilbert::{c64, CMatrix, CVector, C64};

    fn diag(d: &[f64]) -> DenseOperator {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|&x| C64::new(x, 0.0))));
        DenseOperator::detect(m).unwrap()
    }

    #[test]
    fn identity_trace_is_zero() {
        let a = DenseOperator::identity(4);
        let g = HVector::from_real(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = krylov_basis(&a, &g, 4, DEFAULT_BREAKDOWN_TOL).unwrap();
        let t = inner_approx_trace(&a, &g, &b, &WeakNormWeights::canonical(4), &GapOptions::default()).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t[0].value < 1e-15);
    }

    #[test]
    fn diagonal_trace_vanishes_at_grade() {
        let a = diag(&[1.0, 2.0, 3.0]);
        let g = HVector::from_real(&[1.0, 1.0, 1.0]).unwrap();
        let b = krylov_basis(&a, &g, 3, DEFAULT_BREAKDOWN_TOL).unwrap();
        let t = inner_approx_trace(&a, &g, &b, &WeakNormWeights::canonical(3), &GapOptions::default()).unwrap();
        assert!(t[2].value < 1e-12);
        assert!(t[0].value > 1e-3);
    }

    #[test]
    fn shift_trace_strictly_decreases() {
        let spec = ShiftSpec::new(12, ShiftFill::ZeroFill);
        let r = build_shift(spec).unwrap();
        let g = HVector::basis(spec.dim(), spec.position(0).unwrap()).unwrap();
        let b = krylov_basis(&r, &g, 10, DEFAULT_BREAKDOWN_TOL).unwrap();
        let w = WeakNormWeights::zigzag(&spec);
        let t = inner_approx_trace(&r, &g, &b, &w, &GapOptions::default()).unwrap();
        for (n, est) in t.iter().enumerate().take(9) {
            // the farthest-reaching excluded direction is e_{n+1}, weight 2^{-2(n+1)}
            let expect = 0.5f64.powi(n as i32 + 1);
            assert!((est.value - expect).abs() < 1e-9 * expect, "N = {}: {} vs {}", n + 1, est.value, expect);
        }
        assert!(t.windows(2).all(|p| p[1].value < p[0].value));
    }

    #[test]
    fn scaled_data_have_zero_gap() {
        let a = diag(&[1.0, 2.0, 3.0, 4.0]);
        let g = HVector::from_real(&[1.0, 1.0, 0.0, 1.0]).unwrap();
        let data: Vec<HVector> = (2..6).map(|n| g.scaled(c64(1.0 - 1.0 / n as f64, 0.0))).collect();
        let out = datum_continuity_check(&a, &g, &data, &WeakNormWeights::canonical(4), &ContinuityOptions::default()).unwrap();
        assert!(out.iter().all(|e| e.symmetric.value < 1e-10));
    }

    #[test]
    fn data_inside_the_krylov_space_converge() {
        let a = diag(&[1.0, 2.0, 3.0, 4.0]);
        let g = HVector::from_real(&[1.0, 1.0, 0.0, 0.0]).unwrap();
        let ag = a.apply(g.as_vector());
        let data: Vec<HVector> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|n| HVector::from_vector(g.as_vector() + &ag / c64(*n, 0.0)).unwrap())
            .collect();
        let out = datum_continuity_check(&a, &g, &data, &WeakNormWeights::canonical(4), &ContinuityOptions::default()).unwrap();
        // g and Ag span the same invariant plane as every g_n
        assert!(out.iter().all(|e| e.symmetric.value < 1e-10));
    }

    #[test]
    fn shift_tail_perturbation_is_one_sided() {
        let spec = ShiftSpec::new(8, ShiftFill::ZeroFill);
        let r = build_shift(spec).unwrap();
        let e = |n: i64| crate::hilbert::basis_vector(spec.dim(), spec.position(n).unwrap());
        let g = HVector::from_vector(e(0)).unwrap();
        let data: Vec<HVector> = (2..=5)
            .map(|n| HVector::from_vector(e(0) + e(-n) / c64(n as f64, 0.0)).unwrap())
            .collect();
        let w = WeakNormWeights::zigzag(&spec);
        let out = datum_continuity_check(&r, &g, &data, &w, &ContinuityOptions::default()).unwrap();
        for entry in &out {
            assert!(entry.limit_to_perturbed.value < 1e-10);
            // e_{-1} lies in K(R, g_n) and has weight 1/8
            assert!(entry.symmetric.value >= 0.125f64.sqrt() - 1e-8);
        }
    }

    #[test]
    fn diverging_sequence_is_rejected() {
        let a = DenseOperator::identity(2);
        let g = HVector::from_real(&[1.0, 0.0]).unwrap();
        let data = vec![HVector::from_real(&[1.0, 0.1]).unwrap(), HVector::from_real(&[1.0, 0.5]).unwrap()];
        assert!(datum_continuity_check(&a, &g, &data, &WeakNormWeights::canonical(2), &ContinuityOptions::default()).is_err());
    }
}
