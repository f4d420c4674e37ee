//! A weighted `ℓ²` norm metrizing the weak topology on bounded sets, and the
//! directed and symmetric weak gaps between subspaces it induces.

mod inner;
mod krylov;
mod search;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::gallery::ShiftSpec;
use crate::hilbert::{CVector, HVector};

pub use inner::{inner_infimum, InnerSolution, InnerSolver};
pub use krylov::{datum_continuity_check, inner_approx_trace, ContinuityEntry, ContinuityOptions};
pub use search::{dw_directed, dw_hat, GapOptions};

/// Weights `w_k = 2^{−(k+1)}` attached to a reference orthonormal basis,
/// listed by `order`: the `k`-th reference vector is the canonical vector at
/// position `order[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakNormWeights {
    pub basis_id: String,
    pub order: Vec<usize>,
    pub weights: Vec<f64>,
}

fn dyadic(len: usize) -> Vec<f64> {
    (0..len).map(|k| 0.5f64.powi(k as i32 + 1)).collect()
}

impl WeakNormWeights {
    /// Canonical basis in storage order.
    pub fn canonical(dim: usize) -> Self {
        WeakNormWeights { basis_id: "canonical".into(), order: (0..dim).collect(), weights: dyadic(dim) }
    }

    /// Canonical basis of a shift window taken in the order
    /// `e_0, e_1, e_{−1}, e_2, e_{−2}, …`, so weights decay with `|n|`.
    pub fn zigzag(spec: &ShiftSpec) -> Self {
        let r = spec.radius as i64;
        let mut order = vec![r as usize];
        for n in 1..=r {
            order.push((r + n) as usize);
            order.push((r - n) as usize);
        }
        let dim = order.len();
        WeakNormWeights { basis_id: "shift_zigzag".into(), order, weights: dyadic(dim) }
    }

    pub fn dim(&self) -> usize {
        self.order.len()
    }

    /// Weight of each storage position.
    pub fn by_position(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.dim()];
        for (k, &p) in self.order.iter().enumerate() {
            w[p] = self.weights[k];
        }
        w
    }

    pub(crate) fn sqrt_by_position(&self) -> CVector {
        CVector::from_iterator(self.dim(), self.by_position().into_iter().map(|x| crate::hilbert::c64(x.sqrt(), 0.0)))
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return invalid(format!("weights cover dimension {}, got {dim}", self.dim()));
        }
        Ok(())
    }
}

/// `‖x‖_w = (Σ_k w_k |⟨e_k, x⟩|²)^{1/2}`.
pub fn weak_norm(x: &HVector, w: &WeakNormWeights) -> Result<f64> {
    w.check_dim(x.dim())?;
    Ok(weak_norm_raw(x.as_vector(), &w.sqrt_by_position()))
}

pub(crate) fn weak_norm_raw(x: &CVector, sqrt_w: &CVector) -> f64 {
    x.component_mul(sqrt_w).norm()
}

/// How much a gap value can be trusted. Ordered from weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapKind {
    Heuristic,
    CertifiedLowerBound,
    ExactSmallCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapDirection {
    UToV,
    VToU,
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate {
    pub value: f64,
    pub kind: GapKind,
    pub samples_used: usize,
    pub direction: GapDirection,
    /// A unit vector `u` of the source space with `inf_v ρ_w(u, v) = value`.
    pub witness: Option<HVector>,
    pub basis_id: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::ShiftFill;

    #[test]
    fn weak_norm_examples() {
        let w = WeakNormWeights::canonical(4);
        let e0 = HVector::basis(4, 0).unwrap();
        assert!((weak_norm(&e0, &w).unwrap() - 0.5f64.sqrt()).abs() < 1e-16);
        assert_eq!(weak_norm(&HVector::zeros(4), &w).unwrap(), 0.0);
        let x = HVector::from_real(&[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((weak_norm(&x, &w).unwrap() - 0.75f64.sqrt()).abs() < 1e-15);
        assert!(weak_norm(&HVector::zeros(3), &w).is_err());
    }

    #[test]
    fn zigzag_orders_by_distance_from_origin() {
        let spec = ShiftSpec::new(2, ShiftFill::ZeroFill);
        let w = WeakNormWeights::zigzag(&spec);
        assert_eq!(w.order, vec![2, 3, 1, 4, 0]);
        let pos = w.by_position();
        assert_eq!(pos[2], 0.5);
        assert_eq!(pos[3], 0.25);
        assert_eq!(pos[1], 0.125);
        assert!(w.weights.windows(2).all(|p| p[1] < p[0]));
    }
}
