use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GapDirection, GapEstimate, GapKind, InnerSolver, WeakNormWeights};
use crate::error::{invalid, Result};
use crate::gallery::random::gaussian_vector;
use crate::hilbert::{CMatrix, CVector, Frame, HVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapOptions {
    /// Number of ascent starts when `dim U > 1`; the first `dim U` are the
    /// frame's own columns, the rest are seeded Gaussian directions.
    pub starts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions { starts: 64, max_iters: 200, seed: 0 }
    }
}

struct Objective<'a> {
    u: &'a Frame,
    wu: CMatrix,
    solver: InnerSolver,
}

impl Objective<'_> {
    /// Value `inf_v ‖Ua − v‖_w` and its gradient in `a` (up to a factor).
    fn eval(&self, a: &CVector) -> (f64, CVector) {
        let x = self.u.basis() * a;
        let sol = self.solver.solve(&x);
        let r = (&x - &sol.v).component_mul(self.solver.sqrt_weights());
        (sol.value, self.wu.adjoint() * r)
    }

    /// Projected ascent on the unit sphere of coefficients. Returns the best
    /// value, its coefficients and the number of evaluations.
    fn ascend(&self, a0: CVector, max_iters: usize) -> (f64, CVector, usize) {
        let mut a = a0.unscale(a0.norm());
        let (mut h, mut g) = self.eval(&a);
        let mut evals = 1;
        let mut step = 0.5;
        for _ in 0..max_iters {
            let radial = a.dotc(&g).re;
            let gt = &g - &a * C64::new(radial, 0.0);
            let gn = gt.norm();
            if gn <= 1e-15 * (1.0 + h) {
                break;
            }
            let dir = gt.unscale(gn);
            let mut improved = false;
            while step >= 1e-12 {
                let mut cand = &a + &dir * C64::new(step, 0.0);
                cand.unscale_mut(cand.norm());
                let (hc, gc) = self.eval(&cand);
                evals += 1;
                if hc > h {
                    let gain = hc - h;
                    a = cand;
                    h = hc;
                    g = gc;
                    improved = true;
                    step = (2.0 * step).min(1.0);
                    if gain <= 1e-15 * h {
                        return (h, a, evals);
                    }
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (h, a, evals)
    }
}

fn start_vector(i: usize, k: usize, seed: u64) -> CVector {
    if i < k {
        let mut e = CVector::zeros(k);
        e[i] = C64::new(1.0, 0.0);
        return e;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    gaussian_vector(k, &mut rng)
}

/// `d_w(B_U, B_V) = sup_{u ∈ B_U} inf_{v ∈ B_V} ‖u − v‖_w`.
///
/// The inner infimum is solved exactly. Because `h(t·u) ≤ t·h(u)` for
/// `t ∈ [0, 1]` and `h` is phase invariant, the supremum is attained on the
/// unit sphere and for `dim U = 1` it is a single evaluation. Larger `U` use
/// multi-start projected ascent, whose best value is a certified lower bound.
pub fn dw_directed(u: &Frame, v: &Frame, w: &WeakNormWeights, opts: &GapOptions) -> Result<GapEstimate> {
    if u.ambient_dim() != v.ambient_dim() {
        return invalid("frames live in different spaces");
    }
    w.check_dim(u.ambient_dim())?;
    let solver = InnerSolver::new(v, w)?;
    let estimate = |value, kind, samples_used, witness| GapEstimate {
        value,
        kind,
        samples_used,
        direction: GapDirection::UToV,
        witness,
        basis_id: w.basis_id.clone(),
    };
    match u.dim() {
        0 => Ok(estimate(0.0, GapKind::ExactSmallCase, 0, None)),
        1 => {
            let q = u.basis().column(0).into_owned();
            let sol = solver.solve(&q);
            Ok(estimate(sol.value, GapKind::ExactSmallCase, 1, Some(HVector::from_vector(q)?)))
        }
        k => {
            let sw = solver.sqrt_weights().clone();
            let wu = CMatrix::from_fn(u.ambient_dim(), k, |i, j| u.basis()[(i, j)] * sw[i]);
            let obj = Objective { u, wu, solver };
            let starts = opts.starts.max(k);
            let runs: Vec<(f64, CVector, usize)> = (0..starts)
                .into_par_iter()
                .map(|i| obj.ascend(start_vector(i, k, opts.seed), opts.max_iters))
                .collect();
            let samples: usize = runs.iter().map(|r| r.2).sum();
            let mut best = 0;
            for (i, r) in runs.iter().enumerate() {
                if r.0 > runs[best].0 {
                    best = i;
                }
            }
            let witness = u.basis() * &runs[best].1;
            let value = obj.solver.solve(&witness).value;
            Ok(estimate(value, GapKind::CertifiedLowerBound, samples, Some(HVector::from_vector(witness)?)))
        }
    }
}

/// `d̂_w(U, V) = max{d_w(B_U, B_V), d_w(B_V, B_U)}` with the weaker of the
/// two kinds.
pub fn dw_hat(u: &Frame, v: &Frame, w: &WeakNormWeights, opts: &GapOptions) -> Result<GapEstimate> {
    let uv = dw_directed(u, v, w, opts)?;
    let vu = dw_directed(v, u, w, opts)?;
    let kind = uv.kind.min(vu.kind);
    let samples = uv.samples_used + vu.samples_used;
    let top = if vu.value > uv.value { vu } else { uv };
    Ok(GapEstimate { kind, samples_used: samples, direction: GapDirection::Symmetric, ..top })
}
