use serde::{Deserialize, Serialize};

use super::spectral::spectral_derivative;
use crate::error::{invalid, LabError, Result};
use crate::hilbert::{hermitian_eigenvalues, hermitian_part, spectral_norm, CMatrix, DenseOperator, C64};

/// Periodic one-dimensional Friedrichs system `A f = ∂(B f) + C f` for
/// `f: [0, L) → ℂ^r`, sampled on `points` grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Friedrichs1DSpec {
    pub r: usize,
    pub points: usize,
    pub length: f64,
    /// `B(x_j)`, Hermitian, one per grid node.
    pub b: Vec<CMatrix>,
    /// `C(x_j)`, one per grid node.
    pub c: Vec<CMatrix>,
    /// Claimed lower bound of `C + C* + ∂B`.
    pub mu: f64,
}

impl Friedrichs1DSpec {
    /// Spatially constant coefficients.
    pub fn constant(points: usize, length: f64, b: CMatrix, c: CMatrix, mu: f64) -> Self {
        Friedrichs1DSpec {
            r: b.nrows(),
            points,
            length,
            b: vec![b; points],
            c: vec![c; points],
            mu,
        }
    }

    pub fn dim(&self) -> usize {
        self.r * self.points
    }
}

/// `−d/dx + c(x)` on a periodic box, `c` sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeSpec {
    pub c: Vec<C64>,
    pub length: f64,
}

impl PrototypeSpec {
    pub fn constant(modes: usize, c: C64) -> Self {
        PrototypeSpec { c: vec![c; modes], length: 2.0 * std::f64::consts::PI }
    }

    pub fn modes(&self) -> usize {
        self.c.len()
    }
}

/// Outcome of testing whether `(T, T̃)` behaves as a Friedrichs pair, i.e.
/// whether `T + T̃` is self-adjoint with a strictly positive bottom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FriedrichsCheck {
    pub is_pair: bool,
    pub sum_self_adjoint_defect: f64,
    pub bottom: f64,
    pub bound: f64,
}

/// Reports `‖S − S*‖`, `λ_min((S + S*)/2)` and `‖S‖` for `S = T + T̃`.
///
/// `is_pair` requires the defect to be at most `tol` and the bottom to exceed
/// `tol`, so that a sum which is zero up to round-off is never accepted.
pub fn check_friedrichs_pair(t: &DenseOperator, t_tilde: &DenseOperator, tol: f64) -> Result<FriedrichsCheck> {
    if t.dim() != t_tilde.dim() {
        return invalid("Friedrichs pair members act on different spaces");
    }
    let sum = t.matrix() + t_tilde.matrix();
    let defect = spectral_norm(&(&sum - sum.adjoint()));
    let bottom = hermitian_eigenvalues(&sum).first().copied().unwrap_or(0.0);
    let bound = spectral_norm(&sum);
    Ok(FriedrichsCheck {
        is_pair: defect <= tol && bottom > tol,
        sum_self_adjoint_defect: defect,
        bottom,
        bound,
    })
}

fn block_index(point: usize, comp: usize, r: usize) -> usize {
    point * r + comp
}

/// Builds `(A₀, Ã₀)` with `A₀ = (D⊗I)·B + C` and its formal adjoint
/// `Ã₀ = −(D⊗I)·B + C* + ∂B`, where `D` is the spectral derivative and `∂B`
/// its action on the samples of `B`. Their sum is `C + C* + ∂B` pointwise.
pub fn build_friedrichs_1d(spec: &Friedrichs1DSpec) -> Result<(DenseOperator, DenseOperator)> {
    let (r, m) = (spec.r, spec.points);
    if r == 0 || m == 0 {
        return invalid("Friedrichs system needs r >= 1 and at least one grid node");
    }
    if !(spec.length > 0.0) {
        return invalid("box length must be positive");
    }
    if spec.b.len() != m || spec.c.len() != m {
        return invalid("coefficient samples must match the number of grid nodes");
    }
    if spec.b.iter().chain(&spec.c).any(|x| x.nrows() != r || x.ncols() != r) {
        return invalid(format!("coefficients must be {r}x{r}"));
    }
    if !(spec.mu > 0.0) {
        return Err(LabError::NotFriedrichs {
            reason: format!("positivity constant must be strictly positive, got {}", spec.mu),
            point: None,
        });
    }
    for (j, b) in spec.b.iter().enumerate() {
        let defect = (b - b.adjoint()).norm();
        if defect > 1e-12 * b.norm().max(1.0) {
            return Err(LabError::NotFriedrichs {
                reason: format!("B is not Hermitian at node {j} (defect {defect:.3e})"),
                point: Some(j),
            });
        }
    }

    let d = spectral_derivative(m, spec.length);
    let db: Vec<CMatrix> = (0..m)
        .map(|j| {
            let mut acc = CMatrix::zeros(r, r);
            for k in 0..m {
                acc += &spec.b[k] * d[(j, k)];
            }
            hermitian_part(&acc)
        })
        .collect();

    for (j, dbj) in db.iter().enumerate() {
        let sym = &spec.c[j] + spec.c[j].adjoint() + dbj;
        let low = hermitian_eigenvalues(&sym)[0];
        if low < spec.mu - 1e-10 {
            return Err(LabError::NotFriedrichs {
                reason: format!("C + C* + ∂B has eigenvalue {low:.6e} < μ = {} at node {j}", spec.mu),
                point: Some(j),
            });
        }
    }

    let n = r * m;
    let mut a0 = CMatrix::zeros(n, n);
    let mut a0t = CMatrix::zeros(n, n);
    for j in 0..m {
        for k in 0..m {
            let djk = d[(j, k)];
            if djk != C64::new(0.0, 0.0) {
                for a in 0..r {
                    for b in 0..r {
                        let v = djk * spec.b[k][(a, b)];
                        a0[(block_index(j, a, r), block_index(k, b, r))] += v;
                        a0t[(block_index(j, a, r), block_index(k, b, r))] -= v;
                    }
                }
            }
        }
        let c_adj = spec.c[j].adjoint();
        for a in 0..r {
            for b in 0..r {
                let (p, q) = (block_index(j, a, r), block_index(j, b, r));
                a0[(p, q)] += spec.c[j][(a, b)];
                a0t[(p, q)] += c_adj[(a, b)] + db[j][(a, b)];
            }
        }
    }
    let a0 = DenseOperator::detect(a0)?;
    let a0t = DenseOperator::detect(a0t)?;
    Ok((a0, a0t))
}

/// `A = −D + diag(c)`; requires `min Re c > 0` on the samples.
pub fn build_prototype(spec: &PrototypeSpec) -> Result<DenseOperator> {
    let m = spec.modes();
    if m == 0 {
        return invalid("prototype needs at least one grid node");
    }
    if !(spec.length > 0.0) {
        return invalid("box length must be positive");
    }
    let (j_min, re_min) = spec
        .c
        .iter()
        .enumerate()
        .map(|(j, z)| (j, z.re))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty");
    if !(re_min > 1e-12) {
        return Err(LabError::NotFriedrichs {
            reason: format!("Re c = {re_min:.3e} is not separated from zero"),
            point: Some(j_min),
        });
    }
    let mut a = -spectral_derivative(m, spec.length);
    for (j, &cj) in spec.c.iter().enumerate() {
        a[(j, j)] += cj;
    }
    DenseOperator::detect(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{discrete_wavenumber, fourier_mode, grid_points};
    use crate::hilbert::{c64, CVector};
    use std::f64::consts::PI;

    fn scalar(v: f64) -> CMatrix {
        CMatrix::from_element(1, 1, c64(v, 0.0))
    }

    #[test]
    fn zero_b_unit_c_is_identity() {
        let spec = Friedrichs1DSpec::constant(8, 2.0 * PI, scalar(0.0), scalar(1.0), 1.0);
        let (a0, a0t) = build_friedrichs_1d(&spec).unwrap();
        assert!((a0.matrix() - CMatrix::identity(8, 8)).norm() < 1e-15);
        let chk = check_friedrichs_pair(&a0, &a0t, 1e-12).unwrap();
        assert!(chk.is_pair);
        assert!((chk.bottom - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unit_b_gives_derivative_plus_identity() {
        let spec = Friedrichs1DSpec::constant(16, 2.0 * PI, scalar(1.0), scalar(1.0), 1.0);
        let (a0, a0t) = build_friedrichs_1d(&spec).unwrap();
        let d = spectral_derivative(16, 2.0 * PI);
        assert!((a0.matrix() - (&d + CMatrix::identity(16, 16))).norm() < 1e-14);
        let chk = check_friedrichs_pair(&a0, &a0t, 1e-12).unwrap();
        assert!(chk.is_pair && (chk.bottom - 2.0).abs() < 1e-12 && (chk.bound - 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_component_constant_system() {
        let b = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]);
        let c = CMatrix::identity(2, 2) * c64(2.0, 0.0);
        let spec = Friedrichs1DSpec::constant(12, 2.0 * PI, b, c, 4.0);
        let (a0, a0t) = build_friedrichs_1d(&spec).unwrap();
        let chk = check_friedrichs_pair(&a0, &a0t, 1e-12).unwrap();
        assert!(chk.is_pair);
        assert!((chk.bottom - 4.0).abs() < 1e-12);
        // constant B commutes with D ⊗ I, so Ã₀ is the matrix adjoint here
        assert!((a0t.matrix() - a0.matrix().adjoint()).norm() < 1e-12);
    }

    #[test]
    fn variable_b_pair_sum_is_pointwise_symbol() {
        // B(x) = 2 + cos x, C = 1: C + C* + B' = 2 − sin x ≥ 1
        let m = 24;
        let xs = grid_points(m, 2.0 * PI);
        let spec = Friedrichs1DSpec {
            r: 1,
            points: m,
            length: 2.0 * PI,
            b: xs.iter().map(|x| scalar(2.0 + x.cos())).collect(),
            c: vec![scalar(1.0); m],
            mu: 1.0,
        };
        let (a0, a0t) = build_friedrichs_1d(&spec).unwrap();
        let chk = check_friedrichs_pair(&a0, &a0t, 1e-10).unwrap();
        assert!(chk.is_pair);
        let expect_min = xs.iter().map(|x| 2.0 - x.sin()).fold(f64::INFINITY, f64::min);
        assert!((chk.bottom - expect_min).abs() < 1e-10);
    }

    #[test]
    fn positivity_violation_reports_node() {
        let spec = Friedrichs1DSpec::constant(8, 2.0 * PI, scalar(1.0), scalar(0.25), 1.0);
        match build_friedrichs_1d(&spec) {
            Err(LabError::NotFriedrichs { point: Some(_), .. }) => {}
            other => panic!("expected NotFriedrichs, got {other:?}"),
        }
        let bad_mu = Friedrichs1DSpec::constant(8, 2.0 * PI, scalar(1.0), scalar(1.0), 0.0);
        assert!(build_friedrichs_1d(&bad_mu).is_err());
    }

    #[test]
    fn prototype_unit_coefficient() {
        let a = build_prototype(&PrototypeSpec::constant(32, c64(1.0, 0.0))).unwrap();
        let sum = a.matrix() + a.matrix().adjoint();
        assert_eq!(sum, CMatrix::identity(32, 32) * c64(2.0, 0.0));
        let chk = check_friedrichs_pair(&a, &a.adjoint(), 1e-12).unwrap();
        assert!(chk.is_pair && chk.bottom == 2.0 && (chk.bound - 2.0).abs() < 1e-12);
    }

    #[test]
    fn prototype_variable_coefficient_bottom() {
        let m = 32;
        let xs = grid_points(m, 2.0 * PI);
        let spec = PrototypeSpec { c: xs.iter().map(|x| c64(2.0 + x.sin(), 0.3)).collect(), length: 2.0 * PI };
        let a = build_prototype(&spec).unwrap();
        let chk = check_friedrichs_pair(&a, &a.adjoint(), 1e-12).unwrap();
        let expect = 2.0 * xs.iter().map(|x| 2.0 + x.sin()).fold(f64::INFINITY, f64::min);
        assert!((chk.bottom - expect).abs() < 1e-12);
        assert!((expect - 2.0).abs() < 1e-12);
    }

    #[test]
    fn prototype_mode_is_eigenvector() {
        let m = 16;
        let a = build_prototype(&PrototypeSpec::constant(m, c64(1.0, 0.0))).unwrap();
        for k in [1i64, 3, -5] {
            let g = fourier_mode(m, k);
            let kh = discrete_wavenumber(m, 2.0 * PI, k);
            let expect: CVector = &g * c64(1.0, -kh);
            assert!((a.apply(&g) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn prototype_rejects_nonpositive_real_part() {
        let spec = PrototypeSpec { c: vec![c64(1.0, 0.0), c64(0.0, 1.0)], length: 1.0 };
        assert!(matches!(build_prototype(&spec), Err(LabError::NotFriedrichs { point: Some(1), .. })));
    }

    #[test]
    fn derivative_pair_with_zero_sum_is_rejected() {
        let d = DenseOperator::detect(spectral_derivative(8, 2.0 * PI)).unwrap();
        let md = DenseOperator::detect(-spectral_derivative(8, 2.0 * PI)).unwrap();
        let chk = check_friedrichs_pair(&d, &md, 1e-12).unwrap();
        assert!(!chk.is_pair && chk.bottom == 0.0);
        let id = DenseOperator::identity(4);
        let chk = check_friedrichs_pair(&id, &id, 1e-12).unwrap();
        assert!(chk.is_pair && chk.bottom == 2.0);
    }
}
