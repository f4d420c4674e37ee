use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::basis::{arnoldi_step, estimate_norm};
use super::truncation::gmres_coefficients;
use super::DEFAULT_BREAKDOWN_TOL;
use crate::error::{invalid, LabError, Result};
use crate::hilbert::{CMatrix, CVector, DenseOperator, HVector, C64};

/// One iterate of a Krylov method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: usize,
    /// `‖A f_n − g‖`, recomputed from `f_n`.
    pub residual: f64,
    /// `‖f_n − f_*‖` when a reference solution was supplied.
    pub distance: Option<f64>,
    pub approximant_norm: f64,
    /// Seconds since the start of the run.
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.residual).collect()
    }

    pub fn last_residual(&self) -> Option<f64> {
        self.rows.last().map(|r| r.residual)
    }

    /// CSV with header `n,residual,distance,approximant_norm`; an absent
    /// distance is an empty field.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,residual,distance,approximant_norm\n");
        for r in &self.rows {
            let d = r.distance.map(|d| format!("{d:e}")).unwrap_or_default();
            out.push_str(&format!("{},{:e},{},{:e}\n", r.n, r.residual, d, r.approximant_norm));
        }
        out
    }
}

struct Recorder<'a> {
    a: &'a DenseOperator,
    g: &'a CVector,
    reference: Option<&'a CVector>,
    start: Instant,
    trace: IterationTrace,
}

impl<'a> Recorder<'a> {
    fn new(a: &'a DenseOperator, g: &'a CVector, reference: Option<&'a HVector>) -> Self {
        Recorder { a, g, reference: reference.map(HVector::as_vector), start: Instant::now(), trace: IterationTrace::default() }
    }

    fn record(&mut self, n: usize, x: &CVector) -> f64 {
        let residual = (self.a.apply(x) - self.g).norm();
        self.trace.rows.push(TraceRow {
            n,
            residual,
            distance: self.reference.map(|f| (x - f).norm()),
            approximant_norm: x.norm(),
            wall_time_s: self.start.elapsed().as_secs_f64(),
        });
        residual
    }
}

fn check_reference(a: &DenseOperator, reference: Option<&HVector>) -> Result<()> {
    match reference {
        Some(f) => a.check_vector(f),
        None => Ok(()),
    }
}

/// Conjugate gradients from the zero vector. See [`run_cg_traced`].
pub fn run_cg(a: &DenseOperator, g: &HVector, max_iter: usize, res_tol: f64) -> Result<(HVector, IterationTrace)> {
    run_cg_traced(a, g, max_iter, res_tol, None)
}

/// Conjugate gradients from `f_0 = 0` on a self-adjoint positive
/// (semidefinite) operator; stops once `‖A f_n − g‖ ≤ res_tol·‖g‖`.
/// For semidefinite `A` the datum must lie within `1e−8` of `ran A`.
pub fn run_cg_traced(
    a: &DenseOperator,
    g: &HVector,
    max_iter: usize,
    res_tol: f64,
    reference: Option<&HVector>,
) -> Result<(HVector, IterationTrace)> {
    a.check_vector(g)?;
    check_reference(a, reference)?;
    let flags = a.flags();
    if !(flags.self_adjoint && flags.positive) {
        return Err(LabError::PreconditionFailed("CG requires a self-adjoint positive operator".into()));
    }
    let gv = g.as_vector();
    let g_norm = gv.norm();
    if g_norm == 0.0 {
        return invalid("CG datum must be nonzero");
    }
    if !flags.invertible_known {
        // consistency: g must be (numerically) in ran A
        crate::hilbert::min_norm_solve(a, g)?;
    }
    let a_norm = estimate_norm(a);
    let mut rec = Recorder::new(a, gv, reference);
    let mut x = CVector::zeros(a.dim());
    let mut r = gv.clone();
    let mut p = r.clone();
    let mut rr = r.norm_squared();
    for n in 1..=max_iter {
        let ap = a.apply(&p);
        let pap = p.dotc(&ap).re;
        let pp = p.norm_squared();
        if pap < -1e-12 * pp {
            return Err(LabError::NotPositive { curvature: pap / pp });
        }
        if pap <= 1e-15 * a_norm * pp {
            // p is numerically in the kernel: no further progress possible
            break;
        }
        let alpha = C64::new(rr / pap, 0.0);
        x.axpy(alpha, &p, C64::new(1.0, 0.0));
        r.axpy(-alpha, &ap, C64::new(1.0, 0.0));
        let res = rec.record(n, &x);
        if res <= res_tol * g_norm {
            break;
        }
        let rr_new = r.norm_squared();
        let beta = C64::new(rr_new / rr, 0.0);
        p = &r + p * beta;
        rr = rr_new;
    }
    Ok((HVector::from_vector(x)?, rec.trace))
}

/// GMRES from the zero vector. See [`run_gmres_traced`].
pub fn run_gmres(a: &DenseOperator, g: &HVector, max_iter: usize, res_tol: f64) -> Result<(HVector, IterationTrace)> {
    run_gmres_traced(a, g, max_iter, res_tol, None)
}

/// GMRES without restarts: `f_n` minimizes `‖A f − g‖` over `𝒦_n(A, g)`.
/// Stops when the residual reaches `res_tol·‖g‖`, at the grade, or after
/// `max_iter` steps. Stagnation is visible in the trace only.
pub fn run_gmres_traced(
    a: &DenseOperator,
    g: &HVector,
    max_iter: usize,
    res_tol: f64,
    reference: Option<&HVector>,
) -> Result<(HVector, IterationTrace)> {
    a.check_vector(g)?;
    check_reference(a, reference)?;
    let gv = g.as_vector();
    let beta = gv.norm();
    if beta == 0.0 {
        return invalid("GMRES datum must be nonzero");
    }
    let dim = a.dim();
    let a_norm = estimate_norm(a);
    let mut rec = Recorder::new(a, gv, reference);
    let mut q = vec![gv.unscale(beta)];
    // R factor of H̄ after the Givens rotations, and the rotated right-hand side
    let mut rfac: Vec<Vec<C64>> = Vec::new();
    let mut hcols: Vec<Vec<C64>> = Vec::new();
    let mut rots: Vec<(f64, C64)> = Vec::new();
    let mut s = vec![C64::new(beta, 0.0)];
    let mut x = CVector::zeros(dim);
    for n in 1..=max_iter {
        let (mut h, w) = arnoldi_step(a, &q);
        let hn = w.norm();
        h.push(C64::new(hn, 0.0));
        hcols.push(h.clone());
        for (i, &(c, sn)) in rots.iter().enumerate() {
            let (u, v) = (h[i], h[i + 1]);
            h[i] = u * c + sn * v;
            h[i + 1] = -sn.conj() * u + v * c;
        }
        let (c, sn, rho) = givens(h[n - 1], h[n]);
        h[n - 1] = rho;
        h[n] = C64::new(0.0, 0.0);
        rots.push((c, sn));
        let sk = s[n - 1];
        s[n - 1] = sk * c;
        s.push(-sn.conj() * sk);
        h.truncate(n);
        rfac.push(h);

        let y = match back_substitute(&rfac, &s[..n], a_norm) {
            Some(y) => y,
            None => gmres_coefficients(&hessenberg_from(&hcols), beta),
        };
        x = CMatrix::from_columns(&q) * y;
        let res = rec.record(n, &x);
        let invariant = hn <= DEFAULT_BREAKDOWN_TOL * a_norm || q.len() == dim;
        if res <= res_tol * beta || invariant {
            break;
        }
        q.push(w.unscale(hn));
    }
    Ok((HVector::from_vector(x)?, rec.trace))
}

/// Rotation with `[c, s; −s̄, c]·[a; b] = [ρ; 0]`, `c` real.
fn givens(a: C64, b: C64) -> (f64, C64, C64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, C64::new(0.0, 0.0), a);
    }
    if na == 0.0 {
        let s = b.conj() / nb;
        return (0.0, s, C64::new(nb, 0.0));
    }
    let r = na.hypot(nb);
    let phase = a / na;
    let c = na / r;
    let s = phase * b.conj() / r;
    (c, s, phase * r)
}

/// Solves the upper-triangular system column-stored in `rfac`; `None` when a
/// pivot is negligible, in which case the least-squares problem is degenerate.
fn back_substitute(rfac: &[Vec<C64>], rhs: &[C64], a_norm: f64) -> Option<CVector> {
    let n = rfac.len();
    let mut y = CVector::from_column_slice(rhs);
    for i in (0..n).rev() {
        let piv = rfac[i][i];
        if piv.norm() <= 1e-14 * a_norm.max(f64::MIN_POSITIVE) {
            return None;
        }
        y[i] /= piv;
        let yi = y[i];
        for (k, yk) in y.iter_mut().enumerate().take(i) {
            *yk -= rfac[i][k] * yi;
        }
    }
    Some(y)
}

fn hessenberg_from(cols: &[Vec<C64>]) -> CMatrix {
    let n = cols.len();
    let mut h = CMatrix::zeros(n + 1, n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            h[(i, j)] = v;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build_shift, ShiftFill, ShiftSpec};
    use crate::hilbert::{dense_solve, min_norm_solve, OperatorFlags};

    fn real(v: &[f64]) -> HVector {
        HVector::from_real(v).unwrap()
    }

    fn diag_psd(d: &[f64]) -> DenseOperator {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|&x| C64::new(x, 0.0))));
        DenseOperator::new(m, OperatorFlags::positive_self_adjoint()).unwrap()
    }

    #[test]
    fn cg_semidefinite_reaches_minimal_norm_solution() {
        let a = diag_psd(&[1.0, 2.0, 0.0]);
        let g = real(&[1.0, 2.0, 0.0]);
        let (x, trace) = run_cg(&a, &g, 10, 1e-14).unwrap();
        let oracle = min_norm_solve(&a, &g).unwrap();
        assert!((x.as_vector() - oracle.as_vector()).norm() < 1e-12);
        assert!(trace.len() <= 2);
    }

    #[test]
    fn cg_identity_one_step() {
        let a = diag_psd(&[1.0, 1.0, 1.0]);
        let g = real(&[3.0, -1.0, 2.0]);
        let (x, trace) = run_cg(&a, &g, 10, 1e-14).unwrap();
        assert_eq!(trace.len(), 1);
        assert!((x.as_vector() - g.as_vector()).norm() < 1e-15);
    }

    #[test]
    fn cg_finite_termination() {
        let a = diag_psd(&[1.0, 2.0, 3.0]);
        let g = real(&[1.0, 1.0, 1.0]);
        let (x, trace) = run_cg(&a, &g, 10, 1e-13).unwrap();
        assert!(trace.len() <= 3);
        assert!((x.as_vector() - dense_solve(&a, &g).unwrap().as_vector()).norm() < 1e-13);
    }

    #[test]
    fn cg_rejects_indefinite_and_unflagged() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]));
        let indefinite = DenseOperator::new(m, OperatorFlags::self_adjoint()).unwrap();
        let g = real(&[0.0, 1.0]);
        assert!(matches!(run_cg(&indefinite, &g, 5, 1e-12), Err(LabError::PreconditionFailed(_))));
        let a = diag_psd(&[1.0, 0.0]);
        assert!(matches!(run_cg(&a, &real(&[1.0, 1.0]), 5, 1e-12), Err(LabError::NoSolution { .. })));
    }

    #[test]
    fn gmres_identity_one_step() {
        let a = DenseOperator::identity(4);
        let g = real(&[1.0, 2.0, 3.0, 4.0]);
        let (x, trace) = run_gmres(&a, &g, 10, 1e-12).unwrap();
        assert_eq!(trace.len(), 1);
        assert!((x.as_vector() - g.as_vector()).norm() < 1e-14);
    }

    #[test]
    fn gmres_stagnates_on_zero_fill_shift() {
        let spec = ShiftSpec::new(6, ShiftFill::ZeroFill);
        let r = build_shift(spec).unwrap();
        let g = HVector::basis(spec.dim(), spec.position(0).unwrap()).unwrap();
        let (x, trace) = run_gmres(&r, &g, 50, 1e-10).unwrap();
        assert!(trace.rows.iter().all(|row| (row.residual - 1.0).abs() < 1e-14));
        assert!(x.norm() < 1e-14);
        assert_eq!(trace.len(), 7);
    }

    #[test]
    fn gmres_cyclic_shift_solves_at_ambient_dim() {
        let spec = ShiftSpec::new(2, ShiftFill::Cyclic);
        let r = build_shift(spec).unwrap();
        let g = HVector::basis(5, spec.position(0).unwrap()).unwrap();
        let (x, trace) = run_gmres(&r, &g, 50, 1e-12).unwrap();
        assert_eq!(trace.len(), 5);
        let expect = HVector::basis(5, spec.position(-1).unwrap()).unwrap();
        assert!((x.as_vector() - expect.as_vector()).norm() < 1e-12);
        for w in trace.rows.windows(2).take(3) {
            assert!((w[1].residual - 1.0).abs() < 1e-12 && (w[0].residual - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gmres_handles_singular_compression() {
        // A q_1 has no component along q_1: the first Givens pivot comes from the subdiagonal
        let a = DenseOperator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let g = real(&[1.0, 0.0]);
        let (x, trace) = run_gmres(&a, &g, 5, 1e-14).unwrap();
        assert!((trace.rows[0].residual - 1.0).abs() < 1e-15);
        assert!(trace.last_residual().unwrap() < 1e-15);
        assert!((x.as_vector() - real(&[0.0, 1.0]).as_vector()).norm() < 1e-15);
    }

    #[test]
    fn gmres_reference_distance_and_csv() {
        let a = diag_psd(&[1.0, 2.0, 4.0]);
        let g = real(&[1.0, 1.0, 1.0]);
        let f = dense_solve(&a, &g).unwrap();
        let (_, trace) = run_gmres_traced(&a, &g, 5, 1e-14, Some(&f)).unwrap();
        assert!(trace.rows.last().unwrap().distance.unwrap() < 1e-12);
        let csv = trace.to_csv();
        assert!(csv.starts_with("n,residual,distance,approximant_norm\n"));
        assert_eq!(csv.lines().count(), trace.len() + 1);
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn givens_zeroes_second_component() {
        for (a, b) in [(C64::new(1.0, 2.0), C64::new(-0.5, 3.0)), (C64::new(0.0, 0.0), C64::new(0.0, 1.0))] {
            let (c, s, rho) = givens(a, b);
            assert!((a * c + s * b - rho).norm() < 1e-15);
            assert!((-s.conj() * a + b * c).norm() < 1e-15);
            assert!((c * c + s.norm_sqr() - 1.0).abs() < 1e-15);
        }
    }
}
