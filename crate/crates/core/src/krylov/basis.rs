use crate::error::{invalid, LabError, Result};
use crate::hilbert::{CMatrix, CVector, DenseOperator, Frame, HVector, C64};

/// Relative extension residual at which the Arnoldi process declares the
/// Krylov space invariant.
pub const DEFAULT_BREAKDOWN_TOL: f64 = 1e-12;

/// Orthonormal Arnoldi basis of `𝒦_k(A, g)` with its Hessenberg compression
/// `A Q_k = Q_{k+1} H̄_k`.
#[derive(Debug, Clone)]
pub struct KrylovBasis {
    q: CMatrix,
    hessenberg: CMatrix,
    next: Option<CVector>,
    grade: Option<usize>,
    breakdown_tol: f64,
    a_norm: f64,
    g_norm: f64,
    extension_residuals: Vec<f64>,
    operator_fingerprint: u64,
    datum_fingerprint: u64,
}

impl KrylovBasis {
    pub fn ambient_dim(&self) -> usize {
        self.q.nrows()
    }

    /// Number of basis vectors built.
    pub fn len(&self) -> usize {
        self.q.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.q.ncols() == 0
    }

    /// Frame of `𝒦_n`, `n` clamped to the built size.
    pub fn frame(&self, n: usize) -> Frame {
        let n = n.min(self.len());
        Frame::from_matrix_unchecked(self.q.columns(0, n).into_owned())
    }

    /// All nested frames `𝒦_1 ⊆ 𝒦_2 ⊆ …`.
    pub fn frames(&self) -> Vec<Frame> {
        (1..=self.len()).map(|n| self.frame(n)).collect()
    }

    /// The full `(k+1)×k` Hessenberg matrix.
    pub fn hessenberg(&self) -> &CMatrix {
        &self.hessenberg
    }

    /// Leading `(n+1)×n` block `H̄_n`.
    pub fn hessenberg_rect(&self, n: usize) -> CMatrix {
        let n = n.min(self.len());
        self.hessenberg.view((0, 0), (n + 1, n)).into_owned()
    }

    /// Leading `n×n` block `H_n = Q_n* A Q_n`.
    pub fn hessenberg_square(&self, n: usize) -> CMatrix {
        let n = n.min(self.len());
        self.hessenberg.view((0, 0), (n, n)).into_owned()
    }

    pub fn grade(&self) -> Option<usize> {
        self.grade
    }

    /// `q_{k+1}`, present when the build stopped at `n_max` before the grade.
    pub fn next_vector(&self) -> Option<&CVector> {
        self.next.as_ref()
    }

    pub fn breakdown_tol(&self) -> f64 {
        self.breakdown_tol
    }

    /// The norm estimate used to scale the breakdown test.
    pub fn a_norm(&self) -> f64 {
        self.a_norm
    }

    pub fn g_norm(&self) -> f64 {
        self.g_norm
    }

    /// `h_{n+1,n}` for every built `n`.
    pub fn extension_residuals(&self) -> &[f64] {
        &self.extension_residuals
    }

    /// Restriction to the first `n` vectors. A recorded grade is kept only if
    /// it lies within the restriction.
    pub fn truncated(&self, n: usize) -> KrylovBasis {
        let n = n.min(self.len());
        KrylovBasis {
            q: self.q.columns(0, n).into_owned(),
            hessenberg: self.hessenberg_rect(n),
            next: if n < self.len() { Some(self.q.column(n).into_owned()) } else { self.next.clone() },
            grade: self.grade.filter(|&m| m <= n),
            extension_residuals: self.extension_residuals[..n].to_vec(),
            ..self.clone()
        }
    }

    pub fn operator_fingerprint(&self) -> u64 {
        self.operator_fingerprint
    }

    pub fn datum_fingerprint(&self) -> u64 {
        self.datum_fingerprint
    }

    /// Fails unless the basis was built from exactly this `(A, g)`.
    pub fn check_provenance(&self, a: &DenseOperator, g: &HVector) -> Result<()> {
        if a.fingerprint() != self.operator_fingerprint || datum_fingerprint(g) != self.datum_fingerprint {
            return invalid("Krylov basis was built from a different operator or datum");
        }
        Ok(())
    }
}

pub(crate) fn datum_fingerprint(g: &HVector) -> u64 {
    crate::hilbert::fingerprint_values(
        std::iter::once(g.dim() as f64).chain(g.entries().iter().flat_map(|z| [z.re, z.im])),
    )
}

/// Lower estimate of `‖A‖`: the larger of a power-iteration estimate and the
/// largest column norm.
pub fn estimate_norm(a: &DenseOperator) -> f64 {
    let col = a.matrix().column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    a.norm_estimate(30).max(col)
}

/// One Arnoldi step: orthogonalizes `A q_j` against `q` with modified
/// Gram–Schmidt plus one reorthogonalization pass. Returns the coefficients
/// `h_{0..=j, j}` and the unnormalized residual.
pub(crate) fn arnoldi_step(a: &DenseOperator, q: &[CVector]) -> (Vec<C64>, CVector) {
    let last = q.last().expect("at least one basis vector");
    let mut w = a.apply(last);
    let mut h = vec![C64::new(0.0, 0.0); q.len()];
    for _ in 0..2 {
        for (i, qi) in q.iter().enumerate() {
            let c = qi.dotc(&w);
            w.axpy(-c, qi, C64::new(1.0, 0.0));
            h[i] += c;
        }
    }
    (h, w)
}

/// Builds `𝒦_n(A, g)` for `n ≤ n_max` by the Arnoldi recursion. The process
/// stops at the grade `m` once the extension residual falls to
/// `breakdown_tol · ‖A‖`; a space filling the ambient dimension is always
/// invariant.
pub fn krylov_basis(a: &DenseOperator, g: &HVector, n_max: usize, breakdown_tol: f64) -> Result<KrylovBasis> {
    a.check_vector(g)?;
    let g_norm = g.norm();
    if g_norm == 0.0 {
        return invalid("Krylov datum must be nonzero");
    }
    if n_max == 0 {
        return invalid("n_max must be at least 1");
    }
    if !(breakdown_tol >= 0.0) {
        return invalid("breakdown tolerance must be nonnegative");
    }
    let dim = a.dim();
    let a_norm = estimate_norm(a);
    let threshold = breakdown_tol * a_norm;
    let mut q = vec![g.as_vector().unscale(g_norm)];
    let mut cols: Vec<Vec<C64>> = Vec::new();
    let mut ext = Vec::new();
    let mut grade = None;
    let mut next = None;
    loop {
        let (mut h, w) = arnoldi_step(a, &q);
        let res = w.norm();
        if !res.is_finite() {
            return Err(LabError::InvalidInput("Arnoldi recursion produced non-finite values".into()));
        }
        h.push(C64::new(res, 0.0));
        cols.push(h);
        ext.push(res);
        if res <= threshold || q.len() == dim {
            grade = Some(q.len());
            break;
        }
        if q.len() == n_max {
            next = Some(w.unscale(res));
            break;
        }
        q.push(w.unscale(res));
    }
    let k = q.len();
    let mut hess = CMatrix::zeros(k + 1, k);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            hess[(i, j)] = v;
        }
    }
    Ok(KrylovBasis {
        q: CMatrix::from_columns(&q),
        hessenberg: hess,
        next,
        grade,
        breakdown_tol,
        a_norm,
        g_norm,
        extension_residuals: ext,
        operator_fingerprint: a.fingerprint(),
        datum_fingerprint: datum_fingerprint(g),
    })
}

pub fn grade(basis: &KrylovBasis) -> Option<usize> {
    basis.grade()
}
