//! Seeded random operators for property checks and acceptance runs.

use nalgebra::QR;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::hilbert::{hermitian_part, CMatrix, CVector, DenseOperator, OperatorFlags, C64};

pub fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn gaussian_vector<R: Rng>(dim: usize, rng: &mut R) -> CVector {
    CVector::from_fn(dim, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-distributed unitary (QR of a Gaussian matrix with phase fix).
pub fn unitary<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = QR::new(gaussian_matrix(dim, dim, rng));
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

fn with_spectrum(u: &CMatrix, eig: &[f64]) -> CMatrix {
    let d = CMatrix::from_diagonal(&CVector::from_iterator(eig.len(), eig.iter().map(|&x| C64::new(x, 0.0))));
    hermitian_part(&(u * d * u.adjoint()))
}

fn uniform_spectrum<R: Rng>(dim: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
}

/// Hermitian positive definite with spectrum uniform in `[lo, hi]`.
pub fn spd<R: Rng>(dim: usize, lo: f64, hi: f64, rng: &mut R) -> DenseOperator {
    let u = unitary(dim, rng);
    let eig = uniform_spectrum(dim, lo, hi, rng);
    let flags = OperatorFlags { invertible_known: true, ..OperatorFlags::positive_self_adjoint() };
    DenseOperator::new(with_spectrum(&u, &eig), flags).expect("constructed SPD")
}

/// Hermitian positive semidefinite with a kernel of dimension `kernel_dim`
/// and nonzero spectrum in `[lo, hi]`.
pub fn psd_with_kernel<R: Rng>(dim: usize, kernel_dim: usize, lo: f64, hi: f64, rng: &mut R) -> DenseOperator {
    let u = unitary(dim, rng);
    let mut eig = uniform_spectrum(dim, lo, hi, rng);
    for e in eig.iter_mut().take(kernel_dim.min(dim)) {
        *e = 0.0;
    }
    DenseOperator::new(with_spectrum(&u, &eig), OperatorFlags::positive_self_adjoint()).expect("constructed PSD")
}

/// Hermitian with spectrum uniform in `[−scale, scale]`.
pub fn hermitian<R: Rng>(dim: usize, scale: f64, rng: &mut R) -> DenseOperator {
    let u = unitary(dim, rng);
    let eig = uniform_spectrum(dim, -scale, scale, rng);
    DenseOperator::new(with_spectrum(&u, &eig), OperatorFlags::self_adjoint()).expect("constructed Hermitian")
}

/// Generally non-normal invertible operator `U Σ V*` with singular values
/// uniform in `[1, cond]`.
pub fn invertible<R: Rng>(dim: usize, cond: f64, rng: &mut R) -> DenseOperator {
    let u = unitary(dim, rng);
    let v = unitary(dim, rng);
    let s = uniform_spectrum(dim, 1.0, cond, rng);
    let d = CMatrix::from_diagonal(&CVector::from_iterator(dim, s.iter().map(|&x| C64::new(x, 0.0))));
    DenseOperator::detect(u * d * v.adjoint()).expect("constructed invertible")
}
