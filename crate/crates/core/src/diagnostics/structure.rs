use serde::{Deserialize, Serialize};

use super::Provenance;
use crate::error::Result;
use crate::hilbert::orthonormalize_columns;
use crate::hilbert::{orthogonal_complement, principal_angles, spectral_norm, DenseOperator, Frame};
use crate::krylov::KrylovBasis;

/// Angle below which two principal directions count as shared.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-6;

/// Off-diagonal blocks of `A` with respect to `ℋ = 𝒦 ⊕ 𝒦⊥`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducibilityReport {
    /// `‖P_{𝒦⊥} A P_𝒦‖`; zero exactly when `A𝒦 ⊆ 𝒦`.
    pub off_block_k_to_perp: f64,
    /// `‖P_𝒦 A P_{𝒦⊥}‖`; zero exactly when `A𝒦⊥ ⊆ 𝒦⊥`.
    pub off_block_perp_to_k: f64,
    pub n_used: usize,
    /// The basis reached its grade, so `𝒦_n` is the whole Krylov space.
    pub trusted: bool,
    pub provenance: Provenance,
}

/// Principal angles between `𝒦` and `A(𝒦⊥)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub principal_angles: Vec<f64>,
    pub est_dim: usize,
    pub angle_tol: f64,
    /// Smallest rejected angle minus largest accepted angle, with `π/2` and
    /// `0` standing in for missing ones.
    pub margin: f64,
    pub n_used: usize,
    pub trusted: bool,
    pub note: Option<String>,
    pub provenance: Provenance,
}

impl IntersectionReport {
    /// The margin separates accepted from rejected angles by at least ten
    /// tolerances.
    pub fn margin_ok(&self) -> bool {
        self.margin >= 10.0 * self.angle_tol
    }
}

fn frames(basis: &KrylovBasis) -> (Frame, Frame) {
    let k = basis.frame(basis.len());
    let perp = orthogonal_complement(&k);
    (k, perp)
}

/// Off-block norms against the largest frame the basis holds.
pub fn reducibility(a: &DenseOperator, basis: &KrylovBasis) -> Result<ReducibilityReport> {
    let provenance = Provenance::of_basis(a, basis)?;
    let (k, perp) = frames(basis);
    let (to_perp, from_perp) = if perp.is_empty() {
        (0.0, 0.0)
    } else {
        let ak = a.matrix() * k.basis();
        let aperp = a.matrix() * perp.basis();
        (
            spectral_norm(&(perp.basis().adjoint() * ak)),
            spectral_norm(&(k.basis().adjoint() * aperp)),
        )
    };
    Ok(ReducibilityReport {
        off_block_k_to_perp: to_perp,
        off_block_perp_to_k: from_perp,
        n_used: basis.len(),
        trusted: basis.grade().is_some(),
        provenance,
    })
}

/// Estimates `dim(𝒦 ∩ A𝒦⊥)` from the principal angles between the Krylov
/// frame and an orthonormal basis of `A𝒦⊥`.
pub fn krylov_intersection(a: &DenseOperator, basis: &KrylovBasis, angle_tol: f64) -> Result<IntersectionReport> {
    if !(angle_tol > 0.0) {
        return crate::error::invalid("angle tolerance must be positive");
    }
    let provenance = Provenance::of_basis(a, basis)?;
    let (k, perp) = frames(basis);
    let mut note = None;
    let angles = if perp.is_empty() {
        note = Some("Krylov space fills the window; its complement is empty".to_string());
        Vec::new()
    } else {
        let image = orthonormalize_columns(&(a.matrix() * perp.basis()), 1e-10);
        if image.is_empty() {
            note = Some("A annihilates the complement of the Krylov space".to_string());
        }
        principal_angles(&k, &image)?
    };
    let accepted: Vec<f64> = angles.iter().copied().filter(|&t| t < angle_tol).collect();
    let largest_accepted = accepted.iter().copied().fold(0.0, f64::max);
    let smallest_rejected = angles
        .iter()
        .copied()
        .filter(|&t| t >= angle_tol)
        .fold(std::f64::consts::FRAC_PI_2, f64::min);
    Ok(IntersectionReport {
        est_dim: accepted.len(),
        margin: smallest_rejected - largest_accepted,
        principal_angles: angles,
        angle_tol,
        n_used: basis.len(),
        trusted: basis.grade().is_some(),
        note,
        provenance,
    })
}
