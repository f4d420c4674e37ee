//! Constructors for the operators and data studied in the laboratory.
//!
//! * shifts on a symmetric window `[−N, N]` standing in for `ℓ²(ℤ)`,
//! * diagonal compact normal operators,
//! * one-dimensional periodic Friedrichs systems `∂(B f) + C f` and the
//!   prototype `−f′ + c f`, discretized Fourier-spectrally,
//! * seeded random operators for property checks.

mod data;
mod friedrichs;
pub mod random;
mod shift;
mod spectral;

pub use data::{band_limited_datum, fourier_mode, shift_noncyclic_datum, shift_szego_datum, szego_symbol, SzegoParams};
pub use friedrichs::{
    build_friedrichs_1d, build_prototype, check_friedrichs_pair, Friedrichs1DSpec, FriedrichsCheck,
    PrototypeSpec,
};
pub use shift::{build_shift, ShiftFill, ShiftSpec};
pub use spectral::{discrete_wavenumber, grid_points, spectral_derivative};

use crate::error::{invalid, Result};
use crate::hilbert::{CMatrix, DenseOperator, C64};

/// Diagonal operator with the given eigenvalues; normal by construction.
pub fn build_compact_normal(eigenvalues: &[C64]) -> Result<DenseOperator> {
    if eigenvalues.is_empty() {
        return invalid("compact normal operator needs at least one eigenvalue");
    }
    let diag = nalgebra::DVector::from_column_slice(eigenvalues);
    DenseOperator::detect(CMatrix::from_diagonal(&diag))
}
