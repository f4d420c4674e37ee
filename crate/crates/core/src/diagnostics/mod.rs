//! Structural quantities of a pair `(A, g)` and the solvability verdicts
//! built from them.

mod structure;
mod vector_class;
mod verdict;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hilbert::{DenseOperator, HVector};
use crate::krylov::KrylovBasis;

pub use structure::{krylov_intersection, reducibility, IntersectionReport, ReducibilityReport, DEFAULT_ANGLE_TOL};
pub use vector_class::{
    classify_log_norms, classify_norm_sequence, vector_class, ClassFit, ClassVerdict, QaVerdict, VectorClassReport,
    FLAT_SLOPE, GROWING_SLOPE, QA_CONVERGING_MIN, QA_DIVERGING_MAX,
};
pub use verdict::{
    diagnose, solution_distance_trace, verdict, DiagnoseOptions, DiagnosticsReport, DistanceEvidence, GuardStatus,
    Solvability, SolvabilityVerdict, VerdictInputs, VerdictTolerances, WindowGuard,
};

/// Identifies the `(A, g)` a report was computed from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub operator_fingerprint: u64,
    pub datum_fingerprint: u64,
    pub ambient_dim: usize,
}

impl Provenance {
    pub fn of(a: &DenseOperator, g: &HVector) -> Self {
        Provenance {
            operator_fingerprint: a.fingerprint(),
            datum_fingerprint: crate::krylov::datum_fingerprint(g),
            ambient_dim: a.dim(),
        }
    }

    pub(crate) fn of_basis(a: &DenseOperator, basis: &KrylovBasis) -> Result<Self> {
        if a.fingerprint() != basis.operator_fingerprint() || a.dim() != basis.ambient_dim() {
            return invalid("Krylov basis was built from a different operator");
        }
        Ok(Provenance {
            operator_fingerprint: basis.operator_fingerprint(),
            datum_fingerprint: basis.datum_fingerprint(),
            ambient_dim: a.dim(),
        })
    }
}
