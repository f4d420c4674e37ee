//! Krylov subspaces, truncated problems and the CG/GMRES iterations.

mod basis;
mod iterate;
mod truncation;

pub(crate) use basis::datum_fingerprint;
pub use basis::{estimate_norm, grade, krylov_basis, KrylovBasis, DEFAULT_BREAKDOWN_TOL};
pub use iterate::{run_cg, run_cg_traced, run_gmres, run_gmres_traced, IterationTrace, TraceRow};
pub use truncation::{solve_truncated, TruncationScheme, GALERKIN_SINGULAR_TOL};
