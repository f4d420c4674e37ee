//! A two-component periodic system `(B f)' + C f` with constant symmetric `B`.

use krylov_lab::gallery::{build_friedrichs_1d, check_friedrichs_pair, Friedrichs1DSpec};
use krylov_lab::hilbert::{dense_solve, CMatrix, HVector, C64};
use krylov_lab::krylov::run_gmres;

fn main() -> krylov_lab::Result<()> {
    let b = CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(-1.0, 0.0)]);
    let c = CMatrix::identity(2, 2);
    let spec = Friedrichs1DSpec::constant(32, 2.0 * std::f64::consts::PI, b, c, 2.0);
    let (t, t_tilde) = build_friedrichs_1d(&spec)?;
    let fc = check_friedrichs_pair(&t, &t_tilde, 1e-10)?;
    println!("dim {}, pair {}, bottom of T + T~ = {:.6}", t.dim(), fc.is_pair, fc.bottom);

    let g = HVector::from_real(&(0..t.dim()).map(|j| ((j / 2) as f64 * 0.2).sin()).collect::<Vec<_>>())?;
    let f = dense_solve(&t, &g)?;
    let (x, trace) = run_gmres(&t, &g, t.dim(), 1e-12)?;
    println!("gmres: {} steps, relative error {:.2e}", trace.len(), (x.as_vector() - f.as_vector()).norm() / f.norm());
    Ok(())
}
