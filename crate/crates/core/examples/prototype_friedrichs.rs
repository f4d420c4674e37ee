//! `A = -d/dx + c` on a periodic grid: a Friedrichs pair with its formal
//! adjoint, and band-limited data solved at the number of modes.

use krylov_lab::gallery::{band_limited_datum, build_prototype, check_friedrichs_pair, spectral_derivative, PrototypeSpec};
use krylov_lab::hilbert::{c64, dense_solve, CMatrix, DenseOperator};
use krylov_lab::krylov::run_gmres_traced;

fn main() -> krylov_lab::Result<()> {
    let m = 64;
    let c = c64(1.0, 0.0);
    let a = build_prototype(&PrototypeSpec::constant(m, c))?;
    let at = DenseOperator::detect(spectral_derivative(m, 2.0 * std::f64::consts::PI) + CMatrix::identity(m, m) * c.conj())?;
    let fc = check_friedrichs_pair(&a, &at, 1e-10)?;
    println!("pair {}, bottom {:.12}, defect {:.1e}", fc.is_pair, fc.bottom, fc.sum_self_adjoint_defect);

    let g = band_limited_datum(m, &[(0, c64(1.0, 0.0)), (2, c64(0.5, 0.5)), (-5, c64(0.25, 0.0))])?;
    let f = dense_solve(&a, &g)?;
    let (_, trace) = run_gmres_traced(&a, &g, 6, 1e-12, Some(&f))?;
    for row in &trace.rows {
        println!("n = {}: residual {:.2e}", row.n, row.residual);
    }
    Ok(())
}
