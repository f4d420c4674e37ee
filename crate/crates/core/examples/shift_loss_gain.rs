//! The right shift on a window: `e_0` has the solution `e_{-1}`, which stays
//! at distance 1 from every Krylov space built from `e_0`.

use krylov_lab::gallery::{build_shift, shift_noncyclic_datum, ShiftFill, ShiftSpec};
use krylov_lab::hilbert::dense_solve;
use krylov_lab::krylov::krylov_basis;

fn main() -> krylov_lab::Result<()> {
    let spec = ShiftSpec::new(16, ShiftFill::ZeroFill);
    let a = build_shift(spec)?;
    let g = shift_noncyclic_datum(&spec, 0)?;
    let f = shift_noncyclic_datum(&spec, -1)?;
    let check = a.apply(f.as_vector()) - g.as_vector();
    println!("residual of e_(-1): {:.1e}", check.norm());

    let basis = krylov_basis(&a, &g, 14, 1e-12)?;
    for n in [1, 2, 4, 8, 14] {
        println!("n = {n:2}: dist(e_(-1), K_n) = {:.12}", basis.frame(n).distance(f.as_vector()));
    }

    // The cyclic shift is unitary, so the same datum becomes solvable.
    let cyclic = ShiftSpec::new(2, ShiftFill::Cyclic);
    let u = build_shift(cyclic)?;
    let e0 = shift_noncyclic_datum(&cyclic, 0)?;
    let f = dense_solve(&u, &e0)?;
    let basis = krylov_basis(&u, &e0, 5, 1e-12)?;
    println!("cyclic window N = 2: grade {:?}, dist(f, K) = {:.1e}", basis.grade(), basis.frame(basis.len()).distance(f.as_vector()));
    Ok(())
}
