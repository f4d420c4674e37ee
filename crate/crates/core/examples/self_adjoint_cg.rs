//! CG on random positive operators: exact at the dimension, and the
//! minimal-norm solution when the operator has a kernel.

use krylov_lab::gallery::random;
use krylov_lab::hilbert::{dense_solve, min_norm_solve, HVector};
use krylov_lab::krylov::run_cg;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> krylov_lab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let dim = 24;

    let a = random::spd(dim, 0.5, 20.0, &mut rng);
    let g = HVector::from_vector(random::gaussian_vector(dim, &mut rng))?;
    let (x, trace) = run_cg(&a, &g, dim, 1e-13)?;
    let f = dense_solve(&a, &g)?;
    let err = (x.as_vector() - f.as_vector()).norm() / f.norm();
    println!("spd, dim {dim}: {} iterations, relative error {err:.2e}", trace.len());

    // g in the range of a PSD operator with a 4-dimensional kernel.
    let p = random::psd_with_kernel(dim, 4, 0.5, 20.0, &mut rng);
    let h = p.apply_h(&HVector::from_vector(random::gaussian_vector(dim, &mut rng))?)?;
    let (x, trace) = run_cg(&p, &h, dim, 1e-13)?;
    let f = min_norm_solve(&p, &h)?;
    let err = (x.as_vector() - f.as_vector()).norm() / f.norm();
    println!("psd with kernel: {} iterations, distance to minimal-norm solution {err:.2e}", trace.len());
    Ok(())
}
