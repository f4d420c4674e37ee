//! The weighted weak norm and the symmetric weak gap between subspaces.

use krylov_lab::hilbert::{orthonormalize, HVector};
use krylov_lab::weak_gap::{dw_hat, GapOptions, WeakNormWeights};

fn main() -> krylov_lab::Result<()> {
    let w = WeakNormWeights::canonical(6);
    let opts = GapOptions::default();
    let line = |x: &[f64]| orthonormalize(&[HVector::from_real(x)?], 1e-12);

    let e0 = line(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0])?;
    let e1 = line(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0])?;
    let tilt = line(&[1.0, 0.0, 0.0, 0.0, 0.0, 1.0])?;
    println!("d(e0, e0)   = {:.3e}", dw_hat(&e0, &e0, &w, &opts)?.value);
    println!("d(e0, e1)   = {:.6}", dw_hat(&e0, &e1, &w, &opts)?.value);
    println!("d(e0, tilt) = {:.6}", dw_hat(&e0, &tilt, &w, &opts)?.value);

    let plane = orthonormalize(
        &[HVector::from_real(&[1.0, 0.0, 1.0, 0.0, 0.0, 0.0])?, HVector::from_real(&[0.0, 1.0, 0.0, 0.0, 1.0, 0.0])?],
        1e-12,
    )?;
    let est = dw_hat(&plane, &e0, &w, &opts)?;
    println!("d(plane, e0) = {:.6} ({:?}, {} samples)", est.value, est.kind, est.samples_used);
    Ok(())
}
