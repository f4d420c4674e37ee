//! A compact normal operator: the Krylov solution is the minimal-norm one.

use krylov_lab::diagnostics::{diagnose, DiagnoseOptions};
use krylov_lab::gallery::build_compact_normal;
use krylov_lab::hilbert::{c64, min_norm_solve, HVector};
use krylov_lab::krylov::run_gmres;

fn main() -> krylov_lab::Result<()> {
    let mut eig: Vec<_> = (1..=12).map(|k| c64(1.0 / k as f64, 0.3 / k as f64)).collect();
    eig.extend([c64(0.0, 0.0); 3]);
    let a = build_compact_normal(&eig)?;
    // no weight on the kernel
    let g = HVector::from_real(&(0..15).map(|k| if k < 12 { 1.0 } else { 0.0 }).collect::<Vec<_>>())?;

    let (x, trace) = run_gmres(&a, &g, 15, 1e-13)?;
    let f = min_norm_solve(&a, &g)?;
    println!("gmres steps {}, distance to minimal-norm solution {:.2e}", trace.len(), (x.as_vector() - f.as_vector()).norm() / f.norm());

    let d = diagnose(&a, &g, 15, &DiagnoseOptions::default())?;
    println!("grade {:?}, off-block {:.1e}", d.grade, d.reducibility.off_block_perp_to_k);
    println!("verdict {:?}", d.verdict.verdict);
    for line in &d.verdict.chain {
        println!("  {line}");
    }
    Ok(())
}
