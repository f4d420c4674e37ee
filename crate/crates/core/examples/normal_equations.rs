//! Normal equations for an operator with `A + A* = αI`: the Krylov space of
//! `(A*A, A*g)` sits inside the one of `(A, g)`.

use krylov_lab::experiments::{run_experiment, ExperimentConfig};

fn main() -> krylov_lab::Result<()> {
    for text in [include_str!("../configs/e3_prototype.json"), include_str!("../configs/e3_system.json")] {
        let cfg = ExperimentConfig::from_json(text)?;
        let report = run_experiment(&cfg)?;
        println!("{} ({:?})", report.experiment_id, report.outcome);
        if let Some(m) = report.measurement("inclusion_max") {
            println!("  largest inclusion distance {m:.2e}");
        }
        for name in ["normal_route_vs_dense", "gmres_route_vs_dense"] {
            if let Some(c) = report.check(name) {
                println!("  {name}: {:.2e}", c.value);
            }
        }
    }
    Ok(())
}
