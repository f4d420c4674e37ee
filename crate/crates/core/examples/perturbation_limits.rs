//! Solvable perturbed problems approaching a limit: the limit stays solvable
//! when the operator is invertible, and the shift shows what fails otherwise.

use krylov_lab::experiments::{run_experiment, ExperimentConfig};

fn main() -> krylov_lab::Result<()> {
    for text in [include_str!("../configs/e6_add_image.json"), include_str!("../configs/e6_shift_counter.json")] {
        let cfg = ExperimentConfig::from_json(text)?;
        let report = run_experiment(&cfg)?;
        println!("{}: proposition {:?}", cfg.experiment_id.name(), report.proposition);
        for gap in &report.gaps {
            println!(
                "  {}: |g_m - g| = {:.3e}, weak gap {:.3e}",
                gap.label, gap.entry.datum_distance, gap.entry.symmetric.value
            );
        }
        for note in &report.notes {
            println!("  {note}");
        }
    }
    Ok(())
}
