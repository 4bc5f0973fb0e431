//! Compare the QR-pivot placement against random draws: reconstruction
//! error and conditioning of the sensor system.
//!
//! ```bash
//! cargo run --example qdeim_vs_random
//! ```

use fieldrecon::basis::{compute_svd, truncate};
use fieldrecon::fielddata::{synth_field, GridGeometry};
use fieldrecon::placement::{placement_mse, qdeim_placement, random_placement, CandidateSet};
use fieldrecon::reconstruct::interpolation_system;

fn main() -> Result<(), fieldrecon::Error> {
    let geometry = GridGeometry::full(10, 10)?;
    let ts = synth_field(&geometry, 5, 70, 0.1, 11)?;
    let basis = truncate(&compute_svd(&ts)?, 5)?;

    let pivoted = qdeim_placement(&basis)?;
    let pivoted_mse = placement_mse(&pivoted, &ts, &basis)?;
    let pivoted_cond = interpolation_system(&pivoted, &basis)?.condition_number();
    println!("qr-pivot placement {:?}", pivoted.indices());
    println!("  MSE {pivoted_mse:.6e}, condition number {pivoted_cond:.3e}");

    let candidates = CandidateSet::all(ts.locations())?;
    let mut better_mse = 0;
    let mut better_cond = 0;
    let draws = 500;
    for seed in 0..draws {
        let p = random_placement(&candidates, basis.rank(), seed)?;
        let cond = interpolation_system(&p, &basis)?.condition_number();
        if cond <= pivoted_cond {
            better_cond += 1;
        }
        if let Ok(mse) = placement_mse(&p, &ts, &basis) {
            if mse <= pivoted_mse {
                better_mse += 1;
            }
        }
    }
    println!("\nagainst {draws} random placements:");
    println!("  {better_mse} had lower or equal MSE");
    println!("  {better_cond} were as well conditioned");
    Ok(())
}
