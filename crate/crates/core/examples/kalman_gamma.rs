//! Score placements with the model-based criterion: fit linear dynamics to
//! the basis coefficients, run the Kalman covariance recursion and compare
//! the worst-case prior eigenvalue across candidate deployments.
//!
//! ```bash
//! cargo run --example kalman_gamma
//! ```

use fieldrecon::basis::{compute_svd, truncate};
use fieldrecon::fielddata::{synth_field, GridGeometry};
use fieldrecon::modeleval::{fit_state_space, gamma_criterion};
use fieldrecon::placement::{qdeim_placement, random_placement, CandidateSet};

fn main() -> Result<(), fieldrecon::Error> {
    let geometry = GridGeometry::full(8, 8)?;
    let ts = synth_field(&geometry, 3, 120, 0.1, 5)?;
    let basis = truncate(&compute_svd(&ts)?, 3)?;

    let model = fit_state_space(&basis)?;
    println!("fitted temporal matrix:");
    for i in 0..model.order() {
        let row: Vec<String> = (0..model.order())
            .map(|j| format!("{:7.3}", model.temporal()[(i, j)]))
            .collect();
        println!("  [{}]", row.join(" "));
    }
    println!(
        "process noise trace {:.3e}, reading noise {:.3e}",
        model.process_noise().trace(),
        model.observation_noise()
    );

    let pivoted = qdeim_placement(&basis)?;
    let gamma_pivoted = gamma_criterion(&model, std::slice::from_ref(&pivoted), 200)?;
    println!(
        "\nqr-pivot placement {:?}: gamma = {gamma_pivoted:.4e}",
        pivoted.indices()
    );

    let candidates = CandidateSet::all(ts.locations())?;
    println!("random placements (lower gamma is better):");
    for seed in 0..5 {
        let p = random_placement(&candidates, basis.rank(), seed)?;
        let gamma = gamma_criterion(&model, std::slice::from_ref(&p), 200)?;
        println!("  {:?}: gamma = {gamma:.4e}", p.indices());
    }
    Ok(())
}
