//! Optimize sensor locations with the annealing search and watch the error
//! trace fall.
//!
//! ```bash
//! cargo run --example optimize_placement
//! ```

use fieldrecon::basis::{compute_svd, projection_error, truncate};
use fieldrecon::fielddata::{synth_field, GridGeometry};
use fieldrecon::placement::{
    optimize_placement, placement_mse, random_placement, AnnealConfig, CandidateSet, InitStrategy,
};

fn main() -> Result<(), fieldrecon::Error> {
    let geometry = GridGeometry::full(10, 10)?;
    let ts = synth_field(&geometry, 4, 60, 0.1, 21)?;
    let basis = truncate(&compute_svd(&ts)?, 4)?;
    let candidates = CandidateSet::all(ts.locations())?;

    let start = random_placement(&candidates, basis.rank(), 3)?;
    println!(
        "random start {:?}: MSE {:.6e}",
        start.indices(),
        placement_mse(&start, &ts, &basis)?
    );

    let cfg = AnnealConfig {
        iterations: 1000,
        accept_probability: 0.9,
        seed: 3,
        init: InitStrategy::Random,
    };
    let (best, trace) = optimize_placement(&ts, &candidates, &basis, &cfg)?;

    println!("\ntrace (best MSE so far):");
    for i in [0usize, 10, 50, 100, 250, 500, 1000] {
        println!("  iteration {i:>4}: {:.6e}", trace.values()[i]);
    }
    println!(
        "\noptimized placement {:?}: MSE {:.6e}",
        best.indices(),
        trace.last()
    );
    println!(
        "projection floor:          {:.6e}",
        projection_error(&basis, &ts)?
    );
    Ok(())
}
