//! Generate a synthetic spatiotemporal field, learn its SVD basis and let
//! hard thresholding pick the truncation rank.
//!
//! ```bash
//! cargo run --example synth_and_train
//! ```

use fieldrecon::basis::{compute_svd, projection_error, svht_rank, truncate};
use fieldrecon::fielddata::{synth_field, GridGeometry};

fn main() -> Result<(), fieldrecon::Error> {
    // a 12x12 grid observed for 80 snapshots, 4 underlying modes, mild noise
    let geometry = GridGeometry::full(12, 12)?;
    let ts = synth_field(&geometry, 4, 80, 0.05, 7)?;
    println!(
        "training set: {} locations x {} snapshots",
        ts.locations(),
        ts.snapshots()
    );

    let factorization = compute_svd(&ts)?;
    println!("\nleading singular values:");
    for (i, s) in factorization.singular_values().iter().take(8).enumerate() {
        println!("  sigma[{i}] = {s:10.4}");
    }

    let rank = svht_rank(&factorization, None)?;
    println!("\nhard-thresholding rank: {rank}");

    let basis = truncate(&factorization, rank)?;
    let floor = projection_error(&basis, &ts)?;
    println!("projection error at rank {rank}: {floor:.6e}");
    println!("(no sensor placement can reconstruct more accurately than this)");
    Ok(())
}
