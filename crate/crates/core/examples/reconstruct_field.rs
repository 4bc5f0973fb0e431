//! Rebuild full snapshots from a handful of point readings and export
//! heatmaps of truth, reconstruction and error.
//!
//! ```bash
//! cargo run --example reconstruct_field
//! ```

use fieldrecon::basis::{compute_svd, truncate};
use fieldrecon::fielddata::{export_heatmap, synth_field, GridGeometry, HeatmapFormat};
use fieldrecon::placement::{optimize_placement, AnnealConfig, CandidateSet, InitStrategy};
use fieldrecon::reconstruct::{reconstruct_series, ObservationSet};
use nalgebra::DVector;

fn main() -> Result<(), fieldrecon::Error> {
    let geometry = GridGeometry::full(16, 16)?;
    let ts = synth_field(&geometry, 4, 90, 0.05, 33)?;

    // train on the first 70 snapshots, hold out the rest
    let train = ts.slice_snapshots(0, 70)?;
    let test = ts.slice_snapshots(70, 90)?;
    let basis = truncate(&compute_svd(&train)?, 4)?;

    let cfg = AnnealConfig {
        iterations: 800,
        accept_probability: 0.9,
        seed: 1,
        init: InitStrategy::QrPivot,
    };
    let (placement, _) = optimize_placement(&train, &CandidateSet::all(256)?, &basis, &cfg)?;
    println!(
        "{} sensors watch {} cells: {:?}",
        placement.len(),
        train.locations(),
        placement.indices()
    );

    // pretend the held-out snapshots arrive as sensor readings only
    let observations = ObservationSet::from_field_data(test.data(), placement)?;
    let result = reconstruct_series(&observations, &basis, Some(test.data()))?;
    println!(
        "reconstructed {} held-out snapshots, condition number {:.3e}",
        result.fields().ncols(),
        result.condition_number()
    );
    println!(
        "aggregate MSE {:.6e} (per snapshot: first {:.2e}, worst {:.2e})",
        result.aggregate_mse().unwrap(),
        result.per_snapshot_mse().unwrap()[0],
        result.per_snapshot_mse().unwrap().max()
    );

    let out = std::env::temp_dir().join("fieldrecon_example");
    std::fs::create_dir_all(&out).map_err(|e| fieldrecon::Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let snapshot = 0;
    let truth_col = test.data().column(snapshot).into_owned();
    let recon_col = result.fields().column(snapshot).into_owned();
    let error_col = DVector::from_fn(truth_col.len(), |i, _| (recon_col[i] - truth_col[i]).abs());
    export_heatmap(&truth_col, &geometry, &out.join("truth.pgm"), HeatmapFormat::Pgm)?;
    export_heatmap(&recon_col, &geometry, &out.join("recon.pgm"), HeatmapFormat::Pgm)?;
    export_heatmap(&error_col, &geometry, &out.join("error.pgm"), HeatmapFormat::Pgm)?;
    println!("wrote truth.pgm / recon.pgm / error.pgm to {}", out.display());
    Ok(())
}
