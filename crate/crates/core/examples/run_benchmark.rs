//! Run every placement method on one train/test split and print the
//! comparison table.
//!
//! ```bash
//! cargo run --example run_benchmark
//! ```

use fieldrecon::cli::{run_benchmark, BenchConfig, RankChoice};
use fieldrecon::fielddata::{synth_field, GridGeometry};

fn main() -> Result<(), fieldrecon::Error> {
    let geometry = GridGeometry::full(12, 12)?;
    let ts = synth_field(&geometry, 5, 100, 0.15, 2)?;

    let cfg = BenchConfig {
        rank: RankChoice::Svht,
        split: 0.8,
        iterations: 1000,
        accept_probability: 0.9,
        seed: 17,
        random_arms: 20,
    };
    let report = run_benchmark(&ts, &cfg)?;

    println!("rank r = {}\n", report.rank);
    print!("{}", report.to_table());
    println!("\nreport CSV:\n{}", report.to_csv(false));
    Ok(())
}
