//! Sparse sensor placement and full-field reconstruction for gridded
//! spatiotemporal data.
//!
//! Given a history of field snapshots (for example daily sea surface
//! temperature over a coastal grid), this crate
//!
//! 1. learns a truncated SVD basis of the snapshot history ([`basis`]),
//! 2. picks the truncation rank automatically by singular value hard
//!    thresholding ([`basis::svht_rank`]),
//! 3. optimizes `r` point-sensor locations with a probabilistic-greedy
//!    annealing search, next to QR-pivot, random and exhaustive baselines
//!    ([`placement`]),
//! 4. reconstructs full snapshots from the `r` point observations
//!    ([`reconstruct`]), and
//! 5. scores placements with a model-based Kalman covariance criterion
//!    ([`modeleval`]).
//!
//! The `fieldrecon` binary exposes the pipeline as `synth`, `train`,
//! `place`, `reconstruct` and `bench` subcommands ([`cli`]).
//!
//! ## Runnable examples
//!
//! Each major capability has a self-contained example:
//!
//! ```bash
//! cargo run --example synth_and_train        # data generation, SVD, rank selection
//! cargo run --example optimize_placement     # annealing search with trace
//! cargo run --example qdeim_vs_random        # QR-pivot baseline and conditioning
//! cargo run --example reconstruct_field      # sparse observations -> full field
//! cargo run --example kalman_gamma           # model-based placement scoring
//! cargo run --example run_benchmark          # all methods side by side
//! ```

pub mod basis;
pub mod cli;
pub mod error;
pub mod fielddata;
pub mod modeleval;
pub mod placement;
pub mod reconstruct;

pub use error::{Error, Result};
