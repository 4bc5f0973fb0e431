//! Command-line front end: `synth`, `train`, `place`, `reconstruct` and
//! `bench` subcommands over the library pipeline, plus the benchmark
//! harness used by `bench`.
//!
//! Exit codes: 0 success, 1 I/O or file-format problems, 2 usage errors
//! (including guard violations), 3 numerical failures such as an
//! ill-conditioned sensor system.
//!
//! Every command is deterministic given its full argument list; `bench`
//! writes zeros into the report's `seconds` column unless `--timing` is
//! passed, so repeated runs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basis::{self, Basis, SvdFactorization};
use crate::error::{Error, Result};
use crate::fielddata::{self, GridGeometry, HeatmapFormat, TrainingSet};
use crate::placement::{
    self, AnnealConfig, CandidateSet, InitStrategy, Placement, PlacementEvaluator,
};
use crate::reconstruct::{self, ObservationSet};

#[derive(Parser)]
#[command(
    name = "fieldrecon",
    version,
    about = "Learn a snapshot basis, place sparse sensors, reconstruct the field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic training set
    Synth(SynthArgs),
    /// Learn the SVD basis and pick the rank
    Train(TrainArgs),
    /// Choose sensor locations
    Place(PlaceArgs),
    /// Rebuild full fields from sensor readings
    Reconstruct(ReconstructArgs),
    /// Compare placement methods side by side
    Bench(BenchArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    height: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    width: u32,
    /// Number of spatial modes in the generated field
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    modes: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    snapshots: u32,
    /// Standard deviation of additive white noise
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Geometry file to reuse instead of a fully valid grid
    #[arg(long)]
    geometry: Option<PathBuf>,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Training matrix file
    #[arg(long)]
    training: PathBuf,
    /// Geometry file
    #[arg(long)]
    geometry: PathBuf,
    /// Truncation rank: an integer or "svht"
    #[arg(long, default_value = "svht")]
    rank: RankChoice,
    /// Known noise level for the svht rank rule (median-based when omitted)
    #[arg(long)]
    noise_std: Option<f64>,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlaceArgs {
    #[arg(long)]
    training: PathBuf,
    #[arg(long)]
    geometry: PathBuf,
    /// Directory holding modes.txt and basis.txt from `train`
    #[arg(long)]
    basis: PathBuf,
    #[arg(long, value_enum)]
    method: PlaceMethod,
    /// Annealing iterations
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    /// Probability of accepting an improving swap
    #[arg(long, default_value_t = 0.9)]
    rho: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Starting placement for the annealing search
    #[arg(long, value_enum, default_value_t = InitChoice::Random)]
    init: InitChoice,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Directory holding modes.txt and basis.txt from `train`
    #[arg(long)]
    basis: PathBuf,
    /// Placement file from `place`
    #[arg(long)]
    placement: PathBuf,
    /// Sensor readings matrix (r rows by K snapshots); sampled from
    /// --truth when omitted
    #[arg(long)]
    observations: Option<PathBuf>,
    /// Ground-truth matrix for error reporting
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Geometry file (needed for heatmaps)
    #[arg(long)]
    geometry: Option<PathBuf>,
    /// Write PGM heatmaps of truth, reconstruction and absolute error
    #[arg(long)]
    heatmaps: bool,
    /// Snapshot column rendered by --heatmaps
    #[arg(long, default_value_t = 0)]
    heatmap_index: usize,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    training: PathBuf,
    #[arg(long)]
    geometry: PathBuf,
    /// Truncation rank: an integer or "svht"
    #[arg(long, default_value = "svht")]
    rank: RankChoice,
    /// Fraction of snapshots used for training (temporal prefix)
    #[arg(long, default_value_t = 0.8)]
    split: f64,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 0.9)]
    rho: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seeds drawn for the random-placement arm
    #[arg(long, default_value_t = 20)]
    random_arms: usize,
    /// Record wall-clock seconds in the report CSV (breaks byte-for-byte
    /// reproducibility)
    #[arg(long)]
    timing: bool,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PlaceMethod {
    Anneal,
    Qdeim,
    Random,
    Brute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InitChoice {
    Random,
    Qdeim,
}

impl From<InitChoice> for InitStrategy {
    fn from(c: InitChoice) -> Self {
        match c {
            InitChoice::Random => InitStrategy::Random,
            InitChoice::Qdeim => InitStrategy::QrPivot,
        }
    }
}

/// Truncation rank: a fixed integer or the hard-thresholding rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankChoice {
    Svht,
    Fixed(usize),
}

impl FromStr for RankChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("svht") {
            return Ok(RankChoice::Svht);
        }
        match s.parse::<usize>() {
            Ok(r) if r >= 1 => Ok(RankChoice::Fixed(r)),
            _ => Err(format!("expected a positive integer or 'svht', got '{s}'")),
        }
    }
}

impl RankChoice {
    /// Resolve to a concrete rank for the given factorization.
    pub fn resolve(&self, f: &SvdFactorization, noise_std: Option<f64>) -> Result<usize> {
        match self {
            RankChoice::Svht => basis::svht_rank(f, noise_std),
            RankChoice::Fixed(r) => {
                if *r > f.spectrum_len() {
                    return Err(Error::InvalidArgument(format!(
                        "rank {r} exceeds min(m, M) = {}",
                        f.spectrum_len()
                    )));
                }
                Ok(*r)
            }
        }
    }
}

/// Parse arguments, run a subcommand, map errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(args) => cmd_synth(&args),
        Command::Train(args) => cmd_train(&args),
        Command::Place(args) => cmd_place(&args),
        Command::Reconstruct(args) => cmd_reconstruct(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Format { .. } | Error::Dimension(_) => 1,
        Error::InvalidArgument(_) => 2,
        Error::IllConditioned { .. } | Error::Numerical(_) => 3,
    }
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    ensure_out_dir(&args.out)?;
    let geometry = match &args.geometry {
        Some(path) => {
            let g = fielddata::read_geometry(path)?;
            if g.height() != args.height as usize || g.width() != args.width as usize {
                return Err(Error::InvalidArgument(format!(
                    "--geometry is {}x{} but --height/--width say {}x{}",
                    g.height(),
                    g.width(),
                    args.height,
                    args.width
                )));
            }
            g
        }
        None => GridGeometry::full(args.height as usize, args.width as usize)?,
    };
    let ts = fielddata::synth_field(
        &geometry,
        args.modes as usize,
        args.snapshots as usize,
        args.noise,
        args.seed,
    )?;
    let matrix_path = args.out.join("training.txt");
    let geometry_path = args.out.join("geometry.txt");
    fielddata::save_training(&ts, &matrix_path, &geometry_path)?;
    println!(
        "wrote {} ({} locations x {} snapshots) and {}",
        matrix_path.display(),
        ts.locations(),
        ts.snapshots(),
        geometry_path.display()
    );
    Ok(())
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    if let Some(s) = args.noise_std {
        if s < 0.0 || !s.is_finite() {
            return Err(Error::InvalidArgument(
                "--noise-std must be finite and >= 0".into(),
            ));
        }
    }
    ensure_out_dir(&args.out)?;
    let ts = fielddata::load_training(&args.training, &args.geometry)?;
    let f = basis::compute_svd(&ts)?;
    let rank = args.rank.resolve(&f, args.noise_std)?;
    let b = basis::truncate(&f, rank)?;

    basis::save_basis(&b, &args.out.join("modes.txt"), &args.out.join("basis.txt"))?;
    let mut spectrum = String::from("index,sigma\n");
    for (i, s) in f.singular_values().iter().enumerate() {
        let _ = writeln!(spectrum, "{i},{s}");
    }
    let spectrum_path = args.out.join("spectrum.csv");
    fs::write(&spectrum_path, spectrum).map_err(|e| Error::io(&spectrum_path, e))?;

    let how = match args.rank {
        RankChoice::Svht => "svht",
        RankChoice::Fixed(_) => "fixed",
    };
    println!(
        "selected rank r = {rank} ({how}); wrote modes.txt, basis.txt, spectrum.csv to {}",
        args.out.display()
    );
    Ok(())
}

fn load_basis_dir(dir: &Path) -> Result<Basis> {
    basis::load_basis(&dir.join("modes.txt"), &dir.join("basis.txt"))
}

fn cmd_place(args: &PlaceArgs) -> Result<()> {
    ensure_out_dir(&args.out)?;
    let ts = fielddata::load_training(&args.training, &args.geometry)?;
    let b = load_basis_dir(&args.basis)?;
    let cs = CandidateSet::all(ts.locations())?;

    let (chosen, trace) = match args.method {
        PlaceMethod::Anneal => {
            let cfg = AnnealConfig {
                iterations: args.iters,
                accept_probability: args.rho,
                seed: args.seed,
                init: args.init.into(),
            };
            let (p, trace) = placement::optimize_placement(&ts, &cs, &b, &cfg)?;
            (p, Some(trace))
        }
        PlaceMethod::Qdeim => (placement::qdeim_placement(&b)?, None),
        PlaceMethod::Random => (placement::random_placement(&cs, b.rank(), args.seed)?, None),
        PlaceMethod::Brute => {
            let (p, _) = placement::brute_force_placement(&ts, &cs, &b)?;
            (p, None)
        }
    };

    placement::save_placement(&chosen, &args.out.join("placement.txt"))?;
    if let Some(trace) = &trace {
        placement::save_trace(trace, &args.out.join("trace.csv"))?;
    }

    let mse = placement::placement_mse(&chosen, &ts, &b)?;
    let cond = reconstruct::interpolation_system(&chosen, &b)?.condition_number();
    println!(
        "placement {:?} training MSE = {mse:e} (condition number {cond:.3e})",
        chosen.indices()
    );
    Ok(())
}

fn cmd_reconstruct(args: &ReconstructArgs) -> Result<()> {
    ensure_out_dir(&args.out)?;
    let b = load_basis_dir(&args.basis)?;
    let p = placement::load_placement(&args.placement, b.locations())?;

    let truth = args
        .truth
        .as_ref()
        .map(|path| fielddata::read_matrix(path))
        .transpose()?;
    if let Some(t) = &truth {
        if t.nrows() != b.locations() {
            return Err(Error::Dimension(format!(
                "truth has {} rows but the basis covers {} locations",
                t.nrows(),
                b.locations()
            )));
        }
    }

    let obs = match (&args.observations, &truth) {
        (Some(path), _) => {
            let readings = fielddata::read_matrix(path)?;
            ObservationSet::new(readings, p.clone())?
        }
        (None, Some(t)) => ObservationSet::from_field_data(t, p.clone())?,
        (None, None) => {
            return Err(Error::InvalidArgument(
                "provide --observations, or --truth to sample readings from".into(),
            ))
        }
    };

    let result = reconstruct::reconstruct_series(&obs, &b, truth.as_ref())?;
    let recon_path = args.out.join("reconstruction.txt");
    fielddata::write_matrix(result.fields(), &recon_path)?;
    println!(
        "reconstructed {} snapshots -> {} (condition number {:.3e})",
        result.fields().ncols(),
        recon_path.display(),
        result.condition_number()
    );

    if let Some(per) = result.per_snapshot_mse() {
        let mut csv = String::from("snapshot,mse\n");
        for (j, v) in per.iter().enumerate() {
            let _ = writeln!(csv, "{j},{v}");
        }
        let path = args.out.join("per_snapshot_mse.csv");
        fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
        println!(
            "aggregate MSE = {:e} over {} snapshots",
            result.aggregate_mse().expect("per-snapshot exists"),
            per.len()
        );
    }

    if args.heatmaps {
        let geometry = match &args.geometry {
            Some(path) => fielddata::read_geometry(path)?,
            None => {
                return Err(Error::InvalidArgument(
                    "--heatmaps needs --geometry to map rows onto the grid".into(),
                ))
            }
        };
        if geometry.valid_cells() != b.locations() {
            return Err(Error::Dimension(format!(
                "geometry has {} valid cells but the basis covers {}",
                geometry.valid_cells(),
                b.locations()
            )));
        }
        let k = args.heatmap_index;
        if k >= result.fields().ncols() {
            return Err(Error::InvalidArgument(format!(
                "--heatmap-index {k} out of range for {} snapshots",
                result.fields().ncols()
            )));
        }
        let recon_col = result.fields().column(k).into_owned();
        fielddata::export_heatmap(
            &recon_col,
            &geometry,
            &args.out.join("reconstruction.pgm"),
            HeatmapFormat::Pgm,
        )?;
        if let Some(t) = &truth {
            let truth_col = t.column(k).into_owned();
            fielddata::export_heatmap(
                &truth_col,
                &geometry,
                &args.out.join("truth.pgm"),
                HeatmapFormat::Pgm,
            )?;
            let error_col = DVector::from_fn(truth_col.len(), |i, _| {
                (recon_col[i] - truth_col[i]).abs()
            });
            fielddata::export_heatmap(
                &error_col,
                &geometry,
                &args.out.join("error.pgm"),
                HeatmapFormat::Pgm,
            )?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Benchmark harness
// ---------------------------------------------------------------------------

/// Benchmark settings consumed by [`run_benchmark`].
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub rank: RankChoice,
    /// Temporal fraction of snapshots used for training, in (0, 1).
    pub split: f64,
    pub iterations: usize,
    pub accept_probability: f64,
    pub seed: u64,
    /// Seeds drawn for the random-placement arm.
    pub random_arms: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            rank: RankChoice::Svht,
            split: 0.8,
            iterations: 1000,
            accept_probability: 0.9,
            seed: 0,
            random_arms: 20,
        }
    }
}

/// One benchmark table row.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub method: String,
    pub train_mse: f64,
    pub test_mse: f64,
    pub condition_number: f64,
    pub seconds: f64,
    pub placement: Placement,
}

/// Method comparison on one train/test split.
#[derive(Debug)]
pub struct BenchReport {
    pub rank: usize,
    pub rows: Vec<BenchRow>,
    /// Projection error of the basis on the training split: the floor no
    /// placement can beat.
    pub target_train: f64,
    /// Projection error on the held-out split.
    pub target_test: f64,
    /// Set when an arm failed; `rows` then holds the arms that completed.
    pub failure: Option<(String, Error)>,
}

impl BenchReport {
    /// CSV with the `method,train_mse,test_mse,condition_number,seconds`
    /// header. Seconds are written as 0 unless `timing` is set, keeping the
    /// file byte-identical across runs.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut out = String::from("method,train_mse,test_mse,condition_number,seconds\n");
        let _ = writeln!(
            out,
            "target,{},{},nan,{:.6}",
            self.target_train, self.target_test, 0.0
        );
        for row in &self.rows {
            let secs = if timing { row.seconds } else { 0.0 };
            let _ = writeln!(
                out,
                "{},{},{},{},{secs:.6}",
                row.method, row.train_mse, row.test_mse, row.condition_number
            );
        }
        out
    }

    /// Human-readable table with measured timings.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16} {:>14} {:>14} {:>12} {:>9}",
            "method", "train_mse", "test_mse", "cond", "seconds"
        );
        let _ = writeln!(
            out,
            "{:<16} {:>14.6e} {:>14.6e} {:>12} {:>9}",
            "target", self.target_train, self.target_test, "-", "-"
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:<16} {:>14.6e} {:>14.6e} {:>12.4e} {:>9.3}",
                row.method, row.train_mse, row.test_mse, row.condition_number, row.seconds
            );
        }
        out
    }
}

struct Arm<'a> {
    train: &'a TrainingSet,
    test: &'a TrainingSet,
    basis: &'a Basis,
}

impl Arm<'_> {
    fn run(&self, method: &str, p: Placement, started: Instant) -> Result<BenchRow> {
        let train_mse = placement::placement_mse(&p, self.train, self.basis)?;
        let test_mse = placement::placement_mse(&p, self.test, self.basis)?;
        let condition_number =
            reconstruct::interpolation_system(&p, self.basis)?.condition_number();
        Ok(BenchRow {
            method: method.to_string(),
            train_mse,
            test_mse,
            condition_number,
            seconds: started.elapsed().as_secs_f64(),
            placement: p,
        })
    }
}

/// Run every placement method on a temporal train/test split of `ts` and
/// collect the comparison table. Deterministic for a fixed config.
///
/// A failing arm does not lose the table: the report keeps the rows that
/// completed and records the failure for the caller to surface.
pub fn run_benchmark(ts: &TrainingSet, cfg: &BenchConfig) -> Result<BenchReport> {
    if !(cfg.split > 0.0 && cfg.split < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "split must be in (0, 1), got {}",
            cfg.split
        )));
    }
    if cfg.random_arms == 0 {
        return Err(Error::InvalidArgument(
            "the random arm needs at least one seed".into(),
        ));
    }
    let total = ts.snapshots();
    let train_cols = ((total as f64 * cfg.split).floor() as usize).clamp(1, total - 1);
    let train = ts.slice_snapshots(0, train_cols)?;
    let test = ts.slice_snapshots(train_cols, total)?;

    let f = basis::compute_svd(&train)?;
    let rank = cfg.rank.resolve(&f, None)?;
    let b = basis::truncate(&f, rank)?;
    let cs = CandidateSet::all(train.locations())?;

    let target_train = basis::projection_error(&b, &train)?;
    let target_test = basis::projection_error(&b, &test)?;

    let mut rows = Vec::new();
    let failure = run_arms(cfg, rank, &train, &test, &b, &cs, &mut rows).err();

    // the projection error is a hard floor for every interpolation method
    let scale = train.data().norm_squared() / (train.locations() * train.snapshots()) as f64;
    for row in &rows {
        if row.train_mse < target_train - 1e-9 * scale {
            return Err(Error::Numerical(format!(
                "method {} undercut the projection floor: {} < {}",
                row.method, row.train_mse, target_train
            )));
        }
    }

    Ok(BenchReport {
        rank,
        rows,
        target_train,
        target_test,
        failure,
    })
}

fn run_arms(
    cfg: &BenchConfig,
    rank: usize,
    train: &TrainingSet,
    test: &TrainingSet,
    b: &Basis,
    cs: &CandidateSet,
    rows: &mut Vec<BenchRow>,
) -> std::result::Result<(), (String, Error)> {
    // deterministic per-arm seeds drawn from the benchmark seed
    let mut seeder = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seed_anneal_qdeim: u64 = seeder.gen();
    let seed_anneal_random: u64 = seeder.gen();
    let random_seeds: Vec<u64> = (0..cfg.random_arms).map(|_| seeder.gen()).collect();

    let arm = Arm { train, test, basis: b };
    fn fail(name: &str) -> impl Fn(Error) -> (String, Error) + '_ {
        move |e| (name.to_string(), e)
    }

    let started = Instant::now();
    let (p, _) = placement::optimize_placement(
        train,
        cs,
        b,
        &AnnealConfig {
            iterations: cfg.iterations,
            accept_probability: cfg.accept_probability,
            seed: seed_anneal_qdeim,
            init: InitStrategy::QrPivot,
        },
    )
    .map_err(fail("anneal_qdeim"))?;
    rows.push(arm.run("anneal_qdeim", p, started).map_err(fail("anneal_qdeim"))?);

    let started = Instant::now();
    let (p, _) = placement::optimize_placement(
        train,
        cs,
        b,
        &AnnealConfig {
            iterations: cfg.iterations,
            accept_probability: cfg.accept_probability,
            seed: seed_anneal_random,
            init: InitStrategy::Random,
        },
    )
    .map_err(fail("anneal_random"))?;
    rows.push(arm.run("anneal_random", p, started).map_err(fail("anneal_random"))?);

    let started = Instant::now();
    let p = placement::qdeim_placement(b).map_err(fail("qdeim"))?;
    rows.push(arm.run("qdeim", p, started).map_err(fail("qdeim"))?);

    // random arm: evaluate every seed, report the placement whose training
    // MSE is the lower median
    let started = Instant::now();
    let median = (|| -> Result<Placement> {
        let evaluator = PlacementEvaluator::new(train, b)?;
        let mut scored: Vec<(f64, Placement)> = Vec::with_capacity(cfg.random_arms);
        for &s in &random_seeds {
            let p = placement::random_placement(cs, rank, s)?;
            let mse = match evaluator.mse(&p) {
                Ok(v) => v,
                Err(Error::IllConditioned { .. }) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            scored.push((mse, p));
        }
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("mse never NaN"));
        let median = scored.swap_remove((scored.len() - 1) / 2);
        if median.0.is_infinite() {
            return Err(Error::Numerical(
                "the median random placement is singular; rerun with a different seed".into(),
            ));
        }
        Ok(median.1)
    })()
    .map_err(fail("random_median"))?;
    rows.push(arm.run("random_median", median, started).map_err(fail("random_median"))?);

    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    ensure_out_dir(&args.out)?;
    let ts = fielddata::load_training(&args.training, &args.geometry)?;
    let cfg = BenchConfig {
        rank: args.rank,
        split: args.split,
        iterations: args.iters,
        accept_probability: args.rho,
        seed: args.seed,
        random_arms: args.random_arms,
    };
    let report = run_benchmark(&ts, &cfg)?;

    let csv_path = args.out.join("report.csv");
    fs::write(&csv_path, report.to_csv(args.timing)).map_err(|e| Error::io(&csv_path, e))?;
    for row in &report.rows {
        placement::save_placement(
            &row.placement,
            &args.out.join(format!("placement_{}.txt", row.method)),
        )?;
    }
    println!("rank r = {}", report.rank);
    print!("{}", report.to_table());
    println!("wrote {}", csv_path.display());
    match report.failure {
        Some((arm, e)) => {
            eprintln!("arm '{arm}' failed; partial results kept");
            Err(e)
        }
        None => Ok(()),
    }
}
