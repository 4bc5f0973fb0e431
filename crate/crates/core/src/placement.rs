//! Sensor placement: measurement operators and the probabilistic-greedy
//! annealing search, with QR-pivot, random and exhaustive baselines.
//!
//! A placement is an ordered set of `r` distinct valid-cell row indices. Its
//! quality on a data set is the mean squared error of reconstructing every
//! snapshot from the readings at those cells through the learned basis.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::fielddata::TrainingSet;
use crate::reconstruct;

/// Ordered set of distinct sensor locations (valid-cell row indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    indices: Vec<usize>,
}

impl Placement {
    /// `m` is the valid-cell count the indices must stay below.
    pub fn new(indices: Vec<usize>, m: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument(
                "placement needs at least one location".into(),
            ));
        }
        let mut seen = vec![false; m];
        for &i in &indices {
            if i >= m {
                return Err(Error::InvalidArgument(format!(
                    "location {i} out of range for {m} valid cells"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidArgument(format!("duplicate location {i}")));
            }
            seen[i] = true;
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }
}

/// Valid-cell row indices eligible to host a sensor.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    locations: Vec<usize>, // sorted, distinct
}

impl CandidateSet {
    pub fn new(mut locations: Vec<usize>, m: usize) -> Result<Self> {
        locations.sort_unstable();
        locations.dedup();
        if locations.is_empty() {
            return Err(Error::InvalidArgument("candidate set is empty".into()));
        }
        if let Some(&last) = locations.last() {
            if last >= m {
                return Err(Error::InvalidArgument(format!(
                    "candidate {last} out of range for {m} valid cells"
                )));
            }
        }
        Ok(Self { locations })
    }

    /// Every valid cell is a candidate.
    pub fn all(m: usize) -> Result<Self> {
        Self::new((0..m).collect(), m)
    }

    pub fn locations(&self) -> &[usize] {
        &self.locations
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }
}

/// How the annealing search picks its starting placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitStrategy {
    Random,
    QrPivot,
}

/// Annealing search settings.
#[derive(Debug, Clone)]
pub struct AnnealConfig {
    /// Swap iterations to run.
    pub iterations: usize,
    /// Probability of keeping an improving swap, in (0, 1].
    pub accept_probability: f64,
    pub seed: u64,
    pub init: InitStrategy,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            iterations: 1000,
            accept_probability: 0.9,
            seed: 0,
            init: InitStrategy::Random,
        }
    }
}

impl AnnealConfig {
    fn validate(&self) -> Result<()> {
        if !(self.accept_probability > 0.0 && self.accept_probability <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "accept probability must be in (0, 1], got {}",
                self.accept_probability
            )));
        }
        Ok(())
    }
}

/// Best reconstruction error after each iteration; entry 0 is the error of
/// the initial placement. Non-increasing by construction of the accept rule.
#[derive(Debug, Clone)]
pub struct OptimizationTrace {
    best_mse: Vec<f64>,
}

impl OptimizationTrace {
    pub fn values(&self) -> &[f64] {
        &self.best_mse
    }

    pub fn initial(&self) -> f64 {
        self.best_mse[0]
    }

    pub fn last(&self) -> f64 {
        *self.best_mse.last().expect("trace is never empty")
    }

    pub fn len(&self) -> usize {
        self.best_mse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.best_mse.is_empty()
    }
}

/// Explicit r x m selector matrix: row i is the unit vector at location i of
/// the placement. [`sample`] is the implicit equivalent.
pub fn canonical_matrix(p: &Placement, m: usize) -> Result<DMatrix<f64>> {
    if let Some(&bad) = p.indices().iter().find(|&&i| i >= m) {
        return Err(Error::InvalidArgument(format!(
            "location {bad} out of range for {m} valid cells"
        )));
    }
    let mut c = DMatrix::zeros(p.len(), m);
    for (row, &loc) in p.indices().iter().enumerate() {
        c[(row, loc)] = 1.0;
    }
    Ok(c)
}

/// Read a field at the placement's locations, preserving order.
pub fn sample(field: &DVector<f64>, p: &Placement) -> Result<DVector<f64>> {
    if let Some(&bad) = p.indices().iter().find(|&&i| i >= field.len()) {
        return Err(Error::InvalidArgument(format!(
            "location {bad} out of range for field of length {}",
            field.len()
        )));
    }
    Ok(DVector::from_iterator(
        p.len(),
        p.indices().iter().map(|&i| field[i]),
    ))
}

/// Row-select every column of a matrix at once (the matrix analogue of
/// [`sample`]).
pub fn sample_columns(data: &DMatrix<f64>, p: &Placement) -> Result<DMatrix<f64>> {
    if let Some(&bad) = p.indices().iter().find(|&&i| i >= data.nrows()) {
        return Err(Error::InvalidArgument(format!(
            "location {bad} out of range for {} rows",
            data.nrows()
        )));
    }
    Ok(data.select_rows(p.indices()))
}

/// Reusable evaluator: centers the data against the basis mean once, then
/// scores placements by reconstruction MSE. Shared by [`placement_mse`],
/// the annealing search and the exhaustive baseline, so all report bitwise
/// identical numbers for the same placement.
pub struct PlacementEvaluator<'a> {
    basis: &'a Basis,
    raw: &'a DMatrix<f64>,
    centered: DMatrix<f64>,
    entries: f64,
}

impl<'a> PlacementEvaluator<'a> {
    pub fn new(ts: &'a TrainingSet, basis: &'a Basis) -> Result<Self> {
        if ts.locations() != basis.locations() {
            return Err(Error::Dimension(format!(
                "training set has {} locations, basis has {}",
                ts.locations(),
                basis.locations()
            )));
        }
        let mut centered = ts.data().clone();
        for j in 0..centered.ncols() {
            for i in 0..centered.nrows() {
                centered[(i, j)] -= basis.mean().values()[i];
            }
        }
        Ok(Self {
            basis,
            raw: ts.data(),
            centered,
            entries: (ts.locations() * ts.snapshots()) as f64,
        })
    }

    /// Reconstruction MSE of the placement over all entries, or
    /// [`Error::IllConditioned`] when the sensor rows cannot be inverted.
    pub fn mse(&self, p: &Placement) -> Result<f64> {
        if p.len() != self.basis.rank() {
            return Err(Error::Dimension(format!(
                "placement has {} sensors but basis rank is {}",
                p.len(),
                self.basis.rank()
            )));
        }
        let system = reconstruct::interpolation_system(p, self.basis)?;
        let observed = sample_columns(&self.centered, p)?;
        let coeffs = system.solve_matrix(&observed)?;
        let residual = self.basis.modes() * coeffs - &self.centered;
        // the residual against centered data equals the residual against raw
        // data: the same mean is added to both sides
        Ok((residual.norm_squared() / self.entries).max(0.0))
    }

    pub fn raw_scale(&self) -> f64 {
        self.raw.norm_squared() / self.entries
    }
}

/// Reconstruction MSE of a placement on a training set: every snapshot is
/// rebuilt from its readings at the placement and compared to the original.
pub fn placement_mse(p: &Placement, ts: &TrainingSet, b: &Basis) -> Result<f64> {
    PlacementEvaluator::new(ts, b)?.mse(p)
}

fn draw_distinct<R: Rng>(pool: &[usize], r: usize, rng: &mut R) -> Vec<usize> {
    // partial Fisher-Yates over a copy of the pool
    let mut pool = pool.to_vec();
    for i in 0..r {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(r);
    pool
}

/// Draw `r` distinct locations uniformly from the candidate set.
pub fn random_placement(cs: &CandidateSet, r: usize, seed: u64) -> Result<Placement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_placement_from_rng(cs, r, &mut rng)
}

fn random_placement_from_rng<R: Rng>(
    cs: &CandidateSet,
    r: usize,
    rng: &mut R,
) -> Result<Placement> {
    if r == 0 {
        return Err(Error::InvalidArgument(
            "placement needs at least one location".into(),
        ));
    }
    if r > cs.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot draw {r} locations from {} candidates",
            cs.len()
        )));
    }
    let indices = draw_distinct(cs.locations(), r, rng);
    let m = cs.locations().last().copied().unwrap_or(0) + 1;
    Placement::new(indices, m)
}

/// Greedy pivoted selection on the transposed mode matrix: each step takes
/// the location whose residual row norm is largest (ties go to the lowest
/// index), then deflates the remaining rows. Deterministic.
pub fn qdeim_placement(b: &Basis) -> Result<Placement> {
    let rows: Vec<usize> = (0..b.locations()).collect();
    qdeim_on_rows(b, &rows)
}

/// Pivoted selection restricted to the given candidate rows.
pub(crate) fn qdeim_on_rows(b: &Basis, rows: &[usize]) -> Result<Placement> {
    if rows.len() < b.rank() {
        return Err(Error::InvalidArgument(format!(
            "{} candidate rows cannot seat {} sensors",
            rows.len(),
            b.rank()
        )));
    }
    let picked = pivoted_rows(b.modes(), rows, b.rank())?;
    Placement::new(picked, b.locations())
}

/// Greedy column-pivoted orthogonalization over the selected rows of a mode
/// matrix: pick the row of largest residual norm (lowest index on ties),
/// deflate the rest, repeat `r` times.
fn pivoted_rows(modes: &DMatrix<f64>, rows: &[usize], r: usize) -> Result<Vec<usize>> {
    let mut work: Vec<DVector<f64>> = rows.iter().map(|&i| modes.row(i).transpose()).collect();
    let mut taken = vec![false; rows.len()];
    let mut picked = Vec::with_capacity(r);

    for _ in 0..r {
        let mut best = usize::MAX;
        let mut best_norm = -1.0;
        for (j, col) in work.iter().enumerate() {
            if taken[j] {
                continue;
            }
            let n = col.norm_squared();
            if n > best_norm {
                best_norm = n;
                best = j;
            }
        }
        if best == usize::MAX || best_norm <= 0.0 {
            return Err(Error::Numerical(
                "mode rows are rank-deficient; cannot pivot".into(),
            ));
        }
        taken[best] = true;
        picked.push(rows[best]);

        let pivot = work[best].clone() / best_norm.sqrt();
        for (j, col) in work.iter_mut().enumerate() {
            if !taken[j] {
                let proj = pivot.dot(col);
                *col -= &pivot * proj;
            }
        }
    }
    Ok(picked)
}

/// Annealing search over placements (swap one location per iteration,
/// accept improving swaps with the configured probability).
///
/// Requires at least one non-member candidate to swap in, i.e.
/// `cs.len() > b.rank()`.
pub fn optimize_placement(
    ts: &TrainingSet,
    cs: &CandidateSet,
    b: &Basis,
    cfg: &AnnealConfig,
) -> Result<(Placement, OptimizationTrace)> {
    cfg.validate()?;
    let r = b.rank();
    if cs.len() <= r {
        return Err(Error::InvalidArgument(format!(
            "candidate set of {} cannot improve a placement of {} sensors",
            cs.len(),
            r
        )));
    }
    let evaluator = PlacementEvaluator::new(ts, b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut current = match cfg.init {
        InitStrategy::Random => random_placement_from_rng(cs, r, &mut rng)?,
        InitStrategy::QrPivot => qdeim_on_rows(b, cs.locations())?,
    };
    let mut current_mse = mse_or_infinite(&evaluator, &current)?;

    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    trace.push(current_mse);

    for _ in 0..cfg.iterations {
        let out_pos = rng.gen_range(0..r);
        let complement: Vec<usize> = cs
            .locations()
            .iter()
            .copied()
            .filter(|l| !current.contains(*l))
            .collect();
        let incoming = complement[rng.gen_range(0..complement.len())];

        let mut indices = current.indices().to_vec();
        indices[out_pos] = incoming;
        let candidate = Placement { indices };
        let candidate_mse = mse_or_infinite(&evaluator, &candidate)?;

        let luck: f64 = rng.gen();
        if candidate_mse < current_mse && luck <= cfg.accept_probability {
            current = candidate;
            current_mse = candidate_mse;
        }
        trace.push(current_mse);
    }

    Ok((current, OptimizationTrace { best_mse: trace }))
}

/// Singular candidate systems are worth +infinity inside search loops; any
/// other failure is a real error.
fn mse_or_infinite(evaluator: &PlacementEvaluator, p: &Placement) -> Result<f64> {
    match evaluator.mse(p) {
        Ok(v) => Ok(v),
        Err(Error::IllConditioned { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Cap on the number of subsets [`brute_force_placement`] will evaluate.
pub const BRUTE_FORCE_LIMIT: f64 = 1e6;

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
        if acc > 1e18 {
            return f64::INFINITY;
        }
    }
    acc
}

/// Exhaustive search over all r-subsets of the candidate set, in
/// lexicographic order; the first subset achieving the minimum wins.
pub fn brute_force_placement(
    ts: &TrainingSet,
    cs: &CandidateSet,
    b: &Basis,
) -> Result<(Placement, f64)> {
    let r = b.rank();
    if r > cs.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot seat {r} sensors on {} candidates",
            cs.len()
        )));
    }
    let combinations = binomial(cs.len(), r);
    if combinations > BRUTE_FORCE_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "{combinations:.3e} subsets exceed the exhaustive-search limit of {BRUTE_FORCE_LIMIT:.0e}"
        )));
    }
    let evaluator = PlacementEvaluator::new(ts, b)?;
    let pool = cs.locations();

    let mut best: Option<(Placement, f64)> = None;
    let mut picks: Vec<usize> = (0..r).collect(); // indices into pool
    loop {
        let indices: Vec<usize> = picks.iter().map(|&i| pool[i]).collect();
        let placement = Placement::new(indices, b.locations())?;
        // an Err here means a singular subset: skip it
        if let Ok(mse) = evaluator.mse(&placement) {
            if best.as_ref().is_none_or(|(_, e)| mse < *e) {
                best = Some((placement, mse));
            }
        }

        // advance to the next combination
        let mut i = r;
        loop {
            if i == 0 {
                return best.ok_or_else(|| {
                    Error::Numerical("every candidate subset is singular".into())
                });
            }
            i -= 1;
            if picks[i] != i + pool.len() - r {
                picks[i] += 1;
                for j in i + 1..r {
                    picks[j] = picks[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Write a placement as one 0-based location index per line.
pub fn save_placement(p: &Placement, path: &std::path::Path) -> Result<()> {
    let mut out = String::new();
    for &i in p.indices() {
        out.push_str(&i.to_string());
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read a placement file written by [`save_placement`]. `m` bounds the
/// indices.
pub fn load_placement(path: &std::path::Path, m: usize) -> Result<Placement> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut indices = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let idx: usize = line.parse().map_err(|_| {
            Error::format(path, i + 1, format!("bad location index '{line}'"))
        })?;
        indices.push(idx);
    }
    Placement::new(indices, m)
}

/// Write an optimization trace as CSV with an `iteration,mse` header.
pub fn save_trace(trace: &OptimizationTrace, path: &std::path::Path) -> Result<()> {
    let mut out = String::from("iteration,mse\n");
    for (i, v) in trace.values().iter().enumerate() {
        out.push_str(&format!("{i},{v}\n"));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
