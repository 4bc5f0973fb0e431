//! SVD basis learning, rank-r truncation and singular value hard
//! thresholding.
//!
//! The factorization convention is `centered = modes * diag(sigma) * right'`
//! with orthonormal mode columns; the per-location temporal mean removed
//! before factorization travels with the basis so reconstructions can be
//! expressed in raw field units.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fielddata::{mean_normalize, MeanVector, TrainingSet};

/// Full SVD of a centered training matrix, plus the removed mean.
#[derive(Debug, Clone)]
pub struct SvdFactorization {
    left_modes: DMatrix<f64>,      // m x p, orthonormal columns
    singular_values: DVector<f64>, // p, non-increasing
    right_modes: DMatrix<f64>,     // M x p, orthonormal columns
    mean: MeanVector,
}

impl SvdFactorization {
    pub fn new(
        left_modes: DMatrix<f64>,
        singular_values: DVector<f64>,
        right_modes: DMatrix<f64>,
        mean: MeanVector,
    ) -> Result<Self> {
        let p = singular_values.len();
        if left_modes.ncols() != p || right_modes.ncols() != p {
            return Err(Error::Dimension(format!(
                "factor column counts ({}, {}) do not match {} singular values",
                left_modes.ncols(),
                right_modes.ncols(),
                p
            )));
        }
        if mean.len() != left_modes.nrows() {
            return Err(Error::Dimension(format!(
                "mean length {} does not match {} locations",
                mean.len(),
                left_modes.nrows()
            )));
        }
        if singular_values.iter().any(|&s| s.is_nan() || s < 0.0) {
            return Err(Error::Numerical("negative or NaN singular value".into()));
        }
        if singular_values
            .as_slice()
            .windows(2)
            .any(|w| w[1] > w[0] + 1e-12 * w[0].abs().max(1.0))
        {
            return Err(Error::Numerical(
                "singular values are not sorted non-increasing".into(),
            ));
        }
        check_orthonormal(&left_modes, "left modes")?;
        check_orthonormal(&right_modes, "right modes")?;
        Ok(Self {
            left_modes,
            singular_values,
            right_modes,
            mean,
        })
    }

    pub fn left_modes(&self) -> &DMatrix<f64> {
        &self.left_modes
    }

    pub fn singular_values(&self) -> &DVector<f64> {
        &self.singular_values
    }

    pub fn right_modes(&self) -> &DMatrix<f64> {
        &self.right_modes
    }

    pub fn mean(&self) -> &MeanVector {
        &self.mean
    }

    /// Valid-cell count of the underlying field.
    pub fn locations(&self) -> usize {
        self.left_modes.nrows()
    }

    /// Snapshot count of the training data.
    pub fn snapshots(&self) -> usize {
        self.right_modes.nrows()
    }

    /// min(m, M): number of singular values carried.
    pub fn spectrum_len(&self) -> usize {
        self.singular_values.len()
    }
}

/// Rank-r truncation of a factorization: the learned reconstruction basis.
#[derive(Debug, Clone)]
pub struct Basis {
    modes: DMatrix<f64>,               // m x r, orthonormal columns
    singular_values: DVector<f64>,     // r
    right_modes: Option<DMatrix<f64>>, // M x r; absent on a basis loaded from disk
    mean: MeanVector,
}

impl Basis {
    pub fn new(
        modes: DMatrix<f64>,
        singular_values: DVector<f64>,
        right_modes: Option<DMatrix<f64>>,
        mean: MeanVector,
    ) -> Result<Self> {
        let r = modes.ncols();
        if r == 0 || r > modes.nrows() {
            return Err(Error::Dimension(format!(
                "rank {} out of range for {} locations",
                r,
                modes.nrows()
            )));
        }
        if singular_values.len() != r {
            return Err(Error::Dimension(format!(
                "{} singular values for rank {}",
                singular_values.len(),
                r
            )));
        }
        if let Some(v) = &right_modes {
            if v.ncols() != r {
                return Err(Error::Dimension(format!(
                    "right modes have {} columns for rank {}",
                    v.ncols(),
                    r
                )));
            }
            if v.nrows() < r {
                return Err(Error::Dimension(format!(
                    "rank {} exceeds {} snapshots",
                    r,
                    v.nrows()
                )));
            }
        }
        if mean.len() != modes.nrows() {
            return Err(Error::Dimension(format!(
                "mean length {} does not match {} locations",
                mean.len(),
                modes.nrows()
            )));
        }
        check_orthonormal(&modes, "basis modes")?;
        Ok(Self {
            modes,
            singular_values,
            right_modes,
            mean,
        })
    }

    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    pub fn singular_values(&self) -> &DVector<f64> {
        &self.singular_values
    }

    /// Temporal modes, when the basis was produced by [`truncate`] rather
    /// than loaded from disk.
    pub fn right_modes(&self) -> Option<&DMatrix<f64>> {
        self.right_modes.as_ref()
    }

    pub fn mean(&self) -> &MeanVector {
        &self.mean
    }

    pub fn rank(&self) -> usize {
        self.modes.ncols()
    }

    pub fn locations(&self) -> usize {
        self.modes.nrows()
    }
}

fn check_orthonormal(m: &DMatrix<f64>, what: &str) -> Result<()> {
    let gram = m.transpose() * m;
    let p = gram.nrows();
    for i in 0..p {
        for j in 0..p {
            let expect = if i == j { 1.0 } else { 0.0 };
            if (gram[(i, j)] - expect).abs() > 1e-8 {
                return Err(Error::Numerical(format!(
                    "{what} are not orthonormal: gram[{i},{j}] = {}",
                    gram[(i, j)]
                )));
            }
        }
    }
    Ok(())
}

/// Center the training data and factorize it.
///
/// Column signs are fixed so the largest-magnitude entry of each spatial
/// mode is positive, making the factorization deterministic.
pub fn compute_svd(ts: &TrainingSet) -> Result<SvdFactorization> {
    let (centered, mean) = mean_normalize(ts);
    let m = centered.locations();
    let cols = centered.snapshots();
    let p = m.min(cols);

    let svd = centered
        .data()
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = svd.singular_values;

    // sort by singular value, descending
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap());

    let mut left = DMatrix::zeros(m, p);
    let mut right = DMatrix::zeros(cols, p);
    let mut sigma = DVector::zeros(p);
    for (dst, &src) in order.iter().enumerate() {
        sigma[dst] = sv[src];
        let col = u.column(src);
        let mut flip = 1.0;
        let mut best = 0.0f64;
        for &x in col.iter() {
            if x.abs() > best {
                best = x.abs();
                flip = if x < 0.0 { -1.0 } else { 1.0 };
            }
        }
        left.column_mut(dst).copy_from(&(col * flip));
        right
            .column_mut(dst)
            .copy_from(&(v_t.row(src).transpose() * flip));
    }

    SvdFactorization::new(left, sigma, right, mean)
}

/// Keep the first `r` modes.
pub fn truncate(f: &SvdFactorization, r: usize) -> Result<Basis> {
    if r == 0 || r > f.spectrum_len() {
        return Err(Error::InvalidArgument(format!(
            "rank must be in 1..={}, got {r}",
            f.spectrum_len()
        )));
    }
    Basis::new(
        f.left_modes.columns(0, r).into_owned(),
        f.singular_values.rows(0, r).into_owned(),
        Some(f.right_modes.columns(0, r).into_owned()),
        f.mean.clone(),
    )
}

/// Hard-threshold coefficient for known noise level at aspect ratio `beta`.
pub fn svht_lambda(beta: f64) -> f64 {
    let num = 8.0 * beta;
    let den = (beta + 1.0) + (beta * beta + 14.0 * beta + 1.0).sqrt();
    (2.0 * (beta + 1.0) + num / den).sqrt()
}

/// Median-based coefficient for unknown noise at aspect ratio `beta`
/// (cubic fit; an approximation of the exact consistency constant).
pub fn svht_omega(beta: f64) -> f64 {
    0.56 * beta.powi(3) - 0.95 * beta * beta + 1.82 * beta + 1.43
}

/// Optimal hard-thresholding rank.
///
/// With `noise_std = Some(s)` the threshold is
/// `lambda(beta) * sqrt(max(m, M)) * s`; with unknown noise it is
/// `omega(beta) * median(singular values)`. Singular values at or below the
/// numerical-zero floor `max(m, M) * eps * sigma_1` are never counted (the
/// median estimator is meaningless below round-off). Returns at least 1.
pub fn svht_rank(f: &SvdFactorization, noise_std: Option<f64>) -> Result<usize> {
    let m = f.locations();
    let cols = f.snapshots();
    let larger = m.max(cols) as f64;
    let beta = m.min(cols) as f64 / larger;
    let sv = &f.singular_values;

    let tau = match noise_std {
        Some(s) => {
            if s < 0.0 || !s.is_finite() {
                return Err(Error::InvalidArgument(
                    "noise_std must be finite and >= 0".into(),
                ));
            }
            svht_lambda(beta) * larger.sqrt() * s
        }
        None => {
            let p = sv.len();
            let median = if p % 2 == 1 {
                sv[p / 2]
            } else {
                0.5 * (sv[p / 2 - 1] + sv[p / 2])
            };
            svht_omega(beta) * median
        }
    };

    let floor = larger * f64::EPSILON * sv[0];
    let threshold = tau.max(floor);
    let count = sv.iter().filter(|&&s| s > threshold).count();
    Ok(count.max(1))
}

/// Mean squared error of the orthogonal projection of `ts` onto the basis
/// subspace: the reconstruction target no point-sampling scheme can beat.
pub fn projection_error(b: &Basis, ts: &TrainingSet) -> Result<f64> {
    if ts.locations() != b.locations() {
        return Err(Error::Dimension(format!(
            "training set has {} locations, basis has {}",
            ts.locations(),
            b.locations()
        )));
    }
    let m = ts.locations();
    let cols = ts.snapshots();
    let mut centered = ts.data().clone();
    for j in 0..cols {
        for i in 0..m {
            centered[(i, j)] -= b.mean().values()[i];
        }
    }
    let coeffs = b.modes().transpose() * &centered;
    let residual = &centered - b.modes() * coeffs;
    Ok(residual.norm_squared() / (m * cols) as f64)
}

// ---------------------------------------------------------------------------
// Basis files: a matrix file for the modes plus a text sidecar carrying the
// rank, singular values and mean.
// ---------------------------------------------------------------------------

/// Write `modes` as a matrix file and `r=`, `sigma=`, `mean=` lines as a
/// sidecar.
pub fn save_basis(b: &Basis, modes_path: &Path, sidecar_path: &Path) -> Result<()> {
    crate::fielddata::write_matrix(b.modes(), modes_path)?;
    let mut out = String::new();
    let _ = writeln!(out, "r={}", b.rank());
    let sigma: Vec<String> = b.singular_values().iter().map(|s| s.to_string()).collect();
    let _ = writeln!(out, "sigma={}", sigma.join(" "));
    let mean: Vec<String> = b.mean().values().iter().map(|s| s.to_string()).collect();
    let _ = writeln!(out, "mean={}", mean.join(" "));
    fs::write(sidecar_path, out).map_err(|e| Error::io(sidecar_path, e))
}

/// Load a basis saved by [`save_basis`]. The loaded basis carries no
/// temporal modes.
pub fn load_basis(modes_path: &Path, sidecar_path: &Path) -> Result<Basis> {
    let modes = crate::fielddata::read_matrix(modes_path)?;
    let text = fs::read_to_string(sidecar_path).map_err(|e| Error::io(sidecar_path, e))?;

    let mut rank: Option<usize> = None;
    let mut sigma: Option<Vec<f64>> = None;
    let mut mean: Option<Vec<f64>> = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::format(
                sidecar_path,
                line_no,
                format!("expected key=value, got '{line}'"),
            )
        })?;
        match key.trim() {
            "r" => {
                rank = Some(value.trim().parse().map_err(|_| {
                    Error::format(sidecar_path, line_no, format!("bad rank '{value}'"))
                })?)
            }
            "sigma" => sigma = Some(parse_floats(value, sidecar_path, line_no)?),
            "mean" => mean = Some(parse_floats(value, sidecar_path, line_no)?),
            other => {
                return Err(Error::format(
                    sidecar_path,
                    line_no,
                    format!("unknown key '{other}'"),
                ))
            }
        }
    }

    let rank = rank.ok_or_else(|| Error::format(sidecar_path, 1, "missing 'r=' line"))?;
    let sigma = sigma.ok_or_else(|| Error::format(sidecar_path, 1, "missing 'sigma=' line"))?;
    let mean = mean.ok_or_else(|| Error::format(sidecar_path, 1, "missing 'mean=' line"))?;
    if modes.ncols() != rank {
        return Err(Error::Dimension(format!(
            "modes file has {} columns but sidecar declares r={rank}",
            modes.ncols()
        )));
    }
    Basis::new(
        modes,
        DVector::from_vec(sigma),
        None,
        MeanVector::new(DVector::from_vec(mean))?,
    )
}

fn parse_floats(value: &str, path: &Path, line_no: usize) -> Result<Vec<f64>> {
    value
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::format(path, line_no, format!("bad value '{tok}'")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fielddata::{synth_field, GridGeometry};
    use nalgebra::DMatrix;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use tempfile::tempdir;

    fn random_training(m: usize, cols: usize, seed: u64) -> TrainingSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GridGeometry::full(1, m).unwrap();
        TrainingSet::new(
            DMatrix::from_fn(m, cols, |_, _| rng.gen::<f64>() * 6.0 - 3.0),
            g,
            None,
        )
        .unwrap()
    }

    /// Random factorization with a prescribed spectrum, for tests that need
    /// exact singular values. Orthonormal factors come from QR.
    fn factorization_with_spectrum(
        m: usize,
        cols: usize,
        sigma: &[f64],
        seed: u64,
    ) -> SvdFactorization {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = sigma.len();
        let a = DMatrix::from_fn(m, m, |_, _| rng.gen::<f64>() - 0.5);
        let b = DMatrix::from_fn(cols, cols, |_, _| rng.gen::<f64>() - 0.5);
        let qu = a.qr().q().columns(0, p).into_owned();
        let qv = b.qr().q().columns(0, p).into_owned();
        SvdFactorization::new(qu, DVector::from_row_slice(sigma), qv, MeanVector::zeros(m))
            .unwrap()
    }

    #[test]
    fn hand_two_by_two_case() {
        // columns [3,4] and [-3,-4]: zero temporal mean, centered matrix is
        // [[3,-3],[4,-4]], a rank-1 matrix with sigma_1 = sqrt(50)
        let g = GridGeometry::full(1, 2).unwrap();
        let ts = TrainingSet::new(
            DMatrix::from_row_slice(2, 2, &[3.0, -3.0, 4.0, -4.0]),
            g,
            None,
        )
        .unwrap();
        let f = compute_svd(&ts).unwrap();
        assert!((f.singular_values()[0] - 50f64.sqrt()).abs() < 1e-12);
        assert!(f.singular_values()[1] < 1e-12);
        assert!((f.left_modes()[(0, 0)] - 0.6).abs() < 1e-12);
        assert!((f.left_modes()[(1, 0)] - 0.8).abs() < 1e-12);
        assert_eq!(f.mean().values().as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn rank_one_synthetic_collapses() {
        let g = GridGeometry::full(3, 3).unwrap();
        let ts = synth_field(&g, 1, 12, 0.0, 4).unwrap();
        let f = compute_svd(&ts).unwrap();
        assert!(f.singular_values()[1] < 1e-10 * f.singular_values()[0]);
    }

    #[test]
    fn multiply_back_reproduces_input() {
        let ts = random_training(6, 10, 21);
        let f = compute_svd(&ts).unwrap();
        let recon = f.left_modes()
            * DMatrix::from_diagonal(f.singular_values())
            * f.right_modes().transpose();
        let scale = ts.data().abs().max();
        for i in 0..6 {
            for j in 0..10 {
                let v = recon[(i, j)] + f.mean().values()[i];
                assert!(
                    (v - ts.data()[(i, j)]).abs() < 1e-8 * scale,
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn factors_are_orthonormal() {
        let ts = random_training(7, 9, 2);
        let f = compute_svd(&ts).unwrap();
        let gu = f.left_modes().transpose() * f.left_modes();
        let gv = f.right_modes().transpose() * f.right_modes();
        let p = f.spectrum_len();
        let id = DMatrix::<f64>::identity(p, p);
        assert!((gu - &id).abs().max() < 1e-8);
        assert!((gv - &id).abs().max() < 1e-8);
    }

    #[test]
    fn compute_svd_is_deterministic() {
        let ts = random_training(5, 8, 3);
        let a = compute_svd(&ts).unwrap();
        let b = compute_svd(&ts).unwrap();
        assert_eq!(a.left_modes(), b.left_modes());
        assert_eq!(a.right_modes(), b.right_modes());
        assert_eq!(a.singular_values(), b.singular_values());
    }

    #[test]
    fn truncate_full_rank_has_zero_error() {
        let ts = random_training(5, 7, 8);
        let f = compute_svd(&ts).unwrap();
        let b = truncate(&f, 5).unwrap();
        let err = projection_error(&b, &ts).unwrap();
        let scale = f.singular_values()[0].powi(2);
        assert!(err < 1e-16 * scale, "error {err}");
    }

    #[test]
    fn truncation_error_matches_discarded_spectrum() {
        // spectrum [5,3,1], r=2: squared Frobenius error of the rank-2
        // approximation is exactly 1
        let f = factorization_with_spectrum(4, 5, &[5.0, 3.0, 1.0], 13);
        let full = f.left_modes()
            * DMatrix::from_diagonal(f.singular_values())
            * f.right_modes().transpose();
        let b = truncate(&f, 2).unwrap();
        let approx = b.modes()
            * DMatrix::from_diagonal(b.singular_values())
            * b.right_modes().unwrap().transpose();
        let err2 = (full - approx).norm_squared();
        assert!((err2 - 1.0).abs() < 1e-8, "squared error {err2}");
    }

    #[test]
    fn truncation_error_random_case() {
        let ts = random_training(8, 12, 5);
        let f = compute_svd(&ts).unwrap();
        let (centered, _) = mean_normalize(&ts);
        for r in 1..=8usize {
            let b = truncate(&f, r).unwrap();
            let approx = b.modes()
                * DMatrix::from_diagonal(b.singular_values())
                * b.right_modes().unwrap().transpose();
            let err2 = (centered.data() - approx).norm_squared();
            // discarded-spectrum oracle
            let expect: f64 = (r..8).map(|k| f.singular_values()[k].powi(2)).sum();
            assert!(
                (err2 - expect).abs() <= 1e-8 * expect.max(1e-12),
                "r={r}: {err2} vs {expect}"
            );
        }
    }

    #[test]
    fn truncate_rejects_out_of_range() {
        let ts = random_training(4, 6, 9);
        let f = compute_svd(&ts).unwrap();
        assert!(truncate(&f, 0).is_err());
        assert!(truncate(&f, 5).is_err());
    }

    #[test]
    fn lambda_at_square_aspect_is_four_over_sqrt_three() {
        assert!((svht_lambda(1.0) - 4.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((svht_lambda(1.0) - 2.3094).abs() < 1e-4);
    }

    #[test]
    fn omega_cubic_fit_at_one() {
        assert!((svht_omega(1.0) - 2.86).abs() < 1e-12);
    }

    #[test]
    fn svht_unknown_noise_median_case() {
        // median 0.5, omega(1) = 2.86, tau = 1.43: two values above
        let f = factorization_with_spectrum(5, 5, &[10.0, 9.0, 0.5, 0.45, 0.4], 3);
        assert_eq!(svht_rank(&f, None).unwrap(), 2);
    }

    #[test]
    fn svht_recovers_noiseless_rank() {
        let g = GridGeometry::full(8, 8).unwrap();
        for k in [1usize, 2, 3, 5] {
            let ts = synth_field(&g, k, 64, 0.0, 17).unwrap();
            let f = compute_svd(&ts).unwrap();
            assert_eq!(svht_rank(&f, None).unwrap(), k, "n_modes = {k}");
        }
    }

    #[test]
    fn svht_known_noise_is_non_increasing_in_noise() {
        let f = factorization_with_spectrum(6, 6, &[30.0, 10.0, 3.0, 1.0, 0.3, 0.1], 7);
        let mut last = usize::MAX;
        for s in [0.0, 0.1, 0.5, 1.0, 3.0, 10.0] {
            let r = svht_rank(&f, Some(s)).unwrap();
            assert!(r <= last, "rank increased from {last} to {r} at noise {s}");
            last = r;
        }
        assert!(svht_rank(&f, Some(-1.0)).is_err());
    }

    #[test]
    fn svht_returns_at_least_one() {
        let f = factorization_with_spectrum(4, 4, &[1.0, 0.9, 0.8, 0.7], 1);
        // enormous known noise pushes tau above everything
        assert_eq!(svht_rank(&f, Some(100.0)).unwrap(), 1);
    }

    #[test]
    fn projection_error_exact_subspace_is_zero() {
        let g = GridGeometry::full(8, 8).unwrap();
        let ts = synth_field(&g, 3, 50, 0.0, 2).unwrap();
        let f = compute_svd(&ts).unwrap();
        let b = truncate(&f, 3).unwrap();
        let err = projection_error(&b, &ts).unwrap();
        assert!(err < 1e-16 * f.singular_values()[0].powi(2), "error {err}");
    }

    #[test]
    fn projection_error_matches_eckart_young() {
        // spectrum [5,3,1] on a 3x3 matrix, r=2: MSE = discarded 1^2 over 9
        // entries
        let f = factorization_with_spectrum(3, 3, &[5.0, 3.0, 1.0], 19);
        let full = f.left_modes()
            * DMatrix::from_diagonal(f.singular_values())
            * f.right_modes().transpose();
        let g = GridGeometry::full(1, 3).unwrap();
        let ts = TrainingSet::new(full, g, None).unwrap();
        // rows of a product with random factors are not zero-mean, so learn
        // the basis from the set itself and compare to its own spectrum
        let f2 = compute_svd(&ts).unwrap();
        let b = truncate(&f2, 2).unwrap();
        let err = projection_error(&b, &ts).unwrap();
        let expect = f2.singular_values()[2].powi(2) / 9.0;
        assert!(
            (err - expect).abs() < 1e-10 * expect.max(1e-12),
            "{err} vs {expect}"
        );
    }

    #[test]
    fn projection_error_is_non_increasing_in_rank() {
        let ts = random_training(6, 9, 31);
        let f = compute_svd(&ts).unwrap();
        let mut last = f64::INFINITY;
        for r in 1..=6 {
            let b = truncate(&f, r).unwrap();
            let err = projection_error(&b, &ts).unwrap();
            assert!(err <= last + 1e-15, "r={r}: {err} > {last}");
            last = err;
        }
    }

    #[test]
    fn basis_files_round_trip() {
        let dir = tempdir().unwrap();
        let ts = random_training(6, 8, 23);
        let f = compute_svd(&ts).unwrap();
        let b = truncate(&f, 3).unwrap();
        let mpath = dir.path().join("modes.txt");
        let spath = dir.path().join("basis.txt");
        save_basis(&b, &mpath, &spath).unwrap();
        let back = load_basis(&mpath, &spath).unwrap();
        assert_eq!(back.rank(), 3);
        assert_eq!(back.modes(), b.modes());
        assert_eq!(back.singular_values(), b.singular_values());
        assert_eq!(back.mean(), b.mean());
        assert!(back.right_modes().is_none());
    }
}
