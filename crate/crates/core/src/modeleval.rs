//! Model-based placement scoring: a linear temporal model fitted to the
//! basis coefficients, the Kalman prior-covariance recursion, and the
//! largest-eigenvalue criterion used to rank deployment strategies.
//!
//! This is the baseline the data-driven search competes against: a placement
//! is good when the Kalman filter driven by its sensor rows keeps the prior
//! estimation-error covariance small.

use nalgebra::DMatrix;

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::placement::Placement;

const SYMMETRY_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-9;

/// Linear-Gaussian model of the field: coefficient dynamics
/// `x[t+1] = A x[t] + w` observed through rows of the spatial map with
/// isotropic reading noise.
#[derive(Debug, Clone)]
pub struct StateSpaceModel {
    temporal: DMatrix<f64>,      // r x r
    spatial: DMatrix<f64>,       // m x r
    observation_noise: f64,      // scalar variance per sensor
    process_noise: DMatrix<f64>, // r x r, symmetric PSD
}

impl StateSpaceModel {
    pub fn new(
        temporal: DMatrix<f64>,
        spatial: DMatrix<f64>,
        observation_noise: f64,
        process_noise: DMatrix<f64>,
    ) -> Result<Self> {
        let r = temporal.nrows();
        if temporal.ncols() != r {
            return Err(Error::Dimension("temporal matrix must be square".into()));
        }
        if spatial.ncols() != r {
            return Err(Error::Dimension(format!(
                "spatial map has {} columns for state dimension {r}",
                spatial.ncols()
            )));
        }
        if process_noise.nrows() != r || process_noise.ncols() != r {
            return Err(Error::Dimension(
                "process noise must match the state dimension".into(),
            ));
        }
        if observation_noise < 0.0 || !observation_noise.is_finite() {
            return Err(Error::InvalidArgument(
                "observation noise variance must be finite and >= 0".into(),
            ));
        }
        check_symmetric_psd(&process_noise, "process noise")?;
        Ok(Self {
            temporal,
            spatial,
            observation_noise,
            process_noise,
        })
    }

    pub fn temporal(&self) -> &DMatrix<f64> {
        &self.temporal
    }

    pub fn spatial(&self) -> &DMatrix<f64> {
        &self.spatial
    }

    pub fn observation_noise(&self) -> f64 {
        self.observation_noise
    }

    pub fn process_noise(&self) -> &DMatrix<f64> {
        &self.process_noise
    }

    /// State dimension r.
    pub fn order(&self) -> usize {
        self.temporal.nrows()
    }

    /// Same model with a different sensor reading variance.
    pub fn with_observation_noise(mut self, variance: f64) -> Result<Self> {
        if variance < 0.0 || !variance.is_finite() {
            return Err(Error::InvalidArgument(
                "observation noise variance must be finite and >= 0".into(),
            ));
        }
        self.observation_noise = variance;
        Ok(self)
    }
}

/// Symmetric PSD prior estimation-error covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    matrix: DMatrix<f64>,
}

impl CovarianceState {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension("covariance must be square".into()));
        }
        check_symmetric_psd(&matrix, "covariance")?;
        Ok(Self { matrix })
    }

    pub fn identity(r: usize) -> Self {
        Self {
            matrix: DMatrix::identity(r, r),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Largest eigenvalue (the scalar quality score of the covariance).
    pub fn max_eigenvalue(&self) -> f64 {
        max_eigenvalue(&self.matrix)
    }
}

fn max_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
}

fn check_symmetric_psd(m: &DMatrix<f64>, what: &str) -> Result<()> {
    let scale = m.abs().max().max(1.0);
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::Numerical(format!(
                    "{what} is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    let min_eig = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -EIGEN_TOL * scale {
        return Err(Error::Numerical(format!(
            "{what} has negative eigenvalue {min_eig}"
        )));
    }
    Ok(())
}

fn symmetrize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    m += t;
    m * 0.5
}

/// Least-squares fit of `x[t+1] = A x[t]` over the columns of `x`, plus the
/// uncentered covariance of the residuals. Needs at least `r + 2` columns.
pub fn fit_temporal_model(x: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let r = x.nrows();
    let cols = x.ncols();
    if cols < r + 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least r + 2 = {} coefficient snapshots, got {cols}",
            r + 2
        )));
    }
    let x0 = x.columns(0, cols - 1);
    let x1 = x.columns(1, cols - 1);

    // A = X1 X0' (X0 X0')^-1 via an SVD solve of the normal system
    let gram = x0 * x0.transpose();
    let svd = gram
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD of the regression system did not converge".into()))?;
    let sv = &svd.singular_values;
    let hi = sv.iter().cloned().fold(0.0f64, f64::max);
    let lo = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if hi <= 0.0 || lo < 1e-12 * hi {
        return Err(Error::Numerical(
            "coefficient history is rank-deficient; cannot fit the temporal model".into(),
        ));
    }
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut inv_s = DMatrix::zeros(r, r);
    for i in 0..r {
        inv_s[(i, i)] = 1.0 / sv[i];
    }
    let gram_inv = v_t.transpose() * inv_s * u.transpose();
    let a = (x1 * x0.transpose()) * gram_inv;

    let residuals = x1 - &a * x0;
    let process_noise = symmetrize(&residuals * residuals.transpose() / (cols - 1) as f64);

    Ok((a, process_noise))
}

/// Fit the linear-Gaussian model from a basis: coefficient history
/// `diag(sigma) * right'`, spatial map = the modes, reading noise defaulted
/// to 1% of the mean process-noise diagonal.
pub fn fit_state_space(b: &Basis) -> Result<StateSpaceModel> {
    let right = b.right_modes().ok_or_else(|| {
        Error::InvalidArgument(
            "basis carries no temporal modes (loaded from disk?); cannot fit dynamics".into(),
        )
    })?;
    let coeffs = DMatrix::from_diagonal(b.singular_values()) * right.transpose();
    let (temporal, process_noise) = fit_temporal_model(&coeffs)?;
    let observation_noise = 0.01 * process_noise.diagonal().mean();
    StateSpaceModel::new(
        temporal,
        b.modes().clone(),
        observation_noise.max(0.0),
        process_noise,
    )
}

/// Measurement update at the placement's sensor rows (stacked block update).
/// The result is the posterior covariance, symmetrized.
pub fn measurement_update(
    model: &StateSpaceModel,
    prior: &CovarianceState,
    p: &Placement,
) -> Result<CovarianceState> {
    let r = model.order();
    if prior.matrix().nrows() != r {
        return Err(Error::Dimension(format!(
            "covariance is {}x{} for state dimension {r}",
            prior.matrix().nrows(),
            prior.matrix().ncols()
        )));
    }
    if let Some(&bad) = p.indices().iter().find(|&&i| i >= model.spatial.nrows()) {
        return Err(Error::InvalidArgument(format!(
            "location {bad} out of range for {} field rows",
            model.spatial.nrows()
        )));
    }
    let s = model.spatial.select_rows(p.indices()); // k x r
    let pm = prior.matrix();
    let cross = pm * s.transpose(); // r x k
    let mut innovation = &s * &cross; // k x k
    for i in 0..innovation.nrows() {
        innovation[(i, i)] += model.observation_noise;
    }
    let chol = innovation.clone().cholesky().ok_or_else(|| {
        Error::Numerical(
            "singular innovation; increase the observation noise variance".into(),
        )
    })?;
    let gain = chol.solve(&cross.transpose()); // k x r, equals Inn^-1 S P
    let posterior = symmetrize(pm - &cross * gain);
    Ok(CovarianceState { matrix: posterior })
}

/// Propagate a posterior covariance one step through the dynamics.
pub fn time_update(model: &StateSpaceModel, posterior: &CovarianceState) -> CovarianceState {
    let next = &model.temporal * posterior.matrix() * model.temporal.transpose()
        + &model.process_noise;
    CovarianceState {
        matrix: symmetrize(next),
    }
}

/// One full Kalman covariance step: measurement update at the placement,
/// then the time update. Maps a prior to the next prior.
pub fn kalman_prior_update(
    model: &StateSpaceModel,
    prior: &CovarianceState,
    p: &Placement,
) -> Result<CovarianceState> {
    let posterior = measurement_update(model, prior, p)?;
    Ok(time_update(model, &posterior))
}

/// Write a model as three matrix files plus an `Rv=` sidecar.
pub fn save_model(
    model: &StateSpaceModel,
    temporal_path: &std::path::Path,
    spatial_path: &std::path::Path,
    process_noise_path: &std::path::Path,
    sidecar_path: &std::path::Path,
) -> Result<()> {
    crate::fielddata::write_matrix(model.temporal(), temporal_path)?;
    crate::fielddata::write_matrix(model.spatial(), spatial_path)?;
    crate::fielddata::write_matrix(model.process_noise(), process_noise_path)?;
    let sidecar = format!("Rv={}\n", model.observation_noise());
    std::fs::write(sidecar_path, sidecar).map_err(|e| Error::io(sidecar_path, e))
}

/// Load a model saved by [`save_model`].
pub fn load_model(
    temporal_path: &std::path::Path,
    spatial_path: &std::path::Path,
    process_noise_path: &std::path::Path,
    sidecar_path: &std::path::Path,
) -> Result<StateSpaceModel> {
    let temporal = crate::fielddata::read_matrix(temporal_path)?;
    let spatial = crate::fielddata::read_matrix(spatial_path)?;
    let process_noise = crate::fielddata::read_matrix(process_noise_path)?;
    let text =
        std::fs::read_to_string(sidecar_path).map_err(|e| Error::io(sidecar_path, e))?;
    let mut observation_noise = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some(("Rv", value)) => {
                let v: f64 = value.trim().parse().map_err(|_| {
                    Error::format(sidecar_path, i + 1, format!("bad Rv value '{value}'"))
                })?;
                observation_noise = Some(v);
            }
            _ => {
                return Err(Error::format(
                    sidecar_path,
                    i + 1,
                    format!("expected 'Rv=<real>', got '{line}'"),
                ))
            }
        }
    }
    let observation_noise = observation_noise
        .ok_or_else(|| Error::format(sidecar_path, 1, "missing 'Rv=' line"))?;
    StateSpaceModel::new(temporal, spatial, observation_noise, process_noise)
}

/// Convergence threshold for the covariance recursion inside
/// [`gamma_criterion`].
pub const GAMMA_CONVERGENCE_TOL: f64 = 1e-10;

/// Deployment-strategy score: for each placement, run the covariance
/// recursion from the identity prior (for `iterations` steps or until the
/// prior stops changing) and take the largest eigenvalue of the final
/// prior; the score is the worst (largest) value over the placements.
/// Lower is better.
pub fn gamma_criterion(
    model: &StateSpaceModel,
    placements: &[Placement],
    iterations: usize,
) -> Result<f64> {
    if placements.is_empty() {
        return Err(Error::InvalidArgument(
            "gamma criterion needs at least one placement".into(),
        ));
    }
    if iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be >= 1".into()));
    }
    let mut worst = f64::NEG_INFINITY;
    for p in placements {
        let mut prior = CovarianceState::identity(model.order());
        for _ in 0..iterations {
            let next = kalman_prior_update(model, &prior, p)?;
            let delta = (next.matrix() - prior.matrix()).abs().max();
            prior = next;
            if delta < GAMMA_CONVERGENCE_TOL {
                break;
            }
        }
        worst = worst.max(prior.max_eigenvalue());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{compute_svd, truncate};
    use crate::fielddata::{synth_field, GridGeometry};
    use nalgebra::DVector;
    use rand::Rng as _;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar_model(a: f64, s: f64, rv: f64, rw: f64) -> StateSpaceModel {
        StateSpaceModel::new(
            DMatrix::from_element(1, 1, a),
            DMatrix::from_element(1, 1, s),
            rv,
            DMatrix::from_element(1, 1, rw),
        )
        .unwrap()
    }

    fn random_psd(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let g = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>() - 0.5);
        &g * g.transpose()
    }

    #[test]
    fn exact_scalar_recursion_fits_perfectly() {
        // x[t+1] = 0.9 x[t] exactly
        let series: Vec<f64> = (0..30).map(|t| 5.0 * 0.9f64.powi(t)).collect();
        let x = DMatrix::from_row_slice(1, 30, &series);
        let (a, rw) = fit_temporal_model(&x).unwrap();
        assert!((a[(0, 0)] - 0.9).abs() < 1e-12, "A = {}", a[(0, 0)]);
        assert!(rw[(0, 0)].abs() < 1e-24, "Rw = {}", rw[(0, 0)]);
    }

    #[test]
    fn white_noise_coefficients_fit_to_zero_dynamics() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let x = DMatrix::from_fn(1, 10_000, |_, _| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
        let (a, rw) = fit_temporal_model(&x).unwrap();
        assert!(a[(0, 0)].abs() < 0.05, "A = {}", a[(0, 0)]);
        assert!((rw[(0, 0)] - 1.0).abs() < 0.05, "Rw = {}", rw[(0, 0)]);
    }

    #[test]
    fn simulate_then_fit_recovers_known_dynamics() {
        let truth = DMatrix::from_row_slice(2, 2, &[0.9, 0.1, -0.2, 0.7]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let steps = 5000;
        let mut x = DMatrix::zeros(2, steps);
        x[(0, 0)] = 1.0;
        x[(1, 0)] = -1.0;
        for t in 1..steps {
            let prev = x.column(t - 1).into_owned();
            let next = &truth * prev;
            for i in 0..2 {
                let noise: f64 = rng.sample(rand_distr::StandardNormal);
                x[(i, t)] = next[i] + 0.05 * noise;
            }
        }
        let (a, _) = fit_temporal_model(&x).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (a[(i, j)] - truth[(i, j)]).abs() < 0.05,
                    "A[{i},{j}] = {} vs {}",
                    a[(i, j)],
                    truth[(i, j)]
                );
            }
        }
    }

    #[test]
    fn fit_requires_enough_snapshots() {
        let x = DMatrix::zeros(3, 4);
        assert!(fit_temporal_model(&x).is_err());
    }

    #[test]
    fn fit_state_space_on_scalar_geometric_basis() {
        // a basis built by hand whose single coefficient series is a clean
        // geometric progression
        let series: Vec<f64> = (0..20).map(|t| 0.9f64.powi(t)).collect();
        let norm = series.iter().map(|v| v * v).sum::<f64>().sqrt();
        let right = DMatrix::from_column_slice(20, 1, &series) / norm;
        let modes = DMatrix::from_column_slice(2, 1, &[0.6, 0.8]);
        let b = Basis::new(
            modes.clone(),
            DVector::from_vec(vec![norm]),
            Some(right),
            crate::fielddata::MeanVector::zeros(2),
        )
        .unwrap();
        let model = fit_state_space(&b).unwrap();
        assert!((model.temporal()[(0, 0)] - 0.9).abs() < 1e-10);
        assert!(model.process_noise()[(0, 0)].abs() < 1e-20);
        assert_eq!(model.spatial(), &modes);
    }

    #[test]
    fn fit_state_space_requires_temporal_modes() {
        let b = Basis::new(
            DMatrix::from_column_slice(2, 1, &[0.6, 0.8]),
            DVector::from_vec(vec![1.0]),
            None,
            crate::fielddata::MeanVector::zeros(2),
        )
        .unwrap();
        assert!(fit_state_space(&b).is_err());
    }

    #[test]
    fn scalar_hand_recursion() {
        // A=1, S=1, Rv=1, Rw=0, P=1: posterior 1 - 1*(1+1)^-1*1 = 0.5, and
        // the next prior is also 0.5
        let model = scalar_model(1.0, 1.0, 1.0, 0.0);
        let p = Placement::new(vec![0], 1).unwrap();
        let prior = CovarianceState::identity(1);
        let posterior = measurement_update(&model, &prior, &p).unwrap();
        assert!((posterior.matrix()[(0, 0)] - 0.5).abs() < 1e-15);
        let next = kalman_prior_update(&model, &prior, &p).unwrap();
        assert!((next.matrix()[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_spatial_rows_give_zero_gain() {
        // sensors that observe nothing leave the posterior equal to the prior
        let model = StateSpaceModel::new(
            DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.25]),
            DMatrix::zeros(4, 2),
            0.5,
            DMatrix::identity(2, 2) * 0.1,
        )
        .unwrap();
        let p = Placement::new(vec![1, 3], 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let prior = CovarianceState::new(random_psd(2, &mut rng)).unwrap();
        let posterior = measurement_update(&model, &prior, &p).unwrap();
        assert!((posterior.matrix() - prior.matrix()).abs().max() < 1e-12);
        let next = kalman_prior_update(&model, &prior, &p).unwrap();
        let expect = model.temporal() * prior.matrix() * model.temporal().transpose()
            + model.process_noise();
        assert!((next.matrix() - expect).abs().max() < 1e-12);
    }

    #[test]
    fn measurement_update_is_loewner_non_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let spatial = DMatrix::from_fn(6, 3, |_, _| rng.gen::<f64>() - 0.5);
        let model = StateSpaceModel::new(
            DMatrix::identity(3, 3) * 0.8,
            spatial,
            0.3,
            DMatrix::identity(3, 3) * 0.05,
        )
        .unwrap();
        let p = Placement::new(vec![0, 2, 5], 6).unwrap();
        for _ in 0..100 {
            let prior = CovarianceState::new(random_psd(3, &mut rng)).unwrap();
            let posterior = measurement_update(&model, &prior, &p).unwrap();
            let shrink = prior.matrix() - posterior.matrix();
            let min_eig = shrink
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            assert!(min_eig >= -1e-9, "posterior grew: min eig {min_eig}");
        }
    }

    #[test]
    fn updates_stay_symmetric_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let spatial = DMatrix::from_fn(5, 2, |_, _| rng.gen::<f64>() - 0.5);
        let model = StateSpaceModel::new(
            DMatrix::from_row_slice(2, 2, &[0.9, 0.05, -0.05, 0.8]),
            spatial,
            0.2,
            random_psd(2, &mut rng) * 0.1,
        )
        .unwrap();
        let p = Placement::new(vec![1, 4], 5).unwrap();
        let mut prior = CovarianceState::identity(2);
        for _ in 0..50 {
            prior = kalman_prior_update(&model, &prior, &p).unwrap();
            // construction revalidates symmetry and positive semidefiniteness
            CovarianceState::new(prior.matrix().clone()).unwrap();
        }
    }

    #[test]
    fn gamma_is_max_over_placements() {
        // two one-sensor placements with very different spatial rows: the
        // criterion reports the worse (larger) steady-state eigenvalue
        let spatial = DMatrix::from_column_slice(2, 1, &[1.0, 0.05]);
        let model = StateSpaceModel::new(
            DMatrix::from_element(1, 1, 0.95),
            spatial,
            0.1,
            DMatrix::from_element(1, 1, 0.1),
        )
        .unwrap();
        let strong = Placement::new(vec![0], 2).unwrap();
        let weak = Placement::new(vec![1], 2).unwrap();
        let g_strong = gamma_criterion(&model, std::slice::from_ref(&strong), 200).unwrap();
        let g_weak = gamma_criterion(&model, std::slice::from_ref(&weak), 200).unwrap();
        let g_both = gamma_criterion(&model, &[strong, weak], 200).unwrap();
        assert!(g_strong < g_weak);
        assert!((g_both - g_weak).abs() < 1e-12);
    }

    #[test]
    fn perfect_observation_drives_gamma_to_zero() {
        // observing the full state with near-zero noise and no process noise
        let model = StateSpaceModel::new(
            DMatrix::from_row_slice(2, 2, &[0.9, 0.0, 0.0, 0.8]),
            DMatrix::identity(2, 2),
            1e-12,
            DMatrix::zeros(2, 2),
        )
        .unwrap();
        let p = Placement::new(vec![0, 1], 2).unwrap();
        let gamma = gamma_criterion(&model, &[p], 500).unwrap();
        assert!(gamma < 1e-9, "gamma {gamma}");
    }

    #[test]
    fn superset_placement_never_increases_gamma() {
        let g = GridGeometry::full(2, 3).unwrap();
        let ts = synth_field(&g, 2, 40, 0.2, 14).unwrap();
        let b = truncate(&compute_svd(&ts).unwrap(), 2).unwrap();
        let model = fit_state_space(&b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let base: Vec<usize> = crate::placement::random_placement(
                &crate::placement::CandidateSet::all(6).unwrap(),
                2,
                rng.gen(),
            )
            .unwrap()
            .indices()
            .to_vec();
            let extra = (0..6).find(|i| !base.contains(i)).unwrap();
            let mut bigger = base.clone();
            bigger.push(extra);
            let small = Placement::new(base, 6).unwrap();
            let big = Placement::new(bigger, 6).unwrap();
            let g_small = gamma_criterion(&model, &[small], 100).unwrap();
            let g_big = gamma_criterion(&model, &[big], 100).unwrap();
            assert!(
                g_big <= g_small + 1e-9,
                "adding a sensor increased gamma: {g_small} -> {g_big}"
            );
        }
    }

    #[test]
    fn gamma_is_deterministic() {
        let g = GridGeometry::full(2, 3).unwrap();
        let ts = synth_field(&g, 2, 40, 0.2, 15).unwrap();
        let b = truncate(&compute_svd(&ts).unwrap(), 2).unwrap();
        let model = fit_state_space(&b).unwrap();
        let p = Placement::new(vec![0, 3], 6).unwrap();
        let a = gamma_criterion(&model, std::slice::from_ref(&p), 50).unwrap();
        let b2 = gamma_criterion(&model, &[p], 50).unwrap();
        assert_eq!(a, b2);
    }

    #[test]
    fn injected_final_covariances_take_the_max() {
        // the score of a strategy list is the max of the individual scores
        let d1 = CovarianceState::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])))
            .unwrap();
        let d2 = CovarianceState::new(DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 0.5])))
            .unwrap();
        assert_eq!(d1.max_eigenvalue().max(d2.max_eigenvalue()), 3.0);
    }

    #[test]
    fn singular_innovation_is_reported() {
        let model = scalar_model(1.0, 0.0, 0.0, 0.0);
        let p = Placement::new(vec![0], 1).unwrap();
        let prior = CovarianceState::identity(1);
        assert!(measurement_update(&model, &prior, &p).is_err());
    }

    #[test]
    fn model_files_round_trip() {
        let g = GridGeometry::full(2, 3).unwrap();
        let ts = synth_field(&g, 2, 40, 0.2, 19).unwrap();
        let b = truncate(&compute_svd(&ts).unwrap(), 2).unwrap();
        let model = fit_state_space(&b).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("temporal.txt");
        let s = dir.path().join("spatial.txt");
        let w = dir.path().join("process_noise.txt");
        let side = dir.path().join("model.txt");
        save_model(&model, &a, &s, &w, &side).unwrap();
        let back = load_model(&a, &s, &w, &side).unwrap();
        assert_eq!(back.temporal(), model.temporal());
        assert_eq!(back.spatial(), model.spatial());
        assert_eq!(back.process_noise(), model.process_noise());
        assert_eq!(back.observation_noise(), model.observation_noise());
    }

    #[test]
    fn model_constructor_validates() {
        assert!(StateSpaceModel::new(
            DMatrix::identity(2, 2),
            DMatrix::zeros(4, 2),
            -1.0,
            DMatrix::identity(2, 2),
        )
        .is_err());
        assert!(StateSpaceModel::new(
            DMatrix::identity(2, 2),
            DMatrix::zeros(4, 2),
            0.1,
            DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -0.5, 1.0]),
        )
        .is_err());
        // negative definite process noise
        assert!(StateSpaceModel::new(
            DMatrix::identity(2, 2),
            DMatrix::zeros(4, 2),
            0.1,
            DMatrix::identity(2, 2) * -1.0,
        )
        .is_err());
    }

}
