//! Full-field reconstruction from sparse point observations.
//!
//! Observations are raw sensor readings. The mean stored with the basis is
//! subtracted from the readings before the square coefficient solve and
//! added back to the reconstructed field, so fields that are an exact basis
//! combination plus the mean are recovered exactly.

use nalgebra::{DMatrix, DVector};

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::placement::{sample, Placement};

/// Condition-number gate above which a sensor system is rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

/// The square system formed by the sensor rows of the basis modes,
/// factorized once for repeated solves. Construction never fails on a
/// singular system; the condition number reports it and `solve` rejects it.
pub struct InterpolationSystem {
    matrix: DMatrix<f64>,
    // SVD factors of `matrix` for stable solves
    u: DMatrix<f64>,
    v_t: DMatrix<f64>,
    singular_values: DVector<f64>,
    condition_number: f64,
}

/// Extract the sensor rows of the basis modes and factorize them.
pub fn interpolation_system(p: &Placement, b: &Basis) -> Result<InterpolationSystem> {
    if p.len() != b.rank() {
        return Err(Error::Dimension(format!(
            "placement has {} sensors but basis rank is {}",
            p.len(),
            b.rank()
        )));
    }
    if let Some(&bad) = p.indices().iter().find(|&&i| i >= b.locations()) {
        return Err(Error::InvalidArgument(format!(
            "location {bad} out of range for {} valid cells",
            b.locations()
        )));
    }
    let matrix = b.modes().select_rows(p.indices());
    let svd = matrix
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD of the sensor system did not converge".into()))?;
    let sv = svd.singular_values;
    let hi = sv.iter().cloned().fold(0.0f64, f64::max);
    let lo = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition_number = if lo <= 0.0 || hi <= 0.0 {
        f64::INFINITY
    } else {
        (hi / lo).max(1.0)
    };
    Ok(InterpolationSystem {
        matrix,
        u: svd.u.expect("u requested"),
        v_t: svd.v_t.expect("v_t requested"),
        singular_values: sv,
        condition_number,
    })
}

impl InterpolationSystem {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `sigma_max / sigma_min` of the sensor rows; infinite when singular.
    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    pub fn is_well_conditioned(&self) -> bool {
        self.condition_number <= CONDITION_LIMIT
    }

    fn gate(&self) -> Result<()> {
        if self.is_well_conditioned() {
            Ok(())
        } else {
            Err(Error::IllConditioned {
                cond: self.condition_number,
                limit: CONDITION_LIMIT,
            })
        }
    }

    /// Solve for one right-hand side.
    pub fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.solve_matrix(&DMatrix::from_column_slice(rhs.len(), 1, rhs.as_slice()))?
            .column(0)
            .into_owned())
    }

    /// Solve for every column of `rhs` at once.
    pub fn solve_matrix(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.gate()?;
        if rhs.nrows() != self.matrix.nrows() {
            return Err(Error::Dimension(format!(
                "right-hand side has {} rows, system has {}",
                rhs.nrows(),
                self.matrix.nrows()
            )));
        }
        let mut scaled = self.u.transpose() * rhs;
        for i in 0..scaled.nrows() {
            let s = self.singular_values[i];
            for j in 0..scaled.ncols() {
                scaled[(i, j)] /= s;
            }
        }
        Ok(self.v_t.transpose() * scaled)
    }
}

/// Sensor readings for one or more snapshots, tied to the placement that
/// produced them. Rows follow the placement order; columns are snapshots.
#[derive(Debug, Clone)]
pub struct ObservationSet {
    readings: DMatrix<f64>,
    placement: Placement,
}

impl ObservationSet {
    pub fn new(readings: DMatrix<f64>, placement: Placement) -> Result<Self> {
        if readings.nrows() != placement.len() {
            return Err(Error::Dimension(format!(
                "{} reading rows for {} sensors",
                readings.nrows(),
                placement.len()
            )));
        }
        if readings.ncols() == 0 {
            return Err(Error::InvalidArgument(
                "observation set needs at least one snapshot".into(),
            ));
        }
        if readings.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "observations contain a non-finite value".into(),
            ));
        }
        Ok(Self {
            readings,
            placement,
        })
    }

    /// Read the given data columns at the placement's sensors.
    pub fn from_field_data(data: &DMatrix<f64>, placement: Placement) -> Result<Self> {
        let readings = crate::placement::sample_columns(data, &placement)?;
        Self::new(readings, placement)
    }

    pub fn readings(&self) -> &DMatrix<f64> {
        &self.readings
    }

    pub fn placement(&self) -> &Placement {
        &self.placement
    }

    pub fn snapshots(&self) -> usize {
        self.readings.ncols()
    }
}

/// Reconstructed snapshots with their basis coefficients and diagnostics.
#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    fields: DMatrix<f64>,       // m x K
    coefficients: DMatrix<f64>, // r x K
    condition_number: f64,
    per_snapshot_mse: Option<DVector<f64>>,
}

impl ReconstructionResult {
    pub fn fields(&self) -> &DMatrix<f64> {
        &self.fields
    }

    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coefficients
    }

    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    /// Per-column MSE against ground truth, when truth was supplied.
    pub fn per_snapshot_mse(&self) -> Option<&DVector<f64>> {
        self.per_snapshot_mse.as_ref()
    }

    /// Mean of the per-snapshot MSEs (the aggregate MSE over all entries).
    pub fn aggregate_mse(&self) -> Option<f64> {
        self.per_snapshot_mse.as_ref().map(|v| v.mean())
    }
}

/// Rebuild one snapshot from its readings. Returns the full field and the
/// fitted basis coefficients.
pub fn reconstruct_snapshot(
    y: &DVector<f64>,
    p: &Placement,
    b: &Basis,
) -> Result<(DVector<f64>, DVector<f64>)> {
    if y.len() != p.len() {
        return Err(Error::Dimension(format!(
            "{} readings for {} sensors",
            y.len(),
            p.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "observations contain a non-finite value".into(),
        ));
    }
    let system = interpolation_system(p, b)?;
    let mean_at_sensors = sample(b.mean().values(), p)?;
    let coeffs = system.solve(&(y - mean_at_sensors))?;
    let field = b.modes() * &coeffs + b.mean().values();
    Ok((field, coeffs))
}

/// Rebuild every observed snapshot. The sensor system is factorized once
/// and reused across columns; supplying ground truth adds per-snapshot MSE.
pub fn reconstruct_series(
    obs: &ObservationSet,
    b: &Basis,
    truth: Option<&DMatrix<f64>>,
) -> Result<ReconstructionResult> {
    let p = obs.placement();
    let system = interpolation_system(p, b)?;
    let mean_at_sensors = sample(b.mean().values(), p)?;

    let mut centered = obs.readings().clone();
    for j in 0..centered.ncols() {
        for i in 0..centered.nrows() {
            centered[(i, j)] -= mean_at_sensors[i];
        }
    }
    let coefficients = system.solve_matrix(&centered)?;
    let mut fields = b.modes() * &coefficients;
    for j in 0..fields.ncols() {
        for i in 0..fields.nrows() {
            fields[(i, j)] += b.mean().values()[i];
        }
    }

    let per_snapshot_mse = match truth {
        Some(t) => {
            if t.shape() != fields.shape() {
                return Err(Error::Dimension(format!(
                    "ground truth is {}x{} but reconstruction is {}x{}",
                    t.nrows(),
                    t.ncols(),
                    fields.nrows(),
                    fields.ncols()
                )));
            }
            let mut v = DVector::zeros(t.ncols());
            for j in 0..t.ncols() {
                let diff = fields.column(j) - t.column(j);
                v[j] = diff.norm_squared() / t.nrows() as f64;
            }
            Some(v)
        }
        None => None,
    };

    Ok(ReconstructionResult {
        fields,
        coefficients,
        condition_number: system.condition_number(),
        per_snapshot_mse,
    })
}

/// Mean squared difference over all entries of two equally shaped matrices.
pub fn mse(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "shapes {}x{} and {}x{} differ",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok((a - b).norm_squared() / (a.nrows() * a.ncols()) as f64)
}
