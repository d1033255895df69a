//! Moduli of smoothness estimated by grid search, their least concave
//! majorants, and discrete oscillations over cubature node sets.
//!
//! The estimators are lower bounds of the exact suprema: they take the
//! maximum over a finite lattice of base points and steps. Lattices nest
//! when the resolution doubles and when the step bound grows, so every
//! estimate is non-decreasing in both.

mod estimate;
mod majorant;

pub use estimate::{
    metric_deltas, omega_metric, omega_mixed, omega_partial, omega_total, osc_nodes,
    MetricModulusProfile, PartialModulusProfile, DEFAULT_METRIC_RESOLUTION, DEFAULT_RESOLUTION,
    STEP_REFINEMENT,
};
pub use majorant::{least_concave_majorant, ConcaveMajorant};

use serde::Serialize;

use crate::error::{Error, Result};

/// Diameter of the unit square under the Euclidean metric.
pub const UNIT_SQUARE_DIAMETER: f64 = std::f64::consts::SQRT_2;
/// Diameter of `[0, 1]`.
pub const UNIT_INTERVAL_DIAMETER: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModulusKind {
    PartialX(usize),
    PartialY(usize),
    Total(usize),
    Mixed(usize, usize),
    Metric,
}

/// Sampled values of a modulus of smoothness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusTable {
    kind: ModulusKind,
    deltas: Vec<f64>,
    values: Vec<f64>,
    diameter: f64,
    resolution: usize,
}

impl ModulusTable {
    pub fn new(
        kind: ModulusKind,
        deltas: Vec<f64>,
        values: Vec<f64>,
        diameter: f64,
        resolution: usize,
    ) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::domain("modulus table is empty"));
        }
        if deltas.len() != values.len() {
            return Err(Error::domain(format!(
                "{} deltas but {} values",
                deltas.len(),
                values.len()
            )));
        }
        if !(diameter > 0.0 && diameter.is_finite()) {
            return Err(Error::domain(format!("invalid diameter {diameter}")));
        }
        if deltas
            .iter()
            .chain(&values)
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return Err(Error::domain(
                "deltas and values must be finite and non-negative",
            ));
        }
        if deltas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("deltas must be strictly ascending"));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::domain("modulus values must be non-decreasing"));
        }
        if deltas[0] == 0.0 && values[0] != 0.0 {
            return Err(Error::domain("modulus at delta = 0 must vanish"));
        }
        Ok(Self {
            kind,
            deltas,
            values,
            diameter,
            resolution,
        })
    }

    /// Tabulates `omega_partial` at `deltas` from a single grid sweep.
    pub fn partial(
        field: &crate::Field2D,
        order: usize,
        axis: Axis,
        deltas: &[f64],
        resolution: usize,
    ) -> Result<Self> {
        let max = deltas.iter().copied().fold(0.0, f64::max);
        let profile = PartialModulusProfile::compute(field, order, axis, resolution, max)?;
        let values = deltas.iter().map(|&d| profile.value(d)).collect();
        let kind = match axis {
            Axis::X => ModulusKind::PartialX(order),
            Axis::Y => ModulusKind::PartialY(order),
        };
        Self::new(
            kind,
            deltas.to_vec(),
            values,
            UNIT_INTERVAL_DIAMETER,
            resolution,
        )
    }

    /// Tabulates `omega_metric` at `deltas` from a single grid sweep.
    pub fn metric(field: &crate::Field2D, deltas: &[f64], resolution: usize) -> Result<Self> {
        let max = deltas.iter().copied().fold(0.0, f64::max);
        let profile = MetricModulusProfile::compute(field, resolution, max)?;
        let values = deltas.iter().map(|&d| profile.value(d)).collect();
        Self::new(
            ModulusKind::Metric,
            deltas.to_vec(),
            values,
            UNIT_SQUARE_DIAMETER,
            resolution,
        )
    }

    pub fn kind(&self) -> ModulusKind {
        self.kind
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }
}
