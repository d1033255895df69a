use serde::Serialize;

use super::{metric_deltas, ModulusTable};
use crate::error::{Error, Result};
use crate::field::Field2D;

/// Least concave majorant of a sampled modulus: a concave piecewise-linear
/// function through `breakpoints`, constant beyond the last one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcaveMajorant {
    breakpoints: Vec<(f64, f64)>,
    domain_max: f64,
}

impl ConcaveMajorant {
    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn domain_max(&self) -> f64 {
        self.domain_max
    }

    /// `ω̃(t)` for `t >= 0`; arguments past the diameter are clamped to it.
    pub fn value(&self, t: f64) -> f64 {
        let t = t.max(0.0).min(self.domain_max);
        let pts = &self.breakpoints;
        let last = pts[pts.len() - 1];
        if t >= last.0 {
            return last.1;
        }
        let j = pts.partition_point(|p| p.0 <= t);
        if j == 0 {
            return pts[0].1;
        }
        let (x0, y0) = pts[j - 1];
        let (x1, y1) = pts[j];
        y0 + (y1 - y0) * ((t - x0) / (x1 - x0))
    }

    /// `ω̃_{d2}(F; ·)` over the unit square from a metric modulus table on
    /// the default deltas.
    pub fn of_metric_modulus(field: &Field2D, resolution: usize) -> Result<Self> {
        let table = ModulusTable::metric(field, &metric_deltas(resolution), resolution)?;
        least_concave_majorant(&table)
    }
}

/// Upper concave hull of `{(0, 0)} ∪ {(δ_i, ω_i)}`.
pub fn least_concave_majorant(table: &ModulusTable) -> Result<ConcaveMajorant> {
    let deltas = table.deltas();
    let values = table.values();
    if deltas.is_empty() {
        return Err(Error::domain("modulus table is empty"));
    }
    if values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain("modulus values must be non-decreasing"));
    }

    let mut points: Vec<(f64, f64)> = Vec::with_capacity(deltas.len() + 1);
    if deltas[0] > 0.0 {
        points.push((0.0, 0.0));
    }
    points.extend(deltas.iter().copied().zip(values.iter().copied()));

    // Monotone chain: pop the last vertex while it does not make a strict
    // right turn, which also drops collinear vertices.
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    // The trailing flat part is kept only up to its first point.
    while hull.len() >= 2 && hull[hull.len() - 1].1 <= hull[hull.len() - 2].1 {
        hull.pop();
    }

    Ok(ConcaveMajorant {
        breakpoints: hull,
        domain_max: table.diameter().max(*deltas.last().unwrap_or(&0.0)),
    })
}
