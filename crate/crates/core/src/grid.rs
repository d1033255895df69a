//! Discretization parameters and cell bookkeeping for the composite operators.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest accepted polynomial degree or cell count.
pub const MAX_PARAMETER: usize = 10_000;

/// Degree and cell count along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct AxisGrid {
    pub degree: usize,
    pub cells: usize,
}

impl AxisGrid {
    pub fn new(degree: usize, cells: usize) -> Result<Self> {
        check_parameter("degree", degree)?;
        check_parameter("cell count", cells)?;
        Ok(Self { degree, cells })
    }

    /// Left and right knot of cell `k` (1-based).
    pub fn cell_bounds(&self, k: usize) -> (f64, f64) {
        let m = self.cells as f64;
        ((k - 1) as f64 / m, k as f64 / m)
    }

    /// Node `i` of cell `k`, i.e. `(k-1)/m + i/(m n)`.
    ///
    /// Written over the common denominator so that the last node of cell `k`
    /// and the first node of cell `k+1` are the same float.
    pub fn node(&self, k: usize, i: usize) -> f64 {
        let n = self.degree;
        ((k - 1) * n + i) as f64 / (self.cells * n) as f64
    }

    /// Node positions of cell `k`.
    pub fn cell_nodes(&self, k: usize) -> Vec<f64> {
        (0..=self.degree).map(|i| self.node(k, i)).collect()
    }

    /// All node positions, cell by cell; shared knots appear once per cell.
    pub fn nodes(&self) -> Vec<f64> {
        (1..=self.cells).flat_map(|k| self.cell_nodes(k)).collect()
    }

    /// Cell containing `x` together with the cell-local quadratic
    /// `(x - a)(b - x)`.
    pub fn locate(&self, x: f64) -> Result<(usize, f64)> {
        let k = cell_of(x, self.cells)?;
        let (a, b) = self.cell_bounds(k);
        Ok((k, ((x - a) * (b - x)).max(0.0)))
    }
}

/// The four discretization parameters of the bivariate composite operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
    pub m1: usize,
    pub m2: usize,
}

impl GridSpec {
    pub fn new(n1: usize, n2: usize, m1: usize, m2: usize) -> Result<Self> {
        check_parameter("n1", n1)?;
        check_parameter("n2", n2)?;
        check_parameter("m1", m1)?;
        check_parameter("m2", m2)?;
        Ok(Self { n1, n2, m1, m2 })
    }

    /// Classical tensor Bernstein operator of degrees `(n1, n2)` (one cell per axis).
    pub fn classical(n1: usize, n2: usize) -> Result<Self> {
        Self::new(n1, n2, 1, 1)
    }

    pub fn x_axis(&self) -> AxisGrid {
        AxisGrid {
            degree: self.n1,
            cells: self.m1,
        }
    }

    pub fn y_axis(&self) -> AxisGrid {
        AxisGrid {
            degree: self.n2,
            cells: self.m2,
        }
    }

    /// Number of (possibly coincident) cubature nodes.
    pub fn node_count(&self) -> usize {
        self.m1 * self.m2 * (self.n1 + 1) * (self.n2 + 1)
    }
}

fn check_parameter(name: &str, value: usize) -> Result<()> {
    if value == 0 {
        return Err(Error::domain(format!("{name} must be at least 1")));
    }
    if value > MAX_PARAMETER {
        return Err(Error::domain(format!(
            "{name} = {value} exceeds the limit {MAX_PARAMETER}"
        )));
    }
    Ok(())
}

/// Index `k` in `1..=m` of the cell `[(k-1)/m, k/m]` containing `x`.
/// Interior knots belong to the cell on their left.
pub fn cell_of(x: f64, m: usize) -> Result<usize> {
    if m == 0 {
        return Err(Error::domain("cell count must be at least 1"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("x = {x} lies outside [0, 1]")));
    }
    let mf = m as f64;
    let mut k = ((x * mf).ceil() as usize).clamp(1, m);
    // Compare against the knots as floats so that ties are resolved exactly.
    while k > 1 && x <= (k - 1) as f64 / mf {
        k -= 1;
    }
    while k < m && x > k as f64 / mf {
        k += 1;
    }
    Ok(k)
}
