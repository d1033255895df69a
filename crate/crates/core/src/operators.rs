//! Univariate Bernstein polynomials, the composite operator on `[0, 1]` and
//! its tensor product on the unit square.
//!
//! Every evaluation maps the argument to the local coordinate of its cell and
//! runs the de Casteljau recurrence on the cell's node values, which keeps the
//! computation free of binomial coefficients and powers.

use crate::error::{Error, Result};
use crate::field::{Field1D, Field2D};
use crate::grid::{cell_of, AxisGrid, GridSpec, MAX_PARAMETER};

/// Evaluates the Bernstein polynomial with control values `coeffs` at `t ∈ [0, 1]`.
pub fn de_casteljau(coeffs: &[f64], t: f64) -> f64 {
    let mut work = coeffs.to_vec();
    de_casteljau_in_place(&mut work, t)
}

fn de_casteljau_in_place(work: &mut [f64], t: f64) -> f64 {
    let s = 1.0 - t;
    for level in (1..work.len()).rev() {
        for j in 0..level {
            work[j] = s * work[j] + t * work[j + 1];
        }
    }
    work[0]
}

/// `B_n^{[a,b]}(f; x)`.
pub fn bernstein_1d(f: &Field1D, n: usize, a: f64, b: f64, x: f64) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() || a >= b {
        return Err(Error::domain(format!("invalid interval [{a}, {b}]")));
    }
    check_degree(n)?;
    if !(a..=b).contains(&x) {
        return Err(Error::domain(format!("x = {x} lies outside [{a}, {b}]")));
    }
    let width = b - a;
    let mut values: Vec<f64> = (0..=n)
        .map(|i| {
            let node = match i {
                0 => a,
                i if i == n => b,
                i => a + width * (i as f64 / n as f64),
            };
            f.eval(node)
        })
        .collect();
    let t = ((x - a) / width).clamp(0.0, 1.0);
    Ok(de_casteljau_in_place(&mut values, t))
}

/// Local coordinate of `x` in cell `k` of `axis`.
fn local_coordinate(axis: &AxisGrid, k: usize, x: f64) -> f64 {
    (x * axis.cells as f64 - (k - 1) as f64).clamp(0.0, 1.0)
}

/// The composite operator `B̄_{n,m}(f; x)`: `B_n` applied on the cell
/// `[(k-1)/m, k/m]` that contains `x`.
pub fn composite_1d(f: &Field1D, n: usize, m: usize, x: f64) -> Result<f64> {
    let axis = AxisGrid::new(n, m)?;
    composite_on_cell(f, &axis, cell_of(x, m)?, x)
}

/// Evaluates the cell-`k` polynomial of the composite operator at `x`. Used
/// directly to check continuity at knots.
pub fn composite_on_cell(f: &Field1D, axis: &AxisGrid, k: usize, x: f64) -> Result<f64> {
    if k == 0 || k > axis.cells {
        return Err(Error::domain(format!(
            "cell {k} outside 1..={}",
            axis.cells
        )));
    }
    let mut values: Vec<f64> = axis.cell_nodes(k).into_iter().map(|u| f.eval(u)).collect();
    Ok(de_casteljau_in_place(
        &mut values,
        local_coordinate(axis, k, x),
    ))
}

/// The tensor-product composite operator `B̄(F; x, y)` on the unit square.
pub fn tensor_composite(field: &Field2D, grid: &GridSpec, x: f64, y: f64) -> Result<f64> {
    let (ax, ay) = (grid.x_axis(), grid.y_axis());
    let k = cell_of(x, ax.cells)?;
    let l = cell_of(y, ay.cells)?;
    Ok(tensor_on_cell(field, &ax, &ay, k, l, x, y))
}

fn tensor_on_cell(
    field: &Field2D,
    ax: &AxisGrid,
    ay: &AxisGrid,
    k: usize,
    l: usize,
    x: f64,
    y: f64,
) -> f64 {
    let xs = ax.cell_nodes(k);
    let ys = ay.cell_nodes(l);
    let ty = local_coordinate(ay, l, y);
    let mut column = vec![0.0; ys.len()];
    let mut reduced: Vec<f64> = xs
        .iter()
        .map(|&u| {
            for (c, &v) in column.iter_mut().zip(&ys) {
                *c = field.eval(u, v);
            }
            de_casteljau_in_place(&mut column, ty)
        })
        .collect();
    de_casteljau_in_place(&mut reduced, local_coordinate(ax, k, x))
}

fn check_degree(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PARAMETER {
        return Err(Error::domain(format!(
            "degree {n} outside 1..={MAX_PARAMETER}"
        )));
    }
    Ok(())
}
