//! The composite Bernstein cubature rule `Ī(f) = ∫∫ B̄f` and its remainder
//! bounds. With `m1 = m2 = 1` this is the classical tensor Bernstein rule.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::ModulusSource;
use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::format::g17;
use crate::grid::{AxisGrid, GridSpec};
use crate::moduli::Axis;
use crate::numeric::{compensated_sum, integrate_gl};

pub const BOUND_THREE_TERM: &str = "three_term";
pub const BOUND_TWO_TERM: &str = "two_term";
pub const BOUND_MODULI_INTEGRATED: &str = "moduli_integrated";

/// Gauss-Legendre points per cell used by [`bound_integrated_moduli`] by default.
pub const DEFAULT_QUADRATURE_POINTS: usize = 64;

/// Nodes and uniform weights of `Ī`. Nodes on shared cell boundaries are
/// listed once per cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubatureRule {
    pub grid: GridSpec,
    pub nodes: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

impl CubatureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w F(node)`, summed in node order.
    pub fn apply(&self, field: &Field2D) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(&(x, y), &w)| w * field.eval(x, y))
            .collect();
        compensated_sum(terms)
    }
}

/// Uniform weight `1 / (m1 m2 (n1+1) (n2+1))`.
pub fn uniform_weight(grid: &GridSpec) -> f64 {
    1.0 / grid.node_count() as f64
}

/// Enumerates nodes cell by cell (x-cell, y-cell, then local indices).
pub fn build_rule(grid: &GridSpec) -> CubatureRule {
    let (ax, ay) = (grid.x_axis(), grid.y_axis());
    let mut nodes = Vec::with_capacity(grid.node_count());
    for k in 1..=ax.cells {
        for l in 1..=ay.cells {
            for i in 0..=ax.degree {
                let x = ax.node(k, i);
                for j in 0..=ay.degree {
                    nodes.push((x, ay.node(l, j)));
                }
            }
        }
    }
    let w = uniform_weight(grid);
    CubatureRule {
        grid: *grid,
        weights: vec![w; nodes.len()],
        nodes,
    }
}

/// Writes `x y w` per node with 17 significant digits.
pub fn write_rule<W: Write>(rule: &CubatureRule, out: &mut W) -> io::Result<()> {
    for (&(x, y), &w) in rule.nodes.iter().zip(&rule.weights) {
        writeln!(out, "{} {} {}", g17(x), g17(y), g17(w))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubatureResult {
    pub value: f64,
    pub reference: Option<f64>,
    /// `reference - value`.
    pub remainder: Option<f64>,
    pub bounds: BTreeMap<String, f64>,
}

impl CubatureResult {
    pub fn with_reference(mut self, reference: f64) -> Self {
        self.reference = Some(reference);
        self.remainder = Some(reference - self.value);
        self
    }

    /// `|remainder| / bound` for each positive bound.
    pub fn tightness(&self) -> BTreeMap<String, f64> {
        let Some(r) = self.remainder else {
            return BTreeMap::new();
        };
        self.bounds
            .iter()
            .filter(|(_, &b)| b > 0.0)
            .map(|(k, &b)| (k.clone(), r.abs() / b))
            .collect()
    }
}

/// Applies `Ī` to `field`, fills the remainder from its exact integral and
/// every norm-based bound whose norms are available.
pub fn integrate(field: &Field2D, grid: &GridSpec) -> Result<CubatureResult> {
    let value = build_rule(grid).apply(field);
    let mut bounds = BTreeMap::new();
    for (name, bound) in [
        (BOUND_THREE_TERM, bound_integrated_three_term(field, grid)),
        (BOUND_TWO_TERM, bound_integrated_two_term(field, grid)),
    ] {
        match bound {
            Ok(b) => {
                bounds.insert(name.to_string(), b);
            }
            Err(Error::MissingNorm { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let result = CubatureResult {
        value,
        reference: None,
        remainder: None,
        bounds,
    };
    Ok(match field.exact_integral() {
        Some(exact) => result.with_reference(exact),
        None => result,
    })
}

/// [`integrate`] plus the integrated modulus bound from `source`.
pub fn integrate_with_moduli(
    field: &Field2D,
    grid: &GridSpec,
    source: &dyn ModulusSource,
    quadrature_points: usize,
) -> Result<CubatureResult> {
    let mut result = integrate(field, grid)?;
    let b = bound_integrated_moduli(source, grid, quadrature_points)?;
    result.bounds.insert(BOUND_MODULI_INTEGRATED.to_string(), b);
    Ok(result)
}

/// `‖F^(2,0)‖/(12 n1 m1²) + ‖F^(0,2)‖/(12 n2 m2²) + ‖F^(2,2)‖/(144 n1 n2 m1² m2²)`.
pub fn bound_integrated_three_term(field: &Field2D, grid: &GridSpec) -> Result<f64> {
    let sx = (grid.n1 * grid.m1 * grid.m1) as f64;
    let sy = (grid.n2 * grid.m2 * grid.m2) as f64;
    Ok(field.norm_20()? / (12.0 * sx)
        + field.norm_02()? / (12.0 * sy)
        + field.norm_22()? / (144.0 * sx * sy))
}

/// `(‖F^(2,0)‖/(m1² n1) + ‖F^(0,2)‖/(m2² n2)) / 4`.
pub fn bound_integrated_two_term(field: &Field2D, grid: &GridSpec) -> Result<f64> {
    let sx = (grid.n1 * grid.m1 * grid.m1) as f64;
    let sy = (grid.n2 * grid.m2 * grid.m2) as f64;
    Ok(0.25 * (field.norm_20()? / sx + field.norm_02()? / sy))
}

fn axis_integral(
    source: &dyn ModulusSource,
    axis_grid: AxisGrid,
    axis: Axis,
    points: usize,
) -> Result<f64> {
    let n = axis_grid.degree as f64;
    let mut cells = Vec::with_capacity(axis_grid.cells);
    for k in 1..=axis_grid.cells {
        let (a, b) = axis_grid.cell_bounds(k);
        let mut failure = None;
        let v = integrate_gl(points, a, b, |z| {
            let lambda = (((z - a) * (b - z)).max(0.0) / n).sqrt();
            source.partial_modulus(2, axis, lambda).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                f64::NAN
            })
        });
        if let Some(e) = failure {
            return Err(e);
        }
        cells.push(v);
    }
    Ok(compensated_sum(cells))
}

/// `3/2 [Σ_k ∫_cell ω_2(F; sqrt((x-a)(b-x)/n1), 0) dx + Σ_l ∫_cell ω_2(F; 0, sqrt((y-c)(d-y)/n2)) dy]`,
/// each cell integral by a `quadrature_points`-point Gauss-Legendre rule.
pub fn bound_integrated_moduli(
    source: &dyn ModulusSource,
    grid: &GridSpec,
    quadrature_points: usize,
) -> Result<f64> {
    if quadrature_points < 8 {
        return Err(Error::domain(format!(
            "quadrature_points = {quadrature_points} must be at least 8"
        )));
    }
    let ix = axis_integral(source, grid.x_axis(), Axis::X, quadrature_points)?;
    let iy = axis_integral(source, grid.y_axis(), Axis::Y, quadrature_points)?;
    Ok(1.5 * (ix + iy))
}
