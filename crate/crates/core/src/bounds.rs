//! Pointwise error bounds for tensor products of discretely defined
//! operators, instantiated for the classical and the composite Bernstein
//! operators.
//!
//! The generic bound combines, for each axis, terms of the form
//! `Γ(z) · ω_ρ(F; Λ(z))` and weighs the y-axis terms by `‖L‖`, the norm of
//! the x-axis operator. For Bernstein operators the only non-zero term is
//! `ρ = 2` with `Γ ≡ 3/2` and `Λ(z)` the square root of the (cell-local)
//! second moment; `‖B̄_{n,m}‖ = 1`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::grid::{AxisGrid, GridSpec};
use crate::moduli::{Axis, PartialModulusProfile, DEFAULT_RESOLUTION};
use crate::operators::tensor_composite;

/// Provider of partial moduli `ω_r(F; δ, 0)` / `ω_r(F; 0, δ)` of a fixed field.
pub trait ModulusSource: Sync {
    fn partial_modulus(&self, order: usize, axis: Axis, delta: f64) -> Result<f64>;
}

/// Grid-search moduli, swept once per order and axis.
#[derive(Debug, Clone)]
pub struct EstimatedModulus {
    profiles: Vec<PartialModulusProfile>,
}

impl EstimatedModulus {
    pub fn new(field: &Field2D, orders: &[usize], resolution: usize) -> Result<Self> {
        let mut profiles = Vec::with_capacity(2 * orders.len());
        for &order in orders {
            for axis in [Axis::X, Axis::Y] {
                profiles.push(PartialModulusProfile::compute(
                    field, order, axis, resolution, 1.0,
                )?);
            }
        }
        Ok(Self { profiles })
    }

    /// Second-order moduli at the default resolution.
    pub fn second_order(field: &Field2D) -> Result<Self> {
        Self::new(field, &[2], DEFAULT_RESOLUTION)
    }
}

impl ModulusSource for EstimatedModulus {
    fn partial_modulus(&self, order: usize, axis: Axis, delta: f64) -> Result<f64> {
        self.profiles
            .iter()
            .find(|p| p.order() == order && p.axis() == axis)
            .map(|p| p.value(delta))
            .ok_or_else(|| Error::domain(format!("no estimate of order {order} on {axis:?}")))
    }
}

pub type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One term `Γ(z) · ω_order(·; Λ(z))` of a univariate pointwise estimate.
#[derive(Clone)]
pub struct BoundTerm {
    pub order: usize,
    pub gamma: Coefficient,
    pub lambda: Coefficient,
}

impl BoundTerm {
    pub fn new(
        order: usize,
        gamma: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lambda: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            order,
            gamma: Arc::new(gamma),
            lambda: Arc::new(lambda),
        }
    }
}

impl std::fmt::Debug for BoundTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundTerm")
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

/// Pointwise estimates of the two univariate operators plus `‖L‖`.
#[derive(Debug, Clone)]
pub struct BoundSpec {
    pub x_terms: Vec<BoundTerm>,
    pub y_terms: Vec<BoundTerm>,
    pub operator_norm: f64,
}

impl BoundSpec {
    pub fn new(
        x_terms: Vec<BoundTerm>,
        y_terms: Vec<BoundTerm>,
        operator_norm: f64,
    ) -> Result<Self> {
        if !operator_norm.is_finite() || operator_norm < 1.0 {
            return Err(Error::domain(format!(
                "operator norm {operator_norm} must be >= 1"
            )));
        }
        Ok(Self {
            x_terms,
            y_terms,
            operator_norm,
        })
    }

    /// The estimate `|f - B_n f|(z) <= 3/2 ω_2(f; sqrt(z(1-z)/n))` on both axes.
    pub fn classical_bernstein(n1: usize, n2: usize) -> Result<Self> {
        Self::composite_bernstein(&GridSpec::classical(n1, n2)?)
    }

    /// The cell-local version of the classical estimate for `B̄_{n,m}` on both axes.
    pub fn composite_bernstein(grid: &GridSpec) -> Result<Self> {
        let term = |axis: AxisGrid| {
            let n = axis.degree as f64;
            BoundTerm::new(
                2,
                |_| 1.5,
                move |z| match axis.locate(z) {
                    Ok((_, q)) => (q / n).sqrt(),
                    Err(_) => f64::NAN,
                },
            )
        };
        Self::new(vec![term(grid.x_axis())], vec![term(grid.y_axis())], 1.0)
    }
}

fn check_point(x: f64, y: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
        return Err(Error::domain(format!(
            "({x}, {y}) lies outside the unit square"
        )));
    }
    Ok(())
}

fn sum_terms(terms: &[BoundTerm], axis: Axis, z: f64, source: &dyn ModulusSource) -> Result<f64> {
    let mut acc = 0.0;
    for term in terms {
        let gamma = (term.gamma)(z);
        let lambda = (term.lambda)(z);
        if !(gamma >= 0.0 && gamma.is_finite() && lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!(
                "coefficients at {z} must be finite and >= 0 (Γ = {gamma}, Λ = {lambda})"
            )));
        }
        if gamma == 0.0 {
            continue;
        }
        acc += gamma * source.partial_modulus(term.order, axis, lambda)?;
    }
    Ok(acc)
}

/// `Σ Γ_{ρ,L}(x) ω_ρ(F; Λ_{ρ,L}(x), 0) + ‖L‖ Σ Γ_{σ,M}(y) ω_σ(F; 0, Λ_{σ,M}(y))`.
pub fn combine_tensor_bound(
    spec: &BoundSpec,
    source: &dyn ModulusSource,
    x: f64,
    y: f64,
) -> Result<f64> {
    check_point(x, y)?;
    let ex = sum_terms(&spec.x_terms, Axis::X, x, source)?;
    let ey = sum_terms(&spec.y_terms, Axis::Y, y, source)?;
    Ok(ex + spec.operator_norm * ey)
}

/// `3/2 [ω_2(F; sqrt(x(1-x)/n1), 0) + ω_2(F; 0, sqrt(y(1-y)/n2))]`.
pub fn bound_classic_two_term(
    source: &dyn ModulusSource,
    n1: usize,
    n2: usize,
    x: f64,
    y: f64,
) -> Result<f64> {
    combine_tensor_bound(&BoundSpec::classical_bernstein(n1, n2)?, source, x, y)
}

/// The composite two-term bound on the cell containing `(x, y)`.
pub fn bound_composite_pointwise(
    source: &dyn ModulusSource,
    grid: &GridSpec,
    x: f64,
    y: f64,
) -> Result<f64> {
    combine_tensor_bound(&BoundSpec::composite_bernstein(grid)?, source, x, y)
}

fn three_term(field: &Field2D, qx: f64, qy: f64, n1: usize, n2: usize) -> Result<f64> {
    let (n1, n2) = (n1 as f64, n2 as f64);
    Ok(0.5 * (qx / n1) * field.norm_20()?
        + 0.5 * (qy / n2) * field.norm_02()?
        + 0.25 * (qx * qy / (n1 * n2)) * field.norm_22()?)
}

/// `1/2 x(1-x)/n1 ‖F^(2,0)‖ + 1/2 y(1-y)/n2 ‖F^(0,2)‖ + 1/4 x(1-x)y(1-y)/(n1 n2) ‖F^(2,2)‖`.
pub fn bound_classic_three_term(
    field: &Field2D,
    n1: usize,
    n2: usize,
    x: f64,
    y: f64,
) -> Result<f64> {
    bound_composite_pointwise_three_term(field, &GridSpec::classical(n1, n2)?, x, y)
}

/// The cell-local three-term bound; `(x - a)(b - x)` replaces `x(1-x)`.
pub fn bound_composite_pointwise_three_term(
    field: &Field2D,
    grid: &GridSpec,
    x: f64,
    y: f64,
) -> Result<f64> {
    check_point(x, y)?;
    let (_, qx) = grid.x_axis().locate(x)?;
    let (_, qy) = grid.y_axis().locate(y)?;
    three_term(field, qx, qy, grid.n1, grid.n2)
}

/// Uniform form `1/(8 m1² n1) ‖F^(2,0)‖ + 1/(8 m2² n2) ‖F^(0,2)‖ + 1/(64 m1² n1 m2² n2) ‖F^(2,2)‖`.
pub fn bound_composite_uniform_three_term(field: &Field2D, grid: &GridSpec) -> Result<f64> {
    let sx = (grid.m1 * grid.m1 * grid.n1) as f64;
    let sy = (grid.m2 * grid.m2 * grid.n2) as f64;
    Ok(field.norm_20()? / (8.0 * sx)
        + field.norm_02()? / (8.0 * sy)
        + field.norm_22()? / (64.0 * sx * sy))
}

/// Actual error of `B̄` at a point next to every applicable bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseBoundReport {
    pub position: (f64, f64),
    pub actual_error: f64,
    pub bounds: BTreeMap<String, f64>,
    pub tightness: BTreeMap<String, f64>,
}

pub const BOUND_MODULI: &str = "moduli";
pub const BOUND_THREE_TERM: &str = "three_term";

/// Evaluates `|F - B̄F|(x, y)` and the composite bounds. The three-term
/// bound is reported only when `field` carries its derivative norms.
pub fn pointwise_report(
    field: &Field2D,
    source: &dyn ModulusSource,
    grid: &GridSpec,
    x: f64,
    y: f64,
) -> Result<PointwiseBoundReport> {
    let actual_error = (field.eval(x, y) - tensor_composite(field, grid, x, y)?).abs();
    let mut bounds = BTreeMap::new();
    bounds.insert(
        BOUND_MODULI.to_string(),
        bound_composite_pointwise(source, grid, x, y)?,
    );
    match bound_composite_pointwise_three_term(field, grid, x, y) {
        Ok(b) => {
            bounds.insert(BOUND_THREE_TERM.to_string(), b);
        }
        Err(Error::MissingNorm { .. }) => {}
        Err(e) => return Err(e),
    }
    let tightness = bounds
        .iter()
        .filter(|(_, &b)| b > 0.0)
        .map(|(name, &b)| (name.clone(), actual_error / b))
        .collect();
    Ok(PointwiseBoundReport {
        position: (x, y),
        actual_error,
        bounds,
        tightness,
    })
}
