//! Chebyshev-Grüss objects for `B̄` and `Ī`: the pointwise
//! non-multiplicativity `T`, the functional `D`, and the oscillation bounds
//! for finite product functionals.

use std::collections::BTreeMap;

use ndarray::Array2;
use serde::Serialize;

use crate::cubature::build_rule;
use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::grid::GridSpec;
use crate::moduli::{osc_nodes, ConcaveMajorant};
use crate::numeric::compensated_sum;
use crate::operators::tensor_composite;

pub const BOUND_OMEGA_TILDE: &str = "omega_tilde";
pub const BOUND_UNIFORM: &str = "omega_tilde_uniform";
pub const BOUND_OSCILLATION: &str = "oscillation";
pub const BOUND_EXCLUSION_SUM: &str = "exclusion_sum";
pub const BOUND_POSITIVE: &str = "positive_weights";

const WEIGHT_SUM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrussReport {
    pub value: f64,
    pub bounds: BTreeMap<String, f64>,
    pub second_moment: Option<f64>,
    pub psi: Option<f64>,
}

impl GrussReport {
    pub fn tightness(&self) -> BTreeMap<String, f64> {
        self.bounds
            .iter()
            .filter(|(_, &b)| b > 0.0)
            .map(|(k, &b)| (k.clone(), self.value.abs() / b))
            .collect()
    }
}

/// `Ψ(x, y) = (x-a)(b-x)/n1 + (y-c)(d-y)/n2` on the cell containing `(x, y)`.
pub fn psi(grid: &GridSpec, x: f64, y: f64) -> Result<f64> {
    let (_, qx) = grid.x_axis().locate(x)?;
    let (_, qy) = grid.y_axis().locate(y)?;
    Ok(qx / grid.n1 as f64 + qy / grid.n2 as f64)
}

/// `T(f, g; x, y) = B̄(fg) - B̄f B̄g` with the bounds
/// `ω̃(f; 4√Ψ) ω̃(g; 4√Ψ) / 4` and `ω̃(f; ε) ω̃(g; ε) / 4`,
/// `ε = 2 sqrt(1/(n1 m1²) + 1/(n2 m2²))`.
pub fn t_pointwise(
    f: &Field2D,
    g: &Field2D,
    grid: &GridSpec,
    x: f64,
    y: f64,
    omega_f: &ConcaveMajorant,
    omega_g: &ConcaveMajorant,
) -> Result<GrussReport> {
    let fg = f.product(g);
    let value = tensor_composite(&fg, grid, x, y)?
        - tensor_composite(f, grid, x, y)? * tensor_composite(g, grid, x, y)?;
    let psi = psi(grid, x, y)?;
    let local = 4.0 * psi.sqrt();
    let uniform = 2.0 * uniform_moment(grid).sqrt();
    let mut bounds = BTreeMap::new();
    bounds.insert(
        BOUND_OMEGA_TILDE.to_string(),
        0.25 * omega_f.value(local) * omega_g.value(local),
    );
    bounds.insert(
        BOUND_UNIFORM.to_string(),
        0.25 * omega_f.value(uniform) * omega_g.value(uniform),
    );
    Ok(GrussReport {
        value,
        bounds,
        second_moment: Some(psi),
        psi: Some(psi),
    })
}

fn uniform_moment(grid: &GridSpec) -> f64 {
    let sx = (grid.n1 * grid.m1 * grid.m1) as f64;
    let sy = (grid.n2 * grid.m2 * grid.m2) as f64;
    1.0 / sx + 1.0 / sy
}

/// `Ī(d²) = (1 + 1/(n1 m1²) + 1/(n2 m2²)) / 3`.
pub fn second_moment_closed_form(grid: &GridSpec) -> f64 {
    (1.0 + uniform_moment(grid)) / 3.0
}

/// `Σ_p Σ_q w_p w_q |p - q|²` over the cubature nodes, reduced to the
/// per-axis double sums of the product weights.
pub fn second_moment_discrete(grid: &GridSpec) -> f64 {
    let axis_sum = |nodes: Vec<f64>| {
        let w = 1.0 / nodes.len() as f64;
        compensated_sum(
            nodes
                .iter()
                .flat_map(|&s| nodes.iter().map(move |&t| w * w * (s - t) * (s - t))),
        )
    };
    axis_sum(grid.x_axis().nodes()) + axis_sum(grid.y_axis().nodes())
}

/// `D(f, g) = Ī(fg) - Ī(f) Ī(g)` with the bound
/// `ω̃(f; 2√Ī(d²)) ω̃(g; 2√Ī(d²)) / 4`.
pub fn d_functional(
    f: &Field2D,
    g: &Field2D,
    grid: &GridSpec,
    omega_f: &ConcaveMajorant,
    omega_g: &ConcaveMajorant,
) -> GrussReport {
    let value = d_value(f, g, grid);
    let moment = second_moment_closed_form(grid);
    let t = 2.0 * moment.sqrt();
    let mut bounds = BTreeMap::new();
    bounds.insert(
        BOUND_OMEGA_TILDE.to_string(),
        0.25 * omega_f.value(t) * omega_g.value(t),
    );
    GrussReport {
        value,
        bounds,
        second_moment: Some(moment),
        psi: None,
    }
}

/// `Ī(fg) - Ī(f) Ī(g)` alone.
pub fn d_value(f: &Field2D, g: &Field2D, grid: &GridSpec) -> f64 {
    let rule = build_rule(grid);
    rule.apply(&f.product(g)) - rule.apply(f) * rule.apply(g)
}

/// A finite product functional `L(F) = Σ_n Σ_m a_n b_m F(x_n, y_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFunctional {
    weights_a: Vec<f64>,
    weights_b: Vec<f64>,
    nodes_x: Option<Vec<f64>>,
    nodes_y: Option<Vec<f64>>,
}

impl DiscreteFunctional {
    /// Weights only; value tables are indexed by weight position.
    pub fn new(weights_a: Vec<f64>, weights_b: Vec<f64>) -> Result<Self> {
        for (name, w) in [("a", &weights_a), ("b", &weights_b)] {
            if w.is_empty() || w.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain(format!(
                    "weights {name} must be finite and nonempty"
                )));
            }
            let s = compensated_sum(w.iter().copied());
            if (s - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                return Err(Error::domain(format!("weights {name} sum to {s}, not 1")));
            }
        }
        Ok(Self {
            weights_a,
            weights_b,
            nodes_x: None,
            nodes_y: None,
        })
    }

    /// Weights attached to mutually distinct nodes.
    pub fn with_nodes(
        weights_a: Vec<f64>,
        weights_b: Vec<f64>,
        nodes_x: Vec<f64>,
        nodes_y: Vec<f64>,
    ) -> Result<Self> {
        let mut l = Self::new(weights_a, weights_b)?;
        for (name, nodes, w) in [("x", &nodes_x, &l.weights_a), ("y", &nodes_y, &l.weights_b)] {
            if nodes.len() != w.len() {
                return Err(Error::domain(format!(
                    "{} nodes_{name} for {} weights",
                    nodes.len(),
                    w.len()
                )));
            }
            let mut sorted = nodes.clone();
            sorted.sort_by(f64::total_cmp);
            if sorted.windows(2).any(|p| p[0] == p[1]) {
                return Err(Error::domain(format!("nodes_{name} contain duplicates")));
            }
        }
        l.nodes_x = Some(nodes_x);
        l.nodes_y = Some(nodes_y);
        Ok(l)
    }

    pub fn weights_a(&self) -> &[f64] {
        &self.weights_a
    }

    pub fn weights_b(&self) -> &[f64] {
        &self.weights_b
    }

    pub fn nodes_x(&self) -> Option<&[f64]> {
        self.nodes_x.as_deref()
    }

    pub fn nodes_y(&self) -> Option<&[f64]> {
        self.nodes_y.as_deref()
    }

    /// Samples `field` on the node product.
    pub fn tabulate(&self, field: &Field2D) -> Result<Array2<f64>> {
        let (Some(xs), Some(ys)) = (&self.nodes_x, &self.nodes_y) else {
            return Err(Error::domain("functional has no nodes"));
        };
        Ok(Array2::from_shape_fn((xs.len(), ys.len()), |(i, j)| {
            field.eval(xs[i], ys[j])
        }))
    }

    pub fn apply(&self, values: &Array2<f64>) -> Result<f64> {
        self.check_shape(values)?;
        Ok(compensated_sum(values.indexed_iter().map(|((i, j), v)| {
            self.weights_a[i] * self.weights_b[j] * v
        })))
    }

    fn check_shape(&self, values: &Array2<f64>) -> Result<()> {
        let want = (self.weights_a.len(), self.weights_b.len());
        if values.dim() != want {
            return Err(Error::domain(format!(
                "value table has shape {:?}, expected {want:?}",
                values.dim()
            )));
        }
        Ok(())
    }

    /// `Σ_{(n,m) ≠ (i,j)} |a_n b_m a_i b_j| = (Σ|a|)²(Σ|b|)² - Σa² Σb²`.
    pub fn exclusion_sum(&self) -> f64 {
        let abs = |w: &[f64]| compensated_sum(w.iter().map(|v| v.abs()));
        let sq = |w: &[f64]| compensated_sum(w.iter().map(|v| v * v));
        let (sa, sb) = (abs(&self.weights_a), abs(&self.weights_b));
        (sa * sa) * (sb * sb) - sq(&self.weights_a) * sq(&self.weights_b)
    }

    /// `1 - Σa² Σb²`, the factor for nonnegative weights.
    pub fn positive_factor(&self) -> f64 {
        let sq = |w: &[f64]| compensated_sum(w.iter().map(|v| v * v));
        1.0 - sq(&self.weights_a) * sq(&self.weights_b)
    }

    pub fn is_positive(&self) -> bool {
        self.weights_a
            .iter()
            .chain(&self.weights_b)
            .all(|&w| w >= 0.0)
    }
}

fn oscillation(values: &Array2<f64>) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    hi - lo
}

/// `L(fg) - L(f) L(g)` with the bound `osc(f) osc(g) Σ_{≠}|a b a b| / 2`,
/// plus `osc(f) osc(g) (1 - Σa² Σb²) / 2` when all weights are nonnegative.
pub fn gruss_discrete_general(
    functional: &DiscreteFunctional,
    f_values: &Array2<f64>,
    g_values: &Array2<f64>,
) -> Result<GrussReport> {
    functional.check_shape(f_values)?;
    functional.check_shape(g_values)?;
    let fg = f_values * g_values;
    let value =
        functional.apply(&fg)? - functional.apply(f_values)? * functional.apply(g_values)?;
    let osc = oscillation(f_values) * oscillation(g_values);
    let mut bounds = BTreeMap::new();
    bounds.insert(
        BOUND_EXCLUSION_SUM.to_string(),
        0.5 * osc * functional.exclusion_sum(),
    );
    if functional.is_positive() {
        bounds.insert(
            BOUND_POSITIVE.to_string(),
            0.5 * osc * functional.positive_factor(),
        );
    }
    Ok(GrussReport {
        value,
        bounds,
        second_moment: None,
        psi: None,
    })
}

/// `Ī` as a product functional over per-axis node lists; coincident knot
/// nodes of adjacent cells stay separate indices.
pub fn cubature_functional(grid: &GridSpec) -> DiscreteFunctional {
    let uniform = |count: usize| vec![1.0 / count as f64; count];
    let a = uniform(grid.m1 * (grid.n1 + 1));
    let b = uniform(grid.m2 * (grid.n2 + 1));
    DiscreteFunctional::new(a, b).expect("uniform weights sum to one")
}

/// `|D(f, g)| <= (1 - 1/(m1 m2 (n1+1)(n2+1))) osc(f) osc(g) / 2`.
pub fn oscillation_bound_i(f: &Field2D, g: &Field2D, grid: &GridSpec) -> GrussReport {
    let factor = cubature_functional(grid).positive_factor();
    let mut bounds = BTreeMap::new();
    bounds.insert(
        BOUND_OSCILLATION.to_string(),
        0.5 * factor * osc_nodes(f, grid) * osc_nodes(g, grid),
    );
    GrussReport {
        value: d_value(f, g, grid),
        bounds,
        second_moment: None,
        psi: None,
    }
}
