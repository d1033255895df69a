//! Test integrands with closed-form integrals, derivative sup-norms and
//! second-order moduli, and the panel Gauss-Legendre reference integrator.

use std::f64::consts::{E, PI};

use rayon::prelude::*;

use crate::bounds::ModulusSource;
use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::moduli::Axis;
use crate::numeric::{compensated_sum, gauss_legendre};

/// Analytic `δ ↦ ω_2` along one axis.
pub type Omega2 = fn(f64) -> f64;

pub const TAG_AFFINE: &str = "affine";
pub const TAG_SEPARABLE: &str = "separable";
pub const TAG_C22: &str = "C22";
pub const TAG_LIPSCHITZ_ONLY: &str = "lipschitz-only";

#[derive(Debug, Clone)]
pub struct RegistryEntry {
    pub field: Field2D,
    pub omega2_x: Option<Omega2>,
    pub omega2_y: Option<Omega2>,
    pub tags: Vec<&'static str>,
}

impl RegistryEntry {
    pub fn name(&self) -> &str {
        self.field.name()
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.contains(&tag)
    }

    pub fn is_c22(&self) -> bool {
        self.has_tag(TAG_C22)
    }
}

impl ModulusSource for RegistryEntry {
    fn partial_modulus(&self, order: usize, axis: Axis, delta: f64) -> Result<f64> {
        let omega = match axis {
            Axis::X => self.omega2_x,
            Axis::Y => self.omega2_y,
        };
        match (order, omega) {
            (2, Some(w)) => Ok(w(delta.max(0.0))),
            _ => Err(Error::domain(format!(
                "`{}` has no analytic modulus of order {order} along {axis:?}",
                self.name()
            ))),
        }
    }
}

fn zero(_: f64) -> f64 {
    0.0
}

fn quadratic(d: f64) -> f64 {
    2.0 * d.min(0.5).powi(2)
}

fn sine(d: f64) -> f64 {
    2.0 * (1.0 - (PI * d.min(0.5)).cos())
}

fn exponential(d: f64) -> f64 {
    E * E * (1.0 - (-d.min(0.5)).exp()).powi(2)
}

fn kink(d: f64) -> f64 {
    2.0 * d.min(0.5)
}

fn entry(
    field: Field2D,
    omega2_x: Omega2,
    omega2_y: Omega2,
    tags: &[&'static str],
) -> RegistryEntry {
    RegistryEntry {
        field,
        omega2_x: Some(omega2_x),
        omega2_y: Some(omega2_y),
        tags: tags.to_vec(),
    }
}

fn smooth(
    name: &str,
    f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    integral: f64,
    norms: (f64, f64, f64),
) -> Field2D {
    Field2D::new(name, f)
        .with_exact_integral(integral)
        .with_norms(norms.0, norms.1, norms.2)
        .expect("corpus norms are nonnegative")
}

/// The standard corpus, in a fixed order.
pub fn standard_corpus() -> Vec<RegistryEntry> {
    let pi2 = PI * PI;
    vec![
        entry(
            smooth("const", |_, _| 1.0, 1.0, (0.0, 0.0, 0.0)),
            zero,
            zero,
            &[TAG_AFFINE, TAG_SEPARABLE, TAG_C22],
        ),
        entry(
            smooth("x", |x, _| x, 0.5, (0.0, 0.0, 0.0)),
            zero,
            zero,
            &[TAG_AFFINE, TAG_SEPARABLE, TAG_C22],
        ),
        entry(
            smooth("y", |_, y| y, 0.5, (0.0, 0.0, 0.0)),
            zero,
            zero,
            &[TAG_AFFINE, TAG_SEPARABLE, TAG_C22],
        ),
        entry(
            smooth("x+y", |x, y| x + y, 1.0, (0.0, 0.0, 0.0)),
            zero,
            zero,
            &[TAG_AFFINE, TAG_C22],
        ),
        entry(
            smooth("xy", |x, y| x * y, 0.25, (0.0, 0.0, 0.0)),
            zero,
            zero,
            &["bilinear", TAG_SEPARABLE, TAG_C22],
        ),
        entry(
            smooth("x^2", |x, _| x * x, 1.0 / 3.0, (2.0, 0.0, 0.0)),
            quadratic,
            zero,
            &["quadratic", TAG_SEPARABLE, TAG_C22],
        ),
        entry(
            smooth("y^2", |_, y| y * y, 1.0 / 3.0, (0.0, 2.0, 0.0)),
            zero,
            quadratic,
            &["quadratic", TAG_SEPARABLE, TAG_C22],
        ),
        entry(
            smooth("x^2+y^2", |x, y| x * x + y * y, 2.0 / 3.0, (2.0, 2.0, 0.0)),
            quadratic,
            quadratic,
            &["quadratic", TAG_C22],
        ),
        entry(
            smooth("x^2y^2", |x, y| x * x * y * y, 1.0 / 9.0, (2.0, 2.0, 4.0)),
            quadratic,
            quadratic,
            &[TAG_SEPARABLE, TAG_C22],
        ),
        entry(
            smooth(
                "sin(pi x)sin(pi y)",
                |x, y| (PI * x).sin() * (PI * y).sin(),
                4.0 / pi2,
                (pi2, pi2, pi2 * pi2),
            ),
            sine,
            sine,
            &["trigonometric", TAG_SEPARABLE, TAG_C22],
        ),
        entry(
            smooth(
                "exp(x+y)",
                |x, y| (x + y).exp(),
                (E - 1.0).powi(2),
                (E * E, E * E, E * E),
            ),
            exponential,
            exponential,
            &["exponential", TAG_SEPARABLE, TAG_C22],
        ),
        entry(
            Field2D::new("|x-1/2|", |x, _| (x - 0.5).abs()).with_exact_integral(0.25),
            kink,
            zero,
            &[TAG_LIPSCHITZ_ONLY],
        ),
    ]
}

const ALIASES: &[(&str, &str)] = &[
    ("1", "const"),
    ("constant", "const"),
    ("x*y", "xy"),
    ("x2", "x^2"),
    ("x**2", "x^2"),
    ("y2", "y^2"),
    ("y**2", "y^2"),
    ("x^2*y^2", "x^2y^2"),
    ("sin", "sin(pi x)sin(pi y)"),
    ("sin-product", "sin(pi x)sin(pi y)"),
    ("exp", "exp(x+y)"),
    ("abs", "|x-1/2|"),
];

/// Finds a corpus entry by name or alias.
pub fn lookup(name: &str) -> Result<RegistryEntry> {
    let canonical = ALIASES
        .iter()
        .find(|(alias, _)| *alias == name)
        .map_or(name, |(_, target)| target);
    let corpus = standard_corpus();
    let available = corpus.iter().map(|e| e.name().to_string()).collect();
    corpus
        .into_iter()
        .find(|e| e.name() == canonical)
        .ok_or(Error::UnknownFunction {
            name: name.to_string(),
            available,
        })
}

/// Panels per axis and Gauss-Legendre points per panel of the oracle.
pub const ORACLE_PANELS: usize = 8;
pub const ORACLE_POINTS: usize = 64;

/// Tensor Gauss-Legendre on an 8×8 panel partition of the unit square,
/// 64 points per axis and panel.
pub fn oracle_integrate(field: &Field2D) -> Result<f64> {
    let rule = gauss_legendre(ORACLE_POINTS);
    let h = 1.0 / ORACLE_PANELS as f64;
    let axis: Vec<(f64, f64)> = (0..ORACLE_PANELS)
        .flat_map(|p| {
            let mid = (p as f64 + 0.5) * h;
            rule.iter()
                .map(move |&(t, w)| (mid + 0.5 * h * t, 0.5 * h * w))
        })
        .collect();
    let rows: Vec<Result<f64>> = axis
        .par_iter()
        .map(|&(x, wx)| {
            let mut terms = Vec::with_capacity(axis.len());
            for &(y, wy) in &axis {
                let v = field.eval(x, y);
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        field: field.name().to_string(),
                        x,
                        y,
                        value: v,
                    });
                }
                terms.push(wy * v);
            }
            Ok(wx * compensated_sum(terms))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(compensated_sum(rows))
}

/// Exact integral when known, otherwise the oracle value.
pub fn reference_integral(field: &Field2D) -> Result<f64> {
    match field.exact_integral() {
        Some(v) => Ok(v),
        None => oracle_integrate(field),
    }
}
