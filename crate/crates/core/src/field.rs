use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Evaluator1D = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Evaluator2D = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A univariate function together with its name and, optionally, `‖f''‖∞`.
#[derive(Clone)]
pub struct Field1D {
    eval: Evaluator1D,
    name: String,
    norm_2: Option<f64>,
}

impl Field1D {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            name: name.into(),
            norm_2: None,
        }
    }

    pub fn with_norm_2(mut self, norm: f64) -> Result<Self> {
        self.norm_2 = Some(check_norm(norm)?);
        Ok(self)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn norm_2(&self) -> Option<f64> {
        self.norm_2
    }
}

impl fmt::Debug for Field1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field1D")
            .field("name", &self.name)
            .field("norm_2", &self.norm_2)
            .finish_non_exhaustive()
    }
}

/// Sup-norms of the partial derivatives `F^(2,0)`, `F^(0,2)` and `F^(2,2)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DerivativeNorms {
    pub d20: Option<f64>,
    pub d02: Option<f64>,
    pub d22: Option<f64>,
}

/// A bivariate function on the unit square with optional metadata.
#[derive(Clone)]
pub struct Field2D {
    eval: Evaluator2D,
    name: String,
    exact_integral: Option<f64>,
    norms: DerivativeNorms,
}

impl Field2D {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(f),
            name: name.into(),
            exact_integral: None,
            norms: DerivativeNorms::default(),
        }
    }

    pub fn with_exact_integral(mut self, value: f64) -> Self {
        self.exact_integral = Some(value);
        self
    }

    /// Attaches `‖F^(2,0)‖∞`, `‖F^(0,2)‖∞` and `‖F^(2,2)‖∞`.
    pub fn with_norms(mut self, d20: f64, d02: f64, d22: f64) -> Result<Self> {
        self.norms = DerivativeNorms {
            d20: Some(check_norm(d20)?),
            d02: Some(check_norm(d02)?),
            d22: Some(check_norm(d22)?),
        };
        Ok(self)
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn exact_integral(&self) -> Option<f64> {
        self.exact_integral
    }

    pub fn norms(&self) -> DerivativeNorms {
        self.norms
    }

    pub fn norm_20(&self) -> Result<f64> {
        self.norms.d20.ok_or_else(|| self.missing("(2,0)"))
    }

    pub fn norm_02(&self) -> Result<f64> {
        self.norms.d02.ok_or_else(|| self.missing("(0,2)"))
    }

    pub fn norm_22(&self) -> Result<f64> {
        self.norms.d22.ok_or_else(|| self.missing("(2,2)"))
    }

    fn missing(&self, norm: &'static str) -> Error {
        Error::MissingNorm {
            field: self.name.clone(),
            norm,
        }
    }

    /// Pointwise product `f g`; metadata is dropped.
    pub fn product(&self, other: &Field2D) -> Field2D {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        Field2D::new(format!("({})*({})", self.name, other.name), move |x, y| {
            f(x, y) * g(x, y)
        })
    }

    /// `alpha f + beta g`; metadata is dropped.
    pub fn combine(alpha: f64, f: &Field2D, beta: f64, g: &Field2D) -> Field2D {
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        Field2D::new(
            format!("{alpha}*({}) + {beta}*({})", f.name, g.name),
            move |x, y| alpha * fe(x, y) + beta * ge(x, y),
        )
    }

    /// The partial function `x -> F(x, y)`.
    pub fn row(&self, y: f64) -> Field1D {
        let f = self.eval.clone();
        Field1D::new(format!("{}(., {y})", self.name), move |x| f(x, y))
    }
}

impl fmt::Debug for Field2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field2D")
            .field("name", &self.name)
            .field("exact_integral", &self.exact_integral)
            .field("norms", &self.norms)
            .finish_non_exhaustive()
    }
}

fn check_norm(v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::domain(format!(
            "derivative norm must be finite and >= 0, got {v}"
        )))
    }
}
