//! Composite bivariate Bernstein operators on the unit square, the
//! associated cubature rule, pointwise and integrated error bounds, and
//! Chebyshev-Grüss inequalities.
//!
//! ```
//! use bernstein_cubature::{cubature, GridSpec, Field2D};
//!
//! let f = Field2D::new("x^2", |x, _| x * x).with_exact_integral(1.0 / 3.0);
//! let grid = GridSpec::new(2, 1, 2, 1).unwrap();
//! let r = cubature::integrate(&f, &grid).unwrap();
//! assert!((r.remainder.unwrap() + 1.0 / 48.0).abs() < 1e-14);
//! ```

pub mod bounds;
pub mod cubature;
pub mod error;
pub mod field;
pub mod format;
pub mod grid;
pub mod gruss;
pub mod harness;
pub mod moduli;
pub mod numeric;
pub mod operators;
pub mod registry;

pub use error::{Error, Result};
pub use field::{DerivativeNorms, Field1D, Field2D};
pub use grid::{cell_of, AxisGrid, GridSpec};
