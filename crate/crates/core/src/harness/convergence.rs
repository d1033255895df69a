use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::cubature::{integrate_with_moduli, DEFAULT_QUADRATURE_POINTS};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::numeric::ls_slope;
use crate::registry::{lookup, reference_integral};

/// Remainders at or below this are treated as exact; no order is fitted.
pub const EXACT_REMAINDER: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    N,
    M,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub grid: GridSpec,
    pub remainder: f64,
    pub bounds: BTreeMap<String, f64>,
    pub empirical_order_n: Option<f64>,
    pub empirical_order_m: Option<f64>,
}

fn check_list(name: &str, values: &[usize]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::domain(format!("{name} is empty")));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(format!("{name} must be strictly ascending")));
    }
    Ok(())
}

/// Cubature remainders on the grids `n1 = n2 = n`, `m1 = m2 = m` for every
/// `(n, m)` in `n_list × m_list`, rows ordered by `n` then `m`.
///
/// The order in `n` is the least-squares slope of `log |R|` against `log n`
/// over rows sharing `m` (likewise for `m`), fitted when at least three
/// such rows exist and none is exact.
pub fn run_convergence(
    function_name: &str,
    n_list: &[usize],
    m_list: &[usize],
    axis: SweepAxis,
) -> Result<Vec<ConvergenceRow>> {
    let entry = lookup(function_name)?;
    check_list("n_list", n_list)?;
    check_list("m_list", m_list)?;
    let reference = reference_integral(&entry.field)?;
    let grids = n_list
        .iter()
        .flat_map(|&n| m_list.iter().map(move |&m| GridSpec::new(n, n, m, m)))
        .collect::<Result<Vec<_>>>()?;
    let results = grids
        .par_iter()
        .map(|grid| {
            integrate_with_moduli(&entry.field, grid, &entry, DEFAULT_QUADRATURE_POINTS)
                .map(|r| r.with_reference(reference))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<ConvergenceRow> = grids
        .into_iter()
        .zip(results)
        .map(|(grid, r)| ConvergenceRow {
            grid,
            remainder: r.remainder.expect("reference is set"),
            bounds: r.bounds,
            empirical_order_n: None,
            empirical_order_m: None,
        })
        .collect();

    if matches!(axis, SweepAxis::N | SweepAxis::Both) {
        for &m in m_list {
            let order = fit(&rows, |r| r.grid.m1 == m, |r| r.grid.n1);
            for row in rows.iter_mut().filter(|r| r.grid.m1 == m) {
                row.empirical_order_n = order;
            }
        }
    }
    if matches!(axis, SweepAxis::M | SweepAxis::Both) {
        for &n in n_list {
            let order = fit(&rows, |r| r.grid.n1 == n, |r| r.grid.m1);
            for row in rows.iter_mut().filter(|r| r.grid.n1 == n) {
                row.empirical_order_m = order;
            }
        }
    }
    Ok(rows)
}

fn fit(
    rows: &[ConvergenceRow],
    select: impl Fn(&ConvergenceRow) -> bool,
    parameter: impl Fn(&ConvergenceRow) -> usize,
) -> Option<f64> {
    let group: Vec<&ConvergenceRow> = rows.iter().filter(|r| select(r)).collect();
    if group.len() < 3
        || group
            .iter()
            .any(|r| r.remainder.is_nan() || r.remainder.abs() <= EXACT_REMAINDER)
    {
        return None;
    }
    let xs: Vec<f64> = group.iter().map(|r| (parameter(r) as f64).ln()).collect();
    let ys: Vec<f64> = group.iter().map(|r| r.remainder.abs().ln()).collect();
    ls_slope(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_orders() {
        let rows = run_convergence("x^2", &[1, 2, 4, 8, 16], &[1], SweepAxis::N).unwrap();
        assert_eq!(rows.len(), 5);
        for r in &rows {
            assert!((r.remainder.abs() - 1.0 / (6.0 * r.grid.n1 as f64)).abs() < 1e-13);
            assert!((r.empirical_order_n.unwrap() + 1.0).abs() < 0.01);
            assert_eq!(r.empirical_order_m, None);
        }
        let rows = run_convergence("x^2", &[1], &[1, 2, 4, 8], SweepAxis::M).unwrap();
        assert!((rows[0].empirical_order_m.unwrap() + 2.0).abs() < 0.01);
    }

    #[test]
    fn constant_has_no_order() {
        let rows = run_convergence("const", &[1, 2, 4], &[1, 2, 3], SweepAxis::Both).unwrap();
        assert_eq!(rows.len(), 9);
        assert!(rows.iter().all(|r| r.remainder.abs() <= 1e-13));
        assert!(rows
            .iter()
            .all(|r| r.empirical_order_n.is_none() && r.empirical_order_m.is_none()));
    }

    #[test]
    fn rows_keep_input_order() {
        let rows = run_convergence("exp", &[1, 3], &[2, 5], SweepAxis::Both).unwrap();
        let params: Vec<(usize, usize)> = rows.iter().map(|r| (r.grid.n1, r.grid.m1)).collect();
        assert_eq!(params, vec![(1, 2), (1, 5), (3, 2), (3, 5)]);
        // Two rows per group: no fit.
        assert!(rows.iter().all(|r| r.empirical_order_n.is_none()));
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(
            run_convergence("nope", &[1], &[1], SweepAxis::N),
            Err(Error::UnknownFunction { .. })
        ));
        assert!(run_convergence("x", &[2, 1], &[1], SweepAxis::N).is_err());
        assert!(run_convergence("x", &[], &[1], SweepAxis::N).is_err());
    }
}
