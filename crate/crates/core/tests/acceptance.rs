//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::time::Instant;

use bernstein_cubature::bounds::{
    bound_classic_three_term, bound_classic_two_term, bound_composite_pointwise,
    bound_composite_pointwise_three_term,
};
use bernstein_cubature::cubature::{
    bound_integrated_three_term, bound_integrated_two_term, integrate,
};
use bernstein_cubature::gruss::{
    cubature_functional, d_functional, d_value, gruss_discrete_general, oscillation_bound_i,
    second_moment_closed_form, second_moment_discrete, DiscreteFunctional, BOUND_EXCLUSION_SUM,
    BOUND_OMEGA_TILDE, BOUND_OSCILLATION, BOUND_POSITIVE,
};
use bernstein_cubature::harness::{run_convergence, SweepAxis};
use bernstein_cubature::moduli::{
    least_concave_majorant, metric_deltas, omega_partial, Axis, ConcaveMajorant, ModulusKind,
    ModulusTable, DEFAULT_RESOLUTION,
};
use bernstein_cubature::operators::tensor_composite;
use bernstein_cubature::registry::{lookup, standard_corpus, RegistryEntry};
use bernstein_cubature::{Field2D, GridSpec};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const EXACT: f64 = 1e-12;
const DOMINATION: f64 = 1e-9;
const REDUCTION: f64 = 1e-14;
const RATIO: f64 = 1e-10;
const POSITIVITY: f64 = 1e-14;
const NORM_ONE: f64 = 1e-12;
const GRUSS_FLOOR: f64 = 1e-12;
const D_EXACT: f64 = 1e-13;
const DISCRETE_DOMINATION: f64 = 1e-10;
const FACTOR_AGREEMENT: f64 = 1e-13;
const ORDER_QUADRATIC: f64 = 0.02;
const ORDER_SINE: f64 = 0.15;
const ESTIMATOR: f64 = 1e-3;
const ORACLE_RELATIVE: f64 = 1e-10;

/// Metric-modulus resolution for every ω̃ in the suite.
const METRIC_RESOLUTION: usize = 48;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn samples() -> Vec<(f64, f64)> {
    (0..=20)
        .flat_map(|i| (0..=20).map(move |j| (i as f64 / 20.0, j as f64 / 20.0)))
        .collect()
}

fn grids(n_max: usize, m_max: usize) -> Vec<GridSpec> {
    let mut out = Vec::new();
    for n1 in 1..=n_max {
        for n2 in 1..=n_max {
            for m1 in 1..=m_max {
                for m2 in 1..=m_max {
                    out.push(GridSpec::new(n1, n2, m1, m2).unwrap());
                }
            }
        }
    }
    out
}

fn c22() -> Vec<RegistryEntry> {
    standard_corpus()
        .into_iter()
        .filter(|e| e.is_c22())
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let f = lookup("x^2").unwrap().field;
    let mut worst = 0.0_f64;
    for n1 in [1, 2, 4, 8] {
        for m1 in [1, 2, 4] {
            let grid = GridSpec::new(n1, 1, m1, 1).unwrap();
            let expected = 1.0 / (6.0 * (n1 * m1 * m1) as f64);
            let r = integrate(&f, &grid).map_err(|e| e.to_string())?;
            let rem = r.remainder.unwrap().abs();
            let bound = bound_integrated_three_term(&f, &grid).map_err(|e| e.to_string())?;
            let err = (rem - expected).abs().max((bound - expected).abs());
            worst = worst.max(err);
            ensure(err <= EXACT, || {
                format!("n1={n1} m1={m1}: |R|={rem:e} bound={bound:e} expected={expected:e}")
            })?;
        }
    }
    Ok(format!("12 grids, max deviation {worst:.1e}"))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for e in c22() {
        for n in [1, 2, 4, 8] {
            for m in [1, 2, 4] {
                for grid in [
                    GridSpec::new(n, 1, m, 1).unwrap(),
                    GridSpec::new(n, n, m, m).unwrap(),
                ] {
                    let r = integrate(&e.field, &grid).map_err(|x| x.to_string())?;
                    let rem = r.remainder.unwrap().abs();
                    let bound =
                        bound_integrated_two_term(&e.field, &grid).map_err(|x| x.to_string())?;
                    ensure(rem <= bound + DOMINATION, || {
                        format!("{} {grid:?}: |R|={rem:e} > {bound:e}", e.name())
                    })?;
                    if e.name() == "x^2" {
                        let ratio = rem / bound;
                        ensure((ratio - 1.0 / 3.0).abs() <= RATIO, || {
                            format!("x^2 {grid:?}: ratio {ratio}")
                        })?;
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (function, grid) pairs, x^2 ratio 1/3"))
}

fn criterion_3() -> Outcome {
    let entries = c22();
    let points = samples();
    let grids = grids(4, 4);
    let checked: Result<usize, String> = grids
        .par_iter()
        .map(|grid| {
            let mut count = 0;
            for e in &entries {
                let f = &e.field;
                for &(x, y) in &points {
                    let actual = (f.eval(x, y) - tensor_composite(f, grid, x, y).unwrap()).abs();
                    let two = bound_composite_pointwise(e, grid, x, y).unwrap();
                    let three = bound_composite_pointwise_three_term(f, grid, x, y).unwrap();
                    for (name, b) in [("moduli", two), ("three_term", three)] {
                        ensure(actual <= b + DOMINATION, || {
                            format!("{} {grid:?} ({x},{y}) {name}: {actual:e} > {b:e}", e.name())
                        })?;
                    }
                    if grid.m1 == 1 && grid.m2 == 1 {
                        let c2 = bound_classic_two_term(e, grid.n1, grid.n2, x, y).unwrap();
                        let c3 = bound_classic_three_term(f, grid.n1, grid.n2, x, y).unwrap();
                        ensure(
                            (c2 - two).abs() <= REDUCTION && (c3 - three).abs() <= REDUCTION,
                            || format!("{} {grid:?} ({x},{y}): reduction", e.name()),
                        )?;
                    }
                    count += 1;
                }
            }
            Ok(count)
        })
        .sum();
    Ok(format!("{} evaluations on {} grids", checked?, grids.len()))
}

fn criterion_4() -> Outcome {
    let points = samples();
    let bilinear = Field2D::new("bilinear", |x, y| 0.3 - 1.7 * x + 2.2 * y + 0.9 * x * y);
    for grid in grids(4, 4) {
        for &(x, y) in &points {
            let v = tensor_composite(&bilinear, &grid, x, y).unwrap();
            ensure((v - bilinear.eval(x, y)).abs() <= EXACT, || {
                format!("bilinear {grid:?} ({x},{y})")
            })?;
        }
        for e in standard_corpus() {
            let f = &e.field;
            let (xs, ys) = (grid.x_axis().nodes(), grid.y_axis().nodes());
            let node_max = xs
                .iter()
                .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
                .fold(0.0_f64, |acc, (x, y)| acc.max(f.eval(x, y).abs()));
            for k in 0..=grid.m1 {
                for l in 0..=grid.m2 {
                    let (x, y) = (k as f64 / grid.m1 as f64, l as f64 / grid.m2 as f64);
                    let v = tensor_composite(f, &grid, x, y).unwrap();
                    ensure((v - f.eval(x, y)).abs() <= EXACT, || {
                        format!("{} {grid:?} knot ({x},{y})", e.name())
                    })?;
                }
            }
            for &(x, y) in &points {
                let v = tensor_composite(f, &grid, x, y).unwrap();
                // Every corpus function is nonnegative on the square.
                ensure(v >= -POSITIVITY, || {
                    format!("{} {grid:?} ({x},{y}): {v}", e.name())
                })?;
                ensure(v.abs() <= node_max + NORM_ONE, || {
                    format!("{} {grid:?} ({x},{y}): |B̄F| = {v} > {node_max}", e.name())
                })?;
            }
        }
    }
    Ok("bilinear reproduction, knot interpolation, positivity, norm one".to_string())
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0_f64;
    for grid in grids(8, 8) {
        let closed = second_moment_closed_form(&grid);
        let discrete = second_moment_discrete(&grid);
        worst = worst.max((closed - discrete).abs());
        ensure((closed - discrete).abs() <= EXACT, || {
            format!("{grid:?}: {closed} vs {discrete}")
        })?;
    }
    let unit = GridSpec::new(1, 1, 1, 1).unwrap();
    ensure(
        second_moment_closed_form(&unit) == 1.0 && second_moment_discrete(&unit) == 1.0,
        || "n = m = 1 is not exactly 1".to_string(),
    )?;
    Ok(format!("4096 grids, max deviation {worst:.1e}"))
}

fn majorant(field: &Field2D) -> ConcaveMajorant {
    ConcaveMajorant::of_metric_modulus(field, METRIC_RESOLUTION).unwrap()
}

fn criterion_6() -> Outcome {
    let names = ["x", "y", "x^2", "sin", "|x-1/2|"];
    let fields: Vec<Field2D> = names.iter().map(|n| lookup(n).unwrap().field).collect();
    let majorants: Vec<ConcaveMajorant> = fields.par_iter().map(majorant).collect();
    let mut count = 0;
    for grid in grids(4, 4) {
        for (i, f) in fields.iter().enumerate() {
            for (j, g) in fields.iter().enumerate() {
                let d = d_functional(f, g, &grid, &majorants[i], &majorants[j]);
                let osc = oscillation_bound_i(f, g, &grid);
                for b in [d.bounds[BOUND_OMEGA_TILDE], osc.bounds[BOUND_OSCILLATION]] {
                    ensure(d.value.abs() <= b + DOMINATION, || {
                        format!("D({}, {}) {grid:?}: {} > {b}", f.name(), g.name(), d.value)
                    })?;
                }
                if i == j {
                    ensure(d.value >= -GRUSS_FLOOR, || {
                        format!("D({0}, {0}) {grid:?} = {1}", f.name(), d.value)
                    })?;
                }
                count += 1;
            }
        }
    }
    let unit = GridSpec::new(1, 1, 1, 1).unwrap();
    let factor = cubature_functional(&unit).positive_factor();
    ensure(factor == 0.75, || format!("factor {factor}"))?;
    let dxx = d_value(&fields[0], &fields[0], &unit);
    ensure((dxx - 0.25).abs() <= D_EXACT, || format!("D(x, x) = {dxx}"))?;
    Ok(format!(
        "{count} (pair, grid) cases; factor 3/4, D(x,x) = 1/4"
    ))
}

fn random_weights(rng: &mut ChaCha8Rng, len: usize, signed: bool) -> Vec<f64> {
    let lo = if signed { -1.0 } else { 0.0 };
    let mut w: Vec<f64> = (0..len).map(|_| rng.gen_range(lo..1.0)).collect();
    if signed {
        // Last weight absorbs the deficit, so the sum is one.
        let partial: f64 = w[..len - 1].iter().sum();
        w[len - 1] = 1.0 - partial;
    } else {
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= s);
    }
    w
}

fn random_instance(
    rng: &mut ChaCha8Rng,
    signed: bool,
) -> (DiscreteFunctional, Array2<f64>, Array2<f64>) {
    let na: usize = rng.gen_range(1..=8);
    let nb: usize = rng.gen_range(1..=8);
    let a = random_weights(rng, na, signed);
    let b = random_weights(rng, nb, signed);
    let f = Array2::from_shape_fn((na, nb), |_| rng.gen_range(-2.0..2.0));
    let g = Array2::from_shape_fn((na, nb), |_| rng.gen_range(-2.0..2.0));
    (DiscreteFunctional::new(a, b).unwrap(), f, g)
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0_f64;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (l, f, g) = random_instance(&mut rng, true);
        let r = gruss_discrete_general(&l, &f, &g).map_err(|e| e.to_string())?;
        let b = r.bounds[BOUND_EXCLUSION_SUM];
        ensure(r.value.abs() <= b + DISCRETE_DOMINATION, || {
            format!("seed {seed}: |{}| > {b}", r.value)
        })?;
        if b > 0.0 {
            worst = worst.max(r.value.abs() / b);
        }

        let (l, f, g) = random_instance(&mut rng, false);
        let r = gruss_discrete_general(&l, &f, &g).map_err(|e| e.to_string())?;
        let (excl, pos) = (l.exclusion_sum(), l.positive_factor());
        ensure((excl - pos).abs() <= FACTOR_AGREEMENT, || {
            format!("seed {seed}: factors {excl} vs {pos}")
        })?;
        ensure(
            r.value.abs() <= r.bounds[BOUND_POSITIVE] + DISCRETE_DOMINATION,
            || format!("seed {seed}: positive-weight bound"),
        )?;
    }
    Ok(format!("100 seeds, max |value|/bound {worst:.3}"))
}

fn order(name: &str, n_list: &[usize], m_list: &[usize], axis: SweepAxis) -> Result<f64, String> {
    let rows = run_convergence(name, n_list, m_list, axis).map_err(|e| e.to_string())?;
    let row = &rows[0];
    match axis {
        SweepAxis::M => row.empirical_order_m,
        _ => row.empirical_order_n,
    }
    .ok_or_else(|| format!("{name}: no order fitted"))
}

/// The sine product sweeps start at 4: below that the rule is far from its
/// asymptotic regime (at n = m = 1 it returns 0).
fn criterion_8() -> Outcome {
    const QUADRATIC_SWEEP: [usize; 5] = [1, 2, 4, 8, 16];
    const SINE_SWEEP: [usize; 5] = [4, 8, 16, 32, 64];
    let cases = [
        ("x^2", SweepAxis::N, &QUADRATIC_SWEEP, -1.0, ORDER_QUADRATIC),
        ("x^2", SweepAxis::M, &QUADRATIC_SWEEP, -2.0, ORDER_QUADRATIC),
        ("sin", SweepAxis::N, &SINE_SWEEP, -1.0, ORDER_SINE),
        ("sin", SweepAxis::M, &SINE_SWEEP, -2.0, ORDER_SINE),
    ];
    let mut report = Vec::new();
    let mut failures = Vec::new();
    for (name, axis, sweep, expected, tol) in cases {
        let s = match axis {
            SweepAxis::M => order(name, &[1], sweep, axis)?,
            _ => order(name, sweep, &[1], axis)?,
        };
        report.push(format!("{name}/{axis:?} {s:.3}"));
        if (s - expected).abs() > tol {
            failures.push(format!(
                "{name}/{axis:?} slope {s:.4}, expected {expected} ± {tol}"
            ));
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(report.join(", "))
}

fn criterion_9() -> Outcome {
    let square = lookup("x^2").unwrap().field;
    for d in [0.05, 0.1, 0.25] {
        let v =
            omega_partial(&square, 2, Axis::X, d, DEFAULT_RESOLUTION).map_err(|e| e.to_string())?;
        ensure((v - 2.0 * d * d).abs() <= ESTIMATOR, || {
            format!("ω2(x^2; {d}) = {v}")
        })?;
    }

    let deltas: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
    let values: Vec<f64> = deltas.iter().map(|d| d.sqrt()).collect();
    let table = ModulusTable::new(
        ModulusKind::PartialX(1),
        deltas.clone(),
        values.clone(),
        1.0,
        50,
    )
    .unwrap();
    let hull = least_concave_majorant(&table).map_err(|e| e.to_string())?;
    for (d, v) in deltas.iter().zip(&values) {
        ensure((hull.value(*d) - v).abs() <= EXACT, || {
            format!("√t hull at {d}")
        })?;
    }

    let mut tables = 0;
    for e in standard_corpus() {
        let metric = ModulusTable::metric(
            &e.field,
            &metric_deltas(METRIC_RESOLUTION),
            METRIC_RESOLUTION,
        )
        .map_err(|x| x.to_string())?;
        let hull = least_concave_majorant(&metric).map_err(|x| x.to_string())?;
        for (&d, &w) in metric.deltas().iter().zip(metric.values()) {
            let h = hull.value(d);
            ensure(w <= h + EXACT && h <= 2.0 * w + EXACT, || {
                format!("{} metric at {d}: ω={w} ω̃={h}", e.name())
            })?;
        }
        let partial =
            ModulusTable::partial(&e.field, 2, Axis::X, &deltas, 64).map_err(|x| x.to_string())?;
        let hull = least_concave_majorant(&partial).map_err(|x| x.to_string())?;
        for (&d, &w) in partial.deltas().iter().zip(partial.values()) {
            ensure(w <= hull.value(d) + EXACT, || {
                format!("{} ω2 majorant at {d}", e.name())
            })?;
        }
        tables += 2;
    }
    Ok(format!(
        "estimator within {ESTIMATOR:e}; √t identity; sandwich on {tables} tables"
    ))
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k as u64).fold(1, |acc, i| acc * (n as u64 - i) / (i + 1))
}

/// Double sum with exact binomials over the cell containing `(x, y)`.
fn naive_tensor(f: &Field2D, grid: &GridSpec, x: f64, y: f64) -> f64 {
    let (ax, ay) = (grid.x_axis(), grid.y_axis());
    let k = bernstein_cubature::cell_of(x, ax.cells).unwrap();
    let l = bernstein_cubature::cell_of(y, ay.cells).unwrap();
    let (a, b) = ax.cell_bounds(k);
    let (c, d) = ay.cell_bounds(l);
    let mut sum = 0.0;
    for i in 0..=ax.degree {
        let px = binomial(ax.degree, i) as f64
            * (x - a).powi(i as i32)
            * (b - x).powi((ax.degree - i) as i32)
            / (b - a).powi(ax.degree as i32);
        for j in 0..=ay.degree {
            let py = binomial(ay.degree, j) as f64
                * (y - c).powi(j as i32)
                * (d - y).powi((ay.degree - j) as i32)
                / (d - c).powi(ay.degree as i32);
            sum += px * py * f.eval(ax.node(k, i), ay.node(l, j));
        }
    }
    sum
}

fn criterion_10() -> Outcome {
    let corpus = standard_corpus();
    let points: Vec<(f64, f64)> = (0..=12)
        .flat_map(|i| (0..=12).map(move |j| (i as f64 / 12.0, j as f64 / 12.0)))
        .chain([(0.123, 0.987), (0.5001, 0.333), (0.77, 0.05)])
        .collect();
    let worst = grids(6, 4)
        .par_iter()
        .map(|grid| {
            let mut worst = 0.0_f64;
            for e in &corpus {
                for &(x, y) in &points {
                    let fast = tensor_composite(&e.field, grid, x, y).unwrap();
                    let slow = naive_tensor(&e.field, grid, x, y);
                    let scale = fast.abs().max(slow.abs());
                    let rel = if scale == 0.0 {
                        0.0
                    } else {
                        (fast - slow).abs() / scale
                    };
                    ensure(rel <= ORACLE_RELATIVE, || {
                        format!("{} {grid:?} ({x},{y}): {fast} vs {slow}", e.name())
                    })?;
                    worst = worst.max(rel);
                }
            }
            Ok::<f64, String>(worst)
        })
        .try_reduce(|| 0.0_f64, |a, b| Ok(a.max(b)))?;
    Ok(format!(
        "576 grids × {} functions, max relative {worst:.1e}",
        corpus.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("three-term remainder bound is tight on x^2", criterion_1),
        ("two-term remainder bound dominates", criterion_2),
        (
            "pointwise bounds dominate; single cell reduces to classical",
            criterion_3,
        ),
        ("operator axioms", criterion_4),
        ("second moment closed form", criterion_5),
        ("Gruss bounds for D", criterion_6),
        ("discrete general functional", criterion_7),
        ("convergence orders", criterion_8),
        ("moduli machinery", criterion_9),
        (
            "stabilized evaluation matches direct summation",
            criterion_10,
        ),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2}: PASS  {title} ({detail}) [{secs:.2}s]",
                i + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {:>2}: FAIL  {title} ({detail}) [{secs:.2}s]",
                    i + 1
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
