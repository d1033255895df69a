use rayon::prelude::*;

use super::Axis;
use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::grid::GridSpec;
use crate::numeric::binomial;

/// Base points per axis (as intervals of `[0, 1]`) used by default.
pub const DEFAULT_RESOLUTION: usize = 256;
/// Default resolution of the metric modulus; its cost grows like `R^4`.
pub const DEFAULT_METRIC_RESOLUTION: usize = 64;
/// Step lattice of the partial moduli is `STEP_REFINEMENT` times finer than
/// the base-point lattice.
pub const STEP_REFINEMENT: usize = 16;

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 2 {
        return Err(Error::domain(format!(
            "resolution {resolution} must be at least 2"
        )));
    }
    Ok(())
}

fn check_delta(name: &str, delta: f64) -> Result<()> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::domain(format!(
            "{name} = {delta} must be finite and >= 0"
        )));
    }
    Ok(())
}

/// Largest lattice index `j` with `j / lattice <= delta`.
fn lattice_steps(delta: f64, lattice: usize) -> usize {
    let scaled = delta * lattice as f64;
    // Absorb the rounding of e.g. 0.25 * 4096.
    let j = (scaled * (1.0 + 4.0 * f64::EPSILON)).floor();
    if j >= lattice as f64 {
        lattice
    } else {
        j as usize
    }
}

/// Signed coefficients `(-1)^(r-ν) C(r, ν)` of the forward difference of order `r`.
fn difference_coefficients(order: usize) -> Vec<f64> {
    (0..=order)
        .map(|nu| {
            let sign = if (order - nu).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            sign * binomial(order, nu)
        })
        .collect()
}

fn grid_values(field: &Field2D, resolution: usize) -> Vec<Vec<f64>> {
    let r = resolution as f64;
    (0..=resolution)
        .into_par_iter()
        .map(|a| {
            let x = a as f64 / r;
            (0..=resolution)
                .map(|b| field.eval(x, b as f64 / r))
                .collect()
        })
        .collect()
}

/// Per-step maxima of `|Δ_h^r F|` along one axis on the step lattice
/// `j / (STEP_REFINEMENT * resolution)`.
///
/// `value(delta)` is the running maximum over all lattice steps with
/// `|h| <= delta`, so one sweep answers every `delta` up to the sweep limit.
#[derive(Debug, Clone)]
pub struct PartialModulusProfile {
    order: usize,
    axis: Axis,
    resolution: usize,
    lattice: usize,
    prefix_max: Vec<f64>,
    exhaustive: bool,
}

impl PartialModulusProfile {
    /// Sweeps all lattice steps with `|h| <= max_delta`.
    pub fn compute(
        field: &Field2D,
        order: usize,
        axis: Axis,
        resolution: usize,
        max_delta: f64,
    ) -> Result<Self> {
        check_resolution(resolution)?;
        check_delta("delta", max_delta)?;
        let lattice = resolution * STEP_REFINEMENT;
        if order == 0 {
            // Zeroth order: sup |F| over the base points, for every delta.
            let sup = grid_values(field, resolution)
                .iter()
                .flatten()
                .fold(0.0_f64, |acc, v| acc.max(v.abs()));
            return Ok(Self {
                order,
                axis,
                resolution,
                lattice,
                prefix_max: vec![sup],
                exhaustive: true,
            });
        }

        // Steps beyond 1/order admit no base point.
        let cap = lattice / order;
        let steps = lattice_steps(max_delta, lattice).min(cap);
        let coeffs = difference_coefficients(order);
        let r = resolution as f64;
        let l = lattice as f64;

        let per_step = (0..=resolution)
            .into_par_iter()
            .map(|line| {
                let fixed = line as f64 / r;
                let values: Vec<f64> = (0..=lattice)
                    .map(|i| {
                        let moving = i as f64 / l;
                        match axis {
                            Axis::X => field.eval(moving, fixed),
                            Axis::Y => field.eval(fixed, moving),
                        }
                    })
                    .collect();
                let mut best = vec![0.0_f64; steps + 1];
                for (j, slot) in best.iter_mut().enumerate().skip(1) {
                    let span = order * j;
                    for base in (0..=lattice).step_by(STEP_REFINEMENT) {
                        if base + span <= lattice {
                            let d: f64 = coeffs
                                .iter()
                                .enumerate()
                                .map(|(nu, c)| c * values[base + nu * j])
                                .sum();
                            *slot = slot.max(d.abs());
                        }
                        if base >= span {
                            let d: f64 = coeffs
                                .iter()
                                .enumerate()
                                .map(|(nu, c)| c * values[base - nu * j])
                                .sum();
                            *slot = slot.max(d.abs());
                        }
                    }
                }
                best
            })
            .reduce(
                || vec![0.0_f64; steps + 1],
                |mut acc, other| {
                    for (a, b) in acc.iter_mut().zip(other) {
                        *a = a.max(b);
                    }
                    acc
                },
            );

        let mut running = 0.0_f64;
        let prefix_max = per_step
            .into_iter()
            .map(|v| {
                running = running.max(v);
                running
            })
            .collect();
        Ok(Self {
            order,
            axis,
            resolution,
            lattice,
            prefix_max,
            exhaustive: steps == cap,
        })
    }

    /// Estimated `ω_r(F; delta, 0)` (or `ω_r(F; 0, delta)` for the y-axis).
    ///
    /// Requests beyond the swept range are answered with the largest swept
    /// step, unless the sweep already covered every admissible step.
    pub fn value(&self, delta: f64) -> f64 {
        if self.order == 0 {
            return self.prefix_max[0];
        }
        let j = lattice_steps(delta.max(0.0), self.lattice);
        debug_assert!(
            self.exhaustive || j < self.prefix_max.len(),
            "delta beyond sweep"
        );
        self.prefix_max[j.min(self.prefix_max.len() - 1)]
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Largest step covered by the sweep.
    pub fn max_delta(&self) -> f64 {
        if self.exhaustive {
            f64::INFINITY
        } else {
            (self.prefix_max.len() - 1) as f64 / self.lattice as f64
        }
    }
}

/// Partial modulus of smoothness `ω_r(F; δ, 0)` (axis x) or `ω_r(F; 0, δ)`
/// (axis y), estimated on `(resolution+1)^2` base points.
pub fn omega_partial(
    field: &Field2D,
    order: usize,
    axis: Axis,
    delta: f64,
    resolution: usize,
) -> Result<f64> {
    check_delta("delta", delta)?;
    check_resolution(resolution)?;
    if order > 0 && delta == 0.0 {
        return Ok(0.0);
    }
    Ok(PartialModulusProfile::compute(field, order, axis, resolution, delta)?.value(delta))
}

/// Mixed modulus `ω_{k,l}(F; δ1, δ2)` built from double differences.
///
/// With one order zero it coincides with the partial modulus of the other
/// axis and is computed by the same routine.
pub fn omega_mixed(
    field: &Field2D,
    k: usize,
    l: usize,
    delta1: f64,
    delta2: f64,
    resolution: usize,
) -> Result<f64> {
    if k == 0 && l == 0 {
        return Err(Error::domain("mixed modulus needs k + l >= 1"));
    }
    check_delta("delta1", delta1)?;
    check_delta("delta2", delta2)?;
    check_resolution(resolution)?;
    if l == 0 {
        return omega_partial(field, k, Axis::X, delta1, resolution);
    }
    if k == 0 {
        return omega_partial(field, l, Axis::Y, delta2, resolution);
    }

    let values = grid_values(field, resolution);
    let cx = difference_coefficients(k);
    let cy = difference_coefficients(l);
    let jx = lattice_steps(delta1, resolution).min(resolution / k) as isize;
    let jy = lattice_steps(delta2, resolution).min(resolution / l) as isize;
    let res = resolution as isize;

    let best = (-jx..=jx)
        .into_par_iter()
        .filter(|&s| s != 0)
        .map(|s1| {
            let mut best = 0.0_f64;
            for s2 in (-jy..=jy).filter(|&s| s != 0) {
                for a in 0..=res {
                    let end_a = a + k as isize * s1;
                    if !(0..=res).contains(&end_a) {
                        continue;
                    }
                    for b in 0..=res {
                        let end_b = b + l as isize * s2;
                        if !(0..=res).contains(&end_b) {
                            continue;
                        }
                        let mut d = 0.0;
                        for (nu, c1) in cx.iter().enumerate() {
                            let row = &values[(a + nu as isize * s1) as usize];
                            for (mu, c2) in cy.iter().enumerate() {
                                d += c1 * c2 * row[(b + mu as isize * s2) as usize];
                            }
                        }
                        best = best.max(d.abs());
                    }
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Total modulus `ω_r(F; δ1, δ2)` with steps `(h1, h2)`, `|h_i| <= δ_i`,
/// taken on the base-point lattice.
pub fn omega_total(
    field: &Field2D,
    order: usize,
    delta1: f64,
    delta2: f64,
    resolution: usize,
) -> Result<f64> {
    check_delta("delta1", delta1)?;
    check_delta("delta2", delta2)?;
    check_resolution(resolution)?;
    let values = grid_values(field, resolution);
    if order == 0 {
        return Ok(values
            .iter()
            .flatten()
            .fold(0.0, |acc: f64, v| acc.max(v.abs())));
    }
    let coeffs = difference_coefficients(order);
    let jx = lattice_steps(delta1, resolution).min(resolution / order) as isize;
    let jy = lattice_steps(delta2, resolution).min(resolution / order) as isize;
    let res = resolution as isize;
    let r = order as isize;

    let best = (-jx..=jx)
        .into_par_iter()
        .map(|s1| {
            let mut best = 0.0_f64;
            for s2 in -jy..=jy {
                if s1 == 0 && s2 == 0 {
                    continue;
                }
                for a in 0..=res {
                    if !(0..=res).contains(&(a + r * s1)) {
                        continue;
                    }
                    for b in 0..=res {
                        if !(0..=res).contains(&(b + r * s2)) {
                            continue;
                        }
                        let d: f64 = coeffs
                            .iter()
                            .enumerate()
                            .map(|(nu, c)| {
                                let nu = nu as isize;
                                c * values[(a + nu * s1) as usize][(b + nu * s2) as usize]
                            })
                            .sum();
                        best = best.max(d.abs());
                    }
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Maxima of `|F(p) - F(q)|` over lattice offsets sorted by length; answers
/// `ω_d(F; t)` for every `t` up to the sweep radius.
#[derive(Debug, Clone)]
pub struct MetricModulusProfile {
    resolution: usize,
    /// Squared offset lengths in lattice units, ascending.
    lengths_sq: Vec<u64>,
    prefix_max: Vec<f64>,
    radius: f64,
}

impl MetricModulusProfile {
    pub fn compute(field: &Field2D, resolution: usize, max_t: f64) -> Result<Self> {
        check_resolution(resolution)?;
        check_delta("t", max_t)?;
        let res = resolution as i64;
        let reach = lattice_steps(max_t, resolution) as i64;
        let limit_sq = squared_limit(max_t, resolution);

        let mut offsets: Vec<(i64, i64, u64)> = Vec::new();
        for di in 0..=reach.min(res) {
            for dj in -reach.min(res)..=reach.min(res) {
                if di == 0 && dj <= 0 {
                    continue;
                }
                let len_sq = (di * di + dj * dj) as u64;
                if (len_sq as f64) <= limit_sq {
                    offsets.push((di, dj, len_sq));
                }
            }
        }
        offsets.sort_by_key(|&(di, dj, len)| (len, di, dj));

        let values = grid_values(field, resolution);
        let maxima: Vec<f64> = offsets
            .par_iter()
            .map(|&(di, dj, _)| {
                let mut best = 0.0_f64;
                for a in 0..=(res - di) {
                    let (row, shifted) = (&values[a as usize], &values[(a + di) as usize]);
                    let b_lo = 0.max(-dj);
                    let b_hi = res.min(res - dj);
                    for b in b_lo..=b_hi {
                        best = best.max((row[b as usize] - shifted[(b + dj) as usize]).abs());
                    }
                }
                best
            })
            .collect();

        let mut running = 0.0_f64;
        let prefix_max = maxima
            .into_iter()
            .map(|v| {
                running = running.max(v);
                running
            })
            .collect();
        Ok(Self {
            resolution,
            lengths_sq: offsets.into_iter().map(|o| o.2).collect(),
            prefix_max,
            radius: max_t,
        })
    }

    /// Estimated `ω_d(F; t)`; `t` is clipped to the sweep radius.
    pub fn value(&self, t: f64) -> f64 {
        let limit = squared_limit(t.min(self.radius).max(0.0), self.resolution);
        let count = self
            .lengths_sq
            .partition_point(|&len| (len as f64) <= limit);
        if count == 0 {
            0.0
        } else {
            self.prefix_max[count - 1]
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }
}

fn squared_limit(t: f64, resolution: usize) -> f64 {
    let s = t * resolution as f64;
    s * s * (1.0 + 8.0 * f64::EPSILON)
}

/// Modulus of continuity `ω_d(F; t)` with respect to the Euclidean metric on
/// the unit square, from point pairs of the `(resolution+1)^2` lattice.
pub fn omega_metric(field: &Field2D, t: f64, resolution: usize) -> Result<f64> {
    check_delta("t", t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(MetricModulusProfile::compute(field, resolution, t)?.value(t))
}

/// Default sample points for a metric modulus table: multiples of the
/// lattice spacing up to the diameter of the unit square.
pub fn metric_deltas(resolution: usize) -> Vec<f64> {
    let diameter = super::UNIT_SQUARE_DIAMETER;
    let r = resolution as f64;
    let mut deltas: Vec<f64> = (0..)
        .map(|j| j as f64 / r)
        .take_while(|&d| d < diameter)
        .collect();
    deltas.push(diameter);
    deltas
}

/// Oscillation `max - min` of `F` over the composite cubature nodes.
pub fn osc_nodes(field: &Field2D, grid: &GridSpec) -> f64 {
    let xs = grid.x_axis().nodes();
    let ys = grid.y_axis().nodes();
    let (lo, hi) = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .map(|(x, y)| field.eval(x, y))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    hi - lo
}
