use crate::error::{LabError, Result};
use crate::field::Field;
use crate::grid::Grid;

/// Time-indexed fields on a uniform lattice of times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<F> {
    grid: Grid,
    times: Vec<f64>,
    fields: Vec<F>,
}

/// Relative spacing tolerance for "uniform" time lattices.
const UNIFORM_TOL: f64 = 1e-9;

impl<F: Field> Trajectory<F> {
    pub fn new(times: Vec<f64>, fields: Vec<F>) -> Result<Self> {
        if fields.is_empty() {
            return Err(LabError::EmptyTrajectory);
        }
        if times.len() != fields.len() {
            return Err(LabError::Precondition(format!("{} times for {} fields", times.len(), fields.len())));
        }
        let grid = *fields[0].grid();
        for f in &fields[1..] {
            grid.ensure_same(f.grid())?;
        }
        if times.len() > 1 {
            let dt = times[1] - times[0];
            if !(dt > 0.0) {
                return Err(LabError::Precondition("times must be strictly increasing".into()));
            }
            for w in times.windows(2) {
                if ((w[1] - w[0]) - dt).abs() > UNIFORM_TOL * dt.max(times[times.len() - 1].abs()) {
                    return Err(LabError::Precondition("times must be uniformly spaced".into()));
                }
            }
        }
        Ok(Trajectory { grid, times, fields })
    }

    /// `count` uniform samples on `[0, t_max]` (endpoints included).
    pub fn lattice(t_max: f64, count: usize) -> Vec<f64> {
        if count == 1 {
            return vec![0.0];
        }
        (0..count).map(|j| t_max * j as f64 / (count - 1) as f64).collect()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[F] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn last(&self) -> &F {
        &self.fields[self.fields.len() - 1]
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<F>) {
        (self.times, self.fields)
    }

    /// Mixed space-time norm `|| ||f(t)||_{L^r_x} ||_{L^q_t}`.
    ///
    /// The time integral is the composite trapezoid rule over the stored
    /// samples; `q = inf` takes the maximum over samples.
    pub fn mixed_norm(&self, q: f64, r: f64) -> Result<f64> {
        if q.is_nan() || q < 1.0 {
            return Err(LabError::InvalidExponent(q));
        }
        let spatial = self.fields.iter().map(|f| f.lp_norm(r)).collect::<Result<Vec<_>>>()?;
        time_norm(&self.times, &spatial, q)
    }

    /// Largest value of `norm(f(t))` over stored times.
    pub fn sup_over_time(&self, norm: impl Fn(&F) -> Result<f64>) -> Result<f64> {
        let mut best: f64 = 0.0;
        for f in &self.fields {
            best = best.max(norm(f)?);
        }
        Ok(best)
    }
}

/// `L^q` norm in time of sampled values (trapezoid rule, max for `q = inf`).
pub fn time_norm(times: &[f64], values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(LabError::EmptyTrajectory);
    }
    if q.is_nan() || q < 1.0 {
        return Err(LabError::InvalidExponent(q));
    }
    if q.is_infinite() {
        return Ok(values.iter().copied().fold(0.0, f64::max));
    }
    if values.len() < 2 {
        return Err(LabError::Precondition("time integral needs at least 2 samples".into()));
    }
    let mut acc = 0.0;
    for (t, v) in times.windows(2).zip(values.windows(2)) {
        acc += 0.5 * (t[1] - t[0]) * (v[0].powf(q) + v[1].powf(q));
    }
    Ok(acc.powf(1.0 / q))
}
