//! Mild formulation of the 2D vorticity equation and its Picard solve.
//!
//! The fixed-point map is
//!
//! ```text
//! T w (t) = e^{t Delta} w0 - int_0^t div( e^{(t-s) Delta} [v w](s) ) ds,
//! v = Biot-Savart(w),
//! ```
//!
//! evaluated on a uniform lattice of `nt` stored times in `[0, t0]`. Between
//! stored times the nonlinear source is interpolated linearly in `t`, and the
//! product `v w` is formed from 2/3-rule truncated factors and truncated
//! again.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::biot_savart::{velocity_from_vorticity_2d, velocity_spectra_2d};
use crate::error::{LabError, Result};
use crate::fft;
use crate::field::{dealias, NormReport, ScalarField, Spectrum};
use crate::grid::Grid;
use crate::heat::{duhamel_spectral, heat_spectrum, DuhamelQuadrature};
use crate::io::fmt_f64;
use crate::par::map_ordered;
use crate::stats::fit_log_log;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MildSolveConfig {
    /// Time horizon.
    pub t0: f64,
    /// Stored time samples on `[0, t0]`.
    pub nt: usize,
    /// Duhamel quadrature nodes per stored time.
    pub quad_m: usize,
    /// Stop once the sup-in-time `W^{1,1}` successive difference is below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Include the transport term; `false` reduces `T` to the heat flow.
    pub nonlinear: bool,
}

impl Default for MildSolveConfig {
    fn default() -> Self {
        MildSolveConfig { t0: 0.05, nt: 32, quad_m: 64, tol: 1e-9, max_iter: 50, nonlinear: true }
    }
}

impl MildSolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(LabError::Precondition(format!("t0 must be > 0, got {}", self.t0)));
        }
        if self.nt < 8 {
            return Err(LabError::Precondition(format!("nt must be >= 8, got {}", self.nt)));
        }
        if !(self.tol > 0.0) {
            return Err(LabError::Precondition(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter < 1 {
            return Err(LabError::Precondition("max_iter must be >= 1".into()));
        }
        DuhamelQuadrature::new(self.t0, self.quad_m)?;
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        Trajectory::<ScalarField>::lattice(self.t0, self.nt)
    }
}

fn ensure_admissible(w0: &ScalarField) -> Result<()> {
    w0.grid().ensure_dim(2)?;
    if !w0.has_zero_mean() {
        return Err(LabError::CirculationObstruction { mean: w0.mean() });
    }
    Ok(())
}

/// Divergence spectrum `i kd . (v w)_k` of the dealiased transport flux.
pub(crate) fn transport_divergence(omega: &Spectrum) -> Vec<Complex64> {
    let grid = *omega.grid();
    let mut w = omega.clone();
    dealias(&mut w);
    let [v1, v2] = velocity_spectra_2d(&w);
    let wp = fft::inverse_real(&grid, w.coeffs());
    let v1p = fft::inverse_real(&grid, v1.coeffs());
    let v2p = fft::inverse_real(&grid, v2.coeffs());
    let mut g1: Vec<Complex64> = v1p.iter().zip(&wp).map(|(a, b)| Complex64::new(a * b, 0.0)).collect();
    let mut g2: Vec<Complex64> = v2p.iter().zip(&wp).map(|(a, b)| Complex64::new(a * b, 0.0)).collect();
    fft::forward(&grid, &mut g1);
    fft::forward(&grid, &mut g2);
    let mut s1 = Spectrum::from_coeffs(grid, g1).expect("lattice size");
    let mut s2 = Spectrum::from_coeffs(grid, g2).expect("lattice size");
    dealias(&mut s1);
    dealias(&mut s2);
    let wv = grid.wavevectors();
    (0..grid.len())
        .map(|m| {
            let kd = wv.kd[m];
            s1.coeffs()[m] * Complex64::new(0.0, kd[0]) + s2.coeffs()[m] * Complex64::new(0.0, kd[1])
        })
        .collect()
}

/// Apply the fixed-point map to a trajectory on the config's time lattice.
pub fn apply_t(
    traj: &Trajectory<ScalarField>,
    w0: &ScalarField,
    cfg: &MildSolveConfig,
) -> Result<Trajectory<ScalarField>> {
    ensure_admissible(w0)?;
    let grid = *w0.grid();
    grid.ensure_same(traj.grid())?;
    let times = cfg.times();
    if traj.len() != times.len() || traj.times().iter().zip(&times).any(|(a, b)| (a - b).abs() > 1e-12 * cfg.t0) {
        return Err(LabError::Precondition("trajectory is not on the solver's time lattice".into()));
    }

    let sources: Vec<Vec<Complex64>> =
        if cfg.nonlinear { map_ordered(traj.fields(), |f| transport_divergence(f.spectrum())) } else { Vec::new() };
    let dt = cfg.t0 / (cfg.nt - 1) as f64;
    let w0_hat = w0.spectrum();

    let idx: Vec<usize> = (0..times.len()).collect();
    let out = map_ordered(&idx, |&j| -> Result<ScalarField> {
        let t = times[j];
        if t == 0.0 {
            return Ok(w0.clone());
        }
        let mut spec = heat_spectrum(w0_hat, t);
        if cfg.nonlinear {
            let quad = DuhamelQuadrature::new(t, cfg.quad_m)?;
            let duhamel = duhamel_spectral(&grid, &quad, |s, buf| {
                let pos = (s / dt).clamp(0.0, (cfg.nt - 1) as f64);
                let a = (pos.floor() as usize).min(cfg.nt - 2);
                let theta = pos - a as f64;
                for ((o, x), y) in buf.iter_mut().zip(&sources[a]).zip(&sources[a + 1]) {
                    *o = x * (1.0 - theta) + y * theta;
                }
                Ok(())
            })?;
            for (c, d) in spec.coeffs_mut().iter_mut().zip(duhamel.coeffs()) {
                *c -= d;
            }
        }
        let field = spec.to_field();
        if field.samples().iter().any(|x| !x.is_finite()) {
            return Err(LabError::Divergence(format!("non-finite vorticity at t = {t:.4e}")));
        }
        Ok(field)
    });
    Trajectory::new(times, out.into_iter().collect::<Result<Vec<_>>>()?)
}

/// Heat evolution of `w0` sampled on the config's lattice.
pub fn heat_trajectory(w0: &ScalarField, cfg: &MildSolveConfig) -> Result<Trajectory<ScalarField>> {
    let times = cfg.times();
    let fields = map_ordered(&times, |&t| heat_spectrum(w0.spectrum(), t).to_field());
    Trajectory::new(times, fields)
}

/// `sup_t ||a(t) - b(t)||_{W^{1,1}}` over a common lattice.
pub fn sup_w11_distance(a: &Trajectory<ScalarField>, b: &Trajectory<ScalarField>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(LabError::Precondition("trajectories differ in length".into()));
    }
    let pairs: Vec<(&ScalarField, &ScalarField)> = a.fields().iter().zip(b.fields()).collect();
    let d = map_ordered(&pairs, |(x, y)| (*x - *y).w11_norm());
    let mut best: f64 = 0.0;
    for v in d {
        best = best.max(v?);
    }
    Ok(best)
}

pub fn sup_w11(a: &Trajectory<ScalarField>) -> Result<f64> {
    let d = map_ordered(a.fields(), |x| x.w11_norm());
    let mut best: f64 = 0.0;
    for v in d {
        best = best.max(v?);
    }
    Ok(best)
}

/// `(||v||_inf, ||grad v||_2)` for the Biot-Savart velocity of `w`.
pub fn velocity_norms(w: &ScalarField) -> Result<(f64, f64)> {
    let v = velocity_from_vorticity_2d(w)?;
    Ok((v.lp_norm(f64::INFINITY)?, v.gradient_tensor().lp_norm(2.0)?))
}

/// Per-time norms: `L1`, `W11`, `Linf_v`, `L2_gradv`, and `L1_grad`.
pub fn time_sample_report(w: &ScalarField) -> Result<NormReport> {
    let mut r = NormReport::new();
    let l1 = w.lp_norm(1.0)?;
    let grad = w.gradient().lp_norm(1.0)?;
    let (linf_v, l2_gradv) = velocity_norms(w)?;
    r.insert("L1", l1)?;
    r.insert("L1_grad", grad)?;
    r.insert("W11", l1 + grad)?;
    r.insert("Linf_v", linf_v)?;
    r.insert("L2_gradv", l2_gradv)?;
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardIteration {
    /// `sup_t ||w_{k+1}(t)||_{W11}`.
    pub iterate_sup_w11: f64,
    /// `sup_t ||w_{k+1}(t) - w_k(t)||_{W11}`.
    pub difference_sup_w11: f64,
    /// Ratio to the previous difference.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSample {
    pub t: f64,
    pub norms: NormReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardTrace {
    /// `||w0||_{W11}`.
    pub a0: f64,
    pub t0: f64,
    pub iterations: Vec<PicardIteration>,
    pub converged: bool,
    /// Norms of the final iterate at every stored time.
    pub samples: Vec<TimeSample>,
}

impl PicardTrace {
    pub fn first_ratio(&self) -> Option<f64> {
        self.iterations.get(1).and_then(|it| it.ratio)
    }

    pub fn sup_of(&self, label: &str) -> f64 {
        self.samples.iter().filter_map(|s| s.norms.get(label)).fold(0.0, f64::max)
    }
}

/// One row per stored time: `t,L1,W11,Linf_v,L2_gradv`.
pub fn write_trace_csv(w: &mut impl Write, trace: &PicardTrace) -> Result<()> {
    writeln!(w, "t,L1,W11,Linf_v,L2_gradv")?;
    for s in &trace.samples {
        let get = |k: &str| s.norms.get(k).map(fmt_f64).unwrap_or_default();
        writeln!(w, "{},{},{},{},{}", fmt_f64(s.t), get("L1"), get("W11"), get("Linf_v"), get("L2_gradv"))?;
    }
    Ok(())
}

/// Consecutive non-contracting iterations tolerated before giving up.
const NON_CONTRACTION_LIMIT: usize = 3;

/// Picard iteration `w <- T(w)` from the heat-flow guess.
pub fn picard_solve(w0: &ScalarField, cfg: &MildSolveConfig) -> Result<(Trajectory<ScalarField>, PicardTrace)> {
    cfg.validate()?;
    ensure_admissible(w0)?;
    let a0 = w0.w11_norm()?;
    let mut current = heat_trajectory(w0, cfg)?;
    let mut iterations: Vec<PicardIteration> = Vec::new();
    let mut streak = 0;
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let next = apply_t(&current, w0, cfg)?;
        let diff = sup_w11_distance(&next, &current)?;
        let ratio =
            iterations.last().map(|p| if p.difference_sup_w11 > 0.0 { diff / p.difference_sup_w11 } else { 0.0 });
        iterations.push(PicardIteration { iterate_sup_w11: sup_w11(&next)?, difference_sup_w11: diff, ratio });
        current = next;
        if diff < cfg.tol {
            converged = true;
            break;
        }
        match ratio {
            Some(r) if r >= 1.0 => {
                streak += 1;
                if streak >= NON_CONTRACTION_LIMIT {
                    return Err(LabError::NonContraction { a0, ratio: r });
                }
            }
            _ => streak = 0,
        }
    }
    let samples = map_ordered(&current.times().iter().zip(current.fields()).collect::<Vec<_>>(), |(t, w)| {
        time_sample_report(w).map(|norms| TimeSample { t: **t, norms })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let trace = PicardTrace { a0, t0: cfg.t0, iterations, converged, samples };
    let peak = trace.iterations.last().map(|i| i.iterate_sup_w11).unwrap_or(0.0);
    if converged && peak > 8.0 * a0 * (1.0 + 1e-12) {
        return Err(LabError::Divergence(format!(
            "solution left the ball sup W11 <= 8 A0 ({peak:.4e} > {:.4e})",
            8.0 * a0
        )));
    }
    Ok((current, trace))
}

/// Two Picard steps from the heat guess; returns `(d1, d2, d2 / d1)`.
pub fn first_contraction_ratio(w0: &ScalarField, cfg: &MildSolveConfig) -> Result<(f64, f64, f64)> {
    cfg.validate()?;
    ensure_admissible(w0)?;
    let g0 = heat_trajectory(w0, cfg)?;
    let g1 = apply_t(&g0, w0, cfg)?;
    let d1 = sup_w11_distance(&g1, &g0)?;
    let g2 = apply_t(&g1, w0, cfg)?;
    let d2 = sup_w11_distance(&g2, &g1)?;
    let ratio = if d1 > 0.0 { d2 / d1 } else { 0.0 };
    Ok((d1, d2, ratio))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonChoice {
    pub t0: f64,
    /// Lab constant with `t0 = c_lab / A0^2` (before the `t_max` cap).
    pub c_lab: f64,
    pub first_ratio: f64,
    pub halvings: usize,
    pub capped: bool,
}

/// Pick `t0 = min(c / A0^2, t_max)`, halving `c` from `c_init` until the first
/// measured contraction ratio is at most 1/2.
pub fn select_horizon(
    w0: &ScalarField,
    base: &MildSolveConfig,
    c_init: f64,
    t_max: f64,
    max_halvings: usize,
) -> Result<HorizonChoice> {
    ensure_admissible(w0)?;
    let a0 = w0.w11_norm()?;
    let mut c = c_init;
    for halvings in 0..=max_halvings {
        let raw = if a0 > 0.0 { c / (a0 * a0) } else { f64::INFINITY };
        let capped = raw > t_max;
        let t0 = raw.min(t_max);
        let cfg = MildSolveConfig { t0, ..*base };
        let (_, _, ratio) = first_contraction_ratio(w0, &cfg)?;
        if ratio <= 0.5 {
            return Ok(HorizonChoice { t0, c_lab: c, first_ratio: ratio, halvings, capped });
        }
        c *= 0.5;
    }
    Err(LabError::NonContraction { a0, ratio: f64::NAN })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceRow {
    /// `||delta||_{W11}`.
    pub input_w11: f64,
    /// `sup_t ||w^delta(t) - w(t)||_{W11}`.
    pub output_sup_w11: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceReport {
    pub rows: Vec<DependenceRow>,
    /// Log-log slope of output against input over rows with nonzero input.
    pub slope: Option<f64>,
}

/// Solve from `w0` and from each `w0 + delta`, and compare.
pub fn continuous_dependence_experiment(
    w0: &ScalarField,
    perturbations: &[ScalarField],
    cfg: &MildSolveConfig,
) -> Result<DependenceReport> {
    let (base, _) = picard_solve(w0, cfg)?;
    let mut rows = Vec::with_capacity(perturbations.len());
    for delta in perturbations {
        let input = delta.w11_norm()?;
        let output = if input == 0.0 {
            0.0
        } else {
            let (perturbed, _) = picard_solve(&(w0 + delta), cfg)?;
            sup_w11_distance(&perturbed, &base)?
        };
        let ratio = if input > 0.0 { output / input } else { 0.0 };
        rows.push(DependenceRow { input_w11: input, output_sup_w11: output, ratio });
    }
    let nonzero: Vec<&DependenceRow> = rows.iter().filter(|r| r.input_w11 > 0.0 && r.output_sup_w11 > 0.0).collect();
    let slope = if nonzero.len() >= 2 {
        let x: Vec<f64> = nonzero.iter().map(|r| r.input_w11).collect();
        let y: Vec<f64> = nonzero.iter().map(|r| r.output_sup_w11).collect();
        Some(fit_log_log(&x, &y)?.slope)
    } else {
        None
    };
    Ok(DependenceReport { rows, slope })
}

/// Smoothed vortex patches of opposite sign: a bounded-variation datum with
/// sharp edges of width `edge` (tanh profile).
pub fn patch_dipole(grid: &Grid, amplitude: f64, radius: f64, separation: f64, edge: f64) -> Result<ScalarField> {
    grid.ensure_dim(2)?;
    if separation < 2.0 * radius + 4.0 * edge {
        return Err(LabError::Precondition("patches overlap".into()));
    }
    if separation + 2.0 * radius + 4.0 * edge > grid.box_length() {
        return Err(LabError::Precondition("patch dipole does not fit in the box".into()));
    }
    let [c1, c2] = crate::oseen::dipole_centers(grid, separation);
    let patch = |x: [f64; 3], c: [f64; 2]| {
        let d = grid.min_image(x, [c[0], c[1], 0.0]);
        let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
        0.5 * (1.0 - ((r - radius) / edge).tanh())
    };
    let raw = ScalarField::from_fn(*grid, |x| amplitude * (patch(x, c1) - patch(x, c2)));
    let mean = raw.mean();
    Ok(raw.zip_with(&ScalarField::constant(*grid, mean), |a, b| a - b)?)
}
