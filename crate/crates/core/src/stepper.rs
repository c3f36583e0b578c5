//! Pseudo-spectral reference integrator for the 2D vorticity equation.
//!
//! Integrating-factor RK4: the viscous term is integrated exactly in Fourier
//! space and the transport term `-div(v w)` is advanced with classical RK4
//! weights. Products are formed from 2/3-rule truncated factors. The step is
//! the larger of the requested resolution and a CFL bound, both rounded so
//! that every output time is hit exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::{ScalarField, Spectrum};
use crate::mild::transport_divergence;
use crate::trajectory::Trajectory;

/// Courant number against `h / max|v|`.
const CFL: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub t0: f64,
    /// Output samples on `[0, t0]`.
    pub nt: usize,
    /// Minimum number of RK4 steps on `[0, t0]`.
    pub nt_fine: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepperDiagnostics {
    pub steps: usize,
    /// Largest relative change of the spatial mean (exactly zero in exact
    /// arithmetic).
    pub mean_drift: f64,
    /// Largest relative enstrophy increase between output times.
    pub enstrophy_increase: f64,
}

fn add_scaled(a: &[Complex64], b: &[Complex64], c: f64) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + y * c).collect()
}

fn nonlinear(grid: crate::grid::Grid, u: &[Complex64]) -> Result<Vec<Complex64>> {
    let spec = Spectrum::from_coeffs(grid, u.to_vec())?;
    let mut d = transport_divergence(&spec);
    for x in &mut d {
        *x = -*x;
    }
    Ok(d)
}

fn max_speed(grid: crate::grid::Grid, u: &[Complex64]) -> Result<f64> {
    let spec = Spectrum::from_coeffs(grid, u.to_vec())?;
    let [v1, v2] = crate::biot_savart::velocity_spectra_2d(&spec);
    let a = crate::fft::inverse_real(&grid, v1.coeffs());
    let b = crate::fft::inverse_real(&grid, v2.coeffs());
    Ok(a.iter().zip(&b).map(|(x, y)| x.hypot(*y)).fold(0.0, f64::max))
}

fn enstrophy(u: &[Complex64]) -> f64 {
    u.iter().map(|c| c.norm_sqr()).sum()
}

/// Integrate from `w0` and sample at `nt` uniform times on `[0, t0]`.
pub fn reference_stepper(
    w0: &ScalarField,
    cfg: &StepperConfig,
) -> Result<(Trajectory<ScalarField>, StepperDiagnostics)> {
    let grid = *w0.grid();
    grid.ensure_dim(2)?;
    if !w0.has_zero_mean() {
        return Err(LabError::CirculationObstruction { mean: w0.mean() });
    }
    if !(cfg.t0 > 0.0 && cfg.t0.is_finite()) || cfg.nt < 2 || cfg.nt_fine < 1 {
        return Err(LabError::Precondition(format!("bad stepper config {cfg:?}")));
    }
    let times = Trajectory::<ScalarField>::lattice(cfg.t0, cfg.nt);
    let interval = cfg.t0 / (cfg.nt - 1) as f64;
    let wv = grid.wavevectors();
    let scale = w0.max_abs().max(1e-300);

    let mut u: Vec<Complex64> = w0.spectrum().coeffs().to_vec();
    let mean0 = u[0].re;
    let mut fields = vec![w0.clone()];
    let mut steps = 0;
    let mut mean_drift: f64 = 0.0;
    let mut enstrophy_increase: f64 = 0.0;
    let base_sub = cfg.nt_fine.div_ceil(cfg.nt - 1).max(1);

    for _ in 1..cfg.nt {
        let vmax = max_speed(grid, &u)?;
        let cfl_sub = if vmax > 0.0 { (interval / (CFL * grid.h() / vmax)).ceil() as usize } else { 1 };
        let sub = base_sub.max(cfl_sub);
        let dt = interval / sub as f64;
        let e: Vec<f64> = wv.k2.iter().map(|k2| (-k2 * dt).exp()).collect();
        let eh: Vec<f64> = wv.k2.iter().map(|k2| (-k2 * dt * 0.5).exp()).collect();
        let ens_before = enstrophy(&u);
        for _ in 0..sub {
            let k1 = nonlinear(grid, &u)?;
            let uh: Vec<Complex64> = u.iter().zip(&eh).map(|(x, f)| x * f).collect();
            let k1h: Vec<Complex64> = k1.iter().zip(&eh).map(|(x, f)| x * f).collect();
            let k2 = nonlinear(grid, &add_scaled(&uh, &k1h, 0.5 * dt))?;
            let k3 = nonlinear(grid, &add_scaled(&uh, &k2, 0.5 * dt))?;
            let k3h: Vec<Complex64> = k3.iter().zip(&eh).map(|(x, f)| x * f).collect();
            let ue: Vec<Complex64> = u.iter().zip(&e).map(|(x, f)| x * f).collect();
            let k4 = nonlinear(grid, &add_scaled(&ue, &k3h, dt))?;
            for m in 0..u.len() {
                u[m] = ue[m] + (k1[m] * e[m] + (k2[m] + k3[m]) * (2.0 * eh[m]) + k4[m]) * (dt / 6.0);
            }
            steps += 1;
        }
        if u.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(LabError::Instability(format!("non-finite state after {steps} steps")));
        }
        mean_drift = mean_drift.max((u[0].re - mean0).abs() / scale);
        let ens_after = enstrophy(&u);
        if ens_before > 0.0 {
            enstrophy_increase = enstrophy_increase.max((ens_after - ens_before) / ens_before);
        }
        fields.push(Spectrum::from_coeffs(grid, u.clone())?.to_field());
    }
    let traj = Trajectory::new(times, fields)?;
    Ok((traj, StepperDiagnostics { steps, mean_drift, enstrophy_increase }))
}
