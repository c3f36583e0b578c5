//! Browser bindings: an Oseen velocity profile, a Picard run on a vortex
//! dipole, and the Strichartz exponent check.
//!
//! The plain functions do the work and are tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use std::f64::consts::PI;

use serde_json::json;
use spectral_lab::biot_savart::velocity_from_vorticity_2d;
use spectral_lab::mild::{picard_solve, MildSolveConfig, PicardTrace};
use spectral_lab::oseen::{azimuthal_speed, dipole_centers, oseen_dipole};
use spectral_lab::wave::{strichartz_admissible, StrichartzExponents};
use spectral_lab::{Grid, LabError, ScalarField};
use wasm_bindgen::prelude::*;

type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub r: Vec<f64>,
    /// Azimuthal speed from the spectral Biot-Savart inverse.
    pub spectral: Vec<f64>,
    /// Plane superposition of the two vortices.
    pub plane: Vec<f64>,
    /// The lone vortex.
    pub single: Vec<f64>,
}

/// Speed along the ray `x2 > c2` from the positive core of a dipole with
/// separation `L/2` on `[0, 2 pi)^2`.
pub fn velocity_profile(alpha0: f64, t: f64, n: usize) -> Result<Profile> {
    if n % 4 != 0 {
        return Err(LabError::Precondition(format!("n must be a multiple of 4, got {n}")));
    }
    let grid = Grid::new(2, n, 2.0 * PI)?;
    let d = grid.box_length() / 2.0;
    let w = oseen_dipole(alpha0, d, &grid, t)?;
    let v = velocity_from_vorticity_2d(&w)?.into_inner();
    let [c1, _] = dipole_centers(&grid, d);
    let (i0, j0) = ((c1[0] / grid.h()).round() as usize, (c1[1] / grid.h()).round() as usize);
    let mut p = Profile { r: vec![], spectral: vec![], plane: vec![], single: vec![] };
    for step in 1..=n / 8 {
        let r = step as f64 * grid.h();
        let flat = i0 * grid.stride(0) + (j0 + step) * grid.stride(1);
        // e_theta = (-1, 0) on this ray; the partner at distance hypot(d, r)
        let partner = azimuthal_speed(-alpha0, t, d.hypot(r)) * r / d.hypot(r);
        p.r.push(r);
        p.spectral.push(-v.component(0).samples()[flat]);
        p.single.push(azimuthal_speed(alpha0, t, r));
        p.plane.push(azimuthal_speed(alpha0, t, r) - partner);
    }
    Ok(p)
}

#[derive(Debug, Clone)]
pub struct Run {
    pub n: usize,
    pub initial: ScalarField,
    pub last: ScalarField,
    pub trace: PicardTrace,
}

/// Picard solve from an Oseen dipole at `t_init = 0.02`, separation 2.
pub fn run_picard(alpha0: f64, n: usize, t0: f64) -> Result<Run> {
    let grid = Grid::new(2, n, 2.0 * PI)?;
    let w0 = oseen_dipole(alpha0, 2.0, &grid, 0.02)?;
    let cfg = MildSolveConfig { t0, nt: 9, quad_m: 32, tol: 1e-9, max_iter: 40, nonlinear: true };
    let (traj, trace) = picard_solve(&w0, &cfg)?;
    Ok(Run { n, last: traj.last().clone(), initial: w0, trace })
}

pub fn summary(trace: &PicardTrace) -> serde_json::Value {
    json!({
        "a0": trace.a0,
        "t0": trace.t0,
        "converged": trace.converged,
        "iterations": trace.iterations.len(),
        "differences": trace.iterations.iter().map(|i| i.difference_sup_w11).collect::<Vec<_>>(),
        "ratios": trace.iterations.iter().filter_map(|i| i.ratio).collect::<Vec<_>>(),
        "sup_linf_v": trace.sup_of("Linf_v"),
        "sup_w11": trace.sup_of("W11"),
    })
}

pub fn check_exponents(q: f64, r: f64, qt: f64, s: f64, k: f64) -> serde_json::Value {
    let v = strichartz_admissible(&StrichartzExponents::new(q, r, qt, s, k));
    json!({ "admissible": v.admissible, "violations": v.violations })
}

fn js(e: LabError) -> JsError {
    JsError::new(&e.to_string())
}

/// JSON `{r, spectral, plane, single}`.
#[wasm_bindgen(js_name = oseenProfile)]
pub fn oseen_profile(alpha0: f64, t: f64, n: usize) -> std::result::Result<String, JsError> {
    let p = velocity_profile(alpha0, t, n).map_err(js)?;
    Ok(json!({ "r": p.r, "spectral": p.spectral, "plane": p.plane, "single": p.single }).to_string())
}

#[wasm_bindgen]
pub struct PicardRun(Run);

#[wasm_bindgen]
impl PicardRun {
    #[wasm_bindgen(constructor)]
    pub fn new(alpha0: f64, n: usize, t0: f64) -> std::result::Result<PicardRun, JsError> {
        run_picard(alpha0, n, t0).map(PicardRun).map_err(js)
    }

    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.0.n
    }

    /// Row-major samples, `x1` slowest.
    pub fn initial(&self) -> Vec<f64> {
        self.0.initial.samples().to_vec()
    }

    pub fn last(&self) -> Vec<f64> {
        self.0.last.samples().to_vec()
    }

    pub fn summary(&self) -> String {
        summary(&self.0.trace).to_string()
    }
}

/// JSON `{admissible, violations}`; pass `Infinity` for infinite exponents.
#[wasm_bindgen(js_name = strichartzCheck)]
pub fn strichartz_check(q: f64, r: f64, qt: f64, s: f64, k: f64) -> String {
    check_exponents(q, r, qt, s, k).to_string()
}
