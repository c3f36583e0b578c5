//! Lamb-Oseen vortex: closed forms, dipole initial data and the `t^{-1/2}`
//! scaling of its velocity and `W^{1,1}` norms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::stats::{fit_log_log, LineFit};

/// `|| |grad w| ||_{L^1} sqrt(t) / alpha0 = sqrt(pi) / 2`.
pub const GRAD_L1_PREFACTOR: f64 = 0.886_226_925_452_758;

/// Maximizer of `(1 - e^{-u}) / sqrt(u)`, the root of `e^u = 1 + 2u`.
pub fn velocity_peak_u() -> f64 {
    let mut u: f64 = 1.25;
    for _ in 0..50 {
        let f = u.exp() - 1.0 - 2.0 * u;
        let df = u.exp() - 2.0;
        let step = f / df;
        u -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    u
}

/// `||v||_inf sqrt(t) / alpha0 = max_u (1 - e^{-u}) / sqrt(u) / (4 pi)`.
pub fn velocity_prefactor() -> f64 {
    let u = velocity_peak_u();
    (1.0 - (-u).exp()) / u.sqrt() / (4.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OseenParams {
    /// Total circulation.
    pub alpha0: f64,
    pub center: [f64; 2],
    pub t: f64,
}

impl OseenParams {
    fn check(&self, grid: &Grid) -> Result<()> {
        grid.ensure_dim(2)?;
        if !(self.t > 0.0) {
            return Err(LabError::Precondition(format!("Oseen time must be > 0, got {}", self.t)));
        }
        let l = grid.box_length();
        if self.center.iter().any(|c| !(0.0..l).contains(c)) {
            return Err(LabError::Precondition("vortex center outside the box".into()));
        }
        if (4.0 * self.t).sqrt() > l / 16.0 {
            return Err(LabError::Precondition(format!(
                "vortex too wide for box: sqrt(4t) = {:.4e} > L/16 = {:.4e}",
                (4.0 * self.t).sqrt(),
                l / 16.0
            )));
        }
        Ok(())
    }

    fn displacement(&self, grid: &Grid, x: [f64; 3]) -> (f64, f64) {
        let d = grid.min_image(x, [self.center[0], self.center[1], 0.0]);
        (d[0], d[1])
    }
}

/// `alpha0 / (4 pi t) exp(-|x|^2 / 4t)` about the center (minimum image).
pub fn oseen_vorticity(p: &OseenParams, grid: &Grid) -> Result<ScalarField> {
    p.check(grid)?;
    let amp = p.alpha0 / (4.0 * PI * p.t);
    Ok(ScalarField::from_fn(*grid, |x| {
        let (dx, dy) = p.displacement(grid, x);
        amp * (-(dx * dx + dy * dy) / (4.0 * p.t)).exp()
    }))
}

/// Plane azimuthal speed `alpha0 / (2 pi r) (1 - e^{-r^2/4t})`.
pub fn azimuthal_speed(alpha0: f64, t: f64, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    alpha0 / (2.0 * PI * r) * (-(-r * r / (4.0 * t)).exp_m1())
}

/// Closed-form plane velocity; zero at the center.
pub fn oseen_velocity(p: &OseenParams, grid: &Grid) -> Result<VectorField> {
    p.check(grid)?;
    Ok(VectorField::from_fn(*grid, |x| {
        let (dx, dy) = p.displacement(grid, x);
        let r2 = dx * dx + dy * dy;
        if r2 == 0.0 {
            return [0.0; 3];
        }
        let s = azimuthal_speed(p.alpha0, p.t, r2.sqrt()) / r2.sqrt();
        [-dy * s, dx * s, 0.0]
    }))
}

/// Centers `(L/2 -+ d/2, L/2)` of the positive and negative dipole vortices.
pub fn dipole_centers(grid: &Grid, separation: f64) -> [[f64; 2]; 2] {
    let c = grid.box_length() / 2.0;
    [[c - separation / 2.0, c], [c + separation / 2.0, c]]
}

/// `+alpha0` and `-alpha0` Oseen vortices separated by `d` along `x_1`.
pub fn oseen_dipole(alpha0: f64, separation: f64, grid: &Grid, t: f64) -> Result<ScalarField> {
    grid.ensure_dim(2)?;
    let width = (4.0 * t).sqrt();
    if separation < 4.0 * width {
        return Err(LabError::Precondition(format!(
            "dipole cores overlap: d = {separation:.4e} < 4 sqrt(4t) = {:.4e}",
            4.0 * width
        )));
    }
    if separation > grid.box_length() / 2.0 {
        return Err(LabError::Precondition(format!(
            "dipole separation {separation:.4e} exceeds L/2 = {:.4e}",
            grid.box_length() / 2.0
        )));
    }
    let [c1, c2] = dipole_centers(grid, separation);
    let plus = oseen_vorticity(&OseenParams { alpha0, center: c1, t }, grid)?;
    let minus = oseen_vorticity(&OseenParams { alpha0, center: c2, t }, grid)?;
    Ok(&plus - &minus)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRow {
    pub t: f64,
    pub l1: f64,
    pub grad_l1: f64,
    pub w11: f64,
    pub linf_v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub alpha0: f64,
    pub rows: Vec<SharpnessRow>,
    pub w11_fit: LineFit,
    pub linf_v_fit: LineFit,
    /// Geometric mean of `grad_l1 sqrt(t) / alpha0` over the t-list.
    pub grad_l1_prefactor: f64,
    /// Geometric mean of `linf_v sqrt(t) / alpha0` over the t-list.
    pub linf_v_prefactor: f64,
}

/// Tabulate `||w||_{W11}` and `||v||_inf` of a single vortex centered in the
/// box for each `t`, and fit log-log slopes.
pub fn sharpness_scaling_experiment(grid: &Grid, alpha0: f64, t_list: &[f64]) -> Result<SharpnessReport> {
    grid.ensure_dim(2)?;
    if t_list.len() < 2 {
        return Err(LabError::Precondition("need at least two times".into()));
    }
    let c = grid.box_length() / 2.0;
    let rows = crate::par::map_ordered(t_list, |&t| -> Result<SharpnessRow> {
        let p = OseenParams { alpha0, center: [c, c], t };
        let w = oseen_vorticity(&p, grid)?;
        let l1 = w.lp_norm(1.0)?;
        let grad_l1 = w.gradient().lp_norm(1.0)?;
        let linf_v = oseen_velocity(&p, grid)?.lp_norm(f64::INFINITY)?;
        Ok(SharpnessRow { t, l1, grad_l1, w11: l1 + grad_l1, linf_v })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let w11: Vec<f64> = rows.iter().map(|r| r.w11).collect();
    let vinf: Vec<f64> = rows.iter().map(|r| r.linf_v).collect();
    let geo = |f: &dyn Fn(&SharpnessRow) -> f64| {
        (rows.iter().map(|r| (f(r) * r.t.sqrt() / alpha0.abs()).ln()).sum::<f64>() / rows.len() as f64).exp()
    };
    Ok(SharpnessReport {
        alpha0,
        w11_fit: fit_log_log(&ts, &w11)?,
        linf_v_fit: fit_log_log(&ts, &vinf)?,
        grad_l1_prefactor: geo(&|r| r.grad_l1),
        linf_v_prefactor: geo(&|r| r.linf_v),
        rows,
    })
}

/// `count` log-spaced times spanning two decades and ending at the widest
/// vortex the box admits, `sqrt(4 t) = L/16`.
pub fn two_decade_times(box_length: f64, count: usize) -> Vec<f64> {
    let t_max = (box_length / 16.0).powi(2) / 4.0;
    let t_min = t_max / 100.0;
    (0..count).map(|i| t_min * (t_max / t_min).powf(i as f64 / (count - 1).max(1) as f64)).collect()
}
