//! Velocity recovery from vorticity and the Leray projection.
//!
//! All multipliers use the derivative wavevector `kd` (Nyquist components
//! zeroed) in both the curl and the inverse Laplacian, so that
//! `curl(velocity(omega)) = omega` holds mode by mode. Modes with `kd = 0`
//! (the mean and pure-Nyquist modes) map to zero velocity.

use std::ops::Deref;

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::field::{ScalarField, Spectrum, VectorField, MEAN_TOLERANCE};
use crate::grid::Grid;

/// A vector field whose divergence vanishes to round-off.
#[derive(Debug, Clone, PartialEq)]
pub struct SolenoidalVectorField(VectorField);

impl SolenoidalVectorField {
    pub fn into_inner(self) -> VectorField {
        self.0
    }

    pub fn as_field(&self) -> &VectorField {
        &self.0
    }

    /// `||div u||_2 / ||u||_2` (0 for the zero field).
    pub fn relative_divergence(&self) -> f64 {
        relative_divergence(&self.0)
    }
}

impl Deref for SolenoidalVectorField {
    type Target = VectorField;
    fn deref(&self) -> &VectorField {
        &self.0
    }
}

pub fn relative_divergence(u: &VectorField) -> f64 {
    let norm = u.lp_norm(2.0).expect("p = 2 is valid");
    if norm == 0.0 {
        return 0.0;
    }
    u.divergence().lp_norm(2.0).expect("p = 2 is valid") / norm
}

fn check_mean(f: &ScalarField, scale: f64) -> Result<()> {
    let mean = f.spectrum().mean();
    if mean.abs() > MEAN_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
        return Err(LabError::CirculationObstruction { mean });
    }
    Ok(())
}

/// Spectral 2D Biot-Savart: `v_k = (i k2, -i k1) w_k / |k|^2`.
pub(crate) fn velocity_spectra_2d(omega: &Spectrum) -> [Spectrum; 2] {
    let grid = *omega.grid();
    let wv = grid.wavevectors();
    let mut v1 = Spectrum::zeros(grid);
    let mut v2 = Spectrum::zeros(grid);
    for (m, w) in omega.coeffs().iter().enumerate() {
        let kd2 = wv.kd2[m];
        if kd2 == 0.0 {
            continue;
        }
        let kd = wv.kd[m];
        v1.coeffs_mut()[m] = Complex64::new(0.0, kd[1] / kd2) * w;
        v2.coeffs_mut()[m] = Complex64::new(0.0, -kd[0] / kd2) * w;
    }
    [v1, v2]
}

/// Velocity of a mean-zero 2D vorticity on the torus.
pub fn velocity_from_vorticity_2d(omega: &ScalarField) -> Result<SolenoidalVectorField> {
    omega.grid().ensure_dim(2)?;
    check_mean(omega, omega.max_abs())?;
    Ok(SolenoidalVectorField(VectorField::from_spectra(&velocity_spectra_2d(omega.spectrum()))))
}

/// Velocity `(-Delta)^{-1} curl omega` of a mean-zero 3D vorticity.
pub fn velocity_from_vorticity_3d(omega: &VectorField) -> Result<SolenoidalVectorField> {
    let grid = *omega.grid();
    grid.ensure_dim(3)?;
    let scale = omega.max_abs();
    for c in omega.components() {
        check_mean(c, scale)?;
    }
    let wv = grid.wavevectors();
    let w: Vec<&[Complex64]> = omega.components().iter().map(|c| c.spectrum().coeffs()).collect();
    let mut out = [Spectrum::zeros(grid), Spectrum::zeros(grid), Spectrum::zeros(grid)];
    let i = Complex64::new(0.0, 1.0);
    for m in 0..grid.len() {
        let kd2 = wv.kd2[m];
        if kd2 == 0.0 {
            continue;
        }
        let k = wv.kd[m];
        let (a, b, c) = (w[0][m], w[1][m], w[2][m]);
        out[0].coeffs_mut()[m] = i * (k[1] * c - k[2] * b) / kd2;
        out[1].coeffs_mut()[m] = i * (k[2] * a - k[0] * c) / kd2;
        out[2].coeffs_mut()[m] = i * (k[0] * b - k[1] * a) / kd2;
    }
    Ok(SolenoidalVectorField(VectorField::from_spectra(&out)))
}

/// Orthogonal projection onto divergence-free fields:
/// `u_k - kd (kd . u_k) / |kd|^2`.
pub fn leray_project(u: &VectorField) -> SolenoidalVectorField {
    let grid: Grid = *u.grid();
    let wv = grid.wavevectors();
    let dim = grid.dim();
    let specs: Vec<&[Complex64]> = u.components().iter().map(|c| c.spectrum().coeffs()).collect();
    let mut out: Vec<Spectrum> = (0..dim).map(|_| Spectrum::zeros(grid)).collect();
    for m in 0..grid.len() {
        let k = wv.kd[m];
        let kd2 = wv.kd2[m];
        let proj = if kd2 == 0.0 {
            Complex64::default()
        } else {
            (0..dim).map(|a| specs[a][m] * k[a]).sum::<Complex64>() / kd2
        };
        for a in 0..dim {
            out[a].coeffs_mut()[m] = specs[a][m] - proj * k[a];
        }
    }
    SolenoidalVectorField(VectorField::from_spectra(&out))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn single_mode_2d() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let w = ScalarField::from_fn(g, |x| x[0].cos());
        let v = velocity_from_vorticity_2d(&w).unwrap();
        assert!(v.component(0).max_abs() < 1e-10);
        let expect = ScalarField::from_fn(g, |x| x[0].sin());
        assert!((v.component(1) - &expect).max_abs() < 1e-10);
        assert!(v.relative_divergence() < 1e-12);
    }

    #[test]
    fn zero_vorticity_zero_velocity() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let v = velocity_from_vorticity_2d(&ScalarField::zeros(g)).unwrap();
        assert_eq!(v.max_abs(), 0.0);
        let g3 = Grid::new(3, 8, 1.0).unwrap();
        let v3 = velocity_from_vorticity_3d(&VectorField::zeros(g3)).unwrap();
        assert_eq!(v3.max_abs(), 0.0);
    }

    #[test]
    fn rejects_circulation() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let w = ScalarField::constant(g, 0.5);
        assert!(matches!(velocity_from_vorticity_2d(&w), Err(LabError::CirculationObstruction { .. })));
        let g3 = Grid::new(3, 8, 1.0).unwrap();
        assert!(velocity_from_vorticity_2d(&ScalarField::zeros(g3)).is_err());
    }

    #[test]
    fn single_mode_3d() {
        let g = Grid::new(3, 16, 2.0 * PI).unwrap();
        let z = ScalarField::zeros(g);
        let w = VectorField::new(vec![z.clone(), z.clone(), ScalarField::from_fn(g, |x| x[0].cos())]).unwrap();
        let v = velocity_from_vorticity_3d(&w).unwrap();
        let expect = ScalarField::from_fn(g, |x| x[0].sin());
        assert!(v.component(0).max_abs() < 1e-10);
        assert!((v.component(1) - &expect).max_abs() < 1e-10);
        assert!(v.component(2).max_abs() < 1e-10);
    }

    #[test]
    fn leray_kills_gradients_and_fixes_solenoidal() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let f = ScalarField::from_fn(g, |x| (x[0] + 2.0 * x[1]).sin() + (3.0 * x[1]).cos());
        let grad = f.gradient();
        let p = leray_project(&grad);
        assert!(p.lp_norm(2.0).unwrap() <= 1e-10 * grad.lp_norm(2.0).unwrap());

        let w = ScalarField::from_fn(g, |x| x[0].cos() * (2.0 * x[1]).sin());
        let v = velocity_from_vorticity_2d(&w).unwrap().into_inner();
        let pv = leray_project(&v);
        assert!((pv.as_field() - &v).max_abs() <= 1e-12 * v.max_abs());
    }
}
