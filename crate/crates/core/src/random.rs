//! Seeded, band-limited random fields.
//!
//! Each sample is a trigonometric polynomial with modes `|m_a| <= k_max` whose
//! amplitudes follow `(1 + |k|^2)^{-beta/2}` and whose phases are drawn from a
//! ChaCha stream keyed by `(seed, sample index, component)`. Modes are visited
//! in a fixed order that does not depend on `n`, so the same spec sampled on
//! a finer grid yields the same continuum function.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::biot_savart::leray_project;
use crate::error::{LabError, Result};
use crate::field::{ScalarField, Spectrum, VectorField};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomFieldSpec {
    pub seed: u64,
    /// Spectral decay exponent.
    pub beta: f64,
    pub dim: usize,
    pub n: usize,
    pub box_length: f64,
    pub count: usize,
    /// Largest mode number per axis.
    pub k_max: usize,
}

impl RandomFieldSpec {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.n, self.box_length)
    }

    pub fn validate(&self) -> Result<Grid> {
        let grid = self.grid()?;
        if self.count < 1 {
            return Err(LabError::Precondition("count must be >= 1".into()));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(LabError::Precondition(format!("beta must be > 0, got {}", self.beta)));
        }
        if self.k_max < 1 || self.k_max >= self.n / 2 {
            return Err(LabError::Precondition(format!(
                "k_max must lie in [1, n/2), got {} for n = {}",
                self.k_max, self.n
            )));
        }
        Ok(grid)
    }

    /// Same family on a different resolution.
    pub fn with_n(&self, n: usize) -> Self {
        RandomFieldSpec { n, ..*self }
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One mean-zero, Hermitian-symmetric random field, normalized to unit
/// spectral `L^2` mass.
pub fn band_limited_scalar(grid: Grid, beta: f64, k_max: usize, rng: &mut impl Rng) -> ScalarField {
    let n = grid.n() as i64;
    let dim = grid.dim();
    let km = k_max as i64;
    let mut spec = Spectrum::zeros(grid);
    let index_of = |m: &[i64; 3]| -> usize { (0..dim).map(|a| (m[a].rem_euclid(n)) as usize * grid.stride(a)).sum() };
    let mut mass = 0.0;
    let mut m = [0i64; 3];
    let extent = if dim == 2 { [km, km, 0] } else { [km, km, km] };
    for m0 in -extent[0]..=extent[0] {
        for m1 in -extent[1]..=extent[1] {
            for m2 in -extent[2]..=extent[2] {
                m[0] = m0;
                m[1] = m1;
                m[2] = m2;
                // representative of each +/- pair: first nonzero entry positive
                let first = m.iter().take(dim).copied().find(|&x| x != 0);
                match first {
                    Some(x) if x > 0 => {}
                    _ => continue,
                }
                let k2: f64 = m.iter().take(dim).map(|&x| (2.0 * PI * x as f64 / grid.box_length()).powi(2)).sum();
                let amp = (1.0 + k2).powf(-beta / 2.0);
                let phase = rng.random::<f64>() * 2.0 * PI;
                let c = Complex64::from_polar(amp, phase);
                let neg = [-m[0], -m[1], -m[2]];
                spec.coeffs_mut()[index_of(&m)] = c;
                spec.coeffs_mut()[index_of(&neg)] = c.conj();
                mass += 2.0 * amp * amp;
            }
        }
    }
    let scale = 1.0 / mass.sqrt();
    for c in spec.coeffs_mut() {
        *c *= scale;
    }
    spec.to_field()
}

/// Sample `index` of a 2D scalar family.
pub fn scalar_sample(spec: &RandomFieldSpec, index: usize) -> Result<ScalarField> {
    let grid = spec.validate()?;
    let mut rng = stream_rng(spec.seed, index as u64);
    Ok(band_limited_scalar(grid, spec.beta, spec.k_max, &mut rng))
}

/// Sample `index` of a solenoidal vector family (Leray projection of
/// independent random components).
pub fn solenoidal_sample(spec: &RandomFieldSpec, index: usize) -> Result<VectorField> {
    let grid = spec.validate()?;
    let comps = (0..grid.dim())
        .map(|a| {
            let mut rng = stream_rng(spec.seed, (index * grid.dim() + a) as u64 + (1 << 32));
            band_limited_scalar(grid, spec.beta, spec.k_max, &mut rng)
        })
        .collect();
    Ok(leray_project(&VectorField::new(comps)?).into_inner())
}

/// The whole family: scalar fields in 2D, solenoidal vector fields in 3D.
pub enum Family {
    Scalar(Vec<ScalarField>),
    Vector(Vec<VectorField>),
}

pub fn random_family(spec: &RandomFieldSpec) -> Result<Family> {
    spec.validate()?;
    let idx: Vec<usize> = (0..spec.count).collect();
    if spec.dim == 2 {
        let out = crate::par::map_ordered(&idx, |&i| scalar_sample(spec, i));
        Ok(Family::Scalar(out.into_iter().collect::<Result<_>>()?))
    } else {
        let out = crate::par::map_ordered(&idx, |&i| solenoidal_sample(spec, i));
        Ok(Family::Vector(out.into_iter().collect::<Result<_>>()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biot_savart::relative_divergence;

    fn spec(dim: usize, n: usize) -> RandomFieldSpec {
        RandomFieldSpec { seed: 11, beta: 2.0, dim, n, box_length: 2.0 * PI, count: 3, k_max: 5 }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = scalar_sample(&spec(2, 32), 1).unwrap();
        let b = scalar_sample(&spec(2, 32), 1).unwrap();
        assert_eq!(a.samples(), b.samples());
        let c = scalar_sample(&spec(2, 32), 2).unwrap();
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn mean_zero_and_real() {
        let f = scalar_sample(&spec(2, 32), 0).unwrap();
        assert!(f.mean().abs() < 1e-15);
        assert!(f.spectrum().hermitian_defect() < 1e-14);
    }

    #[test]
    fn same_function_across_resolutions() {
        let coarse = scalar_sample(&spec(2, 16), 0).unwrap();
        let fine = scalar_sample(&spec(2, 32), 0).unwrap();
        let g = *coarse.grid();
        for flat in 0..g.len() {
            let idx = g.unravel(flat);
            let ff = 2 * idx[0] * fine.grid().stride(0) + 2 * idx[1];
            assert!((coarse.samples()[flat] - fine.samples()[ff]).abs() < 1e-13);
        }
    }

    #[test]
    fn solenoidal_3d() {
        let v = solenoidal_sample(&spec(3, 16), 0).unwrap();
        assert!(relative_divergence(&v) <= 1e-10);
        for c in v.components() {
            assert!(c.mean().abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_spec() {
        let mut s = spec(2, 16);
        s.k_max = 8;
        assert!(s.validate().is_err());
        s.k_max = 3;
        s.beta = 0.0;
        assert!(s.validate().is_err());
        s.beta = 1.0;
        s.count = 0;
        assert!(s.validate().is_err());
    }
}
