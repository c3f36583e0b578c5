//! Periodic scalar and vector fields, spectral calculus and discrete norms.
//!
//! Norms integrate against the physical cell measure `h^dim`, so they converge
//! to the continuum integrals under refinement. Vector and tensor fields use
//! the pointwise Euclidean (Frobenius) magnitude.

use std::collections::BTreeMap;
use std::ops::{Add, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fft;
use crate::grid::Grid;

/// Relative size below which a field mean counts as zero.
pub const MEAN_TOLERANCE: f64 = 1e-10;

/// Fourier coefficients of a real field, normalized so that the zero mode is
/// the lattice mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: Grid) -> Self {
        Spectrum { grid, coeffs: vec![Complex64::default(); grid.len()] }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(LabError::GridMismatch(format!(
                "{} coefficients for a lattice of {} points",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Spectrum { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Inverse transform back to physical samples.
    pub fn to_field(&self) -> ScalarField {
        self.clone().into_field()
    }

    /// Inverse transform that keeps `self` as the field's cached spectrum.
    pub fn into_field(self) -> ScalarField {
        let samples = fft::inverse_real(&self.grid, &self.coeffs);
        ScalarField { grid: self.grid, samples, spectrum: OnceLock::from(self) }
    }

    /// Multiply every coefficient by a real multiplier of the wavevector index.
    pub fn scaled_by(&self, mut mult: impl FnMut(usize) -> f64) -> Spectrum {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| c * mult(i)).collect();
        Spectrum { grid: self.grid, coeffs }
    }

    /// Largest deviation from Hermitian symmetry `c(-k) = conj(c(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let n = g.n();
        let mut worst: f64 = 0.0;
        for flat in 0..g.len() {
            let idx = g.unravel(flat);
            let mirror: usize = (0..g.dim()).map(|a| ((n - idx[a]) % n) * g.stride(a)).sum();
            worst = worst.max((self.coeffs[flat] - self.coeffs[mirror].conj()).norm());
        }
        worst
    }
}

/// Real samples of a scalar field on a periodic lattice.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Grid,
    samples: Vec<f64>,
    spectrum: OnceLock<Spectrum>,
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.samples == other.samples
    }
}

impl ScalarField {
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(LabError::GridMismatch(format!(
                "{} samples for a lattice of {} points",
                samples.len(),
                grid.len()
            )));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(LabError::Divergence(format!("non-finite sample at index {i}")));
        }
        Ok(ScalarField { grid, samples, spectrum: OnceLock::new() })
    }

    pub(crate) fn from_samples_unchecked(grid: Grid, samples: Vec<f64>) -> Self {
        ScalarField { grid, samples, spectrum: OnceLock::new() }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        ScalarField { grid, samples: vec![value; grid.len()], spectrum: OnceLock::new() }
    }

    /// Sample a function of the physical position `x` (unused axes are 0).
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let samples = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        ScalarField { grid, samples, spectrum: OnceLock::new() }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Whether the mean vanishes relative to the sup norm.
    pub fn has_zero_mean(&self) -> bool {
        self.spectrum().mean().abs() <= MEAN_TOLERANCE * self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// Forward transform, computed once and cached.
    pub fn spectrum(&self) -> &Spectrum {
        self.spectrum.get_or_init(|| Spectrum { grid: self.grid, coeffs: fft::forward_real(&self.grid, &self.samples) })
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        let samples = self.samples.iter().map(|x| c * x).collect();
        ScalarField { grid: self.grid, samples, spectrum: OnceLock::new() }
    }

    /// Pointwise combination with a field on the same grid.
    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
        self.grid.ensure_same(&other.grid)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect();
        Ok(ScalarField { grid: self.grid, samples, spectrum: OnceLock::new() })
    }

    /// Periodic translation by whole lattice cells.
    pub fn shift(&self, cells: [i64; 3]) -> ScalarField {
        let g = self.grid;
        let n = g.n() as i64;
        let mut out = vec![0.0; g.len()];
        for (flat, &v) in self.samples.iter().enumerate() {
            let idx = g.unravel(flat);
            let dst: usize =
                (0..g.dim()).map(|a| ((idx[a] as i64 + cells[a]).rem_euclid(n)) as usize * g.stride(a)).sum();
            out[dst] = v;
        }
        ScalarField { grid: g, samples: out, spectrum: OnceLock::new() }
    }

    /// Spectral derivative along `axis` (Nyquist mode dropped).
    pub fn derivative(&self, axis: usize) -> Result<ScalarField> {
        if axis >= self.grid.dim() {
            return Err(LabError::Precondition(format!("axis {axis} out of range for a {}D field", self.grid.dim())));
        }
        let wv = self.grid.wavevectors();
        let coeffs =
            self.spectrum().coeffs.iter().zip(&wv.kd).map(|(c, kd)| c * Complex64::new(0.0, kd[axis])).collect();
        Ok(Spectrum { grid: self.grid, coeffs }.to_field())
    }

    pub fn gradient(&self) -> VectorField {
        let components = (0..self.grid.dim()).map(|a| self.derivative(a).expect("axis within dim")).collect();
        VectorField { grid: self.grid, components }
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_of_magnitudes(self.samples.iter().map(|x| x.abs()), p, self.grid.cell_volume())
    }

    /// Homogeneous Sobolev norm `(L^dim sum_k |k|^{2s} |c_k|^2)^{1/2}`.
    ///
    /// The zero mode is included only for `s = 0`; for `s < 0` the mean
    /// must vanish.
    pub fn hs_norm(&self, s: f64) -> Result<f64> {
        Ok(spectral_energy(self.spectrum(), s, self.max_abs())?.sqrt())
    }

    /// `||f||_{L^1} + || |grad f| ||_{L^1}` for a 2D field.
    pub fn w11_norm(&self) -> Result<f64> {
        self.grid.ensure_dim(2)?;
        Ok(self.lp_norm(1.0)? + self.gradient().lp_norm(1.0)?)
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.zip_with(rhs, |a, b| a + b).expect("fields on different grids")
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.zip_with(rhs, |a, b| a - b).expect("fields on different grids")
    }
}

fn spectral_energy(spec: &Spectrum, s: f64, scale: f64) -> Result<f64> {
    let grid = spec.grid;
    let mean = spec.mean();
    if s < 0.0 && mean.abs() > MEAN_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
        return Err(LabError::NonzeroMean { mean, s });
    }
    let acc: f64 = if s == 0.0 {
        spec.coeffs.iter().map(|c| c.norm_sqr()).sum()
    } else {
        let weights = grid.sobolev_weights(s);
        spec.coeffs.iter().zip(weights.iter()).map(|(c, w)| w * c.norm_sqr()).sum()
    };
    Ok(acc * grid.volume())
}

/// `(sum |m|^p dV)^{1/p}` over pointwise magnitudes, or their max for `p = inf`.
pub(crate) fn lp_of_magnitudes(mags: impl Iterator<Item = f64> + Clone, p: f64, cell_volume: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(LabError::InvalidExponent(p));
    }
    if p.is_infinite() {
        return Ok(mags.fold(0.0, f64::max));
    }
    if p == 1.0 {
        return Ok(mags.sum::<f64>() * cell_volume);
    }
    if p == 2.0 {
        return Ok((mags.map(|m| m * m).sum::<f64>() * cell_volume).sqrt());
    }
    let peak = mags.clone().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = mags.map(|m| (m / peak).powf(p)).sum();
    Ok(peak * (sum * cell_volume).powf(1.0 / p))
}

/// A `dim`-component vector field; all components share one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let grid =
            *components.first().ok_or_else(|| LabError::Precondition("vector field needs components".into()))?.grid();
        if components.len() != grid.dim() {
            return Err(LabError::WrongDimension { expected: grid.dim(), found: components.len() });
        }
        for c in &components[1..] {
            grid.ensure_same(c.grid())?;
        }
        Ok(VectorField { grid, components })
    }

    pub fn zeros(grid: Grid) -> Self {
        VectorField { grid, components: vec![ScalarField::zeros(grid); grid.dim()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut comps = vec![Vec::with_capacity(grid.len()); grid.dim()];
        for i in 0..grid.len() {
            let v = f(grid.position(i));
            for (a, c) in comps.iter_mut().enumerate() {
                c.push(v[a]);
            }
        }
        let components = comps.into_iter().map(|s| ScalarField::from_samples_unchecked(grid, s)).collect();
        VectorField { grid, components }
    }

    pub(crate) fn from_spectra(spectra: &[Spectrum]) -> Self {
        Self::from_owned_spectra(spectra.to_vec())
    }

    /// Components synthesized two at a time, keeping each spectrum cached.
    pub(crate) fn from_owned_spectra(spectra: Vec<Spectrum>) -> Self {
        let grid = spectra[0].grid;
        let mut components = Vec::with_capacity(spectra.len());
        let mut rest = spectra.into_iter();
        while let Some(a) = rest.next() {
            match rest.next() {
                Some(b) => {
                    let (x, y) = fft::inverse_real_pair(&grid, &a.coeffs, &b.coeffs);
                    components.push(ScalarField { grid, samples: x, spectrum: OnceLock::from(a) });
                    components.push(ScalarField { grid, samples: y, spectrum: OnceLock::from(b) });
                }
                None => components.push(a.into_field()),
            }
        }
        VectorField { grid, components }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &ScalarField {
        &self.components[axis]
    }

    pub fn into_components(self) -> Vec<ScalarField> {
        self.components
    }

    pub fn scale(&self, c: f64) -> VectorField {
        VectorField { grid: self.grid, components: self.components.iter().map(|f| f.scale(c)).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(ScalarField::max_abs).fold(0.0, f64::max)
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.components.iter().map(|c| c.samples[i] * c.samples[i]).sum::<f64>().sqrt())
            .collect()
    }

    pub fn divergence(&self) -> ScalarField {
        let wv = self.grid.wavevectors();
        let mut acc = vec![Complex64::default(); self.grid.len()];
        for (a, comp) in self.components.iter().enumerate() {
            for ((o, c), kd) in acc.iter_mut().zip(&comp.spectrum().coeffs).zip(&wv.kd) {
                *o += c * Complex64::new(0.0, kd[a]);
            }
        }
        Spectrum { grid: self.grid, coeffs: acc }.to_field()
    }

    /// Scalar curl `d1 u2 - d2 u1` of a 2D field.
    pub fn curl_2d(&self) -> Result<ScalarField> {
        self.grid.ensure_dim(2)?;
        let wv = self.grid.wavevectors();
        let u1 = &self.components[0].spectrum().coeffs;
        let u2 = &self.components[1].spectrum().coeffs;
        let coeffs = (0..self.grid.len())
            .map(|i| {
                let kd = wv.kd[i];
                Complex64::new(0.0, kd[0]) * u2[i] - Complex64::new(0.0, kd[1]) * u1[i]
            })
            .collect();
        Ok(Spectrum { grid: self.grid, coeffs }.to_field())
    }

    /// Curl of a 3D field.
    pub fn curl(&self) -> Result<VectorField> {
        self.grid.ensure_dim(3)?;
        let spectra: Vec<Spectrum> = self.components.iter().map(|c| c.spectrum().clone()).collect();
        Ok(VectorField::from_spectra(&curl_spectra(&spectra)))
    }

    /// Gradient tensor with rows `grad u_a`.
    pub fn gradient_tensor(&self) -> GradientTensor {
        GradientTensor { grid: self.grid, rows: self.components.iter().map(ScalarField::gradient).collect() }
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        let mags = self.magnitude();
        lp_of_magnitudes(mags.iter().copied(), p, self.grid.cell_volume())
    }

    /// Homogeneous Sobolev norm summed over components.
    pub fn hs_norm(&self, s: f64) -> Result<f64> {
        let scale = self.max_abs();
        let mut acc = 0.0;
        for c in &self.components {
            acc += spectral_energy(c.spectrum(), s, scale)?;
        }
        Ok(acc.sqrt())
    }

    pub fn zip_with(&self, other: &VectorField, f: impl Fn(f64, f64) -> f64 + Copy) -> Result<VectorField> {
        self.grid.ensure_same(&other.grid)?;
        let components =
            self.components.iter().zip(&other.components).map(|(a, b)| a.zip_with(b, f)).collect::<Result<Vec<_>>>()?;
        Ok(VectorField { grid: self.grid, components })
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        self.zip_with(rhs, |a, b| a + b).expect("fields on different grids")
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        self.zip_with(rhs, |a, b| a - b).expect("fields on different grids")
    }
}

pub(crate) fn curl_spectra(u: &[Spectrum]) -> Vec<Spectrum> {
    let grid = u[0].grid;
    let wv = grid.wavevectors();
    let len = grid.len();
    let mut out = vec![Spectrum::zeros(grid), Spectrum::zeros(grid), Spectrum::zeros(grid)];
    let i = Complex64::new(0.0, 1.0);
    for m in 0..len {
        let k = wv.kd[m];
        let (a, b, c) = (u[0].coeffs[m], u[1].coeffs[m], u[2].coeffs[m]);
        out[0].coeffs[m] = i * (k[1] * c - k[2] * b);
        out[1].coeffs[m] = i * (k[2] * a - k[0] * c);
        out[2].coeffs[m] = i * (k[0] * b - k[1] * a);
    }
    out
}

/// Spatial gradient of a vector field; row `a` is `grad u_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientTensor {
    grid: Grid,
    rows: Vec<VectorField>,
}

impl GradientTensor {
    pub fn rows(&self) -> &[VectorField] {
        &self.rows
    }

    /// Pointwise Frobenius magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.grid.len()];
        for row in &self.rows {
            for comp in row.components() {
                for (a, x) in acc.iter_mut().zip(comp.samples()) {
                    *a += x * x;
                }
            }
        }
        acc.into_iter().map(f64::sqrt).collect()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        let mags = self.magnitude();
        lp_of_magnitudes(mags.iter().copied(), p, self.grid.cell_volume())
    }
}

/// Zero every mode with `|m| > n/3` on some axis (2/3 rule).
pub(crate) fn dealias(spec: &mut Spectrum) {
    let g = spec.grid;
    let cutoff = (g.n() / 3) as i64;
    for (flat, c) in spec.coeffs.iter_mut().enumerate() {
        let idx = g.unravel(flat);
        if (0..g.dim()).any(|a| g.mode(idx[a]).abs() > cutoff) {
            *c = Complex64::default();
        }
    }
}

/// Named, nonnegative, finite norm values of one field or trajectory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    values: BTreeMap<String, f64>,
}

impl NormReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: impl Into<String>, value: f64) -> Result<()> {
        let label = label.into();
        if !(value.is_finite() && value >= 0.0) {
            return Err(LabError::Divergence(format!("norm {label} = {value}")));
        }
        self.values.insert(label, value);
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.values.get(label).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Standard scalar-field bundle: `L1`, `L2`, `Linf`, `W11` (2D only).
    pub fn of_scalar(f: &ScalarField) -> Result<Self> {
        let mut r = NormReport::new();
        r.insert("L1", f.lp_norm(1.0)?)?;
        r.insert("L2", f.lp_norm(2.0)?)?;
        r.insert("Linf", f.lp_norm(f64::INFINITY)?)?;
        if f.grid().dim() == 2 {
            r.insert("W11", f.w11_norm()?)?;
        }
        Ok(r)
    }
}

/// Common surface of scalar and vector fields used by trajectories.
pub trait Field: Clone {
    fn grid(&self) -> &Grid;
    fn lp_norm(&self, p: f64) -> Result<f64>;
    fn hs_norm(&self, s: f64) -> Result<f64>;
}

impl Field for ScalarField {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn lp_norm(&self, p: f64) -> Result<f64> {
        ScalarField::lp_norm(self, p)
    }
    fn hs_norm(&self, s: f64) -> Result<f64> {
        ScalarField::hs_norm(self, s)
    }
}

impl Field for VectorField {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn lp_norm(&self, p: f64) -> Result<f64> {
        VectorField::lp_norm(self, p)
    }
    fn hs_norm(&self, s: f64) -> Result<f64> {
        VectorField::hs_norm(self, s)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn torus2(n: usize) -> Grid {
        Grid::new(2, n, 2.0 * PI).unwrap()
    }

    fn smooth(grid: Grid) -> ScalarField {
        ScalarField::from_fn(grid, |x| (x[0]).sin() * (2.0 * x[1]).cos() + 0.3 * (3.0 * x[0] - x[1]).cos() + 0.7)
    }

    #[test]
    fn zero_field_has_zero_spectrum() {
        let f = ScalarField::zeros(torus2(16));
        assert!(f.spectrum().coeffs().iter().all(|c| c.norm() == 0.0));
        assert_eq!(f.spectrum().to_field().max_abs(), 0.0);
    }

    #[test]
    fn single_cosine_has_two_modes() {
        let g = torus2(16);
        let f = ScalarField::from_fn(g, |x| x[0].cos());
        let nonzero: Vec<usize> =
            f.spectrum().coeffs().iter().enumerate().filter(|(_, c)| c.norm() > 1e-12).map(|(i, _)| i).collect();
        assert_eq!(nonzero.len(), 2);
        for i in nonzero {
            let idx = g.unravel(i);
            assert_eq!(g.mode(idx[0]).abs(), 1);
            assert_eq!(idx[1], 0);
            assert!((f.spectrum().coeffs()[i].re - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn roundtrip_and_hermitian() {
        let f = smooth(torus2(32));
        let back = f.spectrum().to_field();
        let err = f.samples().iter().zip(back.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-12 * f.max_abs());
        assert!(f.spectrum().hermitian_defect() < 1e-14);
    }

    #[test]
    fn derivative_of_sine() {
        let l = 3.0;
        let g = Grid::new(2, 32, l).unwrap();
        let k = 2.0 * PI / l;
        let f = ScalarField::from_fn(g, |x| (k * x[0]).sin());
        let d = f.derivative(0).unwrap();
        let expect = ScalarField::from_fn(g, |x| k * (k * x[0]).cos());
        assert!((&d - &expect).max_abs() < 1e-10);
        assert!(f.derivative(2).is_err());
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let f = ScalarField::constant(torus2(16), 4.2);
        assert!(f.gradient().max_abs() < 1e-14);
    }

    #[test]
    fn nyquist_derivative_is_zero() {
        let g = torus2(16);
        let f = ScalarField::from_fn(g, |x| (8.0 * x[0]).cos());
        assert!(f.derivative(0).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn curl_of_gradient_vanishes() {
        let f = smooth(torus2(32));
        assert!(f.gradient().curl_2d().unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn norms_of_constants_and_sines() {
        let g = torus2(64);
        let c = ScalarField::constant(g, -1.5);
        assert!((c.lp_norm(1.0).unwrap() - 1.5 * 4.0 * PI * PI).abs() < 1e-10);
        let s = ScalarField::from_fn(g, |x| x[0].sin());
        // int |sin| over one period is 4, times the 2pi transverse length
        assert!((s.lp_norm(1.0).unwrap() / (8.0 * PI) - 1.0).abs() < 1e-3);
        assert!((s.lp_norm(f64::INFINITY).unwrap() - 1.0).abs() < 1e-6);
        assert!(matches!(s.lp_norm(0.5), Err(LabError::InvalidExponent(_))));
    }

    #[test]
    fn w11_of_cosine() {
        let g = torus2(128);
        let f = ScalarField::from_fn(g, |x| x[0].cos());
        assert!((f.w11_norm().unwrap() / (16.0 * PI) - 1.0).abs() < 1e-3);
        assert_eq!(ScalarField::zeros(g).w11_norm().unwrap(), 0.0);
        let g3 = Grid::new(3, 8, 1.0).unwrap();
        assert!(ScalarField::zeros(g3).w11_norm().is_err());
    }

    #[test]
    fn sobolev_anchors() {
        let g = torus2(32);
        let f = ScalarField::from_fn(g, |x| x[0].cos());
        let l2 = f.lp_norm(2.0).unwrap();
        assert!((f.hs_norm(0.0).unwrap() - l2).abs() < 1e-10);
        let grad_l2 = f.gradient().lp_norm(2.0).unwrap();
        assert!((f.hs_norm(1.0).unwrap() - grad_l2).abs() < 1e-10);
        assert!((l2 - (2.0 * PI * PI).sqrt()).abs() < 1e-10);
        let one = ScalarField::constant(g, 1.0);
        assert!(matches!(one.hs_norm(-1.0), Err(LabError::NonzeroMean { .. })));
        assert_eq!(one.hs_norm(1.0).unwrap(), 0.0);
    }

    #[test]
    fn generic_exponent_matches_closed_form() {
        // int |sin|^3 over a period is 8/3; the kinks at the zeros limit the rule to O(h^4)
        let g = torus2(256);
        let s = ScalarField::from_fn(g, |x| x[0].sin());
        let expect = (8.0 / 3.0 * 2.0 * PI).powf(1.0 / 3.0);
        assert!((s.lp_norm(3.0).unwrap() / expect - 1.0).abs() < 1e-6);
    }

    #[test]
    fn dealias_keeps_low_modes() {
        let g = torus2(24 * 2 - 16);
        let f = ScalarField::from_fn(g, |x| x[0].cos() + (15.0 * x[1]).sin());
        let mut spec = f.spectrum().clone();
        dealias(&mut spec);
        let kept = spec.to_field();
        let expect = ScalarField::from_fn(g, |x| x[0].cos());
        assert!((&kept - &expect).max_abs() < 1e-12);
    }

    #[test]
    fn norm_report_rejects_negative() {
        let mut r = NormReport::new();
        assert!(r.insert("L1", -1.0).is_err());
        assert!(r.insert("L1", f64::NAN).is_err());
        r.insert("L1", 2.0).unwrap();
        assert_eq!(r.get("L1"), Some(2.0));
    }
}
