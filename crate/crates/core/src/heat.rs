//! Heat semigroup `e^{t Delta}` (unit viscosity) and the Duhamel integral of
//! the divergence of the heat kernel.

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::field::{ScalarField, Spectrum, VectorField};
use crate::grid::Grid;

/// Fields that the heat semigroup acts on.
pub trait HeatEvolve: Sized {
    fn heat_evolve(&self, t: f64) -> Result<Self>;
}

pub(crate) fn heat_spectrum(spec: &Spectrum, t: f64) -> Spectrum {
    let wv = spec.grid().wavevectors();
    spec.scaled_by(|m| (-wv.k2[m] * t).exp())
}

impl HeatEvolve for ScalarField {
    fn heat_evolve(&self, t: f64) -> Result<Self> {
        if t.is_nan() || t < 0.0 {
            return Err(LabError::NegativeTime(t));
        }
        if t == 0.0 {
            return Ok(self.clone());
        }
        Ok(heat_spectrum(self.spectrum(), t).to_field())
    }
}

impl HeatEvolve for VectorField {
    fn heat_evolve(&self, t: f64) -> Result<Self> {
        let comps = self.components().iter().map(|c| c.heat_evolve(t)).collect::<Result<Vec<_>>>()?;
        VectorField::new(comps)
    }
}

/// Multiply by `e^{-|k|^2 t}`.
pub fn heat_evolve<F: HeatEvolve>(f: &F, t: f64) -> Result<F> {
    f.heat_evolve(t)
}

/// Gauss-Legendre abscissae on `[-1, 1]` for two points.
const GL2: f64 = 0.577_350_269_189_625_8;

/// Quadrature for `int_0^t F(t - s) ds` after the substitution `s = t - tau^2`,
/// which turns the `(t - s)^{-1/2}` singularity of the differentiated heat
/// kernel into a smooth integrand `2 tau F(tau^2)` on `[0, sqrt t]`.
///
/// Nodes are two-point Gauss-Legendre pairs on `m / 2` equal panels in tau,
/// listed in ascending tau.
#[derive(Debug, Clone, PartialEq)]
pub struct DuhamelQuadrature {
    t: f64,
    taus: Vec<f64>,
    weights: Vec<f64>,
}

impl DuhamelQuadrature {
    pub fn new(t: f64, m: usize) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(LabError::Precondition(format!("Duhamel time must be > 0, got {t}")));
        }
        if m < 4 || m % 2 != 0 {
            return Err(LabError::Precondition(format!("quadrature needs an even m >= 4, got {m}")));
        }
        let panels = m / 2;
        let width = t.sqrt() / panels as f64;
        let mut taus = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * width;
            for sign in [-1.0, 1.0] {
                let tau = mid + sign * GL2 * 0.5 * width;
                taus.push(tau);
                // d s = 2 tau d tau; each Gauss point carries half the panel width
                weights.push(2.0 * tau * 0.5 * width);
            }
        }
        Ok(DuhamelQuadrature { t, taus, weights })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn m(&self) -> usize {
        self.taus.len()
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Physical times `s = t - tau^2` of the nodes.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        self.taus.iter().map(move |tau| self.t - tau * tau)
    }
}

/// Spectral core of the Duhamel integral.
///
/// `div_at(s, out)` must write the divergence spectrum `i kd . g_k(s)` into
/// `out`. Returns `sum_j w_j e^{-|k|^2 tau_j^2} div_g(s_j)`, accumulated in
/// ascending tau.
pub(crate) fn duhamel_spectral(
    grid: &Grid,
    quad: &DuhamelQuadrature,
    mut div_at: impl FnMut(f64, &mut [Complex64]) -> Result<()>,
) -> Result<Spectrum> {
    let wv = grid.wavevectors();
    let mut acc = vec![Complex64::default(); grid.len()];
    let mut buf = vec![Complex64::default(); grid.len()];
    for (tau, w) in quad.taus.iter().zip(&quad.weights) {
        let s = quad.t - tau * tau;
        div_at(s, &mut buf)?;
        let tau2 = tau * tau;
        for ((a, b), k2) in acc.iter_mut().zip(&buf).zip(&wv.k2) {
            *a += b * (w * (-k2 * tau2).exp());
        }
    }
    Spectrum::from_coeffs(*grid, acc)
}

pub(crate) fn divergence_spectrum(grid: &Grid, g: &[&Spectrum], out: &mut [Complex64]) {
    let wv = grid.wavevectors();
    for (m, o) in out.iter_mut().enumerate() {
        let kd = wv.kd[m];
        let mut acc = Complex64::default();
        for (a, spec) in g.iter().enumerate() {
            acc += spec.coeffs()[m] * Complex64::new(0.0, kd[a]);
        }
        *o = acc;
    }
}

/// `int_0^t div( K_{t-s} * g(s) ) ds`, i.e. the multiplier
/// `i k . e^{-|k|^2 (t-s)}` applied to `g(s)` and integrated in time.
pub fn duhamel_derivative_term(
    grid: &Grid,
    g: impl Fn(f64) -> Result<VectorField>,
    quad: &DuhamelQuadrature,
) -> Result<ScalarField> {
    let spec = duhamel_spectral(grid, quad, |s, out| {
        let field = g(s)?;
        grid.ensure_same(field.grid())?;
        let specs: Vec<&Spectrum> = field.components().iter().map(|c| c.spectrum()).collect();
        divergence_spectrum(grid, &specs, out);
        Ok(())
    })?;
    Ok(spec.to_field())
}
