use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Uniform isotropic periodic lattice on `[0, L)^dim`.
///
/// Samples are stored row-major with the last axis contiguous, so the flat
/// index of lattice point `(i_0, .., i_{d-1})` is `sum_a i_a * n^(d-1-a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    box_length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, box_length: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(LabError::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
        }
        if n < 8 || n % 2 != 0 {
            return Err(LabError::InvalidGrid(format!("n must be even and >= 8, got {n}")));
        }
        if !n.is_power_of_two() {
            return Err(LabError::InvalidGrid(format!("n must be a power of two, got {n}")));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(LabError::InvalidGrid(format!("box length must be finite and > 0, got {box_length}")));
        }
        Ok(Grid { dim, n, box_length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Cell width `L / n`.
    pub fn h(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Total number of lattice points `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical measure of one cell, `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.dim - 1 - axis) as u32)
    }

    /// Per-axis lattice indices of a flat index.
    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        let mut out = [0; 3];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = rest % self.n;
            rest /= self.n;
        }
        out
    }

    /// Physical coordinates of a lattice point; unused trailing axes are 0.
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let h = self.h();
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = idx[a] as f64 * h;
        }
        x
    }

    /// Signed mode number of a per-axis FFT index, in `[-n/2, n/2)`.
    pub fn mode(&self, index: usize) -> i64 {
        let n = self.n as i64;
        let i = index as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn is_nyquist(&self, index: usize) -> bool {
        index == self.n / 2
    }

    /// Physical wavenumber `2 pi m / L` of a per-axis FFT index.
    pub fn wavenumber(&self, index: usize) -> f64 {
        2.0 * PI * self.mode(index) as f64 / self.box_length
    }

    /// Wavenumber used for differentiation: equal to [`Grid::wavenumber`]
    /// except at the Nyquist index, where it is zero.
    pub fn derivative_wavenumber(&self, index: usize) -> f64 {
        if self.is_nyquist(index) {
            0.0
        } else {
            self.wavenumber(index)
        }
    }

    /// Whether two grids describe the same lattice.
    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(LabError::GridMismatch(format!(
                "{}D n={} L={} vs {}D n={} L={}",
                self.dim, self.n, self.box_length, other.dim, other.n, other.box_length
            )));
        }
        Ok(())
    }

    pub fn ensure_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(LabError::WrongDimension { expected: dim, found: self.dim });
        }
        Ok(())
    }

    /// Minimum-image displacement `x - c` on the torus, per axis.
    pub fn min_image(&self, x: [f64; 3], c: [f64; 3]) -> [f64; 3] {
        let l = self.box_length;
        let mut d = [0.0; 3];
        for a in 0..self.dim {
            let mut v = x[a] - c[a];
            v -= l * (v / l).round();
            d[a] = v;
        }
        d
    }

    /// Shared wavevector tables for this grid.
    pub(crate) fn wavevectors(&self) -> Arc<Wavevectors> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize, u64), Arc<Wavevectors>>>> = OnceLock::new();
        let key = (self.dim, self.n, self.box_length.to_bits());
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        map.entry(key).or_insert_with(|| Arc::new(Wavevectors::new(self))).clone()
    }

    /// Shared table of `|k|^{2s}` per mode, zero at the zero mode.
    pub(crate) fn sobolev_weights(&self, s: f64) -> Arc<Vec<f64>> {
        type Key = (usize, usize, u64, u64);
        static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<f64>>>>> = OnceLock::new();
        let key = (self.dim, self.n, self.box_length.to_bits(), s.to_bits());
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        map.entry(key)
            .or_insert_with(|| {
                let wv = self.wavevectors();
                Arc::new(wv.k2.iter().enumerate().map(|(i, k2)| if i == 0 { 0.0 } else { k2.powf(s) }).collect())
            })
            .clone()
    }
}

/// Precomputed wavevectors of every spectral index, in storage order.
#[derive(Debug, Clone)]
pub(crate) struct Wavevectors {
    /// Derivative wavevector per mode (Nyquist components zeroed).
    pub kd: Vec<[f64; 3]>,
    /// `|k|^2` from the physical wavevector.
    pub k2: Vec<f64>,
    /// `|kd|^2` from the derivative wavevector.
    pub kd2: Vec<f64>,
}

impl Wavevectors {
    fn new(grid: &Grid) -> Self {
        let len = grid.len();
        let mut kd = Vec::with_capacity(len);
        let mut k2 = Vec::with_capacity(len);
        let mut kd2 = Vec::with_capacity(len);
        for flat in 0..len {
            let idx = grid.unravel(flat);
            let mut kv = [0.0; 3];
            let mut kdv = [0.0; 3];
            for a in 0..grid.dim() {
                kv[a] = grid.wavenumber(idx[a]);
                kdv[a] = grid.derivative_wavenumber(idx[a]);
            }
            k2.push(kv.iter().map(|x| x * x).sum());
            kd2.push(kdv.iter().map(|x| x * x).sum());
            kd.push(kdv);
        }
        Wavevectors { kd, k2, kd2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(2, 7, 1.0).is_err());
        assert!(Grid::new(2, 4, 1.0).is_err());
        assert!(Grid::new(2, 12, 1.0).is_err());
        assert!(Grid::new(4, 16, 1.0).is_err());
        assert!(Grid::new(2, 16, 0.0).is_err());
        assert!(Grid::new(3, 16, f64::NAN).is_err());
        let msg = Grid::new(2, 7, 1.0).unwrap_err().to_string();
        assert!(msg.contains("n must be even and >= 8"), "{msg}");
    }

    #[test]
    fn unravel_matches_strides() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        for flat in [0, 1, 9, 77, 511] {
            let idx = g.unravel(flat);
            let back: usize = (0..3).map(|a| idx[a] * g.stride(a)).sum();
            assert_eq!(back, flat);
        }
    }

    #[test]
    fn modes_and_nyquist() {
        let g = Grid::new(2, 8, 2.0 * PI).unwrap();
        let modes: Vec<i64> = (0..8).map(|i| g.mode(i)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.derivative_wavenumber(4), 0.0);
        assert_eq!(g.wavenumber(4), -4.0);
    }

    #[test]
    fn min_image_wraps() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let d = g.min_image([0.95, 0.1, 0.0], [0.05, 0.9, 0.0]);
        assert!((d[0] + 0.1).abs() < 1e-12);
        assert!((d[1] - 0.2).abs() < 1e-12);
    }
}
