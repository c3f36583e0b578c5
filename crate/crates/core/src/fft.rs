//! Multi-dimensional complex FFT over the periodic lattice.
//!
//! Forward transforms are normalized by `1 / n^dim`, so the zero-mode
//! coefficient equals the lattice mean of the field. Inverse transforms are
//! unnormalized sums.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

/// Lines per gather tile on strided axes.
const TILE: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

fn transform_in_place(grid: &Grid, data: &mut [Complex64], dir: Direction) {
    let n = grid.n();
    debug_assert_eq!(data.len(), grid.len());
    let (fwd, inv) = plans(n);
    let plan = match dir {
        Direction::Forward => fwd,
        Direction::Inverse => inv,
    };
    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];

    // last axis is contiguous
    plan.process_with_scratch(data, &mut scratch);

    let len = data.len();
    let mut tile = vec![Complex64::default(); TILE * n];
    for axis in 0..grid.dim() - 1 {
        let stride = grid.stride(axis);
        let block = stride * n;
        for base in (0..len).step_by(block) {
            // lines along `axis` are strided; copy TILE neighbouring lines at a
            // time so that reads stay contiguous and the tile stays in cache
            for o0 in (0..stride).step_by(TILE) {
                let width = TILE.min(stride - o0);
                for i in 0..n {
                    let row = &data[base + i * stride + o0..base + i * stride + o0 + width];
                    for (t, v) in row.iter().enumerate() {
                        tile[t * n + i] = *v;
                    }
                }
                plan.process_with_scratch(&mut tile[..width * n], &mut scratch);
                for i in 0..n {
                    let row = &mut data[base + i * stride + o0..base + i * stride + o0 + width];
                    for (t, v) in row.iter_mut().enumerate() {
                        *v = tile[t * n + i];
                    }
                }
            }
        }
    }

    if dir == Direction::Forward {
        let scale = 1.0 / len as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }
}

/// Forward transform of real samples.
pub fn forward_real(grid: &Grid, samples: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    transform_in_place(grid, &mut data, Direction::Forward);
    data
}

pub fn forward(grid: &Grid, data: &mut [Complex64]) {
    transform_in_place(grid, data, Direction::Forward);
}

/// Inverse transform returning the real part of the synthesized field.
pub fn inverse_real(grid: &Grid, coeffs: &[Complex64]) -> Vec<f64> {
    let mut data = coeffs.to_vec();
    transform_in_place(grid, &mut data, Direction::Inverse);
    data.into_iter().map(|c| c.re).collect()
}

/// Two real fields from one complex transform of `a + i b`. Exact when both
/// spectra are Hermitian; an anti-Hermitian residue in one leaks into the
/// other instead of being dropped.
pub fn inverse_real_pair(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let i = Complex64::new(0.0, 1.0);
    let mut data: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + i * y).collect();
    transform_in_place(grid, &mut data, Direction::Inverse);
    data.into_iter().map(|c| (c.re, c.im)).unzip()
}

pub fn inverse(grid: &Grid, data: &mut [Complex64]) {
    transform_in_place(grid, data, Direction::Inverse);
}
