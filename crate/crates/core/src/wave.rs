//! Magnetic field wave equation `B_tt - Delta B = curl j` on the 3-torus,
//! Strichartz exponent admissibility and the estimate-ratio experiment.
//!
//! Every Fourier mode is propagated exactly between stored times. The source
//! is interpolated linearly in time on each interval and integrated exactly
//! against the propagator kernel, so a source that is constant (or linear)
//! in time contributes no quadrature error at all.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fft;
use crate::field::{curl_spectra, Spectrum, VectorField};
use crate::grid::Grid;
use crate::io::fmt_f64;
use crate::par::map_ordered;
use crate::random::{solenoidal_sample, RandomFieldSpec};
use crate::trajectory::{time_norm, Trajectory};

/// Tolerance for the two equalities of the scaling condition.
const SCALING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrichartzExponents {
    pub q: f64,
    pub r: f64,
    /// `q tilde`; its dual `q / (q - 1)` is the time exponent of the source.
    pub qt: f64,
    pub s: f64,
    pub k: f64,
}

impl StrichartzExponents {
    pub const fn new(q: f64, r: f64, qt: f64, s: f64, k: f64) -> Self {
        StrichartzExponents { q, r, qt, s, k }
    }

    /// `1 / q'` with `q' = q / (q - 1)` the dual of `q tilde`.
    pub fn inv_dual_qt(&self) -> f64 {
        1.0 - 1.0 / self.qt
    }

    pub fn dual_qt(&self) -> f64 {
        1.0 / self.inv_dual_qt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub admissible: bool,
    pub violations: Vec<String>,
}

/// Ranges, wave compatibility `1/q + 1/r <= 1/2` and scaling
/// `1/q + 3/r = 3/2 - s = 1/q' + 1 - k`.
pub fn strichartz_admissible(e: &StrichartzExponents) -> Verdict {
    let mut v = Vec::new();
    if [e.q, e.r, e.qt, e.s, e.k].iter().any(|x| x.is_nan()) || !e.s.is_finite() || !e.k.is_finite() {
        v.push("exponents must be numbers, with s and k finite".to_string());
        return Verdict { admissible: false, violations: v };
    }
    if !(e.q >= 2.0) {
        v.push(format!("q = {} outside [2, inf]", e.q));
    }
    if !(e.qt > 2.0) {
        v.push(format!("q tilde = {} outside (2, inf]", e.qt));
    }
    if !(e.r >= 2.0 && e.r.is_finite()) {
        v.push(format!("r = {} outside [2, inf)", e.r));
    }
    if !v.is_empty() {
        return Verdict { admissible: false, violations: v };
    }
    let (iq, ir) = (1.0 / e.q, 1.0 / e.r);
    if iq + ir > 0.5 + SCALING_TOL {
        v.push(format!("wave compatibility fails: 1/q + 1/r = {} > 1/2", iq + ir));
    }
    let lhs = iq + 3.0 * ir;
    let mid = 1.5 - e.s;
    let rhs = e.inv_dual_qt() + 1.0 - e.k;
    if (lhs - mid).abs() > SCALING_TOL {
        v.push(format!("scaling fails: 1/q + 3/r = {lhs} != 3/2 - s = {mid}"));
    }
    if (mid - rhs).abs() > SCALING_TOL {
        v.push(format!("scaling fails: 3/2 - s = {mid} != 1/q' + 1 - k = {rhs}"));
    }
    Verdict { admissible: v.is_empty(), violations: v }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeProfile {
    Constant,
    Cos { omega: f64 },
    Sin { omega: f64 },
}

impl TimeProfile {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Cos { omega } => (omega * t).cos(),
            TimeProfile::Sin { omega } => (omega * t).sin(),
        }
    }
}

/// Current density `j(x, t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CurrentDensity {
    Zero,
    /// `sum_i a_i(x) f_i(t)`.
    Separable(Vec<(VectorField, TimeProfile)>),
    /// Samples on the solve's time lattice.
    Sampled(Trajectory<VectorField>),
}

impl CurrentDensity {
    fn check(&self, grid: &Grid, times: &[f64]) -> Result<()> {
        match self {
            CurrentDensity::Zero => Ok(()),
            CurrentDensity::Separable(terms) => {
                for (a, _) in terms {
                    grid.ensure_same(a.grid())?;
                }
                Ok(())
            }
            CurrentDensity::Sampled(traj) => {
                grid.ensure_same(traj.grid())?;
                let same = traj.len() == times.len()
                    && traj.times().iter().zip(times).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + b.abs()));
                if same {
                    Ok(())
                } else {
                    Err(LabError::Precondition("sampled current is not on the solve's time lattice".into()))
                }
            }
        }
    }

    /// `j` at lattice sample `idx` (time `t`).
    pub fn at(&self, grid: &Grid, idx: usize, t: f64) -> VectorField {
        match self {
            CurrentDensity::Zero => VectorField::zeros(*grid),
            CurrentDensity::Separable(terms) => {
                let mut acc = VectorField::zeros(*grid);
                for (a, f) in terms {
                    acc = &acc + &a.scale(f.at(t));
                }
                acc
            }
            CurrentDensity::Sampled(traj) => traj.fields()[idx].clone(),
        }
    }

    /// Spatial parts and time weights: `j(t_i) = sum_a w_a(i) part_a`.
    fn decompose<'a>(&'a self, times: &[f64]) -> (Vec<&'a VectorField>, Vec<Vec<f64>>) {
        match self {
            CurrentDensity::Zero => (Vec::new(), Vec::new()),
            CurrentDensity::Separable(terms) => {
                let parts = terms.iter().map(|(a, _)| a).collect();
                let weights = times.iter().map(|&t| terms.iter().map(|(_, f)| f.at(t)).collect()).collect();
                (parts, weights)
            }
            CurrentDensity::Sampled(traj) => {
                let count = traj.len();
                let parts = traj.fields().iter().collect();
                let weights =
                    (0..count).map(|i| (0..count).map(|a| if a == i { 1.0 } else { 0.0 }).collect()).collect();
                (parts, weights)
            }
        }
    }

    /// Curl spectra of the spatial parts with their time weights; `None`
    /// for no current.
    fn curl_source(&self, times: &[f64]) -> Option<CurlSource> {
        let (parts, weights) = self.decompose(times);
        if parts.is_empty() {
            return None;
        }
        let curls = map_ordered(&parts, |p| {
            let spectra: Vec<Spectrum> = p.components().iter().map(|c| c.spectrum().clone()).collect();
            curl_spectra(&spectra)
        });
        Some(CurlSource { curls, weights })
    }
}

struct CurlSource {
    curls: Vec<Vec<Spectrum>>,
    weights: Vec<Vec<f64>>,
}

impl CurlSource {
    /// Component `a` of `curl j` at lattice sample `i`.
    fn at(&self, i: usize, a: usize) -> Vec<Complex64> {
        let mut acc = vec![Complex64::default(); self.curls[0][a].coeffs().len()];
        for (c, &wt) in self.curls.iter().zip(&self.weights[i]) {
            if wt != 0.0 {
                for (x, y) in acc.iter_mut().zip(c[a].coeffs()) {
                    *x += y * wt;
                }
            }
        }
        acc
    }
}

/// `(1 - cos x) / x^2`, `sin x / x` and `(x - sin x) / x^3`.
fn kernels(x: f64) -> (f64, f64, f64) {
    if x.abs() < 0.1 {
        let x2 = x * x;
        let c = 0.5 - x2 / 24.0 + x2 * x2 / 720.0 - x2 * x2 * x2 / 40320.0;
        let sinc = 1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0;
        let s3 = 1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0 - x2 * x2 * x2 / 362_880.0;
        (c, sinc, s3)
    } else {
        ((1.0 - x.cos()) / (x * x), x.sin() / x, (x - x.sin()) / (x * x * x))
    }
}

/// Per-mode update over one interval of length `dt`, source linear in time.
#[derive(Debug, Clone, Copy)]
struct Step {
    cos: f64,
    /// `sin(w dt) / w`.
    sin_over: f64,
    /// `-w sin(w dt)`.
    minus_w_sin: f64,
    /// Weights of the source at the left/right end, for `B` and for `B_t`.
    b_left: f64,
    b_right: f64,
    bt_left: f64,
    bt_right: f64,
}

impl Step {
    fn new(w: f64, dt: f64) -> Self {
        let x = w * dt;
        let (c, sinc, s3) = kernels(x);
        let b_right = dt * dt * s3;
        let bt_right = dt * c;
        Step {
            cos: x.cos(),
            sin_over: dt * sinc,
            minus_w_sin: -w * w * dt * sinc,
            b_left: dt * dt * c - b_right,
            b_right,
            bt_left: dt * sinc - bt_right,
            bt_right,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveSolution {
    pub b: Trajectory<VectorField>,
    pub bt: Trajectory<VectorField>,
}

/// Evolve `(B, B_t)` from `(b0, b1)` to `t_end`, storing `nt` uniform samples.
pub fn solve_wave(
    b0: &VectorField,
    b1: &VectorField,
    j: &CurrentDensity,
    t_end: f64,
    nt: usize,
) -> Result<WaveSolution> {
    let mut b_out = Vec::with_capacity(nt);
    let mut bt_out = Vec::with_capacity(nt);
    let times = propagate_wave(b0, b1, j, t_end, nt, |_, _, b, bt| {
        b_out.push(b.clone());
        bt_out.push(bt.clone());
        Ok(())
    })?;
    Ok(WaveSolution { b: Trajectory::new(times.clone(), b_out)?, bt: Trajectory::new(times, bt_out)? })
}

/// Like [`solve_wave`] but hands each sample `(index, t, B, B_t)` to `visit`
/// instead of storing it. Returns the time lattice.
pub fn propagate_wave(
    b0: &VectorField,
    b1: &VectorField,
    j: &CurrentDensity,
    t_end: f64,
    nt: usize,
    mut visit: impl FnMut(usize, f64, &VectorField, &VectorField) -> Result<()>,
) -> Result<Vec<f64>> {
    let grid = *b0.grid();
    grid.ensure_dim(3)?;
    grid.ensure_same(b1.grid())?;
    if !(t_end > 0.0 && t_end.is_finite()) || nt < 2 {
        return Err(LabError::Precondition(format!("need t_end > 0 and nt >= 2, got {t_end}, {nt}")));
    }
    let times = Trajectory::<VectorField>::lattice(t_end, nt);
    j.check(&grid, &times)?;
    let dt = t_end / (nt - 1) as f64;
    let wv = grid.wavevectors();
    let steps: Vec<Step> = wv.k2.iter().map(|k2| Step::new(k2.sqrt(), dt)).collect();

    let mut b: Vec<Vec<Complex64>> = b0.components().iter().map(|c| c.spectrum().coeffs().to_vec()).collect();
    let mut bt: Vec<Vec<Complex64>> = b1.components().iter().map(|c| c.spectrum().coeffs().to_vec()).collect();
    let source = j.curl_source(&times);
    let mut left: Option<Vec<Vec<Complex64>>> = source.as_ref().map(|s| (0..3).map(|a| s.at(0, a)).collect());

    let to_field = |spec: &[Vec<Complex64>]| -> Result<VectorField> {
        let spectra = spec.iter().map(|c| Spectrum::from_coeffs(grid, c.clone())).collect::<Result<Vec<_>>>()?;
        Ok(VectorField::from_owned_spectra(spectra))
    };
    visit(0, 0.0, b0, b1)?;
    for i in 1..nt {
        let right: Option<Vec<Vec<Complex64>>> = source.as_ref().map(|s| (0..3).map(|a| s.at(i, a)).collect());
        for (m, st) in steps.iter().enumerate() {
            for a in 0..3 {
                let (x, y) = (b[a][m], bt[a][m]);
                let mut nb = x * st.cos + y * st.sin_over;
                let mut nbt = x * st.minus_w_sin + y * st.cos;
                if let (Some(l), Some(r)) = (&left, &right) {
                    let (fl, fr) = (l[a][m], r[a][m]);
                    nb += fl * st.b_left + fr * st.b_right;
                    nbt += fl * st.bt_left + fr * st.bt_right;
                }
                b[a][m] = nb;
                bt[a][m] = nbt;
            }
        }
        left = right;
        visit(i, times[i], &to_field(&b)?, &to_field(&bt)?)?;
    }
    Ok(times)
}

/// `||B_t||_2^2 + ||grad B||_2^2`, evaluated spectrally.
pub fn wave_energy(b: &VectorField, bt: &VectorField) -> Result<f64> {
    b.grid().ensure_same(bt.grid())?;
    let wv = b.grid().wavevectors();
    let mut acc = 0.0;
    for (x, y) in b.components().iter().zip(bt.components()) {
        for ((cx, cy), k2) in x.spectrum().coeffs().iter().zip(y.spectrum().coeffs()).zip(&wv.k2) {
            acc += cy.norm_sqr() + k2 * cx.norm_sqr();
        }
    }
    Ok(acc * b.grid().volume())
}

/// Samples of the nine entries of `|grad|^k grad j`.
fn source_entries(j: &VectorField, k: f64) -> Vec<Vec<f64>> {
    let grid = *j.grid();
    let wv = grid.wavevectors();
    let mut out = Vec::with_capacity(9);
    for c in j.components() {
        let spec = c.spectrum();
        for b in 0..3 {
            let coeffs: Vec<Complex64> = spec
                .coeffs()
                .iter()
                .enumerate()
                .map(|(m, x)| {
                    let mult = if m == 0 { 0.0 } else { wv.k2[m].powf(0.5 * k) };
                    x * Complex64::new(0.0, wv.kd[m][b] * mult)
                })
                .collect();
            out.push(fft::inverse_real(&grid, &coeffs));
        }
    }
    out
}

fn frobenius_l1(entries: &[Vec<f64>], weights: &[f64], cell_volume: f64) -> f64 {
    let len = entries[0].len();
    let mut acc = 0.0;
    for x in 0..len {
        let mut sq = 0.0;
        for e in 0..9 {
            let mut v = 0.0;
            for (t, w) in weights.iter().enumerate() {
                if *w != 0.0 {
                    v += w * entries[t * 9 + e][x];
                }
            }
            sq += v * v;
        }
        acc += sq.sqrt();
    }
    acc * cell_volume
}

/// `L^1` norm of the Frobenius magnitude of `|grad|^k grad j`.
pub fn source_l1(j: &VectorField, k: f64) -> Result<f64> {
    j.grid().ensure_dim(3)?;
    Ok(frobenius_l1(&source_entries(j, k), &[1.0], j.grid().cell_volume()))
}

/// `source_l1` at every lattice time.
fn source_l1_series(j: &CurrentDensity, grid: &Grid, times: &[f64], k: f64) -> Vec<f64> {
    if let CurrentDensity::Sampled(traj) = j {
        return map_ordered(traj.fields(), |f| frobenius_l1(&source_entries(f, k), &[1.0], grid.cell_volume()));
    }
    let (parts, weights) = j.decompose(times);
    if parts.is_empty() {
        return vec![0.0; times.len()];
    }
    let entries: Vec<Vec<f64>> = map_ordered(&parts, |p| source_entries(p, k)).into_iter().flatten().collect();
    map_ordered(&weights, |w| frobenius_l1(&entries, w, grid.cell_volume()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzRow {
    pub index: usize,
    /// `||B||_{L^q_t L^r_x}`.
    pub mixed: f64,
    /// `max_t ||B||_{H^s}`.
    pub energy_b: f64,
    /// `max_t ||B_t||_{H^(s-1)}`.
    pub energy_bt: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzReport {
    pub exponents: StrichartzExponents,
    /// Lattice size of the fixtures (0 for an empty family).
    pub n: usize,
    pub t_end: f64,
    pub nt: usize,
    pub rows: Vec<StrichartzRow>,
    pub discarded: usize,
    pub family_max: f64,
    pub family_mean: f64,
}

/// One `(B0, B1, j)` triple of the estimate experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFixture {
    pub b0: VectorField,
    pub b1: VectorField,
    pub j: CurrentDensity,
}

/// `(mixed, energy_b, energy_bt, lhs, rhs)` of one fixture.
pub fn strichartz_sides(e: &StrichartzExponents, fx: &WaveFixture, t_end: f64, nt: usize) -> Result<[f64; 5]> {
    let mut spatial = Vec::with_capacity(nt);
    let mut energy_b: f64 = 0.0;
    let mut energy_bt: f64 = 0.0;
    let times = propagate_wave(&fx.b0, &fx.b1, &fx.j, t_end, nt, |_, _, b, bt| {
        spatial.push(b.lp_norm(e.r)?);
        energy_b = energy_b.max(b.hs_norm(e.s)?);
        energy_bt = energy_bt.max(bt.hs_norm(e.s - 1.0)?);
        Ok(())
    })?;
    let mixed = time_norm(&times, &spatial, e.q)?;
    let grid = *fx.b0.grid();
    let source = match &fx.j {
        CurrentDensity::Zero => 0.0,
        j => time_norm(&times, &source_l1_series(j, &grid, &times, e.k), e.dual_qt())?,
    };
    let rhs = fx.b0.hs_norm(e.s)? + fx.b1.hs_norm(e.s - 1.0)? + source;
    Ok([mixed, energy_b, energy_bt, mixed + energy_b + energy_bt, rhs])
}

/// Seeded fixture `index`: band-limited solenoidal `B0`, `B1` and
/// `j = a cos(2 pi t / T) + c sin(2 pi t / T)`.
pub fn random_wave_fixture(spec: &RandomFieldSpec, index: usize, t_end: f64) -> Result<WaveFixture> {
    let draw = |role: usize| solenoidal_sample(spec, 4 * index + role);
    let omega = 2.0 * PI / t_end;
    Ok(WaveFixture {
        b0: draw(0)?,
        b1: draw(1)?,
        j: CurrentDensity::Separable(vec![
            (draw(2)?, TimeProfile::Cos { omega }),
            (draw(3)?, TimeProfile::Sin { omega }),
        ]),
    })
}

/// Ratios LHS / RHS over a fixture family, up to `T <= L/4`.
pub fn strichartz_ratio_experiment(
    e: &StrichartzExponents,
    fixtures: &[WaveFixture],
    t_end: f64,
    nt: usize,
) -> Result<StrichartzReport> {
    let verdict = strichartz_admissible(e);
    if !verdict.admissible {
        return Err(LabError::Inadmissible(verdict.violations));
    }
    if let Some(fx) = fixtures.first() {
        let l = fx.b0.grid().box_length();
        if t_end > l / 4.0 * (1.0 + 1e-12) {
            return Err(LabError::Precondition(format!("T = {t_end} exceeds L/4 = {}", l / 4.0)));
        }
    }
    let results = map_ordered(fixtures, |fx| strichartz_sides(e, fx, t_end, nt));
    let mut rows = Vec::new();
    let mut discarded = 0;
    for (index, r) in results.into_iter().enumerate() {
        let [mixed, energy_b, energy_bt, lhs, rhs] = r?;
        if rhs < 1e-12 {
            discarded += 1;
            continue;
        }
        rows.push(StrichartzRow { index, mixed, energy_b, energy_bt, lhs, rhs, ratio: lhs / rhs });
    }
    let family_max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let family_mean = if rows.is_empty() { 0.0 } else { rows.iter().map(|r| r.ratio).sum::<f64>() / rows.len() as f64 };
    let n = fixtures.first().map_or(0, |f| f.b0.grid().n());
    Ok(StrichartzReport { exponents: *e, n, t_end, nt, rows, discarded, family_max, family_mean })
}

/// One CSV row per retained fixture.
pub fn write_strichartz_csv(w: &mut impl Write, seed: u64, report: &StrichartzReport) -> Result<()> {
    let e = &report.exponents;
    writeln!(w, "q,r,qt,s,k,seed,n,index,mixed,energy_b,energy_bt,lhs,rhs,ratio")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(e.q),
            fmt_f64(e.r),
            fmt_f64(e.qt),
            fmt_f64(e.s),
            fmt_f64(e.k),
            seed,
            report.n,
            r.index,
            fmt_f64(r.mixed),
            fmt_f64(r.energy_b),
            fmt_f64(r.energy_bt),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.ratio)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biot_savart::relative_divergence;

    fn torus(n: usize) -> Grid {
        Grid::new(3, n, 2.0 * PI).unwrap()
    }

    #[test]
    fn fixture_tuples() {
        assert!(strichartz_admissible(&StrichartzExponents::new(4.0, 4.0, 4.0, 0.5, 0.75)).admissible);
        let v = strichartz_admissible(&StrichartzExponents::new(4.0, 4.0, 2.0, 0.5, 0.75));
        assert!(!v.admissible);
        assert!(v.violations[0].contains("q tilde"));
        let v = strichartz_admissible(&StrichartzExponents::new(2.0, 4.0, 4.0, 0.5, 0.75));
        assert!(v.violations.iter().any(|m| m.contains("compatibility")));
        // endpoint q = inf, q tilde = inf
        assert!(
            strichartz_admissible(&StrichartzExponents::new(f64::INFINITY, 2.0, f64::INFINITY, 0.0, 0.5)).admissible
        );
    }

    #[test]
    fn kernels_match_closed_forms_across_switch() {
        for x in [0.099_999, 0.1, 0.100_001, 1e-4] {
            let (c, s, s3) = kernels(x);
            let exact = ((1.0 - x.cos()) / (x * x), x.sin() / x, (x - x.sin()) / (x * x * x));
            assert!((c - exact.0).abs() < 1e-8);
            assert!((s - exact.1).abs() < 1e-12);
            if x > 1e-3 {
                assert!((s3 - exact.2).abs() < 1e-7);
            }
        }
        assert_eq!(kernels(0.0), (0.5, 1.0, 1.0 / 6.0));
    }

    #[test]
    fn single_mode_oscillates() {
        let g = torus(16);
        let b0 = VectorField::from_fn(g, |x| [0.0, 0.0, (2.0 * x[0] + x[1]).cos()]);
        let sol = solve_wave(&b0, &VectorField::zeros(g), &CurrentDensity::Zero, 1.3, 5).unwrap();
        let w = 5f64.sqrt();
        for (t, f) in sol.b.times().iter().zip(sol.b.fields()) {
            assert!((f - &b0.scale((w * t).cos())).max_abs() < 1e-13);
        }
    }

    #[test]
    fn constant_current_matches_closed_form() {
        let g = torus(16);
        let j = CurrentDensity::Separable(vec![(
            VectorField::from_fn(g, |x| [0.0, 0.0, x[0].cos()]),
            TimeProfile::Constant,
        )]);
        let z = VectorField::zeros(g);
        let sol = solve_wave(&z, &z, &j, 2.0, 9).unwrap();
        for (t, f) in sol.b.times().iter().zip(sol.b.fields()) {
            let exact = VectorField::from_fn(g, |x| [0.0, (1.0 - t.cos()) * x[0].sin(), 0.0]);
            assert!((f - &exact).max_abs() < 1e-13);
        }
    }

    #[test]
    fn energy_and_divergence_preserved() {
        let g = torus(16);
        let spec = RandomFieldSpec { seed: 3, beta: 1.5, dim: 3, n: 16, box_length: 2.0 * PI, count: 1, k_max: 5 };
        let b0 = solenoidal_sample(&spec, 0).unwrap();
        let b1 = solenoidal_sample(&spec, 1).unwrap();
        let sol = solve_wave(&b0, &b1, &CurrentDensity::Zero, PI / 2.0, 7).unwrap();
        let e0 = wave_energy(&b0, &b1).unwrap();
        for (b, bt) in sol.b.fields().iter().zip(sol.bt.fields()) {
            assert!((wave_energy(b, bt).unwrap() / e0 - 1.0).abs() < 1e-12);
            assert!(relative_divergence(b) < 1e-12);
        }
        let _ = g;
    }

    #[test]
    fn time_reversal() {
        let spec = RandomFieldSpec { seed: 8, beta: 2.0, dim: 3, n: 16, box_length: 2.0 * PI, count: 1, k_max: 4 };
        let b0 = solenoidal_sample(&spec, 0).unwrap();
        let b1 = solenoidal_sample(&spec, 1).unwrap();
        let fwd = solve_wave(&b0, &b1, &CurrentDensity::Zero, 1.0, 4).unwrap();
        let back = solve_wave(fwd.b.last(), &fwd.bt.last().scale(-1.0), &CurrentDensity::Zero, 1.0, 4).unwrap();
        assert!((back.b.last() - &b0).max_abs() < 1e-12);
        assert!((back.bt.last() - &b1.scale(-1.0)).max_abs() < 1e-12);
    }

    #[test]
    fn zero_fixture_is_discarded() {
        let g = torus(8);
        let z = VectorField::zeros(g);
        let fx = WaveFixture { b0: z.clone(), b1: z, j: CurrentDensity::Zero };
        let e = StrichartzExponents::new(4.0, 4.0, 4.0, 0.5, 0.75);
        let r = strichartz_ratio_experiment(&e, &[fx], PI / 2.0, 8).unwrap();
        assert_eq!(r.discarded, 1);
        assert!(r.rows.is_empty());
        let bad = StrichartzExponents::new(4.0, 4.0, 2.0, 0.5, 0.75);
        assert!(matches!(strichartz_ratio_experiment(&bad, &[], 1.0, 8), Err(LabError::Inadmissible(_))));
    }

    #[test]
    fn lattice_mismatch_rejected() {
        let g = torus(8);
        let z = VectorField::zeros(g);
        let traj = Trajectory::new(vec![0.0, 1.0], vec![z.clone(), z.clone()]).unwrap();
        assert!(solve_wave(&z, &z, &CurrentDensity::Sampled(traj), 2.0, 2).is_err());
    }
}
