//! Empirical constants of the Bourgain-Brezis and Gagliardo-Nirenberg
//! inequalities over seeded random families.
//!
//! Nothing here estimates a sharp constant. Each ratio is a quotient of
//! discrete norms, and the reported family maximum is checked for stability
//! under grid refinement.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::biot_savart::{relative_divergence, velocity_from_vorticity_2d, velocity_from_vorticity_3d};
use crate::error::{LabError, Result};
use crate::field::{ScalarField, VectorField};
use crate::io::fmt_f64;
use crate::par::map_ordered;
use crate::random::{scalar_sample, solenoidal_sample, RandomFieldSpec};

/// Relative floor below which a denominator counts as zero.
const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Divergence tolerated in a 3D vorticity before it is rejected.
const SOLENOIDAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub numerator: f64,
    pub denominator: f64,
}

impl Ratio {
    pub fn value(&self) -> f64 {
        self.numerator / self.denominator
    }
}

fn quotient(numerator: f64, denominator: f64, scale: f64, what: &str) -> Result<Ratio> {
    if !(denominator > DENOMINATOR_FLOOR * scale) {
        return Err(LabError::ZeroDenominator(format!("{what} = {denominator:.3e}")));
    }
    Ok(Ratio { numerator, denominator })
}

/// Typical size of `||grad w||_1` for a field of amplitude `max|w|`.
fn gradient_scale(max_abs: f64, box_length: f64, dim: usize) -> f64 {
    max_abs * box_length.powi(dim as i32 - 1)
}

/// `(||v||_inf + ||grad v||_2) / ||grad w||_1` with `v` the 2D Biot-Savart
/// velocity of `w`.
pub fn bb_ratio_2d(w: &ScalarField) -> Result<Ratio> {
    let v = velocity_from_vorticity_2d(w)?;
    let numerator = v.lp_norm(f64::INFINITY)? + v.gradient_tensor().lp_norm(2.0)?;
    let denominator = w.gradient().lp_norm(1.0)?;
    let scale = gradient_scale(w.max_abs(), w.grid().box_length(), 2);
    quotient(numerator, denominator, scale, "||grad w||_1")
}

/// `(||v||_3 + ||grad v||_{3/2}) / ||curl w||_1` with `v` the 3D
/// Biot-Savart velocity of a solenoidal `w`.
pub fn bb_ratio_3d(w: &VectorField) -> Result<Ratio> {
    w.grid().ensure_dim(3)?;
    let div = relative_divergence(w);
    if div > SOLENOIDAL_TOLERANCE {
        return Err(LabError::Precondition(format!("vorticity is not solenoidal (relative divergence {div:.3e})")));
    }
    let v = velocity_from_vorticity_3d(w)?;
    let numerator = v.lp_norm(3.0)? + v.gradient_tensor().lp_norm(1.5)?;
    let denominator = w.curl()?.lp_norm(1.0)?;
    let scale = gradient_scale(w.max_abs(), w.grid().box_length(), 3);
    quotient(numerator, denominator, scale, "||curl w||_1")
}

/// `||w||_2 / ||grad w||_1`.
pub fn gn_ratio(w: &ScalarField) -> Result<Ratio> {
    if !w.has_zero_mean() {
        return Err(LabError::NonzeroMean { mean: w.mean(), s: 0.0 });
    }
    let numerator = w.lp_norm(2.0)?;
    let denominator = w.gradient().lp_norm(1.0)?;
    let scale = gradient_scale(w.max_abs(), w.grid().box_length(), w.grid().dim());
    quotient(numerator, denominator, scale, "||grad w||_1")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioKind {
    Bb2d,
    Bb3d,
    Gn,
}

impl RatioKind {
    pub fn dim(self) -> usize {
        match self {
            RatioKind::Bb3d => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RatioKind::Bb2d => "bb-ratio-2d",
            RatioKind::Bb3d => "bb-ratio-3d",
            RatioKind::Gn => "gn-ratio",
        }
    }
}

/// Ratio of sample `index` of the family described by `spec`.
pub fn sample_ratio(kind: RatioKind, spec: &RandomFieldSpec, index: usize) -> Result<Ratio> {
    if spec.dim != kind.dim() {
        return Err(LabError::WrongDimension { expected: kind.dim(), found: spec.dim });
    }
    match kind {
        RatioKind::Bb2d => bb_ratio_2d(&scalar_sample(spec, index)?),
        RatioKind::Gn => gn_ratio(&scalar_sample(spec, index)?),
        RatioKind::Bb3d => bb_ratio_3d(&solenoidal_sample(spec, index)?),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub index: usize,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub kind: RatioKind,
    pub spec: RandomFieldSpec,
    pub rows: Vec<RatioRow>,
    /// Samples dropped for a vanishing denominator.
    pub discarded: usize,
    pub family_max: f64,
    pub family_mean: f64,
    /// Index of the first sample attaining the maximum.
    pub argmax: usize,
}

pub fn ratio_family(kind: RatioKind, spec: &RandomFieldSpec) -> Result<RatioReport> {
    spec.validate()?;
    let idx: Vec<usize> = (0..spec.count).collect();
    let results = map_ordered(&idx, |&i| sample_ratio(kind, spec, i));
    let mut rows = Vec::with_capacity(spec.count);
    let mut discarded = 0;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(r) => {
                rows.push(RatioRow { index: i, numerator: r.numerator, denominator: r.denominator, ratio: r.value() })
            }
            Err(LabError::ZeroDenominator(_)) => discarded += 1,
            Err(e) => return Err(e),
        }
    }
    if rows.is_empty() {
        return Err(LabError::ZeroDenominator("every sample was discarded".into()));
    }
    let mut argmax = rows[0].index;
    let mut family_max = rows[0].ratio;
    for r in &rows[1..] {
        if r.ratio > family_max {
            family_max = r.ratio;
            argmax = r.index;
        }
    }
    let family_mean = rows.iter().map(|r| r.ratio).sum::<f64>() / rows.len() as f64;
    Ok(RatioReport { kind, spec: *spec, rows, discarded, family_max, family_mean, argmax })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementTrace {
    pub kind: RatioKind,
    pub resolutions: Vec<usize>,
    pub family_max: Vec<f64>,
    /// `|max_last / max_first - 1|`.
    pub relative_change: f64,
}

/// Family maximum of the same seeded family at each resolution.
pub fn refinement_trace(
    kind: RatioKind,
    spec: &RandomFieldSpec,
    resolutions: &[usize],
) -> Result<(RefinementTrace, Vec<RatioReport>)> {
    if resolutions.len() < 2 {
        return Err(LabError::Precondition("refinement needs at least two resolutions".into()));
    }
    let reports = resolutions.iter().map(|&n| ratio_family(kind, &spec.with_n(n))).collect::<Result<Vec<_>>>()?;
    let family_max: Vec<f64> = reports.iter().map(|r| r.family_max).collect();
    let relative_change = (family_max[family_max.len() - 1] / family_max[0] - 1.0).abs();
    Ok((RefinementTrace { kind, resolutions: resolutions.to_vec(), family_max, relative_change }, reports))
}

/// One CSV row per retained sample: `seed,n,beta,index,numerator,denominator,ratio`.
pub fn write_ratio_csv(w: &mut impl Write, report: &RatioReport) -> Result<()> {
    writeln!(w, "seed,n,beta,index,numerator,denominator,ratio")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            report.spec.seed,
            report.spec.n,
            fmt_f64(report.spec.beta),
            r.index,
            fmt_f64(r.numerator),
            fmt_f64(r.denominator),
            fmt_f64(r.ratio)
        )?;
    }
    Ok(())
}
