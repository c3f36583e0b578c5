//! Experiment dispatch. Each kind produces a CSV table and a JSON summary;
//! neither carries timestamps, so reruns are byte-identical.

use std::fmt::Write as _;

use serde_json::{json, Value};
use spectral_lab::biot_savart::relative_divergence;
use spectral_lab::io::fmt_f64;
use spectral_lab::mild::{
    continuous_dependence_experiment, patch_dipole, picard_solve, select_horizon, sup_w11_distance, write_trace_csv,
};
use spectral_lab::oseen::{oseen_dipole, sharpness_scaling_experiment, two_decade_times};
use spectral_lab::ratio_lab::{ratio_family, write_ratio_csv, RatioKind, RatioReport};
use spectral_lab::stepper::{reference_stepper, StepperConfig};
use spectral_lab::wave::{
    propagate_wave, random_wave_fixture, strichartz_ratio_experiment, wave_energy, write_strichartz_csv,
    CurrentDensity, StrichartzReport, TimeProfile,
};
use spectral_lab::{Grid, LabError, Result, ScalarField, VectorField};

use crate::config::{Datum, ExperimentConfig, Kind, PicardSection};

pub struct Report {
    pub csv: String,
    pub json: Value,
}

fn utf8(buf: Vec<u8>) -> String {
    String::from_utf8(buf).expect("reports are ASCII")
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

/// Run a resolved config.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let grid = cfg.grid().map_err(|e| LabError::Precondition(e.to_string()))?;
    let (csv, body) = match cfg.experiment {
        Kind::OseenScaling => oseen_scaling(cfg, &grid)?,
        Kind::Picard => picard(cfg, &grid)?,
        Kind::ContinuousDependence => dependence(cfg, &grid)?,
        Kind::BbRatio2d => ratios(cfg, RatioKind::Bb2d)?,
        Kind::BbRatio3d => ratios(cfg, RatioKind::Bb3d)?,
        Kind::GnRatio => ratios(cfg, RatioKind::Gn)?,
        Kind::MaxwellStrichartz => strichartz(cfg)?,
        Kind::WaveFixture => wave_fixture(cfg, &grid)?,
    };
    let json = json!({
        "experiment": cfg.experiment.name(),
        "seed": cfg.seed,
        "n": cfg.grid.n,
        "box_length": cfg.grid.box_length,
        "result": body,
    });
    Ok(Report { csv, json })
}

fn oseen_scaling(cfg: &ExperimentConfig, grid: &Grid) -> Result<(String, Value)> {
    let o = cfg.oseen.clone().unwrap_or_default();
    let times = o.times.clone().unwrap_or_else(|| two_decade_times(grid.box_length(), o.count));
    let r = sharpness_scaling_experiment(grid, o.alpha0, &times)?;
    let mut csv = String::from("t,l1,grad_l1,w11,linf_v\n");
    for row in &r.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            fmt_f64(row.t),
            fmt_f64(row.l1),
            fmt_f64(row.grad_l1),
            fmt_f64(row.w11),
            fmt_f64(row.linf_v)
        );
    }
    let _ = writeln!(csv, "# slope_w11 = {}", fmt_f64(r.w11_fit.slope));
    let _ = writeln!(csv, "# slope_linf_v = {}", fmt_f64(r.linf_v_fit.slope));
    let _ = writeln!(csv, "# prefactor_grad_l1 = {}", fmt_f64(r.grad_l1_prefactor));
    let _ = writeln!(csv, "# prefactor_linf_v = {}", fmt_f64(r.linf_v_prefactor));
    Ok((csv, to_json(&r)))
}

fn datum(p: &PicardSection, grid: &Grid) -> Result<ScalarField> {
    match p.datum {
        Datum::OseenDipole => oseen_dipole(p.alpha0, p.separation, grid, p.t_init),
        Datum::PatchDipole => patch_dipole(grid, p.amplitude, p.radius, p.separation, p.edge),
        Datum::TwoMode => {
            let a = p.amplitude;
            Ok(ScalarField::from_fn(*grid, |x| {
                let s = 2.0 * std::f64::consts::PI / grid.box_length();
                a * ((s * x[0]).cos() + (2.0 * s * x[1]).sin())
            }))
        }
    }
}

/// Horizon from the config, or chosen by the contraction test.
fn horizon(p: &PicardSection, w0: &ScalarField) -> Result<(f64, Value)> {
    match p.t0 {
        Some(t0) => Ok((t0, json!({ "t0": t0, "chosen": false }))),
        None => {
            let h = select_horizon(w0, &p.solver(p.t_max), p.c_init, p.t_max, 12)?;
            Ok((h.t0, json!({ "chosen": true, "choice": to_json(&h) })))
        }
    }
}

fn picard(cfg: &ExperimentConfig, grid: &Grid) -> Result<(String, Value)> {
    let p = cfg.picard.clone().unwrap_or_default();
    let w0 = datum(&p, grid)?;
    let (t0, h) = horizon(&p, &w0)?;
    let solver = p.solver(t0);
    let (sol, trace) = picard_solve(&w0, &solver)?;
    let mut buf = Vec::new();
    write_trace_csv(&mut buf, &trace)?;
    let mut body = json!({
        "horizon": h,
        "trace": to_json(&trace),
        "sup_linf_v": trace.sup_of("Linf_v"),
        "sup_w11": trace.sup_of("W11"),
    });
    if p.compare_stepper {
        let (step, diag) = reference_stepper(&w0, &StepperConfig { t0, nt: solver.nt, nt_fine: 8 * (solver.nt - 1) })?;
        let gap = sup_w11_distance(&sol, &step)? / sol.sup_over_time(|w| w.w11_norm())?;
        body["stepper"] = json!({ "relative_sup_w11_gap": gap, "diagnostics": to_json(&diag) });
    }
    Ok((utf8(buf), body))
}

fn dependence(cfg: &ExperimentConfig, grid: &Grid) -> Result<(String, Value)> {
    let p = cfg.picard.clone().unwrap_or_default();
    let d = cfg.dependence.clone().unwrap_or_default();
    let w0 = datum(&p, grid)?;
    let (t0, h) = horizon(&p, &w0)?;
    let width = d.bump_width;
    let raw = ScalarField::from_fn(*grid, |x| {
        let r = grid.min_image(x, [d.bump_center[0], d.bump_center[1], 0.0]);
        -r[0] * (-(r[0] * r[0] + r[1] * r[1]) / width).exp()
    });
    let mean = raw.mean();
    let bump = raw.zip_with(&ScalarField::constant(*grid, mean), |a, b| a - b)?;
    let perts: Vec<ScalarField> = d.epsilons.iter().map(|e| bump.scale(*e)).collect();
    let r = continuous_dependence_experiment(&w0, &perts, &p.solver(t0))?;
    let mut csv = String::from("epsilon,input_w11,output_sup_w11,ratio\n");
    for (e, row) in d.epsilons.iter().zip(&r.rows) {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_f64(*e),
            fmt_f64(row.input_w11),
            fmt_f64(row.output_sup_w11),
            fmt_f64(row.ratio)
        );
    }
    if let Some(s) = r.slope {
        let _ = writeln!(csv, "# slope = {}", fmt_f64(s));
    }
    Ok((csv, json!({ "horizon": h, "report": to_json(&r) })))
}

fn ratios(cfg: &ExperimentConfig, kind: RatioKind) -> Result<(String, Value)> {
    let r = cfg.ratio.clone().unwrap_or_default();
    let spec = cfg.ratio_spec(&r);
    let mut reports: Vec<RatioReport> = vec![ratio_family(kind, &spec)?];
    for &n in &r.refine {
        reports.push(ratio_family(kind, &spec.with_n(n))?);
    }
    let mut csv = String::new();
    for (i, rep) in reports.iter().enumerate() {
        let mut buf = Vec::new();
        write_ratio_csv(&mut buf, rep)?;
        let text = utf8(buf);
        // one header for the whole table
        csv.push_str(if i == 0 { &text } else { text.split_once('\n').map_or("", |x| x.1) });
    }
    let maxima: Vec<f64> = reports.iter().map(|x| x.family_max).collect();
    let change = (maxima[maxima.len() - 1] / maxima[0] - 1.0).abs();
    let body = json!({
        "kind": kind.name(),
        "resolutions": reports.iter().map(|x| x.spec.n).collect::<Vec<_>>(),
        "family_max": maxima,
        "family_mean": reports.iter().map(|x| x.family_mean).collect::<Vec<_>>(),
        "argmax": reports.iter().map(|x| x.argmax).collect::<Vec<_>>(),
        "discarded": reports.iter().map(|x| x.discarded).collect::<Vec<_>>(),
        "relative_change": change,
    });
    Ok((csv, body))
}

fn strichartz(cfg: &ExperimentConfig) -> Result<(String, Value)> {
    let s = cfg.strichartz.clone().unwrap_or_default();
    let spec = cfg.strichartz_spec(&s);
    let t_end = s.t_end.unwrap_or(cfg.grid.box_length / 4.0);
    let e = s.exponents();
    let mut reports: Vec<StrichartzReport> = Vec::new();
    for n in std::iter::once(cfg.grid.n).chain(s.refine.iter().copied()) {
        let spec_n = spec.with_n(n);
        let fixtures = (0..s.count).map(|i| random_wave_fixture(&spec_n, i, t_end)).collect::<Result<Vec<_>>>()?;
        reports.push(strichartz_ratio_experiment(&e, &fixtures, t_end, s.nt)?);
    }
    let mut csv = String::new();
    for (i, rep) in reports.iter().enumerate() {
        let mut buf = Vec::new();
        write_strichartz_csv(&mut buf, cfg.seed, rep)?;
        let text = utf8(buf);
        csv.push_str(if i == 0 { &text } else { text.split_once('\n').map_or("", |x| x.1) });
    }
    let maxima: Vec<f64> = reports.iter().map(|x| x.family_max).collect();
    let change = (maxima[maxima.len() - 1] / maxima[0] - 1.0).abs();
    let summaries: Vec<Value> = reports
        .iter()
        .map(
            |r| json!({ "n": r.n, "family_max": r.family_max, "family_mean": r.family_mean, "discarded": r.discarded }),
        )
        .collect();
    Ok((
        csv,
        json!({ "exponents": to_json(&e), "t_end": t_end, "nt": s.nt, "families": summaries, "relative_change": change }),
    ))
}

fn wave_fixture(cfg: &ExperimentConfig, grid: &Grid) -> Result<(String, Value)> {
    let w = cfg.wave.clone().unwrap_or_default();
    let t_end = w.t_end.unwrap_or(grid.box_length() / 4.0);
    let s = 2.0 * std::f64::consts::PI / grid.box_length();
    // curl (0, 0, cos(s x1) / s) = (0, sin(s x1), 0); B = (0, (1 - cos(s t)) sin(s x1) / s^2, 0)
    let j = CurrentDensity::Separable(vec![(
        VectorField::from_fn(*grid, |x| [0.0, 0.0, (s * x[0]).cos() / s]),
        TimeProfile::Constant,
    )]);
    let zero = VectorField::zeros(*grid);
    let mut csv = String::from("t,max_error,relative_divergence,energy\n");
    let mut worst: f64 = 0.0;
    propagate_wave(&zero, &zero, &j, t_end, w.nt, |_, t, b, bt| {
        let want = VectorField::from_fn(*grid, |x| [0.0, (1.0 - (s * t).cos()) * (s * x[0]).sin() / (s * s), 0.0]);
        let err = (b - &want).max_abs();
        worst = worst.max(err);
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_f64(t),
            fmt_f64(err),
            fmt_f64(relative_divergence(b)),
            fmt_f64(wave_energy(b, bt)?)
        );
        Ok(())
    })?;
    Ok((csv, json!({ "t_end": t_end, "nt": w.nt, "max_error": worst })))
}
