use std::f64::consts::PI;

use spectral_lab::biot_savart::velocity_from_vorticity_2d;
use spectral_lab::mild::{
    apply_t, continuous_dependence_experiment, heat_trajectory, picard_solve, sup_w11_distance, MildSolveConfig,
};
use spectral_lab::oseen::oseen_dipole;
use spectral_lab::random::RandomFieldSpec;
use spectral_lab::ratio_lab::{bb_ratio_2d, ratio_family, RatioKind};
use spectral_lab::stats::fit_log_log;
use spectral_lab::stepper::{reference_stepper, StepperConfig};
use spectral_lab::{Grid, ScalarField};

fn torus(n: usize) -> Grid {
    Grid::new(2, n, 2.0 * PI).unwrap()
}

fn dipole(n: usize) -> ScalarField {
    oseen_dipole(1.0, 2.0, &torus(n), 0.02).unwrap()
}

fn cfg(t0: f64) -> MildSolveConfig {
    MildSolveConfig { t0, nt: 16, quad_m: 64, tol: 1e-10, max_iter: 60, nonlinear: true }
}

/// `||div(v w)||_{W11}` of the initial transport term.
fn forcing_w11(w: &ScalarField) -> f64 {
    let v = velocity_from_vorticity_2d(w).unwrap().into_inner();
    let f1 = v.component(0).zip_with(w, |a, b| a * b).unwrap();
    let f2 = v.component(1).zip_with(w, |a, b| a * b).unwrap();
    (&f1.derivative(0).unwrap() + &f2.derivative(1).unwrap()).w11_norm().unwrap()
}

/// `sup_t ||T(heat) - heat||_{W11}` for each horizon.
fn first_corrections(w0: &ScalarField, horizons: &[f64]) -> Vec<f64> {
    horizons
        .iter()
        .map(|&t0| {
            let c = cfg(t0);
            let h = heat_trajectory(w0, &c).unwrap();
            sup_w11_distance(&apply_t(&h, w0, &c).unwrap(), &h).unwrap()
        })
        .collect()
}

// Wide cores on a large box, so the horizons are short against the core
// diffusion time and the leading term dominates.
fn wide_dipole() -> ScalarField {
    oseen_dipole(1.0, 6.0, &Grid::new(2, 64, 8.0 * PI).unwrap(), 0.5).unwrap()
}

#[test]
fn first_correction_is_the_transport_forcing_times_the_horizon() {
    let w0 = wide_dipole();
    let horizons = [0.01, 0.02, 0.04];
    let d = first_corrections(&w0, &horizons);
    let slope = fit_log_log(&horizons, &d).unwrap().slope;
    assert!((slope - 1.0).abs() < 0.1, "slope {slope}");
    let lead = horizons[0] * forcing_w11(&w0);
    assert!((d[0] / lead - 1.0).abs() < 0.05, "{} vs {lead}", d[0]);
}

#[test]
#[ignore = "expected red: the first correction of an interacting dipole is at most linear in t0"]
fn first_correction_three_halves_scaling() {
    let horizons = [0.01, 0.02, 0.04];
    let d = first_corrections(&dipole(64), &horizons);
    let slope = fit_log_log(&horizons, &d).unwrap().slope;
    assert!(slope >= 1.4, "slope {slope}");
}

#[test]
fn converged_dipole_run() {
    let w0 = dipole(64);
    let c = cfg(5e-3);
    let (sol, trace) = picard_solve(&w0, &c).unwrap();
    assert!(trace.converged);
    assert!(trace.iterations.len() <= c.max_iter);
    assert!(trace.iterations.iter().skip(1).all(|it| it.ratio.unwrap() < 1.0));

    // fixed-point residual
    let residual = sup_w11_distance(&apply_t(&sol, &w0, &c).unwrap(), &sol).unwrap();
    assert!(residual <= c.tol, "{residual}");

    // mean conservation and the ball of radius 8 A0
    for w in sol.fields() {
        assert!(w.mean().abs() <= 1e-12 * w.max_abs());
        assert!(w.w11_norm().unwrap() <= 8.0 * trace.a0);
    }
    assert!(trace.sup_of("Linf_v").is_finite() && trace.sup_of("Linf_v") > 0.0);

    // velocity bound with the measured lab constant
    let family = ratio_family(
        RatioKind::Bb2d,
        &RandomFieldSpec { seed: 2024, beta: 2.0, dim: 2, n: 64, box_length: 2.0 * PI, count: 24, k_max: 16 },
    )
    .unwrap();
    let cos = bb_ratio_2d(&ScalarField::from_fn(torus(64), |x| x[0].cos())).unwrap().value();
    let c_lab = family.family_max.max(cos);
    let lhs = trace.sup_of("Linf_v") + trace.sup_of("L2_gradv");
    let grad = trace.sup_of("L1_grad");
    assert!(lhs <= 1.05 * c_lab * grad, "{lhs} > 1.05 * {c_lab} * {grad}");
}

#[test]
fn dependence_on_rescaled_datum_is_bounded() {
    let w0 = dipole(32);
    let c = MildSolveConfig { nt: 8, quad_m: 32, ..cfg(5e-3) };
    let deltas: Vec<ScalarField> = [0.0, 1e-2, 1e-3, 1e-4].iter().map(|&e| w0.scale(e)).collect();
    let report = continuous_dependence_experiment(&w0, &deltas, &c).unwrap();
    assert_eq!(report.rows[0].output_sup_w11, 0.0);
    let ratios: Vec<f64> = report.rows[1..].iter().map(|r| r.ratio).collect();
    eprintln!("output / input for eps w0: {ratios:?}");
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    assert!(hi.is_finite() && hi / lo < 1.5, "{ratios:?}");
    assert!((report.slope.unwrap() - 1.0).abs() < 0.1);
}

#[test]
fn stepper_follows_heat_decay_of_a_steady_mode() {
    let g = torus(32);
    let w0 = ScalarField::from_fn(g, |x| 0.1 * (x[0].cos() + x[1].cos()));
    let (traj, _) = reference_stepper(&w0, &StepperConfig { t0: 0.5, nt: 9, nt_fine: 64 }).unwrap();
    for (t, w) in traj.times().iter().zip(traj.fields()) {
        let exact = w0.scale((-t).exp());
        assert!((w - &exact).max_abs() <= 1e-4 * w0.max_abs(), "t {t}");
    }
}

#[test]
fn stepper_dipole_keeps_zero_circulation_and_converges_in_n() {
    let sup_trace = |n: usize| {
        let (traj, diag) = reference_stepper(&dipole(n), &StepperConfig { t0: 5e-3, nt: 9, nt_fine: 64 }).unwrap();
        for w in traj.fields() {
            assert!(w.mean().abs() <= 1e-12);
        }
        assert!(diag.mean_drift <= 1e-12);
        traj.fields().iter().map(|w| w.w11_norm().unwrap()).collect::<Vec<_>>()
    };
    let coarse = sup_trace(128);
    let fine = sup_trace(256);
    for (a, b) in coarse.iter().zip(&fine) {
        assert!((a / b - 1.0).abs() < 2e-3, "{a} vs {b}");
    }
}
