use std::f64::consts::PI;

use spectral_lab::biot_savart::velocity_from_vorticity_2d;
use spectral_lab::oseen::{
    azimuthal_speed, dipole_centers, oseen_dipole, oseen_velocity, oseen_vorticity, sharpness_scaling_experiment,
    velocity_prefactor, OseenParams,
};
use spectral_lab::stepper::{reference_stepper, StepperConfig};
use spectral_lab::{Grid, ScalarField};

fn torus(n: usize) -> Grid {
    Grid::new(2, n, 2.0 * PI).unwrap()
}

fn centered(alpha0: f64, t: f64) -> OseenParams {
    OseenParams { alpha0, center: [PI, PI], t }
}

#[test]
fn closed_form_norms() {
    let g = torus(256);
    let t = 5e-3;
    let w = oseen_vorticity(&centered(1.0, t), &g).unwrap();
    assert!((w.lp_norm(1.0).unwrap() - 1.0).abs() < 1e-3);
    let grad = w.gradient().lp_norm(1.0).unwrap() * t.sqrt();
    assert!((grad / (PI.sqrt() / 2.0) - 1.0).abs() < 5e-3, "{grad}");
    let v = oseen_velocity(&centered(1.0, t), &g).unwrap().lp_norm(f64::INFINITY).unwrap() * t.sqrt();
    assert!((v / velocity_prefactor() - 1.0).abs() < 5e-3, "{v}");
}

#[test]
fn norms_scale_linearly_in_circulation() {
    let g = torus(64);
    let t = 0.01;
    let base = sharpness_scaling_experiment(&g, 1.0, &[t, 2.0 * t]).unwrap();
    for alpha0 in [-3.0, 0.25, 7.5] {
        let r = sharpness_scaling_experiment(&g, alpha0, &[t, 2.0 * t]).unwrap();
        for (a, b) in r.rows.iter().zip(&base.rows) {
            for (x, y) in [(a.l1, b.l1), (a.grad_l1, b.grad_l1), (a.linf_v, b.linf_v)] {
                assert!((x - alpha0.abs() * y).abs() <= 1e-12 * x.abs());
            }
        }
        assert!((r.grad_l1_prefactor - base.grad_l1_prefactor).abs() < 1e-12);
        let w = oseen_vorticity(&centered(alpha0, t), &g).unwrap();
        let w1 = oseen_vorticity(&centered(1.0, t), &g).unwrap().scale(alpha0);
        assert!((&w - &w1).max_abs() <= 1e-12 * w.max_abs());
    }
}

#[test]
fn separated_dipole_doubles_the_single_vortex_norm() {
    let g = torus(256);
    let t: f64 = 5e-3;
    let d = 8.0 * (4.0 * t).sqrt();
    let dip = oseen_dipole(1.0, d, &g, t).unwrap();
    assert!(dip.mean().abs() <= 1e-12);
    let single = oseen_vorticity(&centered(1.0, t), &g).unwrap();
    let ratio = dip.w11_norm().unwrap() / (2.0 * single.w11_norm().unwrap());
    assert!((ratio - 1.0).abs() < 5e-3, "{ratio}");
}

/// Largest deviation from the plane superposition within `r <= window` of the
/// positive core, relative to the peak single-vortex speed.
fn near_core_velocity_error(g: &Grid, w: &ScalarField, d: f64, t: f64, window: f64) -> f64 {
    let v = velocity_from_vorticity_2d(w).unwrap().into_inner();
    let [c1, c2] = dipole_centers(g, d);
    let peak = velocity_prefactor() / t.sqrt();
    let mut worst: f64 = 0.0;
    for i in 0..g.len() {
        let x = g.position(i);
        let d1 = g.min_image(x, [c1[0], c1[1], 0.0]);
        let r1 = d1[0].hypot(d1[1]);
        if r1 > window {
            continue;
        }
        let d2 = g.min_image(x, [c2[0], c2[1], 0.0]);
        let r2 = d2[0].hypot(d2[1]);
        let mut expect = [0.0; 2];
        for (dx, r, sign) in [(d1, r1, 1.0), (d2, r2, -1.0)] {
            if r > 0.0 {
                let s = sign * azimuthal_speed(1.0, t, r) / r;
                expect[0] -= dx[1] * s;
                expect[1] += dx[0] * s;
            }
        }
        let err = (v.component(0).samples()[i] - expect[0]).hypot(v.component(1).samples()[i] - expect[1]);
        worst = worst.max(err / peak);
    }
    worst
}

#[test]
fn dipole_velocity_matches_single_vortex_profiles_near_the_core() {
    // the periodic images add a near-uniform flow of size ~ d / L^2
    let g = torus(256);
    let (t, d) = (2e-3, 0.6);
    let w = oseen_dipole(1.0, d, &g, t).unwrap();
    let err = near_core_velocity_error(&g, &w, d, t, d / 4.0);
    assert!(err < 0.01, "{err}");
}

#[test]
fn stepper_carries_the_dipole_along_the_oseen_family() {
    let g = torus(128);
    let d = PI;
    let (t1, t2) = (0.01, 0.02);
    let w1 = oseen_dipole(1.0, d, &g, t1).unwrap();
    let (traj, _) = reference_stepper(&w1, &StepperConfig { t0: t2 - t1, nt: 3, nt_fine: 64 }).unwrap();
    let exact = oseen_dipole(1.0, d, &g, t2).unwrap();
    let [c1, c2] = dipole_centers(&g, d);
    let window = g.box_length() / 8.0;
    let diff = traj.last() - &exact;
    let mut worst: f64 = 0.0;
    for i in 0..g.len() {
        let x = g.position(i);
        let near = [c1, c2].iter().any(|c| {
            let dx = g.min_image(x, [c[0], c[1], 0.0]);
            dx[0].hypot(dx[1]) <= window
        });
        if near {
            worst = worst.max(diff.samples()[i].abs());
        }
    }
    let rel = worst / exact.max_abs();
    assert!(rel < 0.01, "{rel}");
}
