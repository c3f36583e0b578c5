use std::f64::consts::PI;

use proptest::prelude::*;
use spectral_lab::random::{solenoidal_sample, RandomFieldSpec};
use spectral_lab::ratio_lab::{ratio_family, RatioKind};
use spectral_lab::wave::{
    solve_wave, strichartz_admissible, strichartz_sides, CurrentDensity, StrichartzExponents, TimeProfile, WaveFixture,
};
use spectral_lab::{Grid, VectorField};

/// Composite Simpson on `[a, b]` with `m` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let inner: f64 = (1..m).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

#[test]
fn homogeneous_single_mode_quotient_matches_quadrature() {
    // B0 = (0, 0, cos 2 x1), B1 = 0: B(t) = cos(2t) B0
    let l = 2.0 * PI;
    let g = Grid::new(3, 16, l).unwrap();
    let b0 = VectorField::from_fn(g, |x| [0.0, 0.0, (2.0 * x[0]).cos()]);
    let fx = WaveFixture { b0, b1: VectorField::zeros(g), j: CurrentDensity::Zero };
    let e = StrichartzExponents::new(4.0, 4.0, 4.0, 0.5, 0.75);
    let t_end = l / 4.0;
    let [mixed, eb, ebt, lhs, rhs] = strichartz_sides(&e, &fx, t_end, 129).unwrap();

    let m = 4000;
    let space_l4 = (l * l * simpson(|x| (2.0 * x).cos().powi(4), 0.0, l, m)).powf(0.25);
    let time_l4 = simpson(|t| (2.0 * t).cos().powi(4), 0.0, t_end, m).powf(0.25);
    let l2 = (l * l * simpson(|x| (2.0 * x).cos().powi(2), 0.0, l, m)).sqrt();
    // |k| = 2: the H^s weight is 2^s; B_t carries an extra factor 2 sin(2t)
    let hs = 2f64.powf(e.s) * l2;
    let expect_lhs = space_l4 * time_l4 + 2.0 * hs;

    assert!((mixed / (space_l4 * time_l4) - 1.0).abs() < 1e-10, "{mixed}");
    assert!((eb / hs - 1.0).abs() < 1e-10);
    assert!((ebt / hs - 1.0).abs() < 1e-10);
    assert!((rhs / hs - 1.0).abs() < 1e-10);
    let ratio = lhs / rhs;
    assert!((ratio - expect_lhs / hs).abs() < 1e-9, "{ratio} vs {}", expect_lhs / hs);
}

fn random_current(spec: &RandomFieldSpec, base: usize) -> CurrentDensity {
    CurrentDensity::Separable(vec![
        (solenoidal_sample(spec, base).unwrap(), TimeProfile::Cos { omega: 3.0 }),
        (solenoidal_sample(spec, base + 1).unwrap(), TimeProfile::Constant),
    ])
}

#[test]
fn solve_wave_is_linear() {
    let spec = RandomFieldSpec { seed: 5, beta: 1.5, dim: 3, n: 16, box_length: 2.0 * PI, count: 1, k_max: 5 };
    let draw = |i| solenoidal_sample(&spec, i).unwrap();
    let (a0, a1, c0, c1) = (draw(0), draw(1), draw(2), draw(3));
    let (ja, jc) = (random_current(&spec, 10), random_current(&spec, 20));
    let (x, y) = (1.75, -0.4);
    let mut terms = Vec::new();
    for (j, c) in [(&ja, x), (&jc, y)] {
        if let CurrentDensity::Separable(parts) = j {
            terms.extend(parts.iter().map(|(f, p)| (f.scale(c), *p)));
        }
    }
    let (t_end, nt) = (1.2, 17);
    let sa = solve_wave(&a0, &a1, &ja, t_end, nt).unwrap();
    let sc = solve_wave(&c0, &c1, &jc, t_end, nt).unwrap();
    let mix = solve_wave(
        &(&a0.scale(x) + &c0.scale(y)),
        &(&a1.scale(x) + &c1.scale(y)),
        &CurrentDensity::Separable(terms),
        t_end,
        nt,
    )
    .unwrap();
    for i in 0..nt {
        let combo = &sa.b.fields()[i].scale(x) + &sc.b.fields()[i].scale(y);
        let scale = combo.max_abs().max(1e-300);
        assert!((&mix.b.fields()[i] - &combo).max_abs() <= 1e-10 * scale);
        let combo_t = &sa.bt.fields()[i].scale(x) + &sc.bt.fields()[i].scale(y);
        assert!((&mix.bt.fields()[i] - &combo_t).max_abs() <= 1e-10 * combo_t.max_abs().max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn q2_r4_fails_compatibility(qt in 2.01f64..50.0, s in -3.0f64..3.0, k in -3.0f64..3.0) {
        let v = strichartz_admissible(&StrichartzExponents::new(2.0, 4.0, qt, s, k));
        prop_assert!(!v.admissible);
        prop_assert!(v.violations.iter().any(|m| m.contains("wave compatibility")));
    }
}

#[test]
fn gn_spread_by_smoothness_is_recorded() {
    // observational only; at these settings the rougher family is the tighter one
    let spread = |beta: f64| {
        let spec = RandomFieldSpec { seed: 41, beta, dim: 2, n: 64, box_length: 2.0 * PI, count: 64, k_max: 16 };
        let r = ratio_family(RatioKind::Gn, &spec).unwrap();
        let lo = r.rows.iter().map(|x| x.ratio).fold(f64::MAX, f64::min);
        (r.family_max - lo, r.family_mean)
    };
    let (s1, m1) = spread(1.0);
    let (s4, m4) = spread(4.0);
    eprintln!("gn spread beta 1: {s1:.5} (mean {m1:.5}); beta 4: {s4:.5} (mean {m4:.5})");
    assert!(s1.is_finite() && s4.is_finite() && s1 > 0.0 && s4 > 0.0);
}
