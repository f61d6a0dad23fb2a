use std::f64::consts::PI;

use minsurf::rotating::*;
use minsurf::Error;
use proptest::prelude::*;

fn epi(n: i32, k: i32, sign: Sign) -> Epicycloid {
    epicycloid(EpicycloidParams::new(n, k, sign).unwrap())
}

/// Regular sample parameters, kept `1e-4` away from cusps.
fn regular_phis(e: &Epicycloid, count: usize) -> Vec<f64> {
    (0..count).map(|i| 2.0 * PI * (i as f64 + 0.37) / count as f64).filter(|&p| e.speed2(p) > 1e-8).collect()
}

#[test]
fn params_validation() {
    assert!(EpicycloidParams::new(1, 1, Sign::Plus).is_err());
    assert!(EpicycloidParams::new(0, 2, Sign::Plus).is_err());
    assert!(EpicycloidParams::new(-1, 2, Sign::Plus).is_err());
    assert!(EpicycloidParams::new(-1, -3, Sign::Minus).is_ok());
}

#[test]
fn epicycloid_examples() {
    let e = epi(1, 3, Sign::Plus);
    assert_eq!(e.w2, 9.0);
    let d = (e.curve.du)(0.0);
    assert!((d[0] * d[0] + d[1] * d[1] - 1.0).abs() < 1e-15);
    assert!((e.c2(0.0) - 1.0).abs() < 1e-15);
    for i in 0..100 {
        let p = 2.0 * PI * i as f64 / 100.0;
        let u = (e.curve.u)(p);
        let lhs = e.w2 * (u[0] * u[0] + u[1] * u[1]) - 1.0 - e.q * e.c2(p);
        assert!(lhs.abs() < 1e-13);
    }
}

#[test]
fn closed_forms_match_curve() {
    for (n, k) in [(1, 3), (2, 5), (1, 4), (-1, -3), (3, 1)] {
        for sign in [Sign::Plus, Sign::Minus] {
            let e = epi(n, k, sign);
            assert!(e.curve.derivative_consistency(64, 1e-5) < 1e-8);
            for p in regular_phis(&e, 100) {
                let u = (e.curve.u)(p);
                let du = (e.curve.du)(p);
                let speed = du[0] * du[0] + du[1] * du[1];
                assert!((speed - e.speed2(p)).abs() < 1e-13);
                assert!((e.w2 * (u[0] * u[0] + u[1] * u[1]) - e.w2_r2(p)).abs() < 1e-12);
                let cr = u[0] * du[1] - u[1] * du[0];
                let sin2 = cr * cr / ((u[0] * u[0] + u[1] * u[1]) * speed);
                assert!((sin2 - e.sin2_angle(p)).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn shape_equation_holds_on_epicycloids() {
    for (n, k) in [(1, 3), (2, 5), (1, 2), (-2, -3)] {
        for sign in [Sign::Plus, Sign::Minus] {
            let e = epi(n, k, sign);
            let w = e.w2.sqrt();
            let mut g0s = Vec::new();
            for p in regular_phis(&e, 200) {
                match shape_residual(&e.curve, w, e.gamma(), p) {
                    Ok(r) => {
                        assert!(r.residual.abs() <= 1e-10, "({n},{k}) φ = {p}: {}", r.residual);
                        g0s.push(r.gamma0.abs());
                    }
                    Err(Error::Degenerate) => {}
                    Err(other) => panic!("{other:?}"),
                }
            }
            let mean = g0s.iter().sum::<f64>() / g0s.len() as f64;
            let sd = (g0s.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / g0s.len() as f64).sqrt();
            assert!(sd <= 1e-10, "sd {sd}");
            assert!((mean - e.gamma0()).abs() < 1e-10);
        }
    }
}

#[test]
fn rotating_circle() {
    let r = 0.8;
    let circle = PlanarCurve {
        u: std::sync::Arc::new(move |p: f64| [r * p.cos(), r * p.sin()]),
        du: std::sync::Arc::new(move |p: f64| [-r * p.sin(), r * p.cos()]),
        d2u: std::sync::Arc::new(move |p: f64| [-r * p.cos(), -r * p.sin()]),
        period: 2.0 * PI,
    };
    for gamma in [0.0, 0.3, -0.5] {
        let s = shape_residual(&circle, 1.0 / r, gamma, 0.4).unwrap();
        assert!((s.residual - gamma).abs() < 1e-14);
    }
}

#[test]
fn minimality_along_epicycloids() {
    for (n, k) in [(1, 3), (2, 5), (1, 4), (-1, -3)] {
        for sign in [Sign::Plus, Sign::Minus] {
            let e = epi(n, k, sign);
            let w = e.w2.sqrt();
            for i in 0..200 {
                let p = 2.0 * PI * i as f64 / 200.0;
                assert!(minimality_residual(&e.curve, w, p).abs() <= 1e-9);
            }
            // A wrong frequency breaks it.
            let bad = (0..50).map(|i| minimality_residual(&e.curve, 1.1 * w, 0.1 + i as f64 * 0.1).abs());
            assert!(bad.fold(0.0, f64::max) > 1e-3);
        }
    }
}

#[test]
fn cusp_count() {
    for (n, k) in [(1, 3), (1, 4), (2, 7), (3, 1)] {
        let e = epi(n, k, Sign::Plus);
        assert_eq!(cusps(&e.curve, 20_000, 1e-6).len(), (n - k).unsigned_abs() as usize);
    }
}

#[test]
fn rolling_circle_examples() {
    let (n, k) = (2, 5);
    let minus = epi(n, k, Sign::Minus);
    let ratios: Vec<f64> = (1..40)
        .map(|i| {
            let chi = 0.15 * i as f64;
            let x = rolling_circle(n as f64, (k - n) as f64, chi).unwrap();
            let u = (minus.curve.u)(chi);
            assert!((x[0] * u[1] - x[1] * u[0]).abs() < 1e-12);
            (x[0] * x[0] + x[1] * x[1]).sqrt() / (u[0] * u[0] + u[1] * u[1]).sqrt()
        })
        .collect();
    assert!(ratios.iter().all(|r| (r - ratios[0]).abs() < 1e-10));
    assert!((ratios[0] - 2.0 * (n * k) as f64).abs() < 1e-10);

    for (n, k) in [(1, 3), (2, 5)] {
        let minus = epi(n, k, Sign::Minus);
        for i in 0..30 {
            let p = 0.2 * i as f64;
            let lhs = (minus.curve.u)(p + PI / (n - k) as f64);
            let rhs = rotated_plus(n, k, p).unwrap();
            assert!((lhs[0] - rhs[0]).abs() < 1e-14 && (lhs[1] - rhs[1]).abs() < 1e-14);
        }
    }

    let radii: Vec<f64> = (0..20)
        .map(|i| {
            let x = rolling_circle(1.5, 0.0, 0.3 * i as f64).unwrap();
            x[0].hypot(x[1])
        })
        .collect();
    assert!(radii.iter().all(|r| (r - radii[0]).abs() < 1e-14));
    assert!(rolling_circle(0.0, 1.0, 0.0).is_err());
}

#[test]
fn shape_integral_examples() {
    let g0 = 2.0;
    let s = integrate_shape(g0, (1.0, 4.0)).unwrap();
    let mut worst = 0.0f64;
    for i in 0..50 {
        let w = 1.0 + 3.0 * (i as f64 + 0.5) / 50.0;
        worst = worst.max((s.quadrature(w).unwrap() - s.closed_form(w).unwrap()).abs());
    }
    assert!(worst <= 1e-8, "{worst}");
    assert_eq!(s.closed_form(1.0).unwrap(), 0.0);
    assert!(s.closed_form(1.0 + 1e-12).unwrap().abs() < 1e-12);
    assert!((s.closed_form(4.0).unwrap() - PI / 2.0).abs() < 1e-15);
    assert!((s.quadrature(4.0).unwrap() - PI / 2.0).abs() < 1e-12);

    assert!(integrate_shape(2.0, (0.5, 2.0)).is_err());
    assert!(integrate_shape(2.0, (1.0, 4.5)).is_err());
    assert!(integrate_shape(0.9, (1.0, 1.0)).is_err());
    assert!(s.closed_form(5.0).is_err());
}

#[test]
fn shape_integral_matches_epicycloid_tangent() {
    for (a, b) in [(3.0, 1.0), (5.0, 2.0), (4.0, 3.0)] {
        for i in 1..20 {
            let phi = i as f64 / 20.0 * PI / (a - b);
            let (lhs, rhs) = tangent_pair(a, b, phi).unwrap();
            assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1.0), "({a},{b}) φ = {phi}: {lhs} {rhs}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn phase_shift_covariance(n in 1i32..5, dk in 1i32..5, shift in -3.0f64..3.0, p in 0.0f64..6.0) {
        let e = epi(n, n + dk, Sign::Plus);
        let w = e.w2.sqrt();
        let moved = e.curve.shifted(shift);
        let a = minimality_residual(&e.curve, w, p + shift);
        let b = minimality_residual(&moved, w, p);
        prop_assert!((a - b).abs() < 1e-14);
        if let (Ok(r0), Ok(r1)) = (shape_residual(&e.curve, w, e.gamma(), p + shift), shape_residual(&moved, w, e.gamma(), p)) {
            prop_assert!((r0.residual - r1.residual).abs() < 1e-13);
            prop_assert!(r1.residual.abs() < 1e-9);
        }
    }

    #[test]
    fn gamma_identity(n in 1i32..6, dk in 1i32..6) {
        let e = epi(n, n + dk, Sign::Plus);
        prop_assert!(((e.gamma() + 1.0) * e.gamma0().powi(2) - 1.0).abs() < 1e-14);
        prop_assert!(e.gamma() < 0.0);
    }
}
