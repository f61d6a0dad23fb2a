use minsurf::numerics::DenseMatrix;
use minsurf::separable::*;
use minsurf::Error;
use proptest::prelude::*;

/// Half the real period of ℘ with ℘'² = 4℘(℘² - 1): π / (2 agm(1, √2)).
fn half_period_oracle() -> f64 {
    let (mut a, mut b) = (1.0f64, 2f64.sqrt());
    for _ in 0..20 {
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    std::f64::consts::PI / (2.0 * a)
}

const HALF_PERIOD: f64 = 1.311_028_777_146_06;

fn quadric(coeffs: Vec<f64>, shift: f64) -> impl ScalarField {
    let n = coeffs.len();
    let (c1, c2) = (coeffs.clone(), coeffs.clone());
    AnalyticField {
        dim: n,
        value: move |x: &[f64]| x.iter().zip(&coeffs).map(|(a, c)| c * a * a).sum::<f64>() - shift,
        gradient: move |x: &[f64]| x.iter().zip(&c1).map(|(a, c)| 2.0 * c * a).collect(),
        hessian: move |_: &[f64]| DenseMatrix::diag(&c2.iter().map(|c| 2.0 * c).collect::<Vec<_>>()),
    }
}

#[test]
fn half_period_oracle_is_frozen() {
    assert!((half_period_oracle() - HALF_PERIOD).abs() < 1e-14);
    assert!((weierstrass_half_period().unwrap() - HALF_PERIOD).abs() < 1e-12);
}

#[test]
fn levelset_examples() {
    let cat = catalog("catenoid").unwrap();
    for p in sample_surface(&cat, 20, 7).unwrap() {
        assert!(levelset_residual(&cat, &p).unwrap().abs() <= 1e-10);
    }
    let plane = AnalyticField {
        dim: 3,
        value: |x: &[f64]| x[0],
        gradient: |_: &[f64]| vec![1.0, 0.0, 0.0],
        hessian: |_: &[f64]| DenseMatrix::zeros(3, 3),
    };
    assert_eq!(levelset_residual(&plane, &[0.0, 0.3, -2.0]).unwrap(), 0.0);
    // Unit sphere: |∇u|²Δu - ∇u·H∇u = 4·6 - 8 over |∇u|³ = 8.
    let sphere = quadric(vec![1.0, 1.0, 1.0], 1.0);
    assert!((levelset_residual(&sphere, &[1.0, 0.0, 0.0]).unwrap() - 2.0).abs() < 1e-14);
    assert!(matches!(levelset_residual(&sphere, &[0.0, 0.0, 0.0]), Err(Error::SingularPoint)));
}

#[test]
fn levelset_scale_invariance() {
    let x = [0.7, -0.4, 1.3];
    let base = levelset_residual(&quadric(vec![1.0, 2.0, -0.5], 0.3), &x).unwrap();
    for lambda in [-2.0, 0.5, 10.0] {
        let u = quadric(vec![lambda, 2.0 * lambda, -0.5 * lambda], 0.3 * lambda);
        let r = levelset_residual(&u, &x).unwrap();
        assert!((r - base).abs() < 1e-13 * base.abs().max(1.0), "λ = {lambda}");
    }
}

#[test]
fn every_catalog_surface_is_minimal() {
    for name in CATALOG {
        let spec = catalog(name).unwrap();
        let tol = if name == "weier4" { 1e-6 } else { 1e-8 };
        let worst = max_catalog_residual(&spec, 100, 42).unwrap();
        assert!(worst <= tol, "{name}: {worst}");
    }
}

#[test]
fn separable_matches_levelset_residual() {
    for name in ["helicoid", "scherk1", "scherk2", "clifford_cone"] {
        let spec = catalog(name).unwrap();
        for p in sample_surface(&spec, 10, 3).unwrap() {
            let a = separable_residual(&spec, &p).unwrap();
            let b = levelset_residual(&spec, &p).unwrap();
            assert!((a.abs() - b.abs()).abs() < 1e-12);
        }
    }
}

#[test]
fn off_surface_and_unknown() {
    let spec = catalog("scherk1").unwrap();
    match separable_residual(&spec, &[0.1, 0.2, 0.5]) {
        Err(Error::OffSurface(d)) => assert!(d.abs() > 0.1),
        other => panic!("{other:?}"),
    }
    assert!(matches!(catalog("enneper"), Err(Error::UnknownSurface(_))));
}

#[test]
fn catalog_derivatives_are_consistent() {
    for name in CATALOG {
        let spec = catalog(name).unwrap();
        for p in sample_surface(&spec, 5, 11).unwrap() {
            let d = spec.derivative_consistency(&p, 1e-5);
            assert!(d < 1e-6, "{name}: {d}");
        }
    }
}

/// `f'² = J(f)` per component, derived by hand.
fn fixtures(name: &str) -> Vec<fn(f64) -> f64> {
    match name {
        "catenoid" => vec![|f| 4.0 * f, |f| 4.0 * f, |f| 4.0 * f * (f + 1.0)],
        "helicoid" => vec![|f| (2.0 * f).exp(), |f| (-2.0 * f).exp(), |f| (2.0 * f).exp() + 2.0 + (-2.0 * f).exp()],
        "scherk1" => vec![|f| (2.0 * f).exp() - 1.0, |f| (-2.0 * f).exp() - 1.0, |_| 1.0],
        "scherk2" => vec![|f| 1.0 + (-2.0 * f).exp(), |f| 1.0 + (-2.0 * f).exp(), |f| (2.0 * f).exp() - 1.0],
        "quadric4" => vec![|f| (2.0 * f).exp(), |f| (2.0 * f).exp(), |f| (-2.0 * f).exp(), |f| (-2.0 * f).exp()],
        "clifford_cone" => vec![|f| 4.0 * f, |f| 4.0 * f, |f| -4.0 * f, |f| -4.0 * f],
        "weier4" => vec![
            |f| 4.0 * (f.exp() - (-f).exp()),
            |f| 4.0 * (f.exp() - (-f).exp()),
            |f| 4.0 * ((-f).exp() - f.exp()),
            |f| 4.0 * ((-f).exp() - f.exp()),
        ],
        _ => unreachable!(),
    }
}

#[test]
fn components_satisfy_first_integral_fixtures() {
    for name in CATALOG {
        let spec = catalog(name).unwrap();
        let fx = fixtures(name);
        for p in sample_surface(&spec, 20, 5).unwrap() {
            for (i, v) in spec.eval(&p).iter().enumerate() {
                let want = fx[i](v[0]);
                let tol = if name == "weier4" { 1e-7 } else { 1e-10 };
                assert!((v[1] * v[1] - want).abs() <= tol * (1.0 + want.abs()), "{name}[{i}]");
            }
        }
    }
}

#[test]
fn exponential_family_examples() {
    let r = verify_exponential_family([1.0, 1.0, -1.0, -1.0], [-1.0, -1.0, 1.0, 1.0], 1.0).unwrap();
    assert!(r.pairing_holds);
    assert!(r.max_residual <= 1e-8, "{}", r.max_residual);

    let r = verify_exponential_family([1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0], 2.0).unwrap();
    assert!(r.pairing_holds);
    assert!(r.max_residual <= 1e-8);

    let r = verify_exponential_family([1.0; 4], [1.0, 1.0, 1.0, 2.0], 1.0).unwrap();
    assert!(!r.pairing_holds);
    assert!(r.max_residual > 1e-3);

    assert!(matches!(verify_exponential_family([-1.0; 4], [-1.0; 4], 1.0), Err(Error::NotARealSurface { .. })));
}

#[test]
fn weierstrass_examples() {
    let wp = weierstrass_build(2048).unwrap();
    assert!((wp.half_period - HALF_PERIOD).abs() < 1e-12);
    let (p, dp, _) = wp.eval_all(HALF_PERIOD);
    assert!((p - 1.0).abs() < 1e-14 && dp.abs() < 1e-12);
    assert!(wp.ode_residual(997) <= 1e-8);
    assert!(wp.eval(0.01) > 1e3);
    // Laurent expansion ℘ = x⁻² + x²/5 + O(x⁶).
    let x = 0.05;
    assert!((wp.eval(x) - (1.0 / (x * x) + x * x / 5.0)).abs() < 1e-8);
    for x in [0.2, 0.9, 1.7, 2.4] {
        let p = wp.eval(x);
        assert!(p >= 1.0);
        assert!((wp.eval(-x) - p).abs() < 1e-10 * p);
        assert!((wp.eval(x + 2.0 * HALF_PERIOD) - p).abs() < 1e-10 * p);
    }
    assert!(weierstrass_build(512).is_err());
}

#[test]
fn rotational_profile_examples() {
    // N = 3, b = 2, C = 1: e = 1, r = cosh z.
    let p = rotational_profile(3, 1.0, 2.0, 2.0, 801).unwrap();
    let sup = (0..p.r.len()).map(|i| (p.r.samples[i] - p.r.x(i).cosh()).abs()).fold(0.0, f64::max);
    assert!(sup < 1e-9, "{sup}");
    assert!(p.first_integral_residual() < 1e-9);

    // N = 3, C = 4, b = 1: e = 1 as well.
    let q = rotational_profile(3, 4.0, 1.0, 1.0, 401).unwrap();
    assert!((q.r.eval(0.7) - 0.7f64.cosh()).abs() < 1e-8);

    // N = 4, b = 2, C = -1: g = r² = ℘(z + ω).
    let p = rotational_profile(4, -1.0, 2.0, 1.0, 801).unwrap();
    assert!(p.g_equation_residual() <= 1e-8);
    let wp = weierstrass_build(4096).unwrap();
    let sup =
        (0..p.r.len()).map(|i| (p.r.samples[i].powi(2) - wp.eval(p.r.x(i) + HALF_PERIOD)).abs()).fold(0.0, f64::max);
    assert!(sup < 1e-8, "{sup}");

    assert!(matches!(rotational_profile(3, 0.0, 2.0, 1.0, 101), Err(Error::NoRealProfile)));
    assert!(matches!(rotational_profile(3, -1.0, 2.0, 1.0, 101), Err(Error::NoRealProfile)));
    assert!(matches!(rotational_profile(4, 1.0, 2.0, 1.0, 101), Err(Error::NoRealProfile)));
}

#[test]
fn linear_cone_examples() {
    assert_eq!(linear_cone_coefficients(4, 2).unwrap(), vec![1.0, 1.0, -1.0, -1.0]);
    assert_eq!(linear_cone_coefficients(6, 2).unwrap(), vec![3.0, 3.0, -1.0, -1.0, -1.0, -1.0]);
    assert!(linear_cone_coefficients(6, 4).is_err());
    assert!(linear_cone_coefficients(6, 0).is_err());
    for (n, r) in [(4, 2), (5, 2), (6, 2), (6, 3), (7, 3), (9, 4)] {
        assert!(linear_cone_residual(n, r, 50, 1).unwrap() <= 1e-10, "N {n} r {r}");
    }
}

#[test]
fn wrong_cone_is_not_minimal() {
    // |a|² = |b|² in R^{2+3} is not one of the minimal cones.
    let u = quadric(vec![1.0, 1.0, -1.0, -1.0, -1.0], 0.0);
    let x = [1.0, 1.0, 1.0, 1.0, 0.0];
    assert!(levelset_residual(&u, &x).unwrap().abs() > 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scale_invariance(a in 0.2f64..2.0, b in -2.0f64..-0.2, lambda in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0],
                        x in prop::collection::vec(-2.0f64..2.0, 3)) {
        let base = levelset_residual(&quadric(vec![a, 1.0, b], 0.7), &x);
        let scaled = levelset_residual(&quadric(vec![lambda * a, lambda, lambda * b], 0.7 * lambda), &x);
        if let (Ok(r0), Ok(r1)) = (base, scaled) {
            prop_assert!((r0 - r1).abs() <= 1e-12 * r0.abs().max(1.0));
        }
    }

    #[test]
    fn scherk1_graph_points(x in -1.4f64..1.4, y in -1.4f64..1.4) {
        let spec = catalog("scherk1").unwrap();
        let z = x.cos().ln() - y.cos().ln();
        prop_assert!(separable_residual(&spec, &[x, y, z]).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn exponential_pairing_family(s in 0.2f64..3.0, kappa in 0.3f64..2.0) {
        // α = (s, s, -s, -s), β = (-s, -s, s, s) keeps every pairing.
        let r = verify_exponential_family([s, s, -s, -s], [-s, -s, s, s], kappa).unwrap();
        prop_assert!(r.pairing_holds);
        prop_assert!(r.max_residual <= 1e-8);
    }
}
