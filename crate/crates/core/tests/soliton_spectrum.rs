use minsurf::soliton_spectrum::*;
use minsurf::Error;
use proptest::prelude::*;

/// Ground state of D̃, from a second-order finite-difference tridiagonal
/// eigensolver on [-60, 60] with h = 5e-4 and Richardson extrapolation.
const E_STAR: f64 = -0.563_635_542;

fn sech(z: f64) -> f64 {
    1.0 / z.cosh()
}

#[test]
fn rayleigh_of_sech_is_minus_eight_fifteenths() {
    let q = rayleigh_sech_power(1.0).unwrap();
    assert!((q + 8.0 / 15.0).abs() <= 1e-9, "{q}");
}

#[test]
fn rayleigh_of_zero_mode_vanishes() {
    let q = rayleigh_quotient_d(|z| eps_plus(z).0, |z| eps_plus(z).1, |z| eps_plus(z).2, 8.0).unwrap();
    assert!(q.abs() < 1e-10);
}

#[test]
fn rayleigh_of_odd_packet_is_positive() {
    // ψ = tanh z sech² z and ψ = sinh z · sech⁴ z.
    let f = |z: f64| z.tanh() * sech(z).powi(2);
    let df = |z: f64| sech(z).powi(4) - 2.0 * z.tanh().powi(2) * sech(z).powi(2);
    let d2f = |z: f64| {
        let (s, t) = (sech(z), z.tanh());
        -4.0 * t * s.powi(4) - 4.0 * t * s.powi(4) + 4.0 * t.powi(3) * s * s
    };
    assert!(rayleigh_quotient_d(f, df, d2f, 40.0).unwrap() >= 0.0);
}

#[test]
fn zero_modes() {
    let (p, m) = zero_mode_residuals();
    assert!(p <= 1e-10 && m <= 1e-10);
    // cosh z is not annihilated.
    let r = apply_d(1f64.cosh(), 1f64.sinh(), 1f64.cosh(), 1.0);
    let want = -(1f64.cosh() - 2.0 * 1f64.tanh() * 1f64.sinh() + 1f64.cosh()) / 1f64.cosh().powi(2);
    assert!((r - want).abs() < 1e-15 && r.abs() > 0.1);
}

#[test]
fn ground_state_of_d_tilde() {
    let g = ground_state_d(50.0).unwrap();
    assert!(g.eigenvalue < -8.0 / 15.0);
    assert!((g.eigenvalue - E_STAR).abs() < 1e-6, "{}", g.eigenvalue);
    assert!((g.eigenvalue - (-0.563636)).abs() < 5e-7);
    let s = &g.eigenfunction.samples;
    let n = s.len();
    let asym = (0..n).map(|i| (s[i] - s[n - 1 - i]).abs()).fold(0.0, f64::max);
    assert!(asym <= 1e-8);
    assert_eq!(g.index, 0);
}

#[test]
fn ground_state_is_truncation_stable() {
    let a = ground_state_d(30.0).unwrap().eigenvalue;
    let b = ground_state_d(60.0).unwrap().eigenvalue;
    assert!((a - b).abs() < 1e-8);
}

#[test]
fn odd_sector_has_no_negative_eigenvalue() {
    let odd = d_tilde_eigen(50.0, 1).unwrap();
    assert!(odd.eigenvalue > 0.0);
    assert_eq!(odd.index, 1);
}

#[test]
fn ground_state_below_trial_family() {
    let e = ground_state_d(40.0).unwrap().eigenvalue;
    for p in [1.0, 1.5, 2.0] {
        assert!(e < rayleigh_sech_power(p).unwrap());
    }
}

#[test]
fn truncation_too_small_is_rejected() {
    assert!(matches!(ground_state_d(10.0), Err(Error::InvalidArgument(_))));
}

#[test]
fn particular_riccati_solution() {
    for x in [0.01, 0.3, 1.0, 7.0, 100.0] {
        let dw = (w0(x * (1.0 + 1e-6)) - w0(x * (1.0 - 1e-6))) / (2e-6 * x);
        assert!(riccati_residual(w0(x), dw, x).abs() < 1e-7 * (1.0 + w0(x).abs()));
    }
}

#[test]
fn general_riccati_solution() {
    let sol = riccati_zero_mode(1.0, (2.0, 50.0)).unwrap();
    for x in [2.0, 3.5, 10.0, 50.0] {
        assert!(sol.residual(x).abs() <= 1e-8, "x {x}: {}", sol.residual(x));
    }
    // Analytic derivative agrees with a difference quotient.
    let x = 4.0;
    let fd = (sol.w(x + 1e-5) - sol.w(x - 1e-5)) / 2e-5;
    assert!((fd - sol.dw(x)).abs() < 1e-8);
}

#[test]
fn riccati_pole_is_reported() {
    let err = riccati_zero_mode(1.0, (1e-3, 100.0)).unwrap_err();
    match err {
        Error::Pole(x) => {
            let g = 0.5 - ((1.0 + x) / x).sqrt() + x.sqrt().asinh();
            assert!(g.abs() < 1e-10);
        }
        e => panic!("{e:?}"),
    }
}

#[test]
fn y_form_matches_x_form() {
    for (c, a) in [(1.0, 2.0), (-0.5, 1.0), (3.0, -1.0)] {
        let ct = c_tilde_from(c, a);
        let sol = riccati_zero_mode(ct, (f64::NAN, f64::NAN)).unwrap();
        for y in [0.5, 1.0, 2.0, 4.0] {
            let x = y * y;
            if (x - sol.pole).abs() < 0.1 {
                continue;
            }
            let lhs = sol.w(x);
            let rhs = w_from_y_form(c, a, y);
            assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs()), "{c} {a} {y}: {lhs} {rhs}");
        }
    }
    // A = 0 reproduces W₀.
    for y in [0.3, 1.0, 3.0] {
        assert!((w_from_y_form(1.0, 0.0, y) - w0(y * y)).abs() < 1e-14);
    }
}

#[test]
fn riccati_large_x_asymptotics() {
    let sol = riccati_zero_mode(0.0, (f64::NAN, f64::NAN)).unwrap();
    let dev: Vec<f64> = [1e4, 1e10, 1e20, 1e40].iter().map(|&x| (4.0 * x * sol.w(x) - 1.0).abs()).collect();
    assert!(dev.windows(2).all(|w| w[1] < w[0]));
    assert!(dev[3] < 0.05);
}

#[test]
fn exact_h_eigenfunctions() {
    let c = h_eigen_check(1.0);
    assert!(c.scattering <= 1e-10 && c.bound <= 1e-10);
    let c0 = h_eigen_check(0.0);
    assert!(c0.scattering <= 1e-12);
    // ψ₀ = -tanh z.
    let (p, _, _) = psi_scattering(0.0, 0.7);
    assert!((p.re + 0.7f64.tanh()).abs() < 1e-15 && p.im == 0.0);
}

#[test]
fn bound_state_orthogonality() {
    for k in [0.5, 1.0, 2.0] {
        let (ov, norm) = bound_state_overlaps(k, 40.0).unwrap();
        assert!(ov.norm() < 1e-10, "k {k}: {ov}");
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn z_and_y_forms_agree(c1 in -1.0f64..1.0, c2 in 0.2f64..1.5, c3 in -1.0f64..1.0) {
        // ε(z) = (c1 + c3 z) exp(-c2 z²).
        let e = move |z: f64| (c1 + c3 * z) * (-c2 * z * z).exp();
        let de = move |z: f64| (c3 - 2.0 * c2 * z * (c1 + c3 * z)) * (-c2 * z * z).exp();
        let d2e = move |z: f64| {
            let p = c1 + c3 * z;
            (-2.0 * c2 * p - 4.0 * c2 * z * c3 + 4.0 * c2 * c2 * z * z * p) * (-c2 * z * z).exp()
        };
        for y in [-3.0, -1.0, -0.2, 0.0, 0.5, 2.0, 4.0] {
            let (a, b) = conjugation_pair(e, de, d2e, y);
            prop_assert!((a - b).abs() <= 1e-8);
        }
        for z in [-2.0, -0.5, 0.1, 1.3] {
            let direct = apply_d(e(z), de(z), d2e(z), z);
            let fact = apply_d_factorized(e(z), de(z), d2e(z), z);
            prop_assert!((direct - fact).abs() <= 1e-8);
        }
    }
}
