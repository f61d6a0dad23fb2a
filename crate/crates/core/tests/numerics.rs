use minsurf::numerics::*;
use minsurf::Error;
use proptest::prelude::*;

/// Plain bisection, kept independent of the library root finder.
fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa0 = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m).signum() == fa0.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

// Frozen from `bisect` (and cross-checked with mpmath at 30 digits).
const W0: f64 = 1.199_678_640_257_73;
const RHO2_OUTER: f64 = 0.589_387_763_469_35;

#[test]
fn oracle_constants_are_consistent() {
    assert!((bisect(|w| w * w.tanh() - 1.0, 1.0, 2.0) - W0).abs() < 1e-13);
    assert!((bisect(|w| w.cosh() - 2.0 * w, 0.1, 1.0) - RHO2_OUTER).abs() < 1e-13);
}

#[test]
fn find_root_examples() {
    let r = find_root(|w| w * w.tanh() - 1.0, 1.0, 2.0, 1e-12).unwrap();
    assert!((r - W0).abs() < 1e-11);
    assert!(find_root(|x| x, -1.0, 1.0, 1e-12).unwrap().abs() < 1e-12);
    let r = find_root(|w| w.cosh() - 2.0 * w, 0.1, 1.0, 1e-12).unwrap();
    assert!((r - RHO2_OUTER).abs() < 1e-11);
}

#[test]
fn find_root_no_bracket() {
    let e = find_root(|x| x * x + 0.5, 0.0, 1.0, 1e-10).unwrap_err();
    assert!(matches!(e, Error::NoBracket { .. }));
}

#[test]
fn rk4_examples() {
    let traj = rk4_integrate(|_, y| vec![y[0]], &[1.0], 0.0, 1.0, 1000).unwrap();
    assert_eq!(traj.len(), 1001);
    assert!((traj[1000][0] - std::f64::consts::E).abs() < 1e-10);

    let traj = rk4_integrate(|_, y| vec![0.0; y.len()], &[3.5, -1.0], 0.0, 2.0, 10).unwrap();
    assert!(traj.iter().all(|s| s == &vec![3.5, -1.0]));

    let traj = rk4_integrate(|_, y| vec![-y[0].powi(3)], &[1.0], 0.0, 5.0, 500).unwrap();
    assert_eq!(traj.len(), 501);
    assert!(traj.iter().all(|s| s[0].is_finite() && s[0] > 0.0));
}

#[test]
fn rk4_is_fourth_order() {
    let err = |steps| {
        let t = rk4_integrate(|_, y| vec![y[0]], &[1.0], 0.0, 1.0, steps).unwrap();
        (t[steps][0] - std::f64::consts::E).abs()
    };
    let ratio = err(20) / err(40);
    assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
}

#[test]
fn quad_examples() {
    let v = quad(|v: f64| 1.0 / v.cosh().powi(2), 0.0, W0, 1e-12).unwrap();
    assert!((v - W0.tanh()).abs() < 1e-11);
    assert!((v - 1.0 / W0).abs() < 1e-11);
    assert!((v - 0.83356).abs() < 1e-5);
    assert_eq!(quad(|_| 0.0, 0.0, 1.0, 1e-12).unwrap(), 0.0);
    assert!(quad(|x| x, -1.0, 1.0, 1e-12).unwrap().abs() < 1e-15);
}

#[test]
fn quad_reports_non_finite() {
    assert!(matches!(quad(|x: f64| 1.0 / x, 0.0, 1.0, 1e-10), Err(Error::Accuracy(_))));
}

#[test]
fn sl_eigen_critical_catenoid() {
    let p = SLProblem::dirichlet(|v: f64| -2.0 / v.cosh().powi(2), -W0, W0);
    let r = sl_eigen(&p, 0, 1e-14).unwrap();
    assert!(r.eigenvalue.abs() <= 1e-8, "E = {}", r.eigenvalue);
    assert_eq!(r.index, 0);
    let ef = &r.eigenfunction;
    let sup = (0..ef.len()).map(|i| (ef.samples[i] - (1.0 - ef.x(i) * ef.x(i).tanh())).abs()).fold(0.0, f64::max);
    assert!(sup <= 1e-6, "sup {sup}");
}

#[test]
fn sl_eigen_bound_state_on_line() {
    let p = SLProblem::decay(|v: f64| -2.0 / v.cosh().powi(2), 30.0).with_points(6000);
    let r = sl_eigen(&p, 0, 1e-13).unwrap();
    assert!((r.eigenvalue + 1.0).abs() < 1e-8, "E = {}", r.eigenvalue);
}

#[test]
fn sl_eigen_free_laplacian() {
    let p = SLProblem::dirichlet(|_| 0.0, 0.0, std::f64::consts::PI);
    for n in 0..4 {
        let r = sl_eigen(&p, n, 1e-13).unwrap();
        let exact = ((n + 1) * (n + 1)) as f64;
        assert!((r.eigenvalue - exact).abs() < 1e-8 * exact.max(1.0));
        assert_eq!(r.index, n);
        assert!(r.eigenfunction.samples[0].abs() < 1e-12);
        assert!(r.eigenfunction.samples.last().unwrap().abs() < 1e-12);
    }
    let g = sl_eigen(&p, 0, 1e-13).unwrap().eigenfunction;
    let sup = (0..g.len()).map(|i| (g.samples[i] - g.x(i).sin()).abs()).fold(0.0, f64::max);
    assert!(sup < 1e-8);
}

#[test]
fn sl_eigen_orders_and_domain_monotonicity() {
    let v = |x: f64| -2.0 / x.cosh().powi(2);
    let p = SLProblem::dirichlet(v, -3.0, 3.0);
    let evs: Vec<f64> = (0..4).map(|n| sl_eigen(&p, n, 1e-12).unwrap().eigenvalue).collect();
    assert!(evs.windows(2).all(|w| w[0] < w[1]));

    let mut last = f64::NEG_INFINITY;
    for w in [3.0, 2.0, 1.5, 1.0] {
        let e = sl_eigen(&SLProblem::dirichlet(v, -w, w), 0, 1e-12).unwrap().eigenvalue;
        assert!(e > last);
        last = e;
    }
}

#[test]
fn fd_examples() {
    let h = 1e-4;
    let v = fd_deriv(|x| x[0] * x[0], &[3.0], Direction::First(0), h);
    assert!((v - 6.0).abs() < 1e-8);
    let v = fd_deriv(|x| x[0].sin(), &[0.0], Direction::Second(0, 0), h);
    assert!(v.abs() < 1e-12);
    let v = fd_deriv(|x| x[0].cosh(), &[1.0], Direction::Second(0, 0), 1e-3);
    assert!((v - 1f64.cosh()).abs() < 1e-6);
    let v = fd_deriv(|x| x[0] * x[1].powi(2), &[2.0, 3.0], Direction::Second(0, 1), 1e-3);
    assert!((v - 6.0).abs() < 1e-8);
}

#[test]
fn matrix_examples() {
    let i3 = DenseMatrix::identity(3);
    assert_eq!(mat_inverse(&i3).unwrap(), i3);
    let d = mat_inverse(&DenseMatrix::diag(&[2.0, 4.0])).unwrap();
    assert_eq!(d, DenseMatrix::diag(&[0.5, 0.25]));

    let t = DenseMatrix::from_rows(&[vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]);
    let inv = mat_inverse(&t).unwrap();
    // Adjugate by hand.
    let want = DenseMatrix::from_rows(&[vec![0.75, 0.5, 0.25], vec![0.5, 1.0, 0.5], vec![0.25, 0.5, 0.75]]);
    assert!(inv.sub(&want).max_abs() < 1e-15);
    assert!((mat_det(&t) - 4.0).abs() < 1e-14);
    assert!(matches!(mat_inverse(&DenseMatrix::zeros(2, 2)), Err(Error::Singular)));
    assert_eq!(mat_det(&DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]])), 0.0);
}

fn arb_matrix(n: usize) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |mut e| {
        // Diagonal dominance keeps the sample well conditioned.
        for i in 0..n {
            e[i * n + i] += n as f64 + 1.0;
        }
        DenseMatrix { rows: n, cols: n, entries: e }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn root_brackets_sign_change(c in -5.0f64..5.0, s in 0.2f64..3.0) {
        let f = |x: f64| s * (x - c) + 0.1 * (x - c).powi(3);
        let tol = 1e-10;
        let r = find_root(f, -10.0, 10.0, tol).unwrap();
        prop_assert!(f(r - tol).signum() != f(r + tol).signum());
    }

    #[test]
    fn quad_linear_and_cubic_exact(a in -2.0f64..2.0, b in -2.0f64..2.0, c0 in -3.0f64..3.0, c3 in -3.0f64..3.0) {
        let f = |x: f64| c0 + c3 * x.powi(3);
        let exact = c0 * (b - a) + c3 * (b.powi(4) - a.powi(4)) / 4.0;
        let got = quad(f, a, b, 1e-10).unwrap();
        prop_assert!((got - exact).abs() < 1e-12 * (1.0 + exact.abs()));
        let g = |x: f64| x.sin();
        let lin = quad(|x| 2.0 * f(x) - 3.0 * g(x), a, b, 1e-12).unwrap();
        let sep = 2.0 * quad(f, a, b, 1e-12).unwrap() - 3.0 * quad(g, a, b, 1e-12).unwrap();
        prop_assert!((lin - sep).abs() < 1e-10);
    }

    #[test]
    fn inverse_times_matrix_is_identity(m in (2usize..6).prop_flat_map(arb_matrix)) {
        let inv = mat_inverse(&m).unwrap();
        let prod = mat_mul(&m, &inv);
        prop_assert!(prod.sub(&DenseMatrix::identity(m.rows)).max_abs() < 1e-10);
        let det = mat_det(&m) * mat_det(&inv);
        prop_assert!((det - 1.0).abs() < 1e-10);
    }
}
