use std::f64::consts::{FRAC_PI_2, PI};

use minsurf::membrane::*;
use minsurf::numerics::GridFunction;
use minsurf::Error;
use proptest::prelude::*;

fn run_for(s: &MembraneState, t_end: f64, cfl: f64) -> PhysicalRun {
    let steps = (t_end / cfl_step(s, cfl)).ceil() as usize;
    evolve_physical(s, t_end / steps as f64, steps).unwrap()
}

fn torus_defect(m: usize) -> f64 {
    run_for(&perturbed_torus(m).unwrap(), 1.0, 0.5).max_defect()
}

fn solution() -> CatenoidNull {
    CatenoidNull::new(1.3).boosted(0.4).reparametrized(Reparam { amp: 0.3, freq: 1.0 }, Reparam { amp: 0.2, freq: 2.0 })
}

fn fields(sol: &CatenoidNull, h: f64) -> CharFields {
    let n = (1.0 / h).round() as usize + 1;
    CharFields::from_solution(sol, (1.0, h, n), (-1.0, h, n))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

// --- discretisation -------------------------------------------------------

#[test]
fn spectral_derivative_and_interpolant() {
    let sd = SpectralDiff::new(32, 3.0);
    let k = 2.0 * PI / 3.0;
    let xs: Vec<f64> = (0..32).map(|i| 3.0 * i as f64 / 32.0).collect();
    let f: Vec<f64> = xs.iter().map(|x| (k * x).sin() + 0.5 * (3.0 * k * x).cos()).collect();
    let d = sd.apply(&f);
    for (x, v) in xs.iter().zip(&d) {
        assert!((v - k * ((k * x).cos() - 1.5 * (3.0 * k * x).sin())).abs() < 1e-12);
    }
    let c = sd.coefficients(&f);
    let (v, dv) = sd.interpolate(&c, 0.37);
    assert!((v - ((k * 0.37).sin() + 0.5 * (3.0 * k * 0.37).cos())).abs() < 1e-13);
    assert!((dv - k * ((k * 0.37).cos() - 1.5 * (3.0 * k * 0.37).sin())).abs() < 1e-12);

    let g: Vec<f64> = xs.iter().map(|x| 2.0 + (k * x).cos()).collect();
    let (anti, mean) = sd.antiderivative(&g);
    assert!((mean - 2.0).abs() < 1e-14);
    assert_eq!(anti[0], 0.0);
    for (x, a) in xs.iter().zip(&anti) {
        assert!((a - (k * x).sin() / k).abs() < 1e-13);
    }
}

#[test]
fn finite_difference_stencils_are_exact_on_quartics() {
    let h = 0.1;
    let xs: Vec<f64> = (0..12).map(|i| 0.3 + i as f64 * h).collect();
    let f: Vec<f64> = xs.iter().map(|x| x.powi(4) - 2.0 * x.powi(3) + x).collect();
    let d1 = fd4_derivative(&f, h);
    let d2 = fd4_second_derivative(&f, h);
    for (i, x) in xs.iter().enumerate() {
        assert!((d1[i] - (4.0 * x.powi(3) - 6.0 * x * x + 1.0)).abs() < 1e-10);
        assert!((d2[i] - (12.0 * x * x - 12.0 * x)).abs() < 1e-8);
    }
    let n = 40;
    let hp = 2.0 * PI / n as f64;
    let s: Vec<f64> = (0..n).map(|i| (i as f64 * hp).sin()).collect();
    let dp = fd4_periodic_derivative(&s, hp);
    let err = (0..n).map(|i| (dp[i] - (i as f64 * hp).cos()).abs()).fold(0.0, f64::max);
    assert!(err < 1e-4 && err > 0.0);
}

#[test]
fn minkowski_product_signature() {
    assert_eq!(mink(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]), 1.0);
    assert_eq!(mink(&[0.0, 1.0, 0.0], &[0.0, 1.0, 0.0]), -1.0);
    assert_eq!(mink(&[5.0, 3.0, 4.0], &[5.0, 3.0, 4.0]), 0.0);
}

// --- physical gauge -------------------------------------------------------

#[test]
fn builders_satisfy_constraints() {
    let s = perturbed_torus(128).unwrap();
    let c = s.constraints(Scheme::Spectral).unwrap();
    assert!(c.max_c1() < 1e-12 && c.max_c2() < 1e-10 * s.eps * s.eps);
    let cyl = collapsing_circle(1.5, 2.0, 16).unwrap();
    assert!((cyl.eps - 3.0).abs() < 1e-15);
    assert!(cyl.constraints(Scheme::Spectral).unwrap().max_c2() < 1e-12);
    assert!(collapsing_circle(1.0, 1.0, 15).is_err());
    assert!(static_catenoid(-1.0, 41).is_err());
    let mut bad = perturbed_torus(32).unwrap();
    bad.rdot[3] = 0.5;
    assert!(evolve_physical(&bad, 1e-3, 1).is_err());
}

#[test]
fn constraint_defects_converge_at_fourth_order() {
    let d: Vec<f64> = [64, 128, 256].into_iter().map(torus_defect).collect();
    assert!(d[2] < 1e-7, "{d:?}");
    for w in d.windows(2) {
        assert!(w[0] / w[1] > 12.0, "{d:?}");
    }
}

#[test]
fn static_catenoid_is_stationary_to_scheme_order() {
    let drift = |m: usize| {
        let s = static_catenoid(1.0, m).unwrap();
        let run = run_for(&s, 1.0, 0.25);
        assert_eq!(run.termination, Termination::Completed);
        let f = run.final_state();
        (0..m).map(|i| (f.r[i] - s.r[i]).abs().max((f.z[i] - s.z[i]).abs())).fold(0.0, f64::max)
    };
    let d: Vec<f64> = [41, 81, 161].into_iter().map(drift).collect();
    assert!(d[2] < 1e-7, "{d:?}");
    for w in d.windows(2) {
        assert!(w[0] / w[1] > 12.0, "{d:?}");
    }
}

#[test]
fn static_catenoid_with_fixed_ends_stays_put_for_long_times() {
    let s = static_catenoid(1.0, 81).unwrap();
    let run = run_for(&s, 10.0, 0.25);
    assert_eq!(run.termination, Termination::Completed);
    let f = run.final_state();
    let drift = (0..s.len()).map(|i| (f.r[i] - s.r[i]).abs().max((f.z[i] - s.z[i]).abs())).fold(0.0, f64::max);
    assert!(drift < 1e-6, "{drift}");
    assert!(run.max_defect() < 1e-5, "{}", run.max_defect());
}

#[test]
fn collapsing_circle_blows_up_cleanly() {
    let s = collapsing_circle(1.0, 1.0, 32).unwrap();
    let run = evolve_physical(&s, 1e-3, 3000).unwrap();
    let t = run.blowup_time().expect("must hit the floor");
    assert!((t - FRAC_PI_2).abs() < 5e-3, "{t}");
    assert!(matches!(run.termination, Termination::Blowup { .. }));
    let rep = singularity_probe(&run).unwrap();
    assert!(rep.negative_everywhere);
    assert!(rep.accel.iter().all(|a| *a < 0.0));
    assert!(rep.discrete_accel.iter().all(|a| *a < 0.0));
    assert!((rep.blowup_time.unwrap() - FRAC_PI_2).abs() < 5e-3);
    assert_eq!(rep.termination_time, Some(t));
}

#[test]
fn generic_torus_has_finite_extrapolated_blowup() {
    let run = run_for(&perturbed_torus(64).unwrap(), 2.0, 0.5);
    let rep = singularity_probe(&run).unwrap();
    assert!(rep.negative_everywhere);
    let t = rep.blowup_time.expect("a decreasing integral extrapolates");
    assert!(t.is_finite() && t > 2.0);
    let i0 = rep.integral[0];
    assert!(rep.integral.windows(2).skip(1).all(|w| w[1] < w[0]) && *rep.integral.last().unwrap() < i0);
}

#[test]
fn stationary_probe_reports_small_acceleration() {
    let acc = |m: usize| {
        let run = run_for(&static_catenoid(1.0, m).unwrap(), 0.2, 0.25);
        singularity_probe(&run).unwrap().max_accel.abs()
    };
    let (a, b) = (acc(41), acc(161));
    assert!(b < a && b < 1e-4, "{a} {b}");
}

#[test]
fn hermite_state_interpolation() {
    let s = perturbed_torus(64).unwrap();
    let run = run_for(&s, 0.3, 0.5);
    let mid = run.snapshots[5].t;
    let at = run.state_at(mid).unwrap();
    assert!(max_abs(&at.r.iter().zip(&run.snapshots[5].state.r).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-14);
    assert!(run.state_at(10.0).is_err());
}

// --- light-cone gauge -----------------------------------------------------

fn ring_run(m: usize) -> RRun {
    let s = RState::from_fn(2.0 * PI, m, |p| 1.0 + 0.1 * p.cos(), |_| 0.0).unwrap();
    let dt = 0.5 * s.dphi() / 1.1;
    let steps = (1.0 / dt).ceil() as usize;
    evolve_r(&s, 1.0 / steps as f64, steps).unwrap()
}

#[test]
fn light_cone_energy_is_conserved() {
    let (coarse, fine) = (ring_run(128), ring_run(256));
    assert!(fine.max_drift <= 1e-8, "{}", fine.max_drift);
    assert!(fine.blowup.is_none());
    assert!(coarse.max_drift > fine.max_drift);
}

#[test]
fn zeta_compatibility_converges_at_fourth_order() {
    let (a, b) = (reconstruct_zeta(&ring_run(128)).unwrap(), reconstruct_zeta(&ring_run(256)).unwrap());
    assert!(a.compat_defect / b.compat_defect > 12.0, "{} {}", a.compat_defect, b.compat_defect);
    assert!(b.periodicity_defect < 1e-12);
    assert_eq!(b.zeta[0][0], 0.0);
}

#[test]
fn gauges_agree_under_refinement() {
    let profile = |p: f64| (1.0 + 0.3 * p.cos(), -0.3 * p.sin());
    let dist = |m: usize, steps: usize| {
        let (phys0, lc0) = matched_ring(profile, m, m).unwrap();
        let phys = run_for(&phys0, 1.0, 0.25);
        let lc = evolve_r(&lc0, 0.5 / steps as f64, steps).unwrap();
        let z = reconstruct_zeta(&lc).unwrap();
        cross_gauge_distance(&phys, &lc, &z, steps).unwrap()
    };
    let d = [dist(32, 100), dist(64, 200), dist(128, 400)];
    assert!(d[2] < 1e-10, "{d:?}");
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
}

// --- linearised catenoid --------------------------------------------------

#[test]
fn unstable_mode_grows_like_cosh() {
    let (mode, e_star) = unstable_mode(4.0, 401).unwrap();
    assert!(e_star < -8.0 / 15.0);
    let run = linearized_catenoid_mode(&mode, 0.005, 2000).unwrap();
    let kappa = cosh_growth_rate(&run.times, &run.center).unwrap();
    assert!((kappa - (-e_star).sqrt()).abs() < 1e-6, "{kappa} {e_star}");
}

#[test]
fn zero_mode_drifts_linearly_and_odd_data_stays_bounded() {
    let eps_plus = GridFunction::from_fn(-4.0, 4.0, 401, |z| minsurf::soliton_spectrum::eps_plus(z).0);
    let run = linearized_catenoid_mode_with_velocity(&eps_plus, &eps_plus, 0.01, 1000).unwrap();
    let mid = run.center.len() - 1;
    let expect = 11.0 * eps_plus.samples[200];
    assert!((run.center[mid] - expect).abs() < 1e-3 * expect.abs());

    let packet = GridFunction::from_fn(-4.0, 4.0, 401, |z| (3.0 * z).sin() * (-z * z).exp());
    let run = linearized_catenoid_mode(&packet, 0.005, 2000).unwrap();
    let n0 = run.norm[0];
    assert!(run.norm.iter().all(|n| *n < 3.0 * n0));
    assert!(cosh_growth_rate(&[1.0], &[2.0, 1.0]).is_none());
}

// --- characteristic coordinates -------------------------------------------

#[test]
fn analytic_fields_satisfy_the_null_system() {
    let f = fields(&solution(), 0.02);
    let r = char_residuals(&f);
    assert!(r.null < 1e-12 && r.wave < 1e-12, "{r:?}");
    assert!(r.max_identity() <= 1e-10, "{r:?}");
}

#[test]
fn march_converges_and_null_defect_follows_scheme_order() {
    let sol = solution();
    let mut errs = Vec::new();
    let mut defects = Vec::new();
    for h in [0.04f64, 0.02, 0.01] {
        let n = (0.6 / h).round() as usize + 1;
        let rep = evolve_characteristic(&NullData::from_solution(&sol, (1.0, h, n), (-1.0, h, n))).unwrap();
        let exact = CharFields::from_solution(&sol, (1.0, h, n), (-1.0, h, n));
        let err = rep
            .fields
            .jets
            .iter()
            .zip(&exact.jets)
            .map(|(a, b)| (0..3).map(|c| (a.x[c] - b.x[c]).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        // interior cells stay at the level set by the initial lines
        assert!(rep.null_defect <= 1.5 * rep.initial_null_defect);
        assert!(rep.max_iterations < 100);
        errs.push(err);
        defects.push(rep.null_defect);
    }
    for k in 0..2 {
        let (e, d) = (errs[k] / errs[k + 1], defects[k] / defects[k + 1]);
        assert!(e > 3.5 && e < 4.5, "{errs:?}");
        assert!(d > 3.5 && d < 4.5, "{defects:?}");
    }
    assert!(errs[2] < 1e-7);
}

#[test]
fn march_rejects_bad_data_and_stops_at_the_axis() {
    let sol = solution();
    let mut data = NullData::from_solution(&sol, (1.0, 0.02, 21), (-1.0, 0.02, 21));
    data.along_plus[4][1] += 1e-3;
    assert!(matches!(evolve_characteristic(&data), Err(Error::InvalidArgument(_))));
    let mut data = NullData::from_solution(&sol, (1.0, 0.02, 21), (-1.0, 0.02, 21));
    data.along_minus[0][0] += 0.1;
    assert!(evolve_characteristic(&data).is_err());

    // an ingoing null cone reaches r = 0
    let v = 1.0 / 2f64.sqrt();
    let cone = NullData {
        tp0: 0.0,
        hp: 0.05,
        tm0: 0.0,
        hm: 0.05,
        along_plus: (0..40).map(|i| [i as f64 * 0.05, 1.0 - v * i as f64 * 0.05, v * i as f64 * 0.05]).collect(),
        along_minus: (0..40).map(|j| [j as f64 * 0.05, 1.0 - v * j as f64 * 0.05, -v * j as f64 * 0.05]).collect(),
    };
    assert!(matches!(evolve_characteristic(&cone), Err(Error::BlowupAt { .. })));
}

#[test]
fn light_cone_reduction_on_solution_fields() {
    let lc = lightcone_reduce(&fields(&solution(), 0.01)).unwrap();
    assert!(lc.pair[0] <= 1e-7 && lc.pair[1] <= 1e-7, "{:?}", lc.pair);
    assert!(lc.xi_relation <= 1e-10 && lc.rho_form.iter().all(|v| *v <= 1e-7));
    assert!(lc.r_equation <= 1e-6 && lc.zeta_relation <= 1e-6, "{} {}", lc.r_equation, lc.zeta_relation);
}

#[test]
fn light_cone_chart_breaks_down_at_the_neck() {
    let f = CharFields::from_solution(&CatenoidNull::new(1.0), (-0.5, 0.05, 21), (-0.5, 0.05, 21));
    assert!(matches!(lightcone_reduce(&f), Err(Error::ChartBreakdown(_))));
}

#[test]
fn residual_suites_are_reparametrization_invariant() {
    let plain = fields(&CatenoidNull::new(1.3).boosted(0.4), 0.01);
    let other = fields(&solution(), 0.01);
    let third = fields(
        &CatenoidNull::new(1.3).boosted(0.4).reparametrized(Reparam { amp: -0.15, freq: 2.5 }, Reparam::IDENTITY),
        0.01,
    );
    for f in [&plain, &other, &third] {
        assert!(char_residuals(f).max_identity() <= 1e-10);
        let g = gcmp_residuals(f).unwrap();
        assert!(g.max_identity() <= 1e-6 && g.minimality <= 1e-7);
        let z = zero_curvature_residual(f, &|_, _| 1.0).unwrap();
        assert!(z.so12 <= 1e-6 && z.sl2 <= 1e-6, "{z:?}");
        let lc = lightcone_reduce(f).unwrap();
        assert!(lc.pair.iter().all(|v| *v <= 1e-7));
    }
    assert_ne!(plain.jets[40].x, other.jets[40].x);
}

// --- GCMP and zero curvature ---------------------------------------------

#[test]
fn gcmp_identities_and_minimality() {
    let g = gcmp_residuals(&fields(&solution(), 0.01)).unwrap();
    assert!(g.max_identity() <= 1e-6, "{g:?}");
    assert!(g.minimality <= 1e-7 && g.log_w <= 1e-6 && g.h_symmetric);
}

#[test]
fn perturbed_fields_violate_minimality() {
    let f = fields(&solution(), 0.02);
    let base = f.positions();
    let rebuilt = CharFields::from_nodes((f.tp0, f.hp, f.np), (f.tm0, f.hm, f.nm), &base).unwrap();
    let clean = gcmp_residuals(&rebuilt).unwrap().minimality;
    let mut bumped = base.clone();
    for i in 0..f.np {
        for j in 0..f.nm {
            let (p, m) = f.theta(i, j);
            let d2 = (p - 1.5).powi(2) + (m + 0.5).powi(2);
            bumped[f.idx(i, j)][1] += 1e-3 * (-d2 / 0.02).exp();
        }
    }
    let pert = CharFields::from_nodes((f.tp0, f.hp, f.np), (f.tm0, f.hm, f.nm), &bumped).unwrap();
    let dirty = gcmp_residuals(&pert).unwrap().minimality;
    assert!(clean < 1e-6 && dirty > 100.0 * clean, "{clean} {dirty}");
}

#[test]
fn degenerate_null_frame_is_reported() {
    let mut f = fields(&solution(), 0.05);
    f.jets[7].xm = f.jets[7].xp;
    assert!(matches!(gcmp_residuals(&f), Err(Error::NullDegeneracy(_))));
    assert!(matches!(zero_curvature_residual(&f, &|_, _| 1.0), Err(Error::NullDegeneracy(_))));
}

#[test]
fn so12_generators_close_exactly() {
    assert_eq!(generator_relations(), 0.0);
    let [t1, t2, t0] = generators();
    assert_eq!(t1.rows, 3);
    assert_eq!(t2[(0, 1)], t2[(1, 0)]);
    assert_eq!(t0[(1, 2)], -t0[(2, 1)]);
}

#[test]
fn zero_curvature_in_both_representations() {
    let f = fields(&solution(), 0.005);
    let base = zero_curvature_residual(&f, &|_, _| 1.0).unwrap();
    assert!(base.so12 <= 1e-6 && base.sl2 <= 1e-6, "{base:?}");
    let lambdas: [&dyn Fn(f64, f64) -> f64; 3] =
        [&|p, m| 1.0 + 0.3 * p.sin() * m.cos(), &|p, m| (0.2 * p - 0.1 * m).exp(), &|p, m| {
            1.5 + 0.5 * (p - 2.0 * m).tanh()
        }];
    for lam in lambdas {
        let z = zero_curvature_residual(&f, lam).unwrap();
        assert!((z.so12 - base.so12).abs() <= 1e-8 && (z.sl2 - base.sl2).abs() <= 1e-8, "{z:?} {base:?}");
        assert!(z.gauge_transport <= 1e-8);
    }
    assert!(zero_curvature_residual(&f, &|_, _| -1.0).is_err());
}

// --- graphs ---------------------------------------------------------------

#[test]
fn boosted_catenoid_graph_is_minimal() {
    let g = BoostedCatenoidGraph::new(1.0, 0.5).unwrap();
    let pts = [(1.5, 0.3), (2.0, -1.0), (3.0, 2.0), (1.2, 0.0)];
    let res = graph_residuals(&|r, z| g.t(r, z), &pts, 2e-3).unwrap();
    assert!(res.time_graph <= 1e-6, "{res:?}");
    // t is linear in z, so the dual map degenerates
    assert_eq!(res.monge_ampere, None);
    assert!(BoostedCatenoidGraph::new(1.0, 1.0).is_err());
}

#[test]
fn graph_controls() {
    let plane = time_graph_residual(&|_, z| 1.5 * z + 0.2, 1.3, 0.4, 1e-2).unwrap();
    assert!(plane.abs() < 1e-10);
    let cone = time_graph_residual(&|r, _| 2.0 * r, 1.5, 0.0, 1e-2).unwrap();
    assert!((cone - 4.0).abs() < 1e-9);
    let g = BoostedCatenoidGraph::new(1.0, 0.5).unwrap();
    assert!(matches!(time_graph_residual(&|r, z| g.t(r, z), 0.99, 0.0, 1e-2), Err(Error::NotAGraph)));
    assert!(matches!(time_graph_residual(&|_, z| 0.5 * z, 1.0, 0.0, 1e-2), Err(Error::NotAGraph)));
}

#[test]
fn legendre_dual_matches_direct_potential() {
    // t = (a r² + b z²)/2 has dual q = −x₁²/(2b) − x₂²/(2a)
    let (a, b) = (1.7, 2.3);
    let t = move |r: f64, z: f64| 0.5 * (a * r * r + b * z * z);
    let q = move |x1: f64, x2: f64| -x1 * x1 / (2.0 * b) - x2 * x2 / (2.0 * a);
    let jet = GraphJet::from_fn(&t, 0.8, 0.6, 1e-3).unwrap();
    let (x1, x2) = jet.dual_point();
    let (y1, y2, qv) = legendre_point(&t, 0.8, 0.6, 1e-3).unwrap();
    assert!((x1 - y1).abs() < 1e-12 && (x2 - y2).abs() < 1e-12 && (qv - q(x1, x2)).abs() < 1e-9);
    let direct = monge_ampere_residual(&q, x1, x2, 1e-3).unwrap();
    let via = jet.monge_ampere_raw().unwrap();
    assert!(direct.abs() > 0.1);
    assert!((direct - via).abs() < 1e-8 * direct.abs(), "{direct} {via}");
}

#[test]
fn characteristic_fields_read_as_a_graph() {
    let res = graph_residuals_from_fields(&fields(&solution(), 0.02)).unwrap();
    assert!(res.time_graph <= 1e-10 && res.points == 51 * 51);
}

#[test]
fn simulation_output_satisfies_graph_and_monge_ampere() {
    let res: Vec<GraphResiduals> = [64, 128, 256]
        .into_iter()
        .map(|m| {
            let run = run_for(&perturbed_torus(m).unwrap(), 0.5, 0.25);
            assert!(matches!(graph_residuals_from_physical(&run, 0), Err(Error::NotAGraph)));
            graph_residuals_from_physical(&run, run.snapshots.len() - 1).unwrap()
        })
        .collect();
    assert!(res[2].time_graph <= 1e-6 && res[2].monge_ampere.unwrap() <= 1e-6, "{res:?}");
    for w in res.windows(2) {
        assert!(w[0].time_graph / w[1].time_graph > 12.0);
        assert!(w[0].monge_ampere.unwrap() / w[1].monge_ampere.unwrap() > 12.0);
    }
}

// --- properties -----------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectral_derivative_exact_on_trig_polynomials(a in -2.0f64..2.0, b in -2.0f64..2.0, k in 1usize..7, shift in 0.0f64..6.3) {
        let n = 16;
        let sd = SpectralDiff::new(n, 2.0 * PI);
        let xs: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
        let kf = k as f64;
        let f: Vec<f64> = xs.iter().map(|x| a * (kf * x + shift).sin() + b).collect();
        let d = sd.apply(&f);
        for (x, v) in xs.iter().zip(&d) {
            prop_assert!((v - a * kf * (kf * x + shift).cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn parametric_jet_is_parametrization_free(m11 in 0.5f64..2.0, m12 in -0.5f64..0.5, m21 in -0.5f64..0.5, m22 in 0.5f64..2.0, c in -0.3f64..0.3) {
        // graph of t = 2z + 0.3 r² + 0.1 r z over the image of s ↦ (r, z) = M s + quadratic
        let tf = |r: f64, z: f64| 2.0 * z + 0.3 * r * r + 0.1 * r * z;
        let (r0, z0) = (1.2, 0.4);
        let pos = |s1: f64, s2: f64| (r0 + m11 * s1 + m12 * s2 + c * s1 * s2, z0 + m21 * s1 + m22 * s2 + c * s1 * s1);
        let h = 1e-3;
        let x = |s1: f64, s2: f64| { let (r, z) = pos(s1, s2); [tf(r, z), r, z] };
        let d = |i: usize, j: usize| -> [f64; 3] {
            let e = |k: usize| if k == 0 { (h, 0.0) } else { (0.0, h) };
            let (a, b) = (e(i), e(j));
            let p = x(a.0 + b.0, a.1 + b.1);
            let q = x(a.0 - b.0, a.1 - b.1);
            let u = x(-a.0 + b.0, -a.1 + b.1);
            let v = x(-a.0 - b.0, -a.1 - b.1);
            std::array::from_fn(|k| (p[k] - q[k] - u[k] + v[k]) / (4.0 * h * h))
        };
        let first = |i: usize| -> [f64; 3] {
            let (p, q) = if i == 0 { (x(h, 0.0), x(-h, 0.0)) } else { (x(0.0, h), x(0.0, -h)) };
            std::array::from_fn(|k| (p[k] - q[k]) / (2.0 * h))
        };
        let jet = GraphJet::from_parametric(x(0.0, 0.0), [first(0), first(1)], [[d(0, 0), d(0, 1)], [d(1, 0), d(1, 1)]]).unwrap();
        prop_assert!((jet.t_r - (0.6 * r0 + 0.1 * z0)).abs() < 1e-5);
        prop_assert!((jet.t_z - (2.0 + 0.1 * r0)).abs() < 1e-5);
        prop_assert!((jet.t_rr - 0.6).abs() < 1e-4);
        prop_assert!(jet.t_zz.abs() < 1e-4);
        prop_assert!((jet.t_rz - 0.1).abs() < 1e-4);
    }

    #[test]
    fn random_reparametrizations_keep_residuals_small(ap in -0.3f64..0.3, am in -0.3f64..0.3, fp in 0.5f64..2.5, fm in 0.5f64..2.5) {
        let sol = CatenoidNull::new(1.1).boosted(0.2).reparametrized(Reparam { amp: ap, freq: fp }, Reparam { amp: am, freq: fm });
        let f = fields(&sol, 0.05);
        prop_assert!(char_residuals(&f).max_identity() <= 1e-9);
        let lc = lightcone_reduce(&f).unwrap();
        prop_assert!(lc.pair.iter().all(|v| *v <= 1e-9));
        prop_assert!(gcmp_residuals(&f).unwrap().minimality <= 1e-9);
    }
}
