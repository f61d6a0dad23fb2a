//! One runner per subcommand: compute tables, collect checks.

use std::f64::consts::PI;

use clap::{Args, ValueEnum};
use minsurf::algebraic_min as am;
use minsurf::catenoid as cat;
use minsurf::membrane as mb;
use minsurf::rotating as rot;
use minsurf::s3_tori as s3;
use minsurf::separable as sep;
use minsurf::soliton_spectrum as sol;
use minsurf::verify::{run_criterion, Check, VerifyOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::{CheckGroup, Outcome, Table};
use crate::Failure;

fn criteria(out: &mut Outcome, ids: &[usize], opts: VerifyOptions) -> Result<(), Failure> {
    for &id in ids {
        out.groups.push(CheckGroup::criterion(&run_criterion(id, opts)?));
    }
    Ok(())
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

// --- catenoid ---------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct CatenoidArgs {
    /// Ring ratios ρ = d/(2R), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2.0")]
    pub rho: Vec<f64>,
    /// Uniform sweep `MIN,MAX,COUNT`, appended to `--rho`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub sweep: Option<Vec<f64>>,
}

pub fn catenoid(a: &CatenoidArgs) -> Result<Outcome, Failure> {
    let mut rhos = a.rho.clone();
    if let Some(s) = &a.sweep {
        let [lo, hi, n] = s[..] else { return Err(usage("--sweep takes MIN,MAX,COUNT")) };
        if n < 2.0 || n.fract() != 0.0 || !(hi > lo) {
            return Err(usage("--sweep needs MIN < MAX and an integer COUNT >= 2"));
        }
        let n = n as usize;
        rhos.extend((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64));
    }
    let rows = cat::sweep(&rhos)?;
    let mut t =
        Table::new("catenoid", &["rho", "branch", "w", "root_residual", "area_coeff", "lowest_eigenvalue", "stable"]);
    let mut roots = Vec::new();
    for r in &rows {
        let res = (r.w.cosh() - r.rho * r.w).abs();
        roots.push(Check::le(format!("rho={} {:?}: |cosh w - rho w|", r.rho, r.branch), res, 1e-10));
        t.push(vec![
            r.rho.into(),
            format!("{:?}", r.branch).to_lowercase().into(),
            r.w.into(),
            res.into(),
            r.area_coeff.into(),
            r.lowest_eigenvalue.into(),
            r.stable.into(),
        ]);
    }
    let (w0, rho_bar) = cat::critical_ratio();
    let mut out = Outcome { tables: vec![t], ..Default::default() };
    out.note("w0", w0);
    out.note("rho_critical", rho_bar);
    out.note("branches", rows.len());
    if !roots.is_empty() {
        out.groups.push(CheckGroup::new("catenoid roots", &roots));
    }
    criteria(&mut out, &[1, 2, 3, 4, 5], VerifyOptions::default())?;
    Ok(out)
}

// --- spectrum ---------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    /// Half-width of the truncated line for the shooting solver.
    #[arg(long, default_value_t = 50.0)]
    pub truncation: f64,
    /// Wave numbers for the exact eigenfunction checks of -∂² - 2sech².
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2")]
    pub k: Vec<f64>,
}

pub fn spectrum(a: &SpectrumArgs) -> Result<Outcome, Failure> {
    if !(a.truncation > 0.0) {
        return Err(usage("--truncation must be positive"));
    }
    let ground = sol::ground_state_d(a.truncation)?;
    let odd = sol::d_tilde_eigen(a.truncation, 1)?;
    let rq = sol::rayleigh_sech_power(1.0)?;
    let (zp, zm) = sol::zero_mode_residuals();
    let mut diag = Table::new("spectrum", &["quantity", "value"]);
    for (k, v) in [
        ("rayleigh_quotient_sech", rq),
        ("ground_state_eigenvalue", ground.eigenvalue),
        ("lowest_odd_eigenvalue", odd.eigenvalue),
        ("zero_mode_residual_plus", zp),
        ("zero_mode_residual_minus", zm),
    ] {
        diag.push(vec![k.into(), v.into()]);
    }
    let mut checks = Vec::new();
    for &k in &a.k {
        let c = sol::h_eigen_check(k);
        diag.push(vec![format!("h_scattering_residual_k{k}").into(), c.scattering.into()]);
        checks.push(Check::le(format!("k={k} sup |(H - k^2) psi_k|"), c.scattering, 1e-10));
        if k == a.k[0] {
            diag.push(vec!["h_bound_state_residual".into(), c.bound.into()]);
            checks.push(Check::le("sup |H psi0 + psi0|", c.bound, 1e-10));
        }
    }
    let mut ef = Table::new("spectrum_ground_state", &["y", "psi"]);
    let g = &ground.eigenfunction;
    for i in 0..g.len() {
        ef.push(vec![g.x(i).into(), g.samples[i].into()]);
    }
    let mut out = Outcome { tables: vec![diag, ef], ..Default::default() };
    out.note("ground_state_eigenvalue", ground.eigenvalue);
    out.note("rayleigh_quotient_sech", rq);
    out.groups.push(CheckGroup::new("exact eigenfunctions", &checks));
    criteria(&mut out, &[6], VerifyOptions::default())?;
    Ok(out)
}

// --- separable --------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct SeparableArgs {
    /// On-surface sample points per catalog entry.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
}

pub fn separable(a: &SeparableArgs, seed: u64) -> Result<Outcome, Failure> {
    if a.count == 0 {
        return Err(usage("--count must be positive"));
    }
    let mut t = Table::new("separable", &["surface", "dim", "points", "max_residual", "tol"]);
    let mut checks = Vec::new();
    for name in sep::CATALOG {
        let spec = sep::catalog(name)?;
        let worst = sep::max_catalog_residual(&spec, a.count, seed)?;
        let tol = if name == "weier4" { 1e-6 } else { 1e-8 };
        checks.push(Check::le(format!("{name} residual"), worst, tol));
        t.push(vec![name.into(), spec.dim().into(), a.count.into(), worst.into(), tol.into()]);
    }
    let mut out = Outcome { tables: vec![t], ..Default::default() };
    out.groups.push(CheckGroup::new("catalog residuals", &checks));
    criteria(&mut out, &[7], VerifyOptions { seed, ..Default::default() })?;
    Ok(out)
}

// --- rotate -----------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignArg {
    Plus,
    Minus,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct RotateArgs {
    /// Epicycloid index n; with `--k`. Without both, the presets (1,3) and (2,5).
    #[arg(long, requires = "k")]
    pub n: Option<i32>,
    #[arg(long, requires = "n")]
    pub k: Option<i32>,
    #[arg(long, value_enum, default_value_t = SignArg::Both)]
    pub sign: SignArg,
    /// Samples per period.
    #[arg(long, default_value_t = 400)]
    pub points: usize,
}

pub fn rotate(a: &RotateArgs) -> Result<Outcome, Failure> {
    if a.points < 4 {
        return Err(usage("--points must be at least 4"));
    }
    let pairs = match (a.n, a.k) {
        (Some(n), Some(k)) => vec![(n, k)],
        _ => vec![(1, 3), (2, 5)],
    };
    let signs: &[rot::Sign] = match a.sign {
        SignArg::Plus => &[rot::Sign::Plus],
        SignArg::Minus => &[rot::Sign::Minus],
        SignArg::Both => &[rot::Sign::Plus, rot::Sign::Minus],
    };
    let mut out = Outcome::default();
    let mut checks = Vec::new();
    for &(n, k) in &pairs {
        for &sign in signs {
            let e = rot::epicycloid(rot::EpicycloidParams::new(n, k, sign)?);
            let tag = format!("{:?}", sign).to_lowercase();
            let w = e.w2.sqrt();
            let mut t =
                Table::new(format!("rotate_n{n}_k{k}_{tag}"), &["phi", "x", "y", "speed", "residual", "gamma0"]);
            let mut worst = 0.0f64;
            for i in 0..a.points {
                let phi = e.curve.period * (i as f64 + 0.37) / a.points as f64;
                let [x, y] = (e.curve.u)(phi);
                let speed = e.speed2(phi).sqrt();
                let (res, g0) = if speed > rot::CUSP_SPEED {
                    match rot::shape_residual(&e.curve, w, e.gamma(), phi) {
                        Ok(r) => (r.residual, r.gamma0.abs()),
                        Err(minsurf::Error::Degenerate) => (f64::NAN, f64::NAN),
                        Err(err) => return Err(err.into()),
                    }
                } else {
                    (f64::NAN, f64::NAN)
                };
                if res.is_finite() {
                    worst = worst.max(res.abs());
                }
                t.push(vec![phi.into(), x.into(), y.into(), speed.into(), res.into(), g0.into()]);
            }
            checks.push(Check::le(format!("({n},{k}) {tag} shape residual"), worst, 1e-10));
            out.note(&format!("w2_n{n}_k{k}_{tag}"), e.w2);
            out.tables.push(t);
        }
    }
    out.groups.push(CheckGroup::new("shape residuals", &checks));
    criteria(&mut out, &[8], VerifyOptions::default())?;
    Ok(out)
}

// --- s3-torus ---------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct S3TorusArgs {
    /// Family parameters e (e = 0 is the Clifford torus).
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2")]
    pub e: Vec<f64>,
    /// Grid size per angle for the Hopf images.
    #[arg(long, default_value_t = 40)]
    pub grid: usize,
}

pub fn s3_torus(a: &S3TorusArgs) -> Result<Outcome, Failure> {
    if a.grid < 2 {
        return Err(usage("--grid must be at least 2"));
    }
    let mut fam = Table::new(
        "s3_torus",
        &["e", "gamma", "energy", "orthogonality", "relations", "pointwise", "great_circle_defect", "tilt"],
    );
    let mut hopf = Table::new("s3_torus_hopf", &["e", "phi1", "phi2", "h1", "h2", "h3"]);
    let mut checks = Vec::new();
    for &e in &a.e {
        let f = s3::TorusFamily::new(e, 0.0)?;
        let cong = s3::congruence_check(&f, 64)?;
        let gc = s3::great_circle_defect(&f, a.grid);
        checks.push(Check::le(format!("e={e} S orthogonality"), cong.orthogonality, 1e-12));
        checks.push(Check::le(format!("e={e} congruence relations"), cong.relations.max(cong.pointwise), 1e-8));
        checks.push(Check::le(format!("e={e} Hopf great circle"), gc, 1e-8));
        fam.push(vec![
            e.into(),
            f.gamma().into(),
            f.energy().into(),
            cong.orthogonality.into(),
            cong.relations.into(),
            cong.pointwise.into(),
            gc.into(),
            s3::great_circle_tilt(&f).into(),
        ]);
        for i in 0..a.grid {
            for j in 0..a.grid {
                let p1 = 2.0 * PI * i as f64 / a.grid as f64;
                let p2 = 2.0 * PI * j as f64 / a.grid as f64;
                let [h1, h2, h3] = s3::hopf_map_conjugate(&f.point(p1, p2));
                hopf.push(vec![e.into(), p1.into(), p2.into(), h1.into(), h2.into(), h3.into()]);
            }
        }
    }
    let mut out = Outcome { tables: vec![fam, hopf], ..Default::default() };
    out.groups.push(CheckGroup::new("family sweep", &checks));
    criteria(&mut out, &[9], VerifyOptions::default())?;
    Ok(out)
}

// --- stiefel ----------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct StiefelArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Random on-manifold points.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
}

pub fn stiefel(a: &StiefelArgs, seed: u64) -> Result<Outcome, Failure> {
    if a.count == 0 {
        return Err(usage("--count must be positive"));
    }
    let mut t = Table::new(
        "stiefel",
        &["index", "s2", "constraint_defect", "max_residual", "idempotency", "annihilation", "symmetry"],
    );
    let mut worst = 0.0f64;
    for (i, pt) in am::StiefelPoint::sample(a.n, a.k, a.count, seed)?.iter().enumerate() {
        let rep = am::stiefel_minimality(pt)?;
        worst = worst.max(rep.max_residual());
        t.push(vec![
            i.into(),
            pt.s2().into(),
            pt.constraint_defect().into(),
            rep.max_residual().into(),
            rep.idempotency.into(),
            rep.annihilation.into(),
            rep.symmetry.into(),
        ]);
    }
    let mut out = Outcome { tables: vec![t], ..Default::default() };
    out.note("max_residual", worst);
    out.groups.push(CheckGroup::new(format!("Stiefel ({},{})", a.n, a.k), &[Check::le("max Tr(P d2W)", worst, 1e-9)]));
    criteria(&mut out, &[10], VerifyOptions { seed, ..Default::default() })?;
    Ok(out)
}

// --- detvar -----------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartArg {
    Lambda,
    /// Only for p = 3, q = 2.
    Svd,
}

#[derive(Debug, Args, Serialize)]
pub struct DetvarArgs {
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    #[arg(long, value_enum, default_value_t = ChartArg::Lambda)]
    pub chart: ChartArg,
    /// Random regular points.
    #[arg(long, default_value_t = 50)]
    pub count: usize,
}

pub fn detvar(a: &DetvarArgs, seed: u64) -> Result<Outcome, Failure> {
    if a.count == 0 {
        return Err(usage("--count must be positive"));
    }
    if a.chart == ChartArg::Svd && (a.p, a.q) != (3, 2) {
        return Err(usage("the svd chart exists only for p = 3, q = 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new("detvar", &["index", "rank", "max_trace", "frame_defect", "det_relative_error"]);
    let (mut worst, mut det) = (0.0f64, 0.0f64);
    for i in 0..a.count {
        let pt = match a.chart {
            ChartArg::Lambda => am::DetVarPoint::random_lambda(a.p, a.q, &mut rng)?,
            ChartArg::Svd => am::DetVarPoint::random_svd(&mut rng),
        };
        let curv = am::detvar_mean_curvature(&pt)?;
        let rel = match a.chart {
            ChartArg::Lambda => {
                let (lhs, rhs) = am::detvar_det_formula(&pt)?;
                (lhs - rhs).abs() / lhs.abs()
            }
            ChartArg::Svd => f64::NAN,
        };
        worst = worst.max(curv.max_trace());
        if rel.is_finite() {
            det = det.max(rel);
        }
        t.push(vec![i.into(), pt.rank().into(), curv.max_trace().into(), curv.frame_defect.into(), rel.into()]);
    }
    let mut checks = vec![Check::le("max normal mean-curvature trace", worst, 1e-9)];
    if a.chart == ChartArg::Lambda {
        checks.push(Check::le("determinant formula, relative", det, 1e-10));
    }
    let mut out = Outcome { tables: vec![t], ..Default::default() };
    out.note("max_trace", worst);
    out.groups.push(CheckGroup::new(format!("Sigma({},{}) {:?} chart", a.p, a.q, a.chart).to_lowercase(), &checks));
    criteria(&mut out, &[11], VerifyOptions { seed, ..Default::default() })?;
    Ok(out)
}

// --- membrane ---------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Cylinder at rest, collapsing to its axis.
    CollapsingCircle,
    /// Catenoid at rest with fixed ends; stationary.
    StaticCatenoid,
    /// Off-centre torus profile at rest.
    PerturbedTorus,
}

#[derive(Debug, Args, Serialize)]
pub struct MembraneArgs {
    #[arg(long, value_enum, default_value_t = Preset::CollapsingCircle)]
    pub preset: Preset,
    /// Grid nodes (default 32, 81 and 128 by preset).
    #[arg(long)]
    pub m: Option<usize>,
    /// Time step (default 2e-3 for the circle, a quarter-Courant step otherwise).
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Initial radius of the collapsing circle.
    #[arg(long, default_value_t = 1.0)]
    pub r0: f64,
    /// Winding rate z = cφ of the collapsing circle.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Half-height in the catenoid parameter for the static preset.
    #[arg(long, default_value_t = 1.0)]
    pub v_max: f64,
    /// Also run the membrane acceptance suites.
    #[arg(long)]
    pub suite: bool,
}

pub fn membrane(a: &MembraneArgs) -> Result<Outcome, Failure> {
    let s = match a.preset {
        Preset::CollapsingCircle => mb::collapsing_circle(a.r0, a.c, a.m.unwrap_or(32))?,
        Preset::StaticCatenoid => mb::static_catenoid(a.v_max, a.m.unwrap_or(81))?,
        Preset::PerturbedTorus => mb::perturbed_torus(a.m.unwrap_or(128))?,
    };
    let dt = match (a.dt, a.preset) {
        (Some(dt), _) => dt,
        (None, Preset::CollapsingCircle) => 2e-3,
        (None, _) => mb::cfl_step(&s, 0.25),
    };
    if !(dt > 0.0) || a.steps == 0 {
        return Err(usage("need --dt > 0 and --steps > 0"));
    }
    let run = mb::evolve_physical(&s, dt, a.steps)?;
    let probe = mb::singularity_probe(&run)?;

    let mut traj = Table::new("membrane", &["t", "minkowski_t", "r_integral", "r_integral_accel", "c1", "c2", "r_min"]);
    for (k, snap) in run.snapshots.iter().enumerate() {
        let d = run.defects[k];
        let r_min = snap.state.r.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        traj.push(vec![
            snap.t.into(),
            (snap.t * s.eps).into(),
            probe.integral[k].into(),
            probe.accel[k].into(),
            d.c1.into(),
            d.c2.into(),
            r_min.into(),
        ]);
    }
    let fin = run.final_state();
    let mut prof = Table::new("membrane_profile", &["phi", "r", "z", "rdot", "zdot"]);
    for i in 0..fin.len() {
        prof.push(vec![fin.phi(i).into(), fin.r[i].into(), fin.z[i].into(), fin.rdot[i].into(), fin.zdot[i].into()]);
    }

    let mut out = Outcome { tables: vec![traj, prof], ..Default::default() };
    out.note("eps", s.eps);
    out.note("dt", dt);
    out.note("final_t", run.final_time());
    out.note(
        "termination",
        match &run.termination {
            mb::Termination::Completed => "completed".to_owned(),
            mb::Termination::Blowup { t, reason } => format!("blowup at t = {t}: {reason}"),
        },
    );
    out.note("blowup_t_extrapolated", probe.blowup_time);
    out.note("blowup_t_termination", run.blowup_time());
    out.note("max_constraint_defect", run.max_defect());

    let mut checks = vec![Check::flag("no constraint loss", run.constraint_loss.is_none())];
    match a.preset {
        Preset::CollapsingCircle => {
            let exact = PI / (2.0 * a.c);
            out.note("blowup_t_exact", exact);
            checks.push(Check::flag("I'' < 0 at every step", probe.negative_everywhere));
            checks.push(Check::flag("clean blowup termination", run.blowup_time().is_some()));
            let est = probe.blowup_time.or(run.blowup_time()).unwrap_or(f64::NAN);
            checks.push(Check::le("|blowup estimate - exact| / exact", (est - exact).abs() / exact, 5e-3));
        }
        Preset::StaticCatenoid => {
            let drift =
                (0..s.len()).map(|i| (fin.r[i] - s.r[i]).abs().max((fin.z[i] - s.z[i]).abs())).fold(0.0f64, f64::max);
            out.note("max_drift", drift);
            checks.push(Check::flag("ran to completion", run.blowup_time().is_none()));
        }
        Preset::PerturbedTorus => {}
    }
    out.groups.push(CheckGroup::new("membrane run", &checks));
    if a.suite {
        criteria(&mut out, &[12, 13, 14, 15], VerifyOptions::default())?;
    }
    Ok(out)
}

// --- verify-all -------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct VerifyAllArgs {
    /// Coarser membrane grids; tolerances are unchanged.
    #[arg(long)]
    pub quick: bool,
}

pub fn verify_all(a: &VerifyAllArgs, seed: u64) -> Result<Outcome, Failure> {
    let reports = minsurf::verify::run_all(VerifyOptions { quick: a.quick, seed });
    let mut t = Table::new("verify_all", &["criterion", "title", "check", "value", "tol", "pass"]);
    let mut out = Outcome::default();
    for rep in &reports {
        for c in &rep.checks {
            t.push(vec![
                rep.id.into(),
                rep.title.into(),
                c.name.clone().into(),
                c.value.into(),
                c.tol.into(),
                c.pass.into(),
            ]);
        }
        out.groups.push(CheckGroup::criterion(rep));
    }
    out.note("criteria_passed", reports.iter().filter(|r| r.pass()).count());
    out.note("criteria", reports.len());
    out.tables.push(t);
    Ok(out)
}
