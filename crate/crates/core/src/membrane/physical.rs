//! Physical-time orthonormal gauge.
//!
//! The profile `(r, z)(t, φ)` obeys
//!
//! ```text
//! z̈ = (z′r²)′,   r̈ = (r²r′)′ − (r′² + z′²) r
//! ```
//!
//! subject to `C₁ = ṙr′ + żz′ = 0` and `C₂ = ṙ² + ż² + r²(r′² + z′²) − ε² = 0`.

use super::{fd4_derivative, fd4_periodic_derivative, fd4_second_derivative, Scheme, SpectralDiff};
use crate::error::{Error, Result};
use crate::numerics::{find_root, mat_solve, quad, DenseMatrix};

/// Evolution stops once `min r` drops below this value.
pub const R_FLOOR: f64 = 1e-6;
/// Evolution stops once any first derivative exceeds this value.
pub const DERIVATIVE_CEILING: f64 = 1e8;
/// Relative constraint drift (in units of ε²) flagged as constraint loss.
pub const CONSTRAINT_LOSS: f64 = 1e-4;
/// Initial constraint defects above this (relative to ε²) are rejected.
pub const INITIAL_DEFECT_LIMIT: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct MembraneState {
    /// Parameter of the first node.
    pub phi0: f64,
    pub dphi: f64,
    /// Periodic grids represent closed (torus) profiles; bounded ones keep
    /// their end nodes on prescribed straight-line motion.
    pub periodic: bool,
    /// `z(φ + period) − z(φ)` on periodic grids.
    pub z_winding: f64,
    pub r: Vec<f64>,
    pub z: Vec<f64>,
    pub rdot: Vec<f64>,
    pub zdot: Vec<f64>,
    /// Minkowski time is `ε t`.
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintFields {
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
}

impl ConstraintFields {
    pub fn max_c1(&self) -> f64 {
        self.c1.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_c2(&self) -> f64 {
        self.c2.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl MembraneState {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn phi(&self, i: usize) -> f64 {
        self.phi0 + i as f64 * self.dphi
    }

    /// Length of the parameter domain.
    pub fn period(&self) -> f64 {
        if self.periodic {
            self.len() as f64 * self.dphi
        } else {
            (self.len() - 1) as f64 * self.dphi
        }
    }

    pub fn default_scheme(&self) -> Scheme {
        if self.periodic {
            Scheme::Spectral
        } else {
            Scheme::FiniteDifference4
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        if n < 8 || [self.z.len(), self.rdot.len(), self.zdot.len()].iter().any(|&m| m != n) {
            return Err(Error::InvalidArgument("state arrays must share a length of at least 8".into()));
        }
        if self.periodic && !n.is_multiple_of(2) {
            return Err(Error::InvalidArgument("periodic grids need an even point count".into()));
        }
        if !(self.dphi > 0.0) || !(self.eps > 0.0) {
            return Err(Error::InvalidArgument("dphi and eps must be positive".into()));
        }
        if let Some(v) = self.r.iter().find(|v| !(**v > 0.0)) {
            return Err(Error::InvalidArgument(format!("r must be positive, found {v}")));
        }
        Ok(())
    }

    /// `(r′, z′)` with the given scheme.
    pub fn derivatives(&self, scheme: Scheme) -> Result<(Vec<f64>, Vec<f64>)> {
        let op = SpaceOp::new(self, scheme)?;
        Ok((op.d(&self.r), op.dz(&self.z)))
    }

    pub fn constraints(&self, scheme: Scheme) -> Result<ConstraintFields> {
        let op = SpaceOp::new(self, scheme)?;
        Ok(op.constraints(&self.r, &self.z, &self.rdot, &self.zdot, self.eps))
    }

    /// `∫ r dφ` (trapezoid rule; spectrally accurate on periodic grids).
    pub fn radius_integral(&self) -> f64 {
        trapezoid(&self.r, self.dphi, self.periodic)
    }
}

fn trapezoid(f: &[f64], h: f64, periodic: bool) -> f64 {
    let s: f64 = f.iter().sum();
    if periodic {
        s * h
    } else {
        (s - 0.5 * (f[0] + f[f.len() - 1])) * h
    }
}

/// Spatial differentiation for one grid.
struct SpaceOp {
    scheme: Scheme,
    spectral: Option<SpectralDiff>,
    h: f64,
    periodic: bool,
    slope: f64,
}

impl SpaceOp {
    fn new(s: &MembraneState, scheme: Scheme) -> Result<Self> {
        s.validate()?;
        if scheme == Scheme::Spectral && !s.periodic {
            return Err(Error::InvalidArgument("spectral differentiation needs a periodic grid".into()));
        }
        let spectral = (scheme == Scheme::Spectral).then(|| SpectralDiff::new(s.len(), s.period()));
        let slope = if s.periodic { s.z_winding / s.period() } else { 0.0 };
        Ok(Self { scheme, spectral, h: s.dphi, periodic: s.periodic, slope })
    }

    fn d(&self, f: &[f64]) -> Vec<f64> {
        match (self.scheme, self.periodic) {
            (Scheme::Spectral, _) => self.spectral.as_ref().expect("spectral operator").apply(f),
            (Scheme::FiniteDifference4, true) => fd4_periodic_derivative(f, self.h),
            (Scheme::FiniteDifference4, false) => fd4_derivative(f, self.h),
        }
    }

    /// Derivative of `z`, removing the linear winding before differentiating.
    fn dz(&self, z: &[f64]) -> Vec<f64> {
        if self.slope == 0.0 {
            return self.d(z);
        }
        let p: Vec<f64> = z.iter().enumerate().map(|(i, v)| v - self.slope * (i as f64 * self.h)).collect();
        self.d(&p).into_iter().map(|v| v + self.slope).collect()
    }

    fn constraints(&self, r: &[f64], z: &[f64], rd: &[f64], zd: &[f64], eps: f64) -> ConstraintFields {
        let (r1, z1) = (self.d(r), self.dz(z));
        let n = r.len();
        let c1 = (0..n).map(|i| rd[i] * r1[i] + zd[i] * z1[i]).collect();
        let c2 = (0..n)
            .map(|i| rd[i] * rd[i] + zd[i] * zd[i] + r[i] * r[i] * (r1[i] * r1[i] + z1[i] * z1[i]) - eps * eps)
            .collect();
        ConstraintFields { c1, c2 }
    }

    /// `(r̈, z̈)` and the largest first derivative.
    fn accel(&self, r: &[f64], z: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let n = r.len();
        let (r1, z1) = (self.d(r), self.dz(z));
        let (mut ra, mut za): (Vec<f64>, Vec<f64>);
        if self.periodic {
            let fr: Vec<f64> = (0..n).map(|i| r[i] * r[i] * r1[i]).collect();
            let fz: Vec<f64> = (0..n).map(|i| r[i] * r[i] * z1[i]).collect();
            let (dfr, dfz) = (self.d(&fr), self.d(&fz));
            ra = (0..n).map(|i| dfr[i] - (r1[i] * r1[i] + z1[i] * z1[i]) * r[i]).collect();
            za = dfz;
        } else {
            // Narrow second-derivative stencils: applying the first-derivative
            // stencil twice is unstable against the one-sided end closures.
            let (r2, z2) = (fd4_second_derivative(r, self.h), fd4_second_derivative(z, self.h));
            ra = (0..n).map(|i| r[i] * r[i] * r2[i] + r[i] * (r1[i] * r1[i] - z1[i] * z1[i])).collect();
            za = (0..n).map(|i| r[i] * r[i] * z2[i] + 2.0 * r[i] * r1[i] * z1[i]).collect();
            for i in [0, n - 1] {
                ra[i] = 0.0;
                za[i] = 0.0;
            }
        }
        let big = r1.iter().chain(&z1).fold(0.0f64, |m, v| m.max(v.abs()));
        (ra, za, big)
    }
}

/// State vector layout `[r, z, ṙ, ż]`.
type Flat = [Vec<f64>; 4];

fn rhs(op: &SpaceOp, y: &Flat) -> (Flat, f64) {
    let (ra, za, big) = op.accel(&y[0], &y[1]);
    ([y[2].clone(), y[3].clone(), ra, za], big)
}

fn axpy(y: &Flat, h: f64, k: &Flat) -> Flat {
    std::array::from_fn(|c| y[c].iter().zip(&k[c]).map(|(a, b)| a + h * b).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Completed,
    /// Halted cleanly at time `t`.
    Blowup {
        t: f64,
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectSample {
    pub t: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub state: MembraneState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalConfig {
    pub dt: f64,
    pub steps: usize,
    /// `None` picks spectral on periodic grids, finite differences otherwise.
    pub scheme: Option<Scheme>,
    pub save_every: usize,
    pub r_floor: f64,
    pub ceiling: f64,
}

impl PhysicalConfig {
    pub fn new(dt: f64, steps: usize) -> Self {
        Self { dt, steps, scheme: None, save_every: 1, r_floor: R_FLOOR, ceiling: DERIVATIVE_CEILING }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = Some(scheme);
        self
    }

    pub fn with_save_every(mut self, k: usize) -> Self {
        self.save_every = k.max(1);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalRun {
    pub scheme: Scheme,
    pub dt: f64,
    pub snapshots: Vec<Snapshot>,
    /// Constraint maxima after every step (and at t = 0).
    pub defects: Vec<DefectSample>,
    pub max_c1: f64,
    pub max_c2: f64,
    /// First time the drift exceeded `CONSTRAINT_LOSS·ε²`.
    pub constraint_loss: Option<f64>,
    pub termination: Termination,
}

impl PhysicalRun {
    pub fn final_state(&self) -> &MembraneState {
        &self.snapshots.last().expect("a run has at least the initial snapshot").state
    }

    pub fn final_time(&self) -> f64 {
        self.snapshots.last().map_or(0.0, |s| s.t)
    }

    pub fn blowup_time(&self) -> Option<f64> {
        match self.termination {
            Termination::Blowup { t, .. } => Some(t),
            Termination::Completed => None,
        }
    }

    /// Largest of `max |C₁|`, `max |C₂|` over the run.
    pub fn max_defect(&self) -> f64 {
        self.max_c1.max(self.max_c2)
    }

    /// `(r̈, z̈)` of a snapshot.
    pub fn acceleration(&self, s: &MembraneState) -> Result<(Vec<f64>, Vec<f64>)> {
        let op = SpaceOp::new(s, self.scheme)?;
        let (ra, za, _) = op.accel(&s.r, &s.z);
        Ok((ra, za))
    }

    /// State at time `t` by cubic Hermite interpolation between snapshots
    /// (fourth-order accurate when snapshots are saved every step).
    pub fn state_at(&self, t: f64) -> Result<MembraneState> {
        let snaps = &self.snapshots;
        let (t0, t1) = (snaps[0].t, self.final_time());
        if !(t >= t0 - 1e-12 && t <= t1 + 1e-12) || snaps.len() < 2 {
            return Err(Error::InvalidArgument(format!("t = {t} outside the run [{t0}, {t1}]")));
        }
        let k = snaps.partition_point(|s| s.t <= t).clamp(1, snaps.len() - 1) - 1;
        let (a, b) = (&snaps[k], &snaps[k + 1]);
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let (h00, h10, h01, h11) = (
            2.0 * s.powi(3) - 3.0 * s * s + 1.0,
            s.powi(3) - 2.0 * s * s + s,
            -2.0 * s.powi(3) + 3.0 * s * s,
            s.powi(3) - s * s,
        );
        let (ara, aza) = self.acceleration(&a.state)?;
        let (bra, bza) = self.acceleration(&b.state)?;
        let mix = |p0: &[f64], v0: &[f64], p1: &[f64], v1: &[f64]| -> Vec<f64> {
            (0..p0.len()).map(|i| h00 * p0[i] + h10 * h * v0[i] + h01 * p1[i] + h11 * h * v1[i]).collect()
        };
        let mut out = a.state.clone();
        out.r = mix(&a.state.r, &a.state.rdot, &b.state.r, &b.state.rdot);
        out.z = mix(&a.state.z, &a.state.zdot, &b.state.z, &b.state.zdot);
        out.rdot = mix(&a.state.rdot, &ara, &b.state.rdot, &bra);
        out.zdot = mix(&a.state.zdot, &aza, &b.state.zdot, &bza);
        Ok(out)
    }
}

/// RK4 method-of-lines evolution with default settings.
pub fn evolve_physical(s: &MembraneState, dt: f64, steps: usize) -> Result<PhysicalRun> {
    evolve_physical_with(s, &PhysicalConfig::new(dt, steps))
}

pub fn evolve_physical_with(s: &MembraneState, cfg: &PhysicalConfig) -> Result<PhysicalRun> {
    if !(cfg.dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {}", cfg.dt)));
    }
    let scheme = cfg.scheme.unwrap_or_else(|| s.default_scheme());
    let op = SpaceOp::new(s, scheme)?;
    let e2 = s.eps * s.eps;
    let c = op.constraints(&s.r, &s.z, &s.rdot, &s.zdot, s.eps);
    let (c1, c2) = (c.max_c1(), c.max_c2());
    if c1.max(c2) > INITIAL_DEFECT_LIMIT * e2 {
        return Err(Error::InvalidArgument(format!("initial constraint defects ({c1:e}, {c2:e}) too large")));
    }
    let mut run = PhysicalRun {
        scheme,
        dt: cfg.dt,
        snapshots: vec![Snapshot { t: 0.0, state: s.clone() }],
        defects: vec![DefectSample { t: 0.0, c1, c2 }],
        max_c1: c1,
        max_c2: c2,
        constraint_loss: None,
        termination: Termination::Completed,
    };
    let mut y: Flat = [s.r.clone(), s.z.clone(), s.rdot.clone(), s.zdot.clone()];
    let h = cfg.dt;
    for step in 1..=cfg.steps {
        let t = step as f64 * h;
        let (k1, big) = rhs(&op, &y);
        let (k2, _) = rhs(&op, &axpy(&y, 0.5 * h, &k1));
        let (k3, _) = rhs(&op, &axpy(&y, 0.5 * h, &k2));
        let (k4, _) = rhs(&op, &axpy(&y, h, &k3));
        let next: Flat = std::array::from_fn(|c| {
            (0..y[c].len())
                .map(|i| y[c][i] + h / 6.0 * (k1[c][i] + 2.0 * k2[c][i] + 2.0 * k3[c][i] + k4[c][i]))
                .collect()
        });
        let reason = if next.iter().flatten().any(|v| !v.is_finite()) {
            Some("non-finite state".to_string())
        } else if big > cfg.ceiling {
            Some(format!("derivative ceiling exceeded ({big:e})"))
        } else {
            let rmin = next[0].iter().fold(f64::INFINITY, |m, v| m.min(*v));
            (rmin < cfg.r_floor).then(|| format!("r = {rmin:e} below floor"))
        };
        if let Some(reason) = reason {
            run.termination = Termination::Blowup { t, reason };
            break;
        }
        y = next;
        let c = op.constraints(&y[0], &y[1], &y[2], &y[3], s.eps);
        let (c1, c2) = (c.max_c1(), c.max_c2());
        run.defects.push(DefectSample { t, c1, c2 });
        run.max_c1 = run.max_c1.max(c1);
        run.max_c2 = run.max_c2.max(c2);
        if run.constraint_loss.is_none() && c1.max(c2) > CONSTRAINT_LOSS * e2 {
            run.constraint_loss = Some(t);
        }
        if step % cfg.save_every == 0 || step == cfg.steps {
            let mut st = s.clone();
            [st.r, st.z, st.rdot, st.zdot] = y.clone();
            run.snapshots.push(Snapshot { t, state: st });
        }
    }
    Ok(run)
}

/// Largest stable-ish step for RK4 at Courant number `cfl`: the profile
/// equations propagate at speed `r` in the parameter.
pub fn cfl_step(s: &MembraneState, cfl: f64) -> f64 {
    let rmax = s.r.iter().fold(0.0f64, |m, v| m.max(*v));
    cfl * s.dphi / rmax
}

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

/// Static catenoid `r = cosh v`, `z = v` for `|v| ≤ v_max`, at rest, on
/// `m` nodes of the parameter `φ = (v/2 + sinh 2v/4)/ε` in which
/// `r²(r′² + z′²) = ε²` (ε = 1). Ends are held fixed.
pub fn static_catenoid(v_max: f64, m: usize) -> Result<MembraneState> {
    if !(v_max > 0.0) || m < 8 {
        return Err(Error::InvalidArgument("need v_max > 0 and at least 8 nodes".into()));
    }
    let phi = |v: f64| 0.5 * v + 0.25 * (2.0 * v).sinh();
    let (p0, p1) = (phi(-v_max), phi(v_max));
    let dphi = (p1 - p0) / (m - 1) as f64;
    let mut v = Vec::with_capacity(m);
    for i in 0..m {
        let target = p0 + i as f64 * dphi;
        let vi = if i == 0 {
            -v_max
        } else if i == m - 1 {
            v_max
        } else {
            find_root(|x| phi(x) - target, -v_max, v_max, 1e-15)?
        };
        v.push(vi);
    }
    Ok(MembraneState {
        phi0: p0,
        dphi,
        periodic: false,
        z_winding: 0.0,
        r: v.iter().map(|x| x.cosh()).collect(),
        z: v.clone(),
        rdot: vec![0.0; m],
        zdot: vec![0.0; m],
        eps: 1.0,
    })
}

/// Cylinder `r = R₀`, `z = cφ` at rest (`ε = R₀c`); `z` winds by `2πc`.
pub fn collapsing_circle(r0: f64, c: f64, m: usize) -> Result<MembraneState> {
    if !(r0 > 0.0) || !(c > 0.0) || m < 8 || !m.is_multiple_of(2) {
        return Err(Error::InvalidArgument("need R0 > 0, c > 0 and an even node count >= 8".into()));
    }
    let dphi = 2.0 * std::f64::consts::PI / m as f64;
    Ok(MembraneState {
        phi0: 0.0,
        dphi,
        periodic: true,
        z_winding: 2.0 * std::f64::consts::PI * c,
        r: vec![r0; m],
        z: (0..m).map(|i| c * i as f64 * dphi).collect(),
        rdot: vec![0.0; m],
        zdot: vec![0.0; m],
        eps: r0 * c,
    })
}

/// Closed profile curve at rest. `curve(σ)` returns `[r, z, r_σ, z_σ]` for a
/// 2π-periodic parameter σ; the curve is resampled in the parameter φ with
/// `r|x_φ| = ε`, `ε = (1/2π)∮ r|x_σ| dσ`.
pub fn torus_at_rest(curve: impl Fn(f64) -> [f64; 4], m: usize) -> Result<MembraneState> {
    use std::f64::consts::PI;
    if m < 8 || !m.is_multiple_of(2) {
        return Err(Error::InvalidArgument("need an even node count >= 8".into()));
    }
    let weight = |s: f64| {
        let c = curve(s);
        c[0] * c[2].hypot(c[3])
    };
    if (0..64).any(|i| !(curve(2.0 * PI * i as f64 / 64.0)[0] > 0.0)) {
        return Err(Error::InvalidArgument("profile curve must stay at r > 0".into()));
    }
    let total = quad(weight, 0.0, 2.0 * PI, 1e-14)?;
    let eps = total / (2.0 * PI);
    let dphi = 2.0 * PI / m as f64;
    let (mut r, mut z) = (Vec::with_capacity(m), Vec::with_capacity(m));
    let mut prev = 0.0;
    for i in 0..m {
        let target = i as f64 * dphi * eps;
        let sigma = if i == 0 {
            0.0
        } else {
            // The arc weight is positive, so Φ(σ) is increasing.
            let base = quad(weight, 0.0, prev, 1e-14)?;
            find_root(|s| base + quad(weight, prev, s, 1e-14).unwrap_or(f64::NAN) - target, prev, 2.0 * PI, 1e-15)?
        };
        let c = curve(sigma);
        r.push(c[0]);
        z.push(c[1]);
        prev = sigma;
    }
    Ok(MembraneState {
        phi0: 0.0,
        dphi,
        periodic: true,
        z_winding: 0.0,
        r,
        z,
        rdot: vec![0.0; m],
        zdot: vec![0.0; m],
        eps,
    })
}

/// A generic closed profile: an off-centre, slightly squashed ring.
pub fn perturbed_torus(m: usize) -> Result<MembraneState> {
    torus_at_rest(
        |s| {
            [
                2.0 + 0.3 * s.cos() + 0.03 * (2.0 * s).cos(),
                0.3 * s.sin(),
                -0.3 * s.sin() - 0.06 * (2.0 * s).sin(),
                0.3 * s.cos(),
            ]
        },
        m,
    )
}

/// Flat ring data on the plane `z = 0`: `r = r(φ)` folded over a 2π period,
/// `ṙ = 0`, and `ż = √(1 − r²r′²)` so that both constraints hold with ε = 1.
/// `profile(φ)` returns `(r, r′)`.
pub fn folded_ring(profile: impl Fn(f64) -> (f64, f64), m: usize) -> Result<MembraneState> {
    if m < 8 || !m.is_multiple_of(2) {
        return Err(Error::InvalidArgument("need an even node count >= 8".into()));
    }
    let dphi = 2.0 * std::f64::consts::PI / m as f64;
    let mut r = Vec::with_capacity(m);
    let mut zdot = Vec::with_capacity(m);
    for i in 0..m {
        let (ri, di) = profile(i as f64 * dphi);
        let s = 1.0 - (ri * di).powi(2);
        if !(ri > 0.0) || !(s > 0.0) {
            return Err(Error::InvalidArgument(format!("profile needs r > 0 and |r r'| < 1 (node {i})")));
        }
        r.push(ri);
        zdot.push(s.sqrt());
    }
    Ok(MembraneState {
        phi0: 0.0,
        dphi,
        periodic: true,
        z_winding: 0.0,
        r,
        z: vec![0.0; m],
        rdot: vec![0.0; m],
        zdot,
        eps: 1.0,
    })
}

// ---------------------------------------------------------------------------
// Singularity probe
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityReport {
    pub times: Vec<f64>,
    /// `I(t) = ∫ r dφ` at each snapshot.
    pub integral: Vec<f64>,
    /// `Ï` from the equations of motion, `∫ r̈ dφ`, at each snapshot.
    pub accel: Vec<f64>,
    /// Second differences of `I` at interior snapshots (uniform spacing).
    pub discrete_accel: Vec<f64>,
    pub max_accel: f64,
    /// Every `Ï` sample is strictly negative.
    pub negative_everywhere: bool,
    /// Zero of a quadratic fit to the trailing samples, once `I` decreases.
    pub blowup_time: Option<f64>,
    /// Time at which the run itself stopped on the floor, if it did.
    pub termination_time: Option<f64>,
}

pub fn singularity_probe(run: &PhysicalRun) -> Result<SingularityReport> {
    let mut times = Vec::new();
    let mut integral = Vec::new();
    let mut accel = Vec::new();
    for s in &run.snapshots {
        times.push(s.t);
        integral.push(s.state.radius_integral());
        let (ra, _) = run.acceleration(&s.state)?;
        accel.push(trapezoid(&ra, s.state.dphi, s.state.periodic));
    }
    let n = times.len();
    let discrete_accel = if n >= 3 {
        let h = times[1] - times[0];
        (1..n - 1).map(|k| (integral[k + 1] - 2.0 * integral[k] + integral[k - 1]) / (h * h)).collect()
    } else {
        Vec::new()
    };
    let max_accel = accel.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    let negative_everywhere = accel.iter().all(|v| *v < 0.0);
    let blowup_time = extrapolate_zero(&times, &integral);
    Ok(SingularityReport {
        times,
        integral,
        accel,
        discrete_accel,
        max_accel,
        negative_everywhere,
        blowup_time,
        termination_time: run.blowup_time(),
    })
}

/// Least-squares quadratic through the trailing quarter (at least 8 points)
/// of a decreasing series; returns its first zero after the last sample.
fn extrapolate_zero(t: &[f64], y: &[f64]) -> Option<f64> {
    let n = t.len();
    let k = (n / 4).max(8);
    if n < k {
        return None;
    }
    let (ts, ys) = (&t[n - k..], &y[n - k..]);
    if ys.windows(2).any(|w| w[1] >= w[0]) {
        return None;
    }
    let tc = ts[k - 1];
    let mut a = DenseMatrix::zeros(3, 3);
    let mut b = vec![0.0; 3];
    for (ti, yi) in ts.iter().zip(ys) {
        let x = ti - tc;
        let p = [1.0, x, x * x];
        for i in 0..3 {
            b[i] += p[i] * yi;
            for j in 0..3 {
                a[(i, j)] += p[i] * p[j];
            }
        }
    }
    let c = mat_solve(&a, &b).ok()?;
    let (c0, c1, c2) = (c[0], c[1], c[2]);
    let roots: Vec<f64> = if c2.abs() < 1e-300 {
        vec![-c0 / c1]
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc < 0.0 {
            return None;
        }
        let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
        vec![q / c2, c0 / q]
    };
    roots.into_iter().filter(|x| x.is_finite() && *x >= 0.0).map(|x| x + tc).reduce(f64::min)
}
