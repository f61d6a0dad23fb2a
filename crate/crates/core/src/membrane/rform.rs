//! Light-cone gauge: `R̈ = R(RR′)′` with `H = ½∮(p² + R²R′²)dφ`, and the
//! reconstruction of `ζ = t − z` from `ζ′ = ṘR′`, `ζ̇ = ½(Ṙ² + R²R′²)`.
//!
//! Space is discretised spectrally and the force is the exact gradient of
//! the discrete Hamiltonian, so the fourth-order Yoshida composition keeps
//! the discrete energy bounded.

use super::physical::{folded_ring, MembraneState, PhysicalRun};
use super::SpectralDiff;
use crate::error::{Error, Result};
use crate::numerics::{find_root, quad};

#[derive(Debug, Clone, PartialEq)]
pub struct RState {
    /// Length of the periodic parameter domain (nodes at `i·period/M`).
    pub period: f64,
    pub r: Vec<f64>,
    pub p: Vec<f64>,
    pub energy: f64,
}

impl RState {
    pub fn new(period: f64, r: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        let n = r.len();
        if n < 8 || !n.is_multiple_of(2) || p.len() != n {
            return Err(Error::InvalidArgument("R and p need the same even length >= 8".into()));
        }
        if !(period > 0.0) {
            return Err(Error::InvalidArgument(format!("period must be positive, got {period}")));
        }
        if let Some(v) = r.iter().find(|v| !(**v > 0.0)) {
            return Err(Error::InvalidArgument(format!("R must be positive, found {v}")));
        }
        let d = SpectralDiff::new(n, period);
        let energy = hamiltonian(&d, &r, &p);
        Ok(Self { period, r, p, energy })
    }

    /// Samples `R(φ)` and `p(φ)` on `m` nodes of `[0, period)`.
    pub fn from_fn(period: f64, m: usize, r: impl Fn(f64) -> f64, p: impl Fn(f64) -> f64) -> Result<Self> {
        let h = period / m as f64;
        Self::new(period, (0..m).map(|i| r(i as f64 * h)).collect(), (0..m).map(|i| p(i as f64 * h)).collect())
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn dphi(&self) -> f64 {
        self.period / self.len() as f64
    }
}

fn hamiltonian(d: &SpectralDiff, r: &[f64], p: &[f64]) -> f64 {
    let r1 = d.apply(r);
    let h = d.period() / r.len() as f64;
    0.5 * h * (0..r.len()).map(|i| p[i] * p[i] + (r[i] * r1[i]).powi(2)).sum::<f64>()
}

/// `ṗ = −∂H/∂R = −R R′² + (R² R′)′`, equal to `R(RR′)′` in the continuum.
fn force(d: &SpectralDiff, r: &[f64]) -> Vec<f64> {
    let r1 = d.apply(r);
    let flux: Vec<f64> = r.iter().zip(&r1).map(|(a, b)| a * a * b).collect();
    let df = d.apply(&flux);
    (0..r.len()).map(|i| df[i] - r[i] * r1[i] * r1[i]).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RRun {
    pub dt: f64,
    /// Every step, starting with the initial state.
    pub states: Vec<RState>,
    pub max_drift: f64,
    /// Time at which `R` crossed the floor or became non-finite.
    pub blowup: Option<f64>,
}

impl RRun {
    pub fn final_state(&self) -> &RState {
        self.states.last().expect("a run holds its initial state")
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy).collect()
    }
}

/// Fourth-order Yoshida (drift–kick–drift) evolution.
pub fn evolve_r(s: &RState, dt: f64, steps: usize) -> Result<RRun> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let s = RState::new(s.period, s.r.clone(), s.p.clone())?;
    let d = SpectralDiff::new(s.len(), s.period);
    let w1 = 1.0 / (2.0 - 2f64.powf(1.0 / 3.0));
    let w0 = -(2f64.powf(1.0 / 3.0)) * w1;
    let drifts = [0.5 * w1, 0.5 * (w0 + w1), 0.5 * (w0 + w1), 0.5 * w1];
    let kicks = [w1, w0, w1];
    let e0 = s.energy;
    let (mut r, mut p) = (s.r.clone(), s.p.clone());
    let mut run = RRun { dt, states: vec![s.clone()], max_drift: 0.0, blowup: None };
    for step in 1..=steps {
        for j in 0..4 {
            r.iter_mut().zip(&p).for_each(|(a, b)| *a += drifts[j] * dt * b);
            if j < 3 {
                let f = force(&d, &r);
                p.iter_mut().zip(&f).for_each(|(a, b)| *a += kicks[j] * dt * b);
            }
        }
        if r.iter().chain(&p).any(|v| !v.is_finite()) || r.iter().any(|v| *v < super::physical::R_FLOOR) {
            run.blowup = Some(step as f64 * dt);
            break;
        }
        let energy = hamiltonian(&d, &r, &p);
        run.max_drift = run.max_drift.max((energy - e0).abs());
        run.states.push(RState { period: s.period, r: r.clone(), p: p.clone(), energy });
    }
    Ok(run)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZetaField {
    pub dt: f64,
    pub period: f64,
    /// `ζ(τ_k, φ_j)`, with `ζ(0, 0) = 0`.
    pub zeta: Vec<Vec<f64>>,
    pub zeta_phi: Vec<Vec<f64>>,
    pub zeta_tau: Vec<Vec<f64>>,
    /// `max |∂_τ ζ′ − ∂_φ ζ̇|` over interior times (five-point stencil in τ).
    pub compat_defect: f64,
    /// `max_k |∮ ζ′ dφ|`.
    pub periodicity_defect: f64,
}

/// Integrates `ζ` along the run. Needs at least five states.
pub fn reconstruct_zeta(run: &RRun) -> Result<ZetaField> {
    let n = run.states.len();
    if n < 5 {
        return Err(Error::InvalidArgument("need at least five states to reconstruct zeta".into()));
    }
    let period = run.states[0].period;
    let m = run.states[0].len();
    let d = SpectralDiff::new(m, period);
    let dt = run.dt;
    let mut zeta_phi = Vec::with_capacity(n);
    let mut zeta_tau = Vec::with_capacity(n);
    // dζ̇/dτ at φ = 0, for the Hermite correction of the time integral.
    let mut zeta_tt0 = Vec::with_capacity(n);
    for s in &run.states {
        let r1 = d.apply(&s.r);
        let p1 = d.apply(&s.p);
        let f = force(&d, &s.r);
        zeta_phi.push((0..m).map(|j| s.p[j] * r1[j]).collect::<Vec<f64>>());
        zeta_tau.push((0..m).map(|j| 0.5 * (s.p[j].powi(2) + (s.r[j] * r1[j]).powi(2))).collect::<Vec<f64>>());
        zeta_tt0.push(s.p[0] * f[0] + s.r[0] * r1[0] * (s.p[0] * r1[0] + s.r[0] * p1[0]));
    }
    let mut zeta = Vec::with_capacity(n);
    let mut z0 = 0.0;
    let mut periodicity_defect = 0.0f64;
    for k in 0..n {
        if k > 0 {
            z0 += 0.5 * dt * (zeta_tau[k - 1][0] + zeta_tau[k][0]) + dt * dt / 12.0 * (zeta_tt0[k - 1] - zeta_tt0[k]);
        }
        let (anti, mean) = d.antiderivative(&zeta_phi[k]);
        periodicity_defect = periodicity_defect.max((mean * period).abs());
        // The antiderivative of the zero-mean part; the mean is reported, not integrated.
        zeta.push(anti.iter().map(|v| v + z0).collect::<Vec<f64>>());
    }
    let mut compat_defect = 0.0f64;
    for k in 2..n - 2 {
        let dtau: Vec<f64> = (0..m)
            .map(|j| {
                (zeta_phi[k - 2][j] - 8.0 * zeta_phi[k - 1][j] + 8.0 * zeta_phi[k + 1][j] - zeta_phi[k + 2][j])
                    / (12.0 * dt)
            })
            .collect();
        let dphi = d.apply(&zeta_tau[k]);
        compat_defect = dtau.iter().zip(&dphi).fold(compat_defect, |acc, (a, b)| acc.max((a - b).abs()));
    }
    Ok(ZetaField { dt, period, zeta, zeta_phi, zeta_tau, compat_defect, periodicity_defect })
}

// ---------------------------------------------------------------------------
// Matching the physical gauge
// ---------------------------------------------------------------------------

/// Common initial data for both gauges: the folded flat ring of
/// [`folded_ring`] at `t = z = 0`, which is also the slice `τ = 0`.
///
/// The light-cone parameter is `φ̃ = ½∫(1 + ż)dφ`; there the ring is at
/// rest (`p = 0`) with `R(φ̃) = r(φ)`.
pub fn matched_ring(
    profile: impl Fn(f64) -> (f64, f64) + Copy,
    m_physical: usize,
    m_light_cone: usize,
) -> Result<(MembraneState, RState)> {
    use std::f64::consts::PI;
    let phys = folded_ring(profile, m_physical)?;
    let zdot = |phi: f64| {
        let (r, d) = profile(phi);
        (1.0 - (r * d).powi(2)).sqrt()
    };
    let lc = |phi: f64| quad(|s| 0.5 * (1.0 + zdot(s)), 0.0, phi, 1e-14);
    let period = lc(2.0 * PI)?;
    let h = period / m_light_cone as f64;
    let mut r = Vec::with_capacity(m_light_cone);
    for i in 0..m_light_cone {
        let target = i as f64 * h;
        // φ̃ grows at least half as fast as φ.
        let phi = if i == 0 { 0.0 } else { find_root(|x| lc(x).unwrap_or(f64::NAN) - target, 0.0, 2.0 * PI, 1e-15)? };
        r.push(profile(phi).0);
    }
    let rs = RState::new(period, r, vec![0.0; m_light_cone])?;
    Ok((phys, rs))
}

/// Largest distance, in the `(r, z)` half-plane at the matching physical
/// time, between the light-cone surface points `(t, r, z) = (τ + ζ/2, R,
/// τ − ζ/2)` at step `k` and the physical profile curve.
///
/// The physical run must be periodic and saved every step.
pub fn cross_gauge_distance(phys: &PhysicalRun, r_run: &RRun, zeta: &ZetaField, k: usize) -> Result<f64> {
    let st = r_run.states.get(k).ok_or_else(|| Error::InvalidArgument(format!("no state {k}")))?;
    let tau = k as f64 * r_run.dt;
    let mut worst = 0.0f64;
    for j in 0..st.len() {
        let zj = zeta.zeta[k][j];
        let (t, rr, zz) = (tau + 0.5 * zj, st.r[j], tau - 0.5 * zj);
        let s = phys.state_at(t)?;
        worst = worst.max(curve_distance(&s, rr, zz)?);
    }
    Ok(worst)
}

/// Distance from `(r, z)` to the trigonometric interpolant of a periodic
/// profile curve.
pub fn curve_distance(s: &MembraneState, r: f64, z: f64) -> Result<f64> {
    if !s.periodic {
        return Err(Error::InvalidArgument("curve distance needs a periodic profile".into()));
    }
    let n = s.len();
    let period = s.period();
    let d = SpectralDiff::new(n, period);
    let slope = s.z_winding / period;
    let zp: Vec<f64> = (0..n).map(|i| s.z[i] - slope * i as f64 * s.dphi).collect();
    let (cr, cz) = (d.coefficients(&s.r), d.coefficients(&zp));
    let dist2 = |x: f64| {
        let (a, _) = d.interpolate(&cr, x);
        let (b, _) = d.interpolate(&cz, x);
        (a - r).powi(2) + (b + slope * x - z).powi(2)
    };
    // Coarse scan, then golden-section refinement around the best sample.
    let scan = 4 * n;
    let hs = period / scan as f64;
    let (mut best, mut bx) = (f64::INFINITY, 0.0);
    for i in 0..scan {
        let v = dist2(i as f64 * hs);
        if v < best {
            best = v;
            bx = i as f64 * hs;
        }
    }
    let (mut a, mut b) = (bx - hs, bx + hs);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (dist2(x1), dist2(x2));
    for _ in 0..80 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = dist2(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = dist2(x2);
        }
    }
    Ok(best.min(f1).min(f2).max(0.0).sqrt())
}
