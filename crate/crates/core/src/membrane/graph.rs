//! The world-sheet as a time graph `t(r, z)` and its Legendre dual.
//!
//! Minimality of a timelike graph reads
//!
//! ```text
//! t_rr(t_z² − 1) + t_zz(t_r² − 1) − 2 t_r t_z t_rz = −(t_r/r)(t_r² + t_z² − 1).
//! ```
//!
//! With `x₁ = −t_z`, `x₂ = −t_r` and `q = x₁z + x₂r + t` (so `q₁ = z`,
//! `q₂ = r`) it becomes the Monge–Ampère equation
//!
//! ```text
//! q₂[(1 − x₁²)q₁₁ + (1 − x₂²)q₂₂ − 2x₁x₂q₁₂] = x₂(x₁² + x₂² − 1)(q₁₁q₂₂ − q₁₂²).
//! ```

use super::characteristic::CharFields;
use super::physical::{MembraneState, PhysicalRun};
use super::{fd4_derivative, SpectralDiff};
use crate::error::{Error, Result};

/// Value, gradient and Hessian of a function of two variables by
/// fourth-order central differences with step `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub f: f64,
    pub f1: f64,
    pub f2: f64,
    pub f11: f64,
    pub f22: f64,
    pub f12: f64,
}

const W1: [(isize, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
const W2: [(isize, f64); 5] = [(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)];

pub fn jet2(f: &dyn Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> Result<Jet2> {
    let at = |i: isize, j: isize| f(x + i as f64 * h, y + j as f64 * h);
    let mut grid = [[0.0; 5]; 5];
    for i in -2..=2isize {
        for j in -2..=2isize {
            let v = at(i, j);
            if !v.is_finite() {
                return Err(Error::NotAGraph);
            }
            grid[(i + 2) as usize][(j + 2) as usize] = v;
        }
    }
    let g = |i: isize, j: isize| grid[(i + 2) as usize][(j + 2) as usize];
    let d1 = |pick: &dyn Fn(isize) -> f64| W1.iter().map(|&(k, w)| w * pick(k)).sum::<f64>() / (12.0 * h);
    let d2 = |pick: &dyn Fn(isize) -> f64| W2.iter().map(|&(k, w)| w * pick(k)).sum::<f64>() / (12.0 * h * h);
    let f12 = W1.iter().map(|&(i, wi)| wi * W1.iter().map(|&(j, wj)| wj * g(i, j)).sum::<f64>()).sum::<f64>()
        / (144.0 * h * h);
    Ok(Jet2 {
        f: g(0, 0),
        f1: d1(&|k| g(k, 0)),
        f2: d1(&|k| g(0, k)),
        f11: d2(&|k| g(k, 0)),
        f22: d2(&|k| g(0, k)),
        f12,
    })
}

/// Residual of the time-graph equation at `(r, z)`; `t` is `t(r, z)`.
pub fn time_graph_residual(t: &dyn Fn(f64, f64) -> f64, r: f64, z: f64, h: f64) -> Result<f64> {
    GraphJet::from_fn(t, r, z, h)?.time_graph()
}

fn monge_ampere(x1: f64, x2: f64, q2: f64, q11: f64, q22: f64, q12: f64) -> f64 {
    q2 * ((1.0 - x1 * x1) * q11 + (1.0 - x2 * x2) * q22 - 2.0 * x1 * x2 * q12)
        - x2 * (x1 * x1 + x2 * x2 - 1.0) * (q11 * q22 - q12 * q12)
}

/// Monge–Ampère residual of a potential `q(x₁, x₂)`.
pub fn monge_ampere_residual(q: &dyn Fn(f64, f64) -> f64, x1: f64, x2: f64, h: f64) -> Result<f64> {
    let j = jet2(q, x1, x2, h)?;
    Ok(monge_ampere(x1, x2, j.f2, j.f11, j.f22, j.f12))
}

/// The dual point `(x₁, x₂, q)` of the graph at `(r, z)`.
pub fn legendre_point(t: &dyn Fn(f64, f64) -> f64, r: f64, z: f64, h: f64) -> Result<(f64, f64, f64)> {
    let j = jet2(t, r, z, h)?;
    let (x1, x2) = (-j.f2, -j.f1);
    Ok((x1, x2, x1 * z + x2 * r + j.f))
}

/// Second-order data of `t(r, z)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphJet {
    pub r: f64,
    pub z: f64,
    pub t_r: f64,
    pub t_z: f64,
    pub t_rr: f64,
    pub t_zz: f64,
    pub t_rz: f64,
}

impl GraphJet {
    /// From a parametrization `s ↦ (t, r, z)` with first derivatives `xa`
    /// and second derivatives `xab`. Folds (singular `∂(r,z)/∂s`) are
    /// rejected.
    pub fn from_parametric(x: [f64; 3], xa: [[f64; 3]; 2], xab: [[[f64; 3]; 2]; 2]) -> Result<Self> {
        let (j11, j12, j21, j22) = (xa[0][1], xa[1][1], xa[0][2], xa[1][2]);
        let det = j11 * j22 - j12 * j21;
        let scale = (j11.abs() + j12.abs()) * (j21.abs() + j22.abs());
        if !(det.abs() > 1e-10 * scale) || !det.is_finite() {
            return Err(Error::NotAGraph);
        }
        // rows of J⁻¹: ∂s_a/∂(r, z)
        let inv = [[j22 / det, -j12 / det], [-j21 / det, j11 / det]];
        let grad = |ta: [f64; 2]| [ta[0] * inv[0][0] + ta[1] * inv[1][0], ta[0] * inv[0][1] + ta[1] * inv[1][1]];
        let g = grad([xa[0][0], xa[1][0]]);
        let mut k = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                k[a][b] = xab[a][b][0] - g[0] * xab[a][b][1] - g[1] * xab[a][b][2];
            }
        }
        let hess = |p: usize, q: usize| {
            (0..2).map(|a| (0..2).map(|b| inv[a][p] * k[a][b] * inv[b][q]).sum::<f64>()).sum::<f64>()
        };
        Ok(Self { r: x[1], z: x[2], t_r: g[0], t_z: g[1], t_rr: hess(0, 0), t_zz: hess(1, 1), t_rz: hess(0, 1) })
    }

    pub fn from_fn(t: &dyn Fn(f64, f64) -> f64, r: f64, z: f64, h: f64) -> Result<Self> {
        let j = jet2(t, r, z, h)?;
        Ok(Self { r, z, t_r: j.f1, t_z: j.f2, t_rr: j.f11, t_zz: j.f22, t_rz: j.f12 })
    }

    pub fn time_graph(&self) -> Result<f64> {
        let (tr, tz) = (self.t_r, self.t_z);
        let grad = tr * tr + tz * tz - 1.0;
        if !(grad > 0.0) {
            return Err(Error::NotAGraph);
        }
        Ok(self.t_rr * (tz * tz - 1.0) + self.t_zz * (tr * tr - 1.0) - 2.0 * tr * tz * self.t_rz + tr / self.r * grad)
    }

    /// Hessian of the Legendre dual `q`: minus the inverse Hessian of `t`
    /// in the `(z, r)` ordering. `None` where the dual map degenerates.
    fn dual_hessian(&self) -> Option<(f64, f64, f64)> {
        let det = self.t_zz * self.t_rr - self.t_rz * self.t_rz;
        let size = self.t_zz.abs().max(self.t_rr.abs()).max(self.t_rz.abs());
        (det.abs() > 1e-8 * size * size).then(|| (-self.t_rr / det, -self.t_zz / det, self.t_rz / det))
    }

    /// The dual point `(x₁, x₂)`.
    pub fn dual_point(&self) -> (f64, f64) {
        (-self.t_z, -self.t_r)
    }

    /// Monge–Ampère residual of the Legendre dual.
    pub fn monge_ampere_raw(&self) -> Option<f64> {
        let (q11, q22, q12) = self.dual_hessian()?;
        let (x1, x2) = self.dual_point();
        Some(monge_ampere(x1, x2, self.r, q11, q22, q12))
    }

    /// [`Self::monge_ampere_raw`] divided by the size of its largest term.
    pub fn monge_ampere(&self) -> Option<f64> {
        let (q11, q22, q12) = self.dual_hessian()?;
        let (x1, x2) = self.dual_point();
        let terms = [
            self.r * (1.0 - x1 * x1) * q11,
            self.r * (1.0 - x2 * x2) * q22,
            2.0 * self.r * x1 * x2 * q12,
            x2 * (x1 * x1 + x2 * x2 - 1.0) * (q11 * q22 - q12 * q12),
        ];
        let scale = terms.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Some(monge_ampere(x1, x2, self.r, q11, q22, q12).abs() / scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphResiduals {
    pub time_graph: f64,
    /// `None` when the dual map degenerates at some point.
    pub monge_ampere: Option<f64>,
    pub points: usize,
}

fn collect(jets: impl IntoIterator<Item = Result<GraphJet>>) -> Result<GraphResiduals> {
    let mut out = GraphResiduals { time_graph: 0.0, monge_ampere: Some(0.0), points: 0 };
    for j in jets {
        let j = j?;
        out.time_graph = out.time_graph.max(j.time_graph()?.abs());
        out.monge_ampere = match (out.monge_ampere, j.monge_ampere()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        out.points += 1;
    }
    Ok(out)
}

/// Largest residuals of an explicit graph over a set of `(r, z)` points.
pub fn graph_residuals(t: &dyn Fn(f64, f64) -> f64, points: &[(f64, f64)], h: f64) -> Result<GraphResiduals> {
    collect(points.iter().map(|&(r, z)| GraphJet::from_fn(t, r, z, h)))
}

/// Residuals of characteristic fields, read as a graph through their jets.
pub fn graph_residuals_from_fields(f: &CharFields) -> Result<GraphResiduals> {
    collect(f.jets.iter().map(|j| GraphJet::from_parametric(j.x, [j.xp, j.xm], [[j.xpp, j.xpm], [j.xpm, j.xmm]])))
}

/// Residuals of one physical-gauge snapshot, parametrized by `(t, φ)`;
/// accelerations come from the run's equations of motion. Minkowski time
/// is `εt`.
pub fn graph_residuals_from_physical(run: &PhysicalRun, snapshot: usize) -> Result<GraphResiduals> {
    let snap = run.snapshots.get(snapshot).ok_or_else(|| Error::InvalidArgument(format!("no snapshot {snapshot}")))?;
    let s: &MembraneState = &snap.state;
    let (rp, zp) = s.derivatives(run.scheme)?;
    let d = |f: &[f64]| -> Vec<f64> {
        if s.periodic {
            SpectralDiff::new(f.len(), s.period()).apply(f)
        } else {
            fd4_derivative(f, s.dphi)
        }
    };
    let (rpp, zpp, rdp, zdp) = (d(&rp), d(&zp), d(&s.rdot), d(&s.zdot));
    let (rdd, zdd) = run.acceleration(s)?;
    collect((0..s.len()).map(|i| {
        GraphJet::from_parametric(
            [snap.t * s.eps, s.r[i], s.z[i]],
            [[s.eps, s.rdot[i], s.zdot[i]], [0.0, rp[i], zp[i]]],
            [[[0.0, rdd[i], zdd[i]], [0.0, rdp[i], zdp[i]]], [[0.0, rdp[i], zdp[i]], [0.0, rpp[i], zpp[i]]]],
        )
    }))
}

/// The catenoid `r = a cosh(z₀/a)` boosted with velocity `β` along `z`,
/// written as `t(r, z)` on its upper half (`z₀ > 0`, `r > a`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostedCatenoidGraph {
    pub a: f64,
    pub beta: f64,
}

impl BoostedCatenoidGraph {
    pub fn new(a: f64, beta: f64) -> Result<Self> {
        if !(a > 0.0) || !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidArgument("need a > 0 and 0 < beta < 1".into()));
        }
        Ok(Self { a, beta })
    }

    /// `t = z/β − z₀(r)/(γβ)`; NaN where `r < a`.
    pub fn t(&self, r: f64, z: f64) -> f64 {
        let gamma = 1.0 / (1.0 - self.beta * self.beta).sqrt();
        let z0 = self.a * (r / self.a).acosh();
        z / self.beta - z0 / (gamma * self.beta)
    }
}
