//! Null (characteristic) coordinates `θ±` on the world-sheet.
//!
//! With `x = (t, r, z)` and `x±² = 0` the equations of motion become
//!
//! ```text
//! 2r t₊₋ + r₊t₋ + r₋t₊ = 0
//! 2r z₊₋ + r₊z₋ + r₋z₊ = 0
//! 2r r₊₋ + r₊r₋ + t₊t₋ − z₊z₋ = 0
//! ```
//!
//! Products use the signature `(+, −, −)`; `m_μ` is the cross product of
//! `x₊` and `x₋` and `S^μ` its symmetric companion.

use super::{fd4_derivative, fd4_second_derivative, mink};
use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Position and derivatives up to second order at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullJet {
    pub x: Vec3,
    pub xp: Vec3,
    pub xm: Vec3,
    pub xpp: Vec3,
    pub xmm: Vec3,
    pub xpm: Vec3,
}

/// An exact world-sheet in null coordinates.
pub trait NullSolution {
    fn jet(&self, tp: f64, tm: f64) -> NullJet;
}

/// `θ ↦ θ + amp·sin(freq·θ)`; monotone while `|amp·freq| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reparam {
    pub amp: f64,
    pub freq: f64,
}

impl Reparam {
    pub const IDENTITY: Reparam = Reparam { amp: 0.0, freq: 0.0 };

    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let (s, c) = (self.freq * x).sin_cos();
        (x + self.amp * s, 1.0 + self.amp * self.freq * c, -self.amp * self.freq * self.freq * s)
    }
}

/// Static catenoid `r = a cosh(z/a)` with `t = (θ₊+θ₋)/2`,
/// `a sinh(z/a) = (θ₊−θ₋)/2`, optionally boosted along `z` and
/// reparametrised in each null coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatenoidNull {
    pub a: f64,
    pub rapidity: f64,
    pub plus: Reparam,
    pub minus: Reparam,
}

impl CatenoidNull {
    pub fn new(a: f64) -> Self {
        Self { a, rapidity: 0.0, plus: Reparam::IDENTITY, minus: Reparam::IDENTITY }
    }

    pub fn boosted(mut self, rapidity: f64) -> Self {
        self.rapidity = rapidity;
        self
    }

    pub fn reparametrized(mut self, plus: Reparam, minus: Reparam) -> Self {
        self.plus = plus;
        self.minus = minus;
        self
    }
}

impl NullSolution for CatenoidNull {
    fn jet(&self, tp: f64, tm: f64) -> NullJet {
        let a = self.a;
        let (fp, dp, ddp) = self.plus.eval(tp);
        let (fm, dm, ddm) = self.minus.eval(tm);
        let u = 0.5 * (fp - fm);
        let r = (a * a + u * u).sqrt();
        let (ru, ruu) = (u / r, a * a / r.powi(3));
        let (zu, zuu) = (a / r, -a * u / r.powi(3));
        let x = [0.5 * (fp + fm), r, a * (u / a).asinh()];
        let xp = [0.5, 0.5 * ru, 0.5 * zu];
        let xm = [0.5, -0.5 * ru, -0.5 * zu];
        let xx = [0.0, 0.25 * ruu, 0.25 * zuu];
        let xpm = [0.0, -0.25 * ruu, -0.25 * zuu];
        let (ch, sh) = (self.rapidity.cosh(), self.rapidity.sinh());
        let boost = |v: Vec3| [ch * v[0] + sh * v[2], v[1], sh * v[0] + ch * v[2]];
        let comb = |v: Vec3, s: f64, w: Vec3, q: f64| [v[0] * s + w[0] * q, v[1] * s + w[1] * q, v[2] * s + w[2] * q];
        NullJet {
            x: boost(x),
            xp: boost(comb(xp, dp, xp, 0.0)),
            xm: boost(comb(xm, dm, xm, 0.0)),
            xpp: boost(comb(xx, dp * dp, xp, ddp)),
            xmm: boost(comb(xx, dm * dm, xm, ddm)),
            xpm: boost(comb(xpm, dp * dm, xpm, 0.0)),
        }
    }
}

/// Fields on a uniform `θ₊ × θ₋` grid; node `(i, j)` is stored at `i·nm + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharFields {
    pub tp0: f64,
    pub hp: f64,
    pub np: usize,
    pub tm0: f64,
    pub hm: f64,
    pub nm: usize,
    pub jets: Vec<NullJet>,
}

impl CharFields {
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.nm + j
    }

    pub fn theta(&self, i: usize, j: usize) -> (f64, f64) {
        (self.tp0 + i as f64 * self.hp, self.tm0 + j as f64 * self.hm)
    }

    pub fn len(&self) -> usize {
        self.jets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jets.is_empty()
    }

    /// Samples an exact solution.
    pub fn from_solution(
        sol: &impl NullSolution,
        (tp0, hp, np): (f64, f64, usize),
        (tm0, hm, nm): (f64, f64, usize),
    ) -> Self {
        let mut jets = Vec::with_capacity(np * nm);
        for i in 0..np {
            for j in 0..nm {
                jets.push(sol.jet(tp0 + i as f64 * hp, tm0 + j as f64 * hm));
            }
        }
        Self { tp0, hp, np, tm0, hm, nm, jets }
    }

    /// Builds derivatives from node positions with fourth-order differences.
    pub fn from_nodes((tp0, hp, np): (f64, f64, usize), (tm0, hm, nm): (f64, f64, usize), x: &[Vec3]) -> Result<Self> {
        if np < 6 || nm < 6 || x.len() != np * nm {
            return Err(Error::InvalidArgument("need at least 6 × 6 nodes".into()));
        }
        let mut jets =
            vec![
                NullJet { x: [0.0; 3], xp: [0.0; 3], xm: [0.0; 3], xpp: [0.0; 3], xmm: [0.0; 3], xpm: [0.0; 3] };
                np * nm
            ];
        for c in 0..3 {
            let f: Vec<f64> = x.iter().map(|v| v[c]).collect();
            let fp = grid_d_plus(&f, np, nm, hp);
            let fm = grid_d_minus(&f, np, nm, hm);
            let fpp = grid_apply(&f, np, nm, true, |s| fd4_second_derivative(s, hp));
            let fmm = grid_apply(&f, np, nm, false, |s| fd4_second_derivative(s, hm));
            let fpm = grid_d_minus(&fp, np, nm, hm);
            for k in 0..np * nm {
                let jt = &mut jets[k];
                jt.x[c] = f[k];
                jt.xp[c] = fp[k];
                jt.xm[c] = fm[k];
                jt.xpp[c] = fpp[k];
                jt.xmm[c] = fmm[k];
                jt.xpm[c] = fpm[k];
            }
        }
        Ok(Self { tp0, hp, np, tm0, hm, nm, jets })
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.jets.iter().map(|j| j.x).collect()
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.jets.iter().map(|j| j.x[c]).collect()
    }
}

fn grid_apply(f: &[f64], np: usize, nm: usize, along_plus: bool, op: impl Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    if along_plus {
        for j in 0..nm {
            let line: Vec<f64> = (0..np).map(|i| f[i * nm + j]).collect();
            for (i, v) in op(&line).into_iter().enumerate() {
                out[i * nm + j] = v;
            }
        }
    } else {
        for i in 0..np {
            out[i * nm..(i + 1) * nm].copy_from_slice(&op(&f[i * nm..(i + 1) * nm]));
        }
    }
    out
}

/// `∂₊` of a grid field (fourth order, one-sided at the edges).
pub fn grid_d_plus(f: &[f64], np: usize, nm: usize, hp: f64) -> Vec<f64> {
    grid_apply(f, np, nm, true, |s| fd4_derivative(s, hp))
}

/// `∂₋` of a grid field.
pub fn grid_d_minus(f: &[f64], np: usize, nm: usize, hm: f64) -> Vec<f64> {
    grid_apply(f, np, nm, false, |s| fd4_derivative(s, hm))
}

/// `m_μ = (r₊z₋ − r₋z₊, z₊t₋ − z₋t₊, t₊r₋ − t₋r₊)`.
pub fn m_vector(j: &NullJet) -> Vec3 {
    let (p, m) = (j.xp, j.xm);
    [p[1] * m[2] - m[1] * p[2], p[2] * m[0] - m[2] * p[0], p[0] * m[1] - m[0] * p[1]]
}

/// `S^μ = (r₊z₋ + r₋z₊, z₊t₋ + z₋t₊, t₊r₋ + t₋r₊)`.
pub fn s_vector(j: &NullJet) -> Vec3 {
    let (p, m) = (j.xp, j.xm);
    [p[1] * m[2] + m[1] * p[2], p[2] * m[0] + m[2] * p[0], p[0] * m[1] + m[0] * p[1]]
}

/// The three second-order equations at one point.
pub fn wave_residual(j: &NullJet) -> Vec3 {
    let (r, p, m, pm) = (j.x[1], j.xp, j.xm, j.xpm);
    [
        2.0 * r * pm[0] + p[1] * m[0] + m[1] * p[0],
        2.0 * r * pm[1] + p[1] * m[1] + p[0] * m[0] - p[2] * m[2],
        2.0 * r * pm[2] + p[1] * m[2] + m[1] * p[2],
    ]
}

/// Maxima over the grid of the pointwise identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharResiduals {
    /// `max(|x₊²|, |x₋²|)`.
    pub null: f64,
    /// The second-order system itself.
    pub wave: f64,
    /// `t₊₋S⁰ = z₊₋S² = r₊₋S¹`.
    pub symmetric: f64,
    /// `m₁²+m₂² = 2t₊t₋w`, `m₀²−m₁² = 2z₊z₋w`, `m₀²−m₂² = 2r₊r₋w`, `−m² = w²`.
    pub m_identities: f64,
    /// `m₁m₂ = wS₀`, `m₂m₀ = wS₁`, `m₀m₁ = wS₂` (indices lowered).
    pub s_identities: f64,
    /// `r₊p₋ + r₋q₊` with `p = artanh(z₊/t₊)`, `q = artanh(z₋/t₋)`.
    pub pq: f64,
}

impl CharResiduals {
    pub fn max_identity(&self) -> f64 {
        [self.wave, self.symmetric, self.m_identities, self.s_identities, self.pq].into_iter().fold(0.0, f64::max)
    }
}

pub fn char_residuals(f: &CharFields) -> CharResiduals {
    let mut out = CharResiduals { null: 0.0, wave: 0.0, symmetric: 0.0, m_identities: 0.0, s_identities: 0.0, pq: 0.0 };
    for jt in &f.jets {
        let (p, m, pm) = (jt.xp, jt.xm, jt.xpm);
        let w = mink(&p, &m);
        let mv = m_vector(jt);
        let s = s_vector(jt);
        out.null = out.null.max(mink(&p, &p).abs()).max(mink(&m, &m).abs());
        out.wave = wave_residual(jt).iter().fold(out.wave, |a, v| a.max(v.abs()));
        let (a, b, c) = (pm[0] * s[0], pm[2] * s[2], pm[1] * s[1]);
        out.symmetric = out.symmetric.max((a - b).abs()).max((b - c).abs());
        let msq = mv[0] * mv[0] - mv[1] * mv[1] - mv[2] * mv[2];
        for v in [
            mv[1] * mv[1] + mv[2] * mv[2] - 2.0 * p[0] * m[0] * w,
            mv[0] * mv[0] - mv[1] * mv[1] - 2.0 * p[2] * m[2] * w,
            mv[0] * mv[0] - mv[2] * mv[2] - 2.0 * p[1] * m[1] * w,
            -msq - w * w,
        ] {
            out.m_identities = out.m_identities.max(v.abs());
        }
        // Lowering with diag(1, −1, −1): S₁ = −S¹, S₂ = −S².
        for v in [mv[1] * mv[2] - w * s[0], mv[2] * mv[0] + w * s[1], mv[0] * mv[1] + w * s[2]] {
            out.s_identities = out.s_identities.max(v.abs());
        }
        let p_minus = (pm[2] * p[0] - p[2] * pm[0]) / (p[0] * p[0] - p[2] * p[2]);
        let q_plus = (pm[2] * m[0] - m[2] * pm[0]) / (m[0] * m[0] - m[2] * m[2]);
        out.pq = out.pq.max((p[1] * p_minus + m[1] * q_plus).abs());
    }
    out
}

// ---------------------------------------------------------------------------
// Marching
// ---------------------------------------------------------------------------

/// Goursat data: positions along `θ₋ = tm0` (varying θ₊) and along
/// `θ₊ = tp0` (varying θ₋); both lines share the corner node.
#[derive(Debug, Clone, PartialEq)]
pub struct NullData {
    pub tp0: f64,
    pub hp: f64,
    pub tm0: f64,
    pub hm: f64,
    pub along_plus: Vec<Vec3>,
    pub along_minus: Vec<Vec3>,
}

impl NullData {
    pub fn from_solution(
        sol: &impl NullSolution,
        (tp0, hp, np): (f64, f64, usize),
        (tm0, hm, nm): (f64, f64, usize),
    ) -> Self {
        Self {
            tp0,
            hp,
            tm0,
            hm,
            along_plus: (0..np).map(|i| sol.jet(tp0 + i as f64 * hp, tm0).x).collect(),
            along_minus: (0..nm).map(|j| sol.jet(tp0, tm0 + j as f64 * hm).x).collect(),
        }
    }

    /// Largest `|x′²| / |x′|²` along the two initial lines.
    pub fn null_defect(&self) -> f64 {
        let line = |pts: &[Vec3], h: f64| -> f64 {
            let d: Vec<Vec<f64>> =
                (0..3).map(|c| fd4_derivative(&pts.iter().map(|v| v[c]).collect::<Vec<_>>(), h)).collect();
            (0..pts.len())
                .map(|k| {
                    let v = [d[0][k], d[1][k], d[2][k]];
                    mink(&v, &v).abs() / (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
                })
                .fold(0.0, f64::max)
        };
        line(&self.along_plus, self.hp).max(line(&self.along_minus, self.hm))
    }
}

/// Tolerance on the relative null defect of the initial lines.
pub const INITIAL_NULL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct MarchReport {
    pub fields: CharFields,
    /// Largest cell-centred `|x±²|` over the marched cells.
    pub null_defect: f64,
    /// The same quantity restricted to cells touching the initial lines.
    pub initial_null_defect: f64,
    pub max_iterations: usize,
}

/// Marches the second-order system cell by cell from the two initial lines.
pub fn evolve_characteristic(data: &NullData) -> Result<MarchReport> {
    let (np, nm) = (data.along_plus.len(), data.along_minus.len());
    if np < 6 || nm < 6 {
        return Err(Error::InvalidArgument("need at least 6 nodes on each initial line".into()));
    }
    let corner = (0..3).map(|c| (data.along_plus[0][c] - data.along_minus[0][c]).abs()).fold(0.0, f64::max);
    if corner > 1e-12 {
        return Err(Error::InvalidArgument("initial lines must share their corner".into()));
    }
    let nd = data.null_defect();
    if nd > INITIAL_NULL_TOL {
        return Err(Error::InvalidArgument(format!("initial lines are not null (relative defect {nd:e})")));
    }
    let (hp, hm) = (data.hp, data.hm);
    let mut x = vec![[0.0; 3]; np * nm];
    for i in 0..np {
        x[i * nm] = data.along_plus[i];
    }
    x[..nm].copy_from_slice(&data.along_minus[..nm]);
    let (mut null_defect, mut initial_null_defect, mut max_iterations) = (0.0f64, 0.0f64, 0usize);
    for i in 0..np - 1 {
        for j in 0..nm - 1 {
            let (a, b, c) = (x[i * nm + j], x[(i + 1) * nm + j], x[i * nm + j + 1]);
            let mut xn: Vec3 = std::array::from_fn(|k| b[k] + c[k] - a[k]);
            let mut iters = 0;
            let cell = |xn: &Vec3| -> (Vec3, Vec3) {
                (
                    std::array::from_fn(|k| (b[k] - a[k] + xn[k] - c[k]) / (2.0 * hp)),
                    std::array::from_fn(|k| (c[k] - a[k] + xn[k] - b[k]) / (2.0 * hm)),
                )
            };
            loop {
                iters += 1;
                let (xp, xm) = cell(&xn);
                let r = 0.25 * (a[1] + b[1] + c[1] + xn[1]);
                if !(r > super::physical::R_FLOOR) {
                    let (tb, th) = (data.tp0 + (i as f64 + 0.5) * hp, data.tm0 + (j as f64 + 0.5) * hm);
                    return Err(Error::BlowupAt { theta_plus: tb, theta_minus: th });
                }
                let f = [
                    -(xp[1] * xm[0] + xm[1] * xp[0]),
                    -(xp[1] * xm[1] + xp[0] * xm[0] - xp[2] * xm[2]),
                    -(xp[1] * xm[2] + xm[1] * xp[2]),
                ];
                let next: Vec3 = std::array::from_fn(|k| b[k] + c[k] - a[k] + hp * hm * f[k] / (2.0 * r));
                let change = (0..3).map(|k| (next[k] - xn[k]).abs()).fold(0.0, f64::max);
                xn = next;
                let scale = 1.0 + xn.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if change <= 4.0 * f64::EPSILON * scale || iters >= 100 {
                    break;
                }
            }
            if xn.iter().any(|v| !v.is_finite()) {
                let (tb, th) = (data.tp0 + (i as f64 + 1.0) * hp, data.tm0 + (j as f64 + 1.0) * hm);
                return Err(Error::BlowupAt { theta_plus: tb, theta_minus: th });
            }
            let (xp, xm) = cell(&xn);
            let d = mink(&xp, &xp).abs().max(mink(&xm, &xm).abs());
            null_defect = null_defect.max(d);
            if i == 0 || j == 0 {
                initial_null_defect = initial_null_defect.max(d);
            }
            max_iterations = max_iterations.max(iters);
            x[(i + 1) * nm + j + 1] = xn;
        }
    }
    let fields = CharFields::from_nodes((data.tp0, hp, np), (data.tm0, hm, nm), &x)?;
    Ok(MarchReport { fields, null_defect, initial_null_defect, max_iterations })
}

// ---------------------------------------------------------------------------
// Light-cone reduction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct LightCone {
    /// `τ = (t + z)/2` at the nodes.
    pub tau: Vec<f64>,
    /// `ξ = t − z` at the nodes.
    pub xi: Vec<f64>,
    /// `max |ξ± − r±²/(2τ±)|`.
    pub xi_relation: f64,
    /// `2rτ₊₋ + r₊τ₋ + r₋τ₊` and `4τ₊τ₋ r r₊₋ + (r₊τ₋ + r₋τ₊)²`.
    pub pair: [f64; 2],
    /// With `r = e^{−2ρ}`: `τ₊₋ − (ρ₊τ₋ + ρ₋τ₊)` and
    /// `2ρ₊₋ − 4ρ₊ρ₋ − (ρ₊τ₋ + ρ₋τ₊)²/(τ₊τ₋)`.
    pub rho_form: [f64; 2],
    /// `4RR₊₋τ₊τ₋ + (R₊τ₋ + R₋τ₊)²` with `R = r`, all derivatives taken by
    /// grid differences of the node values.
    pub r_equation: f64,
    /// `max |ζ± − R±²/(2τ±)|` with `ζ = ξ`, by grid differences.
    pub zeta_relation: f64,
}

pub fn lightcone_reduce(f: &CharFields) -> Result<LightCone> {
    let scale = f.jets.iter().map(|j| j.xp[0].abs().max(j.xm[0].abs())).fold(0.0, f64::max);
    for (k, jt) in f.jets.iter().enumerate() {
        let (tp, tm) = (0.5 * (jt.xp[0] + jt.xp[2]), 0.5 * (jt.xm[0] + jt.xm[2]));
        if tp.abs() <= 1e-10 * scale || tm.abs() <= 1e-10 * scale {
            let (a, b) = f.theta(k / f.nm, k % f.nm);
            return Err(Error::ChartBreakdown(format!("τ± vanishes at θ = ({a}, {b})")));
        }
    }
    let sign_p = (f.jets[0].xp[0] + f.jets[0].xp[2]).signum();
    let sign_m = (f.jets[0].xm[0] + f.jets[0].xm[2]).signum();
    if f.jets.iter().any(|j| (j.xp[0] + j.xp[2]).signum() != sign_p || (j.xm[0] + j.xm[2]).signum() != sign_m) {
        return Err(Error::ChartBreakdown("τ± changes sign on the grid".into()));
    }
    let mut out = LightCone {
        tau: f.jets.iter().map(|j| 0.5 * (j.x[0] + j.x[2])).collect(),
        xi: f.jets.iter().map(|j| j.x[0] - j.x[2]).collect(),
        xi_relation: 0.0,
        pair: [0.0; 2],
        rho_form: [0.0; 2],
        r_equation: 0.0,
        zeta_relation: 0.0,
    };
    for jt in &f.jets {
        let (r, rp, rm, rpm) = (jt.x[1], jt.xp[1], jt.xm[1], jt.xpm[1]);
        let (tp, tm, tpm) = (0.5 * (jt.xp[0] + jt.xp[2]), 0.5 * (jt.xm[0] + jt.xm[2]), 0.5 * (jt.xpm[0] + jt.xpm[2]));
        let (xip, xim) = (jt.xp[0] - jt.xp[2], jt.xm[0] - jt.xm[2]);
        out.xi_relation =
            out.xi_relation.max((xip - rp * rp / (2.0 * tp)).abs()).max((xim - rm * rm / (2.0 * tm)).abs());
        let mix = rp * tm + rm * tp;
        out.pair[0] = out.pair[0].max((2.0 * r * tpm + mix).abs());
        out.pair[1] = out.pair[1].max((4.0 * tp * tm * r * rpm + mix * mix).abs());
        let (hp, hm) = (-rp / (2.0 * r), -rm / (2.0 * r));
        let hpm = -rpm / (2.0 * r) + rp * rm / (2.0 * r * r);
        let hmix = hp * tm + hm * tp;
        out.rho_form[0] = out.rho_form[0].max((tpm - hmix).abs());
        out.rho_form[1] = out.rho_form[1].max((2.0 * hpm - 4.0 * hp * hm - hmix * hmix / (tp * tm)).abs());
    }
    let (np, nm) = (f.np, f.nm);
    let big_r = f.component(1);
    let rp = grid_d_plus(&big_r, np, nm, f.hp);
    let rm = grid_d_minus(&big_r, np, nm, f.hm);
    let rpm = grid_d_minus(&rp, np, nm, f.hm);
    let tp = grid_d_plus(&out.tau, np, nm, f.hp);
    let tm = grid_d_minus(&out.tau, np, nm, f.hm);
    let zp = grid_d_plus(&out.xi, np, nm, f.hp);
    let zm = grid_d_minus(&out.xi, np, nm, f.hm);
    for k in 0..np * nm {
        let mix = rp[k] * tm[k] + rm[k] * tp[k];
        out.r_equation = out.r_equation.max((4.0 * big_r[k] * rpm[k] * tp[k] * tm[k] + mix * mix).abs());
        out.zeta_relation = out
            .zeta_relation
            .max((zp[k] - rp[k] * rp[k] / (2.0 * tp[k])).abs())
            .max((zm[k] - rm[k] * rm[k] / (2.0 * tm[k])).abs());
    }
    Ok(out)
}
