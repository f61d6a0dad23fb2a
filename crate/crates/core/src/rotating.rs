//! Planar curves whose rigid rotation at constant angular velocity `w`
//! sweeps a minimal surface in R^{1,2}: `x(t, φ) = (t, R(wt) u(φ))`.
//!
//! The shape equation is `w² r² (1 + γ sin² φ) = 1`, with `φ` the angle
//! between `u` and `u'` and `γ + 1 = 1/γ₀²`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::quad;

pub type Vec2 = [f64; 2];
pub type CurveFn = Arc<dyn Fn(f64) -> Vec2 + Send + Sync>;

/// Parametrized planar curve with its first two derivatives.
#[derive(Clone)]
pub struct PlanarCurve {
    pub u: CurveFn,
    pub du: CurveFn,
    pub d2u: CurveFn,
    pub period: f64,
}

impl std::fmt::Debug for PlanarCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PlanarCurve").field("period", &self.period).finish_non_exhaustive()
    }
}

impl PlanarCurve {
    /// Same curve with parameter shifted: `φ ↦ u(φ + shift)`.
    pub fn shifted(&self, shift: f64) -> Self {
        let (u, du, d2u) = (self.u.clone(), self.du.clone(), self.d2u.clone());
        PlanarCurve {
            u: Arc::new(move |p| u(p + shift)),
            du: Arc::new(move |p| du(p + shift)),
            d2u: Arc::new(move |p| d2u(p + shift)),
            period: self.period,
        }
    }

    /// Largest central-difference defect of `u'` and `u''` over `n` samples.
    pub fn derivative_consistency(&self, n: usize, h: f64) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..n {
            let p = self.period * i as f64 / n as f64;
            let (a, b) = ((self.u)(p + h), (self.u)(p - h));
            let (da, db) = ((self.du)(p + h), (self.du)(p - h));
            let (d, dd) = ((self.du)(p), (self.d2u)(p));
            for c in 0..2 {
                worst = worst.max(((a[c] - b[c]) / (2.0 * h) - d[c]).abs());
                worst = worst.max(((da[c] - db[c]) / (2.0 * h) - dd[c]).abs());
            }
        }
        worst
    }
}

fn rot(t: f64) -> Vec2 {
    [t.cos(), t.sin()]
}

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// `A v` with `A` the quarter-turn generator.
fn quarter(v: Vec2) -> Vec2 {
    [-v[1], v[0]]
}

fn rotate(angle: f64, v: Vec2) -> Vec2 {
    let (c, s) = (angle.cos(), angle.sin());
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

// ---------------------------------------------------------------------------
// Epicycloids
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpicycloidParams {
    pub n: i32,
    pub k: i32,
    pub sign: Sign,
}

impl EpicycloidParams {
    pub fn new(n: i32, k: i32, sign: Sign) -> Result<Self> {
        if n == 0 || k == 0 || n == k || n.signum() != k.signum() {
            return Err(Error::InvalidArgument(format!("need n, k nonzero, n != k, nk > 0; got ({n}, {k})")));
        }
        Ok(Self { n, k, sign })
    }
}

/// `2u±(φ) = (R^n(φ)/n ± R^k(φ)/k) e₁` with its canonical frequency.
#[derive(Debug, Clone)]
pub struct Epicycloid {
    pub params: EpicycloidParams,
    /// `w² = 4n²k²/(n-k)²`.
    pub w2: f64,
    /// `4nk/(n-k)²`.
    pub q: f64,
    pub curve: PlanarCurve,
}

pub fn epicycloid(params: EpicycloidParams) -> Epicycloid {
    let (n, k) = (params.n as f64, params.k as f64);
    let s = params.sign.value();
    let u = move |p: f64| {
        let (a, b) = (rot(n * p), rot(k * p));
        [a[0] / (2.0 * n) + s * b[0] / (2.0 * k), a[1] / (2.0 * n) + s * b[1] / (2.0 * k)]
    };
    let du = move |p: f64| {
        let (a, b) = (quarter(rot(n * p)), quarter(rot(k * p)));
        [0.5 * (a[0] + s * b[0]), 0.5 * (a[1] + s * b[1])]
    };
    let d2u = move |p: f64| {
        let (a, b) = (rot(n * p), rot(k * p));
        [-0.5 * (n * a[0] + s * k * b[0]), -0.5 * (n * a[1] + s * k * b[1])]
    };
    Epicycloid {
        params,
        w2: 4.0 * n * n * k * k / (n - k).powi(2),
        q: 4.0 * n * k / (n - k).powi(2),
        curve: PlanarCurve { u: Arc::new(u), du: Arc::new(du), d2u: Arc::new(d2u), period: 2.0 * PI },
    }
}

impl Epicycloid {
    fn half_angle(&self, phi: f64) -> f64 {
        0.5 * (self.params.n - self.params.k) as f64 * phi
    }

    /// `c² = cos²((n-k)φ/2)`.
    pub fn c2(&self, phi: f64) -> f64 {
        self.half_angle(phi).cos().powi(2)
    }

    /// `s² = sin²((n-k)φ/2)`.
    pub fn s2(&self, phi: f64) -> f64 {
        self.half_angle(phi).sin().powi(2)
    }

    /// Closed form of `u'²`: `c²` on the plus branch, `s²` on the minus one.
    pub fn speed2(&self, phi: f64) -> f64 {
        match self.params.sign {
            Sign::Plus => self.c2(phi),
            Sign::Minus => self.s2(phi),
        }
    }

    /// Closed form `w² u² = 1 + q c²` (with `s²` on the minus branch).
    pub fn w2_r2(&self, phi: f64) -> f64 {
        1.0 + self.q * self.speed2(phi)
    }

    /// Closed form `sin²∠(u, u') = c²(1 + q)/(1 + q c²)`.
    pub fn sin2_angle(&self, phi: f64) -> f64 {
        let c2 = self.speed2(phi);
        c2 * (1.0 + self.q) / (1.0 + self.q * c2)
    }

    /// `|γ₀| = |n + k|/|n - k|`.
    pub fn gamma0(&self) -> f64 {
        let (n, k) = (self.params.n as f64, self.params.k as f64);
        ((n + k) / (n - k)).abs()
    }

    /// `γ = 1/γ₀² - 1`.
    pub fn gamma(&self) -> f64 {
        1.0 / self.gamma0().powi(2) - 1.0
    }
}

// ---------------------------------------------------------------------------
// Shape equation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeResidual {
    /// `w² r² (1 + γ sin² φ) - 1`.
    pub residual: f64,
    /// `w r sin φ / √(1 - w² r² cos² φ)`.
    pub gamma0: f64,
}

/// Smallest `|u'|` treated as a regular point.
pub const CUSP_SPEED: f64 = 1e-4;

pub fn shape_residual(curve: &PlanarCurve, w: f64, gamma: f64, phi: f64) -> Result<ShapeResidual> {
    let u = (curve.u)(phi);
    let du = (curve.du)(phi);
    let r2 = dot(u, u);
    if r2.sqrt() < CUSP_SPEED || dot(du, du).sqrt() < CUSP_SPEED {
        return Err(Error::Degenerate);
    }
    let angle = cross(u, du).atan2(dot(u, du));
    let (s, c) = angle.sin_cos();
    let wr2 = w * w * r2;
    Ok(ShapeResidual {
        residual: wr2 * (1.0 + gamma * s * s) - 1.0,
        gamma0: wr2.sqrt() * s / (1.0 - wr2 * c * c).sqrt(),
    })
}

/// `u'² w² (u·Au') + (1 - w² r²)(u'·Au'')`, the mean-curvature condition.
pub fn minimality_residual(curve: &PlanarCurve, w: f64, phi: f64) -> f64 {
    let (u, du, d2u) = ((curve.u)(phi), (curve.du)(phi), (curve.d2u)(phi));
    dot(du, du) * w * w * dot(u, quarter(du)) + (1.0 - w * w * dot(u, u)) * dot(du, quarter(d2u))
}

/// Parameters in `[0, period)` at which `|u'|²` has a local minimum below
/// `threshold`, from `n` samples.
pub fn cusps(curve: &PlanarCurve, n: usize, threshold: f64) -> Vec<f64> {
    let speed = |i: usize| {
        let d = (curve.du)(curve.period * i as f64 / n as f64);
        dot(d, d)
    };
    (0..n)
        .filter(|&i| {
            let (a, b, c) = (speed((i + n - 1) % n), speed(i), speed(i + 1));
            b <= a && b < c && b < threshold
        })
        .map(|i| curve.period * i as f64 / n as f64)
        .collect()
}

// ---------------------------------------------------------------------------
// Rolling circles
// ---------------------------------------------------------------------------

/// Marked point of a circle of radius `a` rolling outside one of radius `b`:
/// `(a+b)(cos aχ, sin aχ) - a(cos (a+b)χ, sin (a+b)χ)`.
pub fn rolling_circle(a: f64, b: f64, chi: f64) -> Result<Vec2> {
    if !(a > 0.0) || !(b >= 0.0) {
        return Err(Error::InvalidArgument(format!("need a > 0 and b >= 0, got a = {a}, b = {b}")));
    }
    let (p, q) = (rot(a * chi), rot((a + b) * chi));
    Ok([(a + b) * p[0] - a * q[0], (a + b) * p[1] - a * q[1]])
}

/// `R(nπ/(n-k)) u₊(φ)`, which equals `u₋(φ + π/(n-k))`.
pub fn rotated_plus(n: i32, k: i32, phi: f64) -> Result<Vec2> {
    let plus = epicycloid(EpicycloidParams::new(n, k, Sign::Plus)?);
    Ok(rotate(n as f64 * PI / (n - k) as f64, (plus.curve.u)(phi)))
}

// ---------------------------------------------------------------------------
// Quadrature of the shape ODE
// ---------------------------------------------------------------------------

/// Angle `θ̃(W) - θ₀` along a shape curve as a function of `W = w² r²`,
/// on `1 ≤ W ≤ γ₀²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeIntegral {
    pub gamma0: f64,
    pub w_range: (f64, f64),
}

pub fn integrate_shape(gamma0: f64, w_range: (f64, f64)) -> Result<ShapeIntegral> {
    let (lo, hi) = w_range;
    if !(gamma0 > 1.0) || !(lo >= 1.0) || !(hi <= gamma0 * gamma0) || !(lo <= hi) {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= w_lo <= w_hi <= γ₀² with γ₀ > 1, got γ₀ = {gamma0}, range {w_range:?}"
        )));
    }
    Ok(ShapeIntegral { gamma0, w_range })
}

impl ShapeIntegral {
    fn check(&self, w: f64) -> Result<()> {
        if w < self.w_range.0 || w > self.w_range.1 {
            return Err(Error::InvalidArgument(format!("W = {w} outside {:?}", self.w_range)));
        }
        Ok(())
    }

    /// `v = √((W - 1)/(γ₀² - W))`.
    pub fn v(&self, w: f64) -> f64 {
        ((w - 1.0) / (self.gamma0 * self.gamma0 - w)).sqrt()
    }

    /// `γ₀ arctan v - arctan(γ₀ v)`.
    pub fn closed_form(&self, w: f64) -> Result<f64> {
        self.check(w)?;
        let g = self.gamma0;
        if w == g * g {
            return Ok((g - 1.0) * PI / 2.0);
        }
        let v = self.v(w);
        Ok(g * v.atan() - (g * v).atan())
    }

    /// `∫₁^W √((s - 1)/(1 - s/γ₀²)) ds/2s`, evaluated in the variable `ψ`
    /// with `s = cos²ψ + γ₀² sin²ψ`, where the integrand is smooth.
    pub fn quadrature(&self, w: f64) -> Result<f64> {
        self.check(w)?;
        let g2 = self.gamma0 * self.gamma0;
        let psi = self.v(w).atan();
        let psi = if w == g2 { PI / 2.0 } else { psi };
        quad(
            |p: f64| {
                let s2 = p.sin().powi(2);
                let s = 1.0 + (g2 - 1.0) * s2;
                self.gamma0 * (g2 - 1.0) * s2 / s
            },
            0.0,
            psi,
            1e-13,
        )
    }
}

/// `tan(θ̃ - θ₀)` from the closed form at `ψ = (a-b)φ/2`, `γ₀ = (a+b)/(a-b)`,
/// and the polar tangent `(b sin aφ - a sin bφ)/(b cos aφ - a cos bφ)` of
/// `R(aφ)e₁/2a - R(bφ)e₁/2b`; the two agree.
pub fn tangent_pair(a: f64, b: f64, phi: f64) -> Result<(f64, f64)> {
    if !(a > b) || !(b > 0.0) {
        return Err(Error::InvalidArgument(format!("need a > b > 0, got a = {a}, b = {b}")));
    }
    let g0 = (a + b) / (a - b);
    let psi = 0.5 * (a - b) * phi;
    if !(psi > 0.0 && psi < PI / 2.0) {
        return Err(Error::InvalidArgument(format!("ψ = {psi} outside (0, π/2)")));
    }
    let integral = integrate_shape(g0, (1.0, g0 * g0))?;
    let w = psi.cos().powi(2) + g0 * g0 * psi.sin().powi(2);
    let lhs = integral.closed_form(w)?.tan();
    let rhs = (b * (a * phi).sin() - a * (b * phi).sin()) / (b * (a * phi).cos() - a * (b * phi).cos());
    Ok((lhs, rhs))
}
