//! Separable minimal hypersurfaces `Σ f_i(x_i) = 0`.
//!
//! A level set `{u = 0}` is minimal iff `(∇u)² Δu - Σ u_i u_j u_ij = 0` on
//! it; for `u = Σ f_i(x_i)` this is `Σ_{i≠j} f_i'' f_j'² = 0`. Residuals are
//! divided by `|∇u|³`, which makes every zero test scale free.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{find_root, quad, rk4_integrate, DenseMatrix, GridFunction};

// ---------------------------------------------------------------------------
// Level-set residual
// ---------------------------------------------------------------------------

/// Scalar field with analytic first and second derivatives.
pub trait ScalarField {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn hessian(&self, x: &[f64]) -> DenseMatrix;
}

/// A [`ScalarField`] assembled from closures.
pub struct AnalyticField<V, G, H> {
    pub dim: usize,
    pub value: V,
    pub gradient: G,
    pub hessian: H,
}

impl<V, G, H> ScalarField for AnalyticField<V, G, H>
where
    V: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
    H: Fn(&[f64]) -> DenseMatrix,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }
    fn hessian(&self, x: &[f64]) -> DenseMatrix {
        (self.hessian)(x)
    }
}

/// `[(∇u)² Δu - Σ u_i u_j u_ij] / (|∇u|³ sign u_k)` at `x`, where `k` is the
/// index of the largest gradient component. The sign factor makes the value
/// invariant under `u → λu` for every `λ ≠ 0`.
pub fn levelset_residual(u: &dyn ScalarField, x: &[f64]) -> Result<f64> {
    let g = u.gradient(x);
    let h = u.hessian(x);
    levelset_residual_from(&g, &h)
}

fn levelset_residual_from(g: &[f64], h: &DenseMatrix) -> Result<f64> {
    let g2: f64 = g.iter().map(|v| v * v).sum();
    let gn = g2.sqrt();
    let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(gn > 0.0) || gn < 1e-300 {
        return Err(Error::SingularPoint);
    }
    let k = g.iter().position(|v| v.abs() == gmax).unwrap();
    let lap = h.trace();
    let quad_form: f64 = (0..g.len()).map(|i| (0..g.len()).map(|j| g[i] * g[j] * h[(i, j)]).sum::<f64>()).sum();
    Ok((g2 * lap - quad_form) / (gn.powi(3) * g[k].signum()))
}

// ---------------------------------------------------------------------------
// Separable specs
// ---------------------------------------------------------------------------

/// `x ↦ (f(x), f'(x), f''(x))`.
pub type Component = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

/// `Σ = {Σ f_i(x_i) = 0}` with sampling boxes per coordinate.
#[derive(Clone)]
pub struct LevelSetSpec {
    pub name: String,
    pub components: Vec<Component>,
    /// Sampling interval per coordinate.
    pub domains: Vec<(f64, f64)>,
    /// Coordinate solved for when sampling points of `Σ`.
    pub solve: usize,
}

impl std::fmt::Debug for LevelSetSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LevelSetSpec")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("domains", &self.domains)
            .field("solve", &self.solve)
            .finish_non_exhaustive()
    }
}

impl LevelSetSpec {
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<[f64; 3]> {
        self.components.iter().zip(x).map(|(c, &xi)| c(xi)).collect()
    }

    pub fn u(&self, x: &[f64]) -> f64 {
        self.eval(x).iter().map(|f| f[0]).sum()
    }

    /// Largest defect `|f_h' - (f(x+h) - f(x-h))/2h|` (and likewise for
    /// `f''`) over the given points.
    pub fn derivative_consistency(&self, x: &[f64], h: f64) -> f64 {
        let mut worst = 0.0f64;
        for (c, &xi) in self.components.iter().zip(x) {
            let (p, m, z) = (c(xi + h), c(xi - h), c(xi));
            let d1 = (p[0] - m[0]) / (2.0 * h);
            let d2 = (p[1] - m[1]) / (2.0 * h);
            let s1 = 1.0 + z[1].abs();
            let s2 = 1.0 + z[2].abs();
            worst = worst.max((d1 - z[1]).abs() / s1).max((d2 - z[2]).abs() / s2);
        }
        worst
    }
}

impl ScalarField for LevelSetSpec {
    fn dim(&self) -> usize {
        self.components.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.u(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x).iter().map(|f| f[1]).collect()
    }
    fn hessian(&self, x: &[f64]) -> DenseMatrix {
        DenseMatrix::diag(&self.eval(x).iter().map(|f| f[2]).collect::<Vec<_>>())
    }
}

/// Tolerance for a point to count as lying on `Σ`.
pub const ON_SURFACE_TOL: f64 = 1e-8;

/// `Σ_{i≠j} f_i'' f_j'² / (Σ f_j'²)^{3/2}` at a point of `Σ`.
pub fn separable_residual(spec: &LevelSetSpec, x: &[f64]) -> Result<f64> {
    let f = spec.eval(x);
    let u: f64 = f.iter().map(|v| v[0]).sum();
    let scale = 1.0 + f.iter().fold(0.0f64, |m, v| m.max(v[0].abs()));
    if u.abs() > ON_SURFACE_TOL * scale {
        return Err(Error::OffSurface(u));
    }
    let s: f64 = f.iter().map(|v| v[1] * v[1]).sum();
    if !(s > 0.0) {
        return Err(Error::SingularPoint);
    }
    let num: f64 = f.iter().map(|v| v[2] * (s - v[1] * v[1])).sum();
    Ok(num / s.powf(1.5))
}

/// Points of `Σ`: every coordinate but `spec.solve` drawn uniformly from
/// its domain, the remaining one solved for by bracketed root finding.
pub fn sample_surface(spec: &LevelSetSpec, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let n = spec.dim();
    let k = spec.solve;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let (lo, hi) = spec.domains[k];
    let solved = spec.components[k].clone();
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::NotFound(format!("could not sample {count} points on {}", spec.name)));
        }
        let mut x: Vec<f64> = spec.domains.iter().map(|&(a, b)| rng.random_range(a..b)).collect();
        let rest: f64 = (0..n).filter(|&i| i != k).map(|i| spec.components[i](x[i])[0]).sum();
        let g = |t: f64| rest + solved(t)[0];
        let (ga, gb) = (g(lo), g(hi));
        if !(ga.is_finite() && gb.is_finite()) || ga.signum() == gb.signum() {
            continue;
        }
        x[k] = find_root(g, lo, hi, 1e-15 * (hi - lo).abs().max(1.0))?;
        // Skip near-singular points where the gradient almost vanishes.
        let grad: f64 = spec.eval(&x).iter().map(|f| f[1] * f[1]).sum();
        if grad.sqrt() < 1e-3 {
            continue;
        }
        out.push(x);
    }
    Ok(out)
}

/// Largest separable residual over `count` sampled surface points.
pub fn max_catalog_residual(spec: &LevelSetSpec, count: usize, seed: u64) -> Result<f64> {
    let pts = sample_surface(spec, count, seed)?;
    let mut worst = 0.0f64;
    for p in &pts {
        worst = worst.max(separable_residual(spec, p)?.abs());
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

fn comp(f: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static) -> Component {
    Arc::new(f)
}

fn square(s: f64) -> Component {
    comp(move |x| [s * x * x, 2.0 * s * x, 2.0 * s])
}

fn log_abs(s: f64) -> Component {
    comp(move |x| [s * x.ln(), s / x, -s / (x * x)])
}

pub const CATALOG: [&str; 7] = ["catenoid", "helicoid", "scherk1", "scherk2", "quadric4", "clifford_cone", "weier4"];

/// Named separable minimal surfaces.
pub fn catalog(name: &str) -> Result<LevelSetSpec> {
    let spec = |components: Vec<Component>, domains: Vec<(f64, f64)>, solve: usize| LevelSetSpec {
        name: name.to_string(),
        components,
        domains,
        solve,
    };
    Ok(match name {
        // x² + y² - cosh² z = 0
        "catenoid" => spec(
            vec![
                square(1.0),
                square(1.0),
                comp(|z| {
                    let (c, s) = (z.cosh(), z.sinh());
                    [-c * c, -2.0 * c * s, -2.0 * (c * c + s * s)]
                }),
            ],
            vec![(0.0, 10.0), (-3.0, 3.0), (-2.0, 2.0)],
            0,
        ),
        // y cos z = x sin z  ⇔  -ln x + ln y - ln tan z = 0
        "helicoid" => spec(
            vec![
                log_abs(-1.0),
                log_abs(1.0),
                comp(|z| {
                    let s2 = (2.0 * z).sin();
                    [-z.tan().ln(), -2.0 / s2, 4.0 * (2.0 * z).cos() / (s2 * s2)]
                }),
            ],
            vec![(0.2, 3.0), (1e-8, 1e4), (0.1, 1.45)],
            1,
        ),
        // e^z cos y = cos x  ⇔  -ln cos x + ln cos y + z = 0
        "scherk1" => spec(
            vec![
                comp(|x| [-x.cos().ln(), x.tan(), 1.0 / x.cos().powi(2)]),
                comp(|y| [y.cos().ln(), -y.tan(), -1.0 / y.cos().powi(2)]),
                comp(|z| [z, 1.0, 0.0]),
            ],
            vec![(-1.45, 1.45), (-1.45, 1.45), (-60.0, 60.0)],
            2,
        ),
        // sin z = sinh x sinh y  ⇔  ln sinh x + ln sinh y - ln sin z = 0
        "scherk2" => {
            let lsh = || comp(|x| [x.sinh().ln(), 1.0 / x.tanh(), -1.0 / x.sinh().powi(2)]);
            spec(
                vec![lsh(), lsh(), comp(|z| [-z.sin().ln(), -1.0 / z.tan(), 1.0 / z.sin().powi(2)])],
                vec![(0.05, 1.5), (0.05, 1.5), (1e-12, PI / 2.0)],
                2,
            )
        }
        // x1 x2 = x3 x4
        "quadric4" => spec(
            vec![log_abs(-1.0), log_abs(-1.0), log_abs(1.0), log_abs(1.0)],
            vec![(0.1, 3.0), (0.1, 3.0), (0.1, 3.0), (1e-9, 1e4)],
            3,
        ),
        // x1² + x2² = x3² + x4²
        "clifford_cone" => spec(
            vec![square(1.0), square(1.0), square(-1.0), square(-1.0)],
            vec![(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0), (0.0, 5.0)],
            3,
        ),
        // ℘(x1) ℘(x2) = ℘(x3) ℘(x4)
        "weier4" => {
            let wp = Arc::new(weierstrass_build(4096)?);
            let omega = wp.half_period;
            let lp = |s: f64, wp: Arc<WeierstrassP>| {
                comp(move |x| {
                    let (p, dp, d2p) = wp.eval_all(x);
                    [s * p.ln(), s * dp / p, s * (d2p / p - (dp / p).powi(2))]
                })
            };
            spec(
                vec![lp(1.0, wp.clone()), lp(1.0, wp.clone()), lp(-1.0, wp.clone()), lp(-1.0, wp)],
                vec![(0.25, 2.0 * omega - 0.25), (0.25, 2.0 * omega - 0.25), (0.25, 2.0 * omega - 0.25), (1e-6, omega)],
                3,
            )
        }
        other => return Err(Error::UnknownSurface(other.to_string())),
    })
}

// ---------------------------------------------------------------------------
// Exponential family in four variables
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFamilyReport {
    /// `α_L α_K = β_L' β_K'` for every split of {1,2,3,4} into two pairs.
    pub pairing_holds: bool,
    pub pairing_defect: f64,
    /// Largest `|Σ_{i≠j} J_i'(v_i) J_j(v_j)| / 2(Σ J)^{3/2}` over samples.
    pub max_residual: f64,
}

/// Checks `J_i(v) = α_i e^{κv} + β_i e^{-κv}` (with `J_i = f_i'²` as a
/// function of `v_i = f_i`) against the separable equation on `Σ v_i = 0`.
pub fn verify_exponential_family(alphas: [f64; 4], betas: [f64; 4], kappa: f64) -> Result<ExpFamilyReport> {
    let mut defect = 0.0f64;
    for (l, k) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
        let rest: Vec<usize> = (0..4).filter(|&i| i != l && i != k).collect();
        defect = defect.max((alphas[l] * alphas[k] - betas[rest[0]] * betas[rest[1]]).abs());
    }
    let scale = alphas.iter().chain(&betas).fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let j = |i: usize, v: f64| alphas[i] * (kappa * v).exp() + betas[i] * (-kappa * v).exp();
    let dj = |i: usize, v: f64| kappa * (alphas[i] * (kappa * v).exp() - betas[i] * (-kappa * v).exp());

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let range = 1.5 / kappa.abs().max(1e-3);
    let mut accepted = 0;
    let mut worst = 0.0f64;
    let mut last_negative = (0, 0.0);
    for _ in 0..200_000 {
        if accepted == 200 {
            break;
        }
        let mut v = [0.0; 4];
        for i in 0..3 {
            v[i] = rng.random_range(-range..range);
        }
        v[3] = -(v[0] + v[1] + v[2]);
        if let Some(i) = (0..4).find(|&i| j(i, v[i]) < 0.0) {
            last_negative = (i, j(i, v[i]));
            continue;
        }
        let total: f64 = (0..4).map(|i| j(i, v[i])).sum();
        if total < 1e-6 {
            continue;
        }
        accepted += 1;
        let mut r = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    r += 0.5 * dj(a, v[a]) * j(b, v[b]);
                }
            }
        }
        worst = worst.max(r.abs() / total.powf(1.5));
    }
    if accepted == 0 {
        return Err(Error::NotARealSurface { index: last_negative.0, value: last_negative.1 });
    }
    Ok(ExpFamilyReport { pairing_holds: defect <= 1e-12 * scale * scale, pairing_defect: defect, max_residual: worst })
}

// ---------------------------------------------------------------------------
// Weierstrass ℘ with ℘'² = 4℘(℘² - 1)
// ---------------------------------------------------------------------------

/// Real Weierstrass function on its real period `[0, 2ω]`, minimum 1 at `ω`.
///
/// Tabulated through `u = ℘^{-1/2}`, which solves `u'' = -2u³`,
/// `u'² = 1 - u⁴`, is regular at the pole and vanishes there.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassP {
    pub half_period: f64,
    /// `u` on `[0, 2ω]`.
    pub lookup: GridFunction,
    /// `u'` on the same grid.
    pub slope: GridFunction,
}

/// `ω = ∫₀¹ du/√(1-u⁴)`, with `u = 1 - t²` removing the endpoint singularity.
pub fn weierstrass_half_period() -> Result<f64> {
    quad(|t| 2.0 / ((2.0 - t * t) * (1.0 + (1.0 - t * t).powi(2))).sqrt(), 0.0, 1.0, 1e-15)
}

pub fn weierstrass_build(resolution: usize) -> Result<WeierstrassP> {
    if resolution < 1024 {
        return Err(Error::InvalidArgument(format!("resolution {resolution} < 1024")));
    }
    let omega = weierstrass_half_period()?;
    let half = resolution / 2;
    let field = |_: f64, y: &[f64]| vec![y[1], -2.0 * y[0].powi(3)];
    let fwd = rk4_integrate(field, &[1.0, 0.0], omega, 2.0 * omega, half)?;
    let bwd = rk4_integrate(field, &[1.0, 0.0], omega, 0.0, half)?;
    let mut u = Vec::with_capacity(2 * half + 1);
    let mut du = Vec::with_capacity(2 * half + 1);
    for s in bwd.iter().rev() {
        u.push(s[0]);
        du.push(s[1]);
    }
    for s in fwd.iter().skip(1) {
        u.push(s[0]);
        du.push(s[1]);
    }
    let dx = omega / half as f64;
    Ok(WeierstrassP {
        half_period: omega,
        lookup: GridFunction::new(u, 0.0, dx, false)?,
        slope: GridFunction::new(du, 0.0, dx, false)?,
    })
}

impl WeierstrassP {
    /// `(u, u', u'')` at `x`, by quintic Hermite interpolation.
    pub fn u_all(&self, x: f64) -> (f64, f64, f64) {
        let period = 2.0 * self.half_period;
        let mut t = x.rem_euclid(period);
        let mut sign = 1.0;
        // u is even about ω and 2ω-periodic; fold into [0, ω].
        if t > self.half_period {
            t = period - t;
            sign = -1.0;
        }
        let h = self.lookup.dx;
        let n = self.lookup.len();
        let i = ((t / h).floor() as usize).min(n - 2);
        let s = (t - i as f64 * h) / h;
        let (u0, u1) = (self.lookup.samples[i], self.lookup.samples[i + 1]);
        let (d0, d1) = (self.slope.samples[i] * h, self.slope.samples[i + 1] * h);
        let (a0, a1) = (-2.0 * u0.powi(3) * h * h, -2.0 * u1.powi(3) * h * h);
        let (val, der) = quintic_hermite(s, u0, d0, a0, u1, d1, a1);
        let u = val;
        let du = der / h;
        (u, sign * du, -2.0 * u.powi(3))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (u, _, _) = self.u_all(x);
        1.0 / (u * u)
    }

    /// `(℘, ℘', ℘'')` at `x`; `℘'' = 6℘² - 2`.
    pub fn eval_all(&self, x: f64) -> (f64, f64, f64) {
        let (u, du, _) = self.u_all(x);
        let p = 1.0 / (u * u);
        (p, -2.0 * du / (u * u * u), 6.0 * p * p - 2.0)
    }

    /// `max |℘'² - 4℘(℘² - 1)| / (4℘³)` over `n` interior points.
    pub fn ode_residual(&self, n: usize) -> f64 {
        let w = self.half_period;
        (1..n)
            .map(|k| {
                let x = 0.05 + (2.0 * w - 0.1) * k as f64 / n as f64;
                let (p, dp, _) = self.eval_all(x);
                (dp * dp - 4.0 * p * (p * p - 1.0)).abs() / (4.0 * p.powi(3))
            })
            .fold(0.0, f64::max)
    }
}

/// Quintic Hermite interpolant on `[0, 1]` from value, first and second
/// derivative at both ends (derivatives already scaled to the unit interval).
fn quintic_hermite(s: f64, p0: f64, d0: f64, a0: f64, p1: f64, d1: f64, a1: f64) -> (f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    let h3 = 0.5 * s3 - s4 + 0.5 * s5;
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let dh0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
    let dh1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
    let dh2 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
    let dh3 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
    let dh4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
    let dh5 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
    (
        h0 * p0 + h1 * d0 + h2 * a0 + h3 * a1 + h4 * d1 + h5 * p1,
        dh0 * p0 + dh1 * d0 + dh2 * a0 + dh3 * a1 + dh4 * d1 + dh5 * p1,
    )
}

// ---------------------------------------------------------------------------
// Rotational reduction
// ---------------------------------------------------------------------------

/// Profile `r(z)` of a rotational separable hypersurface.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationalProfile {
    pub n: u32,
    pub c: f64,
    pub b: f64,
    /// `r` on `[-L, L]`, symmetric about the neck at `z = 0`.
    pub r: GridFunction,
    pub slope: GridFunction,
}

/// `r'² = F(r) = -1 - C(-1)^N (br/2)^{2(N-2)}`.
pub fn profile_rhs(n: u32, c: f64, b: f64, r: f64) -> f64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    -1.0 - c * sign * (b * r / 2.0).powi(2 * (n as i32 - 2))
}

fn profile_rhs_dr(n: u32, c: f64, b: f64, r: f64) -> f64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let m = 2 * (n as i32 - 2);
    -c * sign * m as f64 * (b / 2.0).powi(m) * r.powi(m - 1)
}

/// Integrates `r'' = F'(r)/2` from the neck `r(0) = r*`, `r'(0) = 0`, where
/// `F(r*) = 0`, over `z ∈ [-half_width, half_width]`.
pub fn rotational_profile(n: u32, c: f64, b: f64, half_width: f64, samples: usize) -> Result<RotationalProfile> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("N = {n} < 3")));
    }
    if !(b > 0.0) || !(half_width > 0.0) || samples < 2 {
        return Err(Error::InvalidArgument("need b > 0, half_width > 0, samples >= 2".into()));
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let k = -c * sign;
    if !(k > 0.0) {
        return Err(Error::NoRealProfile);
    }
    let neck = 2.0 / b * k.powf(-1.0 / (2.0 * (n as f64 - 2.0)));
    let steps = samples / 2 + 1;
    let field = |_: f64, y: &[f64]| vec![y[1], 0.5 * profile_rhs_dr(n, c, b, y[0])];
    let right = rk4_integrate(field, &[neck, 0.0], 0.0, half_width, 4 * steps)?;
    let left = rk4_integrate(field, &[neck, 0.0], 0.0, -half_width, 4 * steps)?;
    let mut r = Vec::with_capacity(8 * steps + 1);
    let mut dr = Vec::with_capacity(8 * steps + 1);
    for s in left.iter().rev() {
        r.push(s[0]);
        dr.push(s[1]);
    }
    for s in right.iter().skip(1) {
        r.push(s[0]);
        dr.push(s[1]);
    }
    let dz = half_width / (4 * steps) as f64;
    Ok(RotationalProfile {
        n,
        c,
        b,
        r: GridFunction::new(r, -half_width, dz, false)?,
        slope: GridFunction::new(dr, -half_width, dz, false)?,
    })
}

impl RotationalProfile {
    /// `max |r'² - F(r)| / (1 + r'²)` over the grid.
    pub fn first_integral_residual(&self) -> f64 {
        self.r
            .samples
            .iter()
            .zip(&self.slope.samples)
            .map(|(&r, &dr)| (dr * dr - profile_rhs(self.n, self.c, self.b, r)).abs() / (1.0 + dr * dr))
            .fold(0.0, f64::max)
    }

    /// `max |g'² - 4g(-C(-b²g/4)^{N-2} - 1)| / (1 + g'²)` with `g = r²`.
    pub fn g_equation_residual(&self) -> f64 {
        let (n, c, b) = (self.n, self.c, self.b);
        self.r
            .samples
            .iter()
            .zip(&self.slope.samples)
            .map(|(&r, &dr)| {
                let g = r * r;
                let dg = 2.0 * r * dr;
                let rhs = 4.0 * g * (-c * (-b * b * g / 4.0).powi(n as i32 - 2) - 1.0);
                (dg * dg - rhs).abs() / (1.0 + dg * dg)
            })
            .fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// Linear (quadratic-cone) solutions
// ---------------------------------------------------------------------------

/// `r` copies of `N - r - 1` and `N - r` copies of `-(r - 1)`; the negated
/// multiset gives the same cone. `r = N/2` is admitted (the Clifford cone
/// for `N = 4`).
pub fn linear_cone_coefficients(n: usize, r: usize) -> Result<Vec<f64>> {
    if n < 3 || r < 1 || 2 * r > n {
        return Err(Error::InvalidArgument(format!("need N >= 3 and 1 <= r <= N/2, got N = {n}, r = {r}")));
    }
    let mut out = vec![(n - r - 1) as f64; r];
    out.extend(std::iter::repeat_n(-((r - 1) as f64), n - r));
    Ok(out)
}

/// Largest level-set residual of `Σ b_i x_i² = 0` over random cone points.
pub fn linear_cone_residual(n: usize, r: usize, count: usize, seed: u64) -> Result<f64> {
    let b = linear_cone_coefficients(n, r)?;
    if r < 2 {
        // The cone degenerates to the doubled hyperplane x₁ = 0.
        return Err(Error::SingularPoint);
    }
    let bb = b.clone();
    let field = AnalyticField {
        dim: n,
        value: move |x: &[f64]| x.iter().zip(&bb).map(|(xi, bi)| bi * xi * xi).sum(),
        gradient: {
            let b = b.clone();
            move |x: &[f64]| x.iter().zip(&b).map(|(xi, bi)| 2.0 * bi * xi).collect()
        },
        hessian: {
            let b = b.clone();
            move |_: &[f64]| DenseMatrix::diag(&b.iter().map(|v| 2.0 * v).collect::<Vec<_>>())
        },
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let tail: Vec<f64> = (0..n - r).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut head: Vec<f64> = (0..r).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t2: f64 = tail.iter().map(|v| v * v).sum();
        let h2: f64 = head.iter().map(|v| v * v).sum();
        // (N-r-1)|head|² = (r-1)|tail|².
        let s = ((r - 1) as f64 * t2 / ((n - r - 1) as f64 * h2)).sqrt();
        head.iter_mut().for_each(|v| *v *= s);
        head.extend(tail);
        worst = worst.max(levelset_residual(&field, &head)?.abs());
    }
    Ok(worst)
}
