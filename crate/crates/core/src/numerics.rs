//! Shared numerical kernel: bracketed root finding, fixed-step RK4,
//! adaptive Simpson quadrature, a shooting Sturm–Liouville solver,
//! central finite differences and small dense matrices.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Grid functions
// ---------------------------------------------------------------------------

/// Uniformly sampled real function.
///
/// For a periodic grid the domain is `[x0, x0 + len·dx)` and sample `i`
/// sits at `x0 + i·dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub samples: Vec<f64>,
    pub x0: f64,
    pub dx: f64,
    pub periodic: bool,
}

impl GridFunction {
    pub fn new(samples: Vec<f64>, x0: f64, dx: f64, periodic: bool) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidArgument("grid function needs at least 2 samples".into()));
        }
        if !(dx > 0.0) {
            return Err(Error::InvalidArgument(format!("grid spacing must be positive, got {dx}")));
        }
        Ok(Self { samples, x0, dx, periodic })
    }

    /// Samples `f` at `n` points spanning `[a, b]` inclusive.
    pub fn from_fn(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        assert!(n >= 2 && b > a);
        let dx = (b - a) / (n - 1) as f64;
        let samples = (0..n).map(|i| f(a + i as f64 * dx)).collect();
        Self { samples, x0: a, dx, periodic: false }
    }

    /// Samples `f` on `n` points of the periodic grid `[x0, x0 + period)`.
    pub fn periodic_from_fn(x0: f64, period: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        assert!(n >= 2 && period > 0.0);
        let dx = period / n as f64;
        let samples = (0..n).map(|i| f(x0 + i as f64 * dx)).collect();
        Self { samples, x0, dx, periodic: true }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    /// Right end of the domain (last sample, or the wrap point when periodic).
    pub fn x_end(&self) -> f64 {
        if self.periodic {
            self.x0 + self.len() as f64 * self.dx
        } else {
            self.x(self.len() - 1)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Cubic (Catmull–Rom) interpolation; clamped outside a non-periodic domain.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.len();
        let s = (x - self.x0) / self.dx;
        let fetch = |k: isize| -> f64 {
            if self.periodic {
                self.samples[k.rem_euclid(n as isize) as usize]
            } else {
                self.samples[k.clamp(0, n as isize - 1) as usize]
            }
        };
        let (i, t) = if self.periodic {
            let i = s.floor();
            (i as isize, s - i)
        } else {
            let sc = s.clamp(0.0, (n - 1) as f64);
            let i = sc.floor().min((n - 2) as f64);
            (i as isize, sc - i)
        };
        let (p0, p1, p2, p3) = (fetch(i - 1), fetch(i), fetch(i + 1), fetch(i + 2));
        // At the ends of an open grid fall back to linear interpolation.
        if !self.periodic && (i == 0 || i as usize + 2 >= n) {
            return p1 + t * (p2 - p1);
        }
        let t2 = t * t;
        let t3 = t2 * t;
        0.5 * (2.0 * p1
            + (p2 - p0) * t
            + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2
            + (3.0 * p1 - p0 - 3.0 * p2 + p3) * t3)
    }

    /// Trapezoid integral; for periodic grids this is spectrally accurate.
    pub fn integrate(&self) -> f64 {
        let s: f64 = self.samples.iter().sum();
        if self.periodic {
            s * self.dx
        } else {
            (s - 0.5 * (self.samples[0] + self.samples[self.len() - 1])) * self.dx
        }
    }
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

const NEWTON_ITERS: usize = 12;

/// Root of `f` in the bracket `[a, b]`.
///
/// A short safeguarded Newton run (finite-difference slope) is tried first;
/// every iterate that leaves the current bracket is replaced by a bisection
/// step, so the method always converges. The result satisfies
/// `sign f(r - tol) != sign f(r + tol)` for monotone `f`.
pub fn find_root(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(Error::NoBracket { a: lo, b: hi, fa: flo, fb: fhi });
    }

    let mut x = 0.5 * (lo + hi);
    let mut newton_left = NEWTON_ITERS;
    // Each pass either takes an accepted Newton step or halves the bracket.
    for _ in 0..400 {
        if hi - lo <= tol {
            break;
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let mut next = 0.5 * (lo + hi);
        if newton_left > 0 {
            newton_left -= 1;
            let h = (1e-7 * x.abs().max(1.0)).min(0.25 * (hi - lo));
            if h > 0.0 {
                let slope = (f(x + h) - f(x - h)) / (2.0 * h);
                let cand = x - fx / slope;
                if slope.is_finite() && slope != 0.0 && cand > lo && cand < hi {
                    if (cand - x).abs() < 0.25 * tol {
                        let (l, r) = (f(cand - 0.5 * tol), f(cand + 0.5 * tol));
                        if l.signum() != r.signum() {
                            return Ok(cand);
                        }
                    }
                    next = cand;
                }
            }
        }
        x = next;
    }
    // Polish: the last Newton step can land within tol of the root without
    // shrinking the bracket; pick the bracket end or the iterate accordingly.
    let mid = 0.5 * (lo + hi);
    if (x - mid).abs() <= 0.5 * tol && x > lo && x < hi {
        return Ok(x);
    }
    Ok(mid)
}

// ---------------------------------------------------------------------------
// ODE integration
// ---------------------------------------------------------------------------

/// One classical Runge–Kutta step.
pub fn rk4_step(field: &mut impl FnMut(f64, &[f64]) -> Vec<f64>, t: f64, y: &[f64], h: f64) -> Vec<f64> {
    let k1 = field(t, y);
    let tmp: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * h * k).collect();
    let k2 = field(t + 0.5 * h, &tmp);
    let tmp: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * h * k).collect();
    let k3 = field(t + 0.5 * h, &tmp);
    let tmp: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
    let k4 = field(t + h, &tmp);
    (0..y.len()).map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
}

/// Fixed-step RK4 from `t0` to `t1`; returns all `steps + 1` states.
pub fn rk4_integrate(
    mut field: impl FnMut(f64, &[f64]) -> Vec<f64>,
    y0: &[f64],
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<Vec<Vec<f64>>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let h = (t1 - t0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(y0.to_vec());
    for s in 0..steps {
        let t = t0 + s as f64 * h;
        let next = rk4_step(&mut field, t, &out[s], h);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Blowup { t });
        }
        out.push(next);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

const QUAD_MAX_DEPTH: u32 = 48;
const QUAD_MAX_EVALS: usize = 20_000_000;

/// Adaptive Simpson quadrature with Richardson correction.
pub fn quad(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut evals = 0usize;
    let mut call = |x: f64, evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Accuracy(format!("integrand not finite at x = {x}")))
        }
    };
    // Seed with a few panels so that narrow features are not missed.
    const PANELS: usize = 8;
    let w = (hi - lo) / PANELS as f64;
    let mut seeds = Vec::with_capacity(PANELS);
    for p in 0..PANELS {
        let x0 = lo + p as f64 * w;
        let x2 = x0 + w;
        let x1 = 0.5 * (x0 + x2);
        let (f0, f1, f2) = (call(x0, &mut evals)?, call(x1, &mut evals)?, call(x2, &mut evals)?);
        seeds.push((x0, x2, f0, f1, f2, w / 6.0 * (f0 + 4.0 * f1 + f2)));
    }
    // Local tolerances never drop below the rounding level of the integral.
    let scale: f64 = seeds.iter().map(|s| s.5.abs()).sum();
    let floor = 64.0 * f64::EPSILON * scale;
    let mut total = 0.0;
    for (x0, x2, f0, f1, f2, whole) in seeds {
        total += simpson_rec(&mut call, &mut evals, x0, x2, f0, f1, f2, whole, tol / PANELS as f64, floor, 0)?;
    }
    Ok(sign * total)
}

fn simpson_rec(
    call: &mut impl FnMut(f64, &mut usize) -> Result<f64>,
    evals: &mut usize,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    floor: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = call(lm, evals)?;
    let frm = call(rm, evals)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol.max(floor) {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= QUAD_MAX_DEPTH || *evals > QUAD_MAX_EVALS {
        return Err(Error::Accuracy(format!(
            "subdivision limit reached near x = {m} (local error {:.3e})",
            delta.abs() / 15.0
        )));
    }
    Ok(simpson_rec(call, evals, a, m, fa, flm, fm, left, 0.5 * tol, floor, depth + 1)?
        + simpson_rec(call, evals, m, b, fm, frm, fb, right, 0.5 * tol, floor, depth + 1)?)
}

// ---------------------------------------------------------------------------
// Sturm–Liouville shooting
// ---------------------------------------------------------------------------

/// Potential handle shared between threads.
pub type Potential = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Dirichlet,
    /// Decay at ±∞, imposed as Dirichlet at the truncation radius.
    Decay {
        radius: f64,
    },
}

/// `-ψ'' + V ψ = E ψ` on `[a, b]`.
#[derive(Clone)]
pub struct SLProblem {
    pub potential: Potential,
    pub a: f64,
    pub b: f64,
    pub boundary: Boundary,
    /// Number of grid intervals used by the shooting integrator.
    pub points: usize,
}

impl fmt::Debug for SLProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SLProblem")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("boundary", &self.boundary)
            .field("points", &self.points)
            .finish_non_exhaustive()
    }
}

impl SLProblem {
    pub fn dirichlet(potential: impl Fn(f64) -> f64 + Send + Sync + 'static, a: f64, b: f64) -> Self {
        Self { potential: Arc::new(potential), a, b, boundary: Boundary::Dirichlet, points: 2048 }
    }

    pub fn decay(potential: impl Fn(f64) -> f64 + Send + Sync + 'static, radius: f64) -> Self {
        Self {
            potential: Arc::new(potential),
            a: -radius,
            b: radius,
            boundary: Boundary::Decay { radius },
            points: 2048,
        }
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub eigenvalue: f64,
    pub eigenfunction: GridFunction,
    /// Number of interior nodes of the eigenfunction.
    pub index: usize,
}

/// Grid with the potential sampled at whole and half steps.
struct Shooter {
    a: f64,
    h: f64,
    n: usize,
    /// `v[j]` is V at `a + j·h/2`.
    v: Vec<f64>,
}

impl Shooter {
    fn new(p: &SLProblem) -> Result<Self> {
        if !(p.a < p.b) {
            return Err(Error::InvalidArgument(format!("need a < b, got [{}, {}]", p.a, p.b)));
        }
        let n = (p.points.max(16) + 1) & !1;
        let h = (p.b - p.a) / n as f64;
        let v: Vec<f64> = (0..=2 * n).map(|j| (p.potential)(p.a + 0.5 * j as f64 * h)).collect();
        if let Some(j) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("potential not finite at x = {}", p.a + 0.5 * j as f64 * h)));
        }
        Ok(Self { a: p.a, h, n, v })
    }

    fn vmin(&self) -> f64 {
        self.v.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    fn vmax(&self) -> f64 {
        self.v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// RK4 step of (ψ, ψ') with signed step `dir·h` from grid index `i`.
    #[inline]
    fn step(&self, e: f64, i: usize, dir: isize, psi: f64, dpsi: f64) -> (f64, f64) {
        let h = dir as f64 * self.h;
        let j0 = 2 * i;
        let jm = (j0 as isize + dir) as usize;
        let j1 = (j0 as isize + 2 * dir) as usize;
        let (q0, qm, q1) = (self.v[j0] - e, self.v[jm] - e, self.v[j1] - e);
        let k1 = (dpsi, q0 * psi);
        let k2 = (dpsi + 0.5 * h * k1.1, qm * (psi + 0.5 * h * k1.0));
        let k3 = (dpsi + 0.5 * h * k2.1, qm * (psi + 0.5 * h * k2.0));
        let k4 = (dpsi + h * k3.1, q1 * (psi + h * k3.0));
        (
            psi + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            dpsi + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        )
    }

    /// Sign changes of the left shot over the open interval.
    fn count(&self, e: f64) -> usize {
        let (mut psi, mut dpsi) = (0.0, 1.0);
        let mut last = 0.0f64;
        let mut changes = 0;
        for i in 0..self.n - 1 {
            (psi, dpsi) = self.step(e, i, 1, psi, dpsi);
            if psi != 0.0 {
                if last != 0.0 && psi.signum() != last.signum() {
                    changes += 1;
                }
                last = psi;
            }
            let s = psi.abs().max(dpsi.abs());
            if s > 1e100 {
                psi /= s;
                dpsi /= s;
                last = psi;
            }
        }
        changes
    }

    fn left(&self, e: f64) -> Vec<(f64, f64)> {
        let m = self.n / 2;
        let mut out = Vec::with_capacity(m + 1);
        let mut st = (0.0, 1.0);
        out.push(st);
        for i in 0..m {
            st = self.step(e, i, 1, st.0, st.1);
            out.push(st);
        }
        out
    }

    /// Right shot; entry `k` holds the state at grid index `n - k`.
    fn right(&self, e: f64) -> Vec<(f64, f64)> {
        let m = self.n / 2;
        let mut out = Vec::with_capacity(self.n - m + 1);
        let mut st = (0.0, -1.0);
        out.push(st);
        for i in (m + 1..=self.n).rev() {
            st = self.step(e, i, -1, st.0, st.1);
            out.push(st);
        }
        out
    }

    /// Normalized Wronskian of the two shots at the midpoint.
    fn mismatch(&self, e: f64) -> f64 {
        let l = *self.left(e).last().unwrap();
        let r = *self.right(e).last().unwrap();
        let nl = l.0.hypot(l.1);
        let nr = r.0.hypot(r.1);
        (l.0 * r.1 - l.1 * r.0) / (nl * nr)
    }
}

/// Eigenpair number `index` (counting from 0) by shooting.
///
/// Node counting brackets the eigenvalue; the midpoint Wronskian of the left
/// and right shots (equivalently the log-derivative mismatch) is then solved
/// to `tol`.
pub fn sl_eigen(problem: &SLProblem, index: usize, tol: f64) -> Result<EigenResult> {
    let sh = Shooter::new(problem)?;
    let scale = (sh.vmax() - sh.vmin()).abs().max(1.0);

    let mut lo = sh.vmin() - 1.0;
    if sh.count(lo) > index {
        return Err(Error::NotFound(format!("count at E = {lo} already exceeds index {index}")));
    }
    let len = problem.b - problem.a;
    let mut hi = sh.vmax() + ((index + 1) as f64 * std::f64::consts::PI / len).powi(2) + 1.0;
    let mut grow = 0;
    while sh.count(hi) <= index {
        hi = hi + (hi - lo);
        grow += 1;
        if grow > 60 {
            return Err(Error::NotFound(format!("no upper bracket for index {index}")));
        }
    }
    // Shrink the count bracket: count(lo) <= index < count(hi).
    let width = 1e-4 * scale;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if sh.count(mid) <= index {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Counting on the grid can be off by O(h⁴); widen until the Wronskian
    // changes sign, keeping the count condition on the outer ends.
    let mut delta = hi - lo;
    let (mut a, mut b) = (lo, hi);
    let mut tries = 0;
    while sh.mismatch(a).signum() == sh.mismatch(b).signum() {
        delta *= 2.0;
        a = (lo - delta).max(sh.vmin() - 1.0);
        b = hi + delta;
        tries += 1;
        if tries > 40 || sh.count(a) < index || sh.count(b) > index + 1 {
            return Err(Error::NotFound(format!("matching function has no sign change near E = {}", 0.5 * (lo + hi))));
        }
    }
    let e = find_root(|x| sh.mismatch(x), a, b, tol.max(1e-15 * scale))?;

    // Join the two shots into one eigenfunction.
    let l = sh.left(e);
    let r = sh.right(e);
    let m = sh.n / 2;
    let (lm, rm) = (l[m], r[sh.n - m]);
    let lnorm = l.iter().fold(0.0f64, |s, p| s.max(p.0.abs()));
    let factor = if lm.0.abs() > 1e-6 * lnorm { lm.0 / rm.0 } else { lm.1 / rm.1 };
    let mut samples = vec![0.0; sh.n + 1];
    for i in 0..=m {
        samples[i] = l[i].0;
    }
    for k in 0..(sh.n - m) {
        samples[sh.n - k] = factor * r[k].0;
    }
    let peak = samples.iter().cloned().fold(0.0f64, |p, v| if v.abs() > p.abs() { v } else { p });
    for v in samples.iter_mut() {
        *v /= peak;
    }
    samples[0] = 0.0;
    samples[sh.n] = 0.0;
    let nodes = count_nodes(&samples[1..sh.n], 1e-9);
    let eigenfunction = GridFunction::new(samples, sh.a, sh.h, false)?;
    Ok(EigenResult { eigenvalue: e, eigenfunction, index: nodes })
}

/// Sign changes in a sequence, ignoring entries below `floor` in magnitude.
pub fn count_nodes(samples: &[f64], floor: f64) -> usize {
    let mut last = 0.0f64;
    let mut n = 0;
    for &v in samples {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            n += 1;
        }
        last = v;
    }
    n
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

/// Direction of a central difference in a multivariate function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    First(usize),
    Second(usize, usize),
}

/// Central finite difference of `f` at `x`; `O(h²)` accurate.
pub fn fd_deriv(f: impl Fn(&[f64]) -> f64, x: &[f64], dir: Direction, h: f64) -> f64 {
    let shifted = |moves: &[(usize, f64)]| -> f64 {
        let mut p = x.to_vec();
        for &(i, d) in moves {
            p[i] += d;
        }
        f(&p)
    };
    match dir {
        Direction::First(i) => (shifted(&[(i, h)]) - shifted(&[(i, -h)])) / (2.0 * h),
        Direction::Second(i, j) if i == j => (shifted(&[(i, h)]) - 2.0 * f(x) + shifted(&[(i, -h)])) / (h * h),
        Direction::Second(i, j) => {
            (shifted(&[(i, h), (j, h)]) - shifted(&[(i, h), (j, -h)]) - shifted(&[(i, -h), (j, h)])
                + shifted(&[(i, -h), (j, -h)]))
                / (4.0 * h * h)
        }
    }
}

/// Central first derivative of a scalar function.
pub fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central second derivative of a scalar function.
pub fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Richardson extrapolation of two estimates at step `h` and `h/2`.
pub fn richardson(coarse: f64, fine: f64, order: i32) -> f64 {
    let q = 2f64.powi(order);
    (q * fine - coarse) / (q - 1.0)
}

// ---------------------------------------------------------------------------
// Dense matrices
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self { rows: r, cols: c, entries: rows.concat() }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|v| v * s).collect() }
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.cols + j]
    }
}

pub fn mat_mul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    assert_eq!(a.cols, b.rows, "inner dimensions differ");
    let mut c = DenseMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik == 0.0 {
                continue;
            }
            for j in 0..b.cols {
                c[(i, j)] += aik * b[(k, j)];
            }
        }
    }
    c
}

/// LU factorization with partial pivoting: (packed LU, permutation, parity).
fn lu(m: &DenseMatrix) -> Result<(DenseMatrix, Vec<usize>, f64)> {
    if m.rows != m.cols {
        return Err(Error::InvalidArgument("matrix is not square".into()));
    }
    let n = m.rows;
    let thresh = 1e-12 * m.max_abs();
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut parity = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| a[(x, k)].abs().total_cmp(&a[(y, k)].abs())).unwrap();
        if !(a[(p, k)].abs() > thresh) {
            return Err(Error::Singular);
        }
        if p != k {
            for j in 0..n {
                a.entries.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
            parity = -parity;
        }
        for i in k + 1..n {
            let f = a[(i, k)] / a[(k, k)];
            a[(i, k)] = f;
            for j in k + 1..n {
                a[(i, j)] -= f * a[(k, j)];
            }
        }
    }
    Ok((a, perm, parity))
}

/// Inverse by Gaussian elimination with partial pivoting.
pub fn mat_inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    let (lu, perm, _) = lu(m)?;
    let n = m.rows;
    let mut inv = DenseMatrix::zeros(n, n);
    for col in 0..n {
        let mut x: Vec<f64> = (0..n).map(|i| if perm[i] == col { 1.0 } else { 0.0 }).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= lu[(i, k)] * x[k];
            }
            x[i] /= lu[(i, i)];
        }
        for i in 0..n {
            inv[(i, col)] = x[i];
        }
    }
    Ok(inv)
}

/// Determinant; zero for numerically singular input.
pub fn mat_det(m: &DenseMatrix) -> f64 {
    match lu(m) {
        Ok((lu, _, parity)) => (0..m.rows).fold(parity, |d, i| d * lu[(i, i)]),
        Err(_) => 0.0,
    }
}

/// Solves `m x = rhs`.
pub fn mat_solve(m: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let inv = mat_inverse(m)?;
    Ok(inv.mat_vec(rhs))
}

// ---------------------------------------------------------------------------
// Periodic spectral differentiation
// ---------------------------------------------------------------------------

/// Dense spectral differentiation matrix on `n` equispaced points of a
/// period `period` (`n` even).
pub fn spectral_d1(n: usize, period: f64) -> DenseMatrix {
    assert!(n >= 2 && n.is_multiple_of(2), "spectral grid needs an even point count");
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let scale = 2.0 * std::f64::consts::PI / period;
    DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            let k = i as f64 - j as f64;
            let sgn = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            scale * 0.5 * sgn / (0.5 * k * h).tan()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_path_lands_in_bracket() {
        let r = find_root(|x| x * x * x - 2.0, 0.0, 3.0, 1e-14).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn root_rejects_same_sign() {
        assert!(matches!(find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-10), Err(Error::NoBracket { .. })));
    }

    #[test]
    fn blowup_reports_last_time() {
        let err = rk4_integrate(|_, y| vec![y[0] * y[0]], &[1.0], 0.0, 2.0, 200).unwrap_err();
        match err {
            Error::Blowup { t } => assert!(t > 0.9 && t < 2.0),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn interpolation_is_cubic_accurate() {
        let g = GridFunction::from_fn(0.0, 1.0, 101, |x| x.sin());
        for &x in &[0.123, 0.5, 0.777] {
            assert!((g.eval(x) - x.sin()).abs() < 1e-6);
        }
        let p = GridFunction::periodic_from_fn(0.0, 1.0, 64, |x| (2.0 * std::f64::consts::PI * x).cos());
        assert!((p.eval(1.3) - (2.0 * std::f64::consts::PI * 0.3).cos()).abs() < 1e-4);
    }

    #[test]
    fn spectral_derivative_of_trig() {
        let n = 32;
        let d = spectral_d1(n, 2.0 * std::f64::consts::PI);
        let xs: Vec<f64> = (0..n).map(|i| i as f64 * 2.0 * std::f64::consts::PI / n as f64).collect();
        let f: Vec<f64> = xs.iter().map(|x| (3.0 * x).sin()).collect();
        let df = d.mat_vec(&f);
        for (x, v) in xs.iter().zip(df) {
            assert!((v - 3.0 * (3.0 * x).cos()).abs() < 1e-11);
        }
    }
}
