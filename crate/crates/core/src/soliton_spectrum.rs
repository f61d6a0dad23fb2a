//! Perturbations of the static catenoid viewed as a time-like extremal
//! hypersurface in Minkowski space.
//!
//! Radial fluctuations obey `ε̈ + Dε = 0` with
//! `D = -sech²z (∂² - 2 tanh z ∂ + 1) = -∂ sech² ∂ - sech²`, which is
//! symmetric for the flat pairing `∫ f g dz`. In `y = sinh z`, after
//! conjugation with `(1+y²)^{1/4}`, it becomes the Schrödinger operator
//! `D̃ = -∂²_y + Ṽ(y)`, `Ṽ = -1/(4(1+y²)) - 5/(4(1+y²)²)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{find_root, quad, sl_eigen, EigenResult, SLProblem};

/// Quadrature window for decaying test functions.
pub const DEFAULT_HALF_WIDTH: f64 = 40.0;

fn sech(z: f64) -> f64 {
    1.0 / z.cosh()
}

/// `Ṽ(y)`.
pub fn v_tilde(y: f64) -> f64 {
    let q = 1.0 + y * y;
    -0.25 / q - 1.25 / (q * q)
}

/// `(Dε)(z)` from `ε`, `ε'`, `ε''` at `z`.
pub fn apply_d(e: f64, de: f64, d2e: f64, z: f64) -> f64 {
    -(d2e - 2.0 * z.tanh() * de + e) / z.cosh().powi(2)
}

/// `(D̃g)(y)` from `g` and `g''` at `y`.
pub fn apply_d_tilde(g: f64, d2g: f64, y: f64) -> f64 {
    -d2g + v_tilde(y) * g
}

/// `sech · (L†L - 1) · sech` applied to `ε`, with `L = ∂ + tanh`.
pub fn apply_d_factorized(e: f64, de: f64, d2e: f64, z: f64) -> f64 {
    let (s, t) = (sech(z), z.tanh());
    let u = s * e;
    let d2u = s * d2e - 2.0 * s * t * de + (s * t * t - s * s * s) * e;
    // L†L - 1 = -∂² - 2 sech².
    s * (-d2u - 2.0 * s * s * u)
}

/// Both sides of the conjugation identity at `y` for a test function
/// `ε(z)` given with two derivatives: returns
/// `(D̃g(y), (1+y²)^{-1/4} Dε(z))` with `g(y) = (1+y²)^{-1/4} ε(asinh y)`.
pub fn conjugation_pair(
    eps: impl Fn(f64) -> f64,
    deps: impl Fn(f64) -> f64,
    d2eps: impl Fn(f64) -> f64,
    y: f64,
) -> (f64, f64) {
    let z = y.asinh();
    let s = (1.0 + y * y).sqrt();
    let (e, de, d2e) = (eps(z), deps(z), d2eps(z));
    let g = e / s.sqrt();
    let d2g =
        (-0.5 * s.powf(-2.5) + 1.25 * y * y * s.powf(-4.5)) * e - 2.0 * y * s.powf(-3.5) * de + s.powf(-2.5) * d2e;
    (apply_d_tilde(g, d2g, y), apply_d(e, de, d2e, z) / s.sqrt())
}

/// `∫ψ Dψ dz / ∫ψ² dz` over `[-L, L]`, flat pairing.
pub fn rayleigh_quotient_d(
    psi: impl Fn(f64) -> f64,
    dpsi: impl Fn(f64) -> f64,
    d2psi: impl Fn(f64) -> f64,
    half_width: f64,
) -> Result<f64> {
    let num = quad(|z| psi(z) * apply_d(psi(z), dpsi(z), d2psi(z), z), -half_width, half_width, 1e-13)?;
    let den = quad(|z| psi(z).powi(2), -half_width, half_width, 1e-13)?;
    if !(den > 0.0) || !num.is_finite() {
        return Err(Error::Accuracy("trial function has no finite norm".into()));
    }
    Ok(num / den)
}

/// Rayleigh quotient of the trial function `sechᵖ z`.
pub fn rayleigh_sech_power(p: f64) -> Result<f64> {
    let f = move |z: f64| sech(z).powf(p);
    let df = move |z: f64| -p * sech(z).powf(p) * z.tanh();
    let d2f = move |z: f64| {
        let (s, t) = (sech(z), z.tanh());
        p * p * s.powf(p) * t * t - p * s.powf(p) * s * s
    };
    rayleigh_quotient_d(f, df, d2f, DEFAULT_HALF_WIDTH)
}

/// The two zero modes `cosh z - z sinh z` and `sinh z`.
pub fn eps_plus(z: f64) -> (f64, f64, f64) {
    (z.cosh() - z * z.sinh(), -z * z.cosh(), -z.cosh() - z * z.sinh())
}

pub fn eps_minus(z: f64) -> (f64, f64, f64) {
    (z.sinh(), z.cosh(), z.sinh())
}

/// `sup |Dε±|` over `z ∈ [-10, 10]`.
pub fn zero_mode_residuals() -> (f64, f64) {
    let mut r = (0.0f64, 0.0f64);
    for i in 0..=2000 {
        let z = -10.0 + 0.01 * i as f64;
        let (a, b, c) = eps_plus(z);
        r.0 = r.0.max(apply_d(a, b, c, z).abs());
        let (a, b, c) = eps_minus(z);
        r.1 = r.1.max(apply_d(a, b, c, z).abs());
    }
    r
}

/// Grid resolution used for `D̃` on `[-L, L]`.
pub fn d_tilde_points(truncation: f64) -> usize {
    ((400.0 * truncation) as usize).max(8192)
}

/// Eigenpair `index` of `D̃` on `[-L, L]` (index 0 is the even ground state,
/// index 1 the lowest odd state).
pub fn d_tilde_eigen(truncation: f64, index: usize) -> Result<EigenResult> {
    if !(truncation >= 20.0) {
        return Err(Error::InvalidArgument(format!("truncation {truncation} < 20")));
    }
    let p = SLProblem::decay(v_tilde, truncation).with_points(d_tilde_points(truncation));
    sl_eigen(&p, index, 1e-14)
}

/// Unstable even mode of `D̃`; eigenvalue `-κ²`.
pub fn ground_state_d(truncation: f64) -> Result<EigenResult> {
    d_tilde_eigen(truncation, 0)
}

/// Solution of the κ = 0 Riccati equation
/// `4x(W' + W²) + 2W + B/(1+x) + D/(1+x)² = 0`, `B = 1/4`, `D = 5/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiSolution {
    pub c_tilde: f64,
    /// The single zero of the denominator on `x > 0`.
    pub pole: f64,
}

pub const RICCATI_B: f64 = 0.25;
pub const RICCATI_D: f64 = 1.25;

/// `W₀(x) = (2+x)/(4x(1+x))`.
pub fn w0(x: f64) -> f64 {
    (2.0 + x) / (4.0 * x * (1.0 + x))
}

fn dw0(x: f64) -> f64 {
    -(1.0 + 1.0 / (1.0 + x)) / (4.0 * x * x) - 1.0 / (4.0 * x * (1.0 + x).powi(2))
}

/// `C̃/2 - √((1+x)/x) + asinh √x`, increasing from -∞ to ∞ on `x > 0`.
fn bracket(c_tilde: f64, x: f64) -> f64 {
    0.5 * c_tilde - ((1.0 + x) / x).sqrt() + x.sqrt().asinh()
}

fn dbracket(x: f64) -> f64 {
    (x / (1.0 + x)).sqrt() / (2.0 * x * x) + 1.0 / (2.0 * (x * (1.0 + x)).sqrt())
}

impl RiccatiSolution {
    pub fn w(&self, x: f64) -> f64 {
        w0(x) + 1.0 / self.y(x)
    }

    /// `Y = 2 x^{3/2} (1+x)^{-1/2} · bracket`.
    fn y(&self, x: f64) -> f64 {
        2.0 * x.powf(1.5) / (1.0 + x).sqrt() * bracket(self.c_tilde, x)
    }

    pub fn dw(&self, x: f64) -> f64 {
        let p = x.powf(1.5) / (1.0 + x).sqrt();
        let dp = p * (1.5 / x - 0.5 / (1.0 + x));
        let g = bracket(self.c_tilde, x);
        let dy = 2.0 * (dp * g + p * dbracket(x));
        let y = 2.0 * p * g;
        dw0(x) - dy / (y * y)
    }

    /// Residual of the Riccati equation at `x`.
    pub fn residual(&self, x: f64) -> f64 {
        riccati_residual(self.w(x), self.dw(x), x)
    }
}

/// `4x(W' + W²) + 2W + B/(1+x) + D/(1+x)²`.
pub fn riccati_residual(w: f64, dw: f64, x: f64) -> f64 {
    4.0 * x * (dw + w * w) + 2.0 * w + RICCATI_B / (1.0 + x) + RICCATI_D / (1.0 + x).powi(2)
}

/// Riccati solution with constant `C̃`; fails if the pole lies in `x_range`.
pub fn riccati_zero_mode(c_tilde: f64, x_range: (f64, f64)) -> Result<RiccatiSolution> {
    // bracket(x) → -∞ as x → 0⁺ and → +∞ as x → ∞.
    let mut lo = 1e-3;
    while bracket(c_tilde, lo) > 0.0 {
        lo *= 1e-3;
    }
    let mut hi = 1.0;
    while bracket(c_tilde, hi) < 0.0 {
        hi *= 10.0;
    }
    let pole = find_root(|x| bracket(c_tilde, x), lo, hi, 1e-14 * hi)?;
    let sol = RiccatiSolution { c_tilde, pole };
    if pole >= x_range.0 && pole <= x_range.1 {
        return Err(Error::Pole(pole));
    }
    Ok(sol)
}

/// `φ̃'/φ̃ = -U(y)` for the κ = 0 zero-mode combination
/// `C y (1+y²)^{-1/4} + A[(1+y²)^{1/4} - y (1+y²)^{-1/4} asinh y]`.
pub fn minus_u(c: f64, a: f64, y: f64) -> f64 {
    let q = 1.0 + y * y;
    let l = y.asinh();
    let num = 0.5 * c * (2.0 + y * y) / q.powf(1.25) - 0.5 * a * (y / q.powf(0.75) + (2.0 + y * y) / q.powf(1.25) * l);
    let den = c * y / q.powf(0.25) + a * (q.powf(0.25) - y / q.powf(0.25) * l);
    num / den
}

/// `W(x = y²) = -U(y)/(2y)` built from the y-form with constants `(C, A)`.
pub fn w_from_y_form(c: f64, a: f64, y: f64) -> f64 {
    minus_u(c, a, y) / (2.0 * y)
}

/// The `C̃` matching `(C, A)` with `A ≠ 0`.
pub fn c_tilde_from(c: f64, a: f64) -> f64 {
    -2.0 * c / a
}

/// Residuals for the exact eigenfunctions of `H = -∂² - 2 sech²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HCheck {
    /// `sup |(H - k²) ψ_k|`.
    pub scattering: f64,
    /// `sup |H ψ⁰ + ψ⁰|`.
    pub bound: f64,
}

/// `ψ_k(z) = -(ik + tanh z) e^{-ikz}` and its first two derivatives.
pub fn psi_scattering(k: f64, z: f64) -> (Complex64, Complex64, Complex64) {
    let i = Complex64::i();
    let (s2, t) = (sech(z).powi(2), z.tanh());
    let a = i * k + t;
    let e = (-i * k * z).exp();
    let psi = -a * e;
    let dpsi = -e * (s2 - i * k * a);
    let d2psi = -e * (-2.0 * i * k * s2 - k * k * a - 2.0 * s2 * t);
    (psi, dpsi, d2psi)
}

pub fn h_eigen_check(k: f64) -> HCheck {
    let mut out = HCheck { scattering: 0.0, bound: 0.0 };
    for j in 0..=2000 {
        let z = -10.0 + 0.01 * j as f64;
        let s2 = sech(z).powi(2);
        let (p, _, d2p) = psi_scattering(k, z);
        let res = -d2p - 2.0 * s2 * p - k * k * p;
        out.scattering = out.scattering.max(res.norm());
        let b = sech(z) / 2f64.sqrt();
        let d2b = b * (z.tanh().powi(2) - s2);
        out.bound = out.bound.max((-d2b - 2.0 * s2 * b + b).abs());
    }
    out
}

/// `∫ψ⁰ ψ_k dz` (complex) over `[-L, L]`, plus `∫ψ⁰² dz`.
pub fn bound_state_overlaps(k: f64, half_width: f64) -> Result<(Complex64, f64)> {
    let b = |z: f64| sech(z) / 2f64.sqrt();
    let re = quad(|z| b(z) * psi_scattering(k, z).0.re, -half_width, half_width, 1e-13)?;
    let im = quad(|z| b(z) * psi_scattering(k, z).0.im, -half_width, half_width, 1e-13)?;
    let norm = quad(|z| b(z).powi(2), -half_width, half_width, 1e-13)?;
    Ok((Complex64::new(re, im), norm))
}
