//! Axially symmetric relativistic membranes in Minkowski space.
//!
//! The surface is `(t, r cos θ, r sin θ, z)` with profile data depending on
//! time and one spatial parameter. Several descriptions are implemented
//! side by side so that they can be checked against each other:
//!
//! * [`physical`]: orthonormal gauge in physical time, `r(t, φ)`, `z(t, φ)`;
//! * [`rform`]: light-cone gauge, the radius `R(τ, φ)` alone, with the
//!   longitudinal coordinate `ζ = t − z` reconstructed afterwards;
//! * [`linearized`]: small perturbations of the static catenoid;
//! * [`characteristic`]: null coordinates `θ±` and the light-cone reduction;
//! * [`lax`]: flat-space Gauss–Codazzi data and the zero-curvature form;
//! * [`graph`]: the surface as a time graph `t(r, z)` and its Legendre dual.

pub mod characteristic;
pub mod graph;
pub mod lax;
pub mod linearized;
pub mod physical;
pub mod rform;

pub use characteristic::*;
pub use graph::*;
pub use lax::*;
pub use linearized::*;
pub use physical::*;
pub use rform::*;

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Spatial derivative scheme for method-of-lines evolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// FFT differentiation; periodic grids only.
    Spectral,
    /// Five-point stencils, one-sided near the ends of a bounded grid.
    FiniteDifference4,
}

/// FFT-based differentiation on `n` equispaced points of one period.
#[derive(Clone)]
pub struct SpectralDiff {
    n: usize,
    period: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Angular wavenumbers in FFT order, Nyquist entry zeroed.
    k: Vec<f64>,
}

impl std::fmt::Debug for SpectralDiff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralDiff").field("n", &self.n).field("period", &self.period).finish()
    }
}

impl SpectralDiff {
    pub fn new(n: usize, period: f64) -> Self {
        assert!(n >= 4 && n.is_multiple_of(2), "spectral grid needs an even point count >= 4");
        assert!(period > 0.0);
        let mut planner = FftPlanner::new();
        let w = 2.0 * std::f64::consts::PI / period;
        let k = (0..n)
            .map(|j| {
                if j < n / 2 {
                    j as f64 * w
                } else if j == n / 2 {
                    0.0
                } else {
                    (j as f64 - n as f64) * w
                }
            })
            .collect();
        Self { n, period, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n), k }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Unnormalised DFT of real samples.
    pub fn coefficients(&self, f: &[f64]) -> Vec<Complex64> {
        assert_eq!(f.len(), self.n);
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        buf
    }

    fn synthesize(&self, mut c: Vec<Complex64>) -> Vec<f64> {
        self.inv.process(&mut c);
        let s = 1.0 / self.n as f64;
        c.iter().map(|v| v.re * s).collect()
    }

    /// First derivative of a periodic sample vector.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let mut c = self.coefficients(f);
        for (cj, kj) in c.iter_mut().zip(&self.k) {
            *cj *= Complex64::new(0.0, *kj);
        }
        self.synthesize(c)
    }

    /// Antiderivative of the zero-mean part of `f`, pinned to 0 at the first
    /// node, together with the mean of `f`.
    pub fn antiderivative(&self, f: &[f64]) -> (Vec<f64>, f64) {
        let mut c = self.coefficients(f);
        let mean = c[0].re / self.n as f64;
        c[0] = Complex64::new(0.0, 0.0);
        c[self.n / 2] = Complex64::new(0.0, 0.0);
        for (cj, kj) in c.iter_mut().zip(&self.k).skip(1) {
            if *kj != 0.0 {
                *cj /= Complex64::new(0.0, *kj);
            }
        }
        let mut g = self.synthesize(c);
        let g0 = g[0];
        g.iter_mut().for_each(|v| *v -= g0);
        (g, mean)
    }

    /// Value and derivative of the trigonometric interpolant at offset `x`
    /// from the first node, given [`coefficients`](Self::coefficients).
    pub fn interpolate(&self, c: &[Complex64], x: f64) -> (f64, f64) {
        let n = self.n;
        let w = 2.0 * std::f64::consts::PI / self.period;
        let (mut v, mut d) = (0.0, 0.0);
        for j in (0..n).filter(|&j| j != n / 2) {
            let kk = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
            let arg = kk * w * x;
            let e = c[j] * Complex64::new(arg.cos(), arg.sin());
            v += e.re;
            d += -kk * w * e.im;
        }
        // Real data: the Nyquist term is a plain cosine.
        let kn = 0.5 * n as f64 * w;
        let cn = c[n / 2].re;
        v += cn * (kn * x).cos();
        d -= cn * kn * (kn * x).sin();
        (v / n as f64, d / n as f64)
    }
}

/// Fourth-order first derivative on a bounded uniform grid; the two nodes
/// at each end use one-sided five-point stencils.
pub fn fd4_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "fourth-order stencils need at least 5 nodes");
    let s = 1.0 / (12.0 * h);
    let mut d = vec![0.0; n];
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * s;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * s;
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * s;
    }
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * s;
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * s;
    d
}

/// Fourth-order first derivative on a periodic uniform grid.
pub fn fd4_periodic_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5);
    let s = 1.0 / (12.0 * h);
    let at = |i: isize| f[i.rem_euclid(n as isize) as usize];
    (0..n as isize).map(|i| (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) * s).collect()
}

/// Fourth-order second derivative on a bounded uniform grid (six-point
/// one-sided stencils next to the ends).
pub fn fd4_second_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 6);
    let s = 1.0 / (12.0 * h * h);
    let mut d = vec![0.0; n];
    d[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) * s;
    d[1] = (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]) * s;
    for i in 2..n - 2 {
        d[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) * s;
    }
    d[n - 2] = (10.0 * f[n - 1] - 15.0 * f[n - 2] - 4.0 * f[n - 3] + 14.0 * f[n - 4] - 6.0 * f[n - 5] + f[n - 6]) * s;
    d[n - 1] = (45.0 * f[n - 1] - 154.0 * f[n - 2] + 214.0 * f[n - 3] - 156.0 * f[n - 4] + 61.0 * f[n - 5]
        - 10.0 * f[n - 6])
        * s;
    d
}

/// Minkowski product with signature `(+, −, −)` on `(t, r, z)`.
pub fn mink(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2]
}
