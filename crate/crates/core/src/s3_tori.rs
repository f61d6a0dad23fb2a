//! Minimal tori in S³ written as graphs over the Clifford torus,
//!
//! `x = (cos θ cos φ¹, cos θ sin φ¹, sin θ cos φ², sin θ sin φ²)`,
//!
//! with `θ` a function of `φ = φ¹ + φ²`. The elementary family has
//! `α = 2θ`, `sin α = 1/√(1 + e² sin²(φ - φ₀))`,
//! `cos α = -e sin(φ - φ₀)/√(1 + e² sin²(φ - φ₀))`, where `e = sinh γ`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{mat_mul, rk4_integrate, DenseMatrix};

pub type Vec4 = [f64; 4];

fn dot4(a: &Vec4, b: &Vec4) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// Family
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusFamily {
    pub e: f64,
    pub phi0: f64,
}

/// `θ`, its first two `φ`-derivatives and `sin α`, `cos α` at one `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaPoint {
    pub theta: f64,
    pub theta_dot: f64,
    pub theta_ddot: f64,
    pub sin_alpha: f64,
    pub cos_alpha: f64,
}

impl TorusFamily {
    pub fn new(e: f64, phi0: f64) -> Result<Self> {
        if !(e >= 0.0) || !phi0.is_finite() {
            return Err(Error::InvalidArgument(format!("need e >= 0, got e = {e}, φ₀ = {phi0}")));
        }
        Ok(Self { e, phi0 })
    }

    pub fn clifford() -> Self {
        Self { e: 0.0, phi0: 0.0 }
    }

    /// `γ = asinh e`.
    pub fn gamma(&self) -> f64 {
        self.e.asinh()
    }

    /// Conserved energy `E = 1/(2√(1 + e²))`.
    pub fn energy(&self) -> f64 {
        0.5 / (1.0 + self.e * self.e).sqrt()
    }

    pub fn theta(&self, phi: f64) -> ThetaPoint {
        theta_of_phi(self, phi)
    }

    pub fn point(&self, p1: f64, p2: f64) -> Vec4 {
        torus_point(self, p1, p2)
    }

    /// The family member as a [`SurfaceMapS3`].
    pub fn surface(&self) -> SurfaceMapS3 {
        let fam = *self;
        SurfaceMapS3::graph_over_clifford(move |phi| {
            let t = fam.theta(phi);
            (t.theta, t.theta_dot)
        })
    }
}

pub fn theta_of_phi(family: &TorusFamily, phi: f64) -> ThetaPoint {
    let e = family.e;
    let (s, c) = (phi - family.phi0).sin_cos();
    let d = 1.0 + e * e * s * s;
    let sin_alpha = 1.0 / d.sqrt();
    let cos_alpha = -e * s / d.sqrt();
    // α' = e cos/(1 + e² sin²)
    let alpha_dot = e * c / d;
    let alpha_ddot = -e * s / d - 2.0 * e.powi(3) * s * c * c / (d * d);
    ThetaPoint {
        theta: 0.5 * sin_alpha.atan2(cos_alpha),
        theta_dot: 0.5 * alpha_dot,
        theta_ddot: 0.5 * alpha_ddot,
        sin_alpha,
        cos_alpha,
    }
}

/// Explicit embedding; `e = 0` is the Clifford torus.
pub fn torus_point(family: &TorusFamily, p1: f64, p2: f64) -> Vec4 {
    let e = family.e;
    let s = (p1 + p2 - family.phi0).sin();
    let ratio = e * s / (1.0 + e * e * s * s).sqrt();
    let a = ((1.0 - ratio) / 2.0).sqrt();
    let b = ((1.0 + ratio) / 2.0).sqrt();
    [a * p1.cos(), a * p1.sin(), b * p2.cos(), b * p2.sin()]
}

/// `α̇² + sin²α (1 - a² sin²α)` with `a = cosh γ`.
pub fn alpha_ode_residual(family: &TorusFamily, phi: f64) -> f64 {
    let t = family.theta(phi);
    let a2 = 1.0 + family.e * family.e;
    let sa2 = t.sin_alpha * t.sin_alpha;
    (2.0 * t.theta_dot).powi(2) + sa2 * (1.0 - a2 * sa2)
}

/// The `θ` equation for `θ(kφ¹ + lφ²)`, divided by `sc`:
/// `sc θ̈ (k²s² + l²c²) + θ̇²[(l² - k²)s²c² + 2k²s⁴ - 2l²c⁴] + s²c²(s² - c²)`.
pub fn theta_ode_residual(k: f64, l: f64, theta: f64, theta_dot: f64, theta_ddot: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    s * c * theta_ddot * (k * k * s2 + l * l * c2)
        + theta_dot.powi(2) * ((l * l - k * k) * s2 * c2 + 2.0 * k * k * s2 * s2 - 2.0 * l * l * c2 * c2)
        + s2 * c2 * (s2 - c2)
}

/// Conserved `s²c²/√(s²c² + (k²s² + l²c²) θ̇²)`.
pub fn conserved_energy(k: f64, l: f64, theta: f64, theta_dot: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let sc2 = s * s * c * c;
    sc2 / (sc2 + (k * k * s * s + l * l * c * c) * theta_dot * theta_dot).sqrt()
}

/// Integrates the `θ` equation for general `(k, l)` by RK4; returns
/// `(t, θ, θ̇)` rows.
pub fn integrate_theta(k: f64, l: f64, theta0: f64, theta_dot0: f64, t1: f64, steps: usize) -> Result<Vec<[f64; 3]>> {
    let field = |_: f64, y: &[f64]| {
        let (s, c) = y[0].sin_cos();
        let (s2, c2) = (s * s, c * c);
        let f = k * k * s2 + l * l * c2;
        let rest = y[1] * y[1] * ((l * l - k * k) * s2 * c2 + 2.0 * k * k * s2 * s2 - 2.0 * l * l * c2 * c2)
            + s2 * c2 * (s2 - c2);
        vec![y[1], -rest / (s * c * f)]
    };
    let traj = rk4_integrate(field, &[theta0, theta_dot0], 0.0, t1, steps)?;
    let dt = t1 / steps as f64;
    Ok(traj.iter().enumerate().map(|(i, y)| [i as f64 * dt, y[0], y[1]]).collect())
}

// ---------------------------------------------------------------------------
// Surface maps and minimality
// ---------------------------------------------------------------------------

pub type MapFn = Arc<dyn Fn(f64, f64) -> Vec4 + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(f64, f64) -> [Vec4; 2] + Send + Sync>;

/// Map `(φ¹, φ²) → S³` with analytic first derivatives.
#[derive(Clone)]
pub struct SurfaceMapS3 {
    pub x: MapFn,
    pub dx: JacobianFn,
}

impl std::fmt::Debug for SurfaceMapS3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SurfaceMapS3").finish_non_exhaustive()
    }
}

impl SurfaceMapS3 {
    /// Graph over the Clifford torus with `θ = θ(φ¹ + φ²)`; `theta` returns
    /// `(θ, θ̇)`.
    pub fn graph_over_clifford(theta: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static) -> Self {
        let theta = Arc::new(theta);
        let t1 = theta.clone();
        SurfaceMapS3 {
            x: Arc::new(move |p1, p2| {
                let (t, _) = t1(p1 + p2);
                let (s, c) = t.sin_cos();
                [c * p1.cos(), c * p1.sin(), s * p2.cos(), s * p2.sin()]
            }),
            dx: Arc::new(move |p1, p2| {
                let (t, td) = theta(p1 + p2);
                let (s, c) = t.sin_cos();
                let (s1, c1) = p1.sin_cos();
                let (s2, c2) = p2.sin_cos();
                let e = [-s * c1, -s * s1, c * c2, c * s2];
                [
                    [-c * s1 + td * e[0], c * c1 + td * e[1], td * e[2], td * e[3]],
                    [td * e[0], td * e[1], -s * s2 + td * e[2], s * c2 + td * e[3]],
                ]
            }),
        }
    }

    pub fn clifford() -> Self {
        Self::graph_over_clifford(|_| (FRAC_PI_4, 0.0))
    }

    pub fn metric(&self, p1: f64, p2: f64) -> [[f64; 2]; 2] {
        let d = (self.dx)(p1, p2);
        [[dot4(&d[0], &d[0]), dot4(&d[0], &d[1])], [dot4(&d[1], &d[0]), dot4(&d[1], &d[1])]]
    }

    /// `∂_a ∂_b x` by central differences of the analytic first derivatives
    /// with one Richardson step.
    pub fn second_derivatives(&self, p1: f64, p2: f64, h: f64) -> [[Vec4; 2]; 2] {
        let central = |h: f64| {
            let mut out = [[[0.0; 4]; 2]; 2];
            for b in 0..2 {
                let (dp1, dp2) = if b == 0 { (h, 0.0) } else { (0.0, h) };
                let plus = (self.dx)(p1 + dp1, p2 + dp2);
                let minus = (self.dx)(p1 - dp1, p2 - dp2);
                for a in 0..2 {
                    for i in 0..4 {
                        out[a][b][i] = (plus[a][i] - minus[a][i]) / (2.0 * h);
                    }
                }
            }
            out
        };
        let (coarse, fine) = (central(h), central(h / 2.0));
        let mut out = [[[0.0; 4]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                for i in 0..4 {
                    // Symmetrize the mixed derivative.
                    let f = 0.5 * (fine[a][b][i] + fine[b][a][i]);
                    let c = 0.5 * (coarse[a][b][i] + coarse[b][a][i]);
                    out[a][b][i] = (4.0 * f - c) / 3.0;
                }
            }
        }
        out
    }
}

/// `|Δx + 2x|` with `Δ` the induced Laplace-Beltrami operator.
pub fn minimality_residual(map: &SurfaceMapS3, p1: f64, p2: f64, h_fd: f64) -> Result<f64> {
    let x = (map.x)(p1, p2);
    let d = (map.dx)(p1, p2);
    let g = map.metric(p1, p2);
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if !(det > 1e-14 * (g[0][0] + g[1][1]).powi(2)) {
        return Err(Error::Degenerate);
    }
    let gi = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
    let dd = map.second_derivatives(p1, p2, h_fd);
    // Δx = g^{ab}(∂_ab x - g^{cd}(∂_ab x·∂_d x) ∂_c x).
    let mut lap = [0.0; 4];
    for a in 0..2 {
        for b in 0..2 {
            let mut proj = dd[a][b];
            for c in 0..2 {
                let coef: f64 = (0..2).map(|dd_| gi[c][dd_] * dot4(&dd[a][b], &d[dd_])).sum();
                for i in 0..4 {
                    proj[i] -= coef * d[c][i];
                }
            }
            for i in 0..4 {
                lap[i] += gi[a][b] * proj[i];
            }
        }
    }
    Ok((0..4).map(|i| (lap[i] + 2.0 * x[i]).powi(2)).sum::<f64>().sqrt())
}

// ---------------------------------------------------------------------------
// Fundamental forms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalFormsS3 {
    pub g: [[f64; 2]; 2],
    pub h: [[f64; 2]; 2],
}

fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

impl FundamentalFormsS3 {
    /// `g^{ab} h_{ab}`.
    pub fn mean_trace(&self) -> f64 {
        let d = det2(&self.g);
        (self.g[1][1] * self.h[0][0] - 2.0 * self.g[0][1] * self.h[0][1] + self.g[0][0] * self.h[1][1]) / d
    }

    /// `det h + det g`.
    pub fn gauss_defect(&self) -> f64 {
        det2(&self.h) + det2(&self.g)
    }
}

/// `g = [[c² + θ̇², θ̇²], [θ̇², s² + θ̇²]]`, `h = √g [[2c², c² - s²], [c² - s², -2s²]]`
/// with `√g = s²c²/E`. The normal points along `sc e - sθ̇ e₁ - cθ̇ e₂`.
pub fn fundamental_forms(family: &TorusFamily, phi: f64) -> FundamentalFormsS3 {
    let t = family.theta(phi);
    let (s, c) = t.theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let td2 = t.theta_dot * t.theta_dot;
    let sqrt_g = s2 * c2 / family.energy();
    FundamentalFormsS3 {
        g: [[c2 + td2, td2], [td2, s2 + td2]],
        h: [[sqrt_g * 2.0 * c2, sqrt_g * (c2 - s2)], [sqrt_g * (c2 - s2), -sqrt_g * 2.0 * s2]],
    }
}

/// Forms computed directly from the embedding: analytic `g`, finite
/// difference second derivatives projected on the normal.
pub fn fundamental_forms_numeric(family: &TorusFamily, p1: f64, p2: f64, h_fd: f64) -> FundamentalFormsS3 {
    let map = family.surface();
    let t = family.theta(p1 + p2);
    let (s, c) = t.theta.sin_cos();
    let (s1, c1) = p1.sin_cos();
    let (s2, c2) = p2.sin_cos();
    let e = [-s * c1, -s * s1, c * c2, c * s2];
    let e1 = [-s1, c1, 0.0, 0.0];
    let e2 = [0.0, 0.0, -s2, c2];
    let mut m = [0.0; 4];
    for i in 0..4 {
        m[i] = s * c * e[i] - s * t.theta_dot * e1[i] - c * t.theta_dot * e2[i];
    }
    let norm = dot4(&m, &m).sqrt();
    let dd = map.second_derivatives(p1, p2, h_fd);
    let mut h = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            h[a][b] = dot4(&m, &dd[a][b]) / norm;
        }
    }
    FundamentalFormsS3 { g: map.metric(p1, p2), h }
}

// ---------------------------------------------------------------------------
// Reparametrization to the Clifford torus
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reparam {
    pub u: f64,
    pub v: f64,
    /// `f₁' = u`, `f₂' = v`.
    pub df1: f64,
    pub df2: f64,
}

/// `u = √g - s²`, `v = √g - c²`.
pub fn reparam_uv(family: &TorusFamily, phi: f64) -> Reparam {
    let t = family.theta(phi);
    let (s, c) = t.theta.sin_cos();
    let sqrt_g = s * s * c * c / family.energy();
    let (u, v) = (sqrt_g - s * s, sqrt_g - c * c);
    Reparam { u, v, df1: u, df2: v }
}

/// The same `u, v` written through `e` and `sin(φ - φ₀)` only.
pub fn reparam_uv_explicit(family: &TorusFamily, phi: f64) -> (f64, f64) {
    let e = family.e;
    let s = (phi - family.phi0).sin();
    let d = 1.0 + e * e * s * s;
    let r = e * s / d.sqrt();
    let q = (1.0 + e * e).sqrt() / d;
    (0.5 * (-1.0 - r + q), 0.5 * (-1.0 + r + q))
}

/// Jacobian `[[1 + u, u], [v, 1 + v]]` of the reparametrization.
pub fn reparam_jacobian(family: &TorusFamily, phi: f64) -> [[f64; 2]; 2] {
    let r = reparam_uv(family, phi);
    [[1.0 + r.u, r.u], [r.v, 1.0 + r.v]]
}

/// Second fundamental form of the Clifford torus pulled back by the
/// reparametrization: `-½ Jᵀ diag(-1, 1) J`.
pub fn transformed_clifford_h(family: &TorusFamily, phi: f64) -> [[f64; 2]; 2] {
    let j = reparam_jacobian(family, phi);
    let mut out = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            out[a][b] = -0.5 * (-j[0][a] * j[0][b] + j[1][a] * j[1][b]);
        }
    }
    out
}

/// `½ Jᵀ J`.
pub fn transformed_clifford_g(family: &TorusFamily, phi: f64) -> [[f64; 2]; 2] {
    let j = reparam_jacobian(family, phi);
    let mut out = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            out[a][b] = 0.5 * (j[0][a] * j[0][b] + j[1][a] * j[1][b]);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Congruence
// ---------------------------------------------------------------------------

/// The orthogonal matrix carrying the reparametrized Clifford torus onto the
/// family member, `c = 1/√(1+e²)`, `s = e/√(1+e²)`.
pub fn congruence_matrix(e: f64) -> DenseMatrix {
    let n = (1.0 + e * e).sqrt();
    let (c, s) = (1.0 / n, e / n);
    DenseMatrix::from_rows(&[
        vec![1.0 + c, -s, 1.0 - c, -s],
        vec![s, 1.0 + c, -s, -1.0 + c],
        vec![1.0 - c, s, 1.0 + c, s],
        vec![s, c - 1.0, -s, 1.0 + c],
    ])
    .scale(0.5)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CongruenceReport {
    /// `max |SᵀS - I|`.
    pub orthogonality: f64,
    /// Largest defect of the four scalar relations for `f₁`, `f₂`.
    pub relations: f64,
    /// Largest `|S x̃ - x|` with `x̃` the reparametrized Clifford torus.
    pub pointwise: f64,
    /// Largest `|2 - (first two relation right-hand sides)²|`.
    pub unit_sum: f64,
}

/// `f₁`, `f₂` on `[0, φ_max]` by RK4 quadrature of `u`, `v` with `f(0) = 0`;
/// returns `(φ, f₁, f₂)` rows.
pub fn integrate_f(family: &TorusFamily, phi_max: f64, steps: usize) -> Result<Vec<[f64; 3]>> {
    let fam = *family;
    let traj = rk4_integrate(
        move |p, _| {
            let r = reparam_uv(&fam, p);
            vec![r.u, r.v]
        },
        &[0.0, 0.0],
        0.0,
        phi_max,
        steps,
    )?;
    let dp = phi_max / steps as f64;
    Ok(traj.iter().enumerate().map(|(i, y)| [i as f64 * dp, y[0], y[1]]).collect())
}

/// Verifies the congruence with `φ₀ = 0`, sampling `count` values of `φ` on
/// one period.
pub fn congruence_check(family: &TorusFamily, count: usize) -> Result<CongruenceReport> {
    if family.phi0 != 0.0 {
        return Err(Error::InvalidArgument("congruence check uses φ₀ = 0".into()));
    }
    let e = family.e;
    let sm = congruence_matrix(e);
    let sts = mat_mul(&sm.transpose(), &sm);
    let orthogonality = sts.sub(&DenseMatrix::identity(4)).max_abs();

    let n = (1.0 + e * e).sqrt();
    let (c, s) = (1.0 / n, e / n);
    let per = 64;
    let rows = integrate_f(family, 2.0 * PI, count.max(1) * per)?;
    let r2 = 2f64.sqrt();
    let (mut relations, mut pointwise, mut unit_sum) = (0.0f64, 0.0f64, 0.0f64);
    for row in rows.iter().step_by(per) {
        let [phi, f1, f2] = *row;
        let t = family.theta(phi);
        let (st, ct) = t.theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let rhs = [
            (1.0 + c) * ct + (1.0 - c) * st * cp + s * st * sp,
            -s * ct + s * st * cp - (1.0 - c) * st * sp,
            (1.0 - c) * ct + st * ((1.0 + c) * cp - s * sp),
            -s * ct + st * ((1.0 + c) * sp + s * cp),
        ];
        let lhs = [r2 * f1.cos(), r2 * f1.sin(), r2 * (f2 + phi).cos(), r2 * (f2 + phi).sin()];
        for i in 0..4 {
            relations = relations.max((lhs[i] - rhs[i]).abs());
        }
        unit_sum = unit_sum.max((rhs[0] * rhs[0] + rhs[1] * rhs[1] - 2.0).abs());
        // Whole surface: φ¹ free, φ² = φ - φ¹.
        for j in 0..4 {
            let p1 = 0.3 + j as f64 * 1.4;
            let p2 = phi - p1;
            let (a1, a2) = (p1 + f1, p2 + f2);
            let tilde = [a1.cos() / r2, a1.sin() / r2, a2.cos() / r2, a2.sin() / r2];
            let image = sm.mat_vec(&tilde);
            let x = family.point(p1, p2);
            for i in 0..4 {
                pointwise = pointwise.max((image[i] - x[i]).abs());
            }
        }
    }
    Ok(CongruenceReport { orthogonality, relations, pointwise, unit_sum })
}

// ---------------------------------------------------------------------------
// Hopf map
// ---------------------------------------------------------------------------

/// `(t² + x² - y² - z², 2(tz - xy), 2(ty + xz))`.
pub fn hopf_map(q: &Vec4) -> [f64; 3] {
    let [t, x, y, z] = *q;
    [t * t + x * x - y * y - z * z, 2.0 * (t * z - x * y), 2.0 * (t * y + x * z)]
}

/// Hopf map after `x → -x`; fibres over great circles through `φ¹ + φ²`.
pub fn hopf_map_conjugate(q: &Vec4) -> [f64; 3] {
    hopf_map(&[q[0], -q[1], q[2], q[3]])
}

/// Unit normal of the plane whose great circle contains the conjugate Hopf
/// image of the family: `(1, e cos φ₀, -e sin φ₀)/√(1 + e²)`.
pub fn great_circle_normal(family: &TorusFamily) -> [f64; 3] {
    let e = family.e;
    let n = (1.0 + e * e).sqrt();
    [1.0 / n, e * family.phi0.cos() / n, -e * family.phi0.sin() / n]
}

/// Tilt angle `β` of that great circle against the equator.
pub fn great_circle_tilt(family: &TorusFamily) -> f64 {
    -family.e.atan()
}

/// Largest distance of conjugate Hopf images of grid points to the great
/// circle.
pub fn great_circle_defect(family: &TorusFamily, grid: usize) -> f64 {
    let n = great_circle_normal(family);
    let mut worst = 0.0f64;
    for i in 0..grid {
        for j in 0..grid {
            let p1 = 2.0 * PI * i as f64 / grid as f64;
            let p2 = 2.0 * PI * (j as f64 + 0.5) / grid as f64;
            let h = hopf_map_conjugate(&family.point(p1, p2));
            let along = h[0] * n[0] + h[1] * n[1] + h[2] * n[2];
            let norm = (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();
            worst = worst.max(along.abs()).max((norm - 1.0).abs());
        }
    }
    worst
}

/// Smallest distance between images of distinct grid parameters.
pub fn min_grid_separation(family: &TorusFamily, grid: usize) -> f64 {
    let pts: Vec<Vec4> = (0..grid * grid)
        .map(|k| {
            let (i, j) = (k / grid, k % grid);
            family.point(2.0 * PI * i as f64 / grid as f64, 2.0 * PI * j as f64 / grid as f64)
        })
        .collect();
    let mut best = f64::INFINITY;
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            let d: f64 = (0..4).map(|i| (pts[a][i] - pts[b][i]).powi(2)).sum();
            best = best.min(d);
        }
    }
    best.sqrt()
}
