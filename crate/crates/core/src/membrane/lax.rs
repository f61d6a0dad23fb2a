//! Flat-space Gauss–Codazzi data in null coordinates and the zero-curvature
//! formulation.
//!
//! With `w = x₊·x₋` and the unit normal `n = m/w` (`n² = −1`):
//!
//! ```text
//! x₊₊ = a x₊ + b n,   x₋₋ = c x₋ + d n,   x₊₋ = e n,
//! e₊ − ae = b₋,   e₋ − ce = d₊,   c₊ = (e² − bd)/w = a₋,   e = m₁/(2r).
//! ```

use super::characteristic::{grid_d_minus, grid_d_plus, m_vector, CharFields};
use super::mink;
use crate::error::{Error, Result};
use crate::numerics::{mat_mul, DenseMatrix};

/// `|w|` below this is treated as a degenerate null frame.
pub const W_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LaxFields {
    pub np: usize,
    pub nm: usize,
    pub hp: f64,
    pub hm: f64,
    /// `θ±` at each node.
    pub theta: Vec<(f64, f64)>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub e: Vec<f64>,
    pub w: Vec<f64>,
    /// `m₁/(2r)`.
    pub e_minimal: Vec<f64>,
}

impl LaxFields {
    pub fn from_char(f: &CharFields) -> Result<Self> {
        let n = f.len();
        let mut out = LaxFields {
            np: f.np,
            nm: f.nm,
            hp: f.hp,
            hm: f.hm,
            theta: (0..n).map(|k| f.theta(k / f.nm, k % f.nm)).collect(),
            a: Vec::with_capacity(n),
            b: Vec::with_capacity(n),
            c: Vec::with_capacity(n),
            d: Vec::with_capacity(n),
            e: Vec::with_capacity(n),
            w: Vec::with_capacity(n),
            e_minimal: Vec::with_capacity(n),
        };
        for jt in &f.jets {
            let w = mink(&jt.xp, &jt.xm);
            if !(w.abs() > W_FLOOR) {
                return Err(Error::NullDegeneracy(w));
            }
            let m = m_vector(jt);
            // Raise the index: n^μ = η^{μν} m_ν / w.
            let nv = [m[0] / w, -m[1] / w, -m[2] / w];
            out.a.push(mink(&jt.xpp, &jt.xm) / w);
            out.c.push(mink(&jt.xmm, &jt.xp) / w);
            out.b.push(-mink(&nv, &jt.xpp));
            out.d.push(-mink(&nv, &jt.xmm));
            out.e.push(-mink(&nv, &jt.xpm));
            out.w.push(w);
            out.e_minimal.push(m[1] / (2.0 * jt.x[1]));
        }
        Ok(out)
    }

    /// `H_αβ = n·x_αβ = [[−b, −e], [−e, −d]]`; the off-diagonal entries are
    /// one stored value.
    pub fn h_matrix(&self, k: usize) -> [[f64; 2]; 2] {
        let off = -self.e[k];
        [[-self.b[k], off], [off, -self.d[k]]]
    }

    fn dp(&self, f: &[f64]) -> Vec<f64> {
        grid_d_plus(f, self.np, self.nm, self.hp)
    }

    fn dm(&self, f: &[f64]) -> Vec<f64> {
        grid_d_minus(f, self.np, self.nm, self.hm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GcmpReport {
    /// `e₊ − ae − b₋`, `e₋ − ce − d₊`, and the larger of `c₊ − (e²−bd)/w`,
    /// `a₋ − (e²−bd)/w`.
    pub identities: [f64; 3],
    /// `max |a − (ln w)₊|, |c − (ln w)₋|` with grid differences of `ln |w|`.
    pub log_w: f64,
    /// `max |e − m₁/(2r)|`.
    pub minimality: f64,
    pub h_symmetric: bool,
}

impl GcmpReport {
    pub fn max_identity(&self) -> f64 {
        self.identities.into_iter().fold(0.0, f64::max)
    }
}

pub fn gcmp_residuals(f: &CharFields) -> Result<GcmpReport> {
    let l = LaxFields::from_char(f)?;
    let (ep, em) = (l.dp(&l.e), l.dm(&l.e));
    let (bm, dp) = (l.dm(&l.b), l.dp(&l.d));
    let (cp, am) = (l.dp(&l.c), l.dm(&l.a));
    let lw: Vec<f64> = l.w.iter().map(|v| v.abs().ln()).collect();
    let (lwp, lwm) = (l.dp(&lw), l.dm(&lw));
    let mut r = GcmpReport { identities: [0.0; 3], log_w: 0.0, minimality: 0.0, h_symmetric: true };
    for k in 0..l.a.len() {
        let q = (l.e[k] * l.e[k] - l.b[k] * l.d[k]) / l.w[k];
        r.identities[0] = r.identities[0].max((ep[k] - l.a[k] * l.e[k] - bm[k]).abs());
        r.identities[1] = r.identities[1].max((em[k] - l.c[k] * l.e[k] - dp[k]).abs());
        r.identities[2] = r.identities[2].max((cp[k] - q).abs()).max((am[k] - q).abs());
        r.log_w = r.log_w.max((l.a[k] - lwp[k]).abs()).max((l.c[k] - lwm[k]).abs());
        r.minimality = r.minimality.max((l.e[k] - l.e_minimal[k]).abs());
        let h = l.h_matrix(k);
        r.h_symmetric &= h[0][1].to_bits() == h[1][0].to_bits();
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Zero curvature
// ---------------------------------------------------------------------------

/// The so(1,2) generators `T₁, T₂, T₀`.
pub fn generators() -> [DenseMatrix; 3] {
    let t1 = DenseMatrix::from_rows(&[vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]]);
    let t2 = DenseMatrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]]);
    let t0 = DenseMatrix::from_rows(&[vec![0.0, 0.0, 0.0], vec![0.0, 0.0, -1.0], vec![0.0, 1.0, 0.0]]);
    [t1, t2, t0]
}

fn commutator(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    mat_mul(a, b).sub(&mat_mul(b, a))
}

/// Largest deviation from `[T₁,T₂] = T₀`, `[T₂,T₀] = −T₁`, `[T₀,T₁] = −T₂`.
pub fn generator_relations() -> f64 {
    let [t1, t2, t0] = generators();
    [
        commutator(&t1, &t2).sub(&t0).max_abs(),
        commutator(&t2, &t0).sub(&t1.scale(-1.0)).max_abs(),
        commutator(&t0, &t1).sub(&t2.scale(-1.0)).max_abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCurvature {
    /// `max ‖A₋ − B₊ + [A,B]‖_F` in the 3×3 representation.
    pub so12: f64,
    /// The same in the 2×2 representation.
    pub sl2: f64,
    /// Largest Frobenius distance between the gauge-transported 2×2 pair
    /// and the `λ ≡ 1` pair, and between their residual matrices.
    pub gauge_transport: f64,
}

/// Residuals of the flatness condition for the spectral-parameter family
/// built with `λ(θ₊, θ₋) > 0`; derivatives by grid differences.
pub fn zero_curvature_residual(f: &CharFields, lambda: &dyn Fn(f64, f64) -> f64) -> Result<ZeroCurvature> {
    let l = LaxFields::from_char(f)?;
    let n = l.a.len();
    let lam: Vec<f64> = l.theta.iter().map(|&(p, m)| lambda(p, m)).collect();
    if let Some(v) = lam.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidArgument(format!("λ must be positive, found {v}")));
    }
    let (lp, lm) = (l.dp(&lam), l.dm(&lam));
    if l.w.iter().any(|w| *w <= 0.0) {
        return Err(Error::NullDegeneracy(l.w.iter().fold(f64::INFINITY, |m, v| m.min(*v))));
    }
    let [t1, t2, t0] = generators();
    let tplus = t1.sub(&t0);
    let tminus = t1.sub(&t0.scale(-1.0));
    let combo = |x: f64, p: &DenseMatrix, y: f64, q: &DenseMatrix, z: f64, r: &DenseMatrix| {
        DenseMatrix::from_fn(3, 3, |i, j| x * p[(i, j)] + y * q[(i, j)] + z * r[(i, j)])
    };
    let mut a3 = Vec::with_capacity(n);
    let mut b3 = Vec::with_capacity(n);
    let mut a2 = Vec::with_capacity(n);
    let mut b2 = Vec::with_capacity(n);
    let mut a2t = Vec::with_capacity(n);
    let mut b2t = Vec::with_capacity(n);
    let mut a2one = Vec::with_capacity(n);
    let mut b2one = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b, c, d, e, w) = (l.a[k], l.b[k], l.c[k], l.d[k], l.e[k], l.w[k]);
        let (lk, kp, km) = (lam[k], lp[k] / lam[k], lm[k] / lam[k]);
        let s = (2.0 * w).sqrt();
        a3.push(combo(lk * b / s, &tplus, 0.5 * a + kp, &t2, e / (lk * s), &tminus));
        b3.push(combo(lk * e / s, &tplus, -(0.5 * c - km), &t2, d / (lk * s), &tminus));
        let two = |m: [[f64; 2]; 2]| DenseMatrix::from_rows(&[m[0].to_vec(), m[1].to_vec()]);
        let ak = [[0.25 * a + 0.5 * kp, lk * b / s], [e / (lk * s), -0.25 * a - 0.5 * kp]];
        let bk = [[-0.25 * c + 0.5 * km, lk * e / s], [d / (lk * s), 0.25 * c - 0.5 * km]];
        // Remove the λ-derivative terms and conjugate by diag(√λ, 1/√λ).
        let gauge =
            |m: [[f64; 2]; 2], kk: f64| [[m[0][0] - 0.5 * kk, m[0][1] / lk], [m[1][0] * lk, m[1][1] + 0.5 * kk]];
        a2t.push(two(gauge(ak, kp)));
        b2t.push(two(gauge(bk, km)));
        a2.push(two(ak));
        b2.push(two(bk));
        a2one.push(two([[0.25 * a, b / s], [e / s, -0.25 * a]]));
        b2one.push(two([[-0.25 * c, e / s], [d / s, 0.25 * c]]));
    }
    let so12 = flatness(&l, &a3, &b3).iter().map(|m| m.frobenius()).fold(0.0, f64::max);
    let sl2 = flatness(&l, &a2, &b2).iter().map(|m| m.frobenius()).fold(0.0, f64::max);
    let rt = flatness(&l, &a2t, &b2t);
    let r1 = flatness(&l, &a2one, &b2one);
    let mut gauge_transport = 0.0f64;
    for k in 0..n {
        gauge_transport = gauge_transport
            .max(a2t[k].sub(&a2one[k]).frobenius())
            .max(b2t[k].sub(&b2one[k]).frobenius())
            .max(rt[k].sub(&r1[k]).frobenius());
    }
    Ok(ZeroCurvature { so12, sl2, gauge_transport })
}

/// `A₋ − B₊ + [A, B]` at every node.
fn flatness(l: &LaxFields, a: &[DenseMatrix], b: &[DenseMatrix]) -> Vec<DenseMatrix> {
    let dim = a[0].rows;
    let mut am = vec![DenseMatrix::zeros(dim, dim); a.len()];
    let mut bp = vec![DenseMatrix::zeros(dim, dim); a.len()];
    for i in 0..dim {
        for j in 0..dim {
            let fa: Vec<f64> = a.iter().map(|m| m[(i, j)]).collect();
            let fb: Vec<f64> = b.iter().map(|m| m[(i, j)]).collect();
            for (k, v) in l.dm(&fa).into_iter().enumerate() {
                am[k][(i, j)] = v;
            }
            for (k, v) in l.dp(&fb).into_iter().enumerate() {
                bp[k][(i, j)] = v;
            }
        }
    }
    (0..a.len()).map(|k| am[k].sub(&bp[k]).sub(&commutator(&b[k], &a[k]))).collect()
}
