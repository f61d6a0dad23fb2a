//! Minimality of two algebraic cones.
//!
//! * Stiefel cones: `k` mutually orthogonal vectors of equal length in Rⁿ,
//!   cut out of R^{nk} by the quadrics `u^{[ab]} = x_a·x_b` and
//!   `v^{(a)} = (|x_a|² − |x_{a+1}|²)/2`. A level set `W = 0` of several
//!   functions is minimal when `Tr(P ∂²W^{(A)}) = 0` for every `A`, where `P`
//!   projects onto the orthogonal complement of the gradients.
//! * Determinantal varieties: `p × q` matrices of rank `q − 1`, examined
//!   through explicit charts, normal frames and second fundamental forms.
//!
//! Flattening convention: column `c` of an `n × k` matrix occupies entries
//! `c·n .. (c+1)·n` of the flat vector.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::{mat_det, mat_inverse, mat_mul, DenseMatrix};

/// Constraint defect below which a Stiefel point counts as on the cone
/// (relative to `s²`).
pub const ON_MANIFOLD_TOL: f64 = 1e-10;

/// Relative singular-value ratio used for numerical rank.
pub const RANK_TOL: f64 = 1e-10;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Random element of O(n) from the QR factorization of a Gaussian matrix.
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> DenseMatrix {
    let qr = gaussian_matrix(n, n, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix column signs so the distribution is Haar.
    DenseMatrix::from_fn(n, n, |i, j| q[(i, j)] * r[(j, j)].signum())
}

// ---------------------------------------------------------------------------
// Stiefel cones
// ---------------------------------------------------------------------------

/// `k` vectors in Rⁿ, stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelPoint {
    pub n: usize,
    pub k: usize,
    pub columns: Vec<Vec<f64>>,
}

impl StiefelPoint {
    pub fn new(columns: Vec<Vec<f64>>) -> Result<Self> {
        let k = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if k < 2 || k > n {
            return Err(Error::InvalidArgument(format!("need 2 <= k <= n, got n = {n}, k = {k}")));
        }
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidArgument("columns differ in length".into()));
        }
        Ok(Self { n, k, columns })
    }

    /// Orthonormalized Gaussian frame scaled by `s`.
    pub fn random(n: usize, k: usize, s: f64, rng: &mut impl Rng) -> Result<Self> {
        if k < 2 || k > n {
            return Err(Error::InvalidArgument(format!("need 2 <= k <= n, got n = {n}, k = {k}")));
        }
        let q = gaussian_matrix(n, k, rng).qr().q();
        Self::new((0..k).map(|c| (0..n).map(|i| s * q[(i, c)]).collect()).collect())
    }

    /// `count` random cone points with `s ∈ [0.5, 2]`, fully determined by `seed`.
    pub fn sample(n: usize, k: usize, count: usize, seed: u64) -> Result<Vec<Self>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let s = rng.random_range(0.5..2.0);
                Self::random(n, k, s, &mut rng)
            })
            .collect()
    }

    pub fn flat(&self) -> Vec<f64> {
        self.columns.concat()
    }

    /// `s² = |x₁|²`.
    pub fn s2(&self) -> f64 {
        dot(&self.columns[0], &self.columns[0])
    }

    pub fn constraint_defect(&self) -> f64 {
        stiefel_constraints(self).values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn on_manifold(&self) -> bool {
        self.constraint_defect() <= ON_MANIFOLD_TOL * self.s2().max(1.0)
    }

    /// `X → R X` for an `n × n` matrix `R`.
    pub fn transformed(&self, r: &DenseMatrix) -> Self {
        Self { n: self.n, k: self.k, columns: self.columns.iter().map(|c| r.mat_vec(c)).collect() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { n: self.n, k: self.k, columns: self.columns.iter().map(|c| c.iter().map(|v| s * v).collect()).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintLabel {
    /// `x_a · x_b`, `a < b` (0-based).
    U(usize, usize),
    /// `(|x_a|² − |x_{a+1}|²)/2` (0-based).
    V(usize),
}

/// Constraint values, gradients and (constant) Hessians; `u` first, then `v`.
#[derive(Debug, Clone)]
pub struct Constraints {
    pub labels: Vec<ConstraintLabel>,
    pub values: Vec<f64>,
    pub gradients: Vec<Vec<f64>>,
    pub hessians: Vec<DenseMatrix>,
}

impl Constraints {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Gram matrix of the gradients.
    pub fn gram(&self) -> DenseMatrix {
        let m = self.len();
        DenseMatrix::from_fn(m, m, |a, b| dot(&self.gradients[a], &self.gradients[b]))
    }
}

/// Number of constraints `k(k+1)/2 − 1`.
pub fn constraint_count(k: usize) -> usize {
    k * (k + 1) / 2 - 1
}

pub fn stiefel_constraints(pt: &StiefelPoint) -> Constraints {
    let (n, k, x) = (pt.n, pt.k, &pt.columns);
    let dim = n * k;
    let mut out = Constraints { labels: vec![], values: vec![], gradients: vec![], hessians: vec![] };
    let block_pair = |h: &mut DenseMatrix, c: usize, d: usize, w: f64| {
        for i in 0..n {
            h[(c * n + i, d * n + i)] += w;
        }
    };
    for a in 0..k {
        for b in a + 1..k {
            let mut g = vec![0.0; dim];
            g[a * n..(a + 1) * n].copy_from_slice(&x[b]);
            g[b * n..(b + 1) * n].copy_from_slice(&x[a]);
            let mut h = DenseMatrix::zeros(dim, dim);
            block_pair(&mut h, a, b, 1.0);
            block_pair(&mut h, b, a, 1.0);
            out.labels.push(ConstraintLabel::U(a, b));
            out.values.push(dot(&x[a], &x[b]));
            out.gradients.push(g);
            out.hessians.push(h);
        }
    }
    for a in 0..k - 1 {
        let mut g = vec![0.0; dim];
        g[a * n..(a + 1) * n].copy_from_slice(&x[a]);
        for i in 0..n {
            g[(a + 1) * n + i] = -x[a + 1][i];
        }
        let mut h = DenseMatrix::zeros(dim, dim);
        block_pair(&mut h, a, a, 1.0);
        block_pair(&mut h, a + 1, a + 1, -1.0);
        out.labels.push(ConstraintLabel::V(a));
        out.values.push(0.5 * (dot(&x[a], &x[a]) - dot(&x[a + 1], &x[a + 1])));
        out.gradients.push(g);
        out.hessians.push(h);
    }
    out
}

/// `Q_{ab} = min(a, b)·k − a·b` for `a, b = 1..k−1`.
pub fn q_matrix(k: usize) -> DenseMatrix {
    DenseMatrix::from_fn(k - 1, k - 1, |i, j| {
        let (a, b) = ((i + 1) as f64, (j + 1) as f64);
        a.min(b) * k as f64 - a * b
    })
}

/// On-cone Gram matrix `s²·blockdiag(2I, tridiag(−1, 2, −1))`.
pub fn m_hat(k: usize, s2: f64) -> DenseMatrix {
    let nu = k * (k - 1) / 2;
    let m = constraint_count(k);
    DenseMatrix::from_fn(m, m, |i, j| {
        let v = if i < nu || j < nu {
            if i == j {
                2.0
            } else {
                0.0
            }
        } else if i == j {
            2.0
        } else if i.abs_diff(j) == 1 {
            -1.0
        } else {
            0.0
        };
        s2 * v
    })
}

/// Closed-form inverse `(1/(k s²))·blockdiag((k/2) I, Q)`.
pub fn m_hat_inverse(k: usize, s2: f64) -> DenseMatrix {
    let nu = k * (k - 1) / 2;
    let q = q_matrix(k);
    let m = constraint_count(k);
    let c = 1.0 / (k as f64 * s2);
    DenseMatrix::from_fn(m, m, |i, j| {
        if i < nu || j < nu {
            if i == j {
                0.5 / s2
            } else {
                0.0
            }
        } else {
            c * q[(i - nu, j - nu)]
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversePath {
    /// `M̂⁻¹` from the `Q` formula; valid on the cone only.
    ClosedForm,
    /// Generic elimination on the actual Gram matrix.
    Numeric,
}

#[derive(Debug, Clone)]
pub struct Projector {
    pub p: DenseMatrix,
    pub m: DenseMatrix,
    pub m_inv: DenseMatrix,
    pub path: InversePath,
}

/// `P = I − ∇W M⁻¹ ∇Wᵀ`, closed-form inverse on the cone and numeric off it.
pub fn stiefel_projector(pt: &StiefelPoint) -> Result<Projector> {
    let path = if pt.on_manifold() { InversePath::ClosedForm } else { InversePath::Numeric };
    stiefel_projector_with(pt, path)
}

pub fn stiefel_projector_with(pt: &StiefelPoint, path: InversePath) -> Result<Projector> {
    let cons = stiefel_constraints(pt);
    let m = cons.gram();
    let m_inv = match path {
        InversePath::ClosedForm => {
            if !pt.on_manifold() {
                return Err(Error::OffSurface(pt.constraint_defect()));
            }
            m_hat_inverse(pt.k, pt.s2())
        }
        InversePath::Numeric => mat_inverse(&m)?,
    };
    let dim = pt.n * pt.k;
    let grads = DenseMatrix::from_fn(dim, cons.len(), |i, a| cons.gradients[a][i]);
    let corr = mat_mul(&mat_mul(&grads, &m_inv), &grads.transpose());
    let p = DenseMatrix::identity(dim).sub(&corr);
    Ok(Projector { p, m, m_inv, path })
}

#[derive(Debug, Clone)]
pub struct ProjectorReport {
    pub labels: Vec<ConstraintLabel>,
    /// `Tr(P ∂²W^{(A)})` per constraint.
    pub residuals: Vec<f64>,
    /// `‖P² − P‖_max`.
    pub idempotency: f64,
    /// `max_A ‖P ∇W^{(A)}‖ / ‖∇W^{(A)}‖`.
    pub annihilation: f64,
    /// `‖P − Pᵀ‖_max`.
    pub symmetry: f64,
    pub trace: f64,
    pub constraint_defect: f64,
}

impl ProjectorReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_defect(&self) -> f64 {
        self.idempotency.max(self.annihilation).max(self.symmetry)
    }

    pub fn is_minimal(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

/// The minimality traces at an on-cone point; off the cone the defect is
/// returned as `OffSurface`.
pub fn stiefel_minimality(pt: &StiefelPoint) -> Result<ProjectorReport> {
    let defect = pt.constraint_defect();
    if !pt.on_manifold() {
        return Err(Error::OffSurface(defect));
    }
    let proj = stiefel_projector_with(pt, InversePath::ClosedForm)?;
    let cons = stiefel_constraints(pt);
    let p = &proj.p;
    let dim = p.rows;
    let residuals = cons
        .hessians
        .iter()
        .map(|h| (0..dim).map(|i| (0..dim).map(|j| p[(i, j)] * h[(j, i)]).sum::<f64>()).sum())
        .collect();
    let annihilation = cons
        .gradients
        .iter()
        .map(|g| {
            let pg = p.mat_vec(g);
            dot(&pg, &pg).sqrt() / dot(g, g).sqrt()
        })
        .fold(0.0, f64::max);
    Ok(ProjectorReport {
        labels: cons.labels,
        residuals,
        idempotency: mat_mul(p, p).sub(p).max_abs(),
        annihilation,
        symmetry: p.sub(&p.transpose()).max_abs(),
        trace: p.trace(),
        constraint_defect: defect,
    })
}

// ---------------------------------------------------------------------------
// Determinantal varieties
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum DetVarChart {
    /// Columns `a_1 .. a_{q−1}` free, last column `Σ λ_j a_j`.
    Lambda { a: Vec<Vec<f64>>, lambda: Vec<f64> },
    /// `A = σ u vᵀ` with `u(θ, φ) ∈ S²`, `v = (cos ψ, sin ψ)`; `p = 3`, `q = 2`.
    Svd { sigma: f64, theta: f64, phi: f64, psi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetVarPoint {
    pub p: usize,
    pub q: usize,
    pub chart: DetVarChart,
}

impl DetVarPoint {
    pub fn lambda(a: Vec<Vec<f64>>, lambda: Vec<f64>) -> Result<Self> {
        let q = a.len() + 1;
        let p = a.first().map_or(0, Vec::len);
        if q < 2 || p <= q || lambda.len() != q - 1 || a.iter().any(|v| v.len() != p) {
            return Err(Error::InvalidArgument(format!("bad λ-chart shape: p = {p}, q = {q}, {} λ", lambda.len())));
        }
        Ok(Self { p, q, chart: DetVarChart::Lambda { a, lambda } })
    }

    pub fn svd(sigma: f64, theta: f64, phi: f64, psi: f64) -> Self {
        Self { p: 3, q: 2, chart: DetVarChart::Svd { sigma, theta, phi, psi } }
    }

    /// Gaussian λ-chart point.
    pub fn random_lambda(p: usize, q: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut g = || rng.sample::<f64, _>(StandardNormal);
        let a = (0..q.saturating_sub(1)).map(|_| (0..p).map(|_| g()).collect()).collect();
        let lambda = (0..q.saturating_sub(1)).map(|_| g()).collect();
        Self::lambda(a, lambda)
    }

    /// SVD-chart point away from the coordinate poles.
    pub fn random_svd(rng: &mut impl Rng) -> Self {
        Self::svd(
            rng.random_range(0.3..3.0),
            rng.random_range(0.2..std::f64::consts::PI - 0.2),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
        )
    }

    /// Chart dimension `(p + 1)(q − 1)`.
    pub fn dim(&self) -> usize {
        (self.p + 1) * (self.q - 1)
    }

    /// The `p × q` matrix.
    pub fn matrix(&self) -> DenseMatrix {
        let x = self.embedding();
        DenseMatrix::from_fn(self.p, self.q, |i, j| x[j * self.p + i])
    }

    pub fn embedding(&self) -> Vec<f64> {
        match &self.chart {
            DetVarChart::Lambda { a, lambda } => {
                let mut x = a.concat();
                x.extend((0..self.p).map(|i| lambda.iter().zip(a).map(|(l, v)| l * v[i]).sum::<f64>()));
                x
            }
            &DetVarChart::Svd { sigma, theta, phi, psi } => {
                let u = sphere_point(theta, phi);
                let mut x: Vec<f64> = u.iter().map(|v| sigma * psi.cos() * v).collect();
                x.extend(u.iter().map(|v| sigma * psi.sin() * v));
                x
            }
        }
    }

    /// Numerical rank of the matrix with relative threshold [`RANK_TOL`].
    pub fn rank(&self) -> usize {
        numerical_rank(&self.matrix())
    }
}

pub fn numerical_rank(m: &DenseMatrix) -> usize {
    let sv = DMatrix::from_row_slice(m.rows, m.cols, &m.entries).singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

fn sphere_point(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Embedding with its first and second parameter derivatives.
#[derive(Debug, Clone)]
pub struct ChartJet {
    pub x: Vec<f64>,
    /// `∂_A x`.
    pub tangents: Vec<Vec<f64>>,
    /// `∂_A ∂_B x`, symmetric in `A, B`.
    pub second: Vec<Vec<Vec<f64>>>,
}

impl ChartJet {
    pub fn metric(&self) -> DenseMatrix {
        let d = self.tangents.len();
        DenseMatrix::from_fn(d, d, |a, b| dot(&self.tangents[a], &self.tangents[b]))
    }

    /// `H_{AB} = n · ∂_A ∂_B x`.
    pub fn second_form(&self, normal: &[f64]) -> DenseMatrix {
        let d = self.tangents.len();
        DenseMatrix::from_fn(d, d, |a, b| dot(normal, &self.second[a][b]))
    }

    /// `G^{AB} H_{AB}` for each normal.
    pub fn mean_curvature_traces(&self, g_inv: &DenseMatrix, normals: &[Vec<f64>]) -> Vec<f64> {
        normals
            .iter()
            .map(|nv| {
                let h = self.second_form(nv);
                h.entries.iter().zip(&g_inv.entries).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Orthonormal completion of the tangent space.
    pub fn normal_frame(&self) -> Result<Vec<Vec<f64>>> {
        let basis = gram_schmidt(&self.tangents);
        if basis.len() < self.tangents.len() {
            return Err(Error::Degenerate);
        }
        Ok(complete_basis(&basis, self.x.len()))
    }
}

/// Orthonormalizes `vs`, dropping vectors that are numerically dependent.
fn gram_schmidt(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let scale = vs.iter().map(|v| dot(v, v).sqrt()).fold(0.0, f64::max);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        // Two passes for stability.
        for _ in 0..2 {
            for e in &out {
                let c = dot(&w, e);
                w.iter_mut().zip(e).for_each(|(wi, ei)| *wi -= c * ei);
            }
        }
        let norm = dot(&w, &w).sqrt();
        if norm > 1e-10 * scale.max(1e-300) {
            out.push(w.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

/// Orthonormal vectors spanning the complement of `basis` in R^dim,
/// drawn from the coordinate axes with largest residual first.
fn complete_basis(basis: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut span = basis.to_vec();
    let mut extra = Vec::new();
    while span.len() < dim {
        let residual = |i: usize| 1.0 - span.iter().map(|e| e[i] * e[i]).sum::<f64>();
        let pivot = (0..dim).max_by(|&a, &b| residual(a).total_cmp(&residual(b))).unwrap();
        let mut axis = vec![0.0; dim];
        axis[pivot] = 1.0;
        let before = span.len();
        span = gram_schmidt(&[span.clone(), vec![axis]].concat());
        if span.len() == before {
            break;
        }
        extra.push(span[span.len() - 1].clone());
    }
    extra
}

/// Embedding, tangents and second derivatives in the chart of `pt`.
pub fn detvar_chart(pt: &DetVarPoint) -> Result<ChartJet> {
    let (p, q) = (pt.p, pt.q);
    let big = p * q;
    match &pt.chart {
        DetVarChart::Lambda { a, lambda } => {
            let ga = DenseMatrix::from_fn(q - 1, q - 1, |i, j| dot(&a[i], &a[j]));
            let scale = (0..q - 1).map(|i| ga[(i, i)]).product::<f64>();
            if !(mat_det(&ga) > 1e-12 * scale) {
                return Err(Error::DegenerateChart("a-vectors are linearly dependent".into()));
            }
            let d = pt.dim();
            let last = (q - 1) * p;
            let mut tangents = Vec::with_capacity(d);
            for j in 0..q - 1 {
                for i in 0..p {
                    let mut t = vec![0.0; big];
                    t[j * p + i] = 1.0;
                    t[last + i] = lambda[j];
                    tangents.push(t);
                }
            }
            for j in 0..q - 1 {
                let mut t = vec![0.0; big];
                t[last..].copy_from_slice(&a[j]);
                tangents.push(t);
            }
            let mut second = vec![vec![vec![0.0; big]; d]; d];
            for j in 0..q - 1 {
                for i in 0..p {
                    let (ai, lj) = (j * p + i, (q - 1) * p + j);
                    second[ai][lj][last + i] = 1.0;
                    second[lj][ai][last + i] = 1.0;
                }
            }
            Ok(ChartJet { x: pt.embedding(), tangents, second })
        }
        &DetVarChart::Svd { sigma, theta, phi, psi } => {
            if !(sigma > 0.0) {
                return Err(Error::DegenerateChart(format!("σ = {sigma} must be positive")));
            }
            if theta.sin().abs() < 1e-8 {
                return Err(Error::DegenerateChart("θ at a coordinate pole".into()));
            }
            let (st, ct, sp, cp) = (theta.sin(), theta.cos(), phi.sin(), phi.cos());
            // Derivatives of u(θ, φ), indexed [θ, φ].
            let u = [st * cp, st * sp, ct];
            let du = [[ct * cp, ct * sp, -st], [-st * sp, st * cp, 0.0]];
            let d2u = [
                [[-st * cp, -st * sp, -ct], [-ct * sp, ct * cp, 0.0]],
                [[-ct * sp, ct * cp, 0.0], [-st * cp, -st * sp, 0.0]],
            ];
            let v = [psi.cos(), psi.sin()];
            let dv = [-psi.sin(), psi.cos()];
            let outer = |w: [f64; 2], y: [f64; 3], c: f64| -> Vec<f64> {
                let mut x = Vec::with_capacity(6);
                for wk in w {
                    x.extend(y.iter().map(|yi| c * wk * yi));
                }
                x
            };
            // Parameters (σ, θ, φ, ψ).
            let tangents = vec![outer(v, u, 1.0), outer(v, du[0], sigma), outer(v, du[1], sigma), outer(dv, u, sigma)];
            let mut second = vec![vec![vec![0.0; 6]; 4]; 4];
            let mut put = |a: usize, b: usize, val: Vec<f64>| {
                second[a][b] = val.clone();
                second[b][a] = val;
            };
            put(1, 0, outer(v, du[0], 1.0));
            put(2, 0, outer(v, du[1], 1.0));
            put(3, 0, outer(dv, u, 1.0));
            put(1, 1, outer(v, d2u[0][0], sigma));
            put(1, 2, outer(v, d2u[0][1], sigma));
            put(2, 2, outer(v, d2u[1][1], sigma));
            put(1, 3, outer(dv, du[0], sigma));
            put(2, 3, outer(dv, du[1], sigma));
            put(3, 3, outer(v, u, -sigma));
            Ok(ChartJet { x: pt.embedding(), tangents, second })
        }
    }
}

/// Inverse of the bordered symmetric matrix `[[G, b], [bᵀ, c]]` from `G⁻¹`.
pub fn bordered_inverse(g_inv: &DenseMatrix, b: &[f64], c: f64) -> Result<DenseMatrix> {
    let n = g_inv.rows;
    let gb = g_inv.mat_vec(b);
    let schur = c - dot(b, &gb);
    if !(schur.abs() > 1e-14 * c.abs().max(1e-300)) {
        return Err(Error::Singular);
    }
    let rho = 1.0 / schur;
    Ok(DenseMatrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
        (true, true) => g_inv[(i, j)] + rho * gb[i] * gb[j],
        (true, false) => -rho * gb[i],
        (false, true) => -rho * gb[j],
        (false, false) => rho,
    }))
}

/// Inverse metric of the λ-chart: the `a`-block `(I + λλᵀ) ⊗ I_p` is
/// inverted in closed form, then bordered once per `λ` direction.
pub fn lambda_metric_inverse(pt: &DetVarPoint, jet: &ChartJet) -> Result<DenseMatrix> {
    let DetVarChart::Lambda { lambda, .. } = &pt.chart else {
        return Err(Error::InvalidArgument("λ-chart required".into()));
    };
    let (p, m) = (pt.p, lambda.len());
    let mu2 = 1.0 + dot(lambda, lambda);
    let mut inv = DenseMatrix::from_fn(p * m, p * m, |r, c| {
        if r % p != c % p {
            return 0.0;
        }
        let (j, l) = (r / p, c / p);
        let delta = if j == l { 1.0 } else { 0.0 };
        delta - lambda[j] * lambda[l] / mu2
    });
    let g = jet.metric();
    for s in 0..m {
        let col = p * m + s;
        let b: Vec<f64> = (0..col).map(|r| g[(r, col)]).collect();
        inv = bordered_inverse(&inv, &b, g[(col, col)])?;
    }
    Ok(inv)
}

/// Normal frame of the chart: `(λ_1 e, …, λ_{q−1} e, −e)/μ` for an
/// orthonormal basis `e` of the complement of the `a`-vectors, or the
/// `θ`/`φ` normals of the SVD chart.
pub fn detvar_normals(pt: &DetVarPoint) -> Result<Vec<Vec<f64>>> {
    match &pt.chart {
        DetVarChart::Lambda { a, lambda } => {
            let span = gram_schmidt(a);
            if span.len() < a.len() {
                return Err(Error::DegenerateChart("a-vectors are linearly dependent".into()));
            }
            let mu = (1.0 + dot(lambda, lambda)).sqrt();
            Ok(complete_basis(&span, pt.p)
                .into_iter()
                .map(|e| {
                    let mut nv: Vec<f64> = lambda.iter().flat_map(|l| e.iter().map(move |ei| l * ei / mu)).collect();
                    nv.extend(e.iter().map(|ei| -ei / mu));
                    nv
                })
                .collect())
        }
        &DetVarChart::Svd { theta, phi, psi, .. } => {
            let (st, ct, sp, cp) = (theta.sin(), theta.cos(), phi.sin(), phi.cos());
            let e_theta = [ct * cp, ct * sp, -st];
            let e_phi = [-sp, cp, 0.0];
            let (s, c) = (psi.sin(), psi.cos());
            let build = |e: [f64; 3]| -> Vec<f64> {
                let mut nv: Vec<f64> = e.iter().map(|x| -s * x).collect();
                nv.extend(e.iter().map(|x| c * x));
                nv
            };
            Ok(vec![build(e_theta), build(e_phi)])
        }
    }
}

#[derive(Debug, Clone)]
pub struct DetVarCurvature {
    /// `G^{AB} H_{AB}` per normal.
    pub traces: Vec<f64>,
    /// `max |n_α · n_β − δ_αβ|` and `max |n · ∂_A x|` (relative).
    pub frame_defect: f64,
    /// `‖G⁻¹ G − I‖_max` for the inverse actually used.
    pub inverse_defect: f64,
}

impl DetVarCurvature {
    pub fn max_trace(&self) -> f64 {
        self.traces.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn detvar_mean_curvature(pt: &DetVarPoint) -> Result<DetVarCurvature> {
    let jet = detvar_chart(pt)?;
    let normals = detvar_normals(pt)?;
    let g = jet.metric();
    let g_inv = match pt.chart {
        DetVarChart::Lambda { .. } => lambda_metric_inverse(pt, &jet)?,
        DetVarChart::Svd { .. } => mat_inverse(&g)?,
    };
    let mut frame_defect = 0.0f64;
    for (i, a) in normals.iter().enumerate() {
        for (j, b) in normals.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            frame_defect = frame_defect.max((dot(a, b) - want).abs());
        }
        for t in &jet.tangents {
            frame_defect = frame_defect.max(dot(a, t).abs() / dot(t, t).sqrt());
        }
    }
    let inverse_defect = mat_mul(&g_inv, &g).sub(&DenseMatrix::identity(g.rows)).max_abs();
    Ok(DetVarCurvature { traces: jet.mean_curvature_traces(&g_inv, &normals), frame_defect, inverse_defect })
}

/// Direct Gram determinant of the λ-chart tangents and the closed form
/// `(1 + Σλ²)^{p−q+1}·det(a_iᵀ a_j)`.
pub fn detvar_det_formula(pt: &DetVarPoint) -> Result<(f64, f64)> {
    let DetVarChart::Lambda { a, lambda } = &pt.chart else {
        return Err(Error::InvalidArgument("λ-chart required".into()));
    };
    let jet = detvar_chart(pt)?;
    let lhs = mat_det(&jet.metric());
    let ga = DenseMatrix::from_fn(a.len(), a.len(), |i, j| dot(&a[i], &a[j]));
    let rhs = (1.0 + dot(lambda, lambda)).powi((pt.p - pt.q + 1) as i32) * mat_det(&ga);
    Ok((lhs, rhs))
}

/// Re-expresses a rank-deficient `p × q` matrix in the λ-chart, taking the
/// first `q − 1` columns as free.
pub fn refit_lambda(m: &DenseMatrix) -> Result<DetVarPoint> {
    let (p, q) = (m.rows, m.cols);
    let a: Vec<Vec<f64>> = (0..q - 1).map(|j| (0..p).map(|i| m[(i, j)]).collect()).collect();
    let last: Vec<f64> = (0..p).map(|i| m[(i, q - 1)]).collect();
    let ga = DenseMatrix::from_fn(q - 1, q - 1, |i, j| dot(&a[i], &a[j]));
    let rhs: Vec<f64> = a.iter().map(|v| dot(v, &last)).collect();
    let lambda =
        mat_inverse(&ga).map_err(|_| Error::DegenerateChart("leading columns are dependent".into()))?.mat_vec(&rhs);
    DetVarPoint::lambda(a, lambda)
}

/// Re-expresses a rank-one `3 × 2` matrix in the SVD chart.
pub fn refit_svd(m: &DenseMatrix) -> Result<DetVarPoint> {
    if (m.rows, m.cols) != (3, 2) {
        return Err(Error::InvalidArgument("SVD chart needs a 3 × 2 matrix".into()));
    }
    if numerical_rank(m) != 1 {
        return Err(Error::DegenerateChart("matrix is not of rank one".into()));
    }
    let svd = DMatrix::from_row_slice(3, 2, &m.entries).svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let k = svd.singular_values.imax();
    let sigma = svd.singular_values[k];
    let uk = [u[(0, k)], u[(1, k)], u[(2, k)]];
    let theta = uk[2].clamp(-1.0, 1.0).acos();
    let phi = uk[1].atan2(uk[0]);
    let psi = vt[(k, 1)].atan2(vt[(k, 0)]);
    Ok(DetVarPoint::svd(sigma, theta, phi, psi))
}
