//! Soap film spanning two coaxial rings of radius `r` at distance `d`.
//!
//! With `w = d/2a` the profile `a cosh(z/a)` meets the rings iff
//! `cosh w / w = ρ`, `ρ = 2r/d`. Areas are reported in units of `πd²/2`,
//! lengths in units of `d`. Stability is decided by the lowest Dirichlet
//! eigenvalue of `J = -∂² - 2 sech² v` on `[-w, w]`.

use crate::error::{Error, Result};
use crate::numerics::{find_root, quad, sl_eigen, GridFunction, SLProblem};

/// Width of the band around `ρ̄` treated as the tangency case.
pub const CRITICAL_BAND: f64 = 1e-10;

/// Grid intervals for the Jacobi eigenproblem.
pub const JACOBI_POINTS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingProblem {
    pub rho: f64,
}

impl RingProblem {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::InvalidArgument(format!("rho must be positive, got {rho}")));
        }
        Ok(Self { rho })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Outer,
    Inner,
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatenoidBranch {
    pub w: f64,
    pub a_over_d: f64,
    pub area_coeff: f64,
    pub branch: Branch,
}

impl CatenoidBranch {
    pub fn new(w: f64, branch: Branch) -> Self {
        Self { w, a_over_d: 0.5 / w, area_coeff: area_coeff(w), branch }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub lowest_eigenvalue: f64,
    pub eigenfunction: GridFunction,
    pub stable: bool,
    /// Set for the tangency case, where the lowest eigenvalue is zero.
    pub note: Option<&'static str>,
}

/// `A(w) / (πd²/2) = 1/w + sinh(2w)/(2w²)`.
pub fn area_coeff(w: f64) -> f64 {
    1.0 / w + (2.0 * w).sinh() / (2.0 * w * w)
}

/// Jacobi potential `-2 sech² v`.
pub fn jacobi_potential(v: f64) -> f64 {
    -2.0 / v.cosh().powi(2)
}

/// `(w0, ρ̄)` with `w0 tanh w0 = 1` and `ρ̄ = cosh w0 / w0`.
pub fn critical_ratio() -> (f64, f64) {
    let w0 = find_root(|w| w * w.tanh() - 1.0, 1.0, 2.0, 1e-15).expect("bracket [1,2] is valid");
    (w0, w0.cosh() / w0)
}

/// Solutions of `cosh w = ρ w`, ordered outer (small `w`) first.
pub fn solve_branches(p: RingProblem) -> Vec<CatenoidBranch> {
    let (w0, rho_bar) = critical_ratio();
    if (p.rho - rho_bar).abs() <= CRITICAL_BAND {
        return vec![CatenoidBranch::new(w0, Branch::Critical)];
    }
    if p.rho < rho_bar {
        return Vec::new();
    }
    let g = |w: f64| w.cosh() - p.rho * w;
    // g > 0 near 0 and for large w, g(w0) < 0.
    let mut lo = w0;
    while g(lo) < 0.0 {
        lo *= 0.5;
    }
    let mut hi = w0;
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    let w1 = find_root(g, lo, w0, 1e-15).expect("outer bracket");
    let w2 = find_root(g, w0, hi, 1e-15).expect("inner bracket");
    vec![CatenoidBranch::new(w1, Branch::Outer), CatenoidBranch::new(w2, Branch::Inner)]
}

/// Area comparison between two branches of one ring problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaComparison {
    /// `A₂ - A₁` in units of `πd²/2`.
    pub delta_area: f64,
    /// `sinh Δw - Δw`.
    pub witness: f64,
    /// `witness / (w₁ w₂)`, which equals `delta_area` analytically.
    pub witness_scaled: f64,
}

pub fn compare_areas(b1: &CatenoidBranch, b2: &CatenoidBranch) -> AreaComparison {
    let dw = b2.w - b1.w;
    let witness = dw.sinh() - dw;
    AreaComparison { delta_area: b2.area_coeff - b1.area_coeff, witness, witness_scaled: witness / (b1.w * b2.w) }
}

/// Lowest Dirichlet eigenpair of `J` on `[-w, w]`.
pub fn jacobi_ground_state(w: f64) -> Result<crate::numerics::EigenResult> {
    let prob = SLProblem::dirichlet(jacobi_potential, -w, w).with_points(JACOBI_POINTS);
    sl_eigen(&prob, 0, 1e-14)
}

pub fn stability(b: &CatenoidBranch) -> Result<StabilityReport> {
    let eig = jacobi_ground_state(b.w)?;
    let critical = b.branch == Branch::Critical;
    Ok(StabilityReport {
        lowest_eigenvalue: eig.eigenvalue,
        eigenfunction: eig.eigenfunction,
        stable: !critical && eig.eigenvalue > 0.0,
        note: critical.then_some("marginal: lowest eigenvalue vanishes"),
    })
}

/// `ψ_k(v) = cosh kv - tanh v · sinh kv / k`.
pub fn psi_k(k: f64, v: f64) -> f64 {
    if k == 0.0 {
        1.0 - v * v.tanh()
    } else {
        (k * v).cosh() - v.tanh() * (k * v).sinh() / k
    }
}

/// Unstable mode of the inner catenoid with half-width `w2 > w0`.
///
/// Returns the smallest `k > 0` with `ψ_k(±w2) = 0` and the mode on
/// `[-w2, w2]`; its eigenvalue is `-k²`.
pub fn instability_mode(w2: f64) -> Result<(f64, GridFunction)> {
    let (w0, _) = critical_ratio();
    if !(w2 > w0) {
        return Err(Error::NoInstability(w2));
    }
    // ψ_k(w2) = 0  ⇔  tanh(k w2)/k = coth w2; the left side decreases in k.
    let h = |k: f64| (k * w2).tanh() / k - 1.0 / w2.tanh();
    let k = find_root(h, 1e-9, w2.tanh(), 1e-15)?;
    let mode = GridFunction::from_fn(-w2, w2, JACOBI_POINTS + 1, |v| psi_k(k, v));
    Ok((k, mode))
}

/// The closed-form eigenvalue of the perturbed critical problem and the
/// first-order boundary-perturbation value, for `w = w0 + eps`.
pub fn perturbative_eigenvalue(eps: f64) -> Result<(f64, f64)> {
    let (w0, _) = critical_ratio();
    let we = w0 + eps;
    let t = we * we.tanh();
    let exact = -6.0 * (t - 1.0) / (we * we * (3.0 - t));
    // First-order formula: ε ∫ψ0² J' / ∫ψ0², J' = -4(1 - v tanh v)/(w0 cosh² v).
    let psi0 = |v: f64| 1.0 - v * v.tanh();
    let num = quad(|v| -4.0 * psi0(v).powi(3) / (w0 * v.cosh().powi(2)), 0.0, w0, 1e-14)?;
    let den = quad(|v| psi0(v).powi(2), 0.0, w0, 1e-14)?;
    Ok((exact, eps * num / den))
}

/// The integrals `J_n`, `K_n` (n = 0..3) over `[0, w0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentIdentity {
    pub j: [f64; 4],
    pub k: [f64; 4],
    /// `(J₀ - 3J₁ + 3J₂ - J₃)·4/w0³`.
    pub ratio: f64,
    /// Defects of `J_n = tanh w0/(n+1) - n/(n+1)·(K_{n-1} - J_{n-1})`, n = 1..3.
    pub recursion_defects: [f64; 3],
}

pub fn jn_kn_identity() -> Result<MomentIdentity> {
    let (w0, _) = critical_ratio();
    let mut j = [0.0; 4];
    let mut k = [0.0; 4];
    for n in 0..4 {
        let p = n as i32;
        j[n] = quad(|v| (v * v.tanh()).powi(p) / v.cosh().powi(2), 0.0, w0, 1e-15)?;
        k[n] = quad(|v| (v * v.tanh()).powi(p), 0.0, w0, 1e-15)?;
    }
    let ratio = (j[0] - 3.0 * j[1] + 3.0 * j[2] - j[3]) * 4.0 / w0.powi(3);
    let mut recursion_defects = [0.0; 3];
    for n in 1..4 {
        let nf = n as f64;
        let rhs = w0.tanh() / (nf + 1.0) - nf / (nf + 1.0) * (k[n - 1] - j[n - 1]);
        recursion_defects[n - 1] = j[n] - rhs;
    }
    Ok(MomentIdentity { j, k, ratio, recursion_defects })
}

/// Area (units `πd²/2`) of the profile
/// `g(v) = cosh v · (1 + γ(1 - v tanh v))` over `[-w0, w0]`, minus the
/// critical catenoid area.
pub fn flat_direction_area(gamma: f64) -> Result<f64> {
    let (w0, _) = critical_ratio();
    let area = |g: f64| -> Result<f64> {
        let integrand = |v: f64| {
            let (c, s, t) = (v.cosh(), v.sinh(), v.tanh());
            let psi = 1.0 - v * t;
            let dpsi = -t - v / (c * c);
            let f = c * (1.0 + g * psi);
            let df = s * (1.0 + g * psi) + c * g * dpsi;
            f * (1.0 + df * df).sqrt()
        };
        Ok(2.0 * quad(integrand, 0.0, w0, 1e-15)? / (w0 * w0))
    };
    Ok(area(gamma)? - area(0.0)?)
}

/// `⟨φ, Jφ⟩ - (‖Lφ‖² - ‖φ‖²)` on `[-w, w]` with `L = ∂ + tanh`, for a test
/// function vanishing at `±w`.
pub fn factorization_defect(
    phi: impl Fn(f64) -> f64,
    dphi: impl Fn(f64) -> f64,
    d2phi: impl Fn(f64) -> f64,
    w: f64,
) -> Result<f64> {
    let jform = quad(|v| phi(v) * (-d2phi(v) + jacobi_potential(v) * phi(v)), -w, w, 1e-13)?;
    let lnorm = quad(|v| (dphi(v) + v.tanh() * phi(v)).powi(2), -w, w, 1e-13)?;
    let norm = quad(|v| phi(v).powi(2), -w, w, 1e-13)?;
    Ok(jform - (lnorm - norm))
}

/// One row of a ρ sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub rho: f64,
    pub branch: Branch,
    pub w: f64,
    pub area_coeff: f64,
    pub lowest_eigenvalue: f64,
    pub stable: bool,
}

pub fn sweep(rhos: &[f64]) -> Result<Vec<SweepRow>> {
    let mut out = Vec::new();
    for &rho in rhos {
        for b in solve_branches(RingProblem::new(rho)?) {
            let s = stability(&b)?;
            out.push(SweepRow {
                rho,
                branch: b.branch,
                w: b.w,
                area_coeff: b.area_coeff,
                lowest_eigenvalue: s.lowest_eigenvalue,
                stable: s.stable,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn area_coefficient_matches_ring_form() {
        // A_i = (1 + ρ sinh w_i)/w_i in the same units.
        for b in solve_branches(RingProblem::new(2.5).unwrap()) {
            assert!((b.area_coeff - (1.0 + 2.5 * b.w.sinh()) / b.w).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_branch_is_marginal() {
        let (w0, _) = critical_ratio();
        let s = stability(&CatenoidBranch::new(w0, Branch::Critical)).unwrap();
        assert!(!s.stable);
        assert!(s.note.is_some());
    }
}
