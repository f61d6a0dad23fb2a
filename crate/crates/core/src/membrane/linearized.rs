//! Small perturbations of the static catenoid: `ε̈ + Dε = 0` with
//! `D = −sech²z (∂² − 2 tanh z ∂ + 1)` on a truncated interval.

use super::{fd4_derivative, fd4_second_derivative};
use crate::error::{Error, Result};
use crate::numerics::GridFunction;
use crate::soliton_spectrum::ground_state_d;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRun {
    pub times: Vec<f64>,
    /// `ε(t, z*)` at the node nearest `z = 0`.
    pub center: Vec<f64>,
    /// Discrete L² norm at each step.
    pub norm: Vec<f64>,
    pub final_state: GridFunction,
    pub final_velocity: GridFunction,
}

fn apply_d(z: &[f64], e: &[f64], h: f64) -> Vec<f64> {
    let (d1, d2) = (fd4_derivative(e, h), fd4_second_derivative(e, h));
    (0..e.len())
        .map(|i| {
            let s = 1.0 / z[i].cosh();
            -s * s * (d2[i] - 2.0 * z[i].tanh() * d1[i] + e[i])
        })
        .collect()
}

/// Evolves from rest.
pub fn linearized_catenoid_mode(eps0: &GridFunction, dt: f64, steps: usize) -> Result<LinearRun> {
    let zero = GridFunction { samples: vec![0.0; eps0.len()], ..eps0.clone() };
    linearized_catenoid_mode_with_velocity(eps0, &zero, dt, steps)
}

/// RK4 evolution; the end nodes move with their initial velocity.
pub fn linearized_catenoid_mode_with_velocity(
    eps0: &GridFunction,
    deps0: &GridFunction,
    dt: f64,
    steps: usize,
) -> Result<LinearRun> {
    let n = eps0.len();
    if eps0.periodic || n < 8 || deps0.len() != n {
        return Err(Error::InvalidArgument("need matching bounded grids with at least 8 nodes".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let h = eps0.dx;
    let z = eps0.xs();
    let mid = (0..n).min_by(|&a, &b| z[a].abs().total_cmp(&z[b].abs())).unwrap_or(0);
    let field = |e: &[f64], v: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let mut a: Vec<f64> = apply_d(&z, e, h).into_iter().map(|x| -x).collect();
        a[0] = 0.0;
        a[n - 1] = 0.0;
        (v.to_vec(), a)
    };
    let norm = |e: &[f64]| (e.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
    let (mut e, mut v) = (eps0.samples.clone(), deps0.samples.clone());
    let mut run = LinearRun {
        times: vec![0.0],
        center: vec![e[mid]],
        norm: vec![norm(&e)],
        final_state: eps0.clone(),
        final_velocity: deps0.clone(),
    };
    let add = |x: &[f64], k: &[f64], s: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    for step in 1..=steps {
        let (k1e, k1v) = field(&e, &v);
        let (k2e, k2v) = field(&add(&e, &k1e, 0.5 * dt), &add(&v, &k1v, 0.5 * dt));
        let (k3e, k3v) = field(&add(&e, &k2e, 0.5 * dt), &add(&v, &k2v, 0.5 * dt));
        let (k4e, k4v) = field(&add(&e, &k3e, dt), &add(&v, &k3v, dt));
        for i in 0..n {
            e[i] += dt / 6.0 * (k1e[i] + 2.0 * k2e[i] + 2.0 * k3e[i] + k4e[i]);
            v[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        if e.iter().any(|x| !x.is_finite()) {
            return Err(Error::Blowup { t: step as f64 * dt });
        }
        run.times.push(step as f64 * dt);
        run.center.push(e[mid]);
        run.norm.push(norm(&e));
    }
    run.final_state.samples = e;
    run.final_velocity.samples = v;
    Ok(run)
}

/// The unstable mode of `D` on `[−z_max, z_max]`, mapped back from the
/// conjugate operator in `y = sinh z`: `ε(z) = (1 + y²)^{1/4} g(y)`.
/// Returns the profile (peak value 1) and the eigenvalue `E* < 0`.
pub fn unstable_mode(z_max: f64, n: usize) -> Result<(GridFunction, f64)> {
    let truncation = 40.0f64.max(z_max.sinh() + 1.0);
    let g = ground_state_d(truncation)?;
    let raw = GridFunction::from_fn(-z_max, z_max, n, |z| {
        let y = z.sinh();
        (1.0 + y * y).powf(0.25) * g.eigenfunction.eval(y)
    });
    let peak = raw.samples.iter().fold(0.0f64, |m, v| if v.abs() > m.abs() { *v } else { m });
    let samples = raw.samples.iter().map(|v| v / peak).collect();
    Ok((GridFunction { samples, ..raw }, g.eigenvalue))
}

/// Rate κ with `A(T) = A(0) cosh(κT)` from the first and last samples.
pub fn cosh_growth_rate(times: &[f64], amplitude: &[f64]) -> Option<f64> {
    let (t, a0, a1) = (*times.last()?, *amplitude.first()?, *amplitude.last()?);
    let ratio = a1 / a0;
    (t > 0.0 && ratio >= 1.0).then(|| ratio.acosh() / t)
}
