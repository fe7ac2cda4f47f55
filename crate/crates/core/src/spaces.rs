//! Norms on the disk side and the auxiliary functions used to bound them.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::measure::RadialMeasure;
use crate::spectral::{CoeffVector, GridFunction};

/// `‖u‖_{L²(𝕋)}` with the normalized measure `dθ/2π`, i.e. `(Σ |c_n|²)^{1/2}`.
pub fn l2_norm(u: &CoeffVector) -> f64 {
    u.as_slice().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `(1/M) Σ |g(θ_k)|`, the trapezoidal `L¹(dθ/2π)` norm.
///
/// For a trigonometric polynomial this is also its `h¹(𝔻)` norm, since the
/// sup over circles of radius `r < 1` is reached as `r → 1`.
pub fn l1_norm(g: &GridFunction) -> f64 {
    g.samples().iter().map(|c| c.norm()).sum::<f64>() / g.m() as f64
}

/// `‖u‖_{H_μ(𝕋)} = (2π Σ |c_n|² σ_|n|)^{1/2}`.
///
/// Equal to the `B²(𝔻, μ)` norm of the harmonic extension of `u`.
pub fn hmu_norm(u: &CoeffVector, mu: &RadialMeasure) -> f64 {
    hmu_norm_with(u, &mu.moments(u.n_max()))
}

/// [`hmu_norm`] with precomputed moments `σ_0..σ_N`.
pub fn hmu_norm_with(u: &CoeffVector, moments: &[f64]) -> f64 {
    let s: f64 = u
        .iter()
        .map(|(n, c)| c.norm_sqr() * moments[n.unsigned_abs() as usize])
        .sum();
    (2.0 * PI * s).sqrt()
}

/// `‖u‖_{A²(𝔻, μ)}` for analytic `u`; rejects any nonzero `c_n` with `n < 0`.
pub fn a2_norm(u: &CoeffVector, mu: &RadialMeasure) -> Result<f64> {
    if let Some((n, _)) = u.iter().find(|(n, c)| *n < 0 && c.norm_sqr() > 0.0) {
        return Err(Error::NotAnalytic(n));
    }
    Ok(hmu_norm(u, mu))
}

/// Samples of the bounded weight `w_σ` together with the Carleson verdict.
#[derive(Debug, Clone)]
pub struct WeightSamples {
    pub grid: GridFunction,
    /// False when `μ` fails the box test; `w_σ` is then expected unbounded
    /// and the samples only show its growth on the grid.
    pub bounded: bool,
}

/// `w_σ(e^{iθ}) = 2i ∫ r² sinθ / |r² - e^{-iθ}|² σ(dr)` on `m` nodes.
pub fn w_sigma(mu: &RadialMeasure, m: usize) -> WeightSamples {
    let bounded = mu.radial_carleson(&crate::measure::default_delta_grid()).is_carleson;
    let mut samples = vec![Complex64::new(0.0, 0.0); m];
    // w_σ is odd in θ: w(2π - θ) = -w(θ).
    for k in 1..=m / 2 {
        if 2 * k == m {
            // θ = π, where sinθ vanishes exactly
            continue;
        }
        let theta = 2.0 * PI * k as f64 / m as f64;
        let v = w_sigma_at(mu, theta);
        samples[k] = v;
        if m - k != k {
            samples[m - k] = -v;
        }
    }
    WeightSamples { grid: GridFunction::new(samples), bounded }
}

/// `w_σ(e^{iθ})` at a single angle.
pub fn w_sigma_at(mu: &RadialMeasure, theta: f64) -> Complex64 {
    let s = theta.sin();
    if s == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let one_minus_c = 2.0 * (0.5 * theta).sin().powi(2);
    let integral = mu.integrate_peaked(
        |r| {
            let r2 = r * r;
            // |r² - e^{-iθ}|² = (1 - r²)² + 2r²(1 - cosθ), no cancellation near r = 1, θ = 0
            let denom = (1.0 - r2) * (1.0 - r2) + 2.0 * r2 * one_minus_c;
            r2 / denom
        },
        theta.abs().min(2.0 * PI - theta.abs()),
    );
    Complex64::new(0.0, 2.0 * s * integral)
}

/// `M_μ = (∫_𝔻 μ(dz) / (1 - |z|²))^{1/2}`, the sup of the Cauchy-kernel norms.
pub fn cauchy_kernel_bound(mu: &RadialMeasure) -> f64 {
    mu.singular_integral().sqrt()
}

/// `n` angles in `(0, π)` clustered quadratically near `θ = 0`.
pub fn chebyshev_theta_grid(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|j| PI * (1.0 - (0.5 * PI * j as f64 / (n + 1) as f64).cos()))
        .collect()
}

/// `sup_θ ∫ sinθ / ((r - cosθ)² + sin²θ) α(dr)` over `theta_grid`.
///
/// Returns `+∞` when `α` fails the box test, which on the power-law family
/// means a boundary exponent `p < 0`.
pub fn poisson_sup(alpha: &RadialMeasure, theta_grid: &[f64]) -> f64 {
    if alpha.boundary_exponent().map_or(false, |p| p < 0.0) {
        return f64::INFINITY;
    }
    theta_grid
        .iter()
        .map(|&theta| poisson_integral(alpha, theta))
        .fold(0.0, f64::max)
}

/// `∫ sinθ / ((r - cosθ)² + sin²θ) α(dr)` at one angle.
pub fn poisson_integral(alpha: &RadialMeasure, theta: f64) -> f64 {
    let s = theta.sin();
    let one_minus_c = 2.0 * (0.5 * theta).sin().powi(2);
    // (r - cosθ)² + sin²θ = (1 - r)² + 2r(1 - cosθ)
    alpha.integrate_peaked(
        |r| s / ((1.0 - r) * (1.0 - r) + 2.0 * r * one_minus_c),
        theta.abs().min(2.0 * PI - theta.abs()),
    )
}
