//! Certified values of the sum norm `‖u‖_{H_μ + L¹}`.
//!
//! The discretized problem is
//!
//! ```text
//!     minimize_f  ‖D f‖₂ + (1/M) Σ_k |s_k - (K f)_k|
//! ```
//!
//! over coefficient vectors `f` of the same degree `N` as `u`, where
//! `D = diag (2πσ_|n|)^{1/2}`, `K` is synthesis on `M` nodes and `s = K u`.
//! With the grid inner product `⟨x, y⟩ = (1/M) Σ x_k ȳ_k` the map `K` is an
//! isometry and `K*` is analysis, so a primal–dual hybrid gradient iteration
//! runs with `τσ < 1`.
//!
//! Its Fenchel dual is
//!
//! ```text
//!     maximize_φ  Re⟨s, φ⟩   subject to  |φ_k| <= 1,  ‖D⁻¹ K* φ‖₂ <= 1,
//! ```
//!
//! so every `φ` rescaled to satisfy both constraints certifies a lower bound.
//! Values are for the discretized norm, which approximates the norm on the
//! full spaces from above.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::measure::RadialMeasure;
use crate::spaces::{hmu_norm_with, l1_norm};
use crate::spectral::{synthesize, CoeffVector, FourierGrid, GridFunction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A splitting `u = f + g` on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// The `H_μ` part.
    pub f: CoeffVector,
    /// The `L¹` part, as grid samples.
    pub g: GridFunction,
    /// `max_k |f(θ_k) + g(θ_k) - u(θ_k)|`
    pub residual: f64,
}

/// A certified interval `[lower, upper]` for the discretized sum norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedNorm {
    pub upper: f64,
    pub lower: f64,
    pub gap: f64,
    pub iterations: usize,
    /// False when the iteration budget ran out before the gap closed; the
    /// interval is still valid, only wider than requested.
    pub converged: bool,
    pub witness: Decomposition,
    /// Feasible for the dual problem, already rescaled.
    pub dual_witness: GridFunction,
}

impl CertifiedNorm {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.upper + self.lower)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Stop once `upper - lower <= tol · upper`.
    pub tol: f64,
    pub max_iterations: usize,
    /// Iterations between certificate evaluations (and restart checks).
    pub check_every: usize,
    /// Initial primal weight: `τ = 0.99 ω`, `σ = 0.99 / ω`.
    pub primal_weight: f64,
    /// Rebalance `ω` at every restart from the primal and dual movement.
    pub adaptive_weight: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-5, max_iterations: 200_000, check_every: 20, primal_weight: 1.0, adaptive_weight: true }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// `sum_norm` with default options apart from `tol`.
pub fn sum_norm(u: &CoeffVector, mu: &RadialMeasure, m: usize, tol: f64) -> Result<CertifiedNorm> {
    SumNormSolver::new(mu, u.n_max(), m)?.solve(u, &SolverOptions::with_tol(tol))
}

/// `|⟨u, φ⟩|` on the grid after rescaling `φ` into the dual unit ball.
pub fn dual_bound(u: &CoeffVector, phi: &GridFunction, mu: &RadialMeasure) -> Result<f64> {
    let solver = SumNormSolver::new(mu, u.n_max(), phi.m())?;
    let s = synthesize(u, phi.m())?;
    let mut hat = vec![ZERO; 2 * u.n_max() + 1];
    FourierGrid::new(phi.m()).analyze_into(phi.samples(), &mut hat);
    Ok(solver.scaled_bound(s.samples(), phi.samples(), &hat))
}

/// `(2πσ_|n|)^{1/2}` for `|n| <= n_max`, computed in the log domain.
pub fn hmu_weights(mu: &RadialMeasure, n_max: usize) -> Vec<f64> {
    (0..=n_max)
        .map(|n| (0.5 * ((2.0 * PI).ln() + mu.ln_moment(n))).exp())
        .collect()
}

/// Reusable solver for one `(μ, N, M)` triple.
#[derive(Debug)]
pub struct SumNormSolver {
    n_max: usize,
    m: usize,
    /// `d_n` for `n = -N..N`
    d: Vec<f64>,
    moments: Vec<f64>,
}

impl SumNormSolver {
    pub fn new(mu: &RadialMeasure, n_max: usize, m: usize) -> Result<Self> {
        if m < 2 * n_max + 1 {
            return Err(Error::GridTooSmall { m, n_max, required: 2 * n_max + 1 });
        }
        let half = hmu_weights(mu, n_max);
        let d = (-(n_max as i64)..=n_max as i64).map(|n| half[n.unsigned_abs() as usize]).collect();
        Ok(Self { n_max, m, d, moments: mu.moments(n_max) })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `‖D f‖ + (1/M) Σ |s - K f|`, with `kf` a scratch buffer.
    fn objective(&self, f: &[Complex64], s: &[Complex64], grid: &mut FourierGrid, kf: &mut [Complex64]) -> f64 {
        grid.synthesize_into(f, kf);
        let l1: f64 = s.iter().zip(kf.iter()).map(|(a, b)| (a - b).norm()).sum::<f64>() / self.m as f64;
        weighted_norm(&self.d, f) + l1
    }

    /// Lower bound certified by `φ`, and the rescaled dual point.
    ///
    /// Modes with a tiny weight `d_n` force `φ̂_n ≈ 0` to a precision no
    /// iterate reaches, so besides `φ` itself the candidates with those
    /// modes filtered out are tried as well; all are valid certificates.
    fn bound_for(
        &self,
        s: &[Complex64],
        phi: &[Complex64],
        grid: &mut FourierGrid,
        hat: &mut [Complex64],
    ) -> (f64, Vec<Complex64>) {
        grid.analyze_into(phi, hat);
        let d_max = self.d.iter().cloned().fold(0.0, f64::max);
        let mut best = (self.scaled_bound(s, phi, hat), phi.to_vec());
        if d_max == 0.0 {
            return best;
        }
        let mut filtered = vec![ZERO; self.m];
        let mut cut = vec![ZERO; hat.len()];
        for rel in [1e-12, 1e-8, 1e-5, 1e-3] {
            let threshold = rel * d_max;
            let mut any = false;
            for ((c, h), &dn) in cut.iter_mut().zip(hat.iter()).zip(&self.d) {
                *c = if dn < threshold {
                    any = true;
                    *h
                } else {
                    ZERO
                };
            }
            if !any {
                continue;
            }
            grid.synthesize_into(&cut, &mut filtered);
            for (x, p) in filtered.iter_mut().zip(phi) {
                *x = p - *x;
            }
            let mut h2 = vec![ZERO; hat.len()];
            grid.analyze_into(&filtered, &mut h2);
            let v = self.scaled_bound(s, &filtered, &h2);
            if v > best.0 {
                best = (v, filtered.clone());
            }
        }
        let scale = self.dual_scale(&best.1, &{
            let mut h = vec![ZERO; hat.len()];
            grid.analyze_into(&best.1, &mut h);
            h
        });
        if scale > 0.0 && scale.is_finite() {
            for x in best.1.iter_mut() {
                *x /= scale;
            }
        } else {
            best.1.iter_mut().for_each(|x| *x = ZERO);
        }
        best
    }

    /// `max(‖φ‖_∞, ‖D⁻¹ φ̂‖)`
    fn dual_scale(&self, phi: &[Complex64], hat: &[Complex64]) -> f64 {
        let sup = phi.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut dual = 0.0;
        for (h, &dn) in hat.iter().zip(&self.d) {
            let a = h.norm_sqr();
            if a == 0.0 {
                continue;
            }
            if dn == 0.0 {
                return f64::INFINITY;
            }
            dual += a / (dn * dn);
        }
        sup.max(dual.sqrt())
    }

    fn scaled_bound(&self, s: &[Complex64], phi: &[Complex64], hat: &[Complex64]) -> f64 {
        let scale = self.dual_scale(phi, hat);
        if scale == 0.0 || !scale.is_finite() {
            return 0.0;
        }
        let inner: Complex64 = s.iter().zip(phi).map(|(a, b)| a * b.conj()).sum::<Complex64>() / self.m as f64;
        inner.norm() / scale
    }

    /// `argmin_f ‖D f‖ + ‖f - v‖² / (2τ)`, written into `v`.
    ///
    /// For `‖D⁻¹ v‖ > τ` the minimizer is `f_n = v_n t / (t + τ d_n²)` with
    /// `t = ‖D f‖ > 0` the root of `Σ d_n² |v_n|² / (t + τ d_n²)² = 1`;
    /// otherwise `D f = 0`.
    fn prox(&self, v: &mut [Complex64], tau: f64) {
        let mut inv = 0.0;
        for (x, &dn) in v.iter().zip(&self.d) {
            if dn > 0.0 {
                inv += x.norm_sqr() / (dn * dn);
            }
        }
        if inv <= tau * tau {
            for (x, &dn) in v.iter_mut().zip(&self.d) {
                if dn > 0.0 {
                    *x = ZERO;
                }
            }
            return;
        }
        // Newton on h(t) = S(t)^{-1/2} - 1 with S(t) = Σ d²|v|² / (t + τd²)²;
        // h is increasing, concave and nearly linear, so the iterates rise
        // monotonically to the root in a handful of steps.
        let mut t = 0.0f64;
        for _ in 0..100 {
            let (mut big_s, mut ds) = (0.0, 0.0);
            for (x, &dn) in v.iter().zip(&self.d) {
                let a = dn * dn * x.norm_sqr();
                if a == 0.0 {
                    continue;
                }
                let den = t + tau * dn * dn;
                let q = a / (den * den);
                big_s += q;
                ds -= 2.0 * q / den;
            }
            let r = big_s.sqrt().recip();
            let h = r - 1.0;
            let dh = -0.5 * r * r * r * ds;
            let next = t - h / dh;
            if !(next > t) || next - t <= 1e-15 * next {
                t = next.max(t);
                break;
            }
            t = next;
        }
        for (x, &dn) in v.iter_mut().zip(&self.d) {
            *x *= t / (t + tau * dn * dn);
        }
    }

    /// Runs the iteration for `u`, which must have degree exactly `N`.
    ///
    /// The iteration runs on `u / ‖u‖₂` and the result is scaled back, so
    /// the step sizes do not depend on the size of `u`.
    pub fn solve(&self, u: &CoeffVector, opts: &SolverOptions) -> Result<CertifiedNorm> {
        let scale = crate::spaces::l2_norm(u);
        if scale == 0.0 || !scale.is_finite() {
            return self.solve_normalized(u, opts);
        }
        let mut r = self.solve_normalized(&(u * scale.recip()), opts)?;
        r.upper *= scale;
        r.lower *= scale;
        r.gap = r.upper - r.lower;
        let f = &r.witness.f * scale;
        let g: Vec<Complex64> = r.witness.g.samples().iter().map(|x| x * scale).collect();
        let mut grid = FourierGrid::new(self.m);
        let (mut kf, mut ku) = (vec![ZERO; self.m], vec![ZERO; self.m]);
        grid.synthesize_into(f.as_slice(), &mut kf);
        grid.synthesize_into(u.as_slice(), &mut ku);
        r.witness.residual = kf
            .iter()
            .zip(&g)
            .zip(&ku)
            .map(|((a, b), c)| (a + b - c).norm())
            .fold(0.0, f64::max);
        r.witness.f = f;
        r.witness.g = GridFunction::new(g);
        Ok(r)
    }

    fn solve_normalized(&self, u: &CoeffVector, opts: &SolverOptions) -> Result<CertifiedNorm> {
        if u.n_max() != self.n_max {
            return Err(Error::InvalidArgument(format!(
                "solver built for degree {}, got {}",
                self.n_max,
                u.n_max()
            )));
        }
        if !(opts.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", opts.tol)));
        }
        let (m, len) = (self.m, 2 * self.n_max + 1);
        let mut grid = FourierGrid::new(m);
        let mut s = vec![ZERO; m];
        grid.synthesize_into(u.as_slice(), &mut s);
        let mut kf = vec![ZERO; m];
        let mut hat = vec![ZERO; len];

        // Single-term decompositions.
        let zero = vec![ZERO; len];
        let up_zero = l1_norm(&GridFunction::new(s.clone()));
        let up_u = hmu_norm_with(u, &self.moments);
        let mut best_f = if up_u < up_zero { u.as_slice().to_vec() } else { zero.clone() };
        let mut upper = up_u.min(up_zero);
        let mut lower = 0.0;
        let mut dual_best = vec![ZERO; m];
        if upper == 0.0 {
            return Ok(self.finish(u, best_f, upper, 0.0, dual_best, 0, true, &s, &mut grid));
        }

        let mut omega = opts.primal_weight;
        let (mut tau, mut sigma) = (0.99 * omega, 0.99 / omega);
        let mut f_restart = zero.clone();
        let mut y_restart = vec![ZERO; m];
        let mut f = zero.clone();
        let mut f_bar = zero.clone();
        let mut y = vec![ZERO; m];
        let mut f_sum = zero.clone();
        let mut y_sum = vec![ZERO; m];
        let mut count = 0usize;
        let mut gap_at_restart = f64::INFINITY;
        let mut work = vec![ZERO; len];
        let mut avg_f = zero.clone();
        let mut neg = vec![ZERO; m];
        let check = opts.check_every.max(1);

        let mut it = 0;
        while it < opts.max_iterations {
            it += 1;
            // y ← proj_{|y_k| <= 1}(y + σ(K f̄ - s))
            grid.synthesize_into(&f_bar, &mut kf);
            for ((yk, kfk), sk) in y.iter_mut().zip(&kf).zip(&s) {
                let v = *yk + sigma * (kfk - sk);
                let a = v.norm();
                *yk = if a > 1.0 { v / a } else { v };
            }
            // f ← prox_{τ‖D·‖}(f - τ K* y)
            grid.analyze_into(&y, &mut hat);
            for ((w, fk), h) in work.iter_mut().zip(&f).zip(&hat) {
                *w = fk - tau * h;
            }
            self.prox(&mut work, tau);
            for ((fb, fk), w) in f_bar.iter_mut().zip(f.iter_mut()).zip(&work) {
                *fb = 2.0 * w - *fk;
                *fk = *w;
            }
            for (a, b) in f_sum.iter_mut().zip(&f) {
                *a += b;
            }
            for (a, b) in y_sum.iter_mut().zip(&y) {
                *a += b;
            }
            count += 1;

            if it % check != 0 && it != opts.max_iterations {
                continue;
            }
            let inv = 1.0 / count as f64;
            for (a, b) in avg_f.iter_mut().zip(&f_sum) {
                *a = b * inv;
            }
            for cand in [&f, &avg_f] {
                let v = self.objective(cand, &s, &mut grid, &mut kf);
                if v < upper {
                    upper = v;
                    best_f.copy_from_slice(cand);
                }
            }
            // The dual point of the saddle problem is -y.
            for (a, b) in neg.iter_mut().zip(&y) {
                *a = -b;
            }
            let (v, phi) = self.bound_for(&s, &neg, &mut grid, &mut hat);
            if v > lower {
                lower = v;
                dual_best = phi;
            }
            for (a, b) in neg.iter_mut().zip(&y_sum) {
                *a = -b * inv;
            }
            let (v, phi) = self.bound_for(&s, &neg, &mut grid, &mut hat);
            if v > lower {
                lower = v;
                dual_best = phi;
            }
            let gap = upper - lower;
            if gap <= opts.tol * upper {
                return Ok(self.finish(u, best_f, upper, lower, dual_best, it, true, &s, &mut grid));
            }
            // Restart the averages once the gap has halved since the last restart.
            if gap < 0.5 * gap_at_restart {
                gap_at_restart = gap;
                if opts.adaptive_weight {
                    // Rebalance the steps so primal and dual progress match.
                    let df = dist(&f, &f_restart);
                    let dy = dist(&y, &y_restart) / (m as f64).sqrt();
                    if df > 0.0 && dy > 0.0 {
                        omega = (omega * df / dy).sqrt().clamp(1e-4, 1e4);
                        tau = 0.99 * omega;
                        sigma = 0.99 / omega;
                    }
                    f_restart.copy_from_slice(&f);
                    y_restart.copy_from_slice(&y);
                }
                f_bar.copy_from_slice(&f);
                f_sum.copy_from_slice(&f);
                y_sum.copy_from_slice(&y);
                count = 1;
            }
        }
        Ok(self.finish(u, best_f, upper, lower, dual_best, it, false, &s, &mut grid))
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        u: &CoeffVector,
        f: Vec<Complex64>,
        upper: f64,
        lower: f64,
        dual: Vec<Complex64>,
        iterations: usize,
        converged: bool,
        s: &[Complex64],
        grid: &mut FourierGrid,
    ) -> CertifiedNorm {
        let mut kf = vec![ZERO; self.m];
        grid.synthesize_into(&f, &mut kf);
        let g: Vec<Complex64> = s.iter().zip(&kf).map(|(a, b)| a - b).collect();
        let residual = kf
            .iter()
            .zip(&g)
            .zip(s)
            .map(|((a, b), c)| (a + b - c).norm())
            .fold(0.0, f64::max);
        let f = CoeffVector::from_slice(&f).expect("odd length");
        debug_assert_eq!(f.n_max(), u.n_max());
        let lower = lower.min(upper);
        CertifiedNorm {
            upper,
            lower,
            gap: upper - lower,
            iterations,
            converged,
            witness: Decomposition { f, g: GridFunction::new(g), residual },
            dual_witness: GridFunction::new(dual),
        }
    }
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn weighted_norm(d: &[f64], f: &[Complex64]) -> f64 {
    d.iter().zip(f).map(|(dn, c)| dn * dn * c.norm_sqr()).sum::<f64>().sqrt()
}
