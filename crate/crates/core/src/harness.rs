//! Experiment drivers: inequality ratios over random corpora and the
//! Fejér-kernel dichotomy.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::RadialMeasure;
use crate::spaces::{a2_norm, l1_norm, l2_norm};
use crate::spectral::{adapted_pair, analytic_projection, hilbert, standard_pair, synthesize, AdaptedPair, CoeffVector};
use crate::sumnorm::{CertifiedNorm, SolverOptions, SumNormSolver};

/// Grid and solver settings shared by the ratio experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSettings {
    pub grid: usize,
    pub solver: SolverOptions,
}

impl Default for RatioSettings {
    fn default() -> Self {
        Self { grid: 512, solver: SolverOptions::default() }
    }
}

/// One evaluated ratio with the certificates behind its denominator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub ratio: f64,
    pub numerator: f64,
    /// Sum of certified upper bounds.
    pub denominator: f64,
    /// Sum of the duality gaps of the denominator terms.
    pub gap: f64,
    pub converged: bool,
}

impl RatioSample {
    fn new(numerator: f64, terms: &[CertifiedNorm]) -> Self {
        let denominator: f64 = terms.iter().map(|t| t.upper).sum();
        Self {
            ratio: numerator / denominator,
            numerator,
            denominator,
            gap: terms.iter().map(|t| t.gap).sum(),
            converged: terms.iter().all(|t| t.converged),
        }
    }
}

/// Precomputed state for ratio evaluations at a fixed `(μ, N, M)`.
#[derive(Debug)]
pub struct RatioLab {
    mu: RadialMeasure,
    n_max: usize,
    solver: SumNormSolver,
    pair: AdaptedPair,
    settings: RatioSettings,
}

impl RatioLab {
    pub fn new(mu: &RadialMeasure, n_max: usize, settings: RatioSettings) -> Result<Self> {
        Ok(Self {
            mu: mu.clone(),
            n_max,
            solver: SumNormSolver::new(mu, n_max, settings.grid)?,
            pair: standard_pair(mu, n_max),
            settings,
        })
    }

    pub fn standard_pair(&self) -> &AdaptedPair {
        &self.pair
    }

    fn sum_norm(&self, v: &CoeffVector) -> Result<CertifiedNorm> {
        self.solver.solve(&v.padded(self.n_max), &self.settings.solver)
    }

    fn check_input(&self, u: &CoeffVector) -> Result<()> {
        if u.is_zero() {
            return Err(Error::ZeroInput);
        }
        if u.degree() > self.n_max {
            return Err(Error::InvalidArgument(format!(
                "input degree {} exceeds the lab degree {}",
                u.degree(),
                self.n_max
            )));
        }
        Ok(())
    }

    /// `‖u‖₂ / (‖𝒜_μ u‖_{H_μ+L¹} + ‖ℋ𝒜_μ u‖_{H_μ+L¹})`
    pub fn bbb_ratio(&self, u: &CoeffVector) -> Result<RatioSample> {
        self.check_input(u)?;
        let au = self.pair.apply_a(u);
        let hau = hilbert(&au);
        Ok(RatioSample::new(l2_norm(u), &[self.sum_norm(&au)?, self.sum_norm(&hau)?]))
    }

    /// `‖u‖₂ / (‖𝒯_a u‖_{H_μ+L¹} + ‖𝒯_b 𝒯_a u‖_{H_μ+L¹})`
    pub fn adapted_ratio(&self, u: &CoeffVector, pair: &AdaptedPair) -> Result<RatioSample> {
        self.check_input(u)?;
        if pair.n_max < self.n_max {
            return Err(Error::InvalidPair(format!(
                "pair covers |n| <= {}, input needs {}",
                pair.n_max, self.n_max
            )));
        }
        let defect = pair.identity_defect(&self.mu);
        if !(defect <= 1e-9) {
            return Err(Error::InvalidPair(format!("pair is not adapted to the measure (defect {defect:e})")));
        }
        let pair = restrict(pair, self.n_max);
        let au = pair.apply_a(u);
        let bau = pair.apply_b(&au);
        Ok(RatioSample::new(l2_norm(u), &[self.sum_norm(&au)?, self.sum_norm(&bau)?]))
    }

    /// `‖f‖_{A²(μ)} / ‖f‖_{B²+h¹}` for analytic `f`.
    pub fn embedding_ratio(&self, f: &CoeffVector) -> Result<RatioSample> {
        self.check_input(f)?;
        let num = a2_norm(f, &self.mu)?;
        Ok(RatioSample::new(num, &[self.sum_norm(f)?]))
    }
}

fn restrict(pair: &AdaptedPair, n_max: usize) -> AdaptedPair {
    let off = pair.n_max - n_max;
    let len = 2 * n_max + 1;
    AdaptedPair {
        n_max,
        a: pair.a[off..off + len].to_vec(),
        b: pair.b[off..off + len].to_vec(),
        c_b: pair.c_b,
    }
}

pub fn bbb_ratio(u: &CoeffVector, mu: &RadialMeasure, settings: RatioSettings) -> Result<RatioSample> {
    RatioLab::new(mu, u.n_max(), settings)?.bbb_ratio(u)
}

pub fn adapted_ineq_ratio(
    u: &CoeffVector,
    mu: &RadialMeasure,
    pair: &AdaptedPair,
    settings: RatioSettings,
) -> Result<RatioSample> {
    RatioLab::new(mu, u.n_max(), settings)?.adapted_ratio(u, pair)
}

pub fn embedding_ratio(f: &CoeffVector, mu: &RadialMeasure, settings: RatioSettings) -> Result<RatioSample> {
    RatioLab::new(mu, f.n_max(), settings)?.embedding_ratio(f)
}

/// Which ratio a corpus scan evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RatioKind {
    Bbb,
    /// Adapted pair with `b(n) = b_scale · sgn(n)`.
    Adapted { b_scale: f64 },
    /// Uses the analytic projection of each corpus element.
    Embedding,
}

/// Random trigonometric polynomials with `E|c_n|² = (1 + |n|)^{-s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub n_max: usize,
    pub count: usize,
    pub seed: u64,
    pub smoothness: f64,
}

impl CorpusSpec {
    pub fn new(n_max: usize, count: usize, seed: u64) -> Self {
        Self { n_max, count, seed, smoothness: 1.0 }
    }

    /// Element `index`, drawn from its own stream so that elements do not
    /// depend on each other or on evaluation order.
    pub fn element(&self, index: usize) -> CoeffVector {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        CoeffVector::from_fn(self.n_max, |n| {
            let sd = ((1.0 + n.abs() as f64).powf(-self.smoothness) / 2.0).sqrt();
            Complex64::new(sd * normal.sample(&mut rng), sd * normal.sample(&mut rng))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub which: RatioKind,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// Explicit constant from the theory where one exists.
    pub constant_reference: Option<f64>,
    pub seed: u64,
    pub corpus_size: usize,
    pub n_max: usize,
    pub grid: usize,
    pub smoothness: f64,
    /// Largest denominator gap relative to the denominator.
    pub max_relative_gap: f64,
    pub all_converged: bool,
}

impl InequalityReport {
    /// One CSV row per sample: `index,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,ratio\n");
        for (i, r) in self.ratios.iter().enumerate() {
            out.push_str(&format!("{i},{r:e}\n"));
        }
        out
    }
}

/// Evaluates `which` on every element of the corpus, in parallel.
pub fn corpus_scan(
    corpus: &CorpusSpec,
    mu: &RadialMeasure,
    which: RatioKind,
    settings: RatioSettings,
) -> Result<InequalityReport> {
    if corpus.count == 0 {
        return Err(Error::InvalidArgument("corpus needs at least one element".into()));
    }
    let lab = RatioLab::new(mu, corpus.n_max, settings)?;
    let pair = match which {
        RatioKind::Adapted { b_scale } => Some(adapted_pair(mu, corpus.n_max, |n| b_scale * n.signum() as f64)?),
        _ => None,
    };
    let samples: Vec<RatioSample> = (0..corpus.count)
        .into_par_iter()
        .map(|i| {
            let u = corpus.element(i);
            match which {
                RatioKind::Bbb => lab.bbb_ratio(&u),
                RatioKind::Adapted { .. } => lab.adapted_ratio(&u, pair.as_ref().expect("built above")),
                RatioKind::Embedding => lab.embedding_ratio(&analytic_projection(&u)),
            }
        })
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = samples.iter().map(|s| s.ratio).collect();
    Ok(InequalityReport {
        which,
        max_ratio: ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        ratios,
        constant_reference: None,
        seed: corpus.seed,
        corpus_size: corpus.count,
        n_max: corpus.n_max,
        grid: settings.grid,
        smoothness: corpus.smoothness,
        max_relative_gap: samples.iter().map(|s| s.gap / s.denominator).fold(0.0, f64::max),
        all_converged: samples.iter().all(|s| s.converged),
    })
}

/// `(ε, max_ratio)` for the truncated family `(1-r)^p 1_{[0,1-ε)} dr`.
pub fn truncation_scan(
    p: f64,
    eps_list: &[f64],
    corpus: &CorpusSpec,
    which: RatioKind,
    settings: RatioSettings,
) -> Result<Vec<(f64, InequalityReport)>> {
    eps_list
        .iter()
        .map(|&eps| {
            let mu = RadialMeasure::truncated_power(p, eps)?;
            Ok((eps, corpus_scan(corpus, &mu, which, settings)?))
        })
        .collect()
}

/// One row of the Fejér experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FejerRow {
    pub n: usize,
    /// `‖F_N‖_{h¹}` on the smallest power-of-two grid with at least `4N` (and 8) nodes.
    pub h1_norm: f64,
    /// `‖Q₊ F_N‖²_{A²(μ)} = 2π Σ_{j<=N} (1 - j/N)² σ_j`
    pub analytic_part_sq: f64,
    /// `Σ_{j<=N} σ_j`
    pub partial_moment_sum: f64,
}

/// The Fejér kernel `F_N = Σ_{|j|<=N} (1 - |j|/N) e_j`.
pub fn fejer_kernel(n: usize) -> CoeffVector {
    CoeffVector::from_fn(n, |j| Complex64::new(1.0 - j.abs() as f64 / n as f64, 0.0))
}

pub fn fejer_experiment(mu: &RadialMeasure, n_list: &[usize]) -> Result<Vec<FejerRow>> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("n_list must not be empty".into()));
    }
    if let Some(0) = n_list.iter().find(|&&n| n == 0) {
        return Err(Error::InvalidArgument("the Fejér kernel needs N >= 1".into()));
    }
    let n_top = *n_list.iter().max().expect("nonempty");
    let moments = mu.moments(n_top);
    n_list
        .iter()
        .map(|&n| {
            let f = fejer_kernel(n);
            let m = (4 * n).max(8).next_power_of_two();
            let h1 = l1_norm(&synthesize(&f, m)?);
            let q = analytic_projection(&f);
            let a2 = crate::spaces::hmu_norm_with(&q, &moments[..=n]);
            Ok(FejerRow {
                n,
                h1_norm: h1,
                analytic_part_sq: a2 * a2,
                partial_moment_sum: moments[..=n].iter().sum(),
            })
        })
        .collect()
}

/// Plot data `N  ‖Q₊F_N‖`.
pub fn fejer_plot(rows: &[FejerRow]) -> String {
    crate::report::two_column(rows.iter().map(|r| (r.n as f64, r.analytic_part_sq.sqrt())))
}

/// `√(2π Σ_j σ_j)`, the bound on `‖Q₊F_N‖` when the moment series converges.
pub fn fejer_bound(mu: &RadialMeasure) -> f64 {
    // Σ_j σ_j = ∫ σ(dr) / (1 - r²)
    mu.singular_integral().sqrt()
}
