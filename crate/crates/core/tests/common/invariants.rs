//! The module properties as seeded randomized checks.
//!
//! Every check runs [`super::CASES`] cases drawn from a runner seeded with
//! [`super::SEED`] and returns the first (shrunk) counterexample.

use std::f64::consts::PI;

use carleson_core::halfplane::{
    b2h_norm, b2h_norm_by_slices, default_garnett_grid, garnett_check, w_pi, BandSignal, GaussianPacket, LineAtom,
    LineMeasure, LinePiece, LineSignal, StabilityInstance,
};
use carleson_core::harness::{
    corpus_scan, fejer_experiment, CorpusSpec, RatioKind, RatioLab, RatioSettings,
};
use carleson_core::measure::{default_delta_grid, log_grid, RadialAtom, RadialPiece};
use carleson_core::spaces::{a2_norm, cauchy_kernel_bound, chebyshev_theta_grid, hmu_norm, poisson_sup, w_sigma};
use carleson_core::spectral::{
    adapted_pair, analytic_projection, analyze, evaluate, hilbert, multiplier, poisson_dilate, rotate, synthesize,
};
use carleson_core::sumnorm::{dual_bound, SolverOptions, SumNormSolver};
use carleson_core::{CoeffVector, GridFunction, LaplaceConvention, RadialMeasure};
use num_complex::Complex64;
use proptest::collection::vec;
use proptest::prelude::*;

use super::{aliased_w_coefficient, carleson_measure, check, coeffs, radial_measure, vertical_measure};

pub type Check = fn() -> Result<(), String>;

/// Every property, grouped by module.
pub const ALL: &[(&str, Check)] = &[
    ("measure: moments positive and nonincreasing", moments_positive_nonincreasing),
    ("measure: log-convexity of moments", moments_log_convex),
    ("measure: moment lower bound by tail mass", moments_tail_lower_bound),
    ("measure: laplace transform decreasing and additive", laplace_decreasing_additive),
    ("measure: box verdict ignores interior mass", carleson_ignores_interior_mass),
    ("spectral: hilbert squared", hilbert_squared),
    ("spectral: discrete Plancherel", discrete_plancherel),
    ("spectral: Poisson semigroup", poisson_semigroup),
    ("spectral: rotation equivariance", rotation_equivariance),
    ("spectral: evaluate vs dilated synthesis", evaluate_matches_dilated_synthesis),
    ("spaces: H_mu norm axioms", hmu_norm_axioms),
    ("spaces: analytic/anti-analytic Pythagoras", hmu_pythagoras),
    ("spaces: w_sigma Fourier identity", w_sigma_fourier_identity),
    ("spaces: poisson_sup and box test co-finite", poisson_sup_cofinite),
    ("spaces: Cauchy bound squared is the singular integral", cauchy_bound_squared),
    ("sumnorm: weak duality", weak_duality),
    ("sumnorm: norm axioms on the upper bound", sum_norm_axioms),
    ("sumnorm: monotone in the weight", sum_norm_monotone_in_weight),
    ("sumnorm: conic oracle bracketing", oracle_bracketing),
    ("harness: ratio scale invariance", ratio_scale_invariance),
    ("harness: embedding ratio lower side", embedding_ratio_lower_side),
    ("harness: Fejer dichotomy", fejer_dichotomy),
    ("harness: corpus doubling", corpus_doubling),
    ("halfplane: W^Pi odd and sign", w_pi_odd_and_sign),
    ("halfplane: Garnett co-finiteness", garnett_cofinite),
    ("halfplane: B2 norm additivity", b2h_additivity),
    ("halfplane: stability bound", stability_bound),
    ("halfplane: Laplace form vs slice masses", b2h_matches_slices),
];

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

const LN_SLACK: f64 = 1e-12;

pub fn moments_positive_nonincreasing() -> Result<(), String> {
    check(radial_measure(), |mu| {
        let ln: Vec<f64> = (0..=256).map(|n| mu.ln_moment(n)).collect();
        for n in 0..256 {
            prop_assert!(ln[n].is_finite(), "ln σ_{} = {}", n, ln[n]);
            prop_assert!(ln[n + 1] <= ln[n] + LN_SLACK * ln[n].abs().max(1.0), "σ_{} > σ_{}", n + 1, n);
        }
        Ok(())
    })
}

pub fn moments_log_convex() -> Result<(), String> {
    check(radial_measure(), |mu| {
        let ln: Vec<f64> = (0..=256).map(|n| mu.ln_moment(n)).collect();
        for n in 1..256 {
            let lhs = 2.0 * ln[n];
            let rhs = ln[n - 1] + ln[n + 1];
            prop_assert!(lhs <= rhs + LN_SLACK * rhs.abs().max(1.0), "n = {}: {} > {}", n, lhs, rhs);
        }
        Ok(())
    })
}

pub fn moments_tail_lower_bound() -> Result<(), String> {
    check(radial_measure(), |mu| {
        for rho in [0.05, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let tail = mu.mass_between(rho, 1.0);
            if tail <= 0.0 {
                continue;
            }
            for n in [0usize, 1, 2, 5, 17, 64, 256] {
                let lhs = mu.ln_moment(n);
                let rhs = 2.0 * n as f64 * f64::ln(rho) + tail.ln();
                prop_assert!(lhs >= rhs - LN_SLACK * rhs.abs().max(1.0), "ρ = {}, n = {}: {} < {}", rho, n, lhs, rhs);
            }
        }
        Ok(())
    })
}

pub fn laplace_decreasing_additive() -> Result<(), String> {
    let xi = log_grid(1e-2, 10.0, 40);
    check((vertical_measure(false), vertical_measure(false)), |(p, q)| {
        let both = p.plus(&q);
        for conv in [LaplaceConvention::Two, LaplaceConvention::FourPi] {
            let vals: Vec<f64> = xi.iter().map(|&x| p.laplace_transform(x, conv)).collect();
            for w in vals.windows(2) {
                if w[1] > 1e-290 {
                    prop_assert!(w[1] < w[0], "not strictly decreasing: {} then {}", w[0], w[1]);
                } else {
                    prop_assert!(w[1] <= w[0]);
                }
            }
            for &x in &xi {
                let sum = p.laplace_transform(x, conv) + q.laplace_transform(x, conv);
                let joint = both.laplace_transform(x, conv);
                prop_assert!((joint - sum).abs() <= 1e-12 * sum.abs(), "ξ = {}: {} vs {}", x, joint, sum);
            }
        }
        Ok(())
    })
}

fn interior_measure() -> impl Strategy<Value = RadialMeasure> {
    let atom = (0.0..0.5f64, 0.1..5.0f64).prop_map(|(r, w)| RadialAtom { r, w });
    let piece = (0.0..0.45f64, 0.01..1.0f64, 0.1..5.0f64, -0.9..3.0f64, 0.0..3.0f64).prop_map(|(a, f, c, p, q)| {
        RadialPiece { a, b: a + (0.5 - a) * f, c, p, q }
    });
    (vec(atom, 0..3), vec(piece, 0..3)).prop_filter_map("empty", |(a, p)| RadialMeasure::new(a, p).ok())
}

pub fn carleson_ignores_interior_mass() -> Result<(), String> {
    let grid = default_delta_grid();
    check((radial_measure(), interior_measure()), |(mu, extra)| {
        let before = mu.radial_carleson(&grid);
        let after = mu.plus(&extra).radial_carleson(&grid);
        prop_assert_eq!(before.is_carleson, after.is_carleson);
        prop_assert_eq!(before.sup_ratio.is_finite(), after.sup_ratio.is_finite());
        Ok(())
    })
}

fn coeffs_upto(max_degree: usize) -> impl Strategy<Value = CoeffVector> {
    (0..=max_degree).prop_flat_map(coeffs)
}

pub fn hilbert_squared() -> Result<(), String> {
    check(coeffs_upto(24), |u| {
        let hh = hilbert(&hilbert(&u));
        let mut expected = u.clone();
        expected.set(0, Complex64::new(0.0, 0.0));
        prop_assert_eq!(hh, expected);
        Ok(())
    })
}

pub fn discrete_plancherel() -> Result<(), String> {
    let input = coeffs_upto(24).prop_flat_map(|u| {
        let lo = 2 * u.n_max() + 1;
        (Just(u), prop_oneof![lo..lo + 40, Just(lo.next_power_of_two()), Just(2 * lo.next_power_of_two())])
    });
    check(input, |(u, m)| {
        let g = synthesize(&u, m).map_err(|e| fail(e.to_string()))?;
        let grid: f64 = g.samples().iter().map(|c| c.norm_sqr()).sum::<f64>() / m as f64;
        let coef: f64 = u.as_slice().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((grid - coef).abs() <= 1e-12 * coef, "m = {}: {} vs {}", m, grid, coef);
        Ok(())
    })
}

fn close(a: &CoeffVector, b: &CoeffVector, rel: f64) -> bool {
    a.n_max() == b.n_max() && a.as_slice().iter().zip(b.as_slice()).all(|(x, y)| (x - y).norm() <= rel * x.norm().max(y.norm()))
}

pub fn poisson_semigroup() -> Result<(), String> {
    check((coeffs_upto(24), 0.0..=1.0f64, 0.0..=1.0f64), |(u, r, s)| {
        let once = poisson_dilate(&u, r * s);
        let twice = poisson_dilate(&poisson_dilate(&u, r), s);
        prop_assert!(close(&once, &twice, 1e-13), "{:?} vs {:?}", once, twice);
        Ok(())
    })
}

pub fn rotation_equivariance() -> Result<(), String> {
    let symbol = vec(-2.0..2.0f64, 25);
    check((coeffs_upto(24), -PI..PI, 0.0..1.0f64, symbol), |(u, theta, r, sym)| {
        let radial = |v: &CoeffVector| multiplier(v, |n| Complex64::new(sym[n.unsigned_abs() as usize], 0.0));
        let ops: [(&str, Box<dyn Fn(&CoeffVector) -> CoeffVector>); 4] = [
            ("hilbert", Box::new(hilbert)),
            ("analytic_projection", Box::new(analytic_projection)),
            ("poisson_dilate", Box::new(move |v: &CoeffVector| poisson_dilate(v, r))),
            ("radial multiplier", Box::new(radial)),
        ];
        for (name, op) in ops.iter() {
            let a = op(&rotate(&u, theta));
            let b = rotate(&op(&u), theta);
            prop_assert!(close(&a, &b, 1e-14), "{} does not commute with rotation", name);
        }
        Ok(())
    })
}

pub fn evaluate_matches_dilated_synthesis() -> Result<(), String> {
    let input = (coeffs_upto(24), 0.0..0.999f64).prop_flat_map(|(u, r)| {
        let lo = 2 * u.n_max() + 1;
        (Just(u), Just(r), lo..lo + 40)
    });
    check(input, |(u, r, m)| {
        let g = synthesize(&poisson_dilate(&u, r), m).map_err(|e| fail(e.to_string()))?;
        for k in 0..m {
            let z = Complex64::from_polar(r, g.theta(k));
            let v = evaluate(&u, z).map_err(|e| fail(e.to_string()))?;
            prop_assert!((v - g.samples()[k]).norm() <= 1e-12, "k = {}: {} vs {}", k, v, g.samples()[k]);
        }
        Ok(())
    })
}

pub fn hmu_norm_axioms() -> Result<(), String> {
    let input = (0usize..16).prop_flat_map(|n| (coeffs(n), coeffs(n), radial_measure(), -5.0..5.0f64, -5.0..5.0f64));
    check(input, |(u, v, mu, a, b)| {
        let lambda = Complex64::new(a, b);
        let nu = hmu_norm(&u, &mu);
        let scaled = hmu_norm(&u.scale(lambda), &mu);
        prop_assert!((scaled - lambda.norm() * nu).abs() <= 1e-14 * scaled.max(1e-300), "homogeneity");
        let sum = hmu_norm(&(&u + &v), &mu);
        let bound = nu + hmu_norm(&v, &mu);
        prop_assert!(sum <= bound * (1.0 + 1e-15), "triangle: {} > {}", sum, bound);
        Ok(())
    })
}

pub fn hmu_pythagoras() -> Result<(), String> {
    check((coeffs_upto(32), radial_measure()), |(u, mu)| {
        let q = analytic_projection(&u);
        let total = hmu_norm(&u, &mu).powi(2);
        let analytic = a2_norm(&q, &mu).map_err(|e| fail(e.to_string()))?.powi(2);
        let rest = hmu_norm(&(&u - &q), &mu).powi(2);
        prop_assert!((total - analytic - rest).abs() <= 1e-13 * total, "{} vs {} + {}", total, analytic, rest);
        Ok(())
    })
}

/// The identity is checked in two forms. The grid coefficient must match the
/// aliased sum `Σ_j ŵ(n + jm)` to `1e-9` for every Carleson measure; it must
/// match `sgn(n) σ_n` itself to `1e-6` whenever `w_σ` is regular enough at
/// `θ = 0` for the aliasing term to be that small. With `p = 0` at `r = 1`
/// `w_σ` jumps and the aliasing term is of order `n/m²`.
pub fn w_sigma_fourier_identity() -> Result<(), String> {
    const M: usize = 4096;
    super::check_n(super::CASES, carleson_measure(), |mu| {
        let w = w_sigma(&mu, M);
        prop_assert!(w.bounded);
        let c = analyze(&w.grid, 64).map_err(|e| fail(e.to_string()))?;
        // A boundary exponent p makes w_σ behave like |θ|^p at 0, and the
        // aliasing error of the m-point rule, about n·m^{-(p+2)}, only stays
        // below 1e-6 for |n| <= 64 once p >= 1/2.
        let rough = mu.pieces().iter().any(|pc| pc.b == 1.0 && pc.p < 0.5);
        for n in -64i64..=64 {
            let v = c.get(n);
            prop_assert!(v.im.abs() <= 1e-12, "n = {}: {}", n, v);
            if !rough {
                let exact = n.signum() as f64 * mu.moment(n.unsigned_abs() as usize);
                prop_assert!((v - exact).norm() <= 1e-6, "n = {}: {} vs {}", n, v, exact);
            }
        }
        // the full aliased sum holds for every measure; a spread of
        // frequencies keeps the slowly converging oracle affordable
        for n in [1i64, 2, 3, 5, 8, 13, 21, 34, 55, 64] {
            for n in [n, -n] {
                let (v, alias) = (c.get(n).re, aliased_w_coefficient(&mu, n, M));
                prop_assert!((v - alias).abs() <= 1e-9, "n = {}: {} vs alias {}", n, v, alias);
            }
        }
        Ok(())
    })
}

pub fn poisson_sup_cofinite() -> Result<(), String> {
    let theta = chebyshev_theta_grid(256);
    let grid = default_delta_grid();
    let p = prop_oneof![Just(0.0), Just(-0.5), -0.95..3.0f64];
    check((0.1..3.0f64, p), |(c, p)| {
        let mu = RadialMeasure::power(c, p, 0.0);
        let ps = poisson_sup(&mu, &theta);
        let box_test = mu.radial_carleson(&grid);
        prop_assert_eq!(ps.is_finite(), box_test.sup_ratio.is_finite());
        prop_assert_eq!(ps.is_finite(), p >= 0.0);
        Ok(())
    })
}

pub fn cauchy_bound_squared() -> Result<(), String> {
    check(radial_measure(), |mu| {
        let m = cauchy_kernel_bound(&mu);
        let s = mu.singular_integral();
        if s.is_infinite() {
            prop_assert!(m.is_infinite());
        } else {
            prop_assert!((m * m - s).abs() <= 2.0 * f64::EPSILON * s, "{} vs {}", m * m, s);
        }
        Ok(())
    })
}

const TOL: f64 = 1e-5;

fn small_problem() -> impl Strategy<Value = (CoeffVector, RadialMeasure, usize)> {
    (1usize..=4, prop_oneof![Just(16usize), Just(32usize)], radial_measure())
        .prop_flat_map(|(n, m, mu)| (coeffs(n), Just(mu), Just(m)))
}

fn solve(u: &CoeffVector, mu: &RadialMeasure, m: usize) -> Result<carleson_core::sumnorm::CertifiedNorm, TestCaseError> {
    let r = SumNormSolver::new(mu, u.n_max(), m)
        .and_then(|s| s.solve(u, &SolverOptions::with_tol(TOL)))
        .map_err(|e| fail(e.to_string()))?;
    if !r.converged {
        return Err(fail(format!("solver stopped with gap {:e}", r.gap)));
    }
    Ok(r)
}

pub fn weak_duality() -> Result<(), String> {
    let input = small_problem().prop_flat_map(|(u, mu, m)| {
        let phi = vec((-3.0..3.0f64, -3.0..3.0f64), m);
        (Just(u), Just(mu), phi)
    });
    check(input, |(u, mu, phi)| {
        let phi = GridFunction::new(phi.into_iter().map(|(a, b)| Complex64::new(a, b)).collect());
        let r = solve(&u, &mu, phi.m())?;
        let d = dual_bound(&u, &phi, &mu).map_err(|e| fail(e.to_string()))?;
        prop_assert!(d <= r.upper + TOL * r.upper, "dual {} above upper {}", d, r.upper);
        prop_assert!(r.lower <= r.upper);
        Ok(())
    })
}

pub fn sum_norm_axioms() -> Result<(), String> {
    let input = small_problem().prop_flat_map(|(u, mu, m)| {
        (coeffs(u.n_max()), Just(u), Just(mu), Just(m), -4.0..4.0f64, -4.0..4.0f64)
    });
    check(input, |(v, u, mu, m, a, b)| {
        let lambda = Complex64::new(a, b);
        prop_assume!(lambda.norm() > 1e-3);
        let nu = solve(&u, &mu, m)?;
        let nl = solve(&u.scale(lambda), &mu, m)?;
        let expected = lambda.norm() * nu.upper;
        prop_assert!((nl.upper - expected).abs() <= TOL * expected.max(nl.upper), "homogeneity: {} vs {}", nl.upper, expected);
        let nv = solve(&v, &mu, m)?;
        let nsum = solve(&(&u + &v), &mu, m)?;
        let bound = nu.upper + nv.upper;
        prop_assert!(nsum.upper <= bound + 2.0 * TOL * bound, "triangle: {} > {}", nsum.upper, bound);
        Ok(())
    })
}

/// Enlarging `μ` can only raise the true value, so each certified endpoint
/// can fall by at most the relative tolerance of the other interval.
pub fn sum_norm_monotone_in_weight() -> Result<(), String> {
    let input = small_problem().prop_flat_map(|(u, mu, m)| (Just(u), Just(mu), Just(m), radial_measure()));
    check(input, |(u, mu, m, extra)| {
        let before = solve(&u, &mu, m)?;
        let after = solve(&u, &mu.plus(&extra), m)?;
        prop_assert!(after.upper >= before.upper - TOL * before.upper, "upper fell: {} -> {}", before.upper, after.upper);
        prop_assert!(after.lower >= before.lower - TOL * after.upper, "lower fell: {} -> {}", before.lower, after.lower);
        Ok(())
    })
}

/// Instances with `N <= 2`, `M <= 16` against the interior-point solution.
pub fn oracle_bracketing() -> Result<(), String> {
    let input = (0usize..=2, radial_measure()).prop_flat_map(|(n, mu)| (coeffs(n), Just(mu), (2 * n + 1)..=16));
    check(input, |(u, mu, m)| {
        let r = solve(&u, &mu, m)?;
        let opt = super::socp_sum_norm(&u, &mu, m);
        let slack = 1e-8 * r.upper;
        prop_assert!(r.lower - slack <= opt && opt <= r.upper + slack, "optimum {} outside [{}, {}]", opt, r.lower, r.upper);
        prop_assert!(r.gap <= 1e-4 * r.upper);
        Ok(())
    })
}

fn small_settings() -> RatioSettings {
    RatioSettings { grid: 16, solver: SolverOptions::with_tol(TOL) }
}

/// Exact for `λ = ±2^k`, where rescaling is exact in floating point; for a
/// general complex `λ` the iteration runs on a rounded copy of `u/‖u‖` and
/// agrees to the solver tolerance.
pub fn ratio_scale_invariance() -> Result<(), String> {
    let input = (radial_measure(), coeffs(4), -10i32..=10, any::<bool>(), -3.0..3.0f64, -3.0..3.0f64);
    check(input, |(mu, u, k, neg, a, b)| {
        let lab = RatioLab::new(&mu, 4, small_settings()).map_err(|e| fail(e.to_string()))?;
        let pair = adapted_pair(&mu, 4, |n| 1.5 * n.signum() as f64).map_err(|e| fail(e.to_string()))?;
        let pow2 = if neg { -(2f64.powi(k)) } else { 2f64.powi(k) };
        let general = Complex64::new(a, b);
        prop_assume!(general.norm() > 1e-3);
        type Ratio<'a> = Box<dyn Fn(&CoeffVector) -> f64 + 'a>;
        let kinds: [(&str, Ratio); 3] = [
            ("bbb", Box::new(|v: &CoeffVector| lab.bbb_ratio(v).unwrap().ratio)),
            ("adapted", Box::new(|v: &CoeffVector| lab.adapted_ratio(v, &pair).unwrap().ratio)),
            ("embedding", Box::new(|v: &CoeffVector| lab.embedding_ratio(&analytic_projection(v)).unwrap().ratio)),
        ];
        for (name, ratio) in kinds.iter() {
            let base = ratio(&u);
            prop_assert_eq!(ratio(&(&u * pow2)), base, "{} with λ = {}", name, pow2);
            let r = ratio(&u.scale(general));
            prop_assert!((r - base).abs() <= 2.0 * TOL * base, "{} with λ = {}: {} vs {}", name, general, r, base);
        }
        Ok(())
    })
}

pub fn embedding_ratio_lower_side() -> Result<(), String> {
    let input = (1usize..=8, radial_measure()).prop_flat_map(|(n, mu)| (coeffs(n), Just(mu)));
    check(input, |(u, mu)| {
        let f = analytic_projection(&u);
        prop_assume!(!f.is_zero());
        let settings = RatioSettings { grid: 32, solver: SolverOptions::with_tol(TOL) };
        let lab = RatioLab::new(&mu, u.n_max(), settings).map_err(|e| fail(e.to_string()))?;
        let r = lab.embedding_ratio(&f).map_err(|e| fail(e.to_string()))?;
        prop_assert!(r.ratio >= 1.0 - 10.0 * TOL, "ratio {}", r.ratio);
        Ok(())
    })
}

/// `‖Q₊F_N‖²` never decreases along the list. When `Σσ_j = ∞` it exceeds
/// `(π/2) Σ_{j<=N/2} σ_j`, a lower bound that grows without limit; when the
/// series converges it stays below `2π Σ σ_j`.
pub fn fejer_dichotomy() -> Result<(), String> {
    let n_list: Vec<usize> = (0..=10).map(|k| 1 << k).collect();
    check(radial_measure(), |mu| {
        let rows = fejer_experiment(&mu, &n_list).map_err(|e| fail(e.to_string()))?;
        for w in rows.windows(2) {
            prop_assert!(w[1].analytic_part_sq >= w[0].analytic_part_sq, "decrease at N = {}", w[1].n);
        }
        let total = mu.singular_integral();
        if total.is_infinite() {
            let moments = mu.moments(1024);
            for r in &rows {
                let half: f64 = moments[..=r.n / 2].iter().sum();
                prop_assert!(r.analytic_part_sq >= 0.5 * PI * half * (1.0 - 1e-14), "N = {}", r.n);
            }
            prop_assert!(rows[10].analytic_part_sq > rows[9].analytic_part_sq);
        } else {
            for r in &rows {
                prop_assert!(r.analytic_part_sq <= total * (1.0 + 1e-12), "N = {}: {} > {}", r.n, r.analytic_part_sq, total);
            }
        }
        Ok(())
    })
}

pub fn corpus_doubling() -> Result<(), String> {
    check((carleson_measure(), 1usize..=3, any::<u64>()), |(mu, count, seed)| {
        let small = CorpusSpec::new(4, count, seed);
        let large = CorpusSpec::new(4, 2 * count, seed);
        let a = corpus_scan(&small, &mu, RatioKind::Bbb, small_settings()).map_err(|e| fail(e.to_string()))?;
        let b = corpus_scan(&large, &mu, RatioKind::Bbb, small_settings()).map_err(|e| fail(e.to_string()))?;
        prop_assert_eq!(&b.ratios[..count], &a.ratios[..]);
        let new_max = b.ratios[count..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(b.max_ratio, a.max_ratio.max(new_max));
        Ok(())
    })
}

pub fn w_pi_odd_and_sign() -> Result<(), String> {
    check((vertical_measure(true), -8.0..8.0f64), |(pi, lx)| {
        let x = 10f64.powf(lx);
        let (plus, minus) = (w_pi(&pi, x), w_pi(&pi, -x));
        prop_assert_eq!(minus, -plus);
        prop_assert!(plus.re == 0.0);
        prop_assert!((-Complex64::i() * plus).re >= 0.0);
        Ok(())
    })
}

fn line_piece() -> impl Strategy<Value = LinePiece> {
    let p = prop_oneof![Just(0.0), Just(1.0), Just(-0.5), -0.95..2.5f64];
    (0u8..4, 0.1..5.0f64, 0.1..3.0f64, p).prop_map(|(shape, l, c, p)| {
        let (a, b) = match shape {
            0 => (f64::NEG_INFINITY, f64::INFINITY),
            1 => (-l, l),
            2 => (l, f64::INFINITY),
            _ => (f64::NEG_INFINITY, -l),
        };
        LinePiece { a, b, c, p }
    })
}

pub fn garnett_cofinite() -> Result<(), String> {
    let grid = default_garnett_grid();
    let atom = (-5.0..5.0f64, 0.1..2.0f64).prop_map(|(t, w)| LineAtom { t, w });
    let nu = (vec(atom, 0..3), vec(line_piece(), 0..3)).prop_filter_map("invalid", |(a, p)| {
        if a.is_empty() && p.is_empty() {
            None
        } else {
            LineMeasure::new(a, p).ok()
        }
    });
    check(nu, |nu| {
        let r = garnett_check(&nu, &grid, &grid);
        prop_assert_eq!(r.poisson_sup.is_finite(), r.box_sup.is_finite(), "{:?}", r);
        let (pf, bf) = nu.classify();
        prop_assert_eq!(pf, bf);
        Ok(())
    })
}

fn band_bump() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.3..3.5f64, 0.05..0.5f64, -1.0..1.0f64, -1.0..1.0f64)
}

/// A sum of Gaussian bumps in frequency, zero on `|ξ| < 1/4`.
fn band_signal(bumps: &[(f64, f64, f64, f64)], sign: f64) -> BandSignal {
    BandSignal::from_fn(4.0, 1.0 / 64.0, |xi| {
        // support on one side of the origin only
        if sign * xi < 0.25 {
            return Complex64::new(0.0, 0.0);
        }
        bumps
            .iter()
            .map(|&(c, w, a, b)| Complex64::new(a, b) * (-((xi - sign * c) / w).powi(2)).exp())
            .sum()
    })
    .unwrap()
}

pub fn b2h_additivity() -> Result<(), String> {
    let input = (vec(band_bump(), 1..4), vec(band_bump(), 1..4), vertical_measure(false), -2.0..2.0f64);
    check(input, |(b1, b2, pi, cut)| {
        let g = band_signal(&b1, 1.0);
        let h = band_signal(&b2, -1.0);
        // split one signal at `cut` so both pieces have disjoint supports
        let lo: Vec<Complex64> = g.values().iter().enumerate().map(|(k, v)| if g.xi(k) < cut { *v } else { Complex64::new(0.0, 0.0) }).collect();
        let hi: Vec<Complex64> = g.values().iter().zip(&lo).map(|(v, l)| v - l).collect();
        let lo = BandSignal::new(g.xi_max(), g.d_xi(), lo).unwrap();
        let hi = BandSignal::new(g.xi_max(), g.d_xi(), hi).unwrap();
        for conv in [LaplaceConvention::Two, LaplaceConvention::FourPi] {
            let whole = b2h_norm(&g, &pi, conv).powi(2);
            let parts = b2h_norm(&lo, &pi, conv).powi(2) + b2h_norm(&hi, &pi, conv).powi(2);
            prop_assert!((whole - parts).abs() <= 1e-12 * whole, "{} vs {}", whole, parts);
            // and across the sign of ξ
            let sum: Vec<Complex64> = g.values().iter().zip(h.values()).map(|(a, b)| a + b).collect();
            let sum = BandSignal::new(g.xi_max(), g.d_xi(), sum).unwrap();
            let whole = b2h_norm(&sum, &pi, conv).powi(2);
            let parts = b2h_norm(&g, &pi, conv).powi(2) + b2h_norm(&h, &pi, conv).powi(2);
            prop_assert!((whole - parts).abs() <= 1e-12 * whole, "{} vs {}", whole, parts);
        }
        Ok(())
    })
}

fn packet() -> impl Strategy<Value = GaussianPacket> {
    (-2.0..2.0f64, -2.0..2.0f64, -5.0..5.0f64, 0.5..3.0f64, -2.0..2.0f64).prop_map(|(a, b, center, width, frequency)| {
        GaussianPacket { amplitude: Complex64::new(a, b), center, width, frequency }
    })
}

/// Random admissible triples: `h` a sum of packets, `ĝ₀ = -ĥ` on `ξ < 0`
/// plus an analytic packet, so that `f̂₀ = ĝ₀ + ĥ` vanishes for `ξ < 0`.
pub fn stability_bound() -> Result<(), String> {
    let input = (vec(packet(), 1..4), packet(), 0.0..3.0f64, vertical_measure(true), 0.5..20.0f64);
    check(input, |(hs, extra, extra_scale, pi, r)| {
        prop_assume!(pi.truncated(r).is_some());
        let h = LineSignal::from_fn(32.0, 4096, |x| hs.iter().map(|p| p.eval(x)).sum());
        let inst = StabilityInstance::new(
            h,
            |xi| if xi >= 0.0 { extra_scale * extra.transform(xi) } else { Complex64::new(0.0, 0.0) },
            8.0,
            1.0 / 32.0,
        )
        .map_err(|e| fail(e.to_string()))?;
        let rep = inst.ratio(&pi, r).map_err(|e| fail(e.to_string()))?;
        prop_assert!(rep.ratio <= rep.bound + 1e-6, "{:?}", rep);
        Ok(())
    })
}

pub fn b2h_matches_slices() -> Result<(), String> {
    let l_grid = [1e-9, 1e-6, 1e-3, 1e-1];
    check((vec(band_bump(), 1..4), any::<bool>(), vertical_measure(true)), |(bumps, neg, pi)| {
        let g = band_signal(&bumps, if neg { -1.0 } else { 1.0 });
        let direct = b2h_norm(&g, &pi, LaplaceConvention::FourPi);
        let slices = b2h_norm_by_slices(&g, &pi, &l_grid);
        prop_assert!((direct - slices).abs() <= 1e-3 * direct, "{} vs {}", direct, slices);
        Ok(())
    })
}
