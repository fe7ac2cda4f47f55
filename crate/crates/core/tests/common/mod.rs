//! Shared strategies, the seeded runner and the conic-program oracle.
#![allow(dead_code)]

pub mod invariants;

use std::f64::consts::PI;

use carleson_core::measure::{RadialAtom, RadialPiece, VerticalAtom, VerticalPiece};
use carleson_core::{CoeffVector, RadialMeasure, VerticalMeasure};
use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};
use num_complex::Complex64;
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};

pub const SEED: u64 = 42;
pub const CASES: u32 = 200;

/// A runner with `cases` cases whose random stream depends only on [`SEED`].
pub fn runner(cases: u32) -> TestRunner {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&SEED.to_le_bytes());
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &seed))
}

/// Runs `test` on [`CASES`] inputs and reports the (shrunk) failure, if any.
pub fn check<S, F>(strategy: S, test: F) -> Result<(), String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    check_n(CASES, strategy, test)
}

pub fn check_n<S, F>(cases: u32, strategy: S, test: F) -> Result<(), String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    match runner(cases).run(&strategy, test) {
        Ok(()) => Ok(()),
        Err(TestError::Fail(why, input)) => Err(format!("{why} for input {input:?}")),
        Err(TestError::Abort(why)) => Err(format!("aborted: {why}")),
    }
}

fn radial_atom() -> impl Strategy<Value = RadialAtom> {
    (0.0..0.99f64, 0.1..2.0f64).prop_map(|(r, w)| RadialAtom { r, w })
}

/// Pieces either reach `r = 1` or stop short of it; `p_lo` bounds the exponent.
fn radial_piece(p_lo: f64) -> impl Strategy<Value = RadialPiece> {
    (0.0..0.9f64, 0.0..1.0f64, any::<bool>(), 0.1..2.0f64, p_lo..3.0f64, 0.0..3.0f64).prop_map(
        |(a, frac, to_one, c, p, q)| {
            let b = if to_one { 1.0 } else { a + (1.0 - a) * (0.05 + 0.9 * frac) };
            RadialPiece { a, b, c, p, q }
        },
    )
}

/// Finite radial measures: up to three atoms and three pieces with `p > -1`.
pub fn radial_measure() -> impl Strategy<Value = RadialMeasure> {
    (vec(radial_atom(), 0..3), vec(radial_piece(-0.9), 0..3))
        .prop_filter_map("empty measure", |(a, p)| RadialMeasure::new(a, p).ok())
}

/// Radial measures passing the box test (all exponents `p >= 0`).
pub fn carleson_measure() -> impl Strategy<Value = RadialMeasure> {
    (vec(radial_atom(), 0..3), vec(radial_piece(0.0), 0..3))
        .prop_filter_map("empty measure", |(a, p)| RadialMeasure::new(a, p).ok())
}

fn vertical_atom() -> impl Strategy<Value = VerticalAtom> {
    (0.01..20.0f64, 0.1..2.0f64).prop_map(|(y, w)| VerticalAtom { y, w })
}

/// Vertical measures; with `carleson` the exponents respect the box test
/// (`p >= 0` at 0 and `p <= 0` on unbounded pieces).
pub fn vertical_measure(carleson: bool) -> impl Strategy<Value = VerticalMeasure> {
    let piece = (any::<bool>(), 0.05..5.0f64, 0.1..10.0f64, any::<bool>(), 0.1..2.0f64, -0.9..1.5f64).prop_map(
        move |(from_zero, a, len, bounded, c, p)| {
            let a = if from_zero { 0.0 } else { a };
            let b = if bounded { a + len } else { f64::INFINITY };
            let p = match (carleson, a == 0.0, bounded) {
                (true, true, false) => 0.0,
                (true, true, true) => p.abs(),
                (true, false, false) => -p.abs(),
                _ => p,
            };
            VerticalPiece { a, b, c, p }
        },
    );
    (vec(vertical_atom(), 0..3), vec(piece, 0..3))
        .prop_filter_map("empty measure", |(a, p)| VerticalMeasure::new(a, p).ok())
}

/// Coefficient vectors of degree exactly `n_max` with entries in the unit box.
pub fn coeffs(n_max: usize) -> impl Strategy<Value = CoeffVector> {
    vec((-1.0..1.0f64, -1.0..1.0f64), 2 * n_max + 1)
        .prop_map(|v| CoeffVector::from_slice(&v.iter().map(|&(a, b)| Complex64::new(a, b)).collect::<Vec<_>>()).unwrap())
        .prop_filter("zero vector", |u| !u.is_zero())
}

/// Boundary samples `u(θ_k)`, `θ_k = 2πk/M`, by direct summation.
pub fn samples(u: &CoeffVector, m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / m as f64;
            u.iter().map(|(n, c)| c * Complex64::from_polar(1.0, n as f64 * theta)).sum()
        })
        .collect()
}

/// Optimal value of
/// `min_f ‖D f‖₂ + (1/M) Σ_k |u(θ_k) - f(θ_k)|`, `D = diag (2πσ_|n|)^{1/2}`,
/// solved as a second-order cone program by an interior-point method.
///
/// Variables are `(Re f, Im f, t, r_0..r_{M-1})`; the cones are
/// `(t, D Re f, D Im f)` and `(r_k, Re(u - f)(θ_k), Im(u - f)(θ_k))`.
pub fn socp_sum_norm(u: &CoeffVector, mu: &RadialMeasure, m: usize) -> f64 {
    let n_max = u.n_max();
    let len = 2 * n_max + 1;
    let nv = 2 * len + 1 + m;
    let t = 2 * len;
    let r0 = t + 1;
    let s = samples(u, m);
    let d: Vec<f64> = (0..len)
        .map(|j| (2.0 * PI * mu.moment((j as i64 - n_max as i64).unsigned_abs() as usize)).sqrt())
        .collect();

    let mut q = vec![0.0; nv];
    q[t] = 1.0;
    for k in 0..m {
        q[r0 + k] = 1.0 / m as f64;
    }
    let (mut rows, mut cols, mut vals) = (Vec::new(), Vec::new(), Vec::new());
    let mut b = Vec::new();
    let mut push = |row: usize, col: usize, v: f64| {
        rows.push(row);
        cols.push(col);
        vals.push(v);
    };
    // Ax + s = b with s in the cone: s = (t, D Re f, D Im f)
    push(0, t, -1.0);
    b.push(0.0);
    for j in 0..len {
        push(1 + j, j, -d[j]);
        push(1 + len + j, len + j, -d[j]);
    }
    b.resize(1 + 2 * len, 0.0);
    let mut cones = vec![SupportedConeT::SecondOrderConeT(1 + 2 * len)];
    for k in 0..m {
        let row = 1 + 2 * len + 3 * k;
        let theta = 2.0 * PI * k as f64 / m as f64;
        push(row, r0 + k, -1.0);
        // s = (r_k, Re s_k - Re(Kf)_k, Im s_k - Im(Kf)_k)
        for j in 0..len {
            let n = j as f64 - n_max as f64;
            let (sin, cos) = (n * theta).sin_cos();
            push(row + 1, j, cos);
            push(row + 1, len + j, -sin);
            push(row + 2, j, sin);
            push(row + 2, len + j, cos);
        }
        b.extend_from_slice(&[0.0, s[k].re, s[k].im]);
        cones.push(SupportedConeT::SecondOrderConeT(3));
    }
    let a = CscMatrix::new_from_triplets(b.len(), nv, rows, cols, vals);
    let p = CscMatrix::zeros((nv, nv));
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .tol_gap_abs(1e-11)
        .tol_gap_rel(1e-11)
        .tol_feas(1e-11)
        .max_iter(500)
        .build()
        .unwrap();
    let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings).unwrap();
    solver.solve();
    assert!(
        matches!(solver.solution.status, SolverStatus::Solved | SolverStatus::AlmostSolved),
        "conic oracle status {:?}",
        solver.solution.status
    );
    solver.solution.obj_val
}

/// Aliased Fourier coefficient `Σ_j sgn(n + jm) σ_|n+jm|` of `w_σ` on `m`
/// nodes. The pairs `j, -j` are summed exactly up to `J` and the tail, which
/// decays like `j^{-2}` or faster, is closed by its asymptotic form. The pairs
/// are differences of a completely monotone sequence, so they decrease in
/// `j`; the sum stops early once they drop below `1e-20`.
pub fn aliased_w_coefficient(mu: &RadialMeasure, n: i64, m: usize) -> f64 {
    const J: i64 = 4000;
    let m = m as i64;
    let pair = |j: i64| mu.moment((n + j * m).unsigned_abs() as usize) - mu.moment((n - j * m).unsigned_abs() as usize);
    let mut total = n.signum() as f64 * mu.moment(n.unsigned_abs() as usize);
    let mut last = 0.0;
    for j in 1..=J {
        last = pair(j);
        total += last;
        if last.abs() < 1e-20 {
            return total;
        }
    }
    let jf = J as f64;
    total + last * jf * jf / (jf + 0.5)
}
