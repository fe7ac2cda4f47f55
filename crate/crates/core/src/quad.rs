//! Adaptive Gauss–Legendre quadrature and power-law weighted integrals.
//!
//! All integrands in this crate are smooth inside each piece of a measure,
//! so a nested Gauss–Legendre comparison with bisection is enough. Endpoint
//! power singularities `x^p` and `(1 - x)^p` are removed by the substitution
//! `s = x^(p+1)` before integrating.

use std::sync::OnceLock;

const ORDER: usize = 20;
const MAX_DEPTH: usize = 60;
const MAX_INTERVALS: usize = 200_000;

/// Result of a quadrature with an estimate of the absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Applies the rule on `[a, b]`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(ORDER))
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
///
/// An interval is accepted when the rule on the whole interval agrees with
/// the sum over its two halves to within its share of `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Estimate {
    if a == b {
        return Estimate { value: 0.0, error: 0.0 };
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let gl = rule();
    let width = hi - lo;
    let mut stack = vec![(lo, hi, gl.apply(&f, lo, hi), 0usize)];
    let mut value = 0.0;
    let mut error = 0.0;
    let mut visited = 0usize;
    while let Some((x0, x1, whole, depth)) = stack.pop() {
        visited += 1;
        let mid = 0.5 * (x0 + x1);
        let left = gl.apply(&f, x0, mid);
        let right = gl.apply(&f, mid, x1);
        let diff = (left + right - whole).abs();
        let share = abs_tol * (x1 - x0) / width;
        if diff <= share.max(f64::EPSILON * (left + right).abs())
            || depth >= MAX_DEPTH
            || visited >= MAX_INTERVALS
        {
            value += left + right;
            error += diff;
        } else {
            stack.push((x0, mid, left, depth + 1));
            stack.push((mid, x1, right, depth + 1));
        }
    }
    Estimate { value: sign * value, error }
}

/// `∫_a^b (1 - r)^p g(r) dr` for `0 <= a < b <= 1` and `p > -1`.
///
/// Uses `s = (1 - r)^(p+1)`, which turns the weight into a constant.
pub fn integrate_boundary_power<F: Fn(f64) -> f64>(
    g: F,
    p: f64,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Estimate {
    debug_assert!(p > -1.0);
    let e = p + 1.0;
    let s_lo = (1.0 - b).powf(e);
    let s_hi = (1.0 - a).powf(e);
    let inv = 1.0 / e;
    let est = integrate(
        |s: f64| g(1.0 - s.powf(inv)),
        s_lo,
        s_hi,
        abs_tol * e,
    );
    Estimate { value: est.value * inv, error: est.error * inv }
}

/// `∫_a^b x^p g(x) dx` for `0 <= a < b <= ∞`.
///
/// Near zero the weight is removed by `s = x^(p+1)` (which needs `p > -1`
/// when `a == 0`); an infinite upper limit is mapped through `x = 1/t`.
pub fn integrate_power<F: Fn(f64) -> f64>(
    g: F,
    p: f64,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Estimate {
    debug_assert!(a >= 0.0 && a < b);
    let weighted = |x: f64| if p == 0.0 { g(x) } else { x.powf(p) * g(x) };
    let mut total = Estimate { value: 0.0, error: 0.0 };
    let mut add = |e: Estimate| {
        total.value += e.value;
        total.error += e.error;
    };
    // Split into [a, c0] near zero, [c0, c1] regular, [c1, ∞) tail.
    let c0 = if a == 0.0 { b.min(1.0) } else { a };
    let c1 = if b.is_infinite() { c0.max(1.0) } else { b };
    let tol = abs_tol / 3.0;
    if a == 0.0 {
        let e = p + 1.0;
        let inv = 1.0 / e;
        let est = integrate(|s: f64| g(s.powf(inv)), 0.0, c0.powf(e), tol * e);
        add(Estimate { value: est.value * inv, error: est.error * inv });
    }
    if c1 > c0 {
        add(integrate(weighted, c0, c1, tol));
    }
    if b.is_infinite() {
        let est = integrate(
            |t: f64| {
                if t == 0.0 {
                    return 0.0;
                }
                let x = 1.0 / t;
                let v = weighted(x) * x * x;
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            0.0,
            1.0 / c1,
            tol,
        );
        add(est);
    }
    total
}
