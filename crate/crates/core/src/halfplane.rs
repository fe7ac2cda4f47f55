//! The upper half-plane side: the weight `W^Π`, `𝓛_Π`-weighted norms of
//! band-limited signals, the stability inequality and Garnett's criterion.
//!
//! Fourier transforms use `f̂(ξ) = ∫ f(x) e^{-2πixξ} dx`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::measure::{default_y_grid, log_grid, LaplaceConvention, VerticalMeasure};
use crate::quad;
use crate::report::{NormMethod, NormReport};

const QUAD_TOL: f64 = 1e-12;

/// `-i W^Π(x) = ∫ πx / (y² + π²x²) Π(dy)`, a real odd function.
pub fn w_pi_real(pi: &VerticalMeasure, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let px = PI * x;
    let atoms: f64 = pi.atoms().iter().map(|at| at.w * px / (at.y * at.y + px * px)).sum();
    let pieces: f64 = pi
        .pieces()
        .iter()
        .map(|pc| {
            if pc.p == 0.0 {
                // ∫_a^b πx / (y² + π²x²) dy = arctan(b/πx) - arctan(a/πx)
                pc.c * ((pc.b / px).atan() - (pc.a / px).atan())
            } else {
                // Split at the peak of the kernel, y = π|x|.
                let k = |y: f64| px / (y * y + px * px);
                let mid = px.abs().clamp(pc.a, pc.b);
                let lo = if mid > pc.a { quad::integrate_power(k, pc.p, pc.a, mid, QUAD_TOL).value } else { 0.0 };
                let hi = if pc.b > mid { quad::integrate_power(k, pc.p, mid, pc.b, QUAD_TOL).value } else { 0.0 };
                pc.c * (lo + hi)
            }
        })
        .sum();
    atoms + pieces
}

/// `W^Π(x) = i ∫ πx / (y² + π²x²) Π(dy)`.
pub fn w_pi(pi: &VerticalMeasure, x: f64) -> Complex64 {
    Complex64::new(0.0, w_pi_real(pi, x))
}

/// `‖W^Π‖_∞`.
///
/// `+∞` when `Π` fails the vertical box test. A lone piece `c dy` on
/// `[0, b)` is monotone in `x` with limit `cπ/2`, which is returned in
/// closed form; otherwise the sup over 4096 log-spaced points of
/// `[1e-8, 1e8]` is refined by golden-section search (`|W|` is even, so
/// positive `x` suffice).
pub fn w_pi_sup(pi: &VerticalMeasure) -> NormReport {
    if !pi.vertical_carleson(&default_y_grid()).is_carleson {
        return NormReport::new(f64::INFINITY, NormMethod::ClosedForm, 0.0);
    }
    if pi.atoms().is_empty() && pi.pieces().len() == 1 {
        let pc = pi.pieces()[0];
        if pc.a == 0.0 && pc.p == 0.0 {
            return NormReport::new(pc.c * PI / 2.0, NormMethod::ClosedForm, 0.0);
        }
    }
    let grid = log_grid(1e-8, 1e8, 4096);
    let vals: Vec<f64> = grid.iter().map(|&x| w_pi_real(pi, x).abs()).collect();
    let (k, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let lo = grid[k.saturating_sub(1)];
    let hi = grid[(k + 1).min(grid.len() - 1)];
    let refined = golden_max(|t| w_pi_real(pi, t.exp()).abs(), lo.ln(), hi.ln(), 1e-12);
    let value = refined.max(vals[k]);
    // The grid spacing bounds how much a missed peak could hide.
    NormReport::new(value, NormMethod::GridSup, (value - vals[k]).abs().max(1e-12))
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// `C(b, Π) = (C_b + ‖W^Π‖_∞ + 1)^{1/2}`.
pub fn const_bpi(c_b: f64, pi: &VerticalMeasure) -> Result<f64> {
    if !(c_b >= 1.0) {
        return Err(Error::InvalidArgument(format!("C_b must be at least 1, got {c_b}")));
    }
    Ok((c_b + w_pi_sup(pi).value + 1.0).sqrt())
}

/// Samples of a boundary transform `ĝ₀` on `ξ_k = -Ξ + kΔξ`, `k = 0..=2Ξ/Δξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSignal {
    xi_max: f64,
    d_xi: f64,
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct BandDoc {
    xi_max: f64,
    d_xi: f64,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for BandSignal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BandDoc {
            xi_max: self.xi_max,
            d_xi: self.d_xi,
            re: self.values.iter().map(|c| c.re).collect(),
            im: self.values.iter().map(|c| c.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BandSignal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = BandDoc::deserialize(d)?;
        if doc.re.len() != doc.im.len() {
            return Err(serde::de::Error::custom("re and im differ in length"));
        }
        let values = doc.re.iter().zip(&doc.im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        BandSignal::new(doc.xi_max, doc.d_xi, values).map_err(serde::de::Error::custom)
    }
}

/// Default band: `Ξ = 32`, `Δξ = 1/64`.
pub const DEFAULT_XI_MAX: f64 = 32.0;
pub const DEFAULT_D_XI: f64 = 1.0 / 64.0;

impl BandSignal {
    pub fn new(xi_max: f64, d_xi: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(xi_max > 0.0 && d_xi > 0.0) {
            return Err(Error::InvalidArgument("band needs xi_max > 0 and d_xi > 0".into()));
        }
        let steps = 2.0 * xi_max / d_xi;
        if (steps - steps.round()).abs() > 1e-9 {
            return Err(Error::InvalidArgument("2·xi_max must be a multiple of d_xi".into()));
        }
        let len = steps.round() as usize + 1;
        if values.len() != len {
            return Err(Error::InvalidArgument(format!("band needs {len} samples, got {}", values.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument("band samples must be finite".into()));
        }
        Ok(Self { xi_max, d_xi, values })
    }

    pub fn from_fn<F: FnMut(f64) -> Complex64>(xi_max: f64, d_xi: f64, mut f: F) -> Result<Self> {
        let len = (2.0 * xi_max / d_xi).round() as usize + 1;
        let values = (0..len).map(|k| f(-xi_max + k as f64 * d_xi)).collect();
        Self::new(xi_max, d_xi, values)
    }

    pub fn zeros(xi_max: f64, d_xi: f64) -> Result<Self> {
        Self::from_fn(xi_max, d_xi, |_| Complex64::new(0.0, 0.0))
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    pub fn d_xi(&self) -> f64 {
        self.d_xi
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn xi(&self, k: usize) -> f64 {
        -self.xi_max + k as f64 * self.d_xi
    }

    pub fn xi_grid(&self) -> Vec<f64> {
        (0..self.values.len()).map(|k| self.xi(k)).collect()
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.xi_max == other.xi_max && self.d_xi == other.d_xi
    }

    /// Poisson semigroup: `ĝ_y = e^{-2πy|ξ|} ĝ₀`.
    pub fn at_height(&self, y: f64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| v * (-2.0 * PI * y * self.xi(k).abs()).exp())
            .collect();
        Self { values, ..*self }
    }

    /// `(∫ |ĝ|² dξ)^{1/2}` by the trapezoidal rule (Plancherel: the `L²(ℝ)` norm).
    pub fn l2_norm(&self) -> f64 {
        trapezoid(self.d_xi, self.values.iter().map(|v| v.norm_sqr())).sqrt()
    }
}

fn trapezoid<I: ExactSizeIterator<Item = f64>>(h: f64, vals: I) -> f64 {
    let n = vals.len();
    let mut sum = 0.0;
    for (k, v) in vals.enumerate() {
        sum += if k == 0 || k + 1 == n { 0.5 * v } else { v };
    }
    sum * h
}

/// A function on `ℝ` sampled at `x_j = x_min + j·dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSignal {
    pub x_min: f64,
    pub dx: f64,
    pub samples: Vec<Complex64>,
}

/// Default spatial grid: 8192 points on `[-64, 64)`.
pub const DEFAULT_X_MAX: f64 = 64.0;
pub const DEFAULT_X_POINTS: usize = 8192;

impl LineSignal {
    pub fn from_fn<F: FnMut(f64) -> Complex64>(x_max: f64, points: usize, mut f: F) -> Self {
        let dx = 2.0 * x_max / points as f64;
        let samples = (0..points).map(|j| f(-x_max + j as f64 * dx)).collect();
        Self { x_min: -x_max, dx, samples }
    }

    pub fn default_grid<F: FnMut(f64) -> Complex64>(f: F) -> Self {
        Self::from_fn(DEFAULT_X_MAX, DEFAULT_X_POINTS, f)
    }

    /// `‖h‖_{L¹(ℝ)}`, which is also the `h¹(ℍ)` norm of its Poisson extension.
    pub fn l1_norm(&self) -> f64 {
        trapezoid(self.dx, self.samples.iter().map(|v| v.norm()))
    }

    /// `ĥ(ξ) ≈ Σ_j h(x_j) e^{-2πi x_j ξ} dx` on the grid of `band`, by direct
    /// summation with a phase recurrence.
    pub fn transform_on(&self, xi_max: f64, d_xi: f64) -> Result<BandSignal> {
        let len = (2.0 * xi_max / d_xi).round() as usize + 1;
        let mut values = vec![Complex64::new(0.0, 0.0); len];
        for (j, h) in self.samples.iter().enumerate() {
            if *h == Complex64::new(0.0, 0.0) {
                continue;
            }
            let x = self.x_min + j as f64 * self.dx;
            let step = Complex64::from_polar(1.0, -2.0 * PI * x * d_xi);
            let mut phase = Complex64::from_polar(1.0, 2.0 * PI * x * xi_max);
            for (k, v) in values.iter_mut().enumerate() {
                // Re-anchor periodically so rounding in the recurrence stays small.
                if k % 256 == 0 {
                    phase = Complex64::from_polar(1.0, -2.0 * PI * x * (-xi_max + k as f64 * d_xi));
                }
                *v += h * phase;
                phase *= step;
            }
        }
        for v in values.iter_mut() {
            *v *= self.dx;
        }
        BandSignal::new(xi_max, d_xi, values)
    }
}

/// `‖g‖_{ℬ²(ℍ, μ)} = (∫ |ĝ₀(ξ)|² 𝓛_Π(ξ) dξ)^{1/2}`, trapezoidal in `ξ`.
pub fn b2h_norm(g: &BandSignal, pi: &VerticalMeasure, convention: LaplaceConvention) -> f64 {
    let weights: Vec<f64> = g.xi_grid().iter().map(|&xi| pi.laplace_transform(xi, convention)).collect();
    b2h_norm_with(g, &weights)
}

fn b2h_norm_with(g: &BandSignal, weights: &[f64]) -> f64 {
    trapezoid(g.d_xi, g.values.iter().zip(weights).map(|(v, w)| v.norm_sqr() * w)).sqrt()
}

/// The defining expression `sup_{L>0} (∫ ‖g_{y+L}‖²_{L²(ℝ)} Π(dy))^{1/2}`
/// over `l_grid`, with each slice mass `‖g_y‖²` taken by Plancherel from
/// `ĝ_y = e^{-2πy|ξ|} ĝ₀`. Agrees with [`b2h_norm`] under `FourPi` up to
/// quadrature error; the sup is approached as `L → 0`.
pub fn b2h_norm_by_slices(g: &BandSignal, pi: &VerticalMeasure, l_grid: &[f64]) -> f64 {
    let slice = |y: f64| g.at_height(y).l2_norm().powi(2);
    l_grid
        .iter()
        .map(|&l| pi.integrate(|y| slice(y + l), 1e-10).sqrt())
        .fold(0.0, f64::max)
}

/// Tolerance on the support and additivity preconditions.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;

/// Inputs and value of one stability-ratio evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub ratio: f64,
    pub f_norm: f64,
    pub g_norm: f64,
    pub h_norm: f64,
    /// `2 (2 + ‖W^{Π_R}‖_∞)^{1/2}`
    pub bound: f64,
    pub r: f64,
}

/// `‖f‖_{ℬ²(μ_R)} / (‖g‖_{ℬ²(μ_R)} + ‖h‖_{L¹})` for `f = g + h` analytic.
///
/// Rejects `f̂₀` with mass at negative frequencies (more than
/// [`ADMISSIBILITY_TOL`] in modulus) and inputs where `f̂₀ - ĝ₀ - ĥ`
/// exceeds the same tolerance on the band.
pub fn stability_ratio(
    f_hat0: &BandSignal,
    g_hat0: &BandSignal,
    h: &LineSignal,
    pi: &VerticalMeasure,
    r: f64,
) -> Result<StabilityReport> {
    let h_hat = h.transform_on(f_hat0.xi_max, f_hat0.d_xi)?;
    stability_ratio_with(f_hat0, g_hat0, &h_hat, h.l1_norm(), pi, r)
}

/// [`stability_ratio`] with `ĥ` and `‖h‖_{L¹}` precomputed.
pub fn stability_ratio_with(
    f_hat0: &BandSignal,
    g_hat0: &BandSignal,
    h_hat: &BandSignal,
    h_l1: f64,
    pi: &VerticalMeasure,
    r: f64,
) -> Result<StabilityReport> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("truncation height must be positive, got {r}")));
    }
    if !f_hat0.same_grid(g_hat0) || !f_hat0.same_grid(h_hat) {
        return Err(Error::Inadmissible("f̂₀, ĝ₀ and ĥ must share one frequency grid".into()));
    }
    for (k, v) in f_hat0.values.iter().enumerate() {
        if f_hat0.xi(k) < 0.0 && v.norm() > ADMISSIBILITY_TOL {
            return Err(Error::Inadmissible(format!(
                "f̂₀({}) = {v} is nonzero at a negative frequency; f must be analytic",
                f_hat0.xi(k)
            )));
        }
    }
    let residual = f_hat0
        .values
        .iter()
        .zip(&g_hat0.values)
        .zip(&h_hat.values)
        .map(|((f, g), h)| (f - g - h).norm())
        .fold(0.0, f64::max);
    if residual > ADMISSIBILITY_TOL {
        return Err(Error::Inadmissible(format!("f̂₀ - ĝ₀ - ĥ reaches {residual:e} on the band")));
    }
    let pi_r = pi
        .truncated(r)
        .ok_or_else(|| Error::InvalidArgument("Π has no mass below the truncation height".into()))?;
    let weights: Vec<f64> = f_hat0
        .xi_grid()
        .iter()
        .map(|&xi| pi_r.laplace_transform(xi, LaplaceConvention::FourPi))
        .collect();
    let f_norm = b2h_norm_with(f_hat0, &weights);
    let g_norm = b2h_norm_with(g_hat0, &weights);
    let ratio = if h_l1 == 0.0 && f_norm == g_norm { 1.0 } else { f_norm / (g_norm + h_l1) };
    Ok(StabilityReport {
        ratio,
        f_norm,
        g_norm,
        h_norm: h_l1,
        bound: 2.0 * (2.0 + w_pi_sup(&pi_r).value).sqrt(),
        r,
    })
}

/// `h(x) = A e^{-π(x-x₀)²/w²} e^{2πiξ₀x}` with `ĥ(ξ) = A w e^{-πw²(ξ-ξ₀)²} e^{-2πi x₀(ξ-ξ₀)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub amplitude: Complex64,
    pub center: f64,
    pub width: f64,
    pub frequency: f64,
}

impl GaussianPacket {
    pub fn eval(&self, x: f64) -> Complex64 {
        let z = (x - self.center) / self.width;
        self.amplitude * (-PI * z * z).exp() * Complex64::from_polar(1.0, 2.0 * PI * self.frequency * x)
    }

    pub fn transform(&self, xi: f64) -> Complex64 {
        let d = xi - self.frequency;
        self.amplitude
            * self.width
            * (-PI * self.width * self.width * d * d).exp()
            * Complex64::from_polar(1.0, -2.0 * PI * self.center * d)
    }
}

/// An admissible triple `(f̂₀, ĝ₀, h)` built from `h` and an analytic extra:
/// `ĝ₀ = -ĥ 1_{ξ<0} + extra` and `f̂₀ = ĝ₀ + ĥ`.
#[derive(Debug, Clone)]
pub struct StabilityInstance {
    pub f_hat0: BandSignal,
    pub g_hat0: BandSignal,
    pub h: LineSignal,
    pub h_hat: BandSignal,
}

impl StabilityInstance {
    /// `extra` must vanish for `ξ < 0`; it is sampled on the band as given.
    pub fn new<F: Fn(f64) -> Complex64>(h: LineSignal, extra: F, xi_max: f64, d_xi: f64) -> Result<Self> {
        let h_hat = h.transform_on(xi_max, d_xi)?;
        let grid = h_hat.xi_grid();
        let g: Vec<Complex64> = grid
            .iter()
            .zip(&h_hat.values)
            .map(|(&xi, hv)| if xi < 0.0 { -hv + extra(xi) } else { extra(xi) })
            .collect();
        // f̂₀ = ĝ₀ + ĥ, evaluated the same way the check recomputes it.
        let f: Vec<Complex64> = g.iter().zip(&h_hat.values).map(|(a, b)| a + b).collect();
        Ok(Self {
            f_hat0: BandSignal::new(xi_max, d_xi, f)?,
            g_hat0: BandSignal::new(xi_max, d_xi, g)?,
            h,
            h_hat,
        })
    }

    pub fn ratio(&self, pi: &VerticalMeasure, r: f64) -> Result<StabilityReport> {
        stability_ratio_with(&self.f_hat0, &self.g_hat0, &self.h_hat, self.h.l1_norm(), pi, r)
    }
}

/// Spatial sampling for the windowed transform of `W^Π_{ε,R}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub spacing: f64,
    pub half_width: f64,
    /// Standard deviation of the Gaussian window `e^{-x²/2s²}`.
    pub window: f64,
}

impl Default for SpatialGrid {
    fn default() -> Self {
        Self { spacing: 1.0 / 32.0, half_width: 64.0, window: 8.0 }
    }
}

impl SpatialGrid {
    /// Halves the spacing and doubles the window and the extent.
    ///
    /// The window convolves the transform with a Gaussian of variance
    /// `1/(2πs)²`, so doubling `s` cuts that bias by four; halving the
    /// spacing pushes the aliases twice as far out.
    pub fn refined(&self) -> Self {
        Self { spacing: self.spacing / 2.0, half_width: self.half_width * 2.0, window: self.window * 2.0 }
    }
}

/// `Ŵ^Π_{ε,R}(ξ) = sgn(ξ) ∫_ε^R e^{-2y|ξ|} Π(dy)`.
pub fn w_pi_truncated_transform(pi: &VerticalMeasure, eps: f64, r: f64, xi: f64) -> f64 {
    match pi.restricted(eps, r) {
        Some(p) => xi.signum() * p.laplace_transform(xi, LaplaceConvention::Two),
        None => 0.0,
    }
}

/// Windowed discrete transform of `W^Π_{ε,R}` at each `ξ`:
/// `Σ_x W(x) win(x) e^{-2πixξ} h = 2h Σ_{x>0} (-iW)(x) win(x) sin(2πxξ)`.
pub fn w_pi_truncated_numeric(pi: &VerticalMeasure, eps: f64, r: f64, grid: &SpatialGrid, xi: &[f64]) -> Vec<f64> {
    let Some(p) = pi.restricted(eps, r) else {
        return vec![0.0; xi.len()];
    };
    let n = (grid.half_width / grid.spacing).round() as usize;
    let samples: Vec<(f64, f64)> = (1..=n)
        .map(|j| {
            let x = j as f64 * grid.spacing;
            let win = (-0.5 * (x / grid.window).powi(2)).exp();
            (x, w_pi_real(&p, x) * win)
        })
        .collect();
    xi.iter()
        .map(|&t| 2.0 * grid.spacing * samples.iter().map(|&(x, w)| w * (2.0 * PI * x * t).sin()).sum::<f64>())
        .collect()
}

/// Maximum relative error between the windowed transform and the closed form
/// over `xi` (which must avoid `ξ = 0`).
pub fn w_pi_truncated_fourier_check(
    pi: &VerticalMeasure,
    eps: f64,
    r: f64,
    grid: &SpatialGrid,
    xi: &[f64],
) -> Result<f64> {
    if !(0.0 < eps && eps < r) {
        return Err(Error::InvalidArgument(format!("need 0 < eps < R, got eps = {eps}, R = {r}")));
    }
    if xi.iter().any(|&t| t == 0.0) {
        return Err(Error::InvalidArgument("test frequencies must avoid 0".into()));
    }
    let numeric = w_pi_truncated_numeric(pi, eps, r, grid, xi);
    Ok(xi
        .iter()
        .zip(&numeric)
        .map(|(&t, &v)| {
            let exact = w_pi_truncated_transform(pi, eps, r, t);
            ((v - exact) / exact).abs()
        })
        .fold(0.0, f64::max))
}

/// Point mass on `ℝ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineAtom {
    pub t: f64,
    pub w: f64,
}

/// Density `c |t|^p dt` on `[a, b)`, where `a` may be `-∞` and `b` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinePiece {
    #[serde(with = "crate::report::optional_neg_infinite")]
    pub a: f64,
    #[serde(with = "crate::report::optional_infinite")]
    pub b: f64,
    pub c: f64,
    #[serde(default)]
    pub p: f64,
}

impl LinePiece {
    fn touches_zero(&self) -> bool {
        self.a <= 0.0 && self.b >= 0.0
    }

    fn unbounded(&self) -> bool {
        self.a.is_infinite() || self.b.is_infinite()
    }

    /// `c ∫_lo^hi |t|^p dt` over the intersection with `[lo, hi]`.
    fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let (x, y) = (lo.max(self.a), hi.min(self.b));
        if x >= y {
            return 0.0;
        }
        let e = self.p + 1.0;
        // Antiderivative sgn(t)|t|^{p+1}/(p+1).
        let prim = |t: f64| t.signum() * t.abs().powf(e) / e;
        self.c * (prim(y) - prim(x))
    }
}

/// A measure `ν` on `ℝ` built from atoms and two-sided power-law pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineMeasure {
    #[serde(default)]
    atoms: Vec<LineAtom>,
    #[serde(default)]
    pieces: Vec<LinePiece>,
}

impl LineMeasure {
    /// Requires local finiteness (`p > -1` on pieces touching `0`).
    ///
    /// Pieces growing too fast at infinity for `∫ ν(dt)/(1+t²) < ∞` are
    /// accepted; see [`LineMeasure::is_poisson_integrable`].
    pub fn new(atoms: Vec<LineAtom>, pieces: Vec<LinePiece>) -> Result<Self> {
        for at in &atoms {
            if !(at.t.is_finite() && at.w > 0.0 && at.w.is_finite()) {
                return Err(Error::InvalidMeasure(format!("atom at {} with weight {} is not admissible", at.t, at.w)));
            }
        }
        for pc in &pieces {
            if !(pc.a < pc.b) || pc.a == f64::INFINITY || pc.b == f64::NEG_INFINITY {
                return Err(Error::InvalidMeasure(format!("piece [{}, {}) is empty", pc.a, pc.b)));
            }
            if !(pc.c > 0.0 && pc.c.is_finite() && pc.p.is_finite()) {
                return Err(Error::InvalidMeasure(format!("piece coefficient {} / exponent {} invalid", pc.c, pc.p)));
            }
            if pc.touches_zero() && pc.p <= -1.0 {
                return Err(Error::InvalidMeasure(format!(
                    "|t|^{} is not locally integrable at 0",
                    pc.p
                )));
            }
        }
        Ok(Self { atoms, pieces })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Doc {
            #[serde(default)]
            atoms: Vec<LineAtom>,
            #[serde(default)]
            pieces: Vec<LinePiece>,
        }
        let doc: Doc = serde_json::from_str(s)?;
        Self::new(doc.atoms, doc.pieces)
    }

    pub fn lebesgue() -> Self {
        Self::power(0.0)
    }

    /// `|t|^p dt` on all of `ℝ`.
    pub fn power(p: f64) -> Self {
        let piece = LinePiece { a: f64::NEG_INFINITY, b: f64::INFINITY, c: 1.0, p };
        Self::new(Vec::new(), vec![piece]).expect("valid power measure")
    }

    pub fn atom(t: f64, w: f64) -> Result<Self> {
        Self::new(vec![LineAtom { t, w }], Vec::new())
    }

    pub fn atoms(&self) -> &[LineAtom] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[LinePiece] {
        &self.pieces
    }

    /// `∫ ν(dt) / (1 + t²) < ∞`, which fails exactly for unbounded pieces
    /// with `p >= 1`.
    pub fn is_poisson_integrable(&self) -> bool {
        self.pieces.iter().all(|pc| !pc.unbounded() || pc.p < 1.0)
    }

    /// `ν([-L, L])`.
    pub fn symmetric_mass(&self, l: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|at| at.t.abs() <= l).map(|at| at.w).sum();
        let pieces: f64 = self.pieces.iter().map(|pc| pc.mass_between(-l, l)).sum();
        atoms + pieces
    }

    /// `∫ y / (t² + y²) ν(dt)`.
    pub fn poisson_integral(&self, y: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|at| at.w * y / (at.t * at.t + y * y)).sum();
        let pieces: f64 = self
            .pieces
            .iter()
            .map(|pc| {
                if pc.p == 0.0 {
                    pc.c * ((pc.b / y).atan() - (pc.a / y).atan())
                } else {
                    // Fold onto t >= 0: the kernel and |t|^p are even.
                    let k = |t: f64| y / (t * t + y * y);
                    let mut total = 0.0;
                    for (lo, hi) in [(pc.a.max(0.0), pc.b.max(0.0)), ((-pc.b).max(0.0), (-pc.a).max(0.0))] {
                        if lo < hi {
                            let mid = y.clamp(lo, hi);
                            if mid > lo {
                                total += quad::integrate_power(k, pc.p, lo, mid, QUAD_TOL).value;
                            }
                            if hi > mid {
                                total += quad::integrate_power(k, pc.p, mid, hi, QUAD_TOL).value;
                            }
                        }
                    }
                    pc.c * total
                }
            })
            .sum();
        atoms + pieces
    }

    /// Analytic verdict: `(Poisson sup finite, box sup finite)`.
    ///
    /// Near `t = 0` both blow up under an atom at `0` or a piece with `p < 0`
    /// touching `0`; at infinity both blow up under an unbounded piece with
    /// `p > 0`. The two verdicts therefore always agree on this family.
    pub fn classify(&self) -> (bool, bool) {
        let local = !self.atoms.iter().any(|at| at.t == 0.0)
            && self.pieces.iter().filter(|pc| pc.touches_zero()).all(|pc| pc.p >= 0.0);
        let far = self.pieces.iter().filter(|pc| pc.unbounded()).all(|pc| pc.p <= 0.0);
        let finite = local && far;
        (finite, finite)
    }
}

/// Both sides of Garnett's criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarnettReport {
    /// `sup_y ∫ y / (t² + y²) ν(dt)`
    #[serde(with = "crate::report::extended")]
    pub poisson_sup: f64,
    /// `sup_L ν([-L, L]) / 2L`
    #[serde(with = "crate::report::extended")]
    pub box_sup: f64,
    pub integrable: bool,
}

/// Default grid for both `y` and `L`: 200 log-spaced points on `[1e-6, 1e6]`.
pub fn default_garnett_grid() -> Vec<f64> {
    log_grid(1e-6, 1e6, 200)
}

/// Grid sups of the two Garnett quantities, `+∞` where the analytic
/// classifier says the true sup is infinite. Both grids are augmented with
/// `|t_k|` for every atom: the Poisson kernel of an atom peaks at `y = |t_k|`
/// and `ν([-L, L])` jumps at `L = |t_k|`.
pub fn garnett_check(nu: &LineMeasure, y_grid: &[f64], l_grid: &[f64]) -> GarnettReport {
    let integrable = nu.is_poisson_integrable();
    let (p_finite, b_finite) = nu.classify();
    let poisson_sup = if p_finite && integrable {
        y_grid
            .iter()
            .copied()
            .chain(nu.atoms.iter().map(|at| at.t.abs()).filter(|&y| y > 0.0))
            .map(|y| nu.poisson_integral(y))
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let box_sup = if b_finite && integrable {
        l_grid
            .iter()
            .copied()
            .chain(nu.atoms.iter().map(|at| at.t.abs()).filter(|&l| l > 0.0))
            .map(|l| nu.symmetric_mass(l) / (2.0 * l))
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    GarnettReport { poisson_sup, box_sup, integrable }
}
