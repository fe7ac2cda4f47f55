//! Truncated harmonic Fourier series on the circle and their multipliers.
//!
//! A [`CoeffVector`] of degree `N` stores `c_n` for `|n| <= N` and represents
//! the harmonic function `Σ c_n e_n(z)` with `e_n(z) = z^n` for `n >= 0` and
//! `e_n(z) = z̄^|n|` for `n < 0`. Boundary samples live in a [`GridFunction`]
//! on the nodes `θ_k = 2πk/M`.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::RadialMeasure;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients `c_n`, `-N <= n <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector {
    n_max: usize,
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct CoeffDoc {
    n_max: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for CoeffVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoeffDoc {
            n_max: self.n_max,
            re: self.coeffs.iter().map(|c| c.re).collect(),
            im: self.coeffs.iter().map(|c| c.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoeffVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = CoeffDoc::deserialize(d)?;
        let len = 2 * doc.n_max + 1;
        if doc.re.len() != len || doc.im.len() != len {
            return Err(serde::de::Error::custom(format!(
                "n_max = {} needs {len} entries in re and im",
                doc.n_max
            )));
        }
        let coeffs = doc.re.iter().zip(&doc.im).map(|(&re, &im)| Complex64::new(re, im)).collect();
        Ok(CoeffVector { n_max: doc.n_max, coeffs })
    }
}

impl CoeffVector {
    pub fn zeros(n_max: usize) -> Self {
        Self { n_max, coeffs: vec![ZERO; 2 * n_max + 1] }
    }

    /// `e_n` padded to degree `n_max`.
    pub fn basis(n_max: usize, n: i64) -> Self {
        let mut v = Self::zeros(n_max.max(n.unsigned_abs() as usize));
        v.set(n, Complex64::new(1.0, 0.0));
        v
    }

    pub fn from_fn<F: FnMut(i64) -> Complex64>(n_max: usize, mut f: F) -> Self {
        let n = n_max as i64;
        Self { n_max, coeffs: (-n..=n).map(&mut f).collect() }
    }

    /// Builds from the slice ordered `c_{-N}, …, c_N`.
    pub fn from_slice(coeffs: &[Complex64]) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "coefficient slice has even length {}",
                coeffs.len()
            )));
        }
        Ok(Self { n_max: coeffs.len() / 2, coeffs: coeffs.to_vec() })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Coefficients ordered `c_{-N}, …, c_N`.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.n_max {
            ZERO
        } else {
            self.coeffs[(n + self.n_max as i64) as usize]
        }
    }

    /// Panics if `|n| > n_max`.
    pub fn set(&mut self, n: i64, value: Complex64) {
        assert!(n.unsigned_abs() as usize <= self.n_max, "index {n} beyond degree {}", self.n_max);
        let idx = (n + self.n_max as i64) as usize;
        self.coeffs[idx] = value;
    }

    /// `(n, c_n)` pairs in increasing `n`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.n_max as i64;
        (-n..=n).zip(self.coeffs.iter().copied())
    }

    pub fn padded(&self, n_max: usize) -> Self {
        if n_max <= self.n_max {
            return self.clone();
        }
        Self::from_fn(n_max, |n| self.get(n))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { n_max: self.n_max, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Largest `|n|` with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.iter().filter(|(_, c)| *c != ZERO).map(|(n, _)| n.unsigned_abs() as usize).max().unwrap_or(0)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let n_max = self.n_max.max(other.n_max);
        Self::from_fn(n_max, |n| f(self.get(n), other.get(n)))
    }
}

impl Add for &CoeffVector {
    type Output = CoeffVector;
    fn add(self, rhs: Self) -> CoeffVector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &CoeffVector {
    type Output = CoeffVector;
    fn sub(self, rhs: Self) -> CoeffVector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &CoeffVector {
    type Output = CoeffVector;
    fn neg(self) -> CoeffVector {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<f64> for &CoeffVector {
    type Output = CoeffVector;
    fn mul(self, rhs: f64) -> CoeffVector {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

/// Samples on `M` equispaced nodes `θ_k = 2πk/M`, each carrying weight `2π/M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(samples: Vec<Complex64>) -> Self {
        Self { samples }
    }

    pub fn from_fn<F: FnMut(f64) -> Complex64>(m: usize, mut f: F) -> Self {
        Self { samples: (0..m).map(|k| f(node(k, m))).collect() }
    }

    pub fn m(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn theta(&self, k: usize) -> f64 {
        node(k, self.m())
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

pub fn node(k: usize, m: usize) -> f64 {
    2.0 * PI * k as f64 / m as f64
}

/// Discrete Fourier transform on `M` nodes.
///
/// Uses a radix-2 FFT when `M` is a power of two and direct summation with
/// a twiddle table otherwise.
pub struct FourierGrid {
    m: usize,
    fast: Option<(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
    twiddles: Vec<Complex64>,
    scratch: Vec<Complex64>,
    work: Vec<Complex64>,
    buffer: Vec<Complex64>,
}

impl std::fmt::Debug for FourierGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierGrid")
            .field("m", &self.m)
            .field("fast", &self.fast.is_some())
            .finish()
    }
}

impl FourierGrid {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "grid needs at least one node");
        if m.is_power_of_two() {
            Self::fast(m)
        } else {
            Self::direct(m)
        }
    }

    /// Forces the direct-summation path (used to cross-check the FFT).
    pub fn direct(m: usize) -> Self {
        let twiddles = (0..m)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / m as f64))
            .collect();
        Self { m, fast: None, twiddles, scratch: Vec::new(), work: vec![ZERO; m], buffer: Vec::with_capacity(m) }
    }

    fn fast(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self {
            m,
            fast: Some((fwd, inv)),
            twiddles: Vec::new(),
            scratch: vec![ZERO; len],
            work: vec![ZERO; m],
            buffer: Vec::with_capacity(m),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_fast(&self) -> bool {
        self.fast.is_some()
    }

    /// In place `X_j = Σ_k x_k e^{∓2πi jk/M}` (`-` when `forward`).
    fn transform(&mut self, data: &mut [Complex64], forward: bool) {
        debug_assert_eq!(data.len(), self.m);
        if let Some((fwd, inv)) = &self.fast {
            let plan = if forward { fwd } else { inv };
            plan.process_with_scratch(data, &mut self.scratch);
            return;
        }
        let m = self.m;
        for j in 0..m {
            let mut acc = ZERO;
            for (k, x) in data.iter().enumerate() {
                let t = self.twiddles[(j * k) % m];
                acc += x * if forward { t } else { t.conj() };
            }
            self.work[j] = acc;
        }
        data.copy_from_slice(&self.work);
    }

    /// Writes `Σ_n c_n e^{inθ_k}` into `out`; `coeffs` is ordered `c_{-N}..c_N`.
    pub fn synthesize_into(&mut self, coeffs: &[Complex64], out: &mut [Complex64]) {
        let m = self.m;
        let n_max = coeffs.len() / 2;
        debug_assert!(m > 2 * n_max);
        out.iter_mut().for_each(|v| *v = ZERO);
        for (i, c) in coeffs.iter().enumerate() {
            let n = i as i64 - n_max as i64;
            out[n.rem_euclid(m as i64) as usize] = *c;
        }
        self.transform(out, false);
    }

    /// Writes trapezoidal coefficients `(1/M) Σ_k x_k e^{-inθ_k}`, `|n| <= N`.
    pub fn analyze_into(&mut self, samples: &[Complex64], out: &mut [Complex64]) {
        let m = self.m;
        let n_max = out.len() / 2;
        let mut data = std::mem::take(&mut self.buffer);
        data.clear();
        data.extend_from_slice(samples);
        self.transform(&mut data, true);
        let scale = 1.0 / m as f64;
        for (i, o) in out.iter_mut().enumerate() {
            let n = i as i64 - n_max as i64;
            *o = data[n.rem_euclid(m as i64) as usize] * scale;
        }
        self.buffer = data;
    }
}

fn check_grid(m: usize, n_max: usize) -> Result<()> {
    if m < 2 * n_max + 1 {
        return Err(Error::GridTooSmall { m, n_max, required: 2 * n_max + 1 });
    }
    Ok(())
}

/// Boundary samples of `u` on `m` nodes.
pub fn synthesize(u: &CoeffVector, m: usize) -> Result<GridFunction> {
    check_grid(m, u.n_max())?;
    let mut out = vec![ZERO; m];
    FourierGrid::new(m).synthesize_into(u.as_slice(), &mut out);
    Ok(GridFunction::new(out))
}

/// Trapezoidal Fourier coefficients of `g` up to degree `n_max`.
pub fn analyze(g: &GridFunction, n_max: usize) -> Result<CoeffVector> {
    check_grid(g.m(), n_max)?;
    let mut out = vec![ZERO; 2 * n_max + 1];
    FourierGrid::new(g.m()).analyze_into(g.samples(), &mut out);
    Ok(CoeffVector { n_max, coeffs: out })
}

/// `Σ c_n e_n(z)` for `|z| < 1`.
pub fn evaluate(u: &CoeffVector, z: Complex64) -> Result<Complex64> {
    if !(z.norm() < 1.0) {
        return Err(Error::OutsideDisk(format!("{z}")));
    }
    let n = u.n_max() as i64;
    // Horner in z for n >= 0 and in z̄ for n < 0.
    let mut pos = ZERO;
    for k in (0..=n).rev() {
        pos = pos * z + u.get(k);
    }
    let zb = z.conj();
    let mut neg = ZERO;
    for k in (1..=n).rev() {
        neg = (neg + u.get(-k)) * zb;
    }
    Ok(pos + neg)
}

/// Poisson dilation `c_n ↦ r^|n| c_n`.
pub fn poisson_dilate(u: &CoeffVector, r: f64) -> CoeffVector {
    assert!((0.0..=1.0).contains(&r), "dilation radius {r} outside [0,1]");
    multiplier(u, |n| Complex64::new(r.powi(n.unsigned_abs() as i32), 0.0))
}

/// Conjugation-type Hilbert transform, multiplier `sgn(n)` with `sgn(0) = 0`.
pub fn hilbert(u: &CoeffVector) -> CoeffVector {
    multiplier(u, |n| Complex64::new(n.signum() as f64, 0.0))
}

/// `Q₊`: keeps `n >= 0`.
pub fn analytic_projection(u: &CoeffVector) -> CoeffVector {
    multiplier(u, |n| if n >= 0 { Complex64::new(1.0, 0.0) } else { ZERO })
}

/// Fourier multiplier `c_n ↦ a(n) c_n`.
pub fn multiplier<F: Fn(i64) -> Complex64>(u: &CoeffVector, a: F) -> CoeffVector {
    CoeffVector::from_fn(u.n_max(), |n| a(n) * u.get(n))
}

/// Rotation `c_n ↦ e^{inθ} c_n`, i.e. `u(e^{i(·)}) ↦ u(e^{i(· + θ)})`.
pub fn rotate(u: &CoeffVector, theta: f64) -> CoeffVector {
    multiplier(u, |n| Complex64::from_polar(1.0, n as f64 * theta))
}

/// The multiplier `𝒜_μ` with symbol `(2π σ_|n|)^{-1/2}`, evaluated in the log
/// domain so tiny moments do not overflow the symbol.
pub fn weight_symbol(mu: &RadialMeasure, n_max: usize) -> Vec<f64> {
    (0..=n_max)
        .map(|n| (-0.5 * ((2.0 * PI).ln() + mu.ln_moment(n))).exp())
        .collect()
}

/// A `μ`-adapted pair of real multiplier symbols on `|n| <= N`.
///
/// The normalization is `|a(n)|² b(n) sgn(n) = (2π σ_|n|)^{-1}` for `n ≠ 0`,
/// which is the one that makes `‖𝒯_a u‖_{H_μ} = ‖u‖_{L²}`. At `n = 0` the
/// pair uses `a(0) = (2πσ_0)^{-1/2}` and `b(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptedPair {
    pub n_max: usize,
    /// `a(-N), …, a(N)`
    pub a: Vec<f64>,
    /// `b(-N), …, b(N)`
    pub b: Vec<f64>,
    pub c_b: f64,
}

impl AdaptedPair {
    pub fn a(&self, n: i64) -> f64 {
        self.a[(n + self.n_max as i64) as usize]
    }

    pub fn b(&self, n: i64) -> f64 {
        self.b[(n + self.n_max as i64) as usize]
    }

    /// `𝒯_a u`
    pub fn apply_a(&self, u: &CoeffVector) -> CoeffVector {
        multiplier(&u.padded(self.n_max), |n| Complex64::new(self.a(n), 0.0))
    }

    /// `𝒯_b u`
    pub fn apply_b(&self, u: &CoeffVector) -> CoeffVector {
        multiplier(&u.padded(self.n_max), |n| Complex64::new(self.b(n), 0.0))
    }

    /// Largest violation of the adaptedness identity over `0 < |n| <= N`,
    /// relative to `(2πσ_n)^{-1}`.
    pub fn identity_defect(&self, mu: &RadialMeasure) -> f64 {
        let n = self.n_max as i64;
        (-n..=n)
            .filter(|k| *k != 0)
            .map(|k| {
                let target = 1.0 / (2.0 * PI * mu.moment(k.unsigned_abs() as usize));
                let lhs = self.a(k).powi(2) * self.b(k) * k.signum() as f64;
                ((lhs - target) / target).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Builds the adapted pair for the symbol `b` (whose value at `n = 0` is ignored).
///
/// Rejects `b` vanishing on `ℤ*`, and `b` with the wrong sign, which would
/// force `|a(n)|² < 0`.
pub fn adapted_pair<F: Fn(i64) -> f64>(mu: &RadialMeasure, n_max: usize, b: F) -> Result<AdaptedPair> {
    let n = n_max as i64;
    let mut a_vals = Vec::with_capacity(2 * n_max + 1);
    let mut b_vals = Vec::with_capacity(2 * n_max + 1);
    let mut c_b: f64 = 1.0;
    let ln_two_pi = (2.0 * PI).ln();
    for k in -n..=n {
        let ln_sigma = mu.ln_moment(k.unsigned_abs() as usize);
        if k == 0 {
            let a0 = (-0.5 * (ln_two_pi + ln_sigma)).exp();
            if !(a0 > 0.0 && a0.is_finite()) {
                return Err(Error::InvalidPair("a(0) must be nonzero".into()));
            }
            a_vals.push(a0);
            b_vals.push(0.0);
            continue;
        }
        let bk = b(k);
        if !bk.is_finite() || bk == 0.0 {
            return Err(Error::InvalidPair(format!("b({k}) = {bk} must be finite and nonzero")));
        }
        let oriented = bk * k.signum() as f64;
        if oriented < 0.0 {
            return Err(Error::InvalidPair(format!(
                "b({k}) = {bk} has the sign opposite to sgn({k}); |a({k})|² would be negative"
            )));
        }
        c_b = c_b.max(bk.abs()).max(1.0 / bk.abs());
        a_vals.push((-0.5 * (ln_two_pi + ln_sigma + oriented.ln())).exp());
        b_vals.push(bk);
    }
    Ok(AdaptedPair { n_max, a: a_vals, b: b_vals, c_b })
}

/// The default pair `a = 𝒜_μ`-symbol, `b = sgn`.
pub fn standard_pair(mu: &RadialMeasure, n_max: usize) -> AdaptedPair {
    adapted_pair(mu, n_max, |n| n.signum() as f64).expect("sgn is an admissible symbol")
}
