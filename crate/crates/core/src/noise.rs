//! Paley–Wiener construction of deformed white noise and Brownian motion.
//!
//! `η(t) = Σ_{|n|≤M} Z_n e^{iω_n t}` with `ω_n = sinh(λn)/sinh λ` and
//! independent complex Gaussians `Z_n = ½(X_n + iY_n)`, so `E|Z_n|² = ½`.
//! Deformed Brownian motion is the termwise integral
//! `X(t) = Z_0 t + Σ_{n≠0} Z_n (e^{iω_n t} − 1)/(iω_n)`.
//!
//! The noise is only meaningful paired with smooth test functions:
//! `⟨η, ξ⟩ = ∫ η(t) ξ(t) dt = Σ_n Z_n ξ̂(ω_n)` with `ξ̂(ω) = ∫ ξ(t) e^{iωt} dt`,
//! whose second moment is the quadratic form `Q(ξ) = ½ Σ_n |ξ̂(ω_n)|²`.
//!
//! Under [`CovarianceConvention::RealConjugatePaired`] the coefficients obey
//! `Z_{−n} = conj(Z_n)` and `Z_0 = X_0/√2` is real, so `η` is real and
//! `E[η(t)η(s)]` equals the Hermitian covariance `½ Σ e^{iω_n (t−s)}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deform::sinh_ratio;
use crate::oracle::gauss_legendre;

/// Relative size of the last retained term above which a cutoff is flagged.
pub const CUTOFF_TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("cutoff too small: tail term is {tail_ratio:e} of the total {value}")]
    CutoffWarning { value: f64, tail_ratio: f64 },
    #[error("ill-conditioned fit: {0}")]
    IllConditionedFit(String),
    #[error("invalid noise config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceConvention {
    ComplexHermitian,
    RealConjugatePaired,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub lambda: f64,
    /// Modes `|n| ≤ mode_cutoff` are kept.
    pub mode_cutoff: usize,
    pub samples: usize,
    pub seed: u64,
    pub time_grid: Vec<f64>,
    pub convention: CovarianceConvention,
}

impl NoiseConfig {
    pub fn new(lambda: f64, mode_cutoff: usize, samples: usize, seed: u64) -> Self {
        NoiseConfig {
            lambda,
            mode_cutoff,
            samples,
            seed,
            time_grid: vec![0.0],
            convention: CovarianceConvention::ComplexHermitian,
        }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        if !self.lambda.is_finite() {
            return Err(NoiseError::InvalidConfig(format!("λ = {}", self.lambda)));
        }
        if self.mode_cutoff < 1 {
            return Err(NoiseError::InvalidConfig("mode cutoff must be at least 1".into()));
        }
        if self.samples < 1 {
            return Err(NoiseError::InvalidConfig("need at least one sample".into()));
        }
        if self.time_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(NoiseError::InvalidConfig("time grid must be strictly increasing".into()));
        }
        Ok(())
    }

    fn frequencies(&self) -> Vec<f64> {
        mode_frequencies(self.mode_cutoff, self.lambda)
    }
}

/// `ω_n = sinh(λn)/sinh λ`, reducing to `n` at `λ = 0`.
pub fn deformed_frequency(n: i64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return n as f64;
    }
    sinh_ratio(lambda * n as f64, lambda)
}

/// Frequencies for `n = −M..=M`, stored at index `n + M`.
fn mode_frequencies(m: usize, lambda: f64) -> Vec<f64> {
    let m = m as i64;
    (-m..=m).map(|n| deformed_frequency(n, lambda)).collect()
}

/// Smooth test function with a closed-form or quadrature Fourier transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `exp(−(t/scale)²)`.
    Gaussian { scale: f64 },
    /// `½(1 + cos(πt/a))` on `|t| ≤ a`, zero outside.
    RaisedCosine { half_width: f64 },
    /// Samples `values[k] = ξ(start + k·step)`, zero outside.
    Sampled { start: f64, step: f64, values: Vec<Complex64> },
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

impl TestFunction {
    pub fn gaussian(scale: f64) -> Self {
        TestFunction::Gaussian { scale }
    }

    pub fn raised_cosine(half_width: f64) -> Self {
        TestFunction::RaisedCosine { half_width }
    }

    /// Pointwise value; used by quadrature checks.
    pub fn value(&self, t: f64) -> Complex64 {
        match self {
            TestFunction::Gaussian { scale } => Complex64::new((-(t / scale).powi(2)).exp(), 0.0),
            TestFunction::RaisedCosine { half_width: a } => {
                if t.abs() <= *a {
                    Complex64::new(0.5 * (1.0 + (PI * t / a).cos()), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            TestFunction::Sampled { start, step, values } => {
                let k = ((t - start) / step).round();
                if k < 0.0 || k as usize >= values.len() {
                    Complex64::new(0.0, 0.0)
                } else {
                    values[k as usize]
                }
            }
        }
    }

    /// `ξ̂(ω) = ∫ ξ(t) e^{iωt} dt`.
    pub fn fourier(&self, omega: f64) -> Complex64 {
        match self {
            TestFunction::Gaussian { scale: s } => {
                Complex64::new(s * PI.sqrt() * (-(s * omega).powi(2) / 4.0).exp(), 0.0)
            }
            TestFunction::RaisedCosine { half_width: a } => {
                // a sinc(aω) · P/(P − ω²) with P = (π/a)²; the pole at ω = π/a cancels.
                let w = omega.abs();
                let k = PI / a;
                let delta = w - k;
                let v = if delta.abs() < 0.25 * k {
                    // sin(aω) = −sin(aδ) and P − ω² = −δ(ω + k)
                    k * k * a * sinc(a * delta) / (w * (w + k))
                } else {
                    a * sinc(a * w) * k * k / (k * k - w * w)
                };
                Complex64::new(v, 0.0)
            }
            TestFunction::Sampled { start, step, values } => simpson(values, *step, |k| {
                Complex64::from_polar(1.0, omega * (start + k as f64 * step))
            }),
        }
    }

    /// `‖ξ‖² = ∫ |ξ|² dt`.
    pub fn norm_sq(&self) -> f64 {
        match self {
            TestFunction::Gaussian { scale } => scale * (PI / 2.0).sqrt(),
            TestFunction::RaisedCosine { half_width } => 0.75 * half_width,
            TestFunction::Sampled { step, values, .. } => {
                simpson(values, *step, |k| values[k].conj()).re
            }
        }
    }

    /// `‖ξ′‖² = ∫ |ξ′|² dt`.
    pub fn derivative_norm_sq(&self) -> f64 {
        match self {
            TestFunction::Gaussian { scale } => (PI / 2.0).sqrt() / scale,
            TestFunction::RaisedCosine { half_width } => PI * PI / (4.0 * half_width),
            TestFunction::Sampled { step, values, .. } => {
                let d: Vec<Complex64> = (0..values.len())
                    .map(|k| {
                        let prev = if k == 0 { Complex64::new(0.0, 0.0) } else { values[k - 1] };
                        let next = values.get(k + 1).copied().unwrap_or(Complex64::new(0.0, 0.0));
                        (next - prev) / (2.0 * step)
                    })
                    .collect();
                simpson(&d, *step, |k| d[k].conj()).re
            }
        }
    }
}

/// Composite Simpson sum of `values[k] · weight(k)`.
fn simpson(values: &[Complex64], step: f64, weight: impl Fn(usize) -> Complex64) -> Complex64 {
    let n = values.len();
    if n < 2 {
        return values.first().map_or(Complex64::new(0.0, 0.0), |v| v * weight(0) * step);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    // Simpson on an even number of intervals, trapezoid for a trailing one.
    let intervals = n - 1;
    let even = intervals - intervals % 2;
    for (k, v) in values.iter().enumerate().take(even + 1) {
        let c = if k == 0 || k == even {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += v * weight(k) * c;
    }
    acc *= step / 3.0;
    if even < intervals {
        acc += (values[even] * weight(even) + values[n - 1] * weight(n - 1)) * (0.5 * step);
    }
    acc
}

/// `Q(ξ) = ½ Σ_{|n|≤M} |ξ̂(ω_n)|²`.
pub fn spectral_quadratic_form(xi: &TestFunction, lambda: f64, m: usize) -> Result<f64, NoiseError> {
    let omegas = mode_frequencies(m, lambda);
    // sum from the outside in so the small tail terms are added first
    let weights: Vec<f64> = omegas.iter().map(|&w| 0.5 * xi.fourier(w).norm_sqr()).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse((i as i64 - m as i64).unsigned_abs()));
    let total: f64 = order.iter().map(|&i| weights[i]).sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let tail = weights[0] + weights[weights.len() - 1];
    let tail_ratio = tail / total;
    if tail_ratio > CUTOFF_TAIL_TOL {
        return Err(NoiseError::CutoffWarning { value: total, tail_ratio });
    }
    Ok(total)
}

/// Smallest cutoff for which [`spectral_quadratic_form`] raises no warning.
pub fn converged_quadratic_form(xi: &TestFunction, lambda: f64, max_cutoff: usize) -> Result<(f64, usize), NoiseError> {
    let mut m = 4;
    loop {
        match spectral_quadratic_form(xi, lambda, m) {
            Ok(v) => return Ok((v, m)),
            Err(e) if m >= max_cutoff => return Err(e),
            Err(_) => m = (2 * m).min(max_cutoff),
        }
    }
}

/// Exact covariance `E[η(t) conj η(s)] = ½ Σ e^{iω_n (t−s)}`.
pub fn spectral_covariance(lambda: f64, m: usize, lag: f64) -> Complex64 {
    mode_frequencies(m, lambda)
        .iter()
        .map(|&w| Complex64::from_polar(0.5, w * lag))
        .sum()
}

/// Exact `E|X(t)|² = ½t² + Σ_{n≠0} (1 − cos ω_n t)/ω_n²`.
pub fn brownian_variance(lambda: f64, m: usize, t: f64) -> f64 {
    let m = m as i64;
    0.5 * t * t
        + (1..=m)
            .map(|n| {
                let w = deformed_frequency(n, lambda);
                // 1 − cos θ = 2 sin²(θ/2)
                2.0 * 2.0 * (0.5 * w * t).sin().powi(2) / (w * w)
            })
            .sum::<f64>()
}

fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// `Z_n` for `n = −M..=M` at index `n + M`.
fn draw_coefficients(rng: &mut ChaCha8Rng, m: usize, convention: CovarianceConvention) -> Vec<Complex64> {
    let mut normal = || -> f64 { StandardNormal.sample(rng) };
    let mut z = vec![Complex64::new(0.0, 0.0); 2 * m + 1];
    match convention {
        CovarianceConvention::ComplexHermitian => {
            for slot in z.iter_mut() {
                let (x, y) = (normal(), normal());
                *slot = Complex64::new(0.5 * x, 0.5 * y);
            }
        }
        CovarianceConvention::RealConjugatePaired => {
            z[m] = Complex64::new(normal() / 2f64.sqrt(), 0.0);
            for n in 1..=m {
                let (x, y) = (normal(), normal());
                let c = Complex64::new(0.5 * x, 0.5 * y);
                z[m + n] = c;
                z[m - n] = c.conj();
            }
        }
    }
    z
}

/// One sampled path on the configured time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSample {
    pub index: usize,
    pub master_seed: u64,
    pub eta: Vec<Complex64>,
    pub x: Vec<Complex64>,
}

impl PathSample {
    pub fn to_columns(&self, grid: &[f64]) -> String {
        let mut out = String::from("# t re_eta im_eta re_x im_x\n");
        for ((t, e), x) in grid.iter().zip(&self.eta).zip(&self.x) {
            out.push_str(&format!("{:.12e} {:.12e} {:.12e} {:.12e} {:.12e}\n", t, e.re, e.im, x.re, x.im));
        }
        out
    }
}

/// `η(t)` and `X(t)` for one coefficient draw. Modes `±n` are summed as a
/// pair so conjugate-paired draws give exactly real values.
fn evaluate_path(z: &[Complex64], omegas: &[f64], m: usize, t: f64) -> (Complex64, Complex64) {
    let mut eta = z[m];
    let mut x = z[m] * t;
    for n in 1..=m {
        let mut pair_eta = Complex64::new(0.0, 0.0);
        let mut pair_x = Complex64::new(0.0, 0.0);
        for idx in [m + n, m - n] {
            let w = omegas[idx];
            let theta = w * t;
            let (s, c) = theta.sin_cos();
            pair_eta += z[idx] * Complex64::new(c, s);
            // (e^{iθ} − 1)/(iω) = sin θ/ω + i·2sin²(θ/2)/ω
            let integral = Complex64::new(s / w, 2.0 * (0.5 * theta).sin().powi(2) / w);
            pair_x += z[idx] * integral;
        }
        eta += pair_eta;
        x += pair_x;
    }
    (eta, x)
}

pub fn sample_paths(cfg: &NoiseConfig) -> Result<Vec<PathSample>, NoiseError> {
    cfg.validate()?;
    let m = cfg.mode_cutoff;
    let omegas = cfg.frequencies();
    Ok((0..cfg.samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = sample_rng(cfg.seed, index);
            let z = draw_coefficients(&mut rng, m, cfg.convention);
            let (eta, x) = cfg.time_grid.iter().map(|&t| evaluate_path(&z, &omegas, m, t)).unzip();
            PathSample { index, master_seed: cfg.seed, eta, x }
        })
        .collect())
}

/// Sample mean with its standard error (`None` for a single sample).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub standard_error: Option<f64>,
    pub samples: usize,
}

impl McEstimate {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let standard_error = (n > 1).then(|| {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        });
        McEstimate { estimate: mean, standard_error, samples: n }
    }

    /// `|estimate − target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> Option<f64> {
        self.standard_error.map(|se| (self.estimate - target).abs() / se)
    }
}

/// Monte Carlo mean of `|⟨η, ξ⟩|²` computed in spectral form.
pub fn mc_quadratic_form(xi: &TestFunction, cfg: &NoiseConfig) -> Result<McEstimate, NoiseError> {
    cfg.validate()?;
    let m = cfg.mode_cutoff;
    let xi_hat: Vec<Complex64> = cfg.frequencies().iter().map(|&w| xi.fourier(w)).collect();
    let values: Vec<f64> = (0..cfg.samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = sample_rng(cfg.seed, index);
            let z = draw_coefficients(&mut rng, m, cfg.convention);
            z.iter().zip(&xi_hat).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr()
        })
        .collect();
    Ok(McEstimate::from_values(&values))
}

/// Monte Carlo estimate of `E[η(t) conj η(s)]` (real and imaginary parts).
pub fn mc_covariance(cfg: &NoiseConfig, t: f64, s: f64) -> Result<(McEstimate, McEstimate), NoiseError> {
    let mut grid_cfg = cfg.clone();
    grid_cfg.time_grid = if t < s { vec![t, s] } else if s < t { vec![s, t] } else { vec![t] };
    let paths = sample_paths(&grid_cfg)?;
    let (it, is) = match grid_cfg.time_grid.len() {
        1 => (0, 0),
        _ if t < s => (0, 1),
        _ => (1, 0),
    };
    let prods: Vec<Complex64> = paths.iter().map(|p| p.eta[it] * p.eta[is].conj()).collect();
    let re: Vec<f64> = prods.iter().map(|z| z.re).collect();
    let im: Vec<f64> = prods.iter().map(|z| z.im).collect();
    Ok((McEstimate::from_values(&re), McEstimate::from_values(&im)))
}

/// Coefficients of `Q(ξ; λ) ≈ c₀(λ)‖ξ‖² + c₂(λ)‖ξ′‖²` over a family of test
/// functions. A `δ` kernel contributes `‖ξ‖²` and a `δ″` kernel `−‖ξ′‖²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureFit {
    pub lambdas: Vec<f64>,
    pub c0: Vec<f64>,
    pub c2: Vec<f64>,
    pub c0_at_zero: f64,
    pub c2_at_zero: f64,
    /// Log-log slope of `|c₂|` against `λ`.
    pub c2_slope: f64,
    /// Log-log slope of `|c₀(λ) − c₀(0)|` against `λ`.
    pub c0_shift_slope: f64,
    /// `c₂` has one sign over the λ grid, and every family member's implied
    /// coefficient `(Q − c₀‖ξ‖²)/‖ξ′‖²` shares it.
    pub c2_sign_consistent: bool,
}

fn fit_two(a: &[f64], b: &[f64], y: &[f64]) -> Result<(f64, f64), NoiseError> {
    let saa: f64 = a.iter().map(|v| v * v).sum();
    let sbb: f64 = b.iter().map(|v| v * v).sum();
    let sab: f64 = a.iter().zip(b).map(|(x, z)| x * z).sum();
    let say: f64 = a.iter().zip(y).map(|(x, z)| x * z).sum();
    let sby: f64 = b.iter().zip(y).map(|(x, z)| x * z).sum();
    let det = saa * sbb - sab * sab;
    if !(det > 1e-10 * saa * sbb) {
        return Err(NoiseError::IllConditionedFit(format!(
            "‖ξ‖² and ‖ξ′‖² are nearly proportional across the family (det = {det:e})"
        )));
    }
    Ok(((say * sbb - sby * sab) / det, (sby * saa - say * sab) / det))
}

fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Raised cosines supported inside `(−π, π)`: exact Parseval at `λ = 0`
/// and low spectral content, so the `λ²` terms dominate.
pub fn default_structure_family() -> Vec<TestFunction> {
    [2.2, 2.5, 2.8, 3.1].iter().map(|&a| TestFunction::raised_cosine(a)).collect()
}

/// Grid on which the `λ²` scaling is measured.
pub const STRUCTURE_LAMBDAS: [f64; 3] = [0.05, 0.1, 0.2];

pub fn small_lambda_structure(family: &[TestFunction], lambdas: &[f64], max_cutoff: usize) -> Result<StructureFit, NoiseError> {
    if family.len() < 2 {
        return Err(NoiseError::IllConditionedFit("need at least two test functions".into()));
    }
    if lambdas.len() < 2 || lambdas.iter().any(|&l| !(l > 0.0)) {
        return Err(NoiseError::InvalidConfig("need at least two positive λ values".into()));
    }
    let a: Vec<f64> = family.iter().map(TestFunction::norm_sq).collect();
    let b: Vec<f64> = family.iter().map(TestFunction::derivative_norm_sq).collect();
    let q_at = |lambda: f64| -> Result<Vec<f64>, NoiseError> {
        family
            .iter()
            .map(|xi| converged_quadratic_form(xi, lambda, max_cutoff).map(|(v, _)| v))
            .collect()
    };
    let q0 = q_at(0.0)?;
    let (c0_at_zero, c2_at_zero) = fit_two(&a, &b, &q0)?;
    let mut c0 = Vec::new();
    let mut c2 = Vec::new();
    let mut sign_ok = true;
    for &lambda in lambdas {
        let q = q_at(lambda)?;
        let (x0, x2) = fit_two(&a, &b, &q)?;
        for j in 0..family.len() {
            let implied = (q[j] - x0 * a[j]) / b[j];
            sign_ok &= implied.signum() == x2.signum();
        }
        c0.push(x0);
        c2.push(x2);
    }
    sign_ok &= c2.iter().all(|v| v.signum() == c2[0].signum());
    let shifts: Vec<f64> = c0.iter().map(|v| v - c0_at_zero).collect();
    Ok(StructureFit {
        lambdas: lambdas.to_vec(),
        c2_slope: log_slope(lambdas, &c2),
        c0_shift_slope: log_slope(lambdas, &shifts),
        c0,
        c2,
        c0_at_zero,
        c2_at_zero,
        c2_sign_consistent: sign_ok,
    })
}

/// Direct quadrature of `ξ̂(ω)` over `[lo, hi]`, for cross-checking closed forms.
pub fn fourier_by_quadrature(xi: &TestFunction, omega: f64, lo: f64, hi: f64) -> Complex64 {
    let re = gauss_legendre(|t| (xi.value(t) * Complex64::from_polar(1.0, omega * t)).re, lo, hi, 400);
    let im = gauss_legendre(|t| (xi.value(t) * Complex64::from_polar(1.0, omega * t)).im, lo, hi, 400);
    Complex64::new(re, im)
}
