//! The gamma manifold in mean/shape coordinates.
//!
//! A point is a pair (μ, κ) with density
//!
//! ```text
//! f(x; μ, κ) = (κ/μ)^κ x^(κ-1) e^(-κx/μ) / Γ(κ),   x ≥ 0
//! ```
//!
//! so that μ is the mean and 1/√κ the coefficient of variation. κ = 1 is the
//! exponential curve, the spacing law of an ideal Poisson process. The Fisher
//! metric is diagonal in these coordinates:
//!
//! ```text
//! g = diag(κ/μ², ψ'(κ) - 1/κ)
//! ```

use rand_core::RngCore;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad;
use crate::specfn::{ln_gamma, log_minus_digamma, psi1, trigamma_minus_recip};

/// Shape-equation right-hand sides below this are treated as "all equal".
pub const DEGENERATE_S_STAT: f64 = 1e-12;

/// Bracket kept by the shape solver. The upper end sits above the root for
/// any s_stat ≥ [`DEGENERATE_S_STAT`] (log κ - ψ(κ) ≈ 1/(2κ) for large κ).
pub const SHAPE_BRACKET: (f64, f64) = (1e-6, 1e13);

/// Iteration cap for the shape solver.
pub const MAX_SHAPE_ITERATIONS: u32 = 200;

/// Fits must reach at least this residual on the shape equation.
pub const SHAPE_RESIDUAL_TOL: f64 = 1e-10;

/// Absolute tolerance of the κ-leg integral in [`arc_length_distance`].
pub const ARC_LENGTH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GammaError {
    #[error("gamma parameters must be finite and positive, got mu={mu}, kappa={kappa}")]
    InvalidParams { mu: f64, kappa: f64 },
    #[error("density argument must be a non-negative number, got {0}")]
    NegativeArgument(f64),
    #[error("sample is empty")]
    EmptySample,
    #[error("observation {index} is {value}; gamma data must be finite and positive")]
    NonPositiveObservation { index: usize, value: f64 },
    #[error("at least 2 observations are needed for a fit, got {n}")]
    TooFewObservations { n: usize },
    #[error("degenerate sample: log(mean) - mean(log) = {s_stat:e}, shape estimate diverges")]
    DegenerateSample { s_stat: f64 },
    #[error("shape equation right-hand side {s_stat} puts the root below {}", SHAPE_BRACKET.0)]
    ShapeOutOfRange { s_stat: f64 },
    #[error("shape solver stopped after {iterations} iterations with residual {residual:e}")]
    NonConvergence { iterations: u32, residual: f64 },
}

/// A point (μ, κ) on the gamma manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct GammaParams {
    mu: f64,
    kappa: f64,
}

#[derive(Deserialize)]
struct RawParams {
    mu: f64,
    kappa: f64,
}

impl TryFrom<RawParams> for GammaParams {
    type Error = GammaError;

    fn try_from(raw: RawParams) -> Result<Self, Self::Error> {
        GammaParams::new(raw.mu, raw.kappa)
    }
}

impl GammaParams {
    pub fn new(mu: f64, kappa: f64) -> Result<Self, GammaError> {
        if mu.is_finite() && kappa.is_finite() && mu > 0.0 && kappa > 0.0 {
            Ok(Self { mu, kappa })
        } else {
            Err(GammaError::InvalidParams { mu, kappa })
        }
    }

    /// The exponential distribution with the given mean (κ = 1).
    pub fn exponential(mu: f64) -> Result<Self, GammaError> {
        Self::new(mu, 1.0)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Coefficient of variation, 1/√κ.
    pub fn cv(&self) -> f64 {
        self.kappa.sqrt().recip()
    }
}

/// Sufficient statistics of a positive sample for the gamma likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub mean_log: f64,
    /// log(mean) - mean_log, the right-hand side of the shape equation.
    pub s_stat: f64,
}

impl SampleSummary {
    /// Computes the summary in one pass. Every value must be finite and > 0.
    pub fn from_values(values: &[f64]) -> Result<Self, GammaError> {
        let first = *values.first().ok_or(GammaError::EmptySample)?;
        let mut sum = 0.0;
        let mut sum_log = 0.0;
        let mut all_equal = true;
        for (index, &value) in values.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(GammaError::NonPositiveObservation { index, value });
            }
            sum += value;
            sum_log += value.ln();
            all_equal &= value == first;
        }
        let n = values.len();
        let mean = sum / n as f64;
        let mean_log = sum_log / n as f64;
        let s_stat = if all_equal {
            0.0
        } else {
            (mean.ln() - mean_log).max(0.0)
        };
        Ok(Self {
            n,
            mean,
            mean_log,
            s_stat,
        })
    }

    /// Builds a summary from precomputed moments.
    pub fn from_moments(n: usize, mean: f64, mean_log: f64) -> Result<Self, GammaError> {
        if n == 0 {
            return Err(GammaError::EmptySample);
        }
        if !(mean.is_finite() && mean > 0.0) {
            return Err(GammaError::NonPositiveObservation {
                index: 0,
                value: mean,
            });
        }
        let s_stat = (mean.ln() - mean_log).max(0.0);
        Ok(Self {
            n,
            mean,
            mean_log,
            s_stat,
        })
    }
}

/// Output of [`fit_mle`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: GammaParams,
    pub iterations: u32,
    /// |log κ̂ - ψ(κ̂) - s_stat| at the returned κ̂.
    pub residual: f64,
    pub summary: SampleSummary,
}

/// Fisher information metric at a point. Off-diagonal entries are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    pub g_mumu: f64,
    pub g_kk: f64,
}

impl MetricTensor {
    pub fn as_matrix(&self) -> [[f64; 2]; 2] {
        [[self.g_mumu, 0.0], [0.0, self.g_kk]]
    }

    /// Squared length of the tangent vector (dμ, dκ).
    pub fn norm_sq(&self, dmu: f64, dkappa: f64) -> f64 {
        self.g_mumu * dmu * dmu + self.g_kk * dkappa * dkappa
    }
}

/// Log of the density at `x`. Returns -∞ or +∞ at `x = 0` as appropriate.
pub fn log_pdf(x: f64, params: &GammaParams) -> Result<f64, GammaError> {
    if !(x >= 0.0) {
        return Err(GammaError::NegativeArgument(x));
    }
    let GammaParams { mu, kappa } = *params;
    if x == 0.0 {
        return Ok(if kappa < 1.0 {
            f64::INFINITY
        } else if kappa == 1.0 {
            -mu.ln()
        } else {
            f64::NEG_INFINITY
        });
    }
    Ok(kappa * (kappa / mu).ln() - ln_gamma(kappa) + (kappa - 1.0) * x.ln() - kappa * x / mu)
}

/// Density f(x; μ, κ).
pub fn pdf(x: f64, params: &GammaParams) -> Result<f64, GammaError> {
    log_pdf(x, params).map(f64::exp)
}

/// Log-likelihood of a sample, expressed through its sufficient statistics.
pub fn log_likelihood(summary: &SampleSummary, params: &GammaParams) -> f64 {
    let GammaParams { mu, kappa } = *params;
    summary.n as f64
        * (kappa * (kappa / mu).ln() - ln_gamma(kappa) + (kappa - 1.0) * summary.mean_log
            - kappa * summary.mean / mu)
}

/// Closed-form starting point for the shape equation log κ - ψ(κ) = s.
pub fn initial_shape_guess(s_stat: f64) -> f64 {
    let s = s_stat;
    (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s)
}

/// Solves log κ - ψ(κ) = s for κ with Newton steps kept inside a shrinking
/// bracket; a step that would leave the bracket is replaced by a geometric
/// bisection. Returns (κ, iterations, residual).
pub fn solve_shape(s_stat: f64) -> Result<(f64, u32, f64), GammaError> {
    if !(s_stat >= DEGENERATE_S_STAT) || !s_stat.is_finite() {
        return Err(GammaError::DegenerateSample { s_stat });
    }
    let h = |k: f64| log_minus_digamma(k) - s_stat;
    let (mut lo, mut hi) = SHAPE_BRACKET;
    if h(lo) <= 0.0 {
        return Err(GammaError::ShapeOutOfRange { s_stat });
    }

    let mut kappa = initial_shape_guess(s_stat).clamp(lo, hi);
    let mut iterations = 0;
    while iterations < MAX_SHAPE_ITERATIONS {
        iterations += 1;
        let value = h(kappa);
        if value == 0.0 {
            break;
        }
        // h is decreasing
        if value > 0.0 {
            lo = kappa;
        } else {
            hi = kappa;
        }
        let slope = -trigamma_minus_recip(kappa);
        let mut next = kappa - value / slope;
        if !(next > lo && next < hi) {
            next = (lo * hi).sqrt();
        }
        let step = (next - kappa).abs();
        kappa = next;
        if step <= 4.0 * f64::EPSILON * kappa || hi - lo <= 4.0 * f64::EPSILON * lo {
            break;
        }
    }
    let residual = h(kappa).abs();
    if residual <= SHAPE_RESIDUAL_TOL {
        Ok((kappa, iterations, residual))
    } else {
        Err(GammaError::NonConvergence {
            iterations,
            residual,
        })
    }
}

/// Maximum-likelihood fit: μ̂ is the sample mean, κ̂ solves the shape equation.
pub fn fit_mle(summary: &SampleSummary) -> Result<FitResult, GammaError> {
    if summary.n < 2 {
        return Err(GammaError::TooFewObservations { n: summary.n });
    }
    let (kappa, iterations, residual) = solve_shape(summary.s_stat)?;
    Ok(FitResult {
        params: GammaParams::new(summary.mean, kappa)?,
        iterations,
        residual,
        summary: *summary,
    })
}

/// Draws `n` i.i.d. values from the gamma distribution at `params`.
pub fn sample<R: RngCore + ?Sized>(params: &GammaParams, n: usize, rng: &mut R) -> Vec<f64> {
    // shape κ, scale μ/κ
    let dist = rand_distr::Gamma::new(params.kappa, params.mu / params.kappa)
        .expect("validated gamma parameters");
    (0..n).map(|_| dist.sample(rng)).collect()
}

pub fn metric_tensor(params: &GammaParams) -> MetricTensor {
    MetricTensor {
        g_mumu: params.kappa / (params.mu * params.mu),
        g_kk: trigamma_minus_recip(params.kappa),
    }
}

/// Geodesic-mesh upper bound on the distance between two points:
/// |ψ'(κ₂) - ψ'(κ₁)| + |log(μ₁/μ₂)|.
pub fn distance_bound(from: &GammaParams, to: &GammaParams) -> f64 {
    (psi1(to.kappa) - psi1(from.kappa)).abs() + abs_log_ratio(from.mu, to.mu)
}

/// |log(a/b)|, evaluated as log(max/min) so that it is exactly symmetric.
fn abs_log_ratio(a: f64, b: f64) -> f64 {
    (a.max(b) / a.min(b)).ln()
}

/// Length of the coordinate path that first moves κ at fixed μ, then μ at
/// the target κ. Always an upper bound on the geodesic distance.
pub fn arc_length_distance(from: &GammaParams, to: &GammaParams) -> f64 {
    let mu_leg = to.kappa.sqrt() * abs_log_ratio(from.mu, to.mu);
    mu_leg + shape_arc_length(from.kappa, to.kappa)
}

/// ∫ √(ψ'(κ) - 1/κ) dκ between two shapes, integrated in t = log κ where the
/// integrand κ√(ψ'(κ) - 1/κ) stays between 1/√2 and 1.
pub fn shape_arc_length(kappa_a: f64, kappa_b: f64) -> f64 {
    if kappa_a == kappa_b {
        return 0.0;
    }
    let integrand = |t: f64| {
        let k = t.exp();
        k * trigamma_minus_recip(k).sqrt()
    };
    quad::integrate(integrand, kappa_a.ln(), kappa_b.ln(), ARC_LENGTH_TOL).abs()
}
