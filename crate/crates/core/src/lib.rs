//! Tests pseudorandom generators through the gamma-manifold geometry of
//! their symbol spacings.
//!
//! The gaps between successive occurrences of one symbol in an ideal random
//! stream are (nearly) exponential, i.e. gamma with shape κ = 1. Fitting a
//! gamma distribution to the observed gaps by maximum likelihood and
//! measuring how far the fit lies from the exponential point gives a
//! distance-based randomness statistic.
//!
//! - [`specfn`]: log-gamma, digamma, trigamma.
//! - [`gamma`]: density, sampling, maximum-likelihood fit, Fisher metric, distances.
//! - [`spacing`]: gap extraction and sufficient statistics.
//! - [`sources`]: seeded built-in generators and external stream decoding.
//! - [`harness`]: replicated experiments, calibration and verdicts.
//! - [`cli`]: command-line front end, report documents, surface emission.

pub mod cli;
pub mod gamma;
pub mod harness;
pub mod quad;
pub mod sources;
pub mod spacing;
pub mod specfn;

pub use gamma::{FitResult, GammaError, GammaParams, MetricTensor, SampleSummary};
pub use harness::{ExperimentConfig, ExperimentReport, ReferenceSummary, Verdict};
pub use sources::{GeneratorHandle, GeneratorKind, Symbol};
pub use spacing::{GapConvention, GapSeries};
