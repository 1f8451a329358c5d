//! Replicated spacing experiments: generate or ingest sequences, fit the
//! gamma model to the target-symbol gaps of each, measure the distance of
//! each fit from the reference point, aggregate, and compare with a
//! calibrated reference distribution.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gamma::{self, GammaError, GammaParams};
use crate::sources::{self, GeneratorKind, SourceError, StreamSpec, Symbol, SymbolReducer};
use crate::spacing::{self, GapConvention, GapExtractor, SpacingError};

/// Quantile levels of κ̂ kept in a [`ReferenceSummary`].
pub const KAPPA_LEVELS: [f64; 10] = [
    0.0005, 0.005, 0.05, 0.5, 0.9, 0.95, 0.99, 0.995, 0.999, 0.9995,
];
/// Quantile levels of distances kept in summaries and reports.
pub const DISTANCE_LEVELS: [f64; 4] = [0.5, 0.9, 0.99, 0.999];
/// Minimum number of calibration trials.
pub const MIN_TRIALS: usize = 100;
/// A run fails when more than this fraction of fits leaves the reference
/// 99.9% κ̂ envelope.
pub const ENVELOPE_EXCESS_FRACTION: f64 = 0.01;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("every one of the {replicates} replicates was skipped (first reason: {first_reason})")]
    AllSkipped {
        replicates: usize,
        first_reason: SkipReason,
    },
    #[error("reference summary does not match this experiment: {0}")]
    ReferenceMismatch(String),
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Spacing(#[from] SpacingError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Where replicate sequences come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum Source {
    /// A built-in generator seeded per replicate from the master seed.
    Builtin { generator: GeneratorKind },
    /// Consecutive `sequence_length` segments of an external stream.
    External { stream: StreamSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub sequence_length: usize,
    pub alphabet_size: u32,
    pub target: Symbol,
    pub replicates: usize,
    pub master_seed: u64,
    pub convention: GapConvention,
    /// `None` means the ideal point (1/p, 1) for the configured alphabet.
    pub reference: Option<GammaParams>,
    pub source: Source,
    /// Upper bound on worker threads; results do not depend on it.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sequence_length: 100_000,
            alphabet_size: 512,
            target: 0,
            replicates: 500,
            master_seed: 42,
            convention: GapConvention::IndexDifference,
            reference: None,
            source: Source::Builtin {
                generator: GeneratorKind::Gold64,
            },
            threads: None,
        }
    }
}

impl ExperimentConfig {
    /// Abundance of the target symbol in an ideal stream.
    pub fn abundance(&self) -> f64 {
        1.0 / f64::from(self.alphabet_size)
    }

    /// The reference point distances are measured from.
    pub fn reference_point(&self) -> GammaParams {
        self.reference.unwrap_or_else(|| {
            // mean gap is 1/p under both conventions
            GammaParams::exponential(f64::from(self.alphabet_size)).expect("alphabet ≥ 2")
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));
        if self.alphabet_size < 2 {
            return bad(format!(
                "alphabet size must be at least 2, got {}",
                self.alphabet_size
            ));
        }
        if self.target >= self.alphabet_size {
            return bad(format!(
                "target {} is outside the alphabet [0, {})",
                self.target, self.alphabet_size
            ));
        }
        if self.sequence_length < self.alphabet_size as usize {
            return bad(format!(
                "sequence length {} is below the alphabet size {}; fewer than one expected occurrence",
                self.sequence_length, self.alphabet_size
            ));
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".to_string());
        }
        if self.threads == Some(0) {
            return bad("thread count must be at least 1".to_string());
        }
        match &self.source {
            Source::Builtin { generator } => {
                let handle = sources::create_generator(*generator, 0)?;
                SymbolReducer::new(handle.word_bits(), self.alphabet_size)?;
            }
            Source::External { stream } => {
                if stream.alphabet_size != self.alphabet_size {
                    return bad(format!(
                        "stream alphabet {} differs from experiment alphabet {}",
                        stream.alphabet_size, self.alphabet_size
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A fitted replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub index: usize,
    /// Derived generator seed; absent for external streams.
    pub seed: Option<u64>,
    pub mu_hat: f64,
    pub kappa_hat: f64,
    pub n_gaps: usize,
    pub iterations: u32,
    pub distance_eq5: f64,
    pub distance_arclength: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SkipReason {
    /// Fewer than two target occurrences, or too few gaps to fit.
    InsufficientOccurrences { occurrences: usize },
    /// All gaps equal; the shape estimate diverges.
    DegenerateSample,
    /// The external stream has no complete segment for this replicate.
    StreamExhausted { available: usize },
}

impl std::fmt::Display for SkipReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::InsufficientOccurrences { occurrences } => {
                write!(f, "insufficient occurrences ({occurrences})")
            }
            Self::DegenerateSample => f.write_str("degenerate sample"),
            Self::StreamExhausted { available } => {
                write!(f, "stream exhausted ({available} symbols left)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedReplicate {
    pub index: usize,
    pub seed: Option<u64>,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReplicateOutcome {
    Fitted(ReplicateRecord),
    Skipped(SkippedReplicate),
}

impl ReplicateOutcome {
    pub fn record(&self) -> Option<&ReplicateRecord> {
        match self {
            Self::Fitted(r) => Some(r),
            Self::Skipped(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
}

impl SummaryStats {
    /// Panics on an empty slice.
    pub fn of(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "statistics of an empty sample");
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mean = sorted.iter().sum::<f64>() / n;
        let std = if sorted.len() > 1 {
            (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            mean,
            median: quantile_sorted(&sorted, 0.5),
            std,
        }
    }
}

/// Linear-interpolation quantile (Hyndman–Fan type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], level: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * level.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantilePoint {
    pub level: f64,
    pub value: f64,
}

fn quantiles(values: &[f64], levels: &[f64]) -> Vec<QuantilePoint> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    levels
        .iter()
        .map(|&level| QuantilePoint {
            level,
            value: quantile_sorted(&sorted, level),
        })
        .collect()
}

fn lookup(points: &[QuantilePoint], level: f64) -> Option<f64> {
    points
        .iter()
        .find(|p| (p.level - level).abs() < 1e-12)
        .map(|p| p.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub fitted: usize,
    pub skipped: usize,
    pub mu_hat: SummaryStats,
    pub kappa_hat: SummaryStats,
    pub distance_eq5: Vec<QuantilePoint>,
    pub distance_arclength: Vec<QuantilePoint>,
}

impl Aggregates {
    /// Panics if `records` is empty.
    pub fn from_records(records: &[ReplicateRecord], skipped: usize) -> Self {
        let column = |f: fn(&ReplicateRecord) -> f64| records.iter().map(f).collect::<Vec<_>>();
        Self {
            fitted: records.len(),
            skipped,
            mu_hat: SummaryStats::of(&column(|r| r.mu_hat)),
            kappa_hat: SummaryStats::of(&column(|r| r.kappa_hat)),
            distance_eq5: quantiles(&column(|r| r.distance_eq5), &DISTANCE_LEVELS),
            distance_arclength: quantiles(&column(|r| r.distance_arclength), &DISTANCE_LEVELS),
        }
    }
}

/// Empirical null distribution of κ̂ and of the bound distance under the
/// gold generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSummary {
    pub trials: usize,
    pub fitted: usize,
    pub sequence_length: usize,
    pub alphabet_size: u32,
    pub target: Symbol,
    pub convention: GapConvention,
    pub reference: GammaParams,
    pub master_seed: u64,
    pub kappa_hat: Vec<QuantilePoint>,
    pub distance_eq5: Vec<QuantilePoint>,
}

impl ReferenceSummary {
    pub fn kappa_quantile(&self, level: f64) -> Option<f64> {
        lookup(&self.kappa_hat, level)
    }

    pub fn distance_quantile(&self, level: f64) -> Option<f64> {
        lookup(&self.distance_eq5, level)
    }

    /// Central 99.9% interval of κ̂.
    pub fn kappa_envelope(&self) -> Option<(f64, f64)> {
        Some((self.kappa_quantile(0.0005)?, self.kappa_quantile(0.9995)?))
    }

    /// Checks that this summary was calibrated for the same kind of run.
    pub fn check_compatible(&self, config: &ExperimentConfig) -> Result<(), HarnessError> {
        let mismatch = |what: &str, ours: String, theirs: String| {
            Err(HarnessError::ReferenceMismatch(format!(
                "{what}: experiment {ours}, reference {theirs}"
            )))
        };
        if self.sequence_length != config.sequence_length {
            return mismatch(
                "sequence length",
                config.sequence_length.to_string(),
                self.sequence_length.to_string(),
            );
        }
        if self.alphabet_size != config.alphabet_size {
            return mismatch(
                "alphabet size",
                config.alphabet_size.to_string(),
                self.alphabet_size.to_string(),
            );
        }
        if self.convention != config.convention {
            return mismatch(
                "gap convention",
                config.convention.to_string(),
                self.convention.to_string(),
            );
        }
        if self.reference != config.reference_point() {
            return mismatch(
                "reference point",
                format!("{:?}", config.reference_point()),
                format!("{:?}", self.reference),
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Decides a run against a calibrated reference.
///
/// Fail when the median bound distance exceeds the reference 99% quantile, or
/// when more than 1% of fits fall outside the reference 99.9% κ̂ envelope.
/// Inconclusive without a reference or without fitted replicates.
pub fn verdict(records: &[ReplicateRecord], reference: Option<&ReferenceSummary>) -> Verdict {
    let Some(reference) = reference else {
        return Verdict::Inconclusive;
    };
    let (Some(q99), Some((lo, hi))) = (
        reference.distance_quantile(0.99),
        reference.kappa_envelope(),
    ) else {
        return Verdict::Inconclusive;
    };
    if records.is_empty() {
        return Verdict::Inconclusive;
    }
    let distances: Vec<f64> = records.iter().map(|r| r.distance_eq5).collect();
    let median = SummaryStats::of(&distances).median;
    let outside = records
        .iter()
        .filter(|r| r.kappa_hat < lo || r.kappa_hat > hi)
        .count();
    if median > q99 || outside as f64 > ENVELOPE_EXCESS_FRACTION * records.len() as f64 {
        Verdict::Fail
    } else {
        Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<ReplicateRecord>,
    pub skipped: Vec<SkippedReplicate>,
    pub aggregates: Aggregates,
    pub reference: Option<ReferenceSummary>,
    pub verdict: Verdict,
}

/// A validated experiment, with any external stream already decoded.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    stream: Option<Arc<[Symbol]>>,
}

impl Experiment {
    /// Validates the configuration and loads the external stream, if any.
    pub fn new(config: ExperimentConfig) -> Result<Self, HarnessError> {
        config.validate()?;
        let stream = match &config.source {
            Source::Builtin { .. } => None,
            Source::External { stream } => Some(sources::open_stream(stream)?.into()),
        };
        Ok(Self { config, stream })
    }

    /// Uses already-decoded symbols in place of reading the configured stream.
    pub fn with_symbols(
        config: ExperimentConfig,
        symbols: Vec<Symbol>,
    ) -> Result<Self, HarnessError> {
        config.validate()?;
        if let Some(bad) = symbols.iter().find(|&&s| s >= config.alphabet_size) {
            return Err(HarnessError::InvalidConfig(format!(
                "symbol {bad} outside alphabet [0, {})",
                config.alphabet_size
            )));
        }
        Ok(Self {
            config,
            stream: Some(symbols.into()),
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    /// Number of complete segments in the external stream, if there is one.
    pub fn available_segments(&self) -> Option<usize> {
        self.stream
            .as_ref()
            .map(|s| s.len() / self.config.sequence_length)
    }

    pub fn run_replicate(&self, index: usize) -> Result<ReplicateOutcome, HarnessError> {
        let cfg = &self.config;
        let (seed, gaps) = match (&cfg.source, &self.stream) {
            (_, Some(stream)) => {
                let start = index.saturating_mul(cfg.sequence_length);
                let end = start.saturating_add(cfg.sequence_length);
                if end > stream.len() {
                    let available = stream.len().saturating_sub(start);
                    return Ok(skipped(
                        index,
                        None,
                        SkipReason::StreamExhausted { available },
                    ));
                }
                let mut jitter = self.jitter_generator(index)?;
                let segment = &stream[start..end];
                (
                    None,
                    spacing::extract_gaps(segment, cfg.target, cfg.convention, jitter.as_mut()),
                )
            }
            (Source::Builtin { generator }, None) => {
                let seed = sources::split_seed(cfg.master_seed, index as u64);
                let mut rng = sources::create_generator(*generator, seed)?;
                let reducer = SymbolReducer::new(rng.word_bits(), cfg.alphabet_size)?;
                let mut jitter = self.jitter_generator(index)?;
                let mut extractor = GapExtractor::new(cfg.target, cfg.convention, jitter.as_mut())?;
                for _ in 0..cfg.sequence_length {
                    extractor.push(rng.next_symbol_with(&reducer));
                }
                (Some(seed), extractor.finish())
            }
            (Source::External { .. }, None) => {
                unreachable!("external experiments are constructed with a decoded stream")
            }
        };

        let series = match gaps {
            Ok(series) => series,
            Err(SpacingError::InsufficientOccurrences { occurrences }) => {
                return Ok(skipped(
                    index,
                    seed,
                    SkipReason::InsufficientOccurrences { occurrences },
                ));
            }
            Err(e) => return Err(e.into()),
        };
        let summary = match spacing::summarize(&series) {
            Ok(s) => s,
            Err(SpacingError::TooFewGaps { .. }) => {
                let occurrences = series.occurrences();
                return Ok(skipped(
                    index,
                    seed,
                    SkipReason::InsufficientOccurrences { occurrences },
                ));
            }
            Err(e) => return Err(e.into()),
        };
        let fit = match gamma::fit_mle(&summary) {
            Ok(fit) => fit,
            Err(GammaError::DegenerateSample { .. }) => {
                return Ok(skipped(index, seed, SkipReason::DegenerateSample));
            }
            Err(e) => return Err(e.into()),
        };
        let reference = cfg.reference_point();
        Ok(ReplicateOutcome::Fitted(ReplicateRecord {
            index,
            seed,
            mu_hat: fit.params.mu(),
            kappa_hat: fit.params.kappa(),
            n_gaps: summary.n,
            iterations: fit.iterations,
            distance_eq5: gamma::distance_bound(&reference, &fit.params),
            distance_arclength: gamma::arc_length_distance(&reference, &fit.params),
        }))
    }

    /// Jitter comes from a gold generator on its own seed stream so that the
    /// generator under test never feeds the jitter.
    fn jitter_generator(
        &self,
        index: usize,
    ) -> Result<Option<sources::GeneratorHandle>, HarnessError> {
        if self.config.convention != GapConvention::ExclusiveJittered {
            return Ok(None);
        }
        let seed = sources::split_seed(!self.config.master_seed, index as u64);
        Ok(Some(sources::create_generator(
            GeneratorKind::Gold64,
            seed,
        )?))
    }

    /// Runs every replicate; aggregation is a fold over the index-ordered outcomes.
    pub fn run(
        &self,
        reference: Option<&ReferenceSummary>,
    ) -> Result<ExperimentReport, HarnessError> {
        if let Some(r) = reference {
            r.check_compatible(&self.config)?;
        }
        let outcomes = self.outcomes()?;
        let mut records = Vec::new();
        let mut skipped = Vec::new();
        for outcome in outcomes {
            match outcome {
                ReplicateOutcome::Fitted(r) => records.push(r),
                ReplicateOutcome::Skipped(s) => skipped.push(s),
            }
        }
        if records.is_empty() {
            return Err(HarnessError::AllSkipped {
                replicates: self.config.replicates,
                first_reason: skipped[0].reason.clone(),
            });
        }
        let aggregates = Aggregates::from_records(&records, skipped.len());
        let verdict = verdict(&records, reference);
        Ok(ExperimentReport {
            config: self.config.clone(),
            records,
            skipped,
            aggregates,
            reference: reference.cloned(),
            verdict,
        })
    }

    fn outcomes(&self) -> Result<Vec<ReplicateOutcome>, HarnessError> {
        let work = || {
            (0..self.config.replicates)
                .into_par_iter()
                .map(|i| self.run_replicate(i))
                .collect::<Result<Vec<_>, _>>()
        };
        match self.config.threads {
            None => work(),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::ThreadPool(e.to_string()))?
                .install(work),
        }
    }
}

fn skipped(index: usize, seed: Option<u64>, reason: SkipReason) -> ReplicateOutcome {
    ReplicateOutcome::Skipped(SkippedReplicate {
        index,
        seed,
        reason,
    })
}

pub fn run_replicate(
    config: &ExperimentConfig,
    index: usize,
) -> Result<ReplicateOutcome, HarnessError> {
    if index >= config.replicates {
        return Err(HarnessError::InvalidConfig(format!(
            "replicate index {index} out of range for {} replicates",
            config.replicates
        )));
    }
    Experiment::new(config.clone())?.run_replicate(index)
}

pub fn run_experiment(
    config: &ExperimentConfig,
    reference: Option<&ReferenceSummary>,
) -> Result<ExperimentReport, HarnessError> {
    Experiment::new(config.clone())?.run(reference)
}

/// Calibrates the null distribution with `trials` gold-generator replicates
/// using the sequence shape of `config`.
pub fn reference_distribution(
    config: &ExperimentConfig,
    trials: usize,
) -> Result<ReferenceSummary, HarnessError> {
    if trials < MIN_TRIALS {
        return Err(HarnessError::InvalidConfig(format!(
            "calibration needs at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    let gold = ExperimentConfig {
        replicates: trials,
        source: Source::Builtin {
            generator: GeneratorKind::Gold64,
        },
        ..config.clone()
    };
    let report = run_experiment(&gold, None)?;
    let kappa: Vec<f64> = report.records.iter().map(|r| r.kappa_hat).collect();
    let distance: Vec<f64> = report.records.iter().map(|r| r.distance_eq5).collect();
    Ok(ReferenceSummary {
        trials,
        fitted: report.records.len(),
        sequence_length: gold.sequence_length,
        alphabet_size: gold.alphabet_size,
        target: gold.target,
        convention: gold.convention,
        reference: gold.reference_point(),
        master_seed: gold.master_seed,
        kappa_hat: quantiles(&kappa, &KAPPA_LEVELS),
        distance_eq5: quantiles(&distance, &DISTANCE_LEVELS),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(kappa_hat: f64, distance_eq5: f64) -> ReplicateRecord {
        ReplicateRecord {
            index: 0,
            seed: None,
            mu_hat: 512.0,
            kappa_hat,
            n_gaps: 195,
            iterations: 3,
            distance_eq5,
            distance_arclength: distance_eq5,
        }
    }

    fn reference(q99: f64, envelope: (f64, f64)) -> ReferenceSummary {
        let cfg = ExperimentConfig::default();
        let kappa_hat = KAPPA_LEVELS
            .iter()
            .map(|&level| QuantilePoint {
                level,
                value: if level < 0.5 {
                    envelope.0
                } else if level > 0.5 {
                    envelope.1
                } else {
                    1.0
                },
            })
            .collect();
        ReferenceSummary {
            trials: 100,
            fitted: 100,
            sequence_length: cfg.sequence_length,
            alphabet_size: cfg.alphabet_size,
            target: 0,
            convention: cfg.convention,
            reference: cfg.reference_point(),
            master_seed: 0,
            kappa_hat,
            distance_eq5: DISTANCE_LEVELS
                .iter()
                .map(|&level| QuantilePoint { level, value: q99 })
                .collect(),
        }
    }

    #[test]
    fn verdict_threshold_logic() {
        let reference = reference(0.5, (0.7, 1.4));
        assert_eq!(
            verdict(&[record(1.0, 10.0)], Some(&reference)),
            Verdict::Fail
        );
        assert_eq!(
            verdict(&vec![record(1.0, 0.0); 10], Some(&reference)),
            Verdict::Pass
        );
        assert_eq!(verdict(&[record(1.0, 0.0)], None), Verdict::Inconclusive);
        assert_eq!(verdict(&[], Some(&reference)), Verdict::Inconclusive);

        // 1 of 100 outside the envelope is allowed, 2 are not
        let mut records = vec![record(1.0, 0.1); 100];
        records[0].kappa_hat = 2.0;
        assert_eq!(verdict(&records, Some(&reference)), Verdict::Pass);
        records[1].kappa_hat = 0.1;
        assert_eq!(verdict(&records, Some(&reference)), Verdict::Fail);
    }

    #[test]
    fn quantiles_interpolate() {
        let sorted = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&sorted, 0.0), 1.0);
        assert_eq!(quantile_sorted(&sorted, 1.0), 5.0);
        assert_eq!(quantile_sorted(&sorted, 0.5), 3.0);
        assert_eq!(quantile_sorted(&sorted, 0.125), 1.5);
        let s = SummaryStats::of(&[2.0]);
        assert_eq!(
            (s.min, s.max, s.mean, s.median, s.std),
            (2.0, 2.0, 2.0, 2.0, 0.0)
        );
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let short = ExperimentConfig {
            sequence_length: 100,
            ..Default::default()
        };
        assert!(matches!(
            short.validate(),
            Err(HarnessError::InvalidConfig(_))
        ));
        let none = ExperimentConfig {
            replicates: 0,
            ..Default::default()
        };
        assert!(none.validate().is_err());
        let target = ExperimentConfig {
            target: 512,
            ..Default::default()
        };
        assert!(target.validate().is_err());
        let wide = ExperimentConfig {
            alphabet_size: 1 << 17,
            sequence_length: 1 << 20,
            source: Source::Builtin {
                generator: GeneratorKind::WeakLcg16,
            },
            ..Default::default()
        };
        assert!(wide.validate().is_err());
        assert_eq!(ExperimentConfig::default().reference_point().mu(), 512.0);
    }

    #[test]
    fn reference_mismatch_is_rejected() {
        let reference = reference(0.5, (0.7, 1.4));
        let cfg = ExperimentConfig {
            replicates: 2,
            sequence_length: 200_000,
            ..Default::default()
        };
        assert!(matches!(
            run_experiment(&cfg, Some(&reference)),
            Err(HarnessError::ReferenceMismatch(_))
        ));
    }

    #[test]
    fn calibration_needs_enough_trials() {
        assert!(reference_distribution(&ExperimentConfig::default(), 10).is_err());
    }
}
