//! Separation statistics of a target symbol in a symbol stream.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gamma::{GammaError, SampleSummary};
use crate::sources::{GeneratorHandle, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpacingError {
    #[error("symbol stream is empty")]
    EmptyStream,
    #[error("the exclusive-jittered convention needs a jitter generator")]
    MissingJitterSource,
    #[error("target occurs {occurrences} time(s); at least 2 occurrences are needed")]
    InsufficientOccurrences { occurrences: usize },
    #[error("{gaps} gap(s) available; at least 2 are needed")]
    TooFewGaps { gaps: usize },
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error("unknown gap convention `{0}`")]
    UnknownConvention(String),
}

/// How a separation between consecutive occurrences is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapConvention {
    /// Difference of occurrence indices; integral and ≥ 1.
    #[default]
    IndexDifference,
    /// Occurrence index `i` is moved to `i + U` with `U` uniform on (0, 1)
    /// before differencing, which makes gaps continuous and strictly positive
    /// without changing their mean.
    ExclusiveJittered,
}

impl GapConvention {
    pub fn name(&self) -> &'static str {
        match self {
            Self::IndexDifference => "index-difference",
            Self::ExclusiveJittered => "exclusive-jittered",
        }
    }
}

impl fmt::Display for GapConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GapConvention {
    type Err = SpacingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "index-difference" | "index" => Ok(Self::IndexDifference),
            "exclusive-jittered" | "jittered" => Ok(Self::ExclusiveJittered),
            _ => Err(SpacingError::UnknownConvention(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSeries {
    gaps: Vec<f64>,
    occurrences: usize,
    stream_length: usize,
    convention: GapConvention,
    first_index: Option<usize>,
    last_index: Option<usize>,
}

impl GapSeries {
    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn occurrences(&self) -> usize {
        self.occurrences
    }

    pub fn stream_length(&self) -> usize {
        self.stream_length
    }

    pub fn convention(&self) -> GapConvention {
        self.convention
    }

    /// Index of the first target occurrence, if any.
    pub fn first_index(&self) -> Option<usize> {
        self.first_index
    }

    pub fn last_index(&self) -> Option<usize> {
        self.last_index
    }
}

/// Incremental gap extraction, one symbol at a time.
#[derive(Debug)]
pub struct GapExtractor<'a> {
    target: Symbol,
    convention: GapConvention,
    jitter: Option<&'a mut GeneratorHandle>,
    position: usize,
    occurrences: usize,
    first_index: Option<usize>,
    last: Option<(usize, f64)>,
    gaps: Vec<f64>,
}

impl<'a> GapExtractor<'a> {
    /// `jitter` must be present for [`GapConvention::ExclusiveJittered`] and
    /// is ignored otherwise.
    pub fn new(
        target: Symbol,
        convention: GapConvention,
        jitter: Option<&'a mut GeneratorHandle>,
    ) -> Result<Self, SpacingError> {
        let jitter = match convention {
            GapConvention::IndexDifference => None,
            GapConvention::ExclusiveJittered => {
                Some(jitter.ok_or(SpacingError::MissingJitterSource)?)
            }
        };
        Ok(Self {
            target,
            convention,
            jitter,
            position: 0,
            occurrences: 0,
            first_index: None,
            last: None,
            gaps: Vec::new(),
        })
    }

    #[inline]
    pub fn push(&mut self, symbol: Symbol) {
        let index = self.position;
        self.position += 1;
        if symbol != self.target {
            return;
        }
        self.occurrences += 1;
        let offset = match self.jitter.as_deref_mut() {
            Some(rng) => rng.next_open_unit(),
            None => 0.0,
        };
        match self.last {
            // split into integer and fractional parts to keep full precision
            Some((prev, prev_offset)) => self
                .gaps
                .push((index - prev) as f64 + (offset - prev_offset)),
            None => self.first_index = Some(index),
        }
        self.last = Some((index, offset));
    }

    pub fn finish(self) -> Result<GapSeries, SpacingError> {
        if self.position == 0 {
            return Err(SpacingError::EmptyStream);
        }
        if self.occurrences < 2 {
            return Err(SpacingError::InsufficientOccurrences {
                occurrences: self.occurrences,
            });
        }
        Ok(GapSeries {
            gaps: self.gaps,
            occurrences: self.occurrences,
            stream_length: self.position,
            convention: self.convention,
            first_index: self.first_index,
            last_index: self.last.map(|(i, _)| i),
        })
    }
}

impl Extend<Symbol> for GapExtractor<'_> {
    fn extend<T: IntoIterator<Item = Symbol>>(&mut self, iter: T) {
        for s in iter {
            self.push(s);
        }
    }
}

pub fn extract_gaps(
    stream: &[Symbol],
    target: Symbol,
    convention: GapConvention,
    rng: Option<&mut GeneratorHandle>,
) -> Result<GapSeries, SpacingError> {
    let mut extractor = GapExtractor::new(target, convention, rng)?;
    extractor.extend(stream.iter().copied());
    extractor.finish()
}

/// Sufficient statistics of the gaps for the gamma fit.
pub fn summarize(series: &GapSeries) -> Result<SampleSummary, SpacingError> {
    if series.gaps.len() < 2 {
        return Err(SpacingError::TooFewGaps {
            gaps: series.gaps.len(),
        });
    }
    Ok(SampleSummary::from_values(&series.gaps)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{create_generator, GeneratorKind};

    const A: Symbol = 0;
    const B: Symbol = 1;

    #[test]
    fn index_differences() {
        let s = extract_gaps(&[A, B, A, A, B], A, GapConvention::IndexDifference, None).unwrap();
        assert_eq!(s.gaps(), &[2.0, 1.0]);
        assert_eq!(s.occurrences(), 3);
        assert_eq!(s.stream_length(), 5);
        assert_eq!(s.first_index(), Some(0));
        assert_eq!(s.last_index(), Some(3));

        let s = extract_gaps(&[A, A, A, A], A, GapConvention::IndexDifference, None).unwrap();
        assert_eq!(s.gaps(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn too_few_occurrences() {
        assert_eq!(
            extract_gaps(&[B, A, B], A, GapConvention::IndexDifference, None),
            Err(SpacingError::InsufficientOccurrences { occurrences: 1 })
        );
        assert_eq!(
            extract_gaps(&[], A, GapConvention::IndexDifference, None),
            Err(SpacingError::EmptyStream)
        );
    }

    #[test]
    fn jitter_requires_rng() {
        assert_eq!(
            extract_gaps(&[A, A], A, GapConvention::ExclusiveJittered, None),
            Err(SpacingError::MissingJitterSource)
        );
        let mut rng = create_generator(GeneratorKind::Gold64, 5).unwrap();
        let s = extract_gaps(
            &[A, A, B, A],
            A,
            GapConvention::ExclusiveJittered,
            Some(&mut rng),
        )
        .unwrap();
        assert_eq!(s.gaps().len(), 2);
        assert!(s.gaps().iter().all(|&g| g > 0.0));
        assert!((s.gaps()[0] - 1.0).abs() < 1.0);
        assert!((s.gaps()[1] - 2.0).abs() < 1.0);
    }

    #[test]
    fn summaries() {
        let series = extract_gaps(&[A, A, A, A], A, GapConvention::IndexDifference, None).unwrap();
        let s = summarize(&series).unwrap();
        assert_eq!((s.mean, s.mean_log, s.s_stat), (1.0, 0.0, 0.0));

        // gaps 1, 2, 3, 4
        let stream = [A, A, B, A, B, B, A, B, B, B, A];
        let s = summarize(&extract_gaps(&stream, A, GapConvention::IndexDifference, None).unwrap())
            .unwrap();
        assert_eq!(s.n, 4);
        assert_eq!(s.mean, 2.5);
        assert!((s.mean_log - 0.794_513_457_586_986_4).abs() < 1e-15);
        assert!((s.s_stat - 0.121_777_274_287_168_66).abs() < 1e-15);

        let short = extract_gaps(&[A, A], A, GapConvention::IndexDifference, None).unwrap();
        assert_eq!(summarize(&short), Err(SpacingError::TooFewGaps { gaps: 1 }));
    }
}
