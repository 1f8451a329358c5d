//! Symbol sources: seeded built-in generators and decoders for external
//! streams.
//!
//! Built-in generators and their frozen constants:
//!
//! | kind         | recurrence                                                    | word bits | period |
//! |--------------|---------------------------------------------------------------|-----------|--------|
//! | `gold64`     | SplitMix64: s += 0x9E3779B97F4A7C15, output mix(s)            | 64        | 2^64   |
//! | `weak-lcg16` | x = 5x + 1 mod 2^16, output x                                 | 16        | 2^16   |
//! | `full-lcg64` | x = 6364136223846793005x + 1442695040888963407 mod 2^64       | 64        | 2^64   |
//!
//! Symbols are drawn from the native word range `[0, 2^bits)`: words in the
//! topmost partial range (the last `2^bits mod m` values) are rejected and the
//! rest are split into `m` equal buckets, so the symbol is the bucket index.
//! This is exactly uniform and uses the high-order bits of each word.

use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, Read};
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Symbol = u32;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const LCG16_MULTIPLIER: u16 = 5;
const LCG16_INCREMENT: u16 = 1;
const LCG64_MULTIPLIER: u64 = 6_364_136_223_846_793_005;
const LCG64_INCREMENT: u64 = 1_442_695_040_888_963_407;

#[derive(Debug, Error)]
pub enum SourceError {
    #[error("generator kind `{0}` has no built-in implementation")]
    UnsupportedKind(GeneratorKind),
    #[error("unknown generator kind `{0}`")]
    UnknownKind(String),
    #[error("unknown stream format `{0}`")]
    UnknownFormat(String),
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(u64),
    #[error("alphabet size {alphabet} exceeds the {bits}-bit word range")]
    AlphabetTooLarge { alphabet: u64, bits: u32 },
    #[error("alphabet size {0} does not divide 256; raw bytes cannot be reduced without bias")]
    BiasedReduction(u32),
    #[error("malformed token `{token}` at position {position}: {reason}")]
    MalformedToken {
        token: String,
        position: usize,
        reason: String,
    },
    #[error("stream length {0} is not a multiple of 4 bytes")]
    TrailingBytes(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Gold64,
    WeakLcg16,
    FullLcg64,
    External,
}

impl GeneratorKind {
    pub const BUILT_IN: [GeneratorKind; 3] = [Self::Gold64, Self::WeakLcg16, Self::FullLcg64];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gold64 => "gold64",
            Self::WeakLcg16 => "weak-lcg16",
            Self::FullLcg64 => "full-lcg64",
            Self::External => "external",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = SourceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Self::Gold64,
            Self::WeakLcg16,
            Self::FullLcg64,
            Self::External,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| SourceError::UnknownKind(s.to_string()))
    }
}

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replicate `index` of a run keyed by `master_seed`.
///
/// This is the `index + 1`-th SplitMix64 output from state `master_seed`; the
/// map is injective in `index` for a fixed master seed.
pub fn split_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Engine {
    SplitMix(u64),
    Lcg16(u16),
    Lcg64(u64),
}

/// A seeded built-in generator. Single owner; clone it to fork the stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorHandle {
    kind: GeneratorKind,
    seed: u64,
    engine: Engine,
}

pub fn create_generator(kind: GeneratorKind, seed: u64) -> Result<GeneratorHandle, SourceError> {
    let engine = match kind {
        GeneratorKind::Gold64 => Engine::SplitMix(seed),
        GeneratorKind::WeakLcg16 => Engine::Lcg16(mix64(seed) as u16),
        GeneratorKind::FullLcg64 => Engine::Lcg64(seed),
        GeneratorKind::External => return Err(SourceError::UnsupportedKind(kind)),
    };
    Ok(GeneratorHandle { kind, seed, engine })
}

impl GeneratorHandle {
    pub fn new(kind: GeneratorKind, seed: u64) -> Result<Self, SourceError> {
        create_generator(kind, seed)
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Width of one native output word.
    pub fn word_bits(&self) -> u32 {
        match self.engine {
            Engine::Lcg16(_) => 16,
            Engine::SplitMix(_) | Engine::Lcg64(_) => 64,
        }
    }

    /// Next native word, in `[0, 2^word_bits)`.
    #[inline]
    pub fn next_word(&mut self) -> u64 {
        match &mut self.engine {
            Engine::SplitMix(s) => {
                *s = s.wrapping_add(GOLDEN_GAMMA);
                mix64(*s)
            }
            Engine::Lcg16(x) => {
                *x = x
                    .wrapping_mul(LCG16_MULTIPLIER)
                    .wrapping_add(LCG16_INCREMENT);
                u64::from(*x)
            }
            Engine::Lcg64(x) => {
                *x = x
                    .wrapping_mul(LCG64_MULTIPLIER)
                    .wrapping_add(LCG64_INCREMENT);
                *x
            }
        }
    }

    /// Uniform symbol in `[0, alphabet_size)`.
    ///
    /// Panics if `alphabet_size < 2` or exceeds the word range; use
    /// [`SymbolReducer::new`] to validate first.
    pub fn next_symbol(&mut self, alphabet_size: u32) -> Symbol {
        let reducer =
            SymbolReducer::new(self.word_bits(), alphabet_size).unwrap_or_else(|e| panic!("{e}"));
        self.next_symbol_with(&reducer)
    }

    #[inline]
    pub fn next_symbol_with(&mut self, reducer: &SymbolReducer) -> Symbol {
        loop {
            if let Some(s) = reducer.reduce(self.next_word()) {
                return s;
            }
        }
    }

    /// Uniform on the open interval (0, 1), from the top 53 bits of a 64-bit draw.
    pub fn next_open_unit(&mut self) -> f64 {
        let bits = rand_core::RngCore::next_u64(self) >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

impl rand_core::RngCore for GeneratorHandle {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        match self.word_bits() {
            64 => self.next_word(),
            bits => {
                // concatenate native words, most significant first
                let mut acc = 0u64;
                let mut filled = 0;
                while filled < 64 {
                    acc = (acc << bits) | self.next_word();
                    filled += bits;
                }
                acc
            }
        }
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}

/// Maps words of a `bits`-wide range onto `[0, alphabet)` without bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolReducer {
    alphabet: u32,
    /// Largest accepted word.
    max_accepted: u64,
    bucket: u64,
    shift: Option<u32>,
}

impl SymbolReducer {
    pub fn new(bits: u32, alphabet: u32) -> Result<Self, SourceError> {
        assert!((1..=64).contains(&bits), "word width {bits}");
        if alphabet < 2 {
            return Err(SourceError::AlphabetTooSmall(u64::from(alphabet)));
        }
        let range = 1u128 << bits;
        let m = u128::from(alphabet);
        if m > range {
            return Err(SourceError::AlphabetTooLarge {
                alphabet: u64::from(alphabet),
                bits,
            });
        }
        let zone = range - range % m;
        let bucket = (zone / m) as u64;
        let shift = bucket.is_power_of_two().then(|| bucket.trailing_zeros());
        Ok(Self {
            alphabet,
            max_accepted: (zone - 1) as u64,
            bucket,
            shift,
        })
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    /// The symbol for `word`, or `None` if the word falls in the rejected top range.
    #[inline]
    pub fn reduce(&self, word: u64) -> Option<Symbol> {
        if word > self.max_accepted {
            return None;
        }
        let s = match self.shift {
            Some(k) => word >> k,
            None => word / self.bucket,
        };
        Some(s as Symbol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StreamFormat {
    /// One symbol per byte.
    RawBytes,
    /// 4-byte little-endian unsigned words.
    LittleEndian32,
    /// Whitespace-separated base-10 integers.
    AsciiIntegers,
}

impl StreamFormat {
    pub fn name(&self) -> &'static str {
        match self {
            Self::RawBytes => "raw-bytes",
            Self::LittleEndian32 => "le32",
            Self::AsciiIntegers => "ascii",
        }
    }
}

impl fmt::Display for StreamFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StreamFormat {
    type Err = SourceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw-bytes" | "raw" | "bytes" => Ok(Self::RawBytes),
            "le32" | "little-endian32" => Ok(Self::LittleEndian32),
            "ascii" | "ascii-integers" => Ok(Self::AsciiIntegers),
            _ => Err(SourceError::UnknownFormat(s.to_string())),
        }
    }
}

/// Where an external stream comes from. Serialized as a path string, with
/// `-` standing for standard input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum StreamOrigin {
    Stdin,
    Path(PathBuf),
}

impl From<String> for StreamOrigin {
    fn from(s: String) -> Self {
        if s == "-" {
            Self::Stdin
        } else {
            Self::Path(PathBuf::from(s))
        }
    }
}

impl From<StreamOrigin> for String {
    fn from(o: StreamOrigin) -> Self {
        match o {
            StreamOrigin::Stdin => "-".to_string(),
            StreamOrigin::Path(p) => p.to_string_lossy().into_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamSpec {
    pub origin: StreamOrigin,
    pub format: StreamFormat,
    pub alphabet_size: u32,
}

/// Reads and decodes the whole stream described by `spec`.
pub fn open_stream(spec: &StreamSpec) -> Result<Vec<Symbol>, SourceError> {
    match &spec.origin {
        StreamOrigin::Stdin => decode_symbols(io::stdin().lock(), spec.format, spec.alphabet_size),
        StreamOrigin::Path(path) => {
            let file = BufReader::new(File::open(path)?);
            decode_symbols(file, spec.format, spec.alphabet_size)
        }
    }
}

/// Decodes symbols from any reader.
pub fn decode_symbols<R: Read>(
    mut reader: R,
    format: StreamFormat,
    alphabet_size: u32,
) -> Result<Vec<Symbol>, SourceError> {
    if alphabet_size < 2 {
        return Err(SourceError::AlphabetTooSmall(u64::from(alphabet_size)));
    }
    match format {
        StreamFormat::RawBytes => {
            if 256 % alphabet_size != 0 {
                return Err(SourceError::BiasedReduction(alphabet_size));
            }
            let mut bytes = Vec::new();
            reader.read_to_end(&mut bytes)?;
            Ok(bytes
                .into_iter()
                .map(|b| Symbol::from(b) % alphabet_size)
                .collect())
        }
        StreamFormat::LittleEndian32 => {
            let reducer = SymbolReducer::new(32, alphabet_size)?;
            let mut bytes = Vec::new();
            reader.read_to_end(&mut bytes)?;
            if bytes.len() % 4 != 0 {
                return Err(SourceError::TrailingBytes(bytes.len()));
            }
            Ok(bytes
                .chunks_exact(4)
                .filter_map(|w| {
                    let word = u32::from_le_bytes([w[0], w[1], w[2], w[3]]);
                    reducer.reduce(u64::from(word))
                })
                .collect())
        }
        StreamFormat::AsciiIntegers => {
            let mut text = String::new();
            reader.read_to_string(&mut text)?;
            text.split_ascii_whitespace()
                .enumerate()
                .map(|(position, token)| {
                    let malformed = |reason: String| SourceError::MalformedToken {
                        token: token.to_string(),
                        position,
                        reason,
                    };
                    let value: u64 = token.parse().map_err(|e| malformed(format!("{e}")))?;
                    if value >= u64::from(alphabet_size) {
                        return Err(malformed(format!("outside alphabet [0, {alphabet_size})")));
                    }
                    Ok(value as Symbol)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gold_is_deterministic() {
        let mut a = create_generator(GeneratorKind::Gold64, 1).unwrap();
        let mut b = create_generator(GeneratorKind::Gold64, 1).unwrap();
        for _ in 0..1000 {
            assert_eq!(a.next_word(), b.next_word());
        }
        let mut c = create_generator(GeneratorKind::Gold64, 2).unwrap();
        assert_ne!(a.next_word(), c.next_word());
    }

    #[test]
    fn gold_matches_reference_splitmix() {
        // Reference outputs of SplitMix64 seeded with 1234567.
        let mut g = create_generator(GeneratorKind::Gold64, 1_234_567).unwrap();
        let expected = [
            6_457_827_717_110_365_317u64,
            3_203_168_211_198_807_973,
            9_817_491_932_198_370_423,
            4_593_380_528_125_082_431,
            16_408_922_859_458_223_821,
        ];
        for e in expected {
            assert_eq!(g.next_word(), e);
        }
    }

    #[test]
    fn weak_lcg_has_short_period() {
        let mut g = create_generator(GeneratorKind::WeakLcg16, 99).unwrap();
        let first: Vec<u64> = (0..16).map(|_| g.next_word()).collect();
        for _ in 16..(1 << 16) {
            g.next_word();
        }
        let again: Vec<u64> = (0..16).map(|_| g.next_word()).collect();
        assert_eq!(first, again);
        assert!(first.iter().all(|&w| w < (1 << 16)));
    }

    #[test]
    fn external_kind_is_not_constructible() {
        assert!(matches!(
            create_generator(GeneratorKind::External, 0),
            Err(SourceError::UnsupportedKind(_))
        ));
        assert!("mersenne".parse::<GeneratorKind>().is_err());
        assert_eq!(
            "weak-lcg16".parse::<GeneratorKind>().unwrap(),
            GeneratorKind::WeakLcg16
        );
    }

    #[test]
    fn reducer_rejects_top_range() {
        let r = SymbolReducer::new(8, 3).unwrap();
        // 256 = 3 * 85 + 1: word 255 is rejected, buckets of 85
        assert_eq!(r.reduce(255), None);
        assert_eq!(r.reduce(254), Some(2));
        assert_eq!(r.reduce(84), Some(0));
        assert_eq!(r.reduce(85), Some(1));
        let r = SymbolReducer::new(16, 512).unwrap();
        assert_eq!(r.reduce(0xFFFF), Some(511));
        assert_eq!(r.reduce(127), Some(0));
        assert!(SymbolReducer::new(16, 1 << 17).is_err());
        assert!(SymbolReducer::new(64, 1).is_err());
    }

    #[test]
    fn symbols_in_range() {
        for kind in GeneratorKind::BUILT_IN {
            let mut g = create_generator(kind, 7).unwrap();
            for _ in 0..10_000 {
                assert!(g.next_symbol(512) < 512);
                assert!(g.next_symbol(3) < 3);
            }
        }
    }

    #[test]
    fn open_unit_is_open() {
        let mut g = create_generator(GeneratorKind::Gold64, 3).unwrap();
        for _ in 0..10_000 {
            let u = g.next_open_unit();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn split_seed_is_distinct() {
        let seeds: std::collections::HashSet<u64> =
            (0..10_000).map(|i| split_seed(42, i)).collect();
        assert_eq!(seeds.len(), 10_000);
        assert_eq!(split_seed(42, 5), split_seed(42, 5));
    }

    #[test]
    fn decode_formats() {
        let raw = decode_symbols(&[0x00u8, 0x01, 0xFF][..], StreamFormat::RawBytes, 256).unwrap();
        assert_eq!(raw, vec![0, 1, 255]);
        let raw = decode_symbols(&[0x00u8, 0x05, 0xFF][..], StreamFormat::RawBytes, 4).unwrap();
        assert_eq!(raw, vec![0, 1, 3]);
        assert!(matches!(
            decode_symbols(&[1u8][..], StreamFormat::RawBytes, 512),
            Err(SourceError::BiasedReduction(512))
        ));

        let text = decode_symbols("3 7 11".as_bytes(), StreamFormat::AsciiIntegers, 512).unwrap();
        assert_eq!(text, vec![3, 7, 11]);
        match decode_symbols("3 700".as_bytes(), StreamFormat::AsciiIntegers, 512) {
            Err(SourceError::MalformedToken {
                token, position, ..
            }) => {
                assert_eq!(token, "700");
                assert_eq!(position, 1);
            }
            other => panic!("{other:?}"),
        }
        assert!(decode_symbols("1 x".as_bytes(), StreamFormat::AsciiIntegers, 512).is_err());
        assert!(decode_symbols("-1".as_bytes(), StreamFormat::AsciiIntegers, 512).is_err());

        let words: Vec<u8> = [0u32, 0x8000_0000, u32::MAX]
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .collect();
        assert_eq!(
            decode_symbols(&words[..], StreamFormat::LittleEndian32, 2).unwrap(),
            vec![0, 1, 1]
        );
        let words: Vec<u8> = [u32::MAX].iter().flat_map(|w| w.to_le_bytes()).collect();
        // 2^32 mod 3 = 1, so the largest word is rejected
        assert!(decode_symbols(&words[..], StreamFormat::LittleEndian32, 3)
            .unwrap()
            .is_empty());
        assert!(matches!(
            decode_symbols(&[1u8, 2, 3][..], StreamFormat::LittleEndian32, 2),
            Err(SourceError::TrailingBytes(3))
        ));
    }
}
