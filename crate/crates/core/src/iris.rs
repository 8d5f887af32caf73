//! Hamming similarity over binary codes, synthetic genuine/imposter score
//! partitions, the safety band between them, and the crispness report that
//! contrasts graded scores with two-valued decisions.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fsutil;

/// Default bin count for the crispness histogram.
pub const DEFAULT_HISTOGRAM_BINS: usize = 20;

/// A fixed-length binary code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrisCode {
    bits: Vec<bool>,
}

impl IrisCode {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::invalid("an iris code needs at least one bit"));
        }
        Ok(Self { bits })
    }

    /// Parses a string of `0` and `1` characters.
    pub fn from_bit_string(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("bit string may only contain 0 and 1, got {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        Self::new(bits)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn complement(&self) -> Self {
        Self { bits: self.bits.iter().map(|b| !b).collect() }
    }
}

/// Fraction of agreeing bit positions, in [0, 1]. The Hamming distance is one
/// minus this value.
pub fn hamming_similarity(a: &IrisCode, b: &IrisCode) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), actual: b.len() });
    }
    let agreements = a.bits.iter().zip(&b.bits).filter(|(x, y)| x == y).count();
    Ok(agreements as f64 / a.len() as f64)
}

/// Similarity scores split by whether the compared codes share an identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ScorePartition {
    genuine_scores: Vec<f64>,
    imposter_scores: Vec<f64>,
}

impl ScorePartition {
    pub fn new(genuine_scores: Vec<f64>, imposter_scores: Vec<f64>) -> Result<Self> {
        for s in genuine_scores.iter().chain(&imposter_scores) {
            if !(0.0..=1.0).contains(s) {
                return Err(Error::invalid(format!("score {s} outside [0, 1]")));
            }
        }
        Ok(Self { genuine_scores, imposter_scores })
    }

    pub fn genuine_scores(&self) -> &[f64] {
        &self.genuine_scores
    }

    pub fn imposter_scores(&self) -> &[f64] {
        &self.imposter_scores
    }
}

/// Builds a synthetic partition: genuine pairs are a random code against a
/// noisy copy (each bit flipped at `genuine_flip_rate`), imposter pairs are
/// two independent random codes. Deterministic under the seed.
pub fn synthesize_scores(
    length: usize,
    n_genuine: usize,
    n_imposter: usize,
    genuine_flip_rate: f64,
    seed: u64,
) -> Result<ScorePartition> {
    if length < 1 {
        return Err(Error::invalid("code length must be at least 1"));
    }
    if !(0.0..0.5).contains(&genuine_flip_rate) {
        return Err(Error::invalid(format!(
            "genuine_flip_rate must lie in [0, 0.5), got {genuine_flip_rate}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_code = |rng: &mut ChaCha8Rng| {
        IrisCode { bits: (0..length).map(|_| rng.gen_bool(0.5)).collect() }
    };

    let mut genuine_scores = Vec::with_capacity(n_genuine);
    for _ in 0..n_genuine {
        let code = random_code(&mut rng);
        let noisy = IrisCode {
            bits: code
                .bits
                .iter()
                .map(|&b| if rng.gen_bool(genuine_flip_rate) { !b } else { b })
                .collect(),
        };
        genuine_scores.push(hamming_similarity(&code, &noisy)?);
    }

    let mut imposter_scores = Vec::with_capacity(n_imposter);
    for _ in 0..n_imposter {
        let a = random_code(&mut rng);
        let b = random_code(&mut rng);
        imposter_scores.push(hamming_similarity(&a, &b)?);
    }

    ScorePartition::new(genuine_scores, imposter_scores)
}

/// Gap between the lowest genuine score and the highest imposter score.
/// Positive means the two score classes are separated; zero or negative means
/// they overlap.
pub fn safety_band(partition: &ScorePartition) -> Result<f64> {
    if partition.genuine_scores.is_empty() {
        return Err(Error::EmptyClass { class: "genuine" });
    }
    if partition.imposter_scores.is_empty() {
        return Err(Error::EmptyClass { class: "imposter" });
    }
    let min_genuine = partition.genuine_scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max_imposter = partition.imposter_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(min_genuine - max_imposter)
}

/// How graded the scores are: the fraction strictly inside (0, 1) plus an
/// equal-width histogram over [0, 1] (the last bin includes 1).
#[derive(Debug, Clone, PartialEq)]
pub struct CrispnessReport {
    pub fraction_interior: f64,
    pub histogram: Vec<u64>,
}

pub fn crispness_report(partition: &ScorePartition, bins: usize) -> Result<CrispnessReport> {
    if bins < 1 {
        return Err(Error::invalid("histogram needs at least one bin"));
    }
    let total = partition.genuine_scores.len() + partition.imposter_scores.len();
    if total == 0 {
        return Err(Error::invalid("crispness report needs at least one score"));
    }
    let mut histogram = vec![0u64; bins];
    let mut interior = 0usize;
    for &s in partition.genuine_scores.iter().chain(&partition.imposter_scores) {
        if s > 0.0 && s < 1.0 {
            interior += 1;
        }
        let bin = ((s * bins as f64) as usize).min(bins - 1);
        histogram[bin] += 1;
    }
    Ok(CrispnessReport {
        fraction_interior: interior as f64 / total as f64,
        histogram,
    })
}

/// Writes `kind,score` rows under a header, genuine first.
pub fn write_scores_csv<W: Write>(partition: &ScorePartition, mut out: W) -> Result<()> {
    writeln!(out, "kind,score")?;
    for s in &partition.genuine_scores {
        writeln!(out, "genuine,{s}")?;
    }
    for s in &partition.imposter_scores {
        writeln!(out, "imposter,{s}")?;
    }
    Ok(())
}

pub fn save_scores_csv(partition: &ScorePartition, path: &Path) -> Result<()> {
    let mut bytes = Vec::new();
    write_scores_csv(partition, &mut bytes)?;
    fsutil::atomic_write(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn similarity_trivial_cases() {
        let a = IrisCode::from_bit_string("11110000").unwrap();
        assert_eq!(hamming_similarity(&a, &a).unwrap(), 1.0);
        assert_eq!(hamming_similarity(&a, &a.complement()).unwrap(), 0.0);
        let b = IrisCode::from_bit_string("11111111").unwrap();
        assert_eq!(hamming_similarity(&a, &b).unwrap(), 0.5);
    }

    #[test]
    fn similarity_rejects_mismatched_lengths() {
        let a = IrisCode::from_bit_string("101").unwrap();
        let b = IrisCode::from_bit_string("10").unwrap();
        assert!(matches!(
            hamming_similarity(&a, &b),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn zero_flip_rate_gives_perfect_genuine_scores() {
        let p = synthesize_scores(64, 20, 20, 0.0, 7).unwrap();
        assert!(p.genuine_scores().iter().all(|&s| s == 1.0));
        // Random 64-bit imposters never agree on every bit here, so the
        // safety band is strictly positive.
        assert!(p.imposter_scores().iter().all(|&s| s < 1.0));
        assert!(safety_band(&p).unwrap() > 0.0);
    }

    #[test]
    fn imposter_scores_concentrate_near_one_half() {
        let length = 128;
        let p = synthesize_scores(length, 1, 200, 0.0, 11).unwrap();
        let mean: f64 = p.imposter_scores().iter().sum::<f64>() / p.imposter_scores().len() as f64;
        assert!((mean - 0.5).abs() <= 3.0 / (2.0 * (length as f64).sqrt()));
    }

    #[test]
    fn synthesis_is_deterministic() {
        let a = synthesize_scores(64, 10, 10, 0.2, 5).unwrap();
        let b = synthesize_scores(64, 10, 10, 0.2, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn synthesis_rejects_flip_rates_at_or_above_chance() {
        assert!(synthesize_scores(64, 1, 1, 0.5, 0).is_err());
        assert!(synthesize_scores(64, 1, 1, -0.1, 0).is_err());
    }

    #[test]
    fn safety_band_is_the_gap_between_extremes() {
        let p = ScorePartition::new(vec![0.9, 0.95], vec![0.4, 0.55]).unwrap();
        assert!((safety_band(&p).unwrap() - 0.35).abs() < 1e-12);

        let overlap = ScorePartition::new(vec![0.6], vec![0.7]).unwrap();
        assert!((safety_band(&overlap).unwrap() + 0.1).abs() < 1e-12);
    }

    #[test]
    fn crispness_counts_interior_scores() {
        let crisp = ScorePartition::new(vec![1.0, 1.0], vec![0.0]).unwrap();
        let report = crispness_report(&crisp, DEFAULT_HISTOGRAM_BINS).unwrap();
        assert_eq!(report.fraction_interior, 0.0);

        let fuzzy = synthesize_scores(64, 50, 50, 0.1, 3).unwrap();
        let report = crispness_report(&fuzzy, DEFAULT_HISTOGRAM_BINS).unwrap();
        assert_eq!(report.fraction_interior, 1.0);
    }

    #[test]
    fn histogram_conserves_the_score_count_and_buckets_the_edges() {
        let p = ScorePartition::new(vec![0.0, 0.049, 1.0], vec![0.5, 0.999]).unwrap();
        let report = crispness_report(&p, 20).unwrap();
        assert_eq!(report.histogram.iter().sum::<u64>(), 5);
        assert_eq!(report.histogram[0], 2); // 0.0 and 0.049
        assert_eq!(report.histogram[19], 2); // 0.999 and the right-inclusive 1.0
        assert_eq!(report.histogram[10], 1); // 0.5
    }

    #[test]
    fn scores_csv_lists_kind_then_value() {
        let p = ScorePartition::new(vec![0.75], vec![0.5]).unwrap();
        let mut bytes = Vec::new();
        write_scores_csv(&p, &mut bytes).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "kind,score\ngenuine,0.75\nimposter,0.5\n");
    }
}
