//! Perceived geometry (projections along the weight direction) versus exact
//! geometry (pairwise Euclidean scans), and the verdict on how far the
//! memory's view of class separation deviates from the truth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perceptron::{FeatureVector, LabeledDataset, SynapticMemory};

/// Selects one of the two classes for per-class metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassSide {
    Positive,
    Negative,
}

/// How the perceived separation compares to the actual distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerceptionVerdict {
    /// Ratio equals one within tolerance: the perception matches reality.
    Objective,
    /// Ratio below one: the memory understates the separation.
    FuzzyUndervaluated,
    /// Ratio above one: the memory overstates the separation.
    FuzzyOvervaluated,
}

/// A cross-class index pair (positive index, negative index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossPair {
    pub positive: usize,
    pub negative: usize,
}

/// An index pair within one class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WithinPair {
    pub first: usize,
    pub second: usize,
}

/// Indices of the examples behind every extremal quantity in a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryWitnesses {
    pub pos_min_activation: usize,
    pub pos_max_activation: usize,
    pub neg_min_activation: usize,
    pub neg_max_activation: usize,
    pub closest_cross_pair: CrossPair,
    pub pos_diameter_pair: WithinPair,
    pub neg_diameter_pair: WithinPair,
}

/// Perceived and actual geometry side by side, with the ratio verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    /// Gap between the lowest positive and highest negative activation.
    pub activation_gap: f64,
    /// The gap divided by the weight norm: the perceived separation.
    pub perceived_separation: f64,
    /// Minimum cross-class Euclidean distance: the actual separation.
    pub actual_separation: f64,
    /// perceived_separation / actual_separation.
    pub separation_ratio: f64,
    pub verdict: PerceptionVerdict,
    pub perceived_diameter_positive: f64,
    pub perceived_diameter_negative: f64,
    pub actual_diameter_positive: f64,
    pub actual_diameter_negative: f64,
    /// Whether the memory classifies the dataset perfectly; the verdict is
    /// only meaningful when it does.
    pub trained: bool,
    pub witnesses: GeometryWitnesses,
}

/// Activation gap D and perceived separation D / ||W||.
///
/// Both are defined for untrained memories too (the gap is then negative or
/// zero), so traces can plot the perceived separation before convergence.
pub fn perceived_separation(data: &LabeledDataset, memory: &SynapticMemory) -> Result<(f64, f64)> {
    let norm = nonzero_norm(memory)?;
    let (pos, neg) = activation_extremes(data, memory)?;
    let gap = pos.min_value - neg.max_value;
    Ok((gap, gap / norm))
}

/// Minimum Euclidean distance over all cross-class pairs, with the pair that
/// attains it. Exhaustive scan.
pub fn actual_distance(data: &LabeledDataset) -> (f64, CrossPair) {
    let mut best = f64::INFINITY;
    let mut pair = CrossPair { positive: 0, negative: 0 };
    for (pi, p) in data.positives().iter().enumerate() {
        for (ni, n) in data.negatives().iter().enumerate() {
            let dist = euclidean(p, n);
            if dist < best {
                best = dist;
                pair = CrossPair { positive: pi, negative: ni };
            }
        }
    }
    (best, pair)
}

/// Within-class projection spread along the weight direction: the class's
/// extent as the memory perceives it.
pub fn perceived_diameter(
    side: ClassSide,
    data: &LabeledDataset,
    memory: &SynapticMemory,
) -> Result<f64> {
    let norm = nonzero_norm(memory)?;
    let stats = class_stats(class(data, side), memory)?;
    Ok((stats.max_value - stats.min_value) / norm)
}

/// The cross-class projection span: the distance between the highest
/// projection of one class and the lowest projection of the other. Kept
/// alongside `perceived_diameter` because it mixes the two classes rather
/// than measuring a single class's spread.
pub fn cross_class_projection_span(
    side: ClassSide,
    data: &LabeledDataset,
    memory: &SynapticMemory,
) -> Result<f64> {
    let norm = nonzero_norm(memory)?;
    let pos = class_stats(data.positives(), memory)?;
    let neg = class_stats(data.negatives(), memory)?;
    let span = match side {
        ClassSide::Positive => (pos.max_value - neg.min_value).abs(),
        ClassSide::Negative => (neg.max_value - pos.min_value).abs(),
    };
    Ok(span / norm)
}

/// Maximum pairwise Euclidean distance within the class, with the attaining
/// pair. A singleton class has diameter zero.
pub fn actual_diameter(side: ClassSide, data: &LabeledDataset) -> (f64, WithinPair) {
    let members = class(data, side);
    let mut best = 0.0;
    let mut pair = WithinPair { first: 0, second: 0 };
    for i in 0..members.len() {
        for j in (i + 1)..members.len() {
            let dist = euclidean(&members[i], &members[j]);
            if dist > best {
                best = dist;
                pair = WithinPair { first: i, second: j };
            }
        }
    }
    (best, pair)
}

/// Compares the perceived/actual separation ratio to one at the given
/// tolerance.
pub fn classify_ratio(d_star: f64, d_actual: f64, tol: f64) -> Result<PerceptionVerdict> {
    if !(d_actual > 0.0) {
        return Err(Error::invalid(format!(
            "actual distance must be positive to form a ratio, got {d_actual}"
        )));
    }
    if !(tol >= 0.0) || !tol.is_finite() {
        return Err(Error::invalid(format!("tolerance must be finite and non-negative, got {tol}")));
    }
    let ratio = d_star / d_actual;
    Ok(if (ratio - 1.0).abs() <= tol {
        PerceptionVerdict::Objective
    } else if ratio < 1.0 {
        PerceptionVerdict::FuzzyUndervaluated
    } else {
        PerceptionVerdict::FuzzyOvervaluated
    })
}

/// Assembles every perceived and actual metric, the verdict, and the witness
/// indices into one report.
pub fn geometry_report(
    data: &LabeledDataset,
    memory: &SynapticMemory,
    tol: f64,
) -> Result<GeometryReport> {
    let norm = nonzero_norm(memory)?;
    let pos = class_stats(data.positives(), memory)?;
    let neg = class_stats(data.negatives(), memory)?;
    let gap = pos.min_value - neg.max_value;
    let d_star = gap / norm;
    let (d_actual, closest) = actual_distance(data);
    let (diam_pos, pos_pair) = actual_diameter(ClassSide::Positive, data);
    let (diam_neg, neg_pair) = actual_diameter(ClassSide::Negative, data);
    let verdict = classify_ratio(d_star, d_actual, tol)?;

    Ok(GeometryReport {
        activation_gap: gap,
        perceived_separation: d_star,
        actual_separation: d_actual,
        separation_ratio: d_star / d_actual,
        verdict,
        perceived_diameter_positive: (pos.max_value - pos.min_value) / norm,
        perceived_diameter_negative: (neg.max_value - neg.min_value) / norm,
        actual_diameter_positive: diam_pos,
        actual_diameter_negative: diam_neg,
        trained: memory.is_trained(data)?,
        witnesses: GeometryWitnesses {
            pos_min_activation: pos.min_index,
            pos_max_activation: pos.max_index,
            neg_min_activation: neg.min_index,
            neg_max_activation: neg.max_index,
            closest_cross_pair: closest,
            pos_diameter_pair: pos_pair,
            neg_diameter_pair: neg_pair,
        },
    })
}

struct ClassStats {
    min_index: usize,
    min_value: f64,
    max_index: usize,
    max_value: f64,
}

struct Extremes {
    min_value: f64,
    max_value: f64,
}

fn class_stats(members: &[FeatureVector], memory: &SynapticMemory) -> Result<ClassStats> {
    let mut stats = ClassStats {
        min_index: 0,
        min_value: memory.activation(&members[0])?,
        max_index: 0,
        max_value: memory.activation(&members[0])?,
    };
    for (i, x) in members.iter().enumerate().skip(1) {
        let act = memory.activation(x)?;
        if act < stats.min_value {
            stats.min_index = i;
            stats.min_value = act;
        }
        if act > stats.max_value {
            stats.max_index = i;
            stats.max_value = act;
        }
    }
    Ok(stats)
}

fn activation_extremes(data: &LabeledDataset, memory: &SynapticMemory) -> Result<(Extremes, Extremes)> {
    let pos = class_stats(data.positives(), memory)?;
    let neg = class_stats(data.negatives(), memory)?;
    Ok((
        Extremes { min_value: pos.min_value, max_value: pos.max_value },
        Extremes { min_value: neg.min_value, max_value: neg.max_value },
    ))
}

fn class(data: &LabeledDataset, side: ClassSide) -> &[FeatureVector] {
    match side {
        ClassSide::Positive => data.positives(),
        ClassSide::Negative => data.negatives(),
    }
}

fn nonzero_norm(memory: &SynapticMemory) -> Result<f64> {
    let norm = memory.weight_norm();
    if norm == 0.0 {
        return Err(Error::ZeroWeightVector);
    }
    Ok(norm)
}

pub(crate) fn euclidean(a: &FeatureVector, b: &FeatureVector) -> f64 {
    a.components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(c: &[f64]) -> FeatureVector {
        FeatureVector::new(c.to_vec()).unwrap()
    }

    fn mem(w: &[f64], t: f64) -> SynapticMemory {
        SynapticMemory::new(w.to_vec(), t).unwrap()
    }

    fn dataset(pos: &[&[f64]], neg: &[&[f64]]) -> LabeledDataset {
        LabeledDataset::new(
            pos.iter().map(|c| fv(c)).collect(),
            neg.iter().map(|c| fv(c)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn perceived_separation_divides_the_gap_by_the_norm() {
        let unit = dataset(&[&[0.0, 2.0]], &[&[0.0, 0.0]]);
        let (gap, d_star) = perceived_separation(&unit, &mem(&[0.0, 1.0], 0.0)).unwrap();
        assert_eq!(gap, 2.0);
        assert_eq!(d_star, 2.0);

        // Activations {2, 3} vs {0} under w=[1,1]; the norm is sqrt(2).
        let diag = dataset(&[&[0.0, 2.0], &[1.0, 2.0]], &[&[0.0, 0.0]]);
        let (gap, d_star) = perceived_separation(&diag, &mem(&[1.0, 1.0], 0.0)).unwrap();
        assert_eq!(gap, 2.0);
        assert!((d_star - 2.0 / 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn perceived_separation_goes_negative_when_projections_overlap() {
        let data = dataset(&[&[0.0, 1.0]], &[&[0.0, 2.0]]);
        let (gap, d_star) = perceived_separation(&data, &mem(&[0.0, 1.0], 0.0)).unwrap();
        assert!(gap < 0.0);
        assert!(d_star < 0.0);
    }

    #[test]
    fn zero_weights_are_rejected_for_projection_metrics() {
        let data = dataset(&[&[0.0, 1.0]], &[&[0.0, 0.0]]);
        let zero = mem(&[0.0, 0.0], 0.0);
        assert!(matches!(perceived_separation(&data, &zero), Err(Error::ZeroWeightVector)));
        assert!(matches!(
            perceived_diameter(ClassSide::Positive, &data, &zero),
            Err(Error::ZeroWeightVector)
        ));
    }

    #[test]
    fn actual_distance_finds_the_closest_cross_pair() {
        let triangle = dataset(&[&[0.0, 0.0]], &[&[3.0, 4.0]]);
        let (d, pair) = actual_distance(&triangle);
        assert_eq!(d, 5.0);
        assert_eq!(pair, CrossPair { positive: 0, negative: 0 });

        // Candidate distances are 2 and sqrt(5); the scan must pick 2.
        let two = dataset(&[&[0.0, 2.0], &[1.0, 2.0]], &[&[0.0, 0.0]]);
        let (d, pair) = actual_distance(&two);
        assert_eq!(d, 2.0);
        assert_eq!(pair, CrossPair { positive: 0, negative: 0 });
    }

    #[test]
    fn perceived_diameter_is_the_projection_spread() {
        let data = dataset(&[&[0.0, 0.0], &[3.0, 4.0]], &[&[9.0, 9.0]]);
        assert_eq!(perceived_diameter(ClassSide::Positive, &data, &mem(&[1.0, 0.0], 0.0)).unwrap(), 3.0);
        assert_eq!(perceived_diameter(ClassSide::Positive, &data, &mem(&[0.0, 1.0], 0.0)).unwrap(), 4.0);
        // Singleton class projects to a single point.
        assert_eq!(perceived_diameter(ClassSide::Negative, &data, &mem(&[1.0, 0.0], 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn actual_diameter_scans_all_pairs() {
        let data = dataset(&[&[0.0, 0.0], &[3.0, 4.0]], &[&[9.0, 9.0]]);
        let (d, pair) = actual_diameter(ClassSide::Positive, &data);
        assert_eq!(d, 5.0);
        assert_eq!(pair, WithinPair { first: 0, second: 1 });
        assert_eq!(actual_diameter(ClassSide::Negative, &data).0, 0.0);

        let three = dataset(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]], &[&[9.0, 9.0]]);
        let (d, _) = actual_diameter(ClassSide::Positive, &three);
        assert!((d - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cross_class_span_mixes_extremes_of_both_classes() {
        // Projections: positives {2, 3}, negatives {0} under w=[1,1], norm sqrt(2).
        let data = dataset(&[&[0.0, 2.0], &[1.0, 2.0]], &[&[0.0, 0.0]]);
        let memory = mem(&[1.0, 1.0], 0.0);
        let pos_span = cross_class_projection_span(ClassSide::Positive, &data, &memory).unwrap();
        let neg_span = cross_class_projection_span(ClassSide::Negative, &data, &memory).unwrap();
        assert!((pos_span - 3.0 / 2.0f64.sqrt()).abs() < 1e-12);
        assert!((neg_span - 2.0 / 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn classify_ratio_brackets_unity_with_a_tolerance() {
        assert_eq!(
            classify_ratio(216.0, 730.0, 1e-9).unwrap(),
            PerceptionVerdict::FuzzyUndervaluated
        );
        assert_eq!(classify_ratio(2.0, 2.0, 1e-9).unwrap(), PerceptionVerdict::Objective);
        assert_eq!(classify_ratio(3.0, 2.0, 1e-9).unwrap(), PerceptionVerdict::FuzzyOvervaluated);
        assert!(classify_ratio(1.0, 0.0, 1e-9).is_err());
        assert!(classify_ratio(1.0, -2.0, 1e-9).is_err());
    }

    #[test]
    fn geometry_report_composes_the_metrics() {
        let data = dataset(&[&[0.0, 2.0], &[1.0, 2.0]], &[&[0.0, 0.0]]);
        let report = geometry_report(&data, &mem(&[1.0, 1.0], 1.0), 1e-9).unwrap();
        assert!((report.separation_ratio - 2.0f64.sqrt() / 2.0).abs() < 1e-9);
        assert_eq!(report.verdict, PerceptionVerdict::FuzzyUndervaluated);
        assert!(report.trained);
        assert_eq!(report.witnesses.pos_min_activation, 0);
        assert_eq!(report.witnesses.pos_max_activation, 1);
        assert_eq!(report.witnesses.closest_cross_pair, CrossPair { positive: 0, negative: 0 });
    }

    #[test]
    fn weights_parallel_to_the_offset_perceive_objectively() {
        let data = dataset(&[&[0.0, 1.0]], &[&[0.0, 0.0]]);
        let report = geometry_report(&data, &mem(&[0.0, 1.0], 0.5), 1e-9).unwrap();
        assert_eq!(report.separation_ratio, 1.0);
        assert_eq!(report.verdict, PerceptionVerdict::Objective);
    }
}
