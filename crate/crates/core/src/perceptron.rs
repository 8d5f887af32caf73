//! Single-neuron primitives: feature vectors, the synaptic memory (weights
//! plus threshold), the bipolar/binary fire functions, and the trained-memory
//! predicate.

use crate::error::{Error, Result};

/// An n-dimensional real feature vector, the example applied to the neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    components: Vec<f64>,
}

impl FeatureVector {
    /// Builds a vector, rejecting empty or non-finite input.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("feature vector must have at least one component"));
        }
        if let Some(bad) = components.iter().find(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("non-finite feature component {bad}")));
        }
        Ok(Self { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }
}

/// The perceptron's entire trained state: weight vector and threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SynapticMemory {
    pub(crate) weights: Vec<f64>,
    pub(crate) threshold: f64,
}

impl SynapticMemory {
    /// Builds a memory, rejecting empty weights or non-finite values.
    pub fn new(weights: Vec<f64>, threshold: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("weight vector must have at least one component"));
        }
        if weights.iter().any(|w| !w.is_finite()) || !threshold.is_finite() {
            return Err(Error::invalid("memory values must be finite"));
        }
        Ok(Self { weights, threshold })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Euclidean norm of the weight vector.
    pub fn weight_norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    /// Scalar product of the example with the weights; the threshold plays no part.
    pub fn activation(&self, x: &FeatureVector) -> Result<f64> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.dim(),
            });
        }
        Ok(dot(&self.weights, x.components()))
    }

    /// Bipolar fire function: +1 when the activation strictly exceeds the
    /// threshold, -1 otherwise. Activation exactly at the threshold does not fire.
    pub fn fire_bipolar(&self, x: &FeatureVector) -> Result<BipolarLabel> {
        let act = self.activation(x)?;
        Ok(if act - self.threshold > 0.0 {
            BipolarLabel::Positive
        } else {
            BipolarLabel::Negative
        })
    }

    /// Binary fire function: 1 iff the bipolar output is +1.
    pub fn fire_binary(&self, x: &FeatureVector) -> Result<u8> {
        Ok(match self.fire_bipolar(x)? {
            BipolarLabel::Positive => 1,
            BipolarLabel::Negative => 0,
        })
    }

    /// True iff every positive example fires +1 and every negative fires -1.
    pub fn is_trained(&self, data: &LabeledDataset) -> Result<bool> {
        for x in data.positives() {
            if self.fire_bipolar(x)? == BipolarLabel::Negative {
                return Ok(false);
            }
        }
        for x in data.negatives() {
            if self.fire_bipolar(x)? == BipolarLabel::Positive {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The two admissible bipolar outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BipolarLabel {
    Positive,
    Negative,
}

impl BipolarLabel {
    pub fn value(self) -> i8 {
        match self {
            BipolarLabel::Positive => 1,
            BipolarLabel::Negative => -1,
        }
    }
}

/// Two classes of equal-dimension examples. Duplicates within a class are
/// allowed; the same vector in both classes is rejected because no hyperplane
/// could ever separate it from itself.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    positives: Vec<FeatureVector>,
    negatives: Vec<FeatureVector>,
}

impl LabeledDataset {
    pub fn new(positives: Vec<FeatureVector>, negatives: Vec<FeatureVector>) -> Result<Self> {
        if positives.is_empty() {
            return Err(Error::EmptyClass { class: "positive" });
        }
        if negatives.is_empty() {
            return Err(Error::EmptyClass { class: "negative" });
        }
        let dim = positives[0].dim();
        for v in positives.iter().chain(negatives.iter()) {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: v.dim(),
                });
            }
        }
        for (pi, p) in positives.iter().enumerate() {
            for (ni, n) in negatives.iter().enumerate() {
                if p == n {
                    return Err(Error::SharedVector {
                        pos_index: pi,
                        neg_index: ni,
                    });
                }
            }
        }
        Ok(Self { positives, negatives })
    }

    pub fn dim(&self) -> usize {
        self.positives[0].dim()
    }

    pub fn positives(&self) -> &[FeatureVector] {
        &self.positives
    }

    pub fn negatives(&self) -> &[FeatureVector] {
        &self.negatives
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
