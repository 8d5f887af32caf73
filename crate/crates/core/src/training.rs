//! Scheduled extremal training: the decaying rate schedule, the per-epoch
//! selection of extreme examples, the coupled weight/threshold update, and the
//! epoch loop that records a convergence trace.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perceptron::{BipolarLabel, FeatureVector, LabeledDataset, SynapticMemory};

/// Rate schedule `n * log2(n) / 2^n`. Zero at n = 1, peaks at n = 3, then
/// decays faster than geometrically.
///
/// Panics if `n` is 0 (log2 undefined there).
pub fn rate(n: u32) -> f64 {
    assert!(n >= 1, "rate schedule is defined for epochs >= 1");
    let nf = f64::from(n);
    nf * nf.log2() / nf.exp2()
}

/// Everything a training run needs besides the dataset. Identical config and
/// dataset reproduce the run bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    /// Cap on the number of epochs examined.
    pub max_epochs: u32,
    /// Seed for weight initialization.
    pub seed: u64,
    /// Weights initialize uniformly in `[init_low, init_high)`.
    pub init_low: f64,
    pub init_high: f64,
    pub initial_threshold: f64,
    /// First epoch index fed to the rate schedule. The default skips n = 1,
    /// where the rate is zero and an update could only shift the threshold.
    pub start_index: u32,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            max_epochs: 1000,
            seed: 42,
            init_low: -1.0,
            init_high: 1.0,
            initial_threshold: 0.0,
            start_index: 2,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_epochs < 1 {
            return Err(Error::invalid("max_epochs must be at least 1"));
        }
        if self.start_index < 1 {
            return Err(Error::invalid("start_index must be at least 1"));
        }
        if !(self.init_low < self.init_high) {
            return Err(Error::invalid(format!(
                "init_low ({}) must be strictly below init_high ({})",
                self.init_low, self.init_high
            )));
        }
        if !self.init_low.is_finite() || !self.init_high.is_finite() || !self.initial_threshold.is_finite() {
            return Err(Error::invalid("initialization bounds and threshold must be finite"));
        }
        if self.start_index.checked_add(self.max_epochs).is_none() {
            return Err(Error::invalid("start_index + max_epochs overflows the epoch counter"));
        }
        Ok(())
    }
}

/// Indices of the two lowest-activation positives and the two
/// highest-activation negatives under the current memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtremalSelection {
    pub pos_min1: usize,
    pub pos_min2: usize,
    pub neg_max1: usize,
    pub neg_max2: usize,
}

/// State entering one epoch, plus which update branches that epoch applied.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochSnapshot {
    pub epoch: u32,
    pub weights: Vec<f64>,
    pub threshold: f64,
    pub min_pos_activation: f64,
    pub max_neg_activation: f64,
    pub applied_positive_update: bool,
    pub applied_negative_update: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainingOutcome {
    Converged(u32),
    EpochLimitReached,
}

/// One snapshot per epoch examined, in order, plus how the run ended.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    pub snapshots: Vec<EpochSnapshot>,
    pub outcome: TrainingOutcome,
}

/// Result of one `update_step`: the new memory and which branches fired.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub memory: SynapticMemory,
    pub applied_positive: bool,
    pub applied_negative: bool,
}

/// Draws weights uniformly from the configured range with a seeded generator;
/// the threshold starts at its configured value.
pub fn init_memory(dim: usize, config: &TrainingConfig) -> Result<SynapticMemory> {
    config.validate()?;
    if dim < 1 {
        return Err(Error::invalid("memory dimension must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let weights = (0..dim)
        .map(|_| rng.gen_range(config.init_low..config.init_high))
        .collect();
    SynapticMemory::new(weights, config.initial_threshold)
}

/// Picks the two positives with the smallest activations and the two negatives
/// with the greatest. Ties go to the earlier index; a singleton class
/// contributes its only member twice.
pub fn select_extremes(data: &LabeledDataset, memory: &SynapticMemory) -> Result<ExtremalSelection> {
    let (pos_min1, pos_min2) = two_smallest(data.positives(), memory)?;
    let (neg_max1, neg_max2) = two_largest(data.negatives(), memory)?;
    Ok(ExtremalSelection {
        pos_min1,
        pos_min2,
        neg_max1,
        neg_max2,
    })
}

fn two_smallest(vectors: &[FeatureVector], memory: &SynapticMemory) -> Result<(usize, usize)> {
    let mut best: Option<(usize, f64)> = None;
    let mut second: Option<(usize, f64)> = None;
    for (i, x) in vectors.iter().enumerate() {
        let act = memory.activation(x)?;
        match best {
            None => best = Some((i, act)),
            // Strict comparison keeps the earliest index on ties.
            Some((_, b)) if act < b => {
                second = best;
                best = Some((i, act));
            }
            _ => match second {
                None => second = Some((i, act)),
                Some((_, s)) if act < s => second = Some((i, act)),
                _ => {}
            },
        }
    }
    let (first, _) = best.expect("dataset classes are non-empty by construction");
    let second = second.map_or(first, |(i, _)| i);
    Ok((first, second))
}

fn two_largest(vectors: &[FeatureVector], memory: &SynapticMemory) -> Result<(usize, usize)> {
    let mut best: Option<(usize, f64)> = None;
    let mut second: Option<(usize, f64)> = None;
    for (i, x) in vectors.iter().enumerate() {
        let act = memory.activation(x)?;
        match best {
            None => best = Some((i, act)),
            Some((_, b)) if act > b => {
                second = best;
                best = Some((i, act));
            }
            _ => match second {
                None => second = Some((i, act)),
                Some((_, s)) if act > s => second = Some((i, act)),
                _ => {}
            },
        }
    }
    let (first, _) = best.expect("dataset classes are non-empty by construction");
    let second = second.map_or(first, |(i, _)| i);
    Ok((first, second))
}

/// Applies the two conditional update branches in sequence, positive first.
///
/// The positive branch fires while some positive example fails to fire +1: it
/// adds the two lowest-activation positives scaled by `rate(n)` to the weights
/// and lowers the threshold by the square root of the entering weight norm.
/// The negative branch then fires while some negative example fires +1 against
/// the memory the positive branch left behind: it subtracts the two
/// highest-activation negatives scaled by `rate(n)` and raises the threshold
/// by the square root of its own entering weight norm.
pub fn update_step(
    memory: &SynapticMemory,
    selection: &ExtremalSelection,
    data: &LabeledDataset,
    n: u32,
) -> Result<StepResult> {
    if data.dim() != memory.dim() {
        return Err(Error::DimensionMismatch {
            expected: memory.dim(),
            actual: data.dim(),
        });
    }
    let r = rate(n);
    let mut current = memory.clone();

    let applied_positive = misfires(data.positives(), &current, BipolarLabel::Negative)?;
    if applied_positive {
        let shift = current.weight_norm().sqrt();
        let a = data.positives()[selection.pos_min1].components();
        let b = data.positives()[selection.pos_min2].components();
        for (w, (x1, x2)) in current.weights.iter_mut().zip(a.iter().zip(b)) {
            *w += (x1 + x2) * r;
        }
        current.threshold -= shift;
    }

    let applied_negative = misfires(data.negatives(), &current, BipolarLabel::Positive)?;
    if applied_negative {
        let shift = current.weight_norm().sqrt();
        let a = data.negatives()[selection.neg_max1].components();
        let b = data.negatives()[selection.neg_max2].components();
        for (w, (x1, x2)) in current.weights.iter_mut().zip(a.iter().zip(b)) {
            *w -= (x1 + x2) * r;
        }
        current.threshold += shift;
    }

    Ok(StepResult {
        memory: current,
        applied_positive,
        applied_negative,
    })
}

fn misfires(vectors: &[FeatureVector], memory: &SynapticMemory, wrong: BipolarLabel) -> Result<bool> {
    for x in vectors {
        if memory.fire_bipolar(x)? == wrong {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Runs the epoch loop: snapshot the entering state, stop if the memory is
/// already trained, otherwise select extremes and apply the update step.
pub fn train(data: &LabeledDataset, config: &TrainingConfig) -> Result<(SynapticMemory, TrainingTrace)> {
    config.validate()?;
    let mut memory = init_memory(data.dim(), config)?;
    let mut snapshots = Vec::new();

    for step in 0..config.max_epochs {
        let epoch = config.start_index + step;
        let min_pos = class_extreme(data.positives(), &memory, f64::min)?;
        let max_neg = class_extreme(data.negatives(), &memory, f64::max)?;
        let mut snapshot = EpochSnapshot {
            epoch,
            weights: memory.weights().to_vec(),
            threshold: memory.threshold(),
            min_pos_activation: min_pos,
            max_neg_activation: max_neg,
            applied_positive_update: false,
            applied_negative_update: false,
        };

        if memory.is_trained(data)? {
            snapshots.push(snapshot);
            return Ok((
                memory,
                TrainingTrace {
                    snapshots,
                    outcome: TrainingOutcome::Converged(epoch),
                },
            ));
        }

        let selection = select_extremes(data, &memory)?;
        let result = update_step(&memory, &selection, data, epoch)?;
        snapshot.applied_positive_update = result.applied_positive;
        snapshot.applied_negative_update = result.applied_negative;
        snapshots.push(snapshot);
        memory = result.memory;

        if memory.weights().iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite { epoch, what: "a weight" });
        }
        if !memory.threshold().is_finite() {
            return Err(Error::NonFinite { epoch, what: "the threshold" });
        }
    }

    Ok((
        memory,
        TrainingTrace {
            snapshots,
            outcome: TrainingOutcome::EpochLimitReached,
        },
    ))
}

fn class_extreme(
    vectors: &[FeatureVector],
    memory: &SynapticMemory,
    pick: fn(f64, f64) -> f64,
) -> Result<f64> {
    let mut extreme = memory.activation(&vectors[0])?;
    for x in &vectors[1..] {
        extreme = pick(extreme, memory.activation(x)?);
    }
    Ok(extreme)
}

/// Writes the trace CSV atomically.
pub fn save_trace_csv(trace: &TrainingTrace, path: &std::path::Path) -> Result<()> {
    let mut bytes = Vec::new();
    write_trace_csv(trace, &mut bytes)?;
    crate::fsutil::atomic_write(path, &bytes)
}

/// Writes the trace as CSV: one row per epoch, full-precision floats, header
/// `epoch,theta,min_pos_act,max_neg_act,pos_update,neg_update,w_0,...,w_{n-1}`.
pub fn write_trace_csv<W: Write>(trace: &TrainingTrace, mut out: W) -> Result<()> {
    let dim = trace.snapshots.first().map_or(0, |s| s.weights.len());
    write!(out, "epoch,theta,min_pos_act,max_neg_act,pos_update,neg_update")?;
    for i in 0..dim {
        write!(out, ",w_{i}")?;
    }
    writeln!(out)?;
    for snap in &trace.snapshots {
        write!(
            out,
            "{},{},{},{},{},{}",
            snap.epoch,
            snap.threshold,
            snap.min_pos_activation,
            snap.max_neg_activation,
            snap.applied_positive_update,
            snap.applied_negative_update,
        )?;
        for w in &snap.weights {
            write!(out, ",{w}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}
