//! On-disk formats for experiment artifacts: the plain-text memory file and
//! the JSON experiment/geometry reports.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil;
use crate::geometry::GeometryReport;
use crate::perceptron::SynapticMemory;
use crate::training::{TrainingConfig, TrainingOutcome, TrainingTrace};

/// Writes a memory as three lines: dimension, space-separated weights,
/// threshold. Floats print at full round-trip precision.
pub fn write_memory<W: Write>(memory: &SynapticMemory, mut out: W) -> Result<()> {
    writeln!(out, "{}", memory.dim())?;
    let mut first = true;
    for w in memory.weights() {
        if first {
            write!(out, "{w}")?;
            first = false;
        } else {
            write!(out, " {w}")?;
        }
    }
    writeln!(out)?;
    writeln!(out, "{}", memory.threshold())?;
    Ok(())
}

/// Parses the three-line memory format, reporting the first bad line.
pub fn read_memory<R: BufRead>(input: R) -> Result<SynapticMemory> {
    let mut lines = input.lines();

    let dim_line = lines.next().ok_or_else(|| Error::format(1, "missing dimension line"))??;
    let dim: usize = dim_line
        .trim()
        .parse()
        .map_err(|_| Error::format(1, format!("dimension is not a positive integer: {dim_line:?}")))?;
    if dim < 1 {
        return Err(Error::format(1, "dimension must be at least 1"));
    }

    let weights_line = lines.next().ok_or_else(|| Error::format(2, "missing weights line"))??;
    let weights = parse_floats(&weights_line, 2)?;
    if weights.len() != dim {
        return Err(Error::format(
            2,
            format!("expected {dim} weights, got {}", weights.len()),
        ));
    }

    let threshold_line = lines.next().ok_or_else(|| Error::format(3, "missing threshold line"))??;
    let threshold = match parse_floats(&threshold_line, 3)?.as_slice() {
        [t] => *t,
        other => return Err(Error::format(3, format!("expected one threshold, got {}", other.len()))),
    };

    for (extra_index, line) in lines.enumerate() {
        if !line?.trim().is_empty() {
            return Err(Error::format(4 + extra_index, "unexpected content after the threshold line"));
        }
    }

    SynapticMemory::new(weights, threshold)
}

fn parse_floats(line: &str, line_no: usize) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|token| {
            let value: f64 = token
                .parse()
                .map_err(|_| Error::format(line_no, format!("not a number: {token:?}")))?;
            if !value.is_finite() {
                return Err(Error::format(line_no, format!("non-finite value: {token:?}")));
            }
            Ok(value)
        })
        .collect()
}

pub fn save_memory(memory: &SynapticMemory, path: &Path) -> Result<()> {
    let mut bytes = Vec::new();
    write_memory(memory, &mut bytes)?;
    fsutil::atomic_write(path, &bytes)
}

pub fn load_memory(path: &Path) -> Result<SynapticMemory> {
    let file = std::fs::File::open(path)?;
    read_memory(std::io::BufReader::new(file))
}

/// Everything needed to reproduce a run: inputs, seeds, and knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset_path: String,
    pub target: char,
    pub training: TrainingConfig,
    pub tolerance: f64,
}

/// How the run ended, in deterministic counters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeSummary {
    pub converged: bool,
    pub converged_epoch: Option<u32>,
    pub epochs_examined: u32,
    pub positive_updates: u32,
    pub negative_updates: u32,
}

impl OutcomeSummary {
    pub fn from_trace(trace: &TrainingTrace) -> Self {
        let converged_epoch = match trace.outcome {
            TrainingOutcome::Converged(epoch) => Some(epoch),
            TrainingOutcome::EpochLimitReached => None,
        };
        Self {
            converged: converged_epoch.is_some(),
            converged_epoch,
            epochs_examined: trace.snapshots.len() as u32,
            positive_updates: trace.snapshots.iter().filter(|s| s.applied_positive_update).count() as u32,
            negative_updates: trace.snapshots.iter().filter(|s| s.applied_negative_update).count() as u32,
        }
    }
}

/// The headline reading of the geometry block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub verdict: crate::geometry::PerceptionVerdict,
    /// True when the perceived separation falls short of the actual distance.
    pub separation_undervalued: bool,
}

/// The full record of one training-plus-geometry run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: RunConfig,
    pub outcome: OutcomeSummary,
    pub geometry: GeometryReport,
    pub summary: RunSummary,
}

impl ExperimentReport {
    pub fn new(config: RunConfig, trace: &TrainingTrace, geometry: GeometryReport) -> Self {
        let summary = RunSummary {
            verdict: geometry.verdict,
            separation_undervalued: geometry.separation_ratio < 1.0,
        };
        Self {
            config,
            outcome: OutcomeSummary::from_trace(trace),
            geometry,
            summary,
        }
    }
}

pub fn render_experiment_report(report: &ExperimentReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    text.push('\n');
    text
}

pub fn save_experiment_report(report: &ExperimentReport, path: &Path) -> Result<()> {
    fsutil::atomic_write(path, render_experiment_report(report).as_bytes())
}

pub fn load_experiment_report(path: &Path) -> Result<ExperimentReport> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::format(e.line(), e.to_string()))
}

pub fn render_geometry_report(report: &GeometryReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    text.push('\n');
    text
}

pub fn save_geometry_report(report: &GeometryReport, path: &Path) -> Result<()> {
    fsutil::atomic_write(path, render_geometry_report(report).as_bytes())
}

pub fn load_geometry_report(path: &Path) -> Result<GeometryReport> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::format(e.line(), e.to_string()))
}
