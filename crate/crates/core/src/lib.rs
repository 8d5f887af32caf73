//! A perceptron trained with a scheduled extremal update rule, plus the
//! instruments to measure how its internal view of the data deviates from
//! exact geometry.
//!
//! The library splits into five parts:
//!
//! - [`perceptron`]: feature vectors, the synaptic memory (weights and
//!   threshold), fire functions, and the trained-memory predicate.
//! - [`training`]: the decaying rate schedule, extremal example selection,
//!   the coupled weight/threshold update, and the epoch loop with its
//!   convergence trace.
//! - [`geometry`]: perceived separation and diameters (projections along the
//!   weight direction) against actual distances and diameters (exhaustive
//!   Euclidean scans), with a verdict on their ratio.
//! - [`dataset`]: synthetic 16x16 character rasters from embedded glyph
//!   templates, one-vs-rest task construction, and the CSV format.
//! - [`iris`]: Hamming similarity over binary codes, synthetic
//!   genuine/imposter score partitions, the safety band, and crispness.
//!
//! [`report`] holds the on-disk formats shared by the command-line tool.

pub mod dataset;
pub mod error;
pub mod geometry;
pub mod iris;
pub mod perceptron;
pub mod report;
pub mod training;

mod fsutil;

pub use error::{Error, Result};
pub use geometry::{geometry_report, ClassSide, GeometryReport, PerceptionVerdict};
pub use perceptron::{BipolarLabel, FeatureVector, LabeledDataset, SynapticMemory};
pub use training::{train, rate, TrainingConfig, TrainingOutcome, TrainingTrace};
