//! Compression-based distances (NCD) and their symmetrised variants, baseline
//! string metrics, kernels built on top of them, and classifiers that consume
//! precomputed distance or kernel matrices.

pub mod audit;
pub mod bench;
pub mod classify;
pub mod compression;
pub mod data;
pub mod distance;
pub mod error;
pub mod kernel;
pub mod matrix;

pub use classify::{grid_search_cv, ModelConfig, ModelGrid, PrecomputedMatrices, TrainedModel};
pub use compression::{
    compressed_length, concat_length, CacheStats, CompressorHandle, CompressorKind, LengthCache,
};
pub use data::{Label, LabeledCorpus, Sample};
pub use distance::{
    distance_matrix, DistanceMatrix, MetricKind, MetricSpec, Provenance, SymmetrisationPolicy,
};
pub use error::{Error, Result};
pub use kernel::{KernelKind, KernelMatrix, KernelSpec};
pub use matrix::Matrix;
