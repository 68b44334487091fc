//! Distances between strings and the pairwise distance-matrix engine.

mod ncd;
mod strings;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use self::ncd::{ncd, ncd_average, ncd_average_raw, ncd_raw};
pub use self::strings::{hamming, hamming_ratio, levenshtein};
use crate::compression::{compressed_length, CompressorHandle, LengthCache};
use crate::data::Sample;
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Ncd(CompressorHandle),
    Levenshtein,
    Hamming,
    HammingRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub kind: MetricKind,
    /// Additive error term; only NCD uses it.
    pub epsilon: f64,
}

impl MetricSpec {
    pub fn new(kind: MetricKind) -> Self {
        MetricSpec { kind, epsilon: 0.0 }
    }

    pub fn ncd(c: CompressorHandle) -> Self {
        Self::new(MetricKind::Ncd(c))
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::invalid(format!(
                "epsilon must be finite and >= 0, got {epsilon}"
            )));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn is_ncd(&self) -> bool {
        matches!(self.kind, MetricKind::Ncd(_))
    }

    pub fn compressor(&self) -> Option<CompressorHandle> {
        match self.kind {
            MetricKind::Ncd(c) => Some(c),
            _ => None,
        }
    }

    /// d(x, y), zero for byte-identical inputs.
    pub fn distance(&self, x: &str, y: &str, cache: &LengthCache) -> Result<f64> {
        match self.kind {
            MetricKind::Ncd(c) => ncd(x, y, c, self.epsilon, cache),
            _ => Ok(self.string_distance(x, y)),
        }
    }

    /// d(x, y) with no identical-input shortcut.
    pub fn distance_raw(&self, x: &str, y: &str, cache: &LengthCache) -> Result<f64> {
        match self.kind {
            MetricKind::Ncd(c) => ncd_raw(x, y, c, self.epsilon, cache),
            _ => Ok(self.string_distance(x, y)),
        }
    }

    fn distance_average(&self, x: &str, y: &str, cache: &LengthCache) -> Result<f64> {
        match self.kind {
            MetricKind::Ncd(c) => ncd_average(x, y, c, self.epsilon, cache),
            _ => Ok(self.string_distance(x, y)),
        }
    }

    fn string_distance(&self, x: &str, y: &str) -> f64 {
        match self.kind {
            MetricKind::Levenshtein => levenshtein(x, y) as f64,
            MetricKind::Hamming => hamming(x, y) as f64,
            MetricKind::HammingRatio => hamming_ratio(x, y),
            MetricKind::Ncd(_) => unreachable!("NCD needs a compressor"),
        }
    }

    /// Evaluates one matrix entry under a symmetrisation policy.
    pub fn distance_under(
        &self,
        policy: SymmetrisationPolicy,
        x: &str,
        y: &str,
        cache: &LengthCache,
    ) -> Result<f64> {
        match policy {
            SymmetrisationPolicy::Vanilla | SymmetrisationPolicy::Assumed => {
                self.distance(x, y, cache)
            }
            SymmetrisationPolicy::Enforced => {
                let (a, b) = canonical_order(x, y);
                self.distance(a, b, cache)
            }
            SymmetrisationPolicy::Average => self.distance_average(x, y, cache),
        }
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MetricKind::Ncd(c) => write!(f, "ncd-{c}"),
            MetricKind::Levenshtein => f.write_str("levenshtein"),
            MetricKind::Hamming => f.write_str("hamming"),
            MetricKind::HammingRatio => f.write_str("ratio"),
        }
    }
}

/// Byte-lexicographic order on the UTF-8 encoding.
pub fn canonical_order<'a>(x: &'a str, y: &'a str) -> (&'a str, &'a str) {
    if x.as_bytes() <= y.as_bytes() {
        (x, y)
    } else {
        (y, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetrisationPolicy {
    /// Every entry evaluated directly.
    Vanilla,
    /// Lower triangle evaluated, upper triangle mirrored. Self-matrices only.
    Assumed,
    /// Each pair is put in canonical order before evaluation.
    Enforced,
    /// Mean over both concatenation orders.
    Average,
}

impl SymmetrisationPolicy {
    pub const ALL: [SymmetrisationPolicy; 4] = [
        SymmetrisationPolicy::Vanilla,
        SymmetrisationPolicy::Assumed,
        SymmetrisationPolicy::Enforced,
        SymmetrisationPolicy::Average,
    ];

    /// Policy to use for test-vs-train matrices, where mirroring is undefined.
    pub fn for_rectangular(self) -> SymmetrisationPolicy {
        match self {
            SymmetrisationPolicy::Assumed => SymmetrisationPolicy::Enforced,
            other => other,
        }
    }
}

impl fmt::Display for SymmetrisationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetrisationPolicy::Vanilla => "vanilla",
            SymmetrisationPolicy::Assumed => "assumed",
            SymmetrisationPolicy::Enforced => "enforced",
            SymmetrisationPolicy::Average => "average",
        })
    }
}

impl FromStr for SymmetrisationPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vanilla" => Ok(SymmetrisationPolicy::Vanilla),
            "assumed" => Ok(SymmetrisationPolicy::Assumed),
            "enforced" => Ok(SymmetrisationPolicy::Enforced),
            "average" => Ok(SymmetrisationPolicy::Average),
            other => Err(Error::invalid(format!("unknown symmetrisation {other:?}"))),
        }
    }
}

/// Where a matrix came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub metric: MetricSpec,
    pub policy: SymmetrisationPolicy,
    /// Set when the values are kernel values or kernel distances.
    pub kernel: Option<KernelSpec>,
}

impl Provenance {
    pub fn new(metric: MetricSpec, policy: SymmetrisationPolicy) -> Self {
        Provenance {
            metric,
            policy,
            kernel: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub values: Matrix,
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    pub provenance: Provenance,
}

impl DistanceMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }

    /// Rows and columns picked by position.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> DistanceMatrix {
        DistanceMatrix {
            values: self.values.select(rows, cols),
            row_ids: rows.iter().map(|&i| self.row_ids[i].clone()).collect(),
            col_ids: cols.iter().map(|&j| self.col_ids[j].clone()).collect(),
            provenance: self.provenance,
        }
    }
}

fn same_samples(a: &[Sample], b: &[Sample]) -> bool {
    std::ptr::eq(a, b)
        || (a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|(p, q)| p.id == q.id && p.text == q.text))
}

/// Pairwise distances between `rows` and `cols`.
///
/// Byte-identical pairs are 0 wherever they occur. With NCD and an enabled
/// cache, the singleton lengths that are needed are computed once up front. On a self-matrix
/// (`rows` and `cols` the same list) every policy except `Vanilla` evaluates
/// only the strict lower triangle and mirrors it, so
/// `values[i][j]` and `values[j][i]` are the same bits.
///
/// Entries are evaluated on the current rayon pool; the output does not
/// depend on the pool size.
pub fn distance_matrix(
    rows: &[Sample],
    cols: &[Sample],
    metric: &MetricSpec,
    policy: SymmetrisationPolicy,
    cache: &LengthCache,
) -> Result<DistanceMatrix> {
    let square_self = same_samples(rows, cols);
    if policy == SymmetrisationPolicy::Assumed && !square_self {
        return Err(Error::PolicyMisuse(format!(
            "assumed symmetry needs a self-distance matrix, got {}x{} over different samples",
            rows.len(),
            cols.len()
        )));
    }

    if let (Some(c), true) = (metric.compressor(), cache.is_enabled()) {
        // A text only ever paired with itself never needs its length.
        let row_texts: HashSet<&str> = rows.iter().map(|s| s.text.as_str()).collect();
        let col_texts: HashSet<&str> = cols.iter().map(|s| s.text.as_str()).collect();
        let needed = |t: &str, other: &HashSet<&str>| {
            other.len() > 1 || (other.len() == 1 && !other.contains(t))
        };
        let mut seen = HashSet::new();
        let unique: Vec<&str> = rows
            .iter()
            .map(|s| (s.text.as_str(), &col_texts))
            .chain(cols.iter().map(|s| (s.text.as_str(), &row_texts)))
            .filter(|(t, other)| needed(t, other))
            .map(|(t, _)| t)
            .filter(|t| seen.insert(*t))
            .collect();
        unique
            .par_iter()
            .try_for_each(|t| compressed_length(t.as_bytes(), c, cache).map(drop))?;
    }

    let mirror = square_self && policy != SymmetrisationPolicy::Vanilla;
    let tasks: Vec<(usize, usize)> = if mirror {
        (0..rows.len())
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .collect()
    } else {
        (0..rows.len())
            .flat_map(|i| (0..cols.len()).map(move |j| (i, j)))
            .collect()
    };

    let computed: Vec<f64> = tasks
        .par_iter()
        .map(|&(i, j)| metric.distance_under(policy, &rows[i].text, &cols[j].text, cache))
        .collect::<Result<_>>()?;

    let mut values = Matrix::zeros(rows.len(), cols.len());
    for (&(i, j), &v) in tasks.iter().zip(&computed) {
        values.set(i, j, v);
        if mirror {
            values.set(j, i, v);
        }
    }

    Ok(DistanceMatrix {
        values,
        row_ids: rows.iter().map(|s| s.id.clone()).collect(),
        col_ids: cols.iter().map(|s| s.id.clone()).collect(),
        provenance: Provenance::new(*metric, policy),
    })
}
