//! Kernels over string distances and the kernel distance they induce.
//!
//! NCD violates the metric axioms, so an RBF Gram matrix built on it can be
//! indefinite. Such matrices are used as they are; [`psd_diagnostic`]
//! reports the smallest eigenvalue and [`clip_negative_eigenvalues`] is an
//! opt-in repair.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::distance::{hamming, DistanceMatrix, MetricKind, Provenance};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// `exp(-d^2 / lambda)`
    Rbf,
    /// `1 - lambda * hamming(x, y) / max(|x|, |y|)`
    Hamming,
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::Rbf => "rbf",
            KernelKind::Hamming => "hamming",
        })
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rbf" | "gaussian" => Ok(KernelKind::Rbf),
            "hamming" => Ok(KernelKind::Hamming),
            other => Err(Error::invalid(format!("unknown kernel {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub lambda: f64,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(KernelSpec { kind, lambda })
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "kernel lambda must be positive, got {lambda}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMatrix {
    pub values: Matrix,
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    pub provenance: Provenance,
    /// Smallest eigenvalue, when it has been computed.
    pub psd_diagnostic: Option<f64>,
}

impl KernelMatrix {
    pub fn spec(&self) -> Option<KernelSpec> {
        self.provenance.kernel
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> KernelMatrix {
        KernelMatrix {
            values: self.values.select(rows, cols),
            row_ids: rows.iter().map(|&i| self.row_ids[i].clone()).collect(),
            col_ids: cols.iter().map(|&j| self.col_ids[j].clone()).collect(),
            provenance: self.provenance,
            psd_diagnostic: None,
        }
    }

    /// Wraps a raw Gram matrix, e.g. one computed elsewhere.
    pub fn from_values(values: Matrix, provenance: Provenance) -> KernelMatrix {
        let row_ids = (0..values.rows()).map(|i| i.to_string()).collect();
        let col_ids = (0..values.cols()).map(|j| j.to_string()).collect();
        KernelMatrix {
            values,
            row_ids,
            col_ids,
            provenance,
            psd_diagnostic: None,
        }
    }
}

fn with_kernel(d: &DistanceMatrix, spec: KernelSpec, values: Matrix) -> KernelMatrix {
    KernelMatrix {
        values,
        row_ids: d.row_ids.clone(),
        col_ids: d.col_ids.clone(),
        provenance: Provenance {
            kernel: Some(spec),
            ..d.provenance
        },
        psd_diagnostic: None,
    }
}

/// Entry-wise `exp(-d^2 / lambda)`. Negative distances lose their sign.
pub fn rbf_from_distances(d: &DistanceMatrix, lambda: f64) -> Result<KernelMatrix> {
    let spec = KernelSpec::new(KernelKind::Rbf, lambda)?;
    Ok(with_kernel(
        d,
        spec,
        d.values.map(|v| (-(v * v) / lambda).exp()),
    ))
}

pub fn hamming_kernel(x: &str, y: &str, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let longest = x.chars().count().max(y.chars().count());
    if longest == 0 {
        return Ok(1.0);
    }
    Ok(1.0 - lambda * hamming(x, y) as f64 / longest as f64)
}

/// Hamming kernel matrix from a precomputed Hamming-ratio distance matrix.
pub fn hamming_kernel_from_ratio(d: &DistanceMatrix, lambda: f64) -> Result<KernelMatrix> {
    if d.provenance.metric.kind != MetricKind::HammingRatio {
        return Err(Error::invalid(format!(
            "hamming kernel needs hamming-ratio distances, got {}",
            d.provenance.metric
        )));
    }
    let spec = KernelSpec::new(KernelKind::Hamming, lambda)?;
    Ok(with_kernel(d, spec, d.values.map(|r| 1.0 - lambda * r)))
}

/// Builds the kernel `spec` from distances.
pub fn kernel_from_distances(d: &DistanceMatrix, spec: KernelSpec) -> Result<KernelMatrix> {
    match spec.kind {
        KernelKind::Rbf => rbf_from_distances(d, spec.lambda),
        KernelKind::Hamming => hamming_kernel_from_ratio(d, spec.lambda),
    }
}

/// `2 - 2 k(x, y)`: squared feature-space distance for kernels with unit
/// self-similarity.
pub fn kernel_distance(k: &KernelMatrix) -> DistanceMatrix {
    DistanceMatrix {
        values: k.values.map(|v| 2.0 - 2.0 * v),
        row_ids: k.row_ids.clone(),
        col_ids: k.col_ids.clone(),
        provenance: k.provenance,
    }
}

fn symmetric_eigen(k: &Matrix) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    if !k.is_symmetric_within(1e-12) {
        return Err(Error::invalid(
            "eigen-decomposition needs a square symmetric matrix",
        ));
    }
    let n = k.rows();
    Ok(SymmetricEigen::new(DMatrix::from_row_slice(
        n,
        n,
        k.as_slice(),
    )))
}

/// Smallest eigenvalue of a symmetric Gram matrix; negative means indefinite.
pub fn psd_diagnostic(k: &KernelMatrix) -> Result<f64> {
    let eig = symmetric_eigen(&k.values)?;
    Ok(eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

/// Clips negative eigenvalues to zero and reassembles the matrix.
pub fn clip_negative_eigenvalues(k: &KernelMatrix) -> Result<KernelMatrix> {
    let eig = symmetric_eigen(&k.values)?;
    let clipped = eig.eigenvalues.map(|v| v.max(0.0));
    let q = &eig.eigenvectors;
    let rebuilt = q * DMatrix::from_diagonal(&clipped) * q.transpose();
    let n = k.values.rows();
    let mut values = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            // average the two triangles so the result is exactly symmetric
            let v = 0.5 * (rebuilt[(i, j)] + rebuilt[(j, i)]);
            values.set(i, j, v);
            values.set(j, i, v);
        }
    }
    let mut out = KernelMatrix {
        values,
        psd_diagnostic: None,
        ..k.clone()
    };
    out.psd_diagnostic = Some(psd_diagnostic(&out)?);
    Ok(out)
}
