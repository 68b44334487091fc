//! Classifiers over precomputed distance or kernel matrices.
//!
//! Matrices are oriented with query samples on the rows and training samples
//! on the columns.

mod grid;
mod knn;
mod logreg;
mod svc;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use self::grid::{
    grid_search_cv, powers_of_ten, ConfigResult, GridSearchResult, GridTimings, ModelConfig,
    ModelGrid, PrecomputedMatrices, DEFAULT_KS,
};
pub use self::knn::knn_predict;
pub use self::logreg::{fit_logistic, logistic_objective, sigmoid, LogregFit, LogregOptions};
pub use self::svc::{dual_objective, smo_solve, SmoOptions, SmoSolution};
use crate::data::Label;
use crate::distance::{DistanceMatrix, Provenance};
use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    Knn {
        k: usize,
    },
    /// `penalty` 0 means unpenalised.
    KernelLogreg {
        penalty: f64,
    },
    KernelSvc {
        c: f64,
    },
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Knn { k } => write!(f, "knn(k={k})"),
            ModelKind::KernelLogreg { penalty } if *penalty == 0.0 => write!(f, "logreg(none)"),
            ModelKind::KernelLogreg { penalty } => write!(f, "logreg(l2={penalty})"),
            ModelKind::KernelSvc { c } => write!(f, "svc(C={c})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ModelParams {
    /// The neighbour store: labels aligned with `train_ids`.
    Neighbours { labels: Vec<Label> },
    /// Decision value `coef . row + intercept`; for the SVC `coef_j` is
    /// `alpha_j * y_j`.
    Linear { coef: Vec<f64>, intercept: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub train_ids: Vec<String>,
    pub params: ModelParams,
    pub provenance: Provenance,
    pub iterations: usize,
    /// False when a solver stopped at its iteration cap.
    pub converged: bool,
}

/// Query-vs-train matrix handed to [`predict`].
#[derive(Debug, Clone, Copy)]
pub enum QueryMatrix<'a> {
    Distance(&'a DistanceMatrix),
    Kernel(&'a KernelMatrix),
}

impl QueryMatrix<'_> {
    fn col_ids(&self) -> &[String] {
        match self {
            QueryMatrix::Distance(d) => &d.col_ids,
            QueryMatrix::Kernel(k) => &k.col_ids,
        }
    }
}

fn signed(labels: &[Label]) -> Result<Vec<f64>> {
    labels
        .iter()
        .map(|&l| match l {
            0 => Ok(-1.0),
            1 => Ok(1.0),
            other => Err(Error::invalid(format!("label {other} is not binary"))),
        })
        .collect()
}

fn check_square(k: &KernelMatrix, labels: &[Label]) -> Result<()> {
    let (r, c) = k.shape();
    if r != c || r != labels.len() {
        return Err(Error::invalid(format!(
            "training kernel is {r}x{c} for {} labels",
            labels.len()
        )));
    }
    Ok(())
}

/// Stores the training labels; distances are only needed at prediction time.
pub fn knn_train(train: &DistanceMatrix, labels: &[Label], k: usize) -> Result<TrainedModel> {
    if train.col_ids.len() != labels.len() {
        return Err(Error::invalid("training ids and labels differ in length"));
    }
    knn::check_k(k, labels.len())?;
    Ok(TrainedModel {
        kind: ModelKind::Knn { k },
        train_ids: train.col_ids.clone(),
        params: ModelParams::Neighbours {
            labels: labels.to_vec(),
        },
        provenance: train.provenance,
        iterations: 0,
        converged: true,
    })
}

pub fn kernel_logreg_train(
    k: &KernelMatrix,
    labels: &[Label],
    penalty: f64,
    tol: f64,
) -> Result<TrainedModel> {
    check_square(k, labels)?;
    if !(penalty >= 0.0 && penalty.is_finite()) {
        return Err(Error::invalid(format!(
            "penalty must be finite and >= 0, got {penalty}"
        )));
    }
    let y = signed(labels)?;
    let fit = fit_logistic(
        &k.values,
        &y,
        penalty,
        LogregOptions {
            tol,
            ..Default::default()
        },
    );
    Ok(TrainedModel {
        kind: ModelKind::KernelLogreg { penalty },
        train_ids: k.col_ids.clone(),
        params: ModelParams::Linear {
            coef: fit.coef,
            intercept: fit.intercept,
        },
        provenance: k.provenance,
        iterations: fit.iterations,
        converged: fit.converged,
    })
}

pub fn kernel_svc_train(k: &KernelMatrix, labels: &[Label], c: f64) -> Result<TrainedModel> {
    check_square(k, labels)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("C must be positive, got {c}")));
    }
    if !k.values.is_symmetric() {
        return Err(Error::invalid("SVC needs a symmetric kernel matrix"));
    }
    let y = signed(labels)?;
    let sol = smo_solve(&k.values, &y, c, SmoOptions::default());
    Ok(TrainedModel {
        kind: ModelKind::KernelSvc { c },
        train_ids: k.col_ids.clone(),
        params: ModelParams::Linear {
            coef: sol.alpha.iter().zip(&y).map(|(a, y)| a * y).collect(),
            intercept: sol.intercept,
        },
        provenance: k.provenance,
        iterations: sol.iterations,
        converged: sol.converged,
    })
}

impl TrainedModel {
    /// Raw decision values for the linear models.
    pub fn decision_function(&self, k: &KernelMatrix) -> Result<Vec<f64>> {
        self.check_columns(&k.col_ids)?;
        let ModelParams::Linear { coef, intercept } = &self.params else {
            return Err(Error::invalid("KNN has no decision function"));
        };
        Ok(linear_scores(&k.values, coef, *intercept))
    }

    /// Class-1 probability for logistic models.
    pub fn predict_proba(&self, k: &KernelMatrix) -> Result<Vec<f64>> {
        if !matches!(self.kind, ModelKind::KernelLogreg { .. }) {
            return Err(Error::invalid(format!(
                "{} does not produce probabilities",
                self.kind
            )));
        }
        Ok(self
            .decision_function(k)?
            .into_iter()
            .map(sigmoid)
            .collect())
    }

    fn check_columns(&self, cols: &[String]) -> Result<()> {
        if cols != self.train_ids.as_slice() {
            return Err(Error::invalid(format!(
                "matrix columns do not match the model's {} training samples",
                self.train_ids.len()
            )));
        }
        Ok(())
    }
}

fn linear_scores(m: &Matrix, coef: &[f64], intercept: f64) -> Vec<f64> {
    (0..m.rows())
        .map(|i| m.row(i).iter().zip(coef).map(|(a, b)| a * b).sum::<f64>() + intercept)
        .collect()
}

/// KNN takes distances (raw or kernel distances); the linear models take
/// kernel rows and threshold the decision value at 0.
pub fn predict(model: &TrainedModel, m: QueryMatrix<'_>) -> Result<Vec<Label>> {
    model.check_columns(m.col_ids())?;
    match (&model.params, m) {
        (ModelParams::Neighbours { labels }, QueryMatrix::Distance(d)) => {
            let ModelKind::Knn { k } = model.kind else {
                unreachable!("neighbour store implies KNN")
            };
            knn_predict(&d.values, labels, k)
        }
        (ModelParams::Linear { coef, intercept }, QueryMatrix::Kernel(k)) => {
            Ok(linear_scores(&k.values, coef, *intercept)
                .into_iter()
                .map(|z| Label::from(z > 0.0))
                .collect())
        }
        (_, QueryMatrix::Distance(_)) => Err(Error::invalid(format!(
            "{} needs a kernel matrix",
            model.kind
        ))),
        (_, QueryMatrix::Kernel(_)) => Err(Error::invalid("KNN needs a distance matrix")),
    }
}

pub fn accuracy(pred: &[Label], truth: &[Label]) -> f64 {
    if pred.is_empty() {
        return 0.0;
    }
    pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / pred.len() as f64
}

/// 95% interval for a proportion by the normal approximation, clamped to
/// `[0, 1]`.
pub fn accuracy_interval(acc: f64, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let half = 1.959_963_984_540_054 * (acc * (1.0 - acc) / n as f64).sqrt();
    ((acc - half).max(0.0), (acc + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{MetricKind, MetricSpec, SymmetrisationPolicy};

    fn prov() -> Provenance {
        Provenance::new(
            MetricSpec::new(MetricKind::Levenshtein),
            SymmetrisationPolicy::Vanilla,
        )
    }

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("t{i}")).collect()
    }

    fn kernel(rows: &[Vec<f64>], row_ids: Vec<String>, col_ids: Vec<String>) -> KernelMatrix {
        KernelMatrix {
            values: Matrix::from_rows(rows).unwrap(),
            row_ids,
            col_ids,
            provenance: prov(),
            psd_diagnostic: None,
        }
    }

    #[test]
    fn knn_on_training_matrix_reproduces_labels() {
        let d = DistanceMatrix {
            values: Matrix::from_rows(&[
                vec![0.0, 3.0, 1.0],
                vec![3.0, 0.0, 2.5],
                vec![1.0, 2.5, 0.0],
            ])
            .unwrap(),
            row_ids: ids(3),
            col_ids: ids(3),
            provenance: prov(),
        };
        let labels = [0, 1, 1];
        let m = knn_train(&d, &labels, 1).unwrap();
        assert_eq!(predict(&m, QueryMatrix::Distance(&d)).unwrap(), labels);
    }

    #[test]
    fn svc_decision_is_affine_in_rows() {
        let train = kernel(
            &[
                vec![1.0, 0.2, 0.1],
                vec![0.2, 1.0, 0.3],
                vec![0.1, 0.3, 1.0],
            ],
            ids(3),
            ids(3),
        );
        let m = kernel_svc_train(&train, &[1, 0, 1], 1.0).unwrap();
        let q = kernel(
            &[vec![0.3, 0.6, 0.2], vec![0.6, 1.2, 0.4]],
            vec!["a".into(), "b".into()],
            ids(3),
        );
        let z = m.decision_function(&q).unwrap();
        let ModelParams::Linear { intercept, .. } = m.params else {
            panic!()
        };
        assert!(((z[1] - intercept) - 2.0 * (z[0] - intercept)).abs() < 1e-12);
    }

    #[test]
    fn logreg_zero_row_gives_sigmoid_of_intercept() {
        let train = kernel(&[vec![1.0, 0.1], vec![0.1, 1.0]], ids(2), ids(2));
        let m = kernel_logreg_train(&train, &[1, 0], 0.1, 1e-4).unwrap();
        let q = kernel(&[vec![0.0, 0.0]], vec!["q".into()], ids(2));
        let ModelParams::Linear { intercept, .. } = m.params else {
            panic!()
        };
        assert_eq!(m.predict_proba(&q).unwrap(), vec![sigmoid(intercept)]);
    }

    #[test]
    fn mismatches_are_rejected() {
        let train = kernel(&[vec![1.0, 0.1], vec![0.1, 1.0]], ids(2), ids(2));
        let m = kernel_svc_train(&train, &[1, 0], 1.0).unwrap();
        let wrong_cols = kernel(
            &[vec![0.0, 0.0]],
            vec!["q".into()],
            vec!["x".into(), "y".into()],
        );
        assert!(predict(&m, QueryMatrix::Kernel(&wrong_cols)).is_err());
        let d = DistanceMatrix {
            values: Matrix::zeros(1, 2),
            row_ids: vec!["q".into()],
            col_ids: ids(2),
            provenance: prov(),
        };
        assert!(predict(&m, QueryMatrix::Distance(&d)).is_err());

        let asym = kernel(&[vec![1.0, 0.2], vec![0.1, 1.0]], ids(2), ids(2));
        assert!(kernel_svc_train(&asym, &[1, 0], 1.0).is_err());
        assert!(kernel_logreg_train(&train, &[1, 2], 0.0, 1e-4).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let train = kernel(&[vec![1.0, 0.1], vec![0.1, 1.0]], ids(2), ids(2));
        let m = kernel_logreg_train(&train, &[1, 0], 0.0, 1e-4).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"kind\":\"kernel_logreg\""));
        let back: TrainedModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn interval_is_clamped() {
        let (lo, hi) = accuracy_interval(1.0, 200);
        assert_eq!((lo, hi), (1.0, 1.0));
        let (lo, hi) = accuracy_interval(0.9, 200);
        assert!((hi - lo - 2.0 * 1.959_963_984_540_054 * (0.09f64 / 200.0).sqrt()).abs() < 1e-12);
    }
}
