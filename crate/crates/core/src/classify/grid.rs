//! Stratified k-fold grid search over precomputed matrices.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    accuracy, accuracy_interval, kernel_logreg_train, kernel_svc_train, knn_train, predict,
    LogregOptions, QueryMatrix, TrainedModel,
};
use crate::data::{Label, LabeledCorpus};
use crate::distance::{
    distance_matrix, DistanceMatrix, MetricSpec, Provenance, SymmetrisationPolicy,
};
use crate::error::{Error, Result};
use crate::kernel::{kernel_distance, kernel_from_distances, KernelKind, KernelMatrix, KernelSpec};
use crate::LengthCache;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelConfig {
    /// KNN on the raw metric.
    Knn {
        k: usize,
    },
    /// KNN on the kernel distance `2 - 2k`.
    KernelKnn {
        kernel: KernelSpec,
        k: usize,
    },
    /// `penalty` 0 is the unpenalised fit.
    KernelLogreg {
        kernel: KernelSpec,
        penalty: f64,
    },
    KernelSvc {
        kernel: KernelSpec,
        c: f64,
    },
}

impl ModelConfig {
    pub fn kernel(&self) -> Option<KernelSpec> {
        match *self {
            ModelConfig::Knn { .. } => None,
            ModelConfig::KernelKnn { kernel, .. }
            | ModelConfig::KernelLogreg { kernel, .. }
            | ModelConfig::KernelSvc { kernel, .. } => Some(kernel),
        }
    }

    pub fn is_kernelised(&self) -> bool {
        self.kernel().is_some()
    }

    pub fn family(&self) -> &'static str {
        match self {
            ModelConfig::Knn { .. } => "knn",
            ModelConfig::KernelKnn { .. } => "kernel_knn",
            ModelConfig::KernelLogreg { .. } => "kernel_logreg",
            ModelConfig::KernelSvc { .. } => "kernel_svc",
        }
    }
}

impl fmt::Display for ModelConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelConfig::Knn { k } => write!(f, "knn k={k}"),
            ModelConfig::KernelKnn { kernel, k } => {
                write!(
                    f,
                    "kernel_knn {}(lambda={}) k={k}",
                    kernel.kind, kernel.lambda
                )
            }
            ModelConfig::KernelLogreg { kernel, penalty } => {
                write!(
                    f,
                    "kernel_logreg {}(lambda={}) penalty=",
                    kernel.kind, kernel.lambda
                )?;
                if *penalty == 0.0 {
                    f.write_str("none")
                } else {
                    write!(f, "{penalty}")
                }
            }
            ModelConfig::KernelSvc { kernel, c } => {
                write!(
                    f,
                    "kernel_svc {}(lambda={}) C={c}",
                    kernel.kind, kernel.lambda
                )
            }
        }
    }
}

/// An ordered list of configurations. The order is the tie-break order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelGrid {
    pub configs: Vec<ModelConfig>,
}

/// `10^-3, 10^-2, ..., 10^3`
pub fn powers_of_ten() -> Vec<f64> {
    vec![1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3]
}

pub const DEFAULT_KS: [usize; 5] = [1, 3, 5, 7, 11];

impl ModelGrid {
    pub fn new(configs: Vec<ModelConfig>) -> Self {
        ModelGrid { configs }
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn extend(mut self, other: ModelGrid) -> Self {
        self.configs.extend(other.configs);
        self
    }

    pub fn knn(ks: &[usize]) -> Self {
        ModelGrid::new(ks.iter().map(|&k| ModelConfig::Knn { k }).collect())
    }

    pub fn kernel_knn(kind: KernelKind, lambdas: &[f64], ks: &[usize]) -> Result<Self> {
        let mut out = Vec::new();
        for &l in lambdas {
            let kernel = KernelSpec::new(kind, l)?;
            out.extend(ks.iter().map(|&k| ModelConfig::KernelKnn { kernel, k }));
        }
        Ok(ModelGrid::new(out))
    }

    /// Use 0 in `penalties` for the unpenalised fit.
    pub fn kernel_logreg(kind: KernelKind, lambdas: &[f64], penalties: &[f64]) -> Result<Self> {
        let mut out = Vec::new();
        for &l in lambdas {
            let kernel = KernelSpec::new(kind, l)?;
            for &penalty in penalties {
                if !(penalty >= 0.0 && penalty.is_finite()) {
                    return Err(Error::invalid(format!(
                        "penalty must be >= 0, got {penalty}"
                    )));
                }
                out.push(ModelConfig::KernelLogreg { kernel, penalty });
            }
        }
        Ok(ModelGrid::new(out))
    }

    pub fn kernel_svc(kind: KernelKind, lambdas: &[f64], cs: &[f64]) -> Result<Self> {
        let mut out = Vec::new();
        for &l in lambdas {
            let kernel = KernelSpec::new(kind, l)?;
            for &c in cs {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::invalid(format!("C must be positive, got {c}")));
                }
                out.push(ModelConfig::KernelSvc { kernel, c });
            }
        }
        Ok(ModelGrid::new(out))
    }

    /// The full grid for one model family: lambda, penalty and C over
    /// powers of ten in `[1e-3, 1e3]`, k over {1, 3, 5, 7, 11}, and the
    /// logistic grid includes the unpenalised fit.
    pub fn standard(family: &str, kind: KernelKind) -> Result<Self> {
        let p = powers_of_ten();
        match family {
            "knn" => Ok(ModelGrid::knn(&DEFAULT_KS)),
            "kernel_knn" => ModelGrid::kernel_knn(kind, &p, &DEFAULT_KS),
            "kernel_logreg" => {
                let mut penalties = vec![0.0];
                penalties.extend(&p);
                ModelGrid::kernel_logreg(kind, &p, &penalties)
            }
            "kernel_svc" => ModelGrid::kernel_svc(kind, &p, &p),
            other => Err(Error::invalid(format!("unknown model family {other:?}"))),
        }
    }

    fn kernels(&self) -> Vec<KernelSpec> {
        let mut out: Vec<KernelSpec> = Vec::new();
        for spec in self.configs.iter().filter_map(ModelConfig::kernel) {
            if !out.contains(&spec) {
                out.push(spec);
            }
        }
        out
    }
}

/// Distances for one corpus: training samples against themselves and test
/// samples against the training samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecomputedMatrices {
    pub train: DistanceMatrix,
    pub test: DistanceMatrix,
}

impl PrecomputedMatrices {
    /// The test block is rectangular, so ASSUMED falls back to ENFORCED there.
    pub fn compute(
        corpus: &LabeledCorpus,
        metric: MetricSpec,
        policy: SymmetrisationPolicy,
        cache: &LengthCache,
    ) -> Result<Self> {
        let train = corpus.pick_samples(&corpus.train_indices());
        let test = corpus.pick_samples(&corpus.test_indices());
        Ok(PrecomputedMatrices {
            train: distance_matrix(&train, &train, &metric, policy, cache)?,
            test: distance_matrix(&test, &train, &metric, policy.for_rectangular(), cache)?,
        })
    }

    pub fn provenance(&self) -> Provenance {
        self.train.provenance
    }

    fn check(&self, corpus: &LabeledCorpus) -> Result<()> {
        let ids = |idx: Vec<usize>| -> Vec<String> {
            idx.into_iter()
                .map(|i| corpus.samples()[i].id.clone())
                .collect()
        };
        let train_ids = ids(corpus.train_indices());
        let test_ids = ids(corpus.test_indices());
        if self.train.row_ids != train_ids || self.train.col_ids != train_ids {
            return Err(Error::invalid(
                "training matrix does not match the corpus training split",
            ));
        }
        if self.test.row_ids != test_ids || self.test.col_ids != train_ids {
            return Err(Error::invalid(
                "test matrix does not match the corpus test split",
            ));
        }
        Ok(())
    }
}

struct Views {
    train: DistanceMatrix,
    test: DistanceMatrix,
    kernels: Vec<(KernelSpec, KernelMatrix, KernelMatrix)>,
}

impl Views {
    fn kernel(&self, spec: KernelSpec) -> (&KernelMatrix, &KernelMatrix) {
        let (_, tr, te) = self
            .kernels
            .iter()
            .find(|(s, ..)| *s == spec)
            .expect("kernel precomputed");
        (tr, te)
    }
}

fn fit(
    config: &ModelConfig,
    train_rows: &[usize],
    views: &Views,
    labels: &[Label],
) -> Result<TrainedModel> {
    let sub = |m: &KernelMatrix| m.select(train_rows, train_rows);
    match *config {
        ModelConfig::Knn { k } => knn_train(&views.train.select(train_rows, train_rows), labels, k),
        ModelConfig::KernelKnn { kernel, k } => {
            let (tr, _) = views.kernel(kernel);
            knn_train(&kernel_distance(&sub(tr)), labels, k)
        }
        ModelConfig::KernelLogreg { kernel, penalty } => {
            let (tr, _) = views.kernel(kernel);
            kernel_logreg_train(&sub(tr), labels, penalty, LogregOptions::default().tol)
        }
        ModelConfig::KernelSvc { kernel, c } => {
            let (tr, _) = views.kernel(kernel);
            kernel_svc_train(&sub(tr), labels, c)
        }
    }
}

/// `rows` index the training block when `from_test` is false, otherwise the
/// test block.
fn query(
    config: &ModelConfig,
    model: &TrainedModel,
    rows: &[usize],
    train_cols: &[usize],
    from_test: bool,
    views: &Views,
) -> Result<Vec<Label>> {
    let pick_d = |d: &DistanceMatrix| d.select(rows, train_cols);
    match config.kernel() {
        None => {
            let d = if from_test {
                pick_d(&views.test)
            } else {
                pick_d(&views.train)
            };
            predict(model, QueryMatrix::Distance(&d))
        }
        Some(spec) => {
            let (tr, te) = views.kernel(spec);
            let k = if from_test {
                te.select(rows, train_cols)
            } else {
                tr.select(rows, train_cols)
            };
            if matches!(config, ModelConfig::KernelKnn { .. }) {
                predict(model, QueryMatrix::Distance(&kernel_distance(&k)))
            } else {
                predict(model, QueryMatrix::Kernel(&k))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigResult {
    pub config: ModelConfig,
    /// One entry per fold; empty when the configuration failed.
    pub fold_accuracies: Vec<f64>,
    pub cv_mean: Option<f64>,
    /// Population standard deviation over folds.
    pub cv_std: Option<f64>,
    /// Why the configuration could not be evaluated.
    pub error: Option<String>,
    /// False if any fold fit stopped at its iteration cap.
    pub converged: bool,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GridTimings {
    pub kernel_seconds: f64,
    pub cv_seconds: f64,
    pub refit_seconds: f64,
    pub predict_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub provenance: Provenance,
    pub results: Vec<ConfigResult>,
    pub best_index: usize,
    pub best: ModelConfig,
    pub best_cv_mean: f64,
    /// Validation ids per fold.
    pub fold_ids: Vec<Vec<String>>,
    pub test_ids: Vec<String>,
    pub test_labels: Vec<Label>,
    pub test_predictions: Vec<Label>,
    pub test_accuracy: f64,
    pub test_interval: (f64, f64),
    pub model: TrainedModel,
    pub timings: GridTimings,
}

impl GridSearchResult {
    /// One row per configuration and fold.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "config_index",
            "family",
            "config",
            "fold",
            "accuracy",
            "error",
        ])
        .map_err(csv_err)?;
        for (i, r) in self.results.iter().enumerate() {
            let (idx, fam, cfg) = (i.to_string(), r.config.family(), r.config.to_string());
            if let Some(e) = &r.error {
                out.write_record([idx.as_str(), fam, &cfg, "", "", e])
                    .map_err(csv_err)?;
                continue;
            }
            for (f, acc) in r.fold_accuracies.iter().enumerate() {
                out.write_record([
                    idx.as_str(),
                    fam,
                    &cfg,
                    &f.to_string(),
                    &acc.to_string(),
                    "",
                ])
                .map_err(csv_err)?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Everything except wall-clock figures, for reproducibility checks.
    pub fn without_timings(&self) -> GridSearchResult {
        let mut out = self.clone();
        out.timings = GridTimings::default();
        for r in &mut out.results {
            r.seconds = 0.0;
        }
        out
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Cross-validates every configuration on the training split, refits the
/// best on the whole training split and scores it on the test split.
///
/// Folds come from the corpus assignment (see `make_splits`). A
/// configuration that fails, e.g. an SVC on an asymmetric kernel, is kept
/// in the result with its error and never selected.
pub fn grid_search_cv(
    corpus: &LabeledCorpus,
    grid: &ModelGrid,
    matrices: &PrecomputedMatrices,
) -> Result<GridSearchResult> {
    if grid.is_empty() {
        return Err(Error::invalid("empty model grid"));
    }
    let folds = corpus.n_folds();
    if folds < 2 {
        return Err(Error::invalid(
            "corpus needs at least two cross-validation folds",
        ));
    }
    matrices.check(corpus)?;

    let train_idx = corpus.train_indices();
    let test_idx = corpus.test_indices();
    if test_idx.is_empty() {
        return Err(Error::invalid("corpus has no test split"));
    }
    let labels = corpus.labels();
    // corpus index -> position in the training block
    let mut pos = vec![usize::MAX; corpus.len()];
    for (p, &i) in train_idx.iter().enumerate() {
        pos[i] = p;
    }
    let fold_pos: Vec<Vec<usize>> = (0..folds)
        .map(|f| corpus.fold_indices(f).iter().map(|&i| pos[i]).collect())
        .collect();
    let fold_complement: Vec<Vec<usize>> = fold_pos
        .iter()
        .map(|val| (0..train_idx.len()).filter(|p| !val.contains(p)).collect())
        .collect();
    let train_labels: Vec<Label> = train_idx.iter().map(|&i| labels[i]).collect();

    let t0 = Instant::now();
    let kernels = grid
        .kernels()
        .into_par_iter()
        .map(|spec| {
            Ok((
                spec,
                kernel_from_distances(&matrices.train, spec)?,
                kernel_from_distances(&matrices.test, spec)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let views = Views {
        train: matrices.train.clone(),
        test: matrices.test.clone(),
        kernels,
    };
    let kernel_seconds = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let tasks: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|c| (0..folds).map(move |f| (c, f)))
        .collect();
    let outcomes: Vec<(Result<(f64, bool)>, f64)> = tasks
        .par_iter()
        .map(|&(c, f)| {
            let t = Instant::now();
            let config = &grid.configs[c];
            let tr = &fold_complement[f];
            let val = &fold_pos[f];
            let y: Vec<Label> = tr.iter().map(|&p| train_labels[p]).collect();
            let run = || -> Result<(f64, bool)> {
                let model = fit(config, tr, &views, &y)?;
                let pred = query(config, &model, val, tr, false, &views)?;
                let truth: Vec<Label> = val.iter().map(|&p| train_labels[p]).collect();
                Ok((accuracy(&pred, &truth), model.converged))
            };
            let out = run();
            (out, t.elapsed().as_secs_f64())
        })
        .collect();
    let cv_seconds = t1.elapsed().as_secs_f64();

    let mut results = Vec::with_capacity(grid.len());
    for (c, config) in grid.configs.iter().enumerate() {
        let chunk = &outcomes[c * folds..(c + 1) * folds];
        let seconds = chunk.iter().map(|(_, s)| s).sum();
        let failure = chunk
            .iter()
            .find_map(|(r, _)| r.as_ref().err().map(|e| e.to_string()));
        let result = match failure {
            Some(error) => ConfigResult {
                config: *config,
                fold_accuracies: Vec::new(),
                cv_mean: None,
                cv_std: None,
                error: Some(error),
                converged: false,
                seconds,
            },
            None => {
                let accs: Vec<f64> = chunk.iter().map(|(r, _)| r.as_ref().unwrap().0).collect();
                let (m, s) = mean_std(&accs);
                ConfigResult {
                    config: *config,
                    converged: chunk.iter().all(|(r, _)| r.as_ref().unwrap().1),
                    fold_accuracies: accs,
                    cv_mean: Some(m),
                    cv_std: Some(s),
                    error: None,
                    seconds,
                }
            }
        };
        results.push(result);
    }

    let mut best: Option<(usize, f64)> = None;
    for (i, r) in results.iter().enumerate() {
        if let Some(m) = r.cv_mean {
            if best.is_none_or(|(_, b)| m > b) {
                best = Some((i, m));
            }
        }
    }
    let Some((best_index, best_cv_mean)) = best else {
        let first = results
            .iter()
            .find_map(|r| r.error.clone())
            .unwrap_or_default();
        return Err(Error::invalid(format!(
            "every configuration failed; first error: {first}"
        )));
    };
    let best_config = grid.configs[best_index];

    let all: Vec<usize> = (0..train_idx.len()).collect();
    let t2 = Instant::now();
    let model = fit(&best_config, &all, &views, &train_labels)?;
    let refit_seconds = t2.elapsed().as_secs_f64();
    let t3 = Instant::now();
    let test_rows: Vec<usize> = (0..test_idx.len()).collect();
    let test_predictions = query(&best_config, &model, &test_rows, &all, true, &views)?;
    let predict_seconds = t3.elapsed().as_secs_f64();

    let test_labels: Vec<Label> = test_idx.iter().map(|&i| labels[i]).collect();
    let test_accuracy = accuracy(&test_predictions, &test_labels);
    Ok(GridSearchResult {
        provenance: matrices.provenance(),
        results,
        best_index,
        best: best_config,
        best_cv_mean,
        fold_ids: fold_pos
            .iter()
            .map(|f| {
                f.iter()
                    .map(|&p| matrices.train.row_ids[p].clone())
                    .collect()
            })
            .collect(),
        test_ids: matrices.test.row_ids.clone(),
        test_interval: accuracy_interval(test_accuracy, test_labels.len()),
        test_labels,
        test_predictions,
        test_accuracy,
        model,
        timings: GridTimings {
            kernel_seconds,
            cv_seconds,
            refit_seconds,
            predict_seconds,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_splits, Sample};
    use crate::CompressorHandle;

    fn corpus() -> LabeledCorpus {
        let mut samples = Vec::new();
        let mut labels = Vec::new();
        for i in 0..40 {
            let (text, l) = if i % 2 == 0 {
                (format!("free prize winner call now {i} claim cash"), 1)
            } else {
                (format!("see you at dinner tonight {i} love mum"), 0)
            };
            samples.push(Sample::new(format!("s{i}"), text));
            labels.push(l);
        }
        let c = LabeledCorpus::new(samples, labels, "synthetic").unwrap();
        make_splits(&c, 10, 3, 42).unwrap()
    }

    fn matrices(c: &LabeledCorpus, policy: SymmetrisationPolicy) -> PrecomputedMatrices {
        let metric = MetricSpec::ncd(CompressorHandle::gzip());
        PrecomputedMatrices::compute(c, metric, policy, &LengthCache::new()).unwrap()
    }

    #[test]
    fn standard_grid_sizes() {
        assert_eq!(
            ModelGrid::standard("knn", KernelKind::Rbf).unwrap().len(),
            5
        );
        assert_eq!(
            ModelGrid::standard("kernel_knn", KernelKind::Rbf)
                .unwrap()
                .len(),
            35
        );
        assert_eq!(
            ModelGrid::standard("kernel_logreg", KernelKind::Rbf)
                .unwrap()
                .len(),
            56
        );
        assert_eq!(
            ModelGrid::standard("kernel_svc", KernelKind::Rbf)
                .unwrap()
                .len(),
            49
        );
        assert!(ModelGrid::standard("tree", KernelKind::Rbf).is_err());
    }

    #[test]
    fn single_config_equals_direct_fit() {
        let c = corpus();
        let m = matrices(&c, SymmetrisationPolicy::Enforced);
        let spec = KernelSpec::new(KernelKind::Rbf, 0.1).unwrap();
        let config = ModelConfig::KernelSvc {
            kernel: spec,
            c: 1.0,
        };
        let res = grid_search_cv(&c, &ModelGrid::new(vec![config]), &m).unwrap();

        let ktr = kernel_from_distances(&m.train, spec).unwrap();
        let kte = kernel_from_distances(&m.test, spec).unwrap();
        let y = c.pick_labels(&c.train_indices());
        let model = kernel_svc_train(&ktr, &y, 1.0).unwrap();
        let pred = predict(&model, QueryMatrix::Kernel(&kte)).unwrap();
        assert_eq!(res.test_predictions, pred);
        assert_eq!(res.model, model);
    }

    #[test]
    fn best_is_first_maximum_and_recomputable() {
        let c = corpus();
        let m = matrices(&c, SymmetrisationPolicy::Enforced);
        let grid = ModelGrid::knn(&[1, 3, 5])
            .extend(ModelGrid::kernel_knn(KernelKind::Rbf, &[0.01, 1.0], &[1, 3]).unwrap());
        let res = grid_search_cv(&c, &grid, &m).unwrap();
        let means: Vec<f64> = res.results.iter().map(|r| r.cv_mean.unwrap()).collect();
        let max = means.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(
            res.best_index,
            means.iter().position(|&v| v == max).unwrap()
        );
        let folds = &res.results[res.best_index].fold_accuracies;
        assert_eq!(folds.len(), 3);
        assert!((folds.iter().sum::<f64>() / 3.0 - res.best_cv_mean).abs() < 1e-15);
    }

    #[test]
    fn folds_never_contain_test_ids() {
        let c = corpus();
        let res = grid_search_cv(
            &c,
            &ModelGrid::knn(&[1]),
            &matrices(&c, SymmetrisationPolicy::Vanilla),
        )
        .unwrap();
        for fold in &res.fold_ids {
            assert!(fold.iter().all(|id| !res.test_ids.contains(id)));
        }
        let total: usize = res.fold_ids.iter().map(Vec::len).sum();
        assert_eq!(total, 30);
    }

    #[test]
    fn asymmetric_kernel_svc_is_recorded_as_failed() {
        let c = corpus();
        let m = matrices(&c, SymmetrisationPolicy::Vanilla);
        let spec = KernelSpec::new(KernelKind::Rbf, 0.1).unwrap();
        let grid = ModelGrid::new(vec![
            ModelConfig::KernelSvc {
                kernel: spec,
                c: 1.0,
            },
            ModelConfig::Knn { k: 1 },
        ]);
        let res = grid_search_cv(&c, &grid, &m).unwrap();
        assert!(res.results[0].error.is_some());
        assert_eq!(res.best_index, 1);
    }

    #[test]
    fn runs_are_reproducible() {
        let c = corpus();
        let m = matrices(&c, SymmetrisationPolicy::Average);
        let grid = ModelGrid::kernel_logreg(KernelKind::Rbf, &[0.1], &[0.0, 1.0]).unwrap();
        let a = grid_search_cv(&c, &grid, &m).unwrap().without_timings();
        let b = grid_search_cv(&c, &grid, &m).unwrap().without_timings();
        assert_eq!(a, b);
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * 3);
        assert!(a.to_json().unwrap().contains("\"best_index\""));
    }

    #[test]
    fn mismatched_matrices_are_rejected() {
        let c = corpus();
        let other = make_splits(&c, 10, 3, 7).unwrap();
        let m = matrices(&other, SymmetrisationPolicy::Enforced);
        assert!(grid_search_cv(&c, &ModelGrid::knn(&[1]), &m).is_err());
    }
}
