//! Subcommand implementations. Each writes its files into the configured
//! output directory and returns a one-screen summary for stdout.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use ncd_core::audit::{audit, short_corpus, verify_witness, AuditOptions, AuditReport, Axiom};
use ncd_core::bench::{run_bench, BenchOptions, BenchReport};
use ncd_core::classify::{
    accuracy, accuracy_interval, grid_search_cv, predict, GridSearchResult, ModelGrid, ModelKind,
    PrecomputedMatrices, QueryMatrix, TrainedModel,
};
use ncd_core::data::{make_splits, stratified_subsample, undersample, Assignment, DatasetConfig};
use ncd_core::kernel::{
    clip_negative_eigenvalues, kernel_distance, kernel_from_distances, psd_diagnostic,
};
use ncd_core::{
    distance_matrix, CompressorHandle, KernelSpec, Label, LabeledCorpus, LengthCache, MetricSpec,
    Provenance, Sample, SymmetrisationPolicy,
};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;

/// Stamped on every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
}

impl Header {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Header {
            tool: "ncd".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_sha256: cfg.digest(),
        }
    }

    fn csv_line(&self) -> String {
        format!(
            "# {} {} command={} config-sha256={}\n",
            self.tool, self.version, self.command, self.config_sha256
        )
    }
}

#[derive(Serialize, Deserialize)]
pub struct Stamped<T> {
    pub header: Header,
    #[serde(flatten)]
    pub body: T,
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&cfg.output)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", cfg.output.display())))?;
    Ok(cfg.output.clone())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, header: &Header, body: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(
        &mut w,
        &Stamped {
            header: header.clone(),
            body,
        },
    )
    .map_err(|e| CliError::Internal(e.to_string()))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn write_csv(
    path: &Path,
    header: &Header,
    f: impl FnOnce(&mut BufWriter<File>) -> ncd_core::Result<()>,
) -> Result<(), CliError> {
    let mut w = create(path)?;
    w.write_all(header.csv_line().as_bytes())?;
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn write_config(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    fs::write(dir.join("config.toml"), cfg.to_toml())?;
    Ok(())
}

/// load, optional undersampling and subsampling, then the test/fold split.
pub fn prepare_corpus(cfg: &RunConfig) -> Result<LabeledCorpus, CliError> {
    let s = &cfg.split;
    let mut corpus = cfg.dataset()?.load()?;
    if s.undersample {
        corpus = undersample(&corpus, s.seed)?;
    }
    if let Some(train) = s.train_size {
        let n = train + s.test_size;
        if n > corpus.len() {
            return Err(CliError::Data(format!(
                "{n} samples requested, {} available",
                corpus.len()
            )));
        }
        corpus = stratified_subsample(&corpus, n, s.seed)?;
    }
    Ok(make_splits(&corpus, s.test_size, s.folds, s.seed)?)
}

pub fn model_grid(cfg: &RunConfig, family: &str) -> Result<ModelGrid, CliError> {
    let (kind, l, m) = (cfg.kernel.kind, &cfg.kernel.lambdas, &cfg.model);
    Ok(match family {
        "knn" => ModelGrid::knn(&m.k),
        "kernel_knn" => ModelGrid::kernel_knn(kind, l, &m.k)?,
        "kernel_logreg" => ModelGrid::kernel_logreg(kind, l, &m.penalty)?,
        "kernel_svc" => ModelGrid::kernel_svc(kind, l, &m.c)?,
        other => return Err(CliError::Usage(format!("unknown model {other:?}"))),
    })
}

// ---- matrix ----

#[derive(Debug, Serialize, Deserialize)]
pub struct KernelOutput {
    pub lambda: f64,
    pub file: String,
    pub min_eigenvalue: Option<f64>,
    pub clipped: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixSummary {
    pub rows: usize,
    pub cols: usize,
    pub provenance: Provenance,
    pub counters: ncd_core::CacheStats,
    pub seconds: f64,
    pub kernels: Vec<KernelOutput>,
}

fn with_path(ds: &DatasetConfig, p: &Path) -> DatasetConfig {
    let mut ds = ds.clone();
    match &mut ds {
        DatasetConfig::Csv { path, .. }
        | DatasetConfig::Text { path, .. }
        | DatasetConfig::Jsonl { path } => *path = p.to_path_buf(),
    }
    ds
}

pub fn cmd_matrix(cfg: &RunConfig, against: Option<&Path>) -> Result<String, CliError> {
    let metric = cfg.metric_spec()?;
    let corpus = cfg.dataset()?.load()?;
    let other = match against {
        Some(p) => Some(with_path(cfg.dataset()?, p).load()?),
        None => None,
    };
    let cols: &[Sample] = other.as_ref().map_or(corpus.samples(), |c| c.samples());
    let cache = LengthCache::with_enabled(cfg.cache);
    let t = Instant::now();
    let d = distance_matrix(corpus.samples(), cols, &metric, cfg.symmetrisation, &cache)?;
    let seconds = t.elapsed().as_secs_f64();

    let dir = out_dir(cfg)?;
    let header = Header::new("matrix", cfg);
    write_csv(&dir.join("distance.csv"), &header, |w| {
        d.values.write_csv(w, &d.row_ids, &d.col_ids)
    })?;
    let mut bin = create(&dir.join("distance.bin"))?;
    d.values.write_binary(&mut bin)?;
    bin.flush()?;

    let mut kernels = Vec::new();
    if cfg.kernel.emit {
        for &lambda in &cfg.kernel.lambdas {
            let spec = KernelSpec::new(cfg.kernel.kind, lambda)?;
            let mut k = kernel_from_distances(&d, spec)?;
            let square = k.values.is_square() && k.values.is_symmetric_within(1e-12);
            let mut clipped = false;
            if square {
                k.psd_diagnostic = Some(psd_diagnostic(&k)?);
                if cfg.kernel.clip && k.psd_diagnostic < Some(0.0) {
                    k = clip_negative_eigenvalues(&k)?;
                    clipped = true;
                }
            }
            let file = format!("kernel-{}-{lambda}.csv", spec.kind);
            write_csv(&dir.join(&file), &header, |w| {
                k.values.write_csv(w, &k.row_ids, &k.col_ids)
            })?;
            kernels.push(KernelOutput {
                lambda,
                file,
                min_eigenvalue: k.psd_diagnostic,
                clipped,
            });
        }
    }
    let (rows, cols) = d.shape();
    let summary = MatrixSummary {
        rows,
        cols,
        provenance: d.provenance,
        counters: cache.stats(),
        seconds,
        kernels,
    };
    write_json(&dir.join("matrix.json"), &header, &summary)?;
    write_config(cfg, &dir)?;
    let c = summary.counters;
    Ok(format!(
        "{rows}x{cols} {} matrix ({}) in {seconds:.3}s; compressor calls {} (single {}, concat {}), cache hits {}",
        metric, cfg.symmetrisation, c.total_compressor_calls, c.single_calls, c.concat_calls, c.cache_hits
    ))
}

// ---- audit ----

#[derive(Debug, Serialize, Deserialize)]
pub struct AuditOutput {
    /// "violations_found" or "no_violations"
    pub status: String,
    /// Every reported witness re-checked with a fresh, uncached evaluation.
    pub witnesses_verified: bool,
    pub seconds: f64,
    pub report: AuditReport,
}

pub fn cmd_audit(cfg: &RunConfig) -> Result<String, CliError> {
    let metric = cfg.metric_spec()?;
    let strings: Vec<String> = match cfg.audit.corpus.as_str() {
        "short" => short_corpus(cfg.audit.size),
        _ => cfg
            .dataset()?
            .load()?
            .samples()
            .iter()
            .take(cfg.audit.size)
            .map(|s| s.text.clone())
            .collect(),
    };
    let opts = AuditOptions {
        tolerance: cfg.audit.tolerance,
        witness_cap: cfg.audit.witness_cap,
    };
    let t = Instant::now();
    let report = audit(
        &strings,
        &metric,
        opts,
        &LengthCache::with_enabled(cfg.cache),
    )?;
    let seconds = t.elapsed().as_secs_f64();
    let mut verified = true;
    for r in &report.reports {
        for w in &r.witnesses {
            verified &= verify_witness(r.axiom, w, &metric, report.tolerance)?;
        }
    }
    let status = if report.total_violations() > 0 {
        "violations_found"
    } else {
        "no_violations"
    };
    let mut text = format!(
        "{metric} over {} strings: {status} ({seconds:.2}s)",
        strings.len()
    );
    for axiom in Axiom::ALL {
        let r = report.report(axiom);
        text.push_str(&format!(
            "\n  {:<15} {:>8} of {:>9}",
            axiom.to_string(),
            r.violations,
            r.checked
        ));
        if let Some(w) = r.witnesses.first() {
            text.push_str(&format!("  e.g. {:?} -> {:?}", w.inputs, w.values));
        }
    }
    let dir = out_dir(cfg)?;
    let out = AuditOutput {
        status: status.into(),
        witnesses_verified: verified,
        seconds,
        report,
    };
    write_json(&dir.join("audit.json"), &Header::new("audit", cfg), &out)?;
    write_config(cfg, &dir)?;
    if !verified {
        return Err(CliError::Internal(
            "a reported witness did not re-verify".into(),
        ));
    }
    Ok(text)
}

// ---- train / evaluate ----

fn write_predictions(
    path: &Path,
    header: &Header,
    ids: &[String],
    labels: &[Label],
    pred: &[Label],
) -> Result<(), CliError> {
    write_csv(path, header, |w| {
        writeln!(w, "id,label,prediction")?;
        for ((id, l), p) in ids.iter().zip(labels).zip(pred) {
            writeln!(w, "{id},{l},{p}")?;
        }
        Ok(())
    })
}

/// (id, label, prediction) rows of a prediction dump.
pub fn read_predictions(path: &Path) -> Result<Vec<(String, Label, Label)>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let num = |i: usize| {
            rec[i]
                .parse::<Label>()
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
        };
        out.push((rec[0].to_string(), num(1)?, num(2)?));
    }
    Ok(out)
}

/// Accuracy and 95% interval recounted from a prediction dump.
pub fn score_dump(path: &Path) -> Result<(f64, (f64, f64), usize), CliError> {
    let rows = read_predictions(path)?;
    let (truth, pred): (Vec<Label>, Vec<Label>) = rows.iter().map(|(_, l, p)| (*l, *p)).unzip();
    let acc = accuracy(&pred, &truth);
    Ok((acc, accuracy_interval(acc, rows.len()), rows.len()))
}

fn write_splits(path: &Path, header: &Header, corpus: &LabeledCorpus) -> Result<(), CliError> {
    write_csv(path, header, |w| {
        writeln!(w, "id,label,assignment")?;
        for ((s, l), a) in corpus
            .samples()
            .iter()
            .zip(corpus.labels())
            .zip(corpus.assignment())
        {
            let a = match a {
                Assignment::Test => "test".to_string(),
                Assignment::Fold(f) => format!("fold-{f}"),
                Assignment::Unassigned => "unassigned".to_string(),
            };
            writeln!(w, "{},{l},{a}", s.id)?;
        }
        Ok(())
    })
}

fn train_on(
    cfg: &RunConfig,
    corpus: &LabeledCorpus,
    matrices: &PrecomputedMatrices,
    family: &str,
) -> Result<GridSearchResult, CliError> {
    Ok(grid_search_cv(corpus, &model_grid(cfg, family)?, matrices)?)
}

pub fn cmd_train(cfg: &RunConfig) -> Result<String, CliError> {
    let metric = cfg.metric_spec()?;
    let corpus = prepare_corpus(cfg)?;
    let cache = LengthCache::with_enabled(cfg.cache);
    let t = Instant::now();
    let matrices = PrecomputedMatrices::compute(&corpus, metric, cfg.symmetrisation, &cache)?;
    let matrix_seconds = t.elapsed().as_secs_f64();
    let res = train_on(cfg, &corpus, &matrices, &cfg.model.family)?;

    let dir = out_dir(cfg)?;
    let header = Header::new("train", cfg);
    write_csv(&dir.join("grid.csv"), &header, |w| res.write_csv(w))?;
    write_json(&dir.join("grid.json"), &header, &res)?;
    write_json(&dir.join("model.json"), &header, &res.model)?;
    write_predictions(
        &dir.join("predictions.csv"),
        &header,
        &res.test_ids,
        &res.test_labels,
        &res.test_predictions,
    )?;
    write_splits(&dir.join("splits.csv"), &header, &corpus)?;
    for (name, m) in [
        ("train_distance.bin", &matrices.train),
        ("test_distance.bin", &matrices.test),
    ] {
        let mut w = create(&dir.join(name))?;
        m.values.write_binary(&mut w)?;
        w.flush()?;
    }
    write_config(cfg, &dir)?;
    let failed = res.results.iter().filter(|r| r.error.is_some()).count();
    let (lo, hi) = res.test_interval;
    Ok(format!(
        "{} configs ({failed} failed), matrices {matrix_seconds:.2}s, CV {:.2}s\nbest {} cv {:.4}\ntest accuracy {:.4} (95% CI {lo:.4}-{hi:.4}) on {} samples",
        res.results.len(),
        res.timings.cv_seconds,
        res.best,
        res.best_cv_mean,
        res.test_accuracy,
        res.test_labels.len()
    ))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Evaluation {
    pub model: ModelKind,
    pub provenance: Provenance,
    pub test_samples: usize,
    pub accuracy: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Whether the predictions equal the dump written by `train`.
    pub matches_train_dump: Option<bool>,
}

fn same_run(model: &Provenance, metric: MetricSpec, policy: SymmetrisationPolicy) -> bool {
    model.metric == metric && model.policy == policy
}

pub fn cmd_evaluate(cfg: &RunConfig) -> Result<String, CliError> {
    let metric = cfg.metric_spec()?;
    let dir = cfg.output.clone();
    let model_path = dir.join("model.json");
    let text = fs::read_to_string(&model_path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", model_path.display())))?;
    let model: Stamped<TrainedModel> = serde_json::from_str(&text)?;
    let model = model.body;
    if !same_run(&model.provenance, metric, cfg.symmetrisation) {
        return Err(CliError::Data(format!(
            "model was trained on {} ({}) but the config asks for {metric} ({})",
            model.provenance.metric, model.provenance.policy, cfg.symmetrisation
        )));
    }
    let corpus = prepare_corpus(cfg)?;
    let train = corpus.pick_samples(&corpus.train_indices());
    let train_ids: Vec<String> = train.iter().map(|s| s.id.clone()).collect();
    if train_ids != model.train_ids {
        return Err(CliError::Data(
            "model training ids do not match the corpus split".into(),
        ));
    }
    let test_idx = corpus.test_indices();
    let test = corpus.pick_samples(&test_idx);
    let cache = LengthCache::with_enabled(cfg.cache);
    let d = distance_matrix(
        &test,
        &train,
        &metric,
        cfg.symmetrisation.for_rectangular(),
        &cache,
    )?;
    let pred = match model.provenance.kernel {
        None => predict(&model, QueryMatrix::Distance(&d))?,
        Some(spec) => {
            let k = kernel_from_distances(&d, spec)?;
            if matches!(model.kind, ModelKind::Knn { .. }) {
                predict(&model, QueryMatrix::Distance(&kernel_distance(&k)))?
            } else {
                predict(&model, QueryMatrix::Kernel(&k))?
            }
        }
    };
    let labels = corpus.pick_labels(&test_idx);
    let header = Header::new("evaluate", cfg);
    let dump = dir.join("evaluation_predictions.csv");
    write_predictions(&dump, &header, &d.row_ids, &labels, &pred)?;
    let (acc, (lo, hi), n) = score_dump(&dump)?;
    let train_dump = dir.join("predictions.csv");
    let matches = if train_dump.exists() {
        let old = read_predictions(&train_dump)?;
        Some(old.iter().map(|(_, _, p)| *p).eq(pred.iter().copied()))
    } else {
        None
    };
    let eval = Evaluation {
        model: model.kind,
        provenance: model.provenance,
        test_samples: n,
        accuracy: acc,
        ci_low: lo,
        ci_high: hi,
        matches_train_dump: matches,
    };
    write_json(&dir.join("evaluation.json"), &header, &eval)?;
    Ok(format!(
        "{} on {n} test samples: accuracy {acc:.4} (95% CI {lo:.4}-{hi:.4})",
        model.kind
    ))
}

// ---- bench ----

pub fn cmd_bench(cfg: &RunConfig) -> Result<String, CliError> {
    let n = cfg.bench.samples;
    let samples: Vec<Sample> = match &cfg.dataset {
        Some(ds) => {
            let c = ds.load()?;
            if c.len() < n {
                return Err(CliError::Data(format!(
                    "benchmark wants {n} samples, dataset has {}",
                    c.len()
                )));
            }
            c.samples()[..n].to_vec()
        }
        None => short_corpus(n)
            .into_iter()
            .enumerate()
            .map(|(i, s)| Sample::new(format!("g{i}"), s))
            .collect(),
    };
    let metrics: Vec<MetricSpec> = cfg
        .bench
        .compressors
        .iter()
        .map(|&kind| {
            let c = if kind == cfg.metric.compressor {
                cfg.compressor()
            } else {
                CompressorHandle::pinned(kind)
            };
            MetricSpec::ncd(c)
        })
        .collect();
    let report = run_bench(
        &samples,
        &metrics,
        &cfg.bench.policies,
        BenchOptions {
            cache: cfg.cache,
            warmup: cfg.bench.warmup,
        },
    )?;
    let dir = out_dir(cfg)?;
    let header = Header::new("bench", cfg);
    write_csv(&dir.join("bench.csv"), &header, |w| report.write_csv(w))?;
    write_json(&dir.join("bench.json"), &header, &report)?;
    write_config(cfg, &dir)?;
    Ok(bench_table(&report))
}

fn bench_table(r: &BenchReport) -> String {
    let mut s = format!(
        "{} on {} worker(s)\n",
        r.environment.cpu_model, r.environment.workers
    );
    s.push_str("metric          policy    n     total_s   per_sample_s  calls\n");
    for row in &r.rows {
        s.push_str(&format!(
            "{:<15} {:<9} {:<5} {:<9.3} {:<13.6} {}\n",
            row.metric,
            row.policy.to_string(),
            row.samples,
            row.total_seconds,
            row.per_sample_seconds,
            row.counters.total_compressor_calls
        ));
    }
    s
}

// ---- report ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub policy: SymmetrisationPolicy,
    pub family: String,
    pub kernelised: bool,
    pub best_config: Option<String>,
    pub cv_mean: Option<f64>,
    pub test_accuracy: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub test_samples: usize,
    pub predictions: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub policy: SymmetrisationPolicy,
    pub kernel: Option<ReportRow>,
    pub distance_knn: Option<ReportRow>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportOutput {
    pub metric: MetricSpec,
    pub rows: Vec<ReportRow>,
    pub comparison: Vec<Comparison>,
}

/// Best by CV mean; ties go to the earlier row.
fn best_row<'a>(rows: impl Iterator<Item = &'a ReportRow>) -> Option<ReportRow> {
    let mut best: Option<&ReportRow> = None;
    for r in rows {
        if let Some(m) = r.cv_mean {
            if best.is_none_or(|b| m > b.cv_mean.unwrap()) {
                best = Some(r);
            }
        }
    }
    best.cloned()
}

pub fn cmd_report(cfg: &RunConfig) -> Result<String, CliError> {
    let metric = cfg.metric_spec()?;
    let corpus = prepare_corpus(cfg)?;
    let cache = LengthCache::with_enabled(cfg.cache);
    let dir = out_dir(cfg)?;
    let pred_dir = dir.join("predictions");
    fs::create_dir_all(&pred_dir)?;
    let header = Header::new("report", cfg);

    let mut families = vec!["knn".to_string()];
    families.extend(cfg.report.families.iter().filter(|f| *f != "knn").cloned());
    let mut rows = Vec::new();
    for &policy in &cfg.report.policies {
        let matrices = PrecomputedMatrices::compute(&corpus, metric, policy, &cache)?;
        for family in &families {
            let mut row = ReportRow {
                policy,
                family: family.clone(),
                kernelised: family != "knn",
                best_config: None,
                cv_mean: None,
                test_accuracy: None,
                ci_low: None,
                ci_high: None,
                test_samples: matrices.test.row_ids.len(),
                predictions: None,
                error: None,
            };
            match train_on(cfg, &corpus, &matrices, family) {
                Ok(res) => {
                    let file = format!("{policy}-{family}.csv");
                    let path = pred_dir.join(&file);
                    write_predictions(
                        &path,
                        &header,
                        &res.test_ids,
                        &res.test_labels,
                        &res.test_predictions,
                    )?;
                    let (acc, (lo, hi), n) = score_dump(&path)?;
                    row.best_config = Some(res.best.to_string());
                    row.cv_mean = Some(res.best_cv_mean);
                    row.test_accuracy = Some(acc);
                    row.ci_low = Some(lo);
                    row.ci_high = Some(hi);
                    row.test_samples = n;
                    row.predictions = Some(format!("predictions/{file}"));
                }
                Err(CliError::Usage(e)) => row.error = Some(e),
                Err(e) => return Err(e),
            }
            rows.push(row);
        }
    }
    let comparison: Vec<Comparison> = cfg
        .report
        .policies
        .iter()
        .map(|&policy| Comparison {
            policy,
            kernel: best_row(rows.iter().filter(|r| r.policy == policy && r.kernelised)),
            distance_knn: best_row(rows.iter().filter(|r| r.policy == policy && !r.kernelised)),
        })
        .collect();

    write_csv(&dir.join("report.csv"), &header, |w| {
        writeln!(w, "policy,family,kernelised,best_config,cv_mean,test_accuracy,ci_low,ci_high,test_samples,error")?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &rows {
            writeln!(
                w,
                "{},{},{},\"{}\",{},{},{},{},{},\"{}\"",
                r.policy,
                r.family,
                r.kernelised,
                r.best_config.clone().unwrap_or_default(),
                opt(r.cv_mean),
                opt(r.test_accuracy),
                opt(r.ci_low),
                opt(r.ci_high),
                r.test_samples,
                r.error.clone().unwrap_or_default().replace('"', "'")
            )?;
        }
        Ok(())
    })?;
    let out = ReportOutput {
        metric,
        rows,
        comparison,
    };
    write_json(&dir.join("report.json"), &header, &out)?;
    write_config(cfg, &dir)?;

    let mut text = format!("{metric}: best kernelised model vs best distance KNN\n");
    text.push_str("policy    kernelised                                   acc (95% CI)          | knn          acc (95% CI)\n");
    let cell = |r: &Option<ReportRow>| match r {
        Some(r) => format!(
            "{:<44} {:.3} ({:.3}-{:.3})",
            r.best_config.as_deref().unwrap_or("-"),
            r.test_accuracy.unwrap_or(f64::NAN),
            r.ci_low.unwrap_or(f64::NAN),
            r.ci_high.unwrap_or(f64::NAN)
        ),
        None => format!("{:<44} -", "(no valid configuration)"),
    };
    for c in &out.comparison {
        text.push_str(&format!(
            "{:<9} {} | {}\n",
            c.policy.to_string(),
            cell(&c.kernel),
            cell(&c.distance_knn)
        ));
    }
    Ok(text)
}
