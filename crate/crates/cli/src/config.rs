//! Run configuration: a TOML file, command-line overrides, then validation.

use std::path::{Path, PathBuf};

use ncd_core::classify::{powers_of_ten, DEFAULT_KS};
use ncd_core::data::{DatasetConfig, TextSchema};
use ncd_core::{
    CompressorHandle, CompressorKind, KernelKind, MetricKind, MetricSpec, SymmetrisationPolicy,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: Option<DatasetConfig>,
    pub metric: MetricConfig,
    pub symmetrisation: SymmetrisationPolicy,
    pub kernel: KernelConfig,
    pub model: ModelSection,
    pub split: SplitConfig,
    pub audit: AuditSection,
    pub bench: BenchSection,
    pub report: ReportSection,
    pub output: PathBuf,
    pub cache: bool,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: None,
            metric: MetricConfig::default(),
            symmetrisation: SymmetrisationPolicy::Enforced,
            kernel: KernelConfig::default(),
            model: ModelSection::default(),
            split: SplitConfig::default(),
            audit: AuditSection::default(),
            bench: BenchSection::default(),
            report: ReportSection::default(),
            output: PathBuf::from("out"),
            cache: true,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricConfig {
    /// ncd, levenshtein, hamming or ratio
    pub name: String,
    pub compressor: CompressorKind,
    /// Defaults to the compressor's pinned level.
    pub level: Option<u32>,
    pub epsilon: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            name: "ncd".into(),
            compressor: CompressorKind::Gzip,
            level: None,
            epsilon: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    pub kind: KernelKind,
    pub lambdas: Vec<f64>,
    /// Write kernel matrices next to the distance matrix in `matrix`.
    pub emit: bool,
    /// Clip negative eigenvalues of emitted square kernels.
    pub clip: bool,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            kind: KernelKind::Rbf,
            lambdas: powers_of_ten(),
            emit: false,
            clip: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// knn, kernel_knn, kernel_logreg or kernel_svc
    pub family: String,
    pub k: Vec<usize>,
    /// 0 stands for the unpenalised fit.
    pub penalty: Vec<f64>,
    pub c: Vec<f64>,
}

impl Default for ModelSection {
    fn default() -> Self {
        let mut penalty = vec![0.0];
        penalty.extend(powers_of_ten());
        ModelSection {
            family: "kernel_svc".into(),
            k: DEFAULT_KS.to_vec(),
            penalty,
            c: powers_of_ten(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub undersample: bool,
    /// Training samples kept after undersampling; all remaining when unset.
    pub train_size: Option<usize>,
    pub test_size: usize,
    pub folds: usize,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            undersample: true,
            train_size: None,
            test_size: 200,
            folds: 5,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditSection {
    /// "short" for the generated short-string corpus, "dataset" for the
    /// first `size` strings of the dataset.
    pub corpus: String,
    pub size: usize,
    pub tolerance: f64,
    pub witness_cap: usize,
}

impl Default for AuditSection {
    fn default() -> Self {
        AuditSection {
            corpus: "short".into(),
            size: ncd_core::audit::SHORT_CORPUS_SIZE,
            tolerance: ncd_core::audit::DEFAULT_TOLERANCE,
            witness_cap: ncd_core::audit::DEFAULT_WITNESS_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub samples: usize,
    pub compressors: Vec<CompressorKind>,
    pub policies: Vec<SymmetrisationPolicy>,
    pub warmup: usize,
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection {
            samples: 100,
            compressors: CompressorKind::ALL.to_vec(),
            policies: SymmetrisationPolicy::ALL.to_vec(),
            warmup: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    pub policies: Vec<SymmetrisationPolicy>,
    /// Kernelised families compared against distance KNN.
    pub families: Vec<String>,
}

impl Default for ReportSection {
    fn default() -> Self {
        ReportSection {
            policies: SymmetrisationPolicy::ALL.to_vec(),
            families: vec!["kernel_knn".into(), "kernel_svc".into()],
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub data: Option<PathBuf>,
    pub metric: Option<String>,
    pub compressor: Option<CompressorKind>,
    pub level: Option<u32>,
    pub symmetrisation: Option<SymmetrisationPolicy>,
    pub kernel: Option<KernelKind>,
    pub lambda: Option<Vec<f64>>,
    pub model: Option<String>,
    pub k: Option<Vec<usize>>,
    pub penalty: Option<Vec<f64>>,
    pub c: Option<Vec<f64>>,
    pub folds: Option<usize>,
    pub test_size: Option<usize>,
    pub train_size: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub no_cache: bool,
    pub out: Option<PathBuf>,
    pub samples: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        // dataset paths are relative to the config file
        if let Some(ds) = &mut cfg.dataset {
            let base = path.parent().unwrap_or(Path::new("."));
            set_dataset_path(ds, base.join(ds.path()));
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(p) = &o.data {
            match &mut self.dataset {
                Some(ds) => set_dataset_path(ds, p.clone()),
                None => self.dataset = Some(dataset_for_path(p)),
            }
        }
        if let Some(v) = &o.metric {
            self.metric.name = v.clone();
        }
        if let Some(v) = o.compressor {
            if v != self.metric.compressor {
                self.metric.level = None;
            }
            self.metric.compressor = v;
        }
        if let Some(v) = o.level {
            self.metric.level = Some(v);
        }
        if let Some(v) = o.symmetrisation {
            self.symmetrisation = v;
        }
        if let Some(v) = o.kernel {
            self.kernel.kind = v;
        }
        if let Some(v) = &o.lambda {
            self.kernel.lambdas = v.clone();
            self.kernel.emit = true;
        }
        if let Some(v) = &o.model {
            self.model.family = v.clone();
        }
        if let Some(v) = &o.k {
            self.model.k = v.clone();
        }
        if let Some(v) = &o.penalty {
            self.model.penalty = v.clone();
        }
        if let Some(v) = &o.c {
            self.model.c = v.clone();
        }
        if let Some(v) = o.folds {
            self.split.folds = v;
        }
        if let Some(v) = o.test_size {
            self.split.test_size = v;
        }
        if let Some(v) = o.train_size {
            self.split.train_size = Some(v);
        }
        if let Some(v) = o.seed {
            self.split.seed = v;
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
        if o.no_cache {
            self.cache = false;
        }
        if let Some(v) = &o.out {
            self.output = v.clone();
        }
        if let Some(v) = o.samples {
            self.bench.samples = v;
            self.audit.size = v;
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        self.metric_spec()?;
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if let Some(l) = self
            .kernel
            .lambdas
            .iter()
            .find(|l| !(**l > 0.0 && l.is_finite()))
        {
            return bad(format!("kernel lambda must be positive, got {l}"));
        }
        if self.kernel.kind == KernelKind::Hamming && self.metric.name != "ratio" {
            return bad("the hamming kernel is built from the 'ratio' metric".into());
        }
        if !["knn", "kernel_knn", "kernel_logreg", "kernel_svc"]
            .contains(&self.model.family.as_str())
        {
            return bad(format!("unknown model {:?}", self.model.family));
        }
        if let Some(k) = self.model.k.iter().find(|k| **k % 2 == 0) {
            return bad(format!("k must be odd, got {k}"));
        }
        if let Some(c) = self.model.c.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return bad(format!("C must be positive, got {c}"));
        }
        if let Some(p) = self
            .model
            .penalty
            .iter()
            .find(|p| !(**p >= 0.0 && p.is_finite()))
        {
            return bad(format!("penalty must be >= 0, got {p}"));
        }
        if self.split.folds < 2 {
            return bad(format!("need at least 2 folds, got {}", self.split.folds));
        }
        if !["short", "dataset"].contains(&self.audit.corpus.as_str()) {
            return bad(format!("unknown audit corpus {:?}", self.audit.corpus));
        }
        if let Some(ds) = &self.dataset {
            if !ds.path().exists() {
                return Err(CliError::Data(format!(
                    "dataset not found: {}",
                    ds.path().display()
                )));
            }
        }
        Ok(())
    }

    pub fn compressor(&self) -> CompressorHandle {
        let kind = self.metric.compressor;
        CompressorHandle::new(kind, self.metric.level.unwrap_or(kind.default_level()))
    }

    pub fn metric_spec(&self) -> Result<MetricSpec, CliError> {
        let kind = match self.metric.name.as_str() {
            "ncd" => {
                let c = self.compressor();
                c.validate().map_err(|e| CliError::Usage(e.to_string()))?;
                MetricKind::Ncd(c)
            }
            "levenshtein" => MetricKind::Levenshtein,
            "hamming" => MetricKind::Hamming,
            "ratio" => MetricKind::HammingRatio,
            other => return Err(CliError::Usage(format!("unknown metric {other:?}"))),
        };
        MetricSpec::new(kind)
            .with_epsilon(self.metric.epsilon)
            .map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn dataset(&self) -> Result<&DatasetConfig, CliError> {
        self.dataset.as_ref().ok_or_else(|| {
            CliError::Usage("no dataset configured (use --data or [dataset])".into())
        })
    }

    /// SHA-256 of the canonical JSON form. The output directory and worker
    /// count do not change results and are left out.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.output = PathBuf::new();
        c.workers = 1;
        let json = serde_json::to_vec(&c).expect("config serialises");
        Sha256::digest(&json)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn set_dataset_path(ds: &mut DatasetConfig, p: PathBuf) {
    match ds {
        DatasetConfig::Csv { path, .. }
        | DatasetConfig::Text { path, .. }
        | DatasetConfig::Jsonl { path } => *path = p,
    }
}

/// `.jsonl` files are read as records; anything else as SMS-style text.
fn dataset_for_path(p: &Path) -> DatasetConfig {
    if p.extension().is_some_and(|e| e == "jsonl") {
        DatasetConfig::Jsonl {
            path: p.to_path_buf(),
        }
    } else {
        DatasetConfig::Text {
            path: p.to_path_buf(),
            schema: TextSchema::sms_spam(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        assert_eq!(RunConfig::from_toml("").unwrap(), cfg);
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let mut cfg =
            RunConfig::from_toml("symmetrisation = \"average\"\n[split]\nseed = 7\nfolds = 3\n")
                .unwrap();
        assert_eq!(cfg.split.test_size, 200);
        cfg.apply(&Overrides {
            seed: Some(9),
            ..Default::default()
        });
        assert_eq!((cfg.split.seed, cfg.split.folds), (9, 3));
        assert_eq!(cfg.symmetrisation, SymmetrisationPolicy::Average);
    }

    #[test]
    fn compressor_override_resets_level() {
        let mut cfg = RunConfig::from_toml("[metric]\nlevel = 6\n").unwrap();
        cfg.apply(&Overrides {
            compressor: Some(CompressorKind::Brotli),
            ..Default::default()
        });
        assert_eq!(cfg.compressor(), CompressorHandle::brotli());
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut cfg = RunConfig::default();
        cfg.model.k = vec![2];
        assert!(matches!(cfg.validate(), Err(CliError::Usage(_))));
        let mut cfg = RunConfig::default();
        cfg.metric.level = Some(12);
        assert!(cfg.validate().is_err());
        assert!(RunConfig::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn digest_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        b.workers = 8;
        b.output = PathBuf::from("elsewhere");
        assert_eq!(a.digest(), b.digest());
        b.split.seed = 1;
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }
}
