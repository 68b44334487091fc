//! Corpora of labelled strings: loading, balancing and splitting.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary class label, 0 or 1.
pub type Label = u8;

/// A string sample with a stable identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub text: String,
}

impl Sample {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Sample {
            id: id.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assignment {
    Unassigned,
    Test,
    Fold(usize),
}

impl Assignment {
    pub fn is_train(self) -> bool {
        matches!(self, Assignment::Fold(_))
    }
}

/// Field value of a tabular record.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Field {
    /// Integer if it parses as one, else float, else text.
    pub fn infer(raw: &str) -> Field {
        if let Ok(i) = raw.parse::<i64>() {
            return Field::Int(i);
        }
        match raw.parse::<f64>() {
            Ok(f) if !raw.trim().is_empty() && raw.trim() == raw => Field::Float(f),
            _ => Field::Text(raw.to_owned()),
        }
    }
}

/// Decimal rendering matching Python's `repr(float)`: shortest round-trip
/// digits, a trailing `.0` on integral values, scientific notation outside
/// `[1e-4, 1e16)`.
fn render_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = v.abs();
    if a != 0.0 && !(1e-4..1e16).contains(&a) {
        let s = format!("{v:e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent");
        let (sign, digits) = match exp.strip_prefix('-') {
            Some(d) => ('-', d),
            None => ('+', exp),
        };
        return format!("{mantissa}e{sign}{digits:0>2}");
    }
    let s = v.to_string();
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

/// Renders a record the way a naive list-to-string cast does:
/// `[1, 2.5, 'tcp']`. Quotes inside text values are kept verbatim.
pub fn row_to_string(record: &[Field]) -> String {
    let mut out = String::from("[");
    for (i, f) in record.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        match f {
            Field::Int(v) => out.push_str(&v.to_string()),
            Field::Float(v) => out.push_str(&render_float(*v)),
            Field::Text(s) => {
                out.push('\'');
                out.push_str(s);
                out.push('\'');
            }
        }
    }
    out.push(']');
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledCorpus {
    samples: Vec<Sample>,
    labels: Vec<Label>,
    assignment: Vec<Assignment>,
    /// Source followed by each preprocessing step applied.
    pub provenance: Vec<String>,
}

impl LabeledCorpus {
    pub fn new(
        samples: Vec<Sample>,
        labels: Vec<Label>,
        source: impl Into<String>,
    ) -> Result<Self> {
        if samples.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} samples but {} labels",
                samples.len(),
                labels.len()
            )));
        }
        if let Some(l) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::invalid(format!("label {l} is not binary")));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = samples.iter().find(|s| !seen.insert(s.id.as_str())) {
            return Err(Error::invalid(format!("duplicate sample id {:?}", dup.id)));
        }
        let n = samples.len();
        Ok(LabeledCorpus {
            samples,
            labels,
            assignment: vec![Assignment::Unassigned; n],
            provenance: vec![source.into()],
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn assignment(&self) -> &[Assignment] {
        &self.assignment
    }

    pub fn class_counts(&self) -> [usize; 2] {
        count_classes(self.labels.iter().copied())
    }

    pub fn test_indices(&self) -> Vec<usize> {
        self.indices_where(|a| a == Assignment::Test)
    }

    pub fn train_indices(&self) -> Vec<usize> {
        self.indices_where(Assignment::is_train)
    }

    pub fn fold_indices(&self, fold: usize) -> Vec<usize> {
        self.indices_where(|a| a == Assignment::Fold(fold))
    }

    pub fn n_folds(&self) -> usize {
        self.assignment
            .iter()
            .filter_map(|a| match a {
                Assignment::Fold(f) => Some(f + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    fn indices_where(&self, pred: impl Fn(Assignment) -> bool) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| pred(self.assignment[i]))
            .collect()
    }

    pub fn pick_samples(&self, idx: &[usize]) -> Vec<Sample> {
        idx.iter().map(|&i| self.samples[i].clone()).collect()
    }

    pub fn pick_labels(&self, idx: &[usize]) -> Vec<Label> {
        idx.iter().map(|&i| self.labels[i]).collect()
    }

    fn subset(&self, keep: &[usize], step: String) -> LabeledCorpus {
        let mut provenance = self.provenance.clone();
        provenance.push(step);
        LabeledCorpus {
            samples: self.pick_samples(keep),
            labels: self.pick_labels(keep),
            assignment: keep.iter().map(|&i| self.assignment[i]).collect(),
            provenance,
        }
    }

    /// Keeps the first `n` samples.
    pub fn truncate(&self, n: usize) -> LabeledCorpus {
        let keep: Vec<usize> = (0..n.min(self.len())).collect();
        self.subset(&keep, format!("truncate({n})"))
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for (s, &label) in self.samples.iter().zip(&self.labels) {
            let rec = SnapshotRecord {
                id: s.id.clone(),
                label,
                string: s.text.clone(),
            };
            serde_json::to_writer(&mut w, &rec)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl(path: &Path) -> Result<LabeledCorpus> {
        let reader = BufReader::new(File::open(path)?);
        let mut samples = Vec::new();
        let mut labels = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: SnapshotRecord = serde_json::from_str(&line)
                .map_err(|e| parse_error(path, n as u64 + 1, e.to_string()))?;
            samples.push(Sample::new(rec.id, rec.string));
            labels.push(rec.label);
        }
        LabeledCorpus::new(samples, labels, format!("jsonl:{}", path.display()))
    }
}

#[derive(Serialize, Deserialize)]
struct SnapshotRecord {
    id: String,
    label: Label,
    string: String,
}

fn count_classes(labels: impl Iterator<Item = Label>) -> [usize; 2] {
    let mut c = [0; 2];
    for l in labels {
        c[l as usize] += 1;
    }
    c
}

/// Randomly drops majority-class samples until both classes have the same
/// count. Survivors keep their relative order.
pub fn undersample(corpus: &LabeledCorpus, seed: u64) -> Result<LabeledCorpus> {
    let counts = corpus.class_counts();
    if counts.contains(&0) {
        return Err(Error::invalid(format!(
            "cannot balance classes with counts {counts:?}"
        )));
    }
    let minority = counts[0].min(counts[1]);
    let majority_label: Label = if counts[0] > counts[1] { 0 } else { 1 };
    if counts[0] == counts[1] {
        return Ok(corpus.subset(
            &(0..corpus.len()).collect::<Vec<_>>(),
            format!("undersample(seed={seed})"),
        ));
    }

    let majority: Vec<usize> = (0..corpus.len())
        .filter(|&i| corpus.labels[i] == majority_label)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen: HashSet<usize> = rand::seq::index::sample(&mut rng, majority.len(), minority)
        .into_iter()
        .map(|k| majority[k])
        .collect();
    let keep: Vec<usize> = (0..corpus.len())
        .filter(|i| corpus.labels[*i] != majority_label || chosen.contains(i))
        .collect();
    Ok(corpus.subset(&keep, format!("undersample(seed={seed})")))
}

/// Draws `n` samples at random with class proportions preserved (largest
/// remainder). Order is preserved.
pub fn stratified_subsample(corpus: &LabeledCorpus, n: usize, seed: u64) -> Result<LabeledCorpus> {
    let total = corpus.len();
    if n > total {
        return Err(Error::invalid(format!(
            "cannot draw {n} samples from {total}"
        )));
    }
    let counts = corpus.class_counts();
    let exact: Vec<f64> = counts
        .iter()
        .map(|&c| n as f64 * c as f64 / total as f64)
        .collect();
    let mut quota: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    if quota.iter().sum::<usize>() < n {
        let k = if exact[0] - exact[0].floor() >= exact[1] - exact[1].floor() {
            0
        } else {
            1
        };
        quota[k] += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = HashSet::new();
    for label in 0..2u8 {
        let members: Vec<usize> = (0..total).filter(|&i| corpus.labels[i] == label).collect();
        let picks = rand::seq::index::sample(&mut rng, members.len(), quota[label as usize]);
        keep.extend(picks.into_iter().map(|k| members[k]));
    }
    let keep: Vec<usize> = (0..total).filter(|i| keep.contains(i)).collect();
    Ok(corpus.subset(&keep, format!("subsample(n={n}, seed={seed})")))
}

/// Stratified withdrawal of `test_size` test samples, then stratified
/// assignment of the rest to folds `0..folds`.
pub fn make_splits(
    corpus: &LabeledCorpus,
    test_size: usize,
    folds: usize,
    seed: u64,
) -> Result<LabeledCorpus> {
    let n = corpus.len();
    if test_size >= n {
        return Err(Error::invalid(format!(
            "test size {test_size} leaves no training data out of {n}"
        )));
    }
    if folds < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 folds, got {folds}"
        )));
    }
    let counts = corpus.class_counts();

    // Largest-remainder allocation of the test quota across classes.
    let exact: Vec<f64> = counts
        .iter()
        .map(|&c| test_size as f64 * c as f64 / n as f64)
        .collect();
    let mut quota: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let short = test_size - quota.iter().sum::<usize>();
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| {
        (exact[b] - exact[b].floor())
            .total_cmp(&(exact[a] - exact[a].floor()))
            .then(a.cmp(&b))
    });
    for &c in order.iter().take(short) {
        quota[c] += 1;
    }

    for c in 0..2 {
        let train = counts[c] - quota[c];
        if counts[c] > 0 && train < folds {
            return Err(Error::invalid(format!(
                "class {c} has {train} training samples, fewer than {folds} folds"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![Assignment::Unassigned; n];
    let mut next_fold = 0;
    for (c, &q) in quota.iter().enumerate() {
        let mut idx: Vec<usize> = (0..n).filter(|&i| corpus.labels[i] as usize == c).collect();
        idx.shuffle(&mut rng);
        for &i in &idx[..q] {
            assignment[i] = Assignment::Test;
        }
        for &i in &idx[q..] {
            assignment[i] = Assignment::Fold(next_fold);
            next_fold = (next_fold + 1) % folds;
        }
    }

    let mut out = corpus.clone();
    out.assignment = assignment;
    out.provenance.push(format!(
        "make_splits(test={test_size}, folds={folds}, seed={seed})"
    ));
    Ok(out)
}

/// Explicit mapping from raw label strings to binary labels.
pub type LabelMap = BTreeMap<String, Label>;

fn map_label(map: &LabelMap, raw: &str, path: &Path, line: u64) -> Result<Label> {
    if raw.is_empty() {
        return Err(parse_error(path, line, "missing label"));
    }
    match map.get(raw) {
        Some(&l) if l <= 1 => Ok(l),
        Some(l) => Err(parse_error(
            path,
            line,
            format!("label {raw:?} maps to non-binary {l}"),
        )),
        None => Err(parse_error(path, line, format!("unmapped label {raw:?}"))),
    }
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn id_prefix(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "row".into())
}

/// Tabular input: a header row naming the columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub label_column: String,
    /// Columns rendered into the sample string, in order. Defaults to every
    /// column except the label.
    #[serde(default)]
    pub feature_columns: Option<Vec<String>>,
    pub labels: LabelMap,
    #[serde(default = "default_comma")]
    pub delimiter: char,
}

fn default_comma() -> char {
    ','
}

pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<LabeledCorpus> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter as u8)
        .flexible(true)
        .from_path(path)
        .map_err(|e| parse_error(path, 0, e.to_string()))?;
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_error(path, 1, format!("missing column {name:?}")))
    };
    let label_idx = col(&schema.label_column)?;
    let feature_idx: Vec<usize> = match &schema.feature_columns {
        Some(cols) => cols.iter().map(|c| col(c)).collect::<Result<_>>()?,
        None => (0..header.len()).filter(|&i| i != label_idx).collect(),
    };

    let prefix = id_prefix(path);
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(parse_error(
                path,
                line,
                format!("expected {} fields, found {}", header.len(), rec.len()),
            ));
        }
        let label = map_label(&schema.labels, rec[label_idx].trim(), path, line)?;
        let fields: Vec<Field> = feature_idx.iter().map(|&i| Field::infer(&rec[i])).collect();
        samples.push(Sample::new(
            format!("{prefix}-{}", samples.len()),
            row_to_string(&fields),
        ));
        labels.push(label);
    }
    LabeledCorpus::new(samples, labels, format!("csv:{}", path.display()))
}

/// Delimited (label, message) text corpus without a header, such as the
/// SMS Spam collection. Messages are taken verbatim; no quote processing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextSchema {
    #[serde(default = "default_tab")]
    pub delimiter: char,
    #[serde(default)]
    pub label_field: usize,
    #[serde(default = "one")]
    pub text_field: usize,
    pub labels: LabelMap,
}

fn default_tab() -> char {
    '\t'
}

fn one() -> usize {
    1
}

impl TextSchema {
    pub fn sms_spam() -> Self {
        TextSchema {
            delimiter: '\t',
            label_field: 0,
            text_field: 1,
            labels: [("ham".to_owned(), 0), ("spam".to_owned(), 1)]
                .into_iter()
                .collect(),
        }
    }
}

pub fn load_text(path: &Path, schema: &TextSchema) -> Result<LabeledCorpus> {
    let reader = BufReader::new(File::open(path)?);
    let prefix = id_prefix(path);
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    let needed = schema.label_field.max(schema.text_field) + 1;
    for (n, line) in reader.lines().enumerate() {
        let line_no = n as u64 + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        // The message is the last field and may itself contain the delimiter.
        let parts: Vec<&str> = line.splitn(needed, schema.delimiter).collect();
        if parts.len() < needed {
            return Err(parse_error(
                path,
                line_no,
                format!("expected {needed} fields, found {}", parts.len()),
            ));
        }
        let label = map_label(
            &schema.labels,
            parts[schema.label_field].trim(),
            path,
            line_no,
        )?;
        samples.push(Sample::new(
            format!("{prefix}-{}", samples.len()),
            parts[schema.text_field],
        ));
        labels.push(label);
    }
    LabeledCorpus::new(samples, labels, format!("text:{}", path.display()))
}

/// Declarative dataset description, usually read from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "lowercase")]
pub enum DatasetConfig {
    Csv {
        path: PathBuf,
        #[serde(flatten)]
        schema: CsvSchema,
    },
    Text {
        path: PathBuf,
        #[serde(flatten)]
        schema: TextSchema,
    },
    Jsonl {
        path: PathBuf,
    },
}

impl DatasetConfig {
    pub fn path(&self) -> &Path {
        match self {
            DatasetConfig::Csv { path, .. }
            | DatasetConfig::Text { path, .. }
            | DatasetConfig::Jsonl { path } => path,
        }
    }

    pub fn load(&self) -> Result<LabeledCorpus> {
        match self {
            DatasetConfig::Csv { path, schema } => load_csv(path, schema),
            DatasetConfig::Text { path, schema } => load_text(path, schema),
            DatasetConfig::Jsonl { path } => LabeledCorpus::read_jsonl(path),
        }
    }
}
