//! Shared inputs for the criterion benches in `benches/`.

use std::path::PathBuf;

use ncd_core::data::{load_text, TextSchema};
use ncd_core::{Label, Matrix, Sample};

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/sms_fixture.tsv")
}

/// First `n` messages of the bundled SMS fixture.
pub fn fixture_samples(n: usize) -> Vec<Sample> {
    let corpus =
        load_text(&fixture_path(), &TextSchema::sms_spam()).expect("bundled fixture loads");
    corpus.samples()[..n].to_vec()
}

/// Deterministic symmetric PSD Gram matrix (Gaussian on 1-d points) and
/// alternating labels.
pub fn gram(n: usize) -> (Matrix, Vec<Label>) {
    let x: Vec<f64> = (0..n).map(|i| ((i * 7919) % 1000) as f64 / 100.0).collect();
    let rows: Vec<Vec<f64>> = x
        .iter()
        .map(|a| x.iter().map(|b| (-(a - b) * (a - b)).exp()).collect())
        .collect();
    let labels = (0..n).map(|i| Label::from(x[i] > 5.0)).collect();
    (Matrix::from_rows(&rows).unwrap(), labels)
}
