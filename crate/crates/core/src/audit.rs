//! Exhaustive search for metric-axiom violations over a small corpus.
//!
//! Distances are evaluated without the identical-input shortcut so the
//! auditor sees what the measure itself does on `d(x, x)`.

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compression::{CompressorHandle, LengthCache};
use crate::distance::MetricSpec;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_WITNESS_CAP: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// `d(x, y) = 0` iff `x = y`
    Zero,
    /// `d(x, y) >= 0`
    NonNegativity,
    /// `d(x, y) = d(y, x)`
    Symmetry,
    /// `d(x, z) <= d(x, y) + d(y, z)`
    Triangle,
}

impl Axiom {
    pub const ALL: [Axiom; 4] = [
        Axiom::Zero,
        Axiom::NonNegativity,
        Axiom::Symmetry,
        Axiom::Triangle,
    ];
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Zero => "zero",
            Axiom::NonNegativity => "non_negativity",
            Axiom::Symmetry => "symmetry",
            Axiom::Triangle => "triangle",
        })
    }
}

/// One counterexample.
///
/// * zero: `inputs = [x, y]`, `values = [d(x, y)]`. Either `x == y` with a
///   non-zero distance (margin `|d|`) or `x != y` at distance zero (margin 0).
/// * non-negativity: `[x, y]`, `[d(x, y)]`, margin `-d`.
/// * symmetry: `[x, y]`, `[d(x, y), d(y, x)]`, margin `|difference|`.
/// * triangle: `[x, y, z]`, `[d(x, z), d(x, y), d(y, z)]`, margin
///   `d(x, z) - d(x, y) - d(y, z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub inputs: Vec<String>,
    pub values: Vec<f64>,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    /// Pairs or triples examined.
    pub checked: u64,
    pub violations: u64,
    /// Largest-margin witnesses, capped.
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub metric: MetricSpec,
    pub samples: usize,
    pub tolerance: f64,
    pub reports: Vec<AxiomReport>,
}

impl AuditReport {
    pub fn report(&self, axiom: Axiom) -> &AxiomReport {
        self.reports
            .iter()
            .find(|r| r.axiom == axiom)
            .expect("every axiom is audited")
    }

    pub fn total_violations(&self) -> u64 {
        self.reports.iter().map(|r| r.violations).sum()
    }

    pub fn violates_every_axiom(&self) -> bool {
        self.reports.iter().all(|r| r.violations > 0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AuditOptions {
    pub tolerance: f64,
    pub witness_cap: usize,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            tolerance: DEFAULT_TOLERANCE,
            witness_cap: DEFAULT_WITNESS_CAP,
        }
    }
}

struct Found {
    idx: [usize; 3],
    values: Vec<f64>,
    margin: f64,
}

fn rank(mut found: Vec<Found>, cap: usize) -> Vec<Found> {
    found.sort_by(|a, b| b.margin.total_cmp(&a.margin).then(a.idx.cmp(&b.idx)));
    found.truncate(cap);
    found
}

/// Audits `metric` over every pair and ordered triple of `samples`.
pub fn audit(
    samples: &[String],
    metric: &MetricSpec,
    opts: AuditOptions,
    cache: &LengthCache,
) -> Result<AuditReport> {
    if samples.is_empty() {
        return Err(Error::invalid("cannot audit an empty corpus"));
    }
    let n = samples.len();
    let tol = opts.tolerance;
    let cap = opts.witness_cap;

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| metric.distance_raw(&samples[i], &samples[j], cache))
                .collect()
        })
        .collect::<Result<_>>()?;
    let d = Matrix::from_rows(&rows)?;

    let mut zero = Vec::new();
    let mut zero_checked = 0u64;
    let mut nonneg = Vec::new();
    let mut sym = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j);
            let same = samples[i] == samples[j];
            if same || i != j {
                zero_checked += 1;
            }
            if same && v.abs() > tol {
                zero.push(Found {
                    idx: [i, j, 0],
                    values: vec![v],
                    margin: v.abs(),
                });
            } else if !same && v.abs() <= tol {
                zero.push(Found {
                    idx: [i, j, 0],
                    values: vec![v],
                    margin: 0.0,
                });
            }
            if v < -tol {
                nonneg.push(Found {
                    idx: [i, j, 0],
                    values: vec![v],
                    margin: -v,
                });
            }
            if j < i {
                let w = d.get(j, i);
                if (v - w).abs() > tol {
                    sym.push(Found {
                        idx: [j, i, 0],
                        values: vec![w, v],
                        margin: (v - w).abs(),
                    });
                }
            }
        }
    }

    let per_row: Vec<(u64, Vec<Found>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut count = 0;
            let mut found = Vec::new();
            for j in 0..n {
                let dij = d.get(i, j);
                for k in 0..n {
                    let (dik, djk) = (d.get(i, k), d.get(j, k));
                    let margin = dik - (dij + djk);
                    if margin > tol {
                        count += 1;
                        found.push(Found {
                            idx: [i, j, k],
                            values: vec![dik, dij, djk],
                            margin,
                        });
                        if found.len() >= 8 * cap.max(1) {
                            found = rank(found, cap);
                        }
                    }
                }
            }
            (count, rank(found, cap))
        })
        .collect();
    let tri_count = per_row.iter().map(|(c, _)| c).sum();
    let tri: Vec<Found> = per_row.into_iter().flat_map(|(_, f)| f).collect();

    let build = |axiom: Axiom, checked: u64, found: Vec<Found>| {
        let violations = found.len() as u64;
        into_report(axiom, checked, violations, found, samples, cap)
    };
    let tri_report = into_report(
        Axiom::Triangle,
        (n as u64).pow(3),
        tri_count,
        tri,
        samples,
        cap,
    );

    Ok(AuditReport {
        metric: *metric,
        samples: n,
        tolerance: tol,
        reports: vec![
            build(Axiom::Zero, zero_checked, zero),
            build(Axiom::NonNegativity, (n * n) as u64, nonneg),
            build(Axiom::Symmetry, (n * (n - 1) / 2) as u64, sym),
            tri_report,
        ],
    })
}

fn into_report(
    axiom: Axiom,
    checked: u64,
    violations: u64,
    found: Vec<Found>,
    samples: &[String],
    cap: usize,
) -> AxiomReport {
    let arity = if axiom == Axiom::Triangle { 3 } else { 2 };
    let witnesses = rank(found, cap)
        .into_iter()
        .map(|f| Witness {
            inputs: f.idx[..arity].iter().map(|&i| samples[i].clone()).collect(),
            values: f.values,
            margin: f.margin,
        })
        .collect();
    AxiomReport {
        axiom,
        checked,
        violations,
        witnesses,
    }
}

/// Re-evaluates a witness from scratch (no shared cache) and reports whether
/// it still violates `axiom` by more than `tol`.
pub fn verify_witness(axiom: Axiom, w: &Witness, metric: &MetricSpec, tol: f64) -> Result<bool> {
    let fresh = LengthCache::disabled();
    let d = |a: &str, b: &str| metric.distance_raw(a, b, &fresh);
    let ok = match (axiom, w.inputs.as_slice()) {
        (Axiom::Zero, [x, y]) => {
            let v = d(x, y)?;
            if x == y {
                v.abs() > tol
            } else {
                v.abs() <= tol
            }
        }
        (Axiom::NonNegativity, [x, y]) => d(x, y)? < -tol,
        (Axiom::Symmetry, [x, y]) => (d(x, y)? - d(y, x)?).abs() > tol,
        (Axiom::Triangle, [x, y, z]) => d(x, z)? - (d(x, y)? + d(y, z)?) > tol,
        _ => return Err(Error::invalid(format!("malformed {axiom} witness"))),
    };
    Ok(ok)
}

/// Counterexample strings used to show each backend is not a metric.
pub const LITERAL_WITNESSES: &[&str] = &[
    "A",
    "AA",
    "AAA",
    "AAAA",
    "AAAAAAA",
    "AAB",
    "AABABAA",
    "AN",
    "B",
    "BAA",
    "BAABAAB",
    "BC",
    "CAAAACAA",
    "CAC",
    "CBCCCBBCCC",
    "CCACCCACCC",
    "CCCCBBCCC",
    "G",
    "J",
    "X",
];

pub const SHORT_ALPHABET: [char; 7] = ['A', 'B', 'C', 'J', 'N', 'G', 'X'];

/// Deterministic short-string corpus over [`SHORT_ALPHABET`]: the literal
/// witnesses, every string of length 1 and 2, single-letter runs of length
/// 3 to 10, then seeded random strings of length 3 to 10 up to `size`.
pub fn short_corpus(size: usize) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |s: String, out: &mut Vec<String>| {
        if out.len() < size && seen.insert(s.clone()) {
            out.push(s);
        }
    };
    for w in LITERAL_WITNESSES {
        push((*w).to_owned(), &mut out);
    }
    for a in SHORT_ALPHABET {
        push(a.to_string(), &mut out);
    }
    for a in SHORT_ALPHABET {
        for b in SHORT_ALPHABET {
            push(format!("{a}{b}"), &mut out);
        }
    }
    for a in SHORT_ALPHABET {
        for len in 3..=10 {
            push(a.to_string().repeat(len), &mut out);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x4c31);
    let mut attempts = 0;
    while out.len() < size && attempts < 100 * size {
        attempts += 1;
        let len = rng.random_range(3..=10);
        let s: String = (0..len)
            .map(|_| SHORT_ALPHABET[rng.random_range(0..SHORT_ALPHABET.len())])
            .collect();
        push(s, &mut out);
    }
    out
}

pub const SHORT_CORPUS_SIZE: usize = 180;

/// Audits NCD under `c` over [`short_corpus`].
pub fn compressor_audit(c: CompressorHandle, cache: &LengthCache) -> Result<AuditReport> {
    c.validate()?;
    audit(
        &short_corpus(SHORT_CORPUS_SIZE),
        &MetricSpec::ncd(c),
        AuditOptions::default(),
        cache,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::MetricKind;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let m = MetricSpec::new(MetricKind::Levenshtein);
        assert!(audit(&[], &m, AuditOptions::default(), &LengthCache::new()).is_err());
    }

    #[test]
    fn levenshtein_is_clean() {
        let m = MetricSpec::new(MetricKind::Levenshtein);
        let r = audit(
            &short_corpus(60),
            &m,
            AuditOptions::default(),
            &LengthCache::new(),
        )
        .unwrap();
        assert_eq!(r.total_violations(), 0);
        assert_eq!(r.report(Axiom::Triangle).checked, 60 * 60 * 60);
        assert_eq!(r.report(Axiom::Symmetry).checked, 60 * 59 / 2);
    }

    #[test]
    fn gzip_symmetry_pattern() {
        let m = MetricSpec::ncd(CompressorHandle::gzip());
        let r = audit(
            &strings(&["AA", "BAA", "A"]),
            &m,
            AuditOptions::default(),
            &LengthCache::new(),
        )
        .unwrap();
        let sym = r.report(Axiom::Symmetry);
        assert!(sym
            .witnesses
            .iter()
            .any(|w| w.inputs == strings(&["AA", "BAA"])));
    }

    #[test]
    fn gzip_triangle_pattern() {
        let m = MetricSpec::ncd(CompressorHandle::gzip());
        let corpus = strings(&["AAA", "AAAA", "A"]);
        let r = audit(&corpus, &m, AuditOptions::default(), &LengthCache::new()).unwrap();
        let tri = r.report(Axiom::Triangle);
        assert!(tri.violations > 0);
        assert!(tri
            .witnesses
            .iter()
            .any(|w| w.inputs == strings(&["AAA", "AAAA", "A"])));
        for w in &tri.witnesses {
            assert!(verify_witness(Axiom::Triangle, w, &m, DEFAULT_TOLERANCE).unwrap());
        }
    }

    #[test]
    fn witness_cap_applies() {
        let m = MetricSpec::ncd(CompressorHandle::gzip());
        let opts = AuditOptions {
            witness_cap: 3,
            ..Default::default()
        };
        let r = audit(&short_corpus(30), &m, opts, &LengthCache::new()).unwrap();
        for rep in &r.reports {
            assert!(rep.witnesses.len() <= 3);
            assert!(rep.violations >= rep.witnesses.len() as u64);
            assert!(rep.witnesses.windows(2).all(|w| w[0].margin >= w[1].margin));
        }
    }

    #[test]
    fn corpus_is_deterministic_and_unique() {
        let a = short_corpus(SHORT_CORPUS_SIZE);
        assert_eq!(a, short_corpus(SHORT_CORPUS_SIZE));
        assert_eq!(a.len(), SHORT_CORPUS_SIZE);
        assert_eq!(a.iter().collect::<HashSet<_>>().len(), a.len());
        assert!(a.iter().all(|s| s.chars().count() <= 10));
    }

    #[test]
    fn malformed_witness_rejected() {
        let m = MetricSpec::new(MetricKind::Hamming);
        let w = Witness {
            inputs: strings(&["a"]),
            values: vec![],
            margin: 1.0,
        };
        assert!(verify_witness(Axiom::Symmetry, &w, &m, 0.0).is_err());
    }
}
