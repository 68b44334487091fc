//! Timing and compressor-call accounting for distance-matrix construction.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::compression::{CacheStats, LengthCache};
use crate::data::Sample;
use crate::distance::{distance_matrix, MetricSpec, SymmetrisationPolicy};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub cpu_model: String,
    pub workers: usize,
    pub version: String,
}

impl Environment {
    pub fn detect() -> Self {
        Environment {
            cpu_model: cpu_model().unwrap_or_else(|| "unknown".to_string()),
            workers: rayon::current_num_threads(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

fn cpu_model() -> Option<String> {
    let info = std::fs::read_to_string("/proc/cpuinfo").ok()?;
    info.lines()
        .find(|l| l.starts_with("model name") || l.starts_with("Model"))
        .and_then(|l| l.split_once(':'))
        .map(|(_, v)| v.trim().to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub metric: String,
    pub policy: SymmetrisationPolicy,
    pub samples: usize,
    pub total_seconds: f64,
    pub per_sample_seconds: f64,
    pub counters: CacheStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub environment: Environment,
    pub cache_enabled: bool,
    pub rows: Vec<BenchRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    pub cache: bool,
    /// Samples used by the untimed warm-up pass.
    pub warmup: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            cache: true,
            warmup: 10,
        }
    }
}

/// Times one self-matrix per metric and policy over `samples`. Each timed
/// run gets a fresh cache, so the counters are those of a cold start.
pub fn run_bench(
    samples: &[Sample],
    metrics: &[MetricSpec],
    policies: &[SymmetrisationPolicy],
    opts: BenchOptions,
) -> Result<BenchReport> {
    if samples.is_empty() {
        return Err(Error::invalid("benchmark needs at least one sample"));
    }
    let mut rows = Vec::new();
    for &metric in metrics {
        for &policy in policies {
            let warm = &samples[..opts.warmup.min(samples.len())];
            distance_matrix(
                warm,
                warm,
                &metric,
                policy,
                &LengthCache::with_enabled(opts.cache),
            )?;

            let cache = LengthCache::with_enabled(opts.cache);
            let t = Instant::now();
            distance_matrix(samples, samples, &metric, policy, &cache)?;
            let total = t.elapsed().as_secs_f64();
            rows.push(BenchRow {
                metric: metric.to_string(),
                policy,
                samples: samples.len(),
                total_seconds: total,
                per_sample_seconds: total / samples.len() as f64,
                counters: cache.stats(),
            });
        }
    }
    Ok(BenchReport {
        environment: Environment::detect(),
        cache_enabled: opts.cache,
        rows,
    })
}

impl BenchReport {
    pub fn row(&self, metric: &str, policy: SymmetrisationPolicy) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.metric == metric && r.policy == policy)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let header = [
            "metric",
            "policy",
            "samples",
            "total_seconds",
            "per_sample_seconds",
            "compressor_calls",
            "single_calls",
            "concat_calls",
            "cache_hits",
            "cpu_model",
            "workers",
        ];
        out.write_record(header)
            .map_err(|e| Error::Format(e.to_string()))?;
        for r in &self.rows {
            let c = r.counters;
            out.write_record([
                r.metric.clone(),
                r.policy.to_string(),
                r.samples.to_string(),
                r.total_seconds.to_string(),
                r.per_sample_seconds.to_string(),
                c.total_compressor_calls.to_string(),
                c.single_calls.to_string(),
                c.concat_calls.to_string(),
                c.cache_hits.to_string(),
                self.environment.cpu_model.clone(),
                self.environment.workers.to_string(),
            ])
            .map_err(|e| Error::Format(e.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::MetricKind;
    use crate::CompressorHandle;

    fn samples(n: usize) -> Vec<Sample> {
        (0..n)
            .map(|i| Sample::new(format!("s{i}"), format!("sample text number {i}")))
            .collect()
    }

    #[test]
    fn counters_follow_policy() {
        let n = 20;
        let r = run_bench(
            &samples(n),
            &[MetricSpec::ncd(CompressorHandle::gzip())],
            &SymmetrisationPolicy::ALL,
            BenchOptions::default(),
        )
        .unwrap();
        let n = n as u64;
        for row in &r.rows {
            let concat = match row.policy {
                SymmetrisationPolicy::Vanilla | SymmetrisationPolicy::Average => n * n - n,
                _ => n * (n - 1) / 2,
            };
            assert_eq!(row.counters.concat_calls, concat, "{}", row.policy);
            assert_eq!(row.counters.single_calls, n);
            assert_eq!(
                row.per_sample_seconds,
                row.total_seconds / row.samples as f64
            );
        }
    }

    #[test]
    fn csv_has_one_row_per_combination() {
        let r = run_bench(
            &samples(5),
            &[MetricSpec::new(MetricKind::Levenshtein)],
            &[
                SymmetrisationPolicy::Vanilla,
                SymmetrisationPolicy::Enforced,
            ],
            BenchOptions {
                cache: false,
                warmup: 2,
            },
        )
        .unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3);
        assert!(r
            .row("levenshtein", SymmetrisationPolicy::Enforced)
            .is_some());
    }
}
