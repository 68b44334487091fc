//! Byte compressors and the compressed-length cache.
//!
//! Only the length of a compressed stream is ever consumed, so every backend
//! writes into a counting sink instead of materialising the output.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompressorKind {
    Gzip,
    Bz2,
    Brotli,
}

impl CompressorKind {
    pub const ALL: [CompressorKind; 3] = [
        CompressorKind::Gzip,
        CompressorKind::Bz2,
        CompressorKind::Brotli,
    ];

    /// Pinned default quality: maximal compression for every backend.
    pub fn default_level(self) -> u32 {
        match self {
            CompressorKind::Gzip => 9,
            CompressorKind::Bz2 => 9,
            CompressorKind::Brotli => 11,
        }
    }

    fn level_range(self) -> std::ops::RangeInclusive<u32> {
        match self {
            CompressorKind::Gzip => 0..=9,
            CompressorKind::Bz2 => 1..=9,
            CompressorKind::Brotli => 0..=11,
        }
    }
}

impl fmt::Display for CompressorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompressorKind::Gzip => "gzip",
            CompressorKind::Bz2 => "bz2",
            CompressorKind::Brotli => "brotli",
        })
    }
}

impl FromStr for CompressorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gzip" | "gz" => Ok(CompressorKind::Gzip),
            "bz2" | "bzip2" => Ok(CompressorKind::Bz2),
            "brotli" | "br" => Ok(CompressorKind::Brotli),
            other => Err(Error::invalid(format!("unknown compressor {other:?}"))),
        }
    }
}

/// A named compression backend at a fixed quality level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompressorHandle {
    pub kind: CompressorKind,
    pub level: u32,
}

impl CompressorHandle {
    pub fn new(kind: CompressorKind, level: u32) -> Self {
        CompressorHandle { kind, level }
    }

    pub fn pinned(kind: CompressorKind) -> Self {
        CompressorHandle::new(kind, kind.default_level())
    }

    pub fn gzip() -> Self {
        Self::pinned(CompressorKind::Gzip)
    }

    pub fn bz2() -> Self {
        Self::pinned(CompressorKind::Bz2)
    }

    pub fn brotli() -> Self {
        Self::pinned(CompressorKind::Brotli)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.level_range().contains(&self.level) {
            Ok(())
        } else {
            Err(self.failure(format!("level outside {:?}", self.kind.level_range())))
        }
    }

    fn failure(&self, reason: impl Into<String>) -> Error {
        Error::Compressor {
            kind: self.kind,
            level: self.level,
            reason: reason.into(),
        }
    }

    /// Compresses the concatenation of `parts` and returns the stream length.
    /// Bypasses any cache.
    pub fn compress_len(&self, parts: &[&[u8]]) -> Result<usize> {
        self.validate()?;
        let mut sink = CountingSink::default();
        let res = match self.kind {
            CompressorKind::Gzip => {
                let mut enc =
                    flate2::write::GzEncoder::new(&mut sink, flate2::Compression::new(self.level));
                parts
                    .iter()
                    .try_for_each(|p| enc.write_all(p))
                    .and_then(|_| enc.finish().map(drop))
            }
            CompressorKind::Bz2 => {
                let total: usize = parts.iter().map(|p| p.len()).sum();
                let block = bz2_block_level(total, self.level);
                let mut enc =
                    bzip2::write::BzEncoder::new(&mut sink, bzip2::Compression::new(block));
                parts
                    .iter()
                    .try_for_each(|p| enc.write_all(p))
                    .and_then(|_| enc.finish().map(drop))
            }
            CompressorKind::Brotli => {
                // quality, lgwin 22 (the reference encoder default)
                let mut enc = brotli::CompressorWriter::new(&mut sink, 4096, self.level, 22);
                let res = parts.iter().try_for_each(|p| enc.write_all(p));
                // finalises the stream
                enc.into_inner();
                res
            }
        };
        res.map_err(|e| self.failure(e.to_string()))?;
        Ok(sink.0)
    }
}

impl fmt::Display for CompressorHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.kind, self.level)
    }
}

/// Smallest bzip2 block size (in 100k units, capped at `level`) that still
/// holds `len` input bytes in a single block. Below that the stream only
/// differs in the header digit, so the length is the same as at `level`,
/// and the encoder allocates a fraction of the memory.
fn bz2_block_level(len: usize, level: u32) -> u32 {
    // run-length pre-pass can grow input by 5/4; 19 bytes are reserved per block
    let needed = (len * 5 / 4 + 1000) / 100_000 + 1;
    (needed as u32).min(level)
}

#[derive(Default)]
struct CountingSink(usize);

impl Write for CountingSink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0 += buf.len();
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    digest: [u8; 32],
    handle: CompressorHandle,
}

impl CacheKey {
    fn new(parts: &[&[u8]], handle: CompressorHandle) -> Self {
        let mut hasher = Sha256::new();
        for p in parts {
            hasher.update(p);
        }
        CacheKey {
            digest: hasher.finalize().into(),
            handle,
        }
    }
}

/// Snapshot of [`LengthCache`] counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub lookups: u64,
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub total_compressor_calls: u64,
    /// Compressor calls made on behalf of a single sample.
    pub single_calls: u64,
    /// Compressor calls made on a concatenation of two samples.
    pub concat_calls: u64,
}

const SHARDS: usize = 16;

/// Content-addressed store of compressed lengths.
///
/// Safe to share between workers. Two workers missing on the same key at the
/// same time both compress and store the same value.
pub struct LengthCache {
    enabled: bool,
    shards: Vec<RwLock<HashMap<CacheKey, usize>>>,
    lookups: AtomicU64,
    hits: AtomicU64,
    misses: AtomicU64,
    single_calls: AtomicU64,
    concat_calls: AtomicU64,
}

#[derive(Clone, Copy)]
enum CallKind {
    Single,
    Concat,
}

impl LengthCache {
    pub fn new() -> Self {
        Self::with_enabled(true)
    }

    /// A pass-through cache: every lookup compresses, nothing is retained.
    pub fn disabled() -> Self {
        Self::with_enabled(false)
    }

    pub fn with_enabled(enabled: bool) -> Self {
        LengthCache {
            enabled,
            shards: (0..SHARDS).map(|_| RwLock::new(HashMap::new())).collect(),
            lookups: AtomicU64::new(0),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            single_calls: AtomicU64::new(0),
            concat_calls: AtomicU64::new(0),
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn len(&self) -> usize {
        self.shards.iter().map(|s| s.read().unwrap().len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stats(&self) -> CacheStats {
        let single_calls = self.single_calls.load(Ordering::Relaxed);
        let concat_calls = self.concat_calls.load(Ordering::Relaxed);
        CacheStats {
            lookups: self.lookups.load(Ordering::Relaxed),
            cache_hits: self.hits.load(Ordering::Relaxed),
            cache_misses: self.misses.load(Ordering::Relaxed),
            total_compressor_calls: single_calls + concat_calls,
            single_calls,
            concat_calls,
        }
    }

    fn shard(&self, key: &CacheKey) -> &RwLock<HashMap<CacheKey, usize>> {
        &self.shards[key.digest[0] as usize % SHARDS]
    }

    fn lookup(&self, parts: &[&[u8]], handle: CompressorHandle, kind: CallKind) -> Result<usize> {
        self.lookups.fetch_add(1, Ordering::Relaxed);
        let key = if self.enabled {
            let key = CacheKey::new(parts, handle);
            if let Some(&len) = self.shard(&key).read().unwrap().get(&key) {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return Ok(len);
            }
            self.misses.fetch_add(1, Ordering::Relaxed);
            Some(key)
        } else {
            None
        };

        let len = handle.compress_len(parts)?;
        match kind {
            CallKind::Single => &self.single_calls,
            CallKind::Concat => &self.concat_calls,
        }
        .fetch_add(1, Ordering::Relaxed);

        if let Some(key) = key {
            self.shard(&key).write().unwrap().insert(key, len);
        }
        Ok(len)
    }
}

impl Default for LengthCache {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for LengthCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LengthCache")
            .field("enabled", &self.enabled)
            .field("entries", &self.len())
            .field("stats", &self.stats())
            .finish()
    }
}

/// Length in bytes of the compressed form of `data`.
pub fn compressed_length(data: &[u8], c: CompressorHandle, cache: &LengthCache) -> Result<usize> {
    cache.lookup(&[data], c, CallKind::Single)
}

/// Compressed length of `x ‖ y`, byte-level concatenation with no separator.
pub fn concat_length(
    x: &[u8],
    y: &[u8],
    c: CompressorHandle,
    cache: &LengthCache,
) -> Result<usize> {
    cache.lookup(&[x, y], c, CallKind::Concat)
}
