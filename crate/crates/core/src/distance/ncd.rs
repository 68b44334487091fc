//! Normalised compression distance.
//!
//! `NCD(x, y) = (|C(xy)| - min(|C(x)|, |C(y)|)) / max(|C(x)|, |C(y)|) + eps`
//!
//! With an imperfect compressor this is not a metric: it can be non-zero on
//! identical inputs, zero or negative on distinct ones, asymmetric, and it can
//! break the triangle inequality. The `*_raw` variants expose that behaviour;
//! the plain variants return 0 for byte-identical inputs without compressing.

use crate::compression::{compressed_length, concat_length, CompressorHandle, LengthCache};
use crate::error::Result;

fn normalise(joint: f64, cx: usize, cy: usize, eps: f64) -> f64 {
    let lo = cx.min(cy) as f64;
    let hi = cx.max(cy) as f64;
    (joint - lo) / hi + eps
}

pub fn ncd(x: &str, y: &str, c: CompressorHandle, eps: f64, cache: &LengthCache) -> Result<f64> {
    if x == y {
        return Ok(0.0);
    }
    ncd_raw(x, y, c, eps, cache)
}

/// NCD without the identical-input shortcut.
pub fn ncd_raw(
    x: &str,
    y: &str,
    c: CompressorHandle,
    eps: f64,
    cache: &LengthCache,
) -> Result<f64> {
    let (x, y) = (x.as_bytes(), y.as_bytes());
    let cx = compressed_length(x, c, cache)?;
    let cy = compressed_length(y, c, cache)?;
    let cxy = concat_length(x, y, c, cache)?;
    Ok(normalise(cxy as f64, cx, cy, eps))
}

/// Mean of both concatenation orders, folded into a single ratio. Symmetric
/// in its arguments bit for bit.
pub fn ncd_average(
    x: &str,
    y: &str,
    c: CompressorHandle,
    eps: f64,
    cache: &LengthCache,
) -> Result<f64> {
    if x == y {
        return Ok(0.0);
    }
    ncd_average_raw(x, y, c, eps, cache)
}

pub fn ncd_average_raw(
    x: &str,
    y: &str,
    c: CompressorHandle,
    eps: f64,
    cache: &LengthCache,
) -> Result<f64> {
    let (x, y) = (x.as_bytes(), y.as_bytes());
    let cx = compressed_length(x, c, cache)?;
    let cy = compressed_length(y, c, cache)?;
    let cxy = concat_length(x, y, c, cache)?;
    let cyx = concat_length(y, x, c, cache)?;
    Ok(normalise((cxy + cyx) as f64 / 2.0, cx, cy, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::CompressorKind;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn shortcut_returns_zero_without_compressing() {
        let cache = LengthCache::new();
        assert_eq!(
            ncd("A", "A", CompressorHandle::gzip(), 0.0, &cache).unwrap(),
            0.0
        );
        assert_eq!(cache.stats().lookups, 0);
    }

    #[test]
    fn gzip_self_distance_without_shortcut() {
        // |C("A")| = 21, |C("AA")| = 22 at level 9.
        let cache = LengthCache::new();
        let d = ncd_raw("A", "A", CompressorHandle::gzip(), 0.0, &cache).unwrap();
        assert_eq!(d, 1.0 / 21.0);
        assert!(close(d, 0.05, 0.005));
    }

    #[test]
    fn witness_values_on_pinned_backends() {
        let cache = LengthCache::new();
        let gz = CompressorHandle::gzip();
        let bz = CompressorHandle::bz2();
        let br = CompressorHandle::brotli();

        let ab = ncd("AA", "BAA", gz, 0.0, &cache).unwrap();
        let ba = ncd("BAA", "AA", gz, 0.0, &cache).unwrap();
        assert!(
            close(ab, 0.13, 0.005) && close(ba, 0.04, 0.005),
            "{ab} {ba}"
        );

        assert!(ncd_raw("AAAA", "AAAA", gz, 0.0, &cache).unwrap() < 0.0);
        assert_eq!(ncd("B", "G", bz, 0.0, &cache).unwrap(), 0.0);
        assert!(ncd("AABABAA", "BAABAAB", bz, 0.0, &cache).unwrap() < 0.0);
        assert_eq!(ncd_raw("X", "X", br, 0.0, &cache).unwrap(), 0.2);
    }

    #[test]
    fn epsilon_is_additive() {
        let cache = LengthCache::new();
        let c = CompressorHandle::pinned(CompressorKind::Gzip);
        let base = ncd("hello", "world", c, 0.0, &cache).unwrap();
        let shifted = ncd("hello", "world", c, 0.25, &cache).unwrap();
        assert_eq!(shifted, base + 0.25);
    }

    #[test]
    fn average_is_mean_of_both_orders() {
        let cache = LengthCache::new();
        let c = CompressorHandle::gzip();
        for (x, y) in [("AA", "BAA"), ("spam spam", "eggs"), ("", "abc")] {
            let avg = ncd_average(x, y, c, 0.0, &cache).unwrap();
            let mean =
                (ncd(x, y, c, 0.0, &cache).unwrap() + ncd(y, x, c, 0.0, &cache).unwrap()) / 2.0;
            assert!(close(avg, mean, 1e-12));
            assert_eq!(
                avg.to_bits(),
                ncd_average(y, x, c, 0.0, &cache).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn average_degenerates_when_orders_agree() {
        let cache = LengthCache::new();
        let c = CompressorHandle::gzip();
        let (x, y) = ("abc", "xyz");
        let xy = concat_length(x.as_bytes(), y.as_bytes(), c, &cache).unwrap();
        let yx = concat_length(y.as_bytes(), x.as_bytes(), c, &cache).unwrap();
        assert_eq!(xy, yx);
        assert_eq!(
            ncd_average(x, y, c, 0.0, &cache).unwrap(),
            ncd(x, y, c, 0.0, &cache).unwrap()
        );
    }
}
