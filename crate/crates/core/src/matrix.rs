//! Dense row-major matrices and their on-disk layouts.
//!
//! CSV: a header row holding an empty corner cell followed by the column ids,
//! then one line per row: the row id followed by the values. Values are
//! written in shortest round-trip form so a CSV re-read is bit-exact.
//!
//! Binary: `b"NCDM"`, version (`u32`), rows (`u64`), cols (`u64`), then
//! `rows * cols` row-major `f64` values. Everything little-endian.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"NCDM";
pub const BINARY_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{} values cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged rows"));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Exact (bitwise-value) symmetry.
    pub fn is_symmetric(&self) -> bool {
        self.is_symmetric_within(0.0)
    }

    pub fn is_symmetric_within(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Sub-matrix picking the given rows and columns, in order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            let r = self.row(i);
            data.extend(cols.iter().map(|&j| r[j]));
        }
        Matrix {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&BINARY_VERSION.to_le_bytes())?;
        w.write_all(&(self.rows as u64).to_le_bytes())?;
        w.write_all(&(self.cols as u64).to_le_bytes())?;
        for v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Matrix> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word)?;
        let version = u32::from_le_bytes(word);
        if version != BINARY_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let mut dword = [0u8; 8];
        r.read_exact(&mut dword)?;
        let rows = u64::from_le_bytes(dword) as usize;
        r.read_exact(&mut dword)?;
        let cols = u64::from_le_bytes(dword) as usize;
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
        let mut data = Vec::with_capacity(n.min(1 << 24));
        for _ in 0..n {
            r.read_exact(&mut dword)?;
            data.push(f64::from_le_bytes(dword));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn write_csv<W: Write>(&self, w: W, row_ids: &[String], col_ids: &[String]) -> Result<()> {
        if row_ids.len() != self.rows || col_ids.len() != self.cols {
            return Err(Error::invalid("id count does not match matrix shape"));
        }
        let mut out = csv::Writer::from_writer(w);
        let header = std::iter::once("").chain(col_ids.iter().map(String::as_str));
        out.write_record(header).map_err(csv_err)?;
        for (i, id) in row_ids.iter().enumerate() {
            let mut rec = Vec::with_capacity(self.cols + 1);
            rec.push(id.clone());
            rec.extend(self.row(i).iter().map(|v| v.to_string()));
            out.write_record(&rec).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Returns `(matrix, row_ids, col_ids)`.
    pub fn read_csv<R: Read>(r: R) -> Result<(Matrix, Vec<String>, Vec<String>)> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .from_reader(r);
        let mut records = rdr.records();
        let header = records
            .next()
            .ok_or_else(|| Error::Format("empty matrix csv".into()))?
            .map_err(csv_err)?;
        let col_ids: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
        let mut row_ids = Vec::new();
        let mut data = Vec::new();
        for (line, rec) in records.enumerate() {
            let rec = rec.map_err(csv_err)?;
            if rec.len() != col_ids.len() + 1 {
                return Err(Error::Format(format!(
                    "line {}: expected {} fields",
                    line + 2,
                    col_ids.len() + 1
                )));
            }
            row_ids.push(rec[0].to_owned());
            for field in rec.iter().skip(1) {
                let v: f64 = field.parse().map_err(|_| {
                    Error::Format(format!("line {}: bad value {field:?}", line + 2))
                })?;
                data.push(v);
            }
        }
        let m = Matrix::from_vec(row_ids.len(), col_ids.len(), data)?;
        Ok((m, row_ids, col_ids))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(n: usize, p: &str) -> Vec<String> {
        (0..n).map(|i| format!("{p}{i}")).collect()
    }

    #[test]
    fn binary_layout_is_pinned() {
        let m = Matrix::from_rows(&[vec![1.0, -0.5]]).unwrap();
        let mut buf = Vec::new();
        m.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[0..4], b"NCDM");
        assert_eq!(&buf[4..8], &1u32.to_le_bytes());
        assert_eq!(&buf[8..16], &1u64.to_le_bytes());
        assert_eq!(&buf[16..24], &2u64.to_le_bytes());
        assert_eq!(&buf[24..32], &1.0f64.to_le_bytes());
        assert_eq!(&buf[32..40], &(-0.5f64).to_le_bytes());
        assert_eq!(buf.len(), 40);
    }

    #[test]
    fn binary_rejects_bad_magic() {
        let err = Matrix::read_binary(&b"NCDX\x01\0\0\0"[..]).unwrap_err();
        assert!(matches!(err, Error::Format(_)));
    }

    #[test]
    fn csv_header_layout() {
        let m = Matrix::from_rows(&[vec![0.0, 0.25], vec![0.25, 0.0]]).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf, &ids(2, "r"), &ids(2, "c")).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, ",c0,c1\nr0,0,0.25\nr1,0.25,0\n");
    }

    #[test]
    fn select_picks_blocks() {
        let m = Matrix::from_rows(&[vec![1., 2., 3.], vec![4., 5., 6.], vec![7., 8., 9.]]).unwrap();
        let s = m.select(&[2, 0], &[1]);
        assert_eq!(s.to_rows(), vec![vec![8.], vec![2.]]);
    }

    proptest! {
        #[test]
        fn formats_round_trip(rows in 0usize..5, cols in 0usize..5, seed in any::<u64>()) {
            let data: Vec<f64> = (0..rows * cols)
                .map(|k| f64::from_bits(seed.rotate_left(k as u32) ^ 0x3ff0_0000_0000_0000) / 3.0)
                .map(|v| if v.is_finite() { v } else { 0.5 })
                .collect();
            let m = Matrix::from_vec(rows, cols, data).unwrap();
            let mut bin = Vec::new();
            m.write_binary(&mut bin).unwrap();
            prop_assert_eq!(&Matrix::read_binary(&bin[..]).unwrap(), &m);

            let mut text = Vec::new();
            m.write_csv(&mut text, &ids(rows, "r"), &ids(cols, "c")).unwrap();
            let (back, r, c) = Matrix::read_csv(&text[..]).unwrap();
            prop_assert_eq!(r, ids(rows, "r"));
            prop_assert_eq!(c, ids(cols, "c"));
            if rows > 0 {
                prop_assert_eq!(back, m);
            }
        }
    }
}
