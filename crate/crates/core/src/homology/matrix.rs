//! Dense and row-sparse integer matrices.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::json::{deserialize_bigints, BigIntSeq};

/// A dense matrix of arbitrary-precision integers, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Malformed("ragged matrix rows".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().cloned().map(Into::into)).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.data[r * other.cols + c] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn sub_identity(&self) -> IntMatrix {
        assert_eq!(self.rows, self.cols, "square matrix expected");
        let mut m = self.clone();
        for i in 0..self.rows {
            m.data[i * self.cols + i] -= 1;
        }
        m
    }

    /// Concatenates columns.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "row counts differ");
        let cols = self.cols + other.cols;
        let mut out = IntMatrix::zeros(self.rows, cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        out
    }

    pub fn to_sparse(&self) -> SparseRows {
        let mut s = SparseRows::new(self.cols);
        for r in 0..self.rows {
            s.push(
                self.row(r)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c, v.clone()))
                    .collect(),
            );
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize)]
struct RawOut<'a> {
    rows: usize,
    cols: usize,
    entries: Vec<BigIntSeq<'a>>,
}

#[derive(Deserialize)]
struct RawRow(#[serde(deserialize_with = "deserialize_bigints")] Vec<BigInt>);

#[derive(Deserialize)]
struct RawIn {
    rows: usize,
    cols: usize,
    entries: Vec<RawRow>,
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawOut {
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows).map(|r| BigIntSeq(self.row(r))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawIn::deserialize(d)?;
        if raw.entries.len() != raw.rows || raw.entries.iter().any(|r| r.0.len() != raw.cols) {
            return Err(serde::de::Error::custom("matrix dimensions do not match entries"));
        }
        Ok(IntMatrix {
            rows: raw.rows,
            cols: raw.cols,
            data: raw.entries.into_iter().flat_map(|r| r.0).collect(),
        })
    }
}

/// Rows stored as sorted `(column, value)` lists with no zero entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseRows {
    pub cols: usize,
    pub rows: Vec<Vec<(usize, BigInt)>>,
}

impl SparseRows {
    pub fn new(cols: usize) -> Self {
        SparseRows { cols, rows: Vec::new() }
    }

    /// Adds a row given as unsorted entries; duplicates are summed.
    pub fn push(&mut self, mut entries: Vec<(usize, BigInt)>) {
        entries.sort_by_key(|e| e.0);
        let mut row: Vec<(usize, BigInt)> = Vec::with_capacity(entries.len());
        for (c, v) in entries {
            debug_assert!(c < self.cols);
            match row.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => row.push((c, v)),
            }
        }
        row.retain(|e| !e.1.is_zero());
        self.rows.push(row);
    }

    pub fn push_i64(&mut self, entries: impl IntoIterator<Item = (usize, i64)>) {
        self.push(entries.into_iter().map(|(c, v)| (c, BigInt::from(v))).collect());
    }

    pub fn to_dense(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows.len(), self.cols);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                m.set(r, *c, v.clone());
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let m = IntMatrix::from_rows(&[vec![1i64, -2], vec![3, 4]]).unwrap();
        let js = serde_json::to_string(&m).unwrap();
        assert_eq!(js, r#"{"rows":2,"cols":2,"entries":[[1,-2],[3,4]]}"#);
        assert_eq!(serde_json::from_str::<IntMatrix>(&js).unwrap(), m);
        assert!(serde_json::from_str::<IntMatrix>(r#"{"rows":2,"cols":2,"entries":[[1]]}"#).is_err());
    }

    #[test]
    fn sparse_push_merges() {
        let mut s = SparseRows::new(3);
        s.push_i64([(2, 1), (0, 1), (2, -1)]);
        assert_eq!(s.rows[0], vec![(0, BigInt::from(1))]);
        let d = s.to_dense();
        assert_eq!(d.to_sparse(), s);
    }
}
