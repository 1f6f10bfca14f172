//! Dense matrices over GF(2).

use std::fmt;

use crate::bits::BitString;
use crate::error::{QheError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitString>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows: vec![BitString::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for k in 0..n {
            m.rows[k].set(k, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitString>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(QheError::LengthMismatch {
                expected: cols,
                actual: bad.len(),
            });
        }
        Ok(BitMatrix { rows, cols })
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &BitString {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r][c]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.rows.swap(a, b);
    }

    /// `row[dst] ^= row[src]`.
    pub fn add_row(&mut self, src: usize, dst: usize) {
        let s = self.rows[src].clone();
        self.rows[dst] = &self.rows[dst] ^ &s;
    }

    pub fn mul_vec(&self, v: &BitString) -> Result<BitString> {
        if v.len() != self.cols {
            return Err(QheError::LengthMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v.iter())
                    .fold(false, |acc, (a, b)| acc ^ (a & b))
            })
            .collect())
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.num_rows() {
            return Err(QheError::LengthMismatch {
                expected: self.cols,
                actual: other.num_rows(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, b)| *b)
                    .fold(BitString::zeros(other.cols), |acc, (k, _)| {
                        &acc ^ &other.rows[k]
                    })
            })
            .collect();
        Ok(BitMatrix {
            rows,
            cols: other.cols,
        })
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..m.num_rows()).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(rank, p);
            for r in 0..m.num_rows() {
                if r != rank && m.get(r, c) {
                    m.add_row(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.num_rows() == self.cols && self.rank() == self.cols
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<BitMatrix> {
        if self.num_rows() != self.cols {
            return Err(QheError::Singular);
        }
        let n = self.cols;
        let mut m = self.clone();
        let mut inv = BitMatrix::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| m.get(r, c)).ok_or(QheError::Singular)?;
            m.swap_rows(c, p);
            inv.swap_rows(c, p);
            for r in 0..n {
                if r != c && m.get(r, c) {
                    m.add_row(c, r);
                    inv.add_row(c, r);
                }
            }
        }
        Ok(inv)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}
