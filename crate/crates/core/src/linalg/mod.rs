//! Exact linear algebra over Z/2 and Z.

pub mod smith;
pub mod z2;

use std::collections::BTreeMap;

/// Column-sparse integer matrix; each column holds `(row, value)` pairs
/// sorted by row with no zero entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub cols: Vec<Vec<(usize, i64)>>,
}

impl SparseIntMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseIntMatrix {
            nrows,
            ncols,
            cols: vec![Vec::new(); ncols],
        }
    }

    /// Builds from unsorted column entries; duplicates are summed.
    pub fn from_columns(nrows: usize, cols: Vec<Vec<(usize, i64)>>) -> Self {
        let ncols = cols.len();
        let cols = cols
            .into_iter()
            .map(|c| {
                let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
                for (r, v) in c {
                    debug_assert!(r < nrows);
                    *acc.entry(r).or_insert(0) += v;
                }
                acc.into_iter().filter(|&(_, v)| v != 0).collect()
            })
            .collect();
        SparseIntMatrix { nrows, ncols, cols }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.ncols, rhs.nrows, "dimension mismatch");
        let cols = rhs
            .cols
            .iter()
            .map(|col| {
                let mut out = Vec::new();
                for &(mid, b) in col {
                    for &(row, a) in &self.cols[mid] {
                        out.push((row, a * b));
                    }
                }
                out
            })
            .collect();
        SparseIntMatrix::from_columns(self.nrows, cols)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.ncols]; self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                d[i][j] = v;
            }
        }
        d
    }

    pub fn transpose(&self) -> SparseIntMatrix {
        let mut cols = vec![Vec::new(); self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                cols[i].push((j, v));
            }
        }
        SparseIntMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            cols,
        }
    }
}
