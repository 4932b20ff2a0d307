//! Bit-packed Gaussian elimination over Z/2.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

/// Z/2 matrix stored as bit-packed columns.
#[derive(Clone, Debug)]
pub struct Z2Matrix {
    nrows: usize,
    cols: Vec<FixedBitSet>,
}

impl Z2Matrix {
    /// `columns[j]` lists the rows holding a 1 in column `j`.
    pub fn from_sparse_columns(nrows: usize, columns: &[Vec<usize>]) -> Self {
        let cols = columns
            .iter()
            .map(|c| {
                let mut b = FixedBitSet::with_capacity(nrows);
                for &r in c {
                    b.toggle(r);
                }
                b
            })
            .collect();
        Z2Matrix { nrows, cols }
    }

    /// `rows[i]` lists the columns holding a 1 in row `i`.
    pub fn from_sparse_rows(ncols: usize, rows: &[Vec<usize>]) -> Self {
        let mut cols = vec![FixedBitSet::with_capacity(rows.len()); ncols];
        for (i, row) in rows.iter().enumerate() {
            for &j in row {
                cols[j].toggle(i);
            }
        }
        Z2Matrix {
            nrows: rows.len(),
            cols,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn rank(&self) -> usize {
        self.reduce().pivots.len()
    }

    fn reduce(&self) -> Reduction {
        let mut red = Reduction::new(self.ncols());
        for (j, c) in self.cols.iter().enumerate() {
            red.insert(c.clone(), j);
        }
        red
    }

    /// Some `x` with `A x = b`, as a bitset over columns.
    pub fn solve(&self, b: &FixedBitSet) -> Option<FixedBitSet> {
        let red = self.reduce();
        red.express(b.clone())
    }

    /// Basis of the null space.
    pub fn kernel_basis(&self) -> Vec<FixedBitSet> {
        self.reduce().kernel
    }

    /// Vectors of `candidates` that are independent modulo the column space,
    /// chosen greedily in order.
    pub fn independent_modulo_image(&self, candidates: &[FixedBitSet]) -> Vec<usize> {
        let mut red = self.reduce();
        let mut picked = Vec::new();
        for (i, c) in candidates.iter().enumerate() {
            if red.insert(c.clone(), usize::MAX) {
                picked.push(i);
            }
        }
        picked
    }
}

/// Incremental column echelon form keyed by lowest set row.
struct Reduction {
    ncols: usize,
    pivots: HashMap<usize, (FixedBitSet, FixedBitSet)>,
    kernel: Vec<FixedBitSet>,
}

impl Reduction {
    fn new(ncols: usize) -> Self {
        Reduction {
            ncols,
            pivots: HashMap::new(),
            kernel: Vec::new(),
        }
    }

    /// Inserts column `v` (original index `j`, or `usize::MAX` for an
    /// untracked vector). Returns `true` when it is independent.
    fn insert(&mut self, mut v: FixedBitSet, j: usize) -> bool {
        let mut comb = FixedBitSet::with_capacity(self.ncols);
        if j != usize::MAX {
            comb.insert(j);
        }
        while let Some(low) = v.minimum() {
            match self.pivots.get(&low) {
                Some((pv, pc)) => {
                    v.symmetric_difference_with(pv);
                    comb.symmetric_difference_with(pc);
                }
                None => {
                    self.pivots.insert(low, (v, comb));
                    return true;
                }
            }
        }
        if j != usize::MAX {
            self.kernel.push(comb);
        }
        false
    }

    fn express(&self, mut v: FixedBitSet) -> Option<FixedBitSet> {
        let mut comb = FixedBitSet::with_capacity(self.ncols);
        while let Some(low) = v.minimum() {
            let (pv, pc) = self.pivots.get(&low)?;
            v.symmetric_difference_with(pv);
            comb.symmetric_difference_with(pc);
        }
        Some(comb)
    }
}

pub fn bitset_from(len: usize, ones: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(len);
    for i in ones {
        b.toggle(i);
    }
    b
}
