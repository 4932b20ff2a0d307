//! Smith normal form and exact integer solving.
//!
//! Large, very sparse systems (simplicial coboundaries) are first shrunk by
//! eliminating unit pivots; only the remaining core goes through the dense
//! Smith decomposition.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::linalg::SparseIntMatrix;

/// `u * a * v = s` with `s` diagonal, nonnegative, each diagonal entry
/// dividing the next, and `u`, `v` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: Vec<Vec<i64>>,
    pub s: Vec<Vec<i64>>,
    pub v: Vec<Vec<i64>>,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<i64> {
        let n = self.s.len().min(self.s.first().map_or(0, Vec::len));
        (0..n).map(|i| self.s[i][i]).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|&&d| d != 0).count()
    }
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

fn checked_axpy(dst: &mut [i64], src: &[i64], f: i64) -> Result<()> {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = s
            .checked_mul(f)
            .and_then(|p| d.checked_sub(p))
            .ok_or(Error::Overflow)?;
    }
    Ok(())
}

/// row_i -= f * row_k, mirrored on the row transform `u`.
fn row_op(a: &mut [Vec<i64>], u: &mut [Vec<i64>], i: usize, k: usize, f: i64) -> Result<()> {
    let src = a[k].clone();
    checked_axpy(&mut a[i], &src, f)?;
    let src = u[k].clone();
    checked_axpy(&mut u[i], &src, f)
}

/// col_j -= f * col_k, mirrored on the column transform `v`.
fn col_op(a: &mut [Vec<i64>], v: &mut [Vec<i64>], j: usize, k: usize, f: i64) -> Result<()> {
    for row in a.iter_mut().chain(v.iter_mut()) {
        row[j] = row[k]
            .checked_mul(f)
            .and_then(|p| row[j].checked_sub(p))
            .ok_or(Error::Overflow)?;
    }
    Ok(())
}

fn swap_cols(a: &mut [Vec<i64>], j: usize, k: usize) {
    for row in a {
        row.swap(j, k);
    }
}

/// Dense Smith normal form with transforms.
pub fn smith_decomposition(a: &[Vec<i64>]) -> Result<SmithDecomposition> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut s: Vec<Vec<i64>> = a.to_vec();
    let mut u = identity(m);
    let mut v = identity(n);
    for t in 0..m.min(n) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let Some((pi, pj)) = min_abs_entry(&s, t) else {
            break;
        };
        s.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut s, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if s[i][t] != 0 {
                    let q = s[i][t] / s[t][t];
                    row_op(&mut s, &mut u, i, t, q)?;
                    if s[i][t] != 0 {
                        s.swap(t, i);
                        u.swap(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if s[t][j] != 0 {
                    let q = s[t][j] / s[t][t];
                    col_op(&mut s, &mut v, j, t, q)?;
                    if s[t][j] != 0 {
                        swap_cols(&mut s, t, j);
                        swap_cols(&mut v, t, j);
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            let p = s[t][t];
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| s[i][j] % p != 0));
            match bad {
                Some(i) => {
                    // pull the offending row into the pivot row and repeat
                    row_op(&mut s, &mut u, t, i, -1)?;
                }
                None => break,
            }
        }
        if s[t][t] < 0 {
            for x in s[t].iter_mut().chain(u[t].iter_mut()) {
                *x = x.checked_neg().ok_or(Error::Overflow)?;
            }
        }
    }
    Ok(SmithDecomposition { u, s, v })
}

fn min_abs_entry(s: &[Vec<i64>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(u64, usize, usize)> = None;
    for (i, row) in s.iter().enumerate().skip(t) {
        for (j, &x) in row.iter().enumerate().skip(t) {
            if x != 0 && best.is_none_or(|(b, _, _)| x.unsigned_abs() < b) {
                best = Some((x.unsigned_abs(), i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Row-major sparse system with an optional right-hand side, shrunk by
/// unit-pivot elimination.
struct SparseSystem {
    rows: Vec<BTreeMap<usize, i64>>,
    col_rows: Vec<BTreeSet<usize>>,
    rhs: Vec<i64>,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
    /// (column, pivot value, pivot row entries, rhs) in elimination order.
    steps: Vec<(usize, i64, Vec<(usize, i64)>, i64)>,
}

impl SparseSystem {
    fn new(m: &SparseIntMatrix, rhs: Option<&[i64]>) -> Self {
        let mut rows = vec![BTreeMap::new(); m.nrows];
        let mut col_rows = vec![BTreeSet::new(); m.ncols];
        for (j, col) in m.cols.iter().enumerate() {
            for &(i, v) in col {
                rows[i].insert(j, v);
                col_rows[j].insert(i);
            }
        }
        SparseSystem {
            rows,
            col_rows,
            rhs: rhs.map_or_else(|| vec![0; m.nrows], <[i64]>::to_vec),
            row_alive: vec![true; m.nrows],
            col_alive: vec![true; m.ncols],
            steps: Vec::new(),
        }
    }

    fn eliminate_units(&mut self) -> Result<usize> {
        let mut pivots = 0;
        loop {
            let mut progress = false;
            for i in 0..self.rows.len() {
                if !self.row_alive[i] {
                    continue;
                }
                let choice = self.rows[i]
                    .iter()
                    .filter(|(_, v)| v.abs() == 1)
                    .min_by_key(|(&j, _)| self.col_rows[j].len())
                    .map(|(&j, &v)| (j, v));
                if let Some((j, p)) = choice {
                    self.pivot(i, j, p)?;
                    pivots += 1;
                    progress = true;
                }
            }
            if !progress {
                return Ok(pivots);
            }
        }
    }

    fn pivot(&mut self, i: usize, j: usize, p: i64) -> Result<()> {
        let pivot_row: Vec<(usize, i64)> = self.rows[i].iter().map(|(&c, &v)| (c, v)).collect();
        let pivot_rhs = self.rhs[i];
        let others: Vec<usize> = self.col_rows[j]
            .iter()
            .copied()
            .filter(|&r| r != i)
            .collect();
        for r in others {
            // p is ±1, so p^{-1} = p
            let f = self.rows[r][&j].checked_mul(p).ok_or(Error::Overflow)?;
            for &(c, v) in &pivot_row {
                let entry = self.rows[r].entry(c).or_insert(0);
                *entry = v
                    .checked_mul(f)
                    .and_then(|x| entry.checked_sub(x))
                    .ok_or(Error::Overflow)?;
                if *entry == 0 {
                    self.rows[r].remove(&c);
                    self.col_rows[c].remove(&r);
                } else {
                    self.col_rows[c].insert(r);
                }
            }
            self.rhs[r] = pivot_rhs
                .checked_mul(f)
                .and_then(|x| self.rhs[r].checked_sub(x))
                .ok_or(Error::Overflow)?;
        }
        for &(c, _) in &pivot_row {
            self.col_rows[c].remove(&i);
        }
        self.rows[i].clear();
        self.row_alive[i] = false;
        self.col_alive[j] = false;
        let rest = pivot_row.into_iter().filter(|&(c, _)| c != j).collect();
        self.steps.push((j, p, rest, pivot_rhs));
        Ok(())
    }

    /// Remaining nonempty rows and columns as a dense block.
    fn core(&self) -> (Vec<usize>, Vec<usize>, Vec<Vec<i64>>) {
        let rows: Vec<usize> = (0..self.rows.len())
            .filter(|&i| self.row_alive[i] && !self.rows[i].is_empty())
            .collect();
        let cols: Vec<usize> = (0..self.col_rows.len())
            .filter(|&j| self.col_alive[j] && !self.col_rows[j].is_empty())
            .collect();
        let col_pos: BTreeMap<usize, usize> =
            cols.iter().enumerate().map(|(p, &j)| (j, p)).collect();
        let dense = rows
            .iter()
            .map(|&i| {
                let mut row = vec![0; cols.len()];
                for (c, &v) in &self.rows[i] {
                    row[col_pos[c]] = v;
                }
                row
            })
            .collect();
        (rows, cols, dense)
    }
}

/// Nonzero elementary divisors (invariant factors) in ascending order.
pub fn elementary_divisors(m: &SparseIntMatrix) -> Result<Vec<i64>> {
    let mut sys = SparseSystem::new(m, None);
    let units = sys.eliminate_units()?;
    let (_, _, dense) = sys.core();
    let mut divisors = vec![1; units];
    if !dense.is_empty() {
        let snf = smith_decomposition(&dense)?;
        divisors.extend(snf.diagonal().into_iter().filter(|&d| d != 0));
    }
    divisors.sort_unstable();
    Ok(divisors)
}

/// An integer solution of `m x = b`, or `None` when none exists.
pub fn solve_integer(m: &SparseIntMatrix, b: &[i64]) -> Result<Option<Vec<i64>>> {
    assert_eq!(b.len(), m.nrows, "right-hand side has wrong length");
    let mut sys = SparseSystem::new(m, Some(b));
    sys.eliminate_units()?;
    for i in 0..sys.rows.len() {
        if sys.row_alive[i] && sys.rows[i].is_empty() && sys.rhs[i] != 0 {
            return Ok(None);
        }
    }
    let mut x = vec![0i64; m.ncols];
    let (rows, cols, dense) = sys.core();
    if !rows.is_empty() {
        let snf = smith_decomposition(&dense)?;
        let rb: Vec<i64> = rows.iter().map(|&i| sys.rhs[i]).collect();
        let ub = mat_vec(&snf.u, &rb)?;
        let diag = snf.diagonal();
        let mut z = vec![0i64; cols.len()];
        for (i, &val) in ub.iter().enumerate() {
            let d = diag.get(i).copied().unwrap_or(0);
            if d == 0 {
                if val != 0 {
                    return Ok(None);
                }
            } else if val % d != 0 {
                return Ok(None);
            } else {
                z[i] = val / d;
            }
        }
        let y = mat_vec(&snf.v, &z)?;
        for (p, &j) in cols.iter().enumerate() {
            x[j] = y[p];
        }
    }
    for (j, p, rest, rhs) in sys.steps.iter().rev() {
        let mut acc = *rhs;
        for &(c, v) in rest {
            acc = v
                .checked_mul(x[c])
                .and_then(|t| acc.checked_sub(t))
                .ok_or(Error::Overflow)?;
        }
        x[*j] = acc * p;
    }
    Ok(Some(x))
}

fn mat_vec(a: &[Vec<i64>], x: &[i64]) -> Result<Vec<i64>> {
    a.iter()
        .map(|row| {
            row.iter().zip(x).try_fold(0i64, |acc, (&r, &v)| {
                r.checked_mul(v)
                    .and_then(|p| acc.checked_add(p))
                    .ok_or(Error::Overflow)
            })
        })
        .collect()
}
