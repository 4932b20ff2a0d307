//! Z/2 persistence of decreasing hard-sphere filtrations and fixed-scale
//! (co)homology ranks over Z/2 and Z.
//!
//! Reduction runs in the increasing parameter `u = -sep/2`; intervals are
//! reported back in radius coordinates. A class with interval
//! `(birth_r, death_r)` is alive in the snapshot at every `r` with
//! `death_r <= r < birth_r`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::complex::{faces, FilteredComplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::linalg::smith::elementary_divisors;
use crate::linalg::z2::Z2Matrix;
use crate::linalg::SparseIntMatrix;
use crate::metric::Tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Ring {
    Z2,
    Z,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub dim: usize,
    pub birth_r: f64,
    /// 0 for essential classes.
    pub death_r: f64,
    pub essential: bool,
}

impl Interval {
    pub fn contains(&self, r: f64, tol: Tolerance) -> bool {
        tol.gt(self.birth_r, r) && (self.essential || !tol.gt(self.death_r, r))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "birth_r": crate::export::json_number(self.birth_r),
            "death_r": crate::export::json_number(self.death_r),
            "essential": self.essential,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Barcode {
    pub intervals: Vec<Interval>,
}

impl Barcode {
    pub fn in_dim(&self, q: usize) -> impl Iterator<Item = &Interval> {
        self.intervals.iter().filter(move |i| i.dim == q)
    }

    /// Number of intervals of dimension `q` alive at radius `r`.
    pub fn count_at(&self, q: usize, r: f64, tol: Tolerance) -> usize {
        self.in_dim(q).filter(|i| i.contains(r, tol)).count()
    }

    pub fn essential_count(&self, q: usize) -> usize {
        self.in_dim(q).filter(|i| i.essential).count()
    }
}

/// Standard column reduction over Z/2 along the entrance order.
pub fn compute_persistence(k: &FilteredComplex, max_dim: usize) -> Result<Barcode> {
    let order = k.entrance_order();
    let simplices = k.simplices();
    let mut pos = std::collections::HashMap::with_capacity(order.len());
    for (p, &i) in order.iter().enumerate() {
        pos.insert(simplices[i].verts.as_slice(), p);
    }
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(order.len());
    for (p, &i) in order.iter().enumerate() {
        let s = &simplices[i];
        if s.dim() > max_dim + 1 || s.dim() == 0 {
            columns.push(Vec::new());
            continue;
        }
        let mut col = Vec::with_capacity(s.verts.len());
        for f in faces(&s.verts) {
            let fp = *pos
                .get(f.as_slice())
                .ok_or_else(|| Error::InvalidArgument(format!("face {f:?} missing")))?;
            if fp > p {
                return Err(Error::NonMonotoneFiltration {
                    face: f,
                    coface: s.verts.clone(),
                });
            }
            col.push(fp);
        }
        col.sort_unstable();
        columns.push(col);
    }

    // low[row] = column whose reduced pivot is `row`
    let mut low_owner: Vec<Option<usize>> = vec![None; order.len()];
    let mut paired = vec![false; order.len()];
    let mut intervals = Vec::new();
    for j in 0..columns.len() {
        let mut col = std::mem::take(&mut columns[j]);
        while let Some(&low) = col.last() {
            match low_owner[low] {
                Some(other) => col = symmetric_difference(&col, &columns[other]),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            low_owner[low] = Some(j);
            paired[low] = true;
            paired[j] = true;
            let birth = &simplices[order[low]];
            let death = &simplices[order[j]];
            if birth.dim() <= max_dim && birth.sep != death.sep {
                intervals.push(Interval {
                    dim: birth.dim(),
                    birth_r: birth.filtration_value(),
                    death_r: death.filtration_value(),
                    essential: false,
                });
            }
        }
        columns[j] = col;
    }
    for (p, &i) in order.iter().enumerate() {
        let s = &simplices[i];
        if !paired[p] && s.dim() <= max_dim {
            intervals.push(Interval {
                dim: s.dim(),
                birth_r: s.filtration_value(),
                death_r: 0.0,
                essential: true,
            });
        }
    }
    intervals.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(b.birth_r.total_cmp(&a.birth_r))
            .then(b.death_r.total_cmp(&a.death_r))
    });
    Ok(Barcode { intervals })
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Rank and torsion of `H^q` of one snapshot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologySummary {
    pub degree: usize,
    pub ring: Ring,
    pub betti: usize,
    /// Orders of the cyclic torsion summands (`Z` only).
    pub torsion: Vec<i64>,
}

/// Integral coboundary `δ^q` as a column-sparse matrix with rows indexed by
/// (q+1)-simplices and columns by q-simplices.
pub fn coboundary_matrix(k: &SimplicialComplex, q: usize) -> SparseIntMatrix {
    let rows = k.coboundary_rows(q);
    let mut cols = vec![Vec::new(); k.count(q)];
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            cols[j].push((i, v));
        }
    }
    SparseIntMatrix::from_columns(k.count(q + 1), cols)
}

fn z2_coboundary(k: &SimplicialComplex, q: usize) -> Z2Matrix {
    let rows: Vec<Vec<usize>> = k
        .coboundary_rows(q)
        .into_iter()
        .map(|r| r.into_iter().map(|(j, _)| j).collect())
        .collect();
    Z2Matrix::from_sparse_rows(k.count(q), &rows)
}

/// Cohomology of a fixed simplicial complex in degree `q`.
pub fn cohomology(k: &SimplicialComplex, q: usize, ring: Ring) -> Result<CohomologySummary> {
    let n_q = k.count(q);
    match ring {
        Ring::Z2 => {
            let up = z2_coboundary(k, q).rank();
            let down = if q == 0 {
                0
            } else {
                z2_coboundary(k, q - 1).rank()
            };
            Ok(CohomologySummary {
                degree: q,
                ring,
                betti: n_q - up - down,
                torsion: Vec::new(),
            })
        }
        Ring::Z => {
            let up = elementary_divisors(&coboundary_matrix(k, q))?.len();
            let down = if q == 0 {
                Vec::new()
            } else {
                elementary_divisors(&coboundary_matrix(k, q - 1))?
            };
            Ok(CohomologySummary {
                degree: q,
                ring,
                betti: n_q - up - down.len(),
                torsion: down.into_iter().filter(|&d| d > 1).collect(),
            })
        }
    }
}

/// Cohomology of the snapshot of `k` at radius `r`.
pub fn betti_at(
    k: &FilteredComplex,
    r: f64,
    q: usize,
    ring: Ring,
    tol: Tolerance,
) -> Result<CohomologySummary> {
    if r < 0.0 {
        return Err(Error::InvalidArgument(format!("negative radius {r}")));
    }
    cohomology(&k.snapshot(r, tol), q, ring)
}

pub fn barcode_json(b: &Barcode) -> Value {
    Value::Array(b.intervals.iter().map(Interval::to_json).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{FilteredSimplex, ParameterSemantics};
    use crate::config::{build_independence_filtration, DEFAULT_BUDGET};
    use crate::metric::{shortest_path_metric, FiniteMetricSpace, WeightedGraph};

    fn rp2() -> Vec<Vec<usize>> {
        vec![
            vec![0, 1, 2],
            vec![0, 2, 3],
            vec![0, 3, 4],
            vec![0, 4, 5],
            vec![0, 1, 5],
            vec![1, 2, 4],
            vec![2, 3, 5],
            vec![1, 3, 4],
            vec![2, 4, 5],
            vec![1, 3, 5],
        ]
    }

    #[test]
    fn c6_complement_connected() {
        let x = shortest_path_metric(&WeightedGraph::cycle(6, 1.0).unwrap());
        let k = build_independence_filtration(&x, 2, DEFAULT_BUDGET).unwrap();
        let b = compute_persistence(&k, 0).unwrap();
        assert_eq!(b.essential_count(0), 1);
    }

    #[test]
    fn one_point() {
        let x = FiniteMetricSpace::new(vec!["p".into()], vec![vec![0.0]]).unwrap();
        let k = build_independence_filtration(&x, 3, DEFAULT_BUDGET).unwrap();
        let b = compute_persistence(&k, 2).unwrap();
        assert_eq!(b.intervals.len(), 1);
        assert!(b.intervals[0].essential && b.intervals[0].birth_r.is_infinite());
    }

    #[test]
    fn equilateral_triple() {
        let d = vec![
            vec![0.0, 2.0, 2.0],
            vec![2.0, 0.0, 2.0],
            vec![2.0, 2.0, 0.0],
        ];
        let x = FiniteMetricSpace::new(vec!["a".into(), "b".into(), "c".into()], d).unwrap();
        let k = build_independence_filtration(&x, 3, DEFAULT_BUDGET).unwrap();
        let b = compute_persistence(&k, 1).unwrap();
        let tol = Tolerance::default();
        assert_eq!(b.count_at(1, 0.5, tol), 0);
        assert_eq!(b.count_at(0, 0.5, tol), 1);
        assert_eq!(b.count_at(0, 1.0, tol), 3);
        assert_eq!(b.count_at(0, 7.0, tol), 3);
        assert_eq!(b.in_dim(1).count(), 0);
    }

    #[test]
    fn rp2_cohomology() {
        let k = SimplicialComplex::from_simplices(rp2());
        let h1 = cohomology(&k, 1, Ring::Z2).unwrap();
        assert_eq!(h1.betti, 1);
        let h2 = cohomology(&k, 2, Ring::Z).unwrap();
        assert_eq!((h2.betti, h2.torsion.clone()), (0, vec![2]));
        let h1z = cohomology(&k, 1, Ring::Z).unwrap();
        assert_eq!((h1z.betti, h1z.torsion), (0, vec![]));
    }

    #[test]
    fn empty_at_large_radius() {
        let x = shortest_path_metric(&WeightedGraph::cycle(5, 1.0).unwrap());
        let k = build_independence_filtration(&x, 2, DEFAULT_BUDGET).unwrap();
        let s = betti_at(&k, 100.0, 0, Ring::Z2, Tolerance::default()).unwrap();
        assert_eq!(s.betti, 5);
        let s1 = betti_at(&k, 0.5, 1, Ring::Z2, Tolerance::default()).unwrap();
        let s0 = betti_at(&k, 0.5, 0, Ring::Z2, Tolerance::default()).unwrap();
        assert_eq!((s0.betti, s1.betti), (1, 1));
    }

    #[test]
    fn ties_enter_faces_first() {
        let s = vec![
            FilteredSimplex {
                verts: vec![0],
                sep: 2.0,
            },
            FilteredSimplex {
                verts: vec![1],
                sep: 2.0,
            },
            FilteredSimplex {
                verts: vec![0, 1],
                sep: 2.0,
            },
        ];
        let k = FilteredComplex::new(s, 1, ParameterSemantics::HardSphere).unwrap();
        let b = compute_persistence(&k, 1).unwrap();
        assert_eq!(b.intervals.len(), 1);
        assert_eq!(b.intervals[0].birth_r, 1.0);
    }
}
