//! Simplicial complexes and hard-sphere filtered complexes.
//!
//! A simplex is a strictly increasing vector of vertex indices. A
//! [`FilteredComplex`] attaches to every simplex a separation `sep`; the
//! simplex belongs to the snapshot at radius `r` exactly when `sep > 2r`, so
//! snapshots shrink as `r` grows.

use std::collections::HashMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::metric::Tolerance;
use crate::union_find::DisjointSet;

pub type Simplex = Vec<usize>;

/// Codimension-one faces of a simplex, in the order "delete vertex i".
pub fn faces(s: &[usize]) -> impl Iterator<Item = Simplex> + '_ {
    (0..s.len()).map(move |i| {
        let mut f = Vec::with_capacity(s.len() - 1);
        f.extend_from_slice(&s[..i]);
        f.extend_from_slice(&s[i + 1..]);
        f
    })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimplicialComplex {
    by_dim: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

impl SimplicialComplex {
    /// Builds the complex from a face-closed collection of simplices.
    /// Missing faces are added.
    pub fn from_simplices<I: IntoIterator<Item = Simplex>>(simplices: I) -> Self {
        let mut by_dim: Vec<Vec<Simplex>> = Vec::new();
        for mut s in simplices {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                continue;
            }
            for size in 1..=s.len() {
                if by_dim.len() < size {
                    by_dim.resize(size, Vec::new());
                }
                by_dim[size - 1].extend(s.iter().copied().combinations(size));
            }
        }
        for layer in &mut by_dim {
            layer.sort_unstable();
            layer.dedup();
        }
        Self::from_sorted_layers(by_dim)
    }

    fn from_sorted_layers(by_dim: Vec<Vec<Simplex>>) -> Self {
        let index = by_dim
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (s.clone(), i))
                    .collect()
            })
            .collect();
        SimplicialComplex { by_dim, index }
    }

    /// Top dimension, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.iter().rposition(|l| !l.is_empty())
    }

    pub fn simplices(&self, q: usize) -> &[Simplex] {
        self.by_dim.get(q).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, q: usize) -> usize {
        self.simplices(q).len()
    }

    pub fn total_count(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        if s.is_empty() {
            return None;
        }
        self.index.get(s.len() - 1)?.get(s).copied()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.index_of(s).is_some()
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.by_dim.iter().flatten().all(|s| other.contains(s))
    }

    /// Sparse Z/2 boundary: for each q-simplex the sorted indices of its
    /// (q-1)-faces.
    pub fn boundary_columns(&self, q: usize) -> Vec<Vec<usize>> {
        if q == 0 {
            return vec![Vec::new(); self.count(0)];
        }
        self.simplices(q)
            .iter()
            .map(|s| {
                let mut col: Vec<usize> = faces(s)
                    .map(|f| self.index_of(&f).expect("complex is face-closed"))
                    .collect();
                col.sort_unstable();
                col
            })
            .collect()
    }

    /// Integral coboundary `δ: C^q -> C^{q+1}` as rows indexed by
    /// (q+1)-simplices, entries `(q-simplex index, ±1)`.
    pub fn coboundary_rows(&self, q: usize) -> Vec<Vec<(usize, i64)>> {
        self.simplices(q + 1)
            .iter()
            .map(|s| {
                faces(s)
                    .enumerate()
                    .map(|(i, f)| {
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        (self.index_of(&f).expect("complex is face-closed"), sign)
                    })
                    .collect()
            })
            .collect()
    }

    pub fn connected_components(&self) -> usize {
        let verts = self.simplices(0);
        let mut ds = DisjointSet::new(verts.len());
        for e in self.simplices(1) {
            let a = self.index_of(&e[..1]).unwrap();
            let b = self.index_of(&e[1..]).unwrap();
            ds.union(a, b);
        }
        ds.components()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParameterSemantics {
    /// Simplices are configurations; present while `r < sep/2`.
    HardSphere,
    /// Vertices are configurations of a configuration-Rips model; a simplex
    /// is present while `r < min sep/2` of its vertices.
    ConfigRips,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilteredSimplex {
    pub verts: Simplex,
    pub sep: f64,
}

impl FilteredSimplex {
    pub fn dim(&self) -> usize {
        self.verts.len() - 1
    }

    /// Radius below which the simplex is present.
    pub fn filtration_value(&self) -> f64 {
        self.sep / 2.0
    }
}

#[derive(Clone, Debug)]
pub struct FilteredComplex {
    simplices: Vec<FilteredSimplex>,
    index: HashMap<Simplex, usize>,
    dim_cap: usize,
    semantics: ParameterSemantics,
}

impl FilteredComplex {
    /// Validates face-closure up to `dim_cap` and monotonicity
    /// (`sep(face) >= sep(coface)`).
    pub fn new(
        mut simplices: Vec<FilteredSimplex>,
        dim_cap: usize,
        semantics: ParameterSemantics,
    ) -> Result<Self> {
        for s in &mut simplices {
            s.verts.sort_unstable();
        }
        simplices.retain(|s| !s.verts.is_empty() && s.dim() <= dim_cap);
        simplices.sort_by(|a, b| (a.dim(), &a.verts).cmp(&(b.dim(), &b.verts)));
        simplices.dedup_by(|a, b| a.verts == b.verts);
        let index: HashMap<Simplex, usize> = simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.verts.clone(), i))
            .collect();
        for s in &simplices {
            if s.sep.is_nan() {
                return Err(Error::InvalidArgument(format!(
                    "NaN separation on {:?}",
                    s.verts
                )));
            }
            if s.verts.len() < 2 {
                continue;
            }
            for f in faces(&s.verts) {
                match index.get(&f) {
                    None => {
                        return Err(Error::InvalidArgument(format!(
                            "face {f:?} of {:?} missing",
                            s.verts
                        )))
                    }
                    Some(&fi) if simplices[fi].sep < s.sep => {
                        return Err(Error::NonMonotoneFiltration {
                            face: f,
                            coface: s.verts.clone(),
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(FilteredComplex {
            simplices,
            index,
            dim_cap,
            semantics,
        })
    }

    /// Closure of `facets`, every simplex carrying the same separation.
    pub fn constant(facets: &[Simplex], sep: f64) -> Result<Self> {
        let k = SimplicialComplex::from_simplices(facets.iter().cloned());
        let dim_cap = k.dim().unwrap_or(0);
        let simplices = (0..=dim_cap)
            .flat_map(|q| k.simplices(q).to_vec())
            .map(|verts| FilteredSimplex { verts, sep })
            .collect();
        Self::new(simplices, dim_cap, ParameterSemantics::HardSphere)
    }

    pub fn simplices(&self) -> &[FilteredSimplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    pub fn semantics(&self) -> ParameterSemantics {
        self.semantics
    }

    pub fn get(&self, verts: &[usize]) -> Option<&FilteredSimplex> {
        self.index.get(verts).map(|&i| &self.simplices[i])
    }

    pub fn count_in_dim(&self, q: usize) -> usize {
        self.simplices.iter().filter(|s| s.dim() == q).count()
    }

    /// Snapshot at radius `r`: all simplices with `sep > 2r`.
    pub fn snapshot(&self, r: f64, tol: Tolerance) -> SimplicialComplex {
        let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); self.dim_cap + 1];
        for s in &self.simplices {
            if tol.gt(s.sep, 2.0 * r) {
                by_dim[s.dim()].push(s.verts.clone());
            }
        }
        while by_dim.last().is_some_and(Vec::is_empty) {
            by_dim.pop();
        }
        SimplicialComplex::from_sorted_layers(by_dim)
    }

    /// Distinct finite filtration values `sep/2`, together with 0, ascending.
    pub fn critical_values(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = self
            .simplices
            .iter()
            .map(FilteredSimplex::filtration_value)
            .filter(|v| v.is_finite())
            .collect();
        vals.push(0.0);
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        vals
    }

    /// Indices in order of entrance as `r` decreases: larger separation
    /// first, then lower dimension, then lexicographic vertices.
    pub fn entrance_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.simplices.len()).collect();
        order.sort_by(|&a, &b| {
            let (sa, sb) = (&self.simplices[a], &self.simplices[b]);
            sb.sep
                .total_cmp(&sa.sep)
                .then(sa.dim().cmp(&sb.dim()))
                .then(sa.verts.cmp(&sb.verts))
        });
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_adds_faces() {
        let k = SimplicialComplex::from_simplices(vec![vec![2, 0, 1]]);
        assert_eq!(k.count(0), 3);
        assert_eq!(k.count(1), 3);
        assert_eq!(k.count(2), 1);
        assert_eq!(k.dim(), Some(2));
        assert_eq!(k.connected_components(), 1);
    }

    #[test]
    fn coboundary_squares_to_zero_on_tetrahedron() {
        let k = SimplicialComplex::from_simplices(vec![vec![0, 1, 2, 3]]);
        for q in 0..2 {
            let d0 = k.coboundary_rows(q);
            let d1 = k.coboundary_rows(q + 1);
            for row in &d1 {
                let mut acc = vec![0i64; k.count(q)];
                for &(mid, s1) in row {
                    for &(low, s0) in &d0[mid] {
                        acc[low] += s1 * s0;
                    }
                }
                assert!(acc.iter().all(|&x| x == 0));
            }
        }
    }

    #[test]
    fn non_monotone_rejected() {
        let simplices = vec![
            FilteredSimplex {
                verts: vec![0],
                sep: f64::INFINITY,
            },
            FilteredSimplex {
                verts: vec![1],
                sep: 1.0,
            },
            FilteredSimplex {
                verts: vec![0, 1],
                sep: 2.0,
            },
        ];
        let r = FilteredComplex::new(simplices, 1, ParameterSemantics::HardSphere);
        assert!(matches!(r, Err(Error::NonMonotoneFiltration { .. })));
    }

    #[test]
    fn snapshot_is_strict() {
        let simplices = vec![
            FilteredSimplex {
                verts: vec![0],
                sep: f64::INFINITY,
            },
            FilteredSimplex {
                verts: vec![1],
                sep: f64::INFINITY,
            },
            FilteredSimplex {
                verts: vec![0, 1],
                sep: 2.0,
            },
        ];
        let k = FilteredComplex::new(simplices, 1, ParameterSemantics::HardSphere).unwrap();
        let tol = Tolerance::default();
        assert_eq!(k.snapshot(0.99, tol).count(1), 1);
        assert_eq!(k.snapshot(1.0, tol).count(1), 0);
        assert_eq!(k.critical_values(), vec![0.0, 1.0]);
    }
}
