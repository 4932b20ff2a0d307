//! Exhaustive verification of (k,r)-regular maps `f: X -> F^N`.

use std::io::Read;

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{binomial, subsets_up_to};
use crate::config::separation;
use crate::error::{Error, Result};
use crate::metric::{metric_inheritance_check, FiniteMetricSpace, Inheritance, Tolerance};

pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

/// `f: X -> F^N`, one row of values per point of the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledMap {
    pub domain: FiniteMetricSpace,
    pub values: Values,
}

impl SampledMap {
    pub fn real(domain: FiniteMetricSpace, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = check_rows(&domain, &rows)?;
        let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
        Ok(SampledMap {
            domain,
            values: Values::Real(m),
        })
    }

    pub fn complex(domain: FiniteMetricSpace, rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = check_rows(&domain, &rows)?;
        let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
        Ok(SampledMap {
            domain,
            values: Values::Complex(m),
        })
    }

    /// Reads rows `id, v_1, .., v_N` (complex: `re_1, im_1, ..`). Rows may
    /// come in any order; they are matched to the domain by id.
    pub fn from_csv<R: Read>(domain: FiniteMetricSpace, field: Field, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut rows: Vec<Option<Vec<f64>>> = vec![None; domain.len()];
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let Some(id) = rec.get(0) else { continue };
            let parsed: std::result::Result<Vec<f64>, _> =
                rec.iter().skip(1).map(str::parse::<f64>).collect();
            let coords = match parsed {
                Ok(c) => c,
                Err(_) if line == 0 => continue,
                Err(e) => return Err(Error::Parse(format!("map row {id:?}: {e}"))),
            };
            let i = domain
                .index_of(id)
                .ok_or(Error::UnknownPoint(id.to_string()))?;
            if rows[i].replace(coords).is_some() {
                return Err(Error::Parse(format!("duplicate map row for {id:?}")));
            }
        }
        let rows: Vec<Vec<f64>> = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.ok_or_else(|| Error::Parse(format!("no map row for {:?}", domain.id(i))))
            })
            .collect::<Result<_>>()?;
        match field {
            Field::Real => Self::real(domain, rows),
            Field::Complex => {
                if rows.iter().any(|r| r.len() % 2 != 0) {
                    return Err(Error::Parse(
                        "complex rows need interleaved re/im pairs".into(),
                    ));
                }
                let rows = rows
                    .into_iter()
                    .map(|r| r.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect())
                    .collect();
                Self::complex(domain, rows)
            }
        }
    }

    pub fn field(&self) -> Field {
        match self.values {
            Values::Real(_) => Field::Real,
            Values::Complex(_) => Field::Complex,
        }
    }

    /// Target dimension `N`.
    pub fn dimension(&self) -> usize {
        match &self.values {
            Values::Real(m) => m.ncols(),
            Values::Complex(m) => m.ncols(),
        }
    }

    fn select(&self, rows: &[usize]) -> Values {
        match &self.values {
            Values::Real(m) => Values::Real(m.select_rows(rows)),
            Values::Complex(m) => Values::Complex(m.select_rows(rows)),
        }
    }
}

fn check_rows<T>(domain: &FiniteMetricSpace, rows: &[Vec<T>]) -> Result<usize> {
    if rows.len() != domain.len() {
        return Err(Error::InvalidArgument(format!(
            "{} value rows for {} points",
            rows.len(),
            domain.len()
        )));
    }
    let n = rows.first().map_or(0, Vec::len);
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument(
            "value rows must share a length N >= 1".into(),
        ));
    }
    Ok(n)
}

/// `f(x) = (1, t, t², .., t^{N-1})` with one parameter `t` per point.
pub fn moment_curve(domain: FiniteMetricSpace, params: &[f64], n: usize) -> Result<SampledMap> {
    let rows = params
        .iter()
        .map(|&t| (0..n).map(|j| t.powi(j as i32)).collect())
        .collect();
    SampledMap::real(domain, rows)
}

/// `f(θ) = (1, cos θ, sin θ, .., cos dθ, sin dθ)` in dimension `2d + 1`.
pub fn trigonometric_moment_curve(
    domain: FiniteMetricSpace,
    angles: &[f64],
    degree: usize,
) -> Result<SampledMap> {
    let rows = angles
        .iter()
        .map(|&a| {
            let mut row = vec![1.0];
            for j in 1..=degree {
                let (s, c) = (j as f64 * a).sin_cos();
                row.extend([c, s]);
            }
            row
        })
        .collect();
    SampledMap::real(domain, rows)
}

/// Numerical rank: singular values above `tol` times the largest.
pub fn numerical_rank(values: &Values, tol: f64) -> usize {
    let sv = match values {
        Values::Real(m) if m.nrows() > 0 && m.ncols() > 0 => m.clone().singular_values(),
        Values::Complex(m) if m.nrows() > 0 && m.ncols() > 0 => m.clone().singular_values(),
        _ => return 0,
    };
    let max = sv.max();
    if max <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub subset: Vec<String>,
    #[serde(serialize_with = "crate::export::ser_number")]
    pub separation: f64,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityVerdict {
    pub passed: bool,
    pub k: usize,
    pub r: f64,
    pub tolerance: f64,
    pub subsets_checked: u128,
    pub witness: Option<Witness>,
}

#[derive(Clone, Copy)]
enum Check {
    Linear,
    Affine,
}

fn check_rank(f: &SampledMap, subset: &[usize], check: Check, tol: f64) -> (usize, usize) {
    match check {
        Check::Linear => (numerical_rank(&f.select(subset), tol), subset.len()),
        Check::Affine => {
            let diffs = match f.select(subset) {
                Values::Real(m) => {
                    let base = m.row(0).clone_owned();
                    let rows: Vec<_> = (1..m.nrows()).map(|i| m.row(i) - &base).collect();
                    Values::Real(if rows.is_empty() {
                        DMatrix::zeros(0, m.ncols())
                    } else {
                        DMatrix::from_rows(&rows)
                    })
                }
                Values::Complex(m) => {
                    let base = m.row(0).clone_owned();
                    let rows: Vec<_> = (1..m.nrows()).map(|i| m.row(i) - &base).collect();
                    Values::Complex(if rows.is_empty() {
                        DMatrix::zeros(0, m.ncols())
                    } else {
                        DMatrix::from_rows(&rows)
                    })
                }
            };
            (numerical_rank(&diffs, tol), subset.len() - 1)
        }
    }
}

const CHUNK: usize = 4096;

/// First admissible k-subset (lexicographic order) whose rank falls short.
fn exhaustive(
    f: &SampledMap,
    k: usize,
    r: f64,
    tol: f64,
    budget: u64,
    check: Check,
) -> Result<RegularityVerdict> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::ToleranceInvalid(tol));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let x = &f.domain;
    let needed = binomial(x.len(), k);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let cmp = Tolerance::default();
    let mut checked = 0u128;
    for chunk in &(0..x.len()).combinations(k).chunks(CHUNK) {
        let chunk: Vec<Vec<usize>> = chunk.collect();
        let hit = chunk.par_iter().find_map_first(|s| {
            let sep = separation(s, x);
            if k > 1 && !cmp.gt(sep, 2.0 * r) {
                return None;
            }
            let (rank, want) = check_rank(f, s, check, tol);
            (rank < want).then(|| Witness {
                subset: s.iter().map(|&i| x.id(i).to_string()).collect(),
                separation: sep,
                rank,
            })
        });
        checked += chunk.len() as u128;
        if let Some(w) = hit {
            return Ok(RegularityVerdict {
                passed: false,
                k,
                r,
                tolerance: tol,
                subsets_checked: checked,
                witness: Some(w),
            });
        }
    }
    Ok(RegularityVerdict {
        passed: true,
        k,
        r,
        tolerance: tol,
        subsets_checked: checked,
        witness: None,
    })
}

/// Every k-subset with pairwise distances `> 2r` maps to `k` linearly
/// independent vectors.
pub fn is_kr_regular(
    f: &SampledMap,
    k: usize,
    r: f64,
    tol: f64,
    budget: u64,
) -> Result<RegularityVerdict> {
    exhaustive(f, k, r, tol, budget, Check::Linear)
}

/// Every k-subset with pairwise distances `> 2r` maps to affinely
/// independent points.
pub fn is_affine_kr_regular(
    f: &SampledMap,
    k: usize,
    r: f64,
    tol: f64,
    budget: u64,
) -> Result<RegularityVerdict> {
    if f.field() != Field::Real {
        return Err(Error::InvalidArgument(
            "affine regularity needs a real map".into(),
        ));
    }
    exhaustive(f, k, r, tol, budget, Check::Affine)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexCertificate {
    pub simplex: Vec<String>,
    #[serde(serialize_with = "crate::export::ser_number")]
    pub separation: f64,
    pub affine_rank: usize,
    pub independent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealizationVerdict {
    pub passed: bool,
    pub failed_at_l: Option<usize>,
    pub witness: Option<Witness>,
    pub certificates: Vec<SimplexCertificate>,
}

/// Affine (l,r)-regularity for every `l <= k`, which makes `f` realize the
/// (k-1)-skeleton of `Ind(X, r' + r)` for every `r' >= 0`, with one
/// certificate per simplex of that skeleton of `Ind(X, r)`.
pub fn realization_check(
    f: &SampledMap,
    k: usize,
    r: f64,
    tol: f64,
    budget: u64,
) -> Result<RealizationVerdict> {
    let x = &f.domain;
    let needed = subsets_up_to(x.len(), k);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut failed_at_l = None;
    let mut witness = None;
    for l in 1..=k {
        let v = is_affine_kr_regular(f, l, r, tol, budget)?;
        if !v.passed {
            failed_at_l = Some(l);
            witness = v.witness;
            break;
        }
    }
    let cmp = Tolerance::default();
    let mut certificates = Vec::new();
    for l in 1..=k.min(x.len()) {
        for s in (0..x.len()).combinations(l) {
            let sep = separation(&s, x);
            if l > 1 && !cmp.gt(sep, 2.0 * r) {
                continue;
            }
            let (rank, want) = check_rank(f, &s, Check::Affine, tol);
            certificates.push(SimplexCertificate {
                simplex: s.iter().map(|&i| x.id(i).to_string()).collect(),
                separation: sep,
                affine_rank: rank,
                independent: rank == want,
            });
        }
    }
    Ok(RealizationVerdict {
        passed: failed_at_l.is_none(),
        failed_at_l,
        witness,
        certificates,
    })
}

/// Restriction of `f` to a subset whose intrinsic metric must agree with
/// the ambient one.
pub fn restrict_map<S: AsRef<str>>(
    f: &SampledMap,
    subset: &[S],
    intrinsic: &FiniteMetricSpace,
    tol: Tolerance,
) -> Result<SampledMap> {
    let mut idx = f.domain.indices_of(subset)?;
    idx.sort_unstable();
    idx.dedup();
    if let Inheritance::Violated { pair, .. } =
        metric_inheritance_check(&f.domain, &idx, intrinsic, tol)?
    {
        return Err(Error::NotInherited(pair.0, pair.1));
    }
    Ok(SampledMap {
        domain: intrinsic.clone(),
        values: f.select(&idx),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeResult {
    /// Always false: a probe samples subsets and proves nothing.
    pub certifying: bool,
    pub samples: usize,
    pub failure: Option<Witness>,
}

/// Random k-subsets instead of all of them. Not a certificate.
pub fn probe_kr_regular(
    f: &SampledMap,
    k: usize,
    r: f64,
    tol: f64,
    samples: usize,
    seed: u64,
) -> Result<ProbeResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::ToleranceInvalid(tol));
    }
    let x = &f.domain;
    if k == 0 || k > x.len() {
        return Err(Error::KTooLarge { k, n: x.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cmp = Tolerance::default();
    for _ in 0..samples {
        let mut s = sample(&mut rng, x.len(), k).into_vec();
        s.sort_unstable();
        let sep = separation(&s, x);
        if k > 1 && !cmp.gt(sep, 2.0 * r) {
            continue;
        }
        let (rank, want) = check_rank(f, &s, Check::Linear, tol);
        if rank < want {
            return Ok(ProbeResult {
                certifying: false,
                samples,
                failure: Some(Witness {
                    subset: s.iter().map(|&i| x.id(i).to_string()).collect(),
                    separation: sep,
                    rank,
                }),
            });
        }
    }
    Ok(ProbeResult {
        certifying: false,
        samples,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{sample_circle, shortest_path_metric, WeightedGraph};

    const B: u64 = 1_000_000;

    fn line(ts: &[f64]) -> FiniteMetricSpace {
        let ids = (0..ts.len()).map(|i| format!("p{i}")).collect();
        let d = ts
            .iter()
            .map(|a| ts.iter().map(|b| (a - b).abs()).collect())
            .collect();
        FiniteMetricSpace::new(ids, d).unwrap()
    }

    #[test]
    fn vandermonde_passes() {
        let f = moment_curve(line(&[1.0, 2.0, 3.0]), &[1.0, 2.0, 3.0], 3).unwrap();
        assert!(
            is_kr_regular(&f, 3, 0.0, DEFAULT_RANK_TOL, B)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn three_vectors_in_plane_fail() {
        let f = moment_curve(line(&[1.0, 2.0, 3.0]), &[1.0, 2.0, 3.0], 2).unwrap();
        let v = is_kr_regular(&f, 3, 0.0, DEFAULT_RANK_TOL, B).unwrap();
        assert!(!v.passed);
        assert_eq!(v.witness.unwrap().rank, 2);
    }

    #[test]
    fn antipodal_identity_fails() {
        let x = sample_circle(2, 2.0).unwrap();
        let f = SampledMap::real(x, vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        let v = is_kr_regular(&f, 2, 0.1, DEFAULT_RANK_TOL, B).unwrap();
        assert!(!v.passed);
        assert_eq!(v.witness.unwrap().subset, vec!["0", "1"]);
    }

    #[test]
    fn affine_planar() {
        let x = line(&[0.0, 1.0, 2.0]);
        let tri = SampledMap::real(
            x.clone(),
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        assert!(
            is_affine_kr_regular(&tri, 3, 0.0, DEFAULT_RANK_TOL, B)
                .unwrap()
                .passed
        );
        let col =
            SampledMap::real(x, vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert!(
            !is_affine_kr_regular(&col, 3, 0.0, DEFAULT_RANK_TOL, B)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn realization_of_moment_curve() {
        let ts = [0.0, 1.0, 2.0, 3.0, 4.0];
        let f = moment_curve(line(&ts), &ts, 3).unwrap();
        let v = realization_check(&f, 3, 0.0, DEFAULT_RANK_TOL, B).unwrap();
        assert!(v.passed);
        assert_eq!(v.certificates.len(), 5 + 10 + 10);
        assert!(v.certificates.iter().all(|c| c.independent));
    }

    #[test]
    fn constant_map_fails_at_two() {
        let x = line(&[0.0, 1.0, 2.0]);
        let f = SampledMap::real(x, vec![vec![1.0]; 3]).unwrap();
        let v = realization_check(&f, 3, 0.0, DEFAULT_RANK_TOL, B).unwrap();
        assert_eq!(v.failed_at_l, Some(2));
    }

    #[test]
    fn complex_values() {
        let x = line(&[0.0, 1.0]);
        let i = Complex64::new(0.0, 1.0);
        let dep = SampledMap::complex(x.clone(), vec![vec![1.0.into()], vec![i]]).unwrap();
        assert!(
            !is_kr_regular(&dep, 2, 0.0, DEFAULT_RANK_TOL, B)
                .unwrap()
                .passed
        );
        let ind = SampledMap::complex(x, vec![vec![1.0.into(), i], vec![i, 1.0.into()]]).unwrap();
        assert!(
            is_kr_regular(&ind, 2, 0.0, DEFAULT_RANK_TOL, B)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn restriction() {
        let ts = [0.0, 1.0, 2.0, 3.0, 4.0];
        let f = moment_curve(line(&ts), &ts, 3).unwrap();
        let keep = ["p0", "p2", "p4"];
        let intrinsic = f.domain.subspace(&f.domain.indices_of(&keep).unwrap());
        let g = restrict_map(&f, &keep, &intrinsic, Tolerance::default()).unwrap();
        assert!(
            is_kr_regular(&g, 3, 0.0, DEFAULT_RANK_TOL, B)
                .unwrap()
                .passed
        );
        let all = restrict_map(&f, f.domain.ids(), &f.domain, Tolerance::default()).unwrap();
        assert_eq!(all, f);
    }

    #[test]
    fn restriction_not_inherited() {
        let g = WeightedGraph::cycle(4, 1.0).unwrap();
        let x = shortest_path_metric(&g);
        let f = SampledMap::real(x.clone(), vec![vec![1.0]; 4]).unwrap();
        let keep: Vec<String> = vec![x.id(0).into(), x.id(1).into(), x.id(2).into()];
        let intrinsic = shortest_path_metric(&g.induced(&keep[..]).unwrap());
        assert!(restrict_map(&f, &keep, &intrinsic, Tolerance::default()).is_ok());
        let keep = vec![x.id(0).to_string(), x.id(2).to_string()];
        let intrinsic = shortest_path_metric(&g.induced(&keep[..]).unwrap());
        assert!(matches!(
            restrict_map(&f, &keep, &intrinsic, Tolerance::default()),
            Err(Error::NotInherited(..))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let x = line(&[0.0, 1.0]);
        let csv = "id,x,y\np1,3,4\np0,1,2\n";
        let f = SampledMap::from_csv(x.clone(), Field::Real, csv.as_bytes()).unwrap();
        assert_eq!(
            f.values,
            Values::Real(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]))
        );
        let c = SampledMap::from_csv(x, Field::Complex, "p0,1,0\np1,0,1\n".as_bytes()).unwrap();
        assert_eq!(c.dimension(), 1);
    }

    #[test]
    fn probe_is_not_a_certificate() {
        let f = moment_curve(line(&[1.0, 2.0, 3.0]), &[1.0, 2.0, 3.0], 2).unwrap();
        let p = probe_kr_regular(&f, 3, 0.0, DEFAULT_RANK_TOL, 4, 7).unwrap();
        assert!(!p.certifying);
        assert!(p.failure.is_some());
    }
}
