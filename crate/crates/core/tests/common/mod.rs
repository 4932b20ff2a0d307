#![allow(dead_code)]

use std::collections::HashMap;

use confpersist::complex::{FilteredComplex, SimplicialComplex};
use confpersist::config::{build_independence_filtration, DEFAULT_BUDGET};
use confpersist::covering::{build_config_rips, RipsParams};
use confpersist::metric::{sample_circle, shortest_path_metric, FiniteMetricSpace, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RP2: [[usize; 3]; 10] = [
    [0, 1, 2],
    [0, 2, 3],
    [0, 3, 4],
    [0, 4, 5],
    [0, 1, 5],
    [1, 2, 4],
    [2, 3, 5],
    [1, 3, 4],
    [2, 4, 5],
    [1, 3, 5],
];

pub fn cycle(n: usize) -> FiniteMetricSpace {
    shortest_path_metric(&WeightedGraph::cycle(n, 1.0).unwrap())
}

/// Random graph on `n` vertices with weights in `1..=max_w`; may be
/// disconnected.
pub fn random_graph(seed: u64, n: usize, max_w: u32, p: f64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i:02}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                let w = rng.random_range(1..=max_w) as f64;
                edges.push((vertices[i].clone(), vertices[j].clone(), w));
            }
        }
    }
    WeightedGraph::new(vertices, edges).unwrap()
}

pub fn rp2_complex() -> SimplicialComplex {
    SimplicialComplex::from_simplices(RP2.iter().map(|t| t.to_vec()))
}

/// Filtered fixture complexes used by the oracle comparisons.
pub fn fixture_complexes() -> Vec<(String, FilteredComplex)> {
    let mut out = Vec::new();
    for n in [5, 6, 7, 12] {
        out.push((
            format!("Ind(C{n}) k_max=3"),
            build_independence_filtration(&cycle(n), 3, DEFAULT_BUDGET).unwrap(),
        ));
    }
    let tri = FiniteMetricSpace::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![
            vec![0.0, 2.0, 2.0],
            vec![2.0, 0.0, 2.0],
            vec![2.0, 2.0, 0.0],
        ],
    )
    .unwrap();
    out.push((
        "equilateral".into(),
        build_independence_filtration(&tri, 3, DEFAULT_BUDGET).unwrap(),
    ));
    let one = FiniteMetricSpace::new(vec!["p".into()], vec![vec![0.0]]).unwrap();
    out.push((
        "point".into(),
        build_independence_filtration(&one, 2, DEFAULT_BUDGET).unwrap(),
    ));
    out.push((
        "circle 10".into(),
        build_independence_filtration(&sample_circle(10, 10.0).unwrap(), 3, DEFAULT_BUDGET)
            .unwrap(),
    ));
    for seed in 0..6 {
        let g = random_graph(seed, 7 + seed as usize, 4, 0.35);
        out.push((
            format!("random graph {seed}"),
            build_independence_filtration(&shortest_path_metric(&g), 3, DEFAULT_BUDGET).unwrap(),
        ));
    }
    let rp2: Vec<Vec<usize>> = RP2.iter().map(|t| t.to_vec()).collect();
    out.push(("RP2".into(), FilteredComplex::constant(&rp2, 1.0).unwrap()));
    let (model, _) = build_config_rips(
        &sample_circle(12, 12.0).unwrap(),
        2,
        1.0,
        &[1.0, 1.5, 2.0],
        RipsParams::default(),
    )
    .unwrap();
    out.push(("config-Rips circle 12".into(), model.complex));
    out.retain(|(_, k)| k.len() <= 500);
    out
}

/// Dense rank over Z/2 by plain Gaussian elimination.
pub fn rank_z2(mut rows: Vec<Vec<u8>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && rows[i][c] == 1 {
                for j in 0..ncols {
                    rows[i][j] ^= rows[rank][j];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Boundary matrix `C_q -> C_{q-1}` over Z/2, rows indexed by (q-1)-simplices.
pub fn dense_boundary(lower: &[Vec<usize>], upper: &[Vec<usize>]) -> Vec<Vec<u8>> {
    let index: HashMap<&[usize], usize> = lower
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let mut m = vec![vec![0u8; upper.len()]; lower.len()];
    for (j, s) in upper.iter().enumerate() {
        for drop in 0..s.len() {
            let f: Vec<usize> = s
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != drop)
                .map(|(_, &v)| v)
                .collect();
            m[index[f.as_slice()]][j] ^= 1;
        }
    }
    m
}

/// Betti numbers over Z/2 in degrees `0..=max_q` of an explicit simplex list.
pub fn betti_z2(simplices: &[Vec<usize>], max_q: usize) -> Vec<usize> {
    let by_dim: Vec<Vec<Vec<usize>>> = (0..=max_q + 1)
        .map(|q| {
            let mut v: Vec<Vec<usize>> = simplices
                .iter()
                .filter(|s| s.len() == q + 1)
                .cloned()
                .collect();
            v.sort();
            v
        })
        .collect();
    let rank_d = |q: usize| -> usize {
        if q == 0 || by_dim[q].is_empty() || by_dim[q - 1].is_empty() {
            0
        } else {
            rank_z2(dense_boundary(&by_dim[q - 1], &by_dim[q]))
        }
    };
    (0..=max_q)
        .map(|q| by_dim[q].len() - rank_d(q) - rank_d(q + 1))
        .collect()
}

/// Whether `z` (dense over the q-simplices) lies in the image of
/// `δ: C^{q-1} -> C^q`, by comparing ranks of `[δ]` and `[δ | z]`.
pub fn in_coboundary_image_z2(lower: &[Vec<usize>], upper: &[Vec<usize>], z: &[u8]) -> bool {
    if z.iter().all(|&v| v == 0) {
        return true;
    }
    if lower.is_empty() {
        return false;
    }
    // δ is the transpose of ∂: rows = q-simplices, columns = (q-1)-simplices
    let d = dense_boundary(lower, upper);
    let delta: Vec<Vec<u8>> = (0..upper.len())
        .map(|i| (0..lower.len()).map(|j| d[j][i]).collect())
        .collect();
    let augmented: Vec<Vec<u8>> = delta
        .iter()
        .zip(z)
        .map(|(row, &v)| {
            let mut r = row.clone();
            r.push(v);
            r
        })
        .collect();
    rank_z2(delta) == rank_z2(augmented)
}
