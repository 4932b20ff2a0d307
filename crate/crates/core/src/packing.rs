//! Hard-sphere packing: the largest radius at which `k` balls fit in `X`.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::combinatorics::binomial;
use crate::config::separation;
use crate::error::{Error, Result};
use crate::export::json_number;
use crate::metric::{FiniteMetricSpace, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PackingMode {
    Exact,
    Greedy,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PackingResult {
    pub k: usize,
    /// `sep(witness) / 2`. In greedy mode only a lower bound.
    pub r_star: f64,
    pub witness: Vec<usize>,
    pub mode: PackingMode,
}

impl PackingResult {
    pub fn is_lower_bound(&self) -> bool {
        self.mode == PackingMode::Greedy
    }

    pub fn to_json(&self, x: &FiniteMetricSpace) -> serde_json::Value {
        json!({
            "k": self.k,
            "r_star": json_number(self.r_star),
            "witness": self.witness.iter().map(|&i| x.id(i)).collect::<Vec<_>>(),
            "mode": self.mode,
            "lower_bound": self.is_lower_bound(),
        })
    }
}

/// Larger separation wins; ties go to the lexicographically smaller subset.
fn better(a: (f64, Vec<usize>), b: (f64, Vec<usize>)) -> (f64, Vec<usize>) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

const CHUNK: usize = 8192;

pub fn max_packing_radius(
    x: &FiniteMetricSpace,
    k: usize,
    mode: PackingMode,
    budget: u64,
    seed: u64,
) -> Result<PackingResult> {
    let n = x.len();
    if k > n {
        return Err(Error::KTooLarge { k, n });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let (sep, witness) = match mode {
        PackingMode::Exact => {
            let needed = binomial(n, k);
            if needed > budget as u128 {
                return Err(Error::BudgetExceeded { needed, budget });
            }
            let mut best = (f64::NEG_INFINITY, Vec::new());
            for chunk in &(0..n).combinations(k).chunks(CHUNK) {
                let chunk: Vec<Vec<usize>> = chunk.collect();
                let local = chunk
                    .into_par_iter()
                    .map(|s| (separation(&s, x), s))
                    .reduce(|| (f64::NEG_INFINITY, Vec::new()), better);
                best = better(best, local);
            }
            best
        }
        PackingMode::Greedy => {
            let mut starts: Vec<usize> = (0..n).collect();
            starts.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            starts
                .par_iter()
                .map(|&s| {
                    let set = farthest_point_insertion(x, s, k);
                    (separation(&set, x), set)
                })
                .reduce(|| (f64::NEG_INFINITY, Vec::new()), better)
        }
    };
    Ok(PackingResult {
        k,
        r_star: sep / 2.0,
        witness,
        mode,
    })
}

/// Repeatedly adds the point farthest from the current set (smallest index
/// on ties). Returned sorted.
fn farthest_point_insertion(x: &FiniteMetricSpace, start: usize, k: usize) -> Vec<usize> {
    let mut chosen = vec![start];
    let mut gap: Vec<f64> = (0..x.len()).map(|j| x.dist(start, j)).collect();
    while chosen.len() < k {
        let mut next = None;
        for j in 0..x.len() {
            if chosen.contains(&j) {
                continue;
            }
            if next.is_none_or(|b: usize| gap[j] > gap[b]) {
                next = Some(j);
            }
        }
        let j = next.expect("k <= |X|");
        chosen.push(j);
        for (i, g) in gap.iter_mut().enumerate() {
            *g = g.min(x.dist(j, i));
        }
    }
    chosen.sort_unstable();
    chosen
}

/// `Conf_k(X, r)` is nonempty iff `r < r_star`.
pub fn conf_nonempty(
    x: &FiniteMetricSpace,
    k: usize,
    r: f64,
    budget: u64,
    tol: Tolerance,
) -> Result<bool> {
    if k == 0 {
        return Ok(true);
    }
    if k > x.len() {
        return Ok(false);
    }
    let p = max_packing_radius(x, k, PackingMode::Exact, budget, 0)?;
    Ok(tol.gt(2.0 * p.r_star, 2.0 * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{sample_circle, shortest_path_metric, WeightedGraph};

    const B: u64 = 1_000_000;

    fn c12() -> FiniteMetricSpace {
        shortest_path_metric(&WeightedGraph::cycle(12, 1.0).unwrap())
    }

    #[test]
    fn c12_triples() {
        let x = c12();
        let p = max_packing_radius(&x, 3, PackingMode::Exact, B, 0).unwrap();
        assert_eq!(p.r_star, 2.0);
        assert_eq!(p.witness, vec![0, 4, 8]);
        let tol = Tolerance::default();
        assert!(conf_nonempty(&x, 3, 1.5, B, tol).unwrap());
        assert!(!conf_nonempty(&x, 3, 2.0, B, tol).unwrap());
    }

    #[test]
    fn circle_pair() {
        let x = sample_circle(24, 1.0).unwrap();
        let p = max_packing_radius(&x, 2, PackingMode::Exact, B, 0).unwrap();
        assert!((p.r_star - 0.25).abs() < 1e-12);
        assert_eq!(p.witness, vec![0, 12]);
    }

    #[test]
    fn k_equals_n_and_k_one() {
        let x = c12();
        let all = max_packing_radius(&x, 12, PackingMode::Exact, B, 0).unwrap();
        assert_eq!(all.r_star, 0.5);
        let one = max_packing_radius(&x, 1, PackingMode::Exact, B, 0).unwrap();
        assert!(one.r_star.is_infinite());
        assert!(conf_nonempty(&x, 1, 1e9, B, Tolerance::default()).unwrap());
        assert!(matches!(
            max_packing_radius(&x, 13, PackingMode::Exact, B, 0),
            Err(Error::KTooLarge { k: 13, n: 12 })
        ));
    }

    #[test]
    fn greedy_is_seed_independent_lower_bound() {
        let x = c12();
        let exact = max_packing_radius(&x, 5, PackingMode::Exact, B, 0).unwrap();
        let a = max_packing_radius(&x, 5, PackingMode::Greedy, B, 1).unwrap();
        let b = max_packing_radius(&x, 5, PackingMode::Greedy, B, 99).unwrap();
        assert_eq!(a, b);
        assert!(a.r_star <= exact.r_star);
        assert!(a.is_lower_bound());
    }
}
