//! Permutations of `{0..k}` and subset counting.

use std::fmt;

use crate::error::{Error, Result};

/// A permutation in one-line notation: `self[i]` is the image of `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation((0..k).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPermutation(images));
            }
        }
        Ok(Permutation(images))
    }

    /// Builds from 1-based one-line notation.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidPermutation(images.to_vec()));
        }
        Self::from_images(images.iter().map(|&i| i - 1).collect())
    }

    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut p: Vec<usize> = (0..k).collect();
        p.swap(a, b);
        Permutation(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&i| i + 1).collect()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.len(), other.len());
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `true` for odd permutations.
    pub fn is_odd(&self) -> bool {
        let mut seen = vec![false; self.len()];
        let mut transpositions = 0;
        for start in 0..self.len() {
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        transpositions % 2 == 1
    }

    /// Left action on tuples: `σ·(x_1..x_k) = (x_σ(1)..x_σ(k))`.
    pub fn act<T: Clone>(&self, tuple: &[T]) -> Vec<T> {
        self.0.iter().map(|&i| tuple[i].clone()).collect()
    }

    /// All permutations of `k` letters in lexicographic order.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.one_based())
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of subsets of size `1..=k_max`.
pub fn subsets_up_to(n: usize, k_max: usize) -> u128 {
    (1..=k_max).map(|j| binomial(n, j)).sum()
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_permutations_distinct() {
        let ps = Permutation::all(4);
        assert_eq!(ps.len(), 24);
        let mut sorted = ps.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), 24);
        assert_eq!(ps.iter().filter(|p| p.is_odd()).count(), 12);
    }

    #[test]
    fn compose_and_inverse() {
        for p in Permutation::all(3) {
            assert!(p.compose(&p.inverse()).is_identity());
            for q in Permutation::all(3) {
                assert_eq!(p.compose(&q).is_odd(), p.is_odd() ^ q.is_odd());
                let x = ["a", "b", "c"];
                // left action: (pq)·x = q·(p·x) under the coordinate convention
                assert_eq!(p.compose(&q).act(&x), q.act(&p.act(&x)));
            }
        }
    }

    #[test]
    fn transposition_acts_by_swap() {
        let t = Permutation::transposition(2, 0, 1);
        assert_eq!(t.act(&["a", "b"]), vec!["b", "a"]);
        assert!(t.is_odd());
        assert_eq!(t.one_based(), vec![2, 1]);
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        assert!(Permutation::from_one_based(&[2, 1]).is_ok());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 3), 220);
        assert_eq!(binomial(24, 4), 10626);
        assert_eq!(subsets_up_to(5, 2), 15);
        assert_eq!(binomial(3, 5), 0);
    }
}
