//! Hard-sphere configurations, the independence filtration, and the
//! configuration chain complex with its point-deletion boundary.
//!
//! A configuration at radius `r` is a set (or tuple) of points pairwise more
//! than `2r` apart. Points are indices into a [`FiniteMetricSpace`].

use itertools::Itertools;
use serde::Serialize;

use crate::combinatorics::{subsets_up_to, Permutation};
use crate::complex::{FilteredComplex, FilteredSimplex, ParameterSemantics};
use crate::error::{Error, Result};
use crate::linalg::SparseIntMatrix;
use crate::metric::{FiniteMetricSpace, Tolerance};

pub const DEFAULT_BUDGET: u64 = 5_000_000;

/// Unordered configuration: strictly increasing point indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Configuration(Vec<usize>);

impl Configuration {
    pub fn new(mut points: Vec<usize>) -> Result<Self> {
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "repeated point in {points:?}"
            )));
        }
        Ok(Configuration(points))
    }

    pub fn points(&self) -> &[usize] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn ids<'a>(&self, x: &'a FiniteMetricSpace) -> Vec<&'a str> {
        self.0.iter().map(|&i| x.id(i)).collect()
    }
}

/// Ordered configuration: a tuple of distinct point indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedConfiguration(Vec<usize>);

impl OrderedConfiguration {
    pub fn new(points: Vec<usize>) -> Result<Self> {
        let mut sorted = points.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "repeated point in {points:?}"
            )));
        }
        Ok(OrderedConfiguration(points))
    }

    pub fn points(&self) -> &[usize] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn unordered(&self) -> Configuration {
        let mut p = self.0.clone();
        p.sort_unstable();
        Configuration(p)
    }
}

/// Minimum pairwise distance; `+inf` for fewer than two points.
pub fn separation(points: &[usize], x: &FiniteMetricSpace) -> f64 {
    let mut sep = f64::INFINITY;
    for (a, &i) in points.iter().enumerate() {
        for &j in &points[a + 1..] {
            sep = sep.min(x.dist(i, j));
        }
    }
    sep
}

pub fn in_conf(points: &[usize], x: &FiniteMetricSpace, r: f64, tol: Tolerance) -> bool {
    points.len() < 2 || tol.gt(separation(points, x), 2.0 * r)
}

/// The filtered independence complex: every subset of at most `k_max`
/// points, filtered by `sep/2`. Its `(k-1)`-simplices at radius `r` are
/// exactly the unordered configurations of `k` points at `r`.
pub fn build_independence_filtration(
    x: &FiniteMetricSpace,
    k_max: usize,
    budget: u64,
) -> Result<FilteredComplex> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let needed = subsets_up_to(x.len(), k_max);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut simplices = Vec::with_capacity(needed as usize);
    for size in 1..=k_max.min(x.len()) {
        for verts in (0..x.len()).combinations(size) {
            let sep = separation(&verts, x);
            simplices.push(FilteredSimplex { verts, sep });
        }
    }
    FilteredComplex::new(simplices, k_max - 1, ParameterSemantics::HardSphere)
}

/// Deletes the `i`-th coordinate, `1 <= i <= k`.
pub fn face_map(i: usize, c: &OrderedConfiguration) -> Result<OrderedConfiguration> {
    if i == 0 || i > c.k() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: c.k(),
        });
    }
    let mut p = c.0.clone();
    p.remove(i - 1);
    Ok(OrderedConfiguration(p))
}

/// Left action `σ·(x_1..x_k) = (x_σ(1)..x_σ(k))`.
pub fn sigma_action(perm: &Permutation, c: &OrderedConfiguration) -> Result<OrderedConfiguration> {
    if perm.len() != c.k() {
        return Err(Error::InvalidArgument(format!(
            "permutation on {} letters applied to a {}-configuration",
            perm.len(),
            c.k()
        )));
    }
    Ok(OrderedConfiguration(perm.act(&c.0)))
}

/// All ordered `k`-configurations at radius `r`, lexicographically sorted.
pub fn ordered_configurations(
    x: &FiniteMetricSpace,
    k: usize,
    r: f64,
    tol: Tolerance,
    budget: u64,
) -> Result<Vec<OrderedConfiguration>> {
    let n = x.len();
    let needed: u128 = (0..k).map(|i| n.saturating_sub(i) as u128).product();
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    extend_ordered(x, k, r, tol, &mut cur, &mut out);
    Ok(out)
}

fn extend_ordered(
    x: &FiniteMetricSpace,
    k: usize,
    r: f64,
    tol: Tolerance,
    cur: &mut Vec<usize>,
    out: &mut Vec<OrderedConfiguration>,
) {
    if cur.len() == k {
        out.push(OrderedConfiguration(cur.clone()));
        return;
    }
    for p in 0..x.len() {
        if cur.iter().all(|&q| q != p && tol.gt(x.dist(p, q), 2.0 * r)) {
            cur.push(p);
            extend_ordered(x, k, r, tol, cur, out);
            cur.pop();
        }
    }
}

/// Point-deletion boundary `C(Conf_k) -> C(Conf_{k-1})` on given bases,
/// `∂ = Σ_{i=1}^{k} (-1)^{i-1} ∂^i`. Rows index `lower`, columns `upper`.
/// For `k = 1` the map is zero.
pub fn boundary_on_bases(
    upper: &[OrderedConfiguration],
    lower: &[OrderedConfiguration],
) -> Result<SparseIntMatrix> {
    let cols = upper
        .iter()
        .map(|c| {
            if c.k() <= 1 {
                return Ok(Vec::new());
            }
            (1..=c.k())
                .map(|i| {
                    let f = face_map(i, c)?;
                    let row = lower.binary_search(&f).map_err(|_| {
                        Error::InvalidArgument(format!("face {:?} missing from lower basis", f.0))
                    })?;
                    Ok((row, if i % 2 == 1 { 1 } else { -1 }))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseIntMatrix::from_columns(lower.len(), cols))
}

/// The boundary of the configuration chain complex at `(k, r)` together
/// with its bases.
#[derive(Clone, Debug)]
pub struct ConfigurationBoundary {
    pub upper: Vec<OrderedConfiguration>,
    pub lower: Vec<OrderedConfiguration>,
    pub matrix: SparseIntMatrix,
}

pub fn configuration_boundary(
    x: &FiniteMetricSpace,
    k: usize,
    r: f64,
    tol: Tolerance,
    budget: u64,
) -> Result<ConfigurationBoundary> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let upper = ordered_configurations(x, k, r, tol, budget)?;
    let lower = if k == 1 {
        Vec::new()
    } else {
        ordered_configurations(x, k - 1, r, tol, budget)?
    };
    let matrix = boundary_on_bases(&upper, &lower)?;
    Ok(ConfigurationBoundary {
        upper,
        lower,
        matrix,
    })
}

/// Inclusion `C(small) -> C(large)` of sorted bases.
pub fn inclusion_matrix(
    small: &[OrderedConfiguration],
    large: &[OrderedConfiguration],
) -> Result<SparseIntMatrix> {
    let cols = small
        .iter()
        .map(|c| {
            large
                .binary_search(c)
                .map(|row| vec![(row, 1)])
                .map_err(|_| Error::InvalidArgument(format!("{:?} not in larger basis", c.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseIntMatrix::from_columns(large.len(), cols))
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaCheckReport {
    pub radii: Vec<f64>,
    pub k_max: usize,
    pub boundary_checks: usize,
    pub commuting_checks: usize,
    pub equivariance_checks: usize,
    pub failures: Vec<String>,
}

impl DeltaCheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Radii where the configuration sets change: half of every finite
/// pairwise distance, plus 0.
pub fn critical_radii(x: &FiniteMetricSpace) -> Vec<f64> {
    let mut radii: Vec<f64> = x
        .distinct_distances()
        .into_iter()
        .filter(|d| d.is_finite())
        .map(|d| d / 2.0)
        .collect();
    radii.push(0.0);
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    radii
}

/// Audits `∂∘∂ = 0` at every radius, commutation of `∂` with every
/// inclusion `Conf_k(X, r1) ⊆ Conf_k(X, r2)` for `r1 >= r2`, and
/// Σ_k-equivariance of those inclusions.
pub fn delta_check(
    x: &FiniteMetricSpace,
    k_max: usize,
    radii: &[f64],
    tol: Tolerance,
    budget: u64,
) -> Result<DeltaCheckReport> {
    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let mut report = DeltaCheckReport {
        radii: radii.clone(),
        k_max,
        boundary_checks: 0,
        commuting_checks: 0,
        equivariance_checks: 0,
        failures: Vec::new(),
    };
    // bases[ri][k-1] = ordered configurations of size k at radii[ri]
    let bases: Vec<Vec<Vec<OrderedConfiguration>>> = radii
        .iter()
        .map(|&r| {
            (1..=k_max)
                .map(|k| ordered_configurations(x, k, r, tol, budget))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let boundaries: Vec<Vec<SparseIntMatrix>> = bases
        .iter()
        .map(|b| {
            (2..=k_max)
                .map(|k| boundary_on_bases(&b[k - 1], &b[k - 2]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    for (ri, &r) in radii.iter().enumerate() {
        for k in 3..=k_max {
            report.boundary_checks += 1;
            let dd = boundaries[ri][k - 3].mul(&boundaries[ri][k - 2]);
            if !dd.is_zero() {
                report.failures.push(format!("∂∂ != 0 at r={r}, k={k}"));
            }
        }
    }
    let perms: Vec<Vec<Permutation>> = (1..=k_max).map(Permutation::all).collect();
    for hi in 0..radii.len() {
        for lo in 0..=hi {
            let (r1, r2) = (radii[hi], radii[lo]);
            for k in 2..=k_max {
                report.commuting_checks += 1;
                let inc_k = inclusion_matrix(&bases[hi][k - 1], &bases[lo][k - 1])?;
                let inc_k1 = inclusion_matrix(&bases[hi][k - 2], &bases[lo][k - 2])?;
                let left = boundaries[lo][k - 2].mul(&inc_k);
                let right = inc_k1.mul(&boundaries[hi][k - 2]);
                if left != right {
                    report.failures.push(format!(
                        "∂ does not commute with inclusion r1={r1} -> r2={r2}, k={k}"
                    ));
                }
            }
            for k in 1..=k_max {
                report.equivariance_checks += 1;
                let large = &bases[lo][k - 1];
                let ok = bases[hi][k - 1].iter().all(|c| {
                    perms[k - 1].iter().all(|p| {
                        let moved = OrderedConfiguration(p.act(&c.0));
                        bases[hi][k - 1].binary_search(&moved).is_ok()
                            && large.binary_search(&moved).is_ok()
                    })
                });
                if !ok {
                    report.failures.push(format!(
                        "Σ_{k} action does not commute with inclusion r1={r1} -> r2={r2}"
                    ));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{sample_circle, shortest_path_metric, WeightedGraph};

    fn cycle(n: usize) -> FiniteMetricSpace {
        shortest_path_metric(&WeightedGraph::cycle(n, 1.0).unwrap())
    }

    fn oc(v: &[usize]) -> OrderedConfiguration {
        OrderedConfiguration::new(v.to_vec()).unwrap()
    }

    #[test]
    fn separation_examples() {
        assert_eq!(separation(&[0, 2], &cycle(4)), 2.0);
        assert_eq!(separation(&[0, 4, 8], &cycle(12)), 4.0);
        assert!(separation(&[0], &cycle(12)).is_infinite());
    }

    #[test]
    fn independence_complex_of_c5_is_a_pentagon() {
        let x = cycle(5);
        let k = build_independence_filtration(&x, 2, DEFAULT_BUDGET).unwrap();
        let snap = k.snapshot(0.5, Tolerance::default());
        assert_eq!(snap.count(0), 5);
        assert_eq!(snap.count(1), 5);
        for e in snap.simplices(1) {
            assert_eq!(x.dist(e[0], e[1]), 2.0);
        }
        assert_eq!(snap.connected_components(), 1);
    }

    #[test]
    fn only_vertices_past_half_diameter() {
        let x = sample_circle(7, 3.0).unwrap();
        let k = build_independence_filtration(&x, 3, DEFAULT_BUDGET).unwrap();
        let snap = k.snapshot(x.finite_diameter() / 2.0, Tolerance::default());
        assert_eq!(snap.dim(), Some(0));
        assert_eq!(snap.count(0), 7);
    }

    #[test]
    fn equilateral_triangle_value() {
        let k = build_independence_filtration(&cycle(12), 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(k.get(&[0, 4, 8]).unwrap().filtration_value(), 2.0);
    }

    #[test]
    fn budget_enforced() {
        let r = build_independence_filtration(&cycle(12), 3, 100);
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn face_maps() {
        let abc = oc(&[0, 1, 2]);
        assert_eq!(face_map(1, &abc).unwrap(), oc(&[1, 2]));
        assert_eq!(face_map(3, &abc).unwrap(), oc(&[0, 1]));
        assert!(matches!(
            face_map(0, &abc),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            face_map(4, &abc),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn simplicial_identities_exhaustive() {
        for c in [oc(&[0, 1, 2]), oc(&[3, 1, 4, 0])] {
            let k = c.k();
            for j in 1..k {
                for i in 1..=j {
                    let lhs = face_map(j, &face_map(i, &c).unwrap()).unwrap();
                    let rhs = face_map(i, &face_map(j + 1, &c).unwrap()).unwrap();
                    assert_eq!(lhs, rhs, "i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn boundary_of_pair() {
        let x = FiniteMetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 3.0], vec![3.0, 0.0]],
        )
        .unwrap();
        let b = configuration_boundary(&x, 2, 1.0, Tolerance::default(), DEFAULT_BUDGET).unwrap();
        let col = b.upper.iter().position(|c| c == &oc(&[0, 1])).unwrap();
        // ∂(a,b) = (b) - (a)
        assert_eq!(b.matrix.cols[col], vec![(0, -1), (1, 1)]);
        let k1 = configuration_boundary(&x, 1, 1.0, Tolerance::default(), DEFAULT_BUDGET).unwrap();
        assert!(k1.matrix.is_zero());
        assert_eq!(k1.matrix.nrows, 0);
    }

    #[test]
    fn boundary_squares_to_zero_on_c6() {
        let x = cycle(6);
        let tol = Tolerance::default();
        let b3 = configuration_boundary(&x, 3, 0.5, tol, DEFAULT_BUDGET).unwrap();
        let b2 = configuration_boundary(&x, 2, 0.5, tol, DEFAULT_BUDGET).unwrap();
        assert_eq!(b3.lower, b2.upper);
        assert!(!b3.upper.is_empty());
        assert!(b2.matrix.mul(&b3.matrix).is_zero());
    }

    #[test]
    fn sigma_action_examples() {
        let ab = oc(&[0, 1]);
        assert_eq!(sigma_action(&Permutation::identity(2), &ab).unwrap(), ab);
        assert_eq!(
            sigma_action(&Permutation::transposition(2, 0, 1), &ab).unwrap(),
            oc(&[1, 0])
        );
        let abc = oc(&[0, 1, 2]);
        let mut orbit: Vec<_> = Permutation::all(3)
            .iter()
            .map(|p| sigma_action(p, &abc).unwrap())
            .collect();
        orbit.sort();
        orbit.dedup();
        assert_eq!(orbit.len(), 6);
    }

    #[test]
    fn delta_check_on_c6() {
        let x = cycle(6);
        let radii = critical_radii(&x);
        let rep = delta_check(&x, 3, &radii, Tolerance::default(), DEFAULT_BUDGET).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert!(rep.boundary_checks > 0 && rep.commuting_checks > 0);
    }
}
