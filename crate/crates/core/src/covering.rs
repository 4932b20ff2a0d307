//! Finite model of the unordered configuration space and its k!-sheeted
//! covering by ordered configurations.
//!
//! Vertices of the configuration-Rips complex are unordered configurations
//! with `sep > 2 r_lo`. Two configurations are joined when every point can be
//! moved to a unique partner at distance at most `δ`; the resulting bijection
//! is the covering cocycle on that edge. Because `δ <= r_lo < sep/2`, the
//! partner of each point is unique. Triangles whose three labels do not
//! compose are dropped and listed as diagnostics.

use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde_json::json;

use crate::cochain::Cochain;
use crate::combinatorics::{binomial, factorial, Permutation};
use crate::complex::{FilteredComplex, FilteredSimplex, ParameterSemantics, SimplicialComplex};
use crate::config::{separation, Configuration};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, Tolerance};
use crate::persistence::Ring;
use crate::union_find::DisjointSet;

/// The bijection carrying `c` onto `c2` by moves of length at most `delta`,
/// as a permutation of canonical positions (`p[i] = j` when `c[i]` moves to
/// `c2[j]`), or `None` when no such bijection exists.
pub fn matching_bijection(
    c: &Configuration,
    c2: &Configuration,
    delta: f64,
    x: &FiniteMetricSpace,
    tol: Tolerance,
) -> Result<Option<Permutation>> {
    for cfg in [c, c2] {
        let sep = separation(cfg.points(), x);
        if !tol.gt(sep, 2.0 * delta) {
            return Err(Error::GuardViolated { sep, delta });
        }
    }
    if c.k() != c2.k() {
        return Ok(None);
    }
    let k = c.k();
    let mut images = vec![usize::MAX; k];
    for (j, &y) in c2.points().iter().enumerate() {
        let mut near = c
            .points()
            .iter()
            .enumerate()
            .filter(|&(_, &xp)| tol.le(x.dist(xp, y), delta));
        let Some((i, _)) = near.next() else {
            return Ok(None);
        };
        if near.next().is_some() || images[i] != usize::MAX {
            return Ok(None);
        }
        images[i] = j;
    }
    Ok(Some(Permutation::from_images(images)?))
}

/// Permutation labels on the edges of a configuration-Rips complex.
#[derive(Clone, Debug, PartialEq)]
pub struct CoveringCocycle {
    pub k: usize,
    pub configurations: Vec<Configuration>,
    /// `g(u -> v)` for `u < v`.
    pub labels: std::collections::BTreeMap<(usize, usize), Permutation>,
}

impl CoveringCocycle {
    /// `g(u -> v)`; the reverse direction is the inverse.
    pub fn get(&self, u: usize, v: usize) -> Option<Permutation> {
        if u < v {
            self.labels.get(&(u, v)).cloned()
        } else {
            self.labels.get(&(v, u)).map(Permutation::inverse)
        }
    }

    /// Cocycle condition `g(b->c) ∘ g(a->b) = g(a->c)`.
    pub fn composes_on(&self, tri: [usize; 3]) -> Option<bool> {
        let [a, b, c] = tri;
        let ab = self.get(a, b)?;
        let bc = self.get(b, c)?;
        let ac = self.get(a, c)?;
        Some(bc.compose(&ab) == ac)
    }

    pub fn config_id(&self, x: &FiniteMetricSpace, v: usize) -> String {
        self.configurations[v].ids(x).join("|")
    }

    /// JSON lines `{"edge":[c, c'], "perm":[..]}` with 1-based one-line
    /// permutations.
    pub fn to_json_lines(&self, x: &FiniteMetricSpace) -> Vec<String> {
        self.labels
            .iter()
            .map(|(&(u, v), p)| {
                json!({
                    "edge": [self.config_id(x, u), self.config_id(x, v)],
                    "perm": p.one_based(),
                })
                .to_string()
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ConfigRipsComplex {
    pub k: usize,
    pub delta: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    pub configurations: Vec<Configuration>,
    pub complex: FilteredComplex,
    pub excluded_triangles: Vec<[usize; 3]>,
    vertex_index: HashMap<Configuration, usize>,
}

impl ConfigRipsComplex {
    pub fn vertex_of(&self, c: &Configuration) -> Option<usize> {
        self.vertex_index.get(c).copied()
    }

    /// Subcomplex present at radius `r`.
    pub fn snapshot(&self, r: f64, tol: Tolerance) -> SimplicialComplex {
        self.complex.snapshot(r, tol)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RipsParams {
    pub dim_cap: usize,
    pub budget: u64,
    pub tol: Tolerance,
}

impl Default for RipsParams {
    fn default() -> Self {
        RipsParams {
            dim_cap: 3,
            budget: crate::config::DEFAULT_BUDGET,
            tol: Tolerance::default(),
        }
    }
}

pub fn build_config_rips(
    x: &FiniteMetricSpace,
    k: usize,
    delta: f64,
    r_grid: &[f64],
    params: RipsParams,
) -> Result<(ConfigRipsComplex, CoveringCocycle)> {
    let tol = params.tol;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if k > x.len() {
        return Err(Error::KTooLarge { k, n: x.len() });
    }
    if r_grid.is_empty() {
        return Err(Error::InvalidArgument("radius grid is empty".into()));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let r_lo = r_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let r_hi = r_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if tol.gt(delta, r_lo) {
        return Err(Error::GuardViolated {
            sep: 2.0 * r_lo,
            delta,
        });
    }
    let needed = binomial(x.len(), k);
    if needed > params.budget as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: params.budget,
        });
    }

    let mut configurations = Vec::new();
    let mut seps = Vec::new();
    for pts in itertools::Itertools::combinations(0..x.len(), k) {
        let sep = separation(&pts, x);
        if k == 1 || tol.gt(sep, 2.0 * r_lo) {
            configurations.push(Configuration::new(pts)?);
            seps.push(sep);
        }
    }
    let vertex_index: HashMap<Configuration, usize> = configurations
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();

    let neighborhoods: Vec<Vec<usize>> = (0..x.len())
        .map(|p| {
            (0..x.len())
                .filter(|&q| tol.le(x.dist(p, q), delta))
                .collect()
        })
        .collect();

    let edge_lists: Vec<Vec<(usize, usize, Permutation)>> = configurations
        .par_iter()
        .enumerate()
        .map(|(u, c)| -> Result<Vec<(usize, usize, Permutation)>> {
            let mut found = BTreeSet::new();
            let mut tuple = Vec::with_capacity(k);
            candidate_partners(c.points(), &neighborhoods, &mut tuple, &mut found);
            let mut out = Vec::new();
            for cand in found {
                let Ok(c2) = Configuration::new(cand) else {
                    continue;
                };
                let Some(&v) = vertex_index.get(&c2) else {
                    continue;
                };
                if v <= u {
                    continue;
                }
                if let Some(p) = matching_bijection(c, &c2, delta, x, tol)? {
                    out.push((u, v, p));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut labels = std::collections::BTreeMap::new();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); configurations.len()];
    for (u, v, p) in edge_lists.into_iter().flatten() {
        adjacency[u].push(v);
        labels.insert((u, v), p);
    }
    let cocycle = CoveringCocycle {
        k,
        configurations: configurations.clone(),
        labels,
    };

    // cliques up to dim_cap + 1 vertices, keeping only cocycle-consistent triangles
    let mut simplices: Vec<FilteredSimplex> = Vec::new();
    let mut excluded = Vec::new();
    let mut good_triangles: HashSet<[usize; 3]> = HashSet::new();
    for (v, &sep) in seps.iter().enumerate() {
        simplices.push(FilteredSimplex {
            verts: vec![v],
            sep,
        });
    }
    for &(u, v) in cocycle.labels.keys() {
        simplices.push(FilteredSimplex {
            verts: vec![u, v],
            sep: seps[u].min(seps[v]),
        });
    }
    if params.dim_cap >= 2 {
        for (u, neighbours) in adjacency.iter().enumerate() {
            for (ai, &a) in neighbours.iter().enumerate() {
                for &b in &neighbours[ai + 1..] {
                    let (lo, hi) = (a.min(b), a.max(b));
                    if !cocycle.labels.contains_key(&(lo, hi)) {
                        continue;
                    }
                    let tri = [u, lo, hi];
                    if cocycle.composes_on(tri) == Some(true) {
                        good_triangles.insert(tri);
                    } else {
                        excluded.push(tri);
                    }
                }
            }
        }
        let mut tris: Vec<[usize; 3]> = good_triangles.iter().copied().collect();
        tris.sort_unstable();
        for t in &tris {
            simplices.push(FilteredSimplex {
                verts: t.to_vec(),
                sep: t.iter().map(|&i| seps[i]).fold(f64::INFINITY, f64::min),
            });
        }
        if params.dim_cap >= 3 {
            let mut clique = Vec::new();
            for t in &tris {
                clique.clear();
                clique.extend_from_slice(t);
                extend_cliques(
                    &mut clique,
                    &adjacency,
                    &good_triangles,
                    &seps,
                    params.dim_cap,
                    &mut simplices,
                );
                if simplices.len() as u64 > params.budget {
                    return Err(Error::BudgetExceeded {
                        needed: simplices.len() as u128,
                        budget: params.budget,
                    });
                }
            }
        }
    }
    excluded.sort_unstable();
    if simplices.len() as u64 > params.budget {
        return Err(Error::BudgetExceeded {
            needed: simplices.len() as u128,
            budget: params.budget,
        });
    }
    let complex = FilteredComplex::new(simplices, params.dim_cap, ParameterSemantics::ConfigRips)?;
    Ok((
        ConfigRipsComplex {
            k,
            delta,
            r_lo,
            r_hi,
            configurations,
            complex,
            excluded_triangles: excluded,
            vertex_index,
        },
        cocycle,
    ))
}

fn candidate_partners(
    points: &[usize],
    neighborhoods: &[Vec<usize>],
    tuple: &mut Vec<usize>,
    out: &mut BTreeSet<Vec<usize>>,
) {
    if tuple.len() == points.len() {
        let mut sorted = tuple.clone();
        sorted.sort_unstable();
        out.insert(sorted);
        return;
    }
    for &y in &neighborhoods[points[tuple.len()]] {
        if !tuple.contains(&y) {
            tuple.push(y);
            candidate_partners(points, neighborhoods, tuple, out);
            tuple.pop();
        }
    }
}

/// Extends a clique whose triangles are all retained by higher vertices.
fn extend_cliques(
    clique: &mut Vec<usize>,
    adjacency: &[Vec<usize>],
    good: &HashSet<[usize; 3]>,
    seps: &[f64],
    dim_cap: usize,
    out: &mut Vec<FilteredSimplex>,
) {
    if clique.len() > dim_cap {
        return;
    }
    let last = *clique.last().unwrap();
    for &w in &adjacency[last] {
        let ok = clique
            .iter()
            .all(|&a| adjacency[a].binary_search(&w).is_ok())
            && clique
                .iter()
                .enumerate()
                .all(|(i, &a)| clique[i + 1..].iter().all(|&b| good.contains(&[a, b, w])));
        if ok {
            clique.push(w);
            out.push(FilteredSimplex {
                verts: clique.clone(),
                sep: clique
                    .iter()
                    .map(|&i| seps[i])
                    .fold(f64::INFINITY, f64::min),
            });
            extend_cliques(clique, adjacency, good, seps, dim_cap, out);
            clique.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CoveringReport {
    pub k: usize,
    pub sheets: usize,
    pub base_vertices: usize,
    pub base_edges: usize,
    pub base_components: usize,
    pub total_vertices: usize,
    pub total_edges: usize,
    pub total_components: usize,
    pub fiber_sizes_ok: bool,
    pub lifted_moves_ok: bool,
    pub deck_free: bool,
    pub deck_transitive: bool,
    pub deck_commutes_with_lifts: bool,
    pub projection_invariant: bool,
}

impl CoveringReport {
    pub fn is_covering(&self) -> bool {
        self.fiber_sizes_ok
            && self.lifted_moves_ok
            && self.deck_free
            && self.deck_transitive
            && self.deck_commutes_with_lifts
            && self.projection_invariant
    }
}

/// Builds the lifted complex whose vertices are ordered configurations and
/// checks the covering structure over the snapshot at radius `r`.
///
/// A lifted vertex `(u, τ)` is the tuple `(c_u[τ(1)], .., c_u[τ(k)])`; the
/// edge `u -> v` with label `p` lifts `(u, τ)` to `(v, p∘τ)`; the deck
/// transformation by `σ` sends `(u, τ)` to `(u, τ∘σ)`.
pub fn verify_covering(
    x: &FiniteMetricSpace,
    model: &ConfigRipsComplex,
    g: &CoveringCocycle,
    r: f64,
    tol: Tolerance,
) -> Result<CoveringReport> {
    let base = model.snapshot(r, tol);
    for t in base.simplices(2) {
        let tri = [t[0], t[1], t[2]];
        if g.composes_on(tri) != Some(true) {
            return Err(Error::CocycleViolation(tri));
        }
    }
    let k = g.k;
    let perms = Permutation::all(k);
    let sheets = factorial(k);
    let perm_index: HashMap<&Permutation, usize> =
        perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let base_vertices: Vec<usize> = base.simplices(0).iter().map(|s| s[0]).collect();
    let local: HashMap<usize, usize> = base_vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let lifted = |u: usize, tau: &Permutation| local[&u] * sheets + perm_index[tau];
    let tuple = |u: usize, tau: &Permutation| -> Vec<usize> {
        let pts = g.configurations[u].points();
        (0..k).map(|i| pts[tau.apply(i)]).collect()
    };

    let mut fiber_sizes_ok = true;
    let mut projection_invariant = true;
    let mut deck_free = true;
    let mut deck_transitive = true;
    for &u in &base_vertices {
        let fiber: BTreeSet<Vec<usize>> = perms.iter().map(|t| tuple(u, t)).collect();
        fiber_sizes_ok &= fiber.len() == sheets;
        for tau in &perms {
            let mut orbit = BTreeSet::new();
            for sigma in &perms {
                let moved = tau.compose(sigma);
                let mut sorted = tuple(u, &moved);
                sorted.sort_unstable();
                projection_invariant &= sorted == g.configurations[u].points();
                deck_free &= sigma.is_identity() || moved != *tau;
                orbit.insert(moved);
            }
            deck_transitive &= orbit.len() == sheets;
        }
    }

    let mut ds = DisjointSet::new(base_vertices.len() * sheets);
    let mut base_ds = DisjointSet::new(base_vertices.len());
    let mut lifted_moves_ok = true;
    let mut deck_commutes = true;
    for e in base.simplices(1) {
        let (u, v) = (e[0], e[1]);
        let p = g
            .get(u, v)
            .ok_or_else(|| Error::InvalidArgument(format!("edge {u}-{v} has no label")))?;
        base_ds.union(local[&u], local[&v]);
        for tau in &perms {
            let target = p.compose(tau);
            let (a, b) = (tuple(u, tau), tuple(v, &target));
            lifted_moves_ok &= a
                .iter()
                .zip(&b)
                .all(|(&s, &t)| tol.le(x.dist(s, t), model.delta));
            ds.union(lifted(u, tau), lifted(v, &target));
            for sigma in &perms {
                // lift of the deck image equals deck image of the lift
                deck_commutes &= p.compose(&tau.compose(sigma)) == target.compose(sigma);
            }
        }
    }
    Ok(CoveringReport {
        k,
        sheets,
        base_vertices: base_vertices.len(),
        base_edges: base.count(1),
        base_components: base_ds.components(),
        total_vertices: base_vertices.len() * sheets,
        total_edges: base.count(1) * sheets,
        total_components: ds.components(),
        fiber_sizes_ok,
        lifted_moves_ok,
        deck_free,
        deck_transitive,
        deck_commutes_with_lifts: deck_commutes,
        projection_invariant,
    })
}

/// Sign of the covering cocycle: the set of edges carrying odd permutations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct W1Cocycle {
    pub odd_edges: BTreeSet<(Configuration, Configuration)>,
}

pub fn w1(g: &CoveringCocycle) -> W1Cocycle {
    W1Cocycle {
        odd_edges: g
            .labels
            .iter()
            .filter(|(_, p)| p.is_odd())
            .map(|(&(u, v), _)| (g.configurations[u].clone(), g.configurations[v].clone()))
            .collect(),
    }
}

impl W1Cocycle {
    /// Edges of the snapshot of `model` at `r` only.
    pub fn restrict_to(&self, model: &ConfigRipsComplex, r: f64, tol: Tolerance) -> W1Cocycle {
        let snap = model.snapshot(r, tol);
        W1Cocycle {
            odd_edges: self
                .odd_edges
                .iter()
                .filter(|(a, b)| match (model.vertex_of(a), model.vertex_of(b)) {
                    (Some(u), Some(v)) => snap.contains(&[u.min(v), u.max(v)]),
                    _ => false,
                })
                .cloned()
                .collect(),
        }
    }

    /// The Z/2 1-cochain on the snapshot of `model` at `r`.
    pub fn to_cochain(&self, model: &ConfigRipsComplex, r: f64, tol: Tolerance) -> Cochain {
        let snap = model.snapshot(r, tol);
        let values = self.odd_edges.iter().filter_map(|(a, b)| {
            let (u, v) = (model.vertex_of(a)?, model.vertex_of(b)?);
            let e = vec![u.min(v), u.max(v)];
            snap.contains(&e).then_some((e, 1))
        });
        Cochain::from_values(1, Ring::Z2, Some(r), values).expect("edges have degree 1")
    }

    /// Sum of w₁ along a closed vertex path (indices into `model`).
    pub fn evaluate_loop(&self, model: &ConfigRipsComplex, path: &[usize]) -> u8 {
        let mut acc = 0u8;
        for w in path
            .windows(2)
            .chain(std::iter::once([*path.last().unwrap(), path[0]].as_slice()))
        {
            let (u, v) = (w[0].min(w[1]), w[0].max(w[1]));
            let key = (
                model.configurations[u].clone(),
                model.configurations[v].clone(),
            );
            acc ^= u8::from(self.odd_edges.contains(&key));
        }
        acc
    }
}
