//! Finite metric spaces, weighted-graph metrics and graph subdivision.
//!
//! Distances are `f64` with `f64::INFINITY` standing for points in different
//! components. Points carry opaque string identifiers; a space always stores
//! its points in lexicographic identifier order, so point index `i` is the
//! canonical rank of the point.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::io::Read;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Relative comparison tolerance for distances and radii.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(rel: f64) -> Result<Self> {
        if !(rel.is_finite() && rel >= 0.0) {
            return Err(Error::ToleranceInvalid(rel));
        }
        Ok(Tolerance { rel })
    }

    /// Strict `a > b`, where values within the relative tolerance compare equal.
    pub fn gt(&self, a: f64, b: f64) -> bool {
        match (a.is_infinite(), b.is_infinite()) {
            (true, true) => false,
            (true, false) => a > 0.0,
            (false, true) => b < 0.0,
            (false, false) => a - b > self.rel * a.abs().max(b.abs()),
        }
    }

    pub fn le(&self, a: f64, b: f64) -> bool {
        !self.gt(a, b)
    }

    pub fn eq(&self, a: f64, b: f64) -> bool {
        !self.gt(a, b) && !self.gt(b, a)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    ids: Vec<String>,
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Builds a space from identifiers and a square distance matrix given in
    /// the same order. The result is re-ordered lexicographically by id.
    pub fn new(ids: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tolerance(ids, dist, Tolerance::default())
    }

    pub fn with_tolerance(ids: Vec<String>, dist: Vec<Vec<f64>>, tol: Tolerance) -> Result<Self> {
        let n = ids.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric(format!(
                "distance matrix must be {n}x{n}"
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
        for w in order.windows(2) {
            if ids[w[0]] == ids[w[1]] {
                return Err(Error::InvalidMetric(format!(
                    "duplicate id {:?}",
                    ids[w[0]]
                )));
            }
        }
        let sorted_ids: Vec<String> = order.iter().map(|&i| ids[i].clone()).collect();
        let mut flat = vec![0.0; n * n];
        for (a, &i) in order.iter().enumerate() {
            for (b, &j) in order.iter().enumerate() {
                flat[a * n + b] = dist[i][j];
            }
        }
        let space = FiniteMetricSpace {
            ids: sorted_ids,
            dist: flat,
        };
        space.validate(tol)?;
        Ok(space)
    }

    fn validate(&self, tol: Tolerance) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if self.dist(i, i) != 0.0 {
                return Err(Error::InvalidMetric(format!(
                    "nonzero diagonal at {:?}",
                    self.ids[i]
                )));
            }
            for j in 0..n {
                let d = self.dist(i, j);
                if d.is_nan() || d < 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "bad distance {d} between {:?} and {:?}",
                        self.ids[i], self.ids[j]
                    )));
                }
                if i != j && d == 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "distinct points {:?} and {:?} at distance 0",
                        self.ids[i], self.ids[j]
                    )));
                }
                if d != self.dist(j, i) {
                    return Err(Error::InvalidMetric(format!(
                        "asymmetric entry between {:?} and {:?}",
                        self.ids[i], self.ids[j]
                    )));
                }
            }
        }
        if let Some((i, j, k)) = self.triangle_violation(tol) {
            return Err(Error::InvalidMetric(format!(
                "triangle inequality fails on ({:?}, {:?}, {:?})",
                self.ids[i], self.ids[j], self.ids[k]
            )));
        }
        Ok(())
    }

    /// First triple with `d(i,k) > d(i,j) + d(j,k)` among finite entries.
    pub fn triangle_violation(&self, tol: Tolerance) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                let dij = self.dist(i, j);
                if dij.is_infinite() {
                    continue;
                }
                for k in 0..n {
                    let (djk, dik) = (self.dist(j, k), self.dist(i, k));
                    if djk.is_infinite() {
                        continue;
                    }
                    if tol.gt(dik, dij + djk) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.binary_search_by(|p| p.as_str().cmp(id)).ok()
    }

    pub fn indices_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        ids.iter()
            .map(|s| {
                self.index_of(s.as_ref())
                    .ok_or_else(|| Error::UnknownPoint(s.as_ref().to_string()))
            })
            .collect()
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.ids.len() + j]
    }

    /// Largest finite pairwise distance (0 for fewer than two points).
    pub fn finite_diameter(&self) -> f64 {
        self.dist
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    }

    /// Sorted distinct off-diagonal distances, `inf` included when present.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let mut ds: Vec<f64> = Vec::new();
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                ds.push(self.dist(i, j));
            }
        }
        ds.sort_by(f64::total_cmp);
        ds.dedup();
        ds
    }

    /// Restriction of the metric to the given points.
    pub fn subspace(&self, points: &[usize]) -> FiniteMetricSpace {
        let mut pts = points.to_vec();
        pts.sort_unstable();
        pts.dedup();
        let n = pts.len();
        let mut dist = vec![0.0; n * n];
        for (a, &i) in pts.iter().enumerate() {
            for (b, &j) in pts.iter().enumerate() {
                dist[a * n + b] = self.dist(i, j);
            }
        }
        FiniteMetricSpace {
            ids: pts.iter().map(|&i| self.ids[i].clone()).collect(),
            dist,
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n)
            .map(|i| self.dist[i * n..(i + 1) * n].to_vec())
            .collect()
    }

    /// Reads the CSV matrix format: a header row of point ids followed by one
    /// row of distances per point. Entries are decimals or the literal `inf`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        Self::from_csv_with_tolerance(reader, Tolerance::default())
    }

    pub fn from_csv_with_tolerance<R: Read>(reader: R, tol: Tolerance) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let ids: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(parse_distance)
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::with_tolerance(ids, rows, tol)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.ids.join(",");
        out.push('\n');
        for row in self.to_rows() {
            let cells: Vec<String> = row
                .iter()
                .map(|d| {
                    if d.is_infinite() {
                        "inf".to_string()
                    } else {
                        d.to_string()
                    }
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn parse_distance(s: &str) -> Result<f64> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") {
        return Ok(f64::INFINITY);
    }
    t.parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad distance entry {t:?}")))
}

/// Graph with positive edge weights. Vertex order is the insertion order.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    vertices: Vec<String>,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(String, String, f64)>) -> Result<Self> {
        let index: HashMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        if index.len() != vertices.len() {
            return Err(Error::InvalidGraph("duplicate vertex".into()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            let iu = *index
                .get(u.as_str())
                .ok_or_else(|| Error::UnknownPoint(u.clone()))?;
            let iv = *index
                .get(v.as_str())
                .ok_or_else(|| Error::UnknownPoint(v.clone()))?;
            if iu == iv {
                return Err(Error::InvalidGraph(format!("self-loop at {u:?}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge {u}-{v} has non-positive weight {w}"
                )));
            }
            if !seen.insert((iu.min(iv), iu.max(iv))) {
                return Err(Error::InvalidGraph(format!("duplicate edge {u}-{v}")));
            }
            out.push((iu, iv, w));
        }
        Ok(WeightedGraph {
            vertices,
            edges: out,
        })
    }

    /// Cycle graph on `n` vertices with uniform edge weight. Ids are zero-padded
    /// decimals so lexicographic and numeric order agree.
    pub fn cycle(n: usize, weight: f64) -> Result<Self> {
        let vertices = padded_ids(n);
        let edges = match n {
            0 | 1 => vec![],
            2 => vec![(vertices[0].clone(), vertices[1].clone(), weight)],
            _ => (0..n)
                .map(|i| (vertices[i].clone(), vertices[(i + 1) % n].clone(), weight))
                .collect(),
        };
        Self::new(vertices, edges)
    }

    /// Path graph `0 - 1 - ... - (n-1)` with the given edge weights.
    pub fn path(weights: &[f64]) -> Result<Self> {
        let vertices = padded_ids(weights.len() + 1);
        let edges = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (vertices[i].clone(), vertices[i + 1].clone(), w))
            .collect();
        Self::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, f64)> + '_ {
        self.edges
            .iter()
            .map(|&(u, v, w)| (self.vertices[u].as_str(), self.vertices[v].as_str(), w))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_integer_weights(&self) -> bool {
        self.edges
            .iter()
            .all(|&(_, _, w)| w.fract() == 0.0 && w < 9.0e15)
    }

    /// Subgraph induced on the named vertices.
    pub fn induced<S: AsRef<str>>(&self, subset: &[S]) -> Result<WeightedGraph> {
        let keep: BTreeSet<&str> = subset.iter().map(|s| s.as_ref()).collect();
        for s in &keep {
            if !self.vertices.iter().any(|v| v == s) {
                return Err(Error::UnknownPoint(s.to_string()));
            }
        }
        let vertices: Vec<String> = self
            .vertices
            .iter()
            .filter(|v| keep.contains(v.as_str()))
            .cloned()
            .collect();
        let edges = self
            .edges()
            .filter(|(u, v, _)| keep.contains(u) && keep.contains(v))
            .map(|(u, v, w)| (u.to_string(), v.to_string(), w))
            .collect();
        WeightedGraph::new(vertices, edges)
    }

    /// Parses `{"vertices":[...], "edges":[{"u":..,"v":..,"w":..}]}`. Vertex
    /// names may be JSON strings or numbers.
    pub fn from_json_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct RawEdge {
            u: serde_json::Value,
            v: serde_json::Value,
            w: f64,
        }
        #[derive(Deserialize)]
        struct RawGraph {
            vertices: Vec<serde_json::Value>,
            edges: Vec<RawEdge>,
        }
        fn name(v: &serde_json::Value) -> Result<String> {
            match v {
                serde_json::Value::String(s) => Ok(s.clone()),
                serde_json::Value::Number(n) => Ok(n.to_string()),
                other => Err(Error::Parse(format!("bad vertex name {other}"))),
            }
        }
        let raw: RawGraph = serde_json::from_str(s)?;
        let vertices = raw.vertices.iter().map(name).collect::<Result<Vec<_>>>()?;
        let edges = raw
            .edges
            .iter()
            .map(|e| Ok((name(&e.u)?, name(&e.v)?, e.w)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vertices, edges)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let edges: Vec<serde_json::Value> = self
            .edges()
            .map(|(u, v, w)| serde_json::json!({"u": u, "v": v, "w": w}))
            .collect();
        serde_json::json!({"vertices": self.vertices, "edges": edges})
    }

    fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(u, v, w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        adj
    }
}

fn padded_ids(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("{i:0width$}")).collect()
}

/// All-pairs shortest-path metric of a weighted graph.
///
/// Integer-weighted graphs are solved in exact `u64` arithmetic; otherwise
/// Dijkstra runs in `f64`. Unreachable pairs get `f64::INFINITY`.
pub fn shortest_path_metric(g: &WeightedGraph) -> FiniteMetricSpace {
    let n = g.vertices.len();
    let adj = g.adjacency();
    let rows: Vec<Vec<f64>> = if g.has_integer_weights() {
        let int_adj: Vec<Vec<(usize, u64)>> = adj
            .iter()
            .map(|nb| nb.iter().map(|&(v, w)| (v, w as u64)).collect())
            .collect();
        (0..n)
            .map(|s| {
                dijkstra_exact(&int_adj, s)
                    .into_iter()
                    .map(|d| d.map_or(f64::INFINITY, |d| d as f64))
                    .collect()
            })
            .collect()
    } else {
        (0..n).map(|s| dijkstra_float(&adj, s)).collect()
    };
    FiniteMetricSpace::new(g.vertices.clone(), rows)
        .expect("shortest-path distances always form a metric")
}

fn dijkstra_exact(adj: &[Vec<(usize, u64)>], source: usize) -> Vec<Option<u64>> {
    let mut dist: Vec<Option<u64>> = vec![None; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(0);
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some_and(|best| d > best) {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if dist[v].is_none_or(|cur| nd < cur) {
                dist[v] = Some(nd);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

#[derive(PartialEq)]
struct MinDist(f64, usize);

impl Eq for MinDist {}

impl PartialOrd for MinDist {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MinDist {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

fn dijkstra_float(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(MinDist(0.0, source));
    while let Some(MinDist(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(MinDist(nd, v));
            }
        }
    }
    dist
}

/// Unit-weight subdivision of an integer-weighted graph.
#[derive(Clone, Debug)]
pub struct SubdividedGraph {
    pub base: WeightedGraph,
    pub graph: WeightedGraph,
}

impl SubdividedGraph {
    pub fn added_vertex_count(&self) -> usize {
        self.graph.vertices.len() - self.base.vertices.len()
    }

    /// Shortest-path metric of the subdivision restricted to the base vertices.
    pub fn restricted_metric(&self) -> FiniteMetricSpace {
        let full = shortest_path_metric(&self.graph);
        let idx = full
            .indices_of(&self.base.vertices)
            .expect("base vertices survive subdivision");
        full.subspace(&idx)
    }
}

/// Replaces each edge of weight `w` by a path of `w` unit edges through
/// `w - 1` new vertices named `"{u}~{v}#{i}"`.
pub fn subdivide(g: &WeightedGraph) -> Result<SubdividedGraph> {
    let mut vertices = g.vertices.clone();
    let mut edges = Vec::new();
    for (u, v, w) in g.edges() {
        if !(w.fract() == 0.0 && (1.0..9.0e15).contains(&w)) {
            return Err(Error::NonIntegerWeight {
                u: u.to_string(),
                v: v.to_string(),
                weight: w,
            });
        }
        let steps = w as u64;
        let mut prev = u.to_string();
        for i in 1..steps {
            let mid = format!("{u}~{v}#{i}");
            vertices.push(mid.clone());
            edges.push((prev, mid.clone(), 1.0));
            prev = mid;
        }
        edges.push((prev, v.to_string(), 1.0));
    }
    let graph = WeightedGraph::new(vertices, edges)?;
    Ok(SubdividedGraph {
        base: g.clone(),
        graph,
    })
}

/// `n` equally spaced points on a circle of circumference `length`, with
/// arc-length distance.
pub fn sample_circle(n: usize, length: f64) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "circle needs at least one sample".into(),
        ));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bad circumference {length}"
        )));
    }
    let step = length / n as f64;
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let gap = i.abs_diff(j);
                    step * gap.min(n - gap) as f64
                })
                .collect()
        })
        .collect();
    FiniteMetricSpace::new(padded_ids(n), rows)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Inheritance {
    Inherited,
    /// A pair whose intrinsic distance exceeds the ambient one.
    Violated {
        pair: (String, String),
        intrinsic: f64,
        ambient: f64,
    },
}

impl Inheritance {
    pub fn is_inherited(&self) -> bool {
        matches!(self, Inheritance::Inherited)
    }
}

/// Compares an intrinsic metric on `subset` with the ambient metric.
///
/// `intrinsic` must have exactly the points of `subset` (by id). The first
/// pair in canonical order with a strictly larger intrinsic distance is
/// reported as the witness.
pub fn metric_inheritance_check(
    ambient: &FiniteMetricSpace,
    subset: &[usize],
    intrinsic: &FiniteMetricSpace,
    tol: Tolerance,
) -> Result<Inheritance> {
    let sub = ambient.subspace(subset);
    if sub.ids() != intrinsic.ids() {
        return Err(Error::InvalidArgument(
            "intrinsic metric does not live on the given subset".into(),
        ));
    }
    let n = sub.len();
    let mut witness = None;
    for i in 0..n {
        for j in i + 1..n {
            let (amb, intr) = (sub.dist(i, j), intrinsic.dist(i, j));
            if tol.gt(amb, intr) {
                return Err(Error::MetricContradiction {
                    a: sub.id(i).to_string(),
                    b: sub.id(j).to_string(),
                    intrinsic: intr,
                    ambient: amb,
                });
            }
            if witness.is_none() && tol.gt(intr, amb) {
                witness = Some(Inheritance::Violated {
                    pair: (sub.id(i).to_string(), sub.id(j).to_string()),
                    intrinsic: intr,
                    ambient: amb,
                });
            }
        }
    }
    Ok(witness.unwrap_or(Inheritance::Inherited))
}

/// Inheritance check for an induced subgraph: intrinsic distances are
/// shortest paths inside the subgraph induced on `subset`.
pub fn induced_subgraph_inheritance<S: AsRef<str>>(
    g: &WeightedGraph,
    subset: &[S],
    tol: Tolerance,
) -> Result<Inheritance> {
    let ambient = shortest_path_metric(g);
    let idx = ambient.indices_of(subset)?;
    let intrinsic = shortest_path_metric(&g.induced(subset)?);
    metric_inheritance_check(&ambient, &idx, &intrinsic, tol)
}
