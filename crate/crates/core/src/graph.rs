//! Simple undirected graphs, seeded `G(n, p)` sampling, and component
//! analysis of induced subgraphs.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::scalar::check_unit_interval;

/// Seed for every random procedure in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Stream identifier written into experiment artifacts.
    pub const STREAM: &'static str = "chacha8-seed_from_u64/v1";

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent sub-seed for sample `index` of a batch.
    pub fn derive(self, index: u64) -> RngSeed {
        RngSeed(self.0 ^ index)
    }
}

/// Simple undirected graph on vertices `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adjacency: vec![Vec::new(); n] }
    }

    pub fn complete(n: usize) -> Self {
        let adjacency = (0..n).map(|v| (0..n).filter(|&u| u != v).collect()).collect();
        Graph { adjacency }
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_edges(n, &edges).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        if n >= 3 {
            edges.push((0, n - 1));
        }
        Self::from_edges(n, &edges).expect("cycle edges are valid")
    }

    /// Builds a graph from an edge list. Rejects loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return param(format!("edge ({u}, {v}) out of range for n = {n}"));
            }
            if u == v {
                return param(format!("self-loop at vertex {u}"));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (v, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return param(format!("duplicate edge at vertex {v}"));
            }
        }
        Ok(Graph { adjacency })
    }

    /// Builds a graph on `n` vertices keeping the pairs `(u, v)`, `u < v`, for
    /// which `keep` returns true.
    pub fn from_fn(n: usize, mut keep: impl FnMut(usize, usize) -> bool) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for u in 0..n {
            for v in (u + 1)..n {
                if keep(u, v) {
                    adjacency[u].push(v);
                    adjacency[v].push(u);
                }
            }
        }
        Graph { adjacency }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Subgraph induced by `vertices`, relabelled `0..len` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        Graph::from_fn(vertices.len(), |i, j| self.has_edge(vertices[i], vertices[j]))
    }

    /// Serialises to the edge-list text format: `n m` then one `u v` per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n(), self.edge_count()).unwrap();
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    /// Parses the edge-list text format. Edges must satisfy `0 <= u < v < n`.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "missing header".into() })?;
        let (n, m) = parse_pair(header, 1)?;
        let mut edges = Vec::with_capacity(m);
        for (idx, line) in lines {
            let lineno = idx + 1;
            let (u, v) = parse_pair(line, lineno)?;
            if !(u < v && v < n) {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("edge '{u} {v}' must satisfy 0 <= u < v < {n}"),
                });
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse { line: 1, message: format!("header declares {m} edges, found {}", edges.len()) });
        }
        Graph::from_edges(n, &edges).map_err(|e| Error::Parse { line: 0, message: e.to_string() })
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let bad = || Error::Parse { line: lineno, message: format!("expected two integers, got '{line}'") };
    let a = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    let b = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    if it.next().is_some() {
        return Err(bad());
    }
    Ok((a, b))
}

/// Samples `G(n, p)`.
///
/// Pairs are visited in lexicographic order `(0,1), (0,2), ..., (n-2,n-1)`; each
/// consumes one `f64` draw `x` in `[0, 1)` from [`RngSeed::rng`] and the edge is
/// present iff `x < p`.
pub fn sample_gnp(n: usize, p: f64, seed: RngSeed) -> Result<Graph> {
    check_unit_interval(p, "edge probability p")?;
    let mut rng = seed.rng();
    Ok(Graph::from_fn(n, |_, _| rng.random::<f64>() < p))
}

/// Sorted, duplicate-free set of vertex indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        VertexSet(members)
    }

    pub fn all(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    fn check_in(&self, g: &Graph) -> Result<()> {
        match self.0.last() {
            Some(&v) if v >= g.n() => param(format!("vertex {v} out of range for n = {}", g.n())),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter.into_iter().collect())
    }
}

/// Connected components of an induced subgraph. `max_order` is 0 only for the
/// empty set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentProfile {
    pub components: Vec<VertexSet>,
    pub max_order: usize,
}

/// Components of `G[S]` by breadth-first search restricted to `S`.
pub fn components(g: &Graph, s: &VertexSet) -> Result<ComponentProfile> {
    s.check_in(g)?;
    let members = s.members();
    let mut seen = vec![false; members.len()];
    let mut comps = Vec::new();
    let mut queue = Vec::new();
    for start in 0..members.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.clear();
        queue.push(start);
        let mut head = 0;
        while head < queue.len() {
            let v = members[queue[head]];
            head += 1;
            for w in g.neighbors(v) {
                if let Ok(j) = members.binary_search(w) {
                    if !seen[j] {
                        seen[j] = true;
                        queue.push(j);
                    }
                }
            }
        }
        comps.push(queue.iter().map(|&j| members[j]).collect::<VertexSet>());
    }
    let max_order = comps.iter().map(VertexSet::len).max().unwrap_or(0);
    Ok(ComponentProfile { components: comps, max_order })
}

/// Whether every component of `G[S]` has at most `t` vertices.
pub fn is_t_component_set(g: &Graph, s: &VertexSet, t: usize) -> Result<bool> {
    if t < 1 {
        return param("t must be at least 1");
    }
    Ok(components(g, s)?.max_order <= t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> VertexSet {
        VertexSet::new(v.to_vec())
    }

    #[test]
    fn forced_samples() {
        let g = sample_gnp(5, 0.0, RngSeed(1)).unwrap();
        assert_eq!(g, Graph::empty(5));
        let g = sample_gnp(5, 1.0, RngSeed(1)).unwrap();
        assert_eq!(g, Graph::complete(5));
        assert!(sample_gnp(5, 1.5, RngSeed(1)).is_err());
        assert!(sample_gnp(5, -0.1, RngSeed(1)).is_err());
        assert_eq!(sample_gnp(0, 0.5, RngSeed(3)).unwrap().n(), 0);
    }

    #[test]
    fn component_examples() {
        let path = Graph::path(4);
        let prof = components(&path, &set(&[0, 1, 3])).unwrap();
        assert_eq!(prof.components, vec![set(&[0, 1]), set(&[3])]);
        assert_eq!(prof.max_order, 2);

        let k4 = Graph::complete(4);
        let prof = components(&k4, &VertexSet::all(4)).unwrap();
        assert_eq!(prof.components.len(), 1);
        assert_eq!(prof.max_order, 4);

        let prof = components(&Graph::empty(6), &VertexSet::all(6)).unwrap();
        assert_eq!(prof.components.len(), 6);
        assert_eq!(prof.max_order, 1);

        assert!(components(&k4, &set(&[1, 4])).is_err());
    }

    #[test]
    fn t_component_examples() {
        let k4 = Graph::complete(4);
        assert!(!is_t_component_set(&k4, &set(&[0, 1, 2]), 2).unwrap());
        assert!(is_t_component_set(&k4, &VertexSet::default(), 1).unwrap());
        assert!(is_t_component_set(&Graph::path(4), &set(&[0, 1, 3]), 2).unwrap());
        assert!(is_t_component_set(&k4, &set(&[0]), 0).is_err());
    }

    #[test]
    fn edge_list_round_trip_and_errors() {
        let g = Graph::cycle(5);
        let text = g.to_edge_list();
        assert_eq!(text, "5 5\n0 1\n0 4\n1 2\n2 3\n3 4\n");
        assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);

        let err = Graph::parse_edge_list("3 1\n2 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(Graph::parse_edge_list("3 2\n0 1\n").is_err());
        assert!(Graph::parse_edge_list("3 1\n0 3\n").is_err());
        assert!(Graph::parse_edge_list("").is_err());
        assert!(Graph::parse_edge_list("3 2\n0 1\n0 1\n").is_err());
    }

    #[test]
    fn from_edges_rejects_loops() {
        assert!(Graph::from_edges(3, &[(1, 1)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 5)]).is_err());
    }
}
