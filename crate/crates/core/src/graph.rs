//! Simple undirected graphs, vertex-weighted graphs and co-partite graphs.

use crate::error::{Error, Result};
use crate::structures::{RelStructure, Vocabulary, Weight};
use std::collections::BTreeSet;

/// Simple undirected graph on `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    num_edges: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges are merged;
    /// self-loops and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!("too many vertices: {n}")));
        }
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInstance(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("self-loop at {u}")));
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        Ok(Self::from_adjacency(adj))
    }

    /// Sorts and dedups each list. The caller guarantees symmetry and no
    /// self-loops.
    pub(crate) fn from_adjacency(mut adj: Vec<Vec<u32>>) -> Self {
        let mut twice = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Graph {
            adj,
            num_edges: twice / 2,
        }
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            num_edges: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|u| (0..n as u32).filter(|&v| v as usize != u).collect())
            .collect();
        Graph {
            adj,
            num_edges: n * n.saturating_sub(1) / 2,
        }
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter("a cycle needs at least 3 vertices".into()));
        }
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u, v as usize))
        })
    }

    pub fn is_regular(&self, d: usize) -> bool {
        self.adj.iter().all(|l| l.len() == d)
    }

    pub fn is_vertex_cover(&self, set: &[bool]) -> bool {
        self.edges().all(|(u, v)| set[u] || set[v])
    }

    pub fn is_independent(&self, set: &[bool]) -> bool {
        self.edges().all(|(u, v)| !(set[u] && set[v]))
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| {
            vertices[i + 1..].iter().all(|&v| self.has_edge(u, v))
        })
    }

    pub fn complement(&self) -> Graph {
        let n = self.num_vertices();
        let adj = (0..n)
            .map(|u| {
                (0..n as u32)
                    .filter(|&v| v as usize != u && !self.has_edge(u, v as usize))
                    .collect()
            })
            .collect();
        Graph::from_adjacency(adj)
    }

    /// `self` on `0..n`, `other` shifted to `n..n+n'`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.num_vertices() as u32;
        let mut adj = self.adj.clone();
        adj.extend(
            other
                .adj
                .iter()
                .map(|l| l.iter().map(|&v| v + shift).collect::<Vec<_>>()),
        );
        Graph {
            adj,
            num_edges: self.num_edges + other.num_edges,
        }
    }

    /// The graph as a structure with one symmetric binary relation `E`.
    pub fn to_structure(&self) -> RelStructure {
        let vocab = Vocabulary::new(vec![("E".to_string(), 2)]).expect("static vocabulary");
        let rel: BTreeSet<Vec<usize>> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().map(move |&v| vec![u, v as usize]))
            .collect();
        RelStructure::new(vocab, self.num_vertices(), vec![rel]).expect("graph structure")
    }

    /// Image of the graph under the vertex renaming `perm`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let mut adj = vec![Vec::new(); self.num_vertices()];
        for (u, l) in self.adj.iter().enumerate() {
            adj[perm[u]] = l.iter().map(|&v| perm[v as usize] as u32).collect();
        }
        Graph::from_adjacency(adj)
    }
}

/// Graph with positive integer vertex weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    graph: Graph,
    weights: Vec<Weight>,
}

impl WeightedGraph {
    pub fn new(graph: Graph, weights: Vec<Weight>) -> Result<Self> {
        if weights.len() != graph.num_vertices() {
            return Err(Error::LengthMismatch {
                expected: graph.num_vertices(),
                got: weights.len(),
            });
        }
        if let Some(v) = weights.iter().position(|&w| w == 0) {
            return Err(Error::InvalidInstance(format!("vertex {v} has weight 0")));
        }
        Ok(WeightedGraph { graph, weights })
    }

    pub fn unit(graph: Graph) -> Self {
        let weights = vec![1; graph.num_vertices()];
        WeightedGraph { graph, weights }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> Weight {
        self.weights[v]
    }

    /// `W_0`, or `None` on overflow.
    pub fn total_weight(&self) -> Option<Weight> {
        self.weights.iter().try_fold(0u64, |acc, &w| acc.checked_add(w))
    }

    pub fn set_weight(&self, set: &[bool]) -> Weight {
        self.weights
            .iter()
            .zip(set)
            .filter(|(_, &s)| s)
            .map(|(w, _)| w)
            .sum()
    }
}

/// A graph whose vertex set is partitioned into `m` cliques of equal size
/// `r`; equivalently the complement of an `m`-partite graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoPartiteGraph {
    graph: Graph,
    parts: Vec<Vec<usize>>,
}

impl CoPartiteGraph {
    /// Checks that `parts` partitions the vertices into cliques of one size.
    pub fn new(graph: Graph, parts: Vec<Vec<usize>>) -> Result<Self> {
        let n = graph.num_vertices();
        let mut seen = vec![false; n];
        let r = parts.first().map_or(0, |p| p.len());
        for part in &parts {
            if part.len() != r {
                return Err(Error::InvalidInstance("parts have different sizes".into()));
            }
            for &v in part {
                if v >= n || seen[v] {
                    return Err(Error::InvalidInstance(format!(
                        "vertex {v} is out of range or in two parts"
                    )));
                }
                seen[v] = true;
            }
            if !graph.is_clique(part) {
                return Err(Error::InvalidInstance(format!("part {part:?} is not a clique")));
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidInstance("parts do not cover the vertices".into()));
        }
        Ok(CoPartiteGraph { graph, parts })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn part_size(&self) -> usize {
        self.parts.first().map_or(0, |p| p.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_graph_ops() {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (1, 0)]).unwrap();
        assert_eq!(g.num_edges(), 3);
        assert!(g.has_edge(2, 1));
        assert!(!g.has_edge(0, 2));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 3)]);
        assert!(Graph::new(2, [(0, 0)]).is_err());
        assert_eq!(Graph::complete(4).num_edges(), 6);
        assert_eq!(g.complement().num_edges(), 3);
        let u = g.disjoint_union(&Graph::complete(3));
        assert_eq!(u.num_vertices(), 7);
        assert!(u.has_edge(4, 6));
    }

    #[test]
    fn copartite_validation() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(CoPartiteGraph::new(g.clone(), vec![vec![0, 1], vec![2, 3]]).is_ok());
        assert!(CoPartiteGraph::new(g.clone(), vec![vec![0, 2], vec![1, 3]]).is_err());
        assert!(CoPartiteGraph::new(g, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn weighted_graph_rejects_zero() {
        let g = Graph::complete(2);
        assert!(WeightedGraph::new(g.clone(), vec![1, 0]).is_err());
        assert_eq!(WeightedGraph::new(g, vec![2, 3]).unwrap().total_weight(), Some(5));
    }
}
