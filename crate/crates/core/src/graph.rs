//! Simple undirected graphs on dense vertex ids and the component-level
//! predicates the rest of the crate is built on.
//!
//! A vertex set `S` is *c-clustered* when every connected component of the
//! induced subgraph `G[S]` has at most `c` vertices. Subsets are passed around
//! as slices of vertex ids; order and duplicates are irrelevant.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An immutable simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    /// Builds a graph, rejecting loops, duplicates, and out-of-range ids.
    /// Edge orientation is irrelevant here; the JSON reader is stricter.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            check_vertex(u, n)?;
            check_vertex(v, n)?;
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Graph { n, adj, m: edges.len() })
    }

    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Graph { n, adj: vec![Vec::new(); n], m: 0 }
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::new(n, &edges).expect("complete graph is simple")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::new(n, &edges).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((0, n - 1));
        Graph::new(n, &edges).expect("cycle is simple")
    }

    /// Builds a graph from edges that may contain repeats; repeats collapse.
    pub(crate) fn from_edge_set(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            debug_assert!(u != v && u < n && v < n);
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut m = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            m += list.len();
        }
        Graph { n, adj, m: m / 2 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// True when `other` has the same vertex count and a superset of our edges.
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.edges().all(|(u, v)| other.has_edge(u, v))
    }

    pub fn check_subset(&self, s: &[usize]) -> Result<()> {
        s.iter().try_for_each(|&v| check_vertex(v, self.n))
    }

    /// Connected components of `G[s]`, each sorted, ordered by smallest member.
    pub fn components(&self, s: &[usize]) -> Result<Vec<Vec<usize>>> {
        self.check_subset(s)?;
        let mut inside = vec![false; self.n];
        for &v in s {
            inside[v] = true;
        }
        let mut seen = vec![false; self.n];
        let mut order: Vec<usize> = s.to_vec();
        order.sort_unstable();
        order.dedup();
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for &start in &order {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            stack.push(start);
            let mut comp = Vec::new();
            while let Some(x) = stack.pop() {
                comp.push(x);
                for &y in &self.adj[x] {
                    if inside[y] && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        Ok(out)
    }

    /// Largest component of `G[s]`; zero for the empty set.
    pub fn max_component_size(&self, s: &[usize]) -> Result<usize> {
        Ok(self.components(s)?.iter().map(Vec::len).max().unwrap_or(0))
    }

    pub fn is_c_clustered(&self, s: &[usize], c: usize) -> Result<bool> {
        if c == 0 {
            return Err(Error::ZeroClusterCap);
        }
        Ok(self.max_component_size(s)? <= c)
    }

    /// Subgraph induced by `keep`; returns the graph and the map from new ids to old ids.
    pub fn induced(&self, keep: &[usize]) -> (Graph, Vec<usize>) {
        let mut ids: Vec<usize> = keep.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in ids.iter().enumerate() {
            local[v] = i;
        }
        let edges = ids.iter().flat_map(|&u| {
            let local = &local;
            self.adj[u]
                .iter()
                .filter(move |&&v| v > u && local[v] != usize::MAX)
                .map(move |&v| (local[u], local[v]))
        });
        (Graph::from_edge_set(ids.len(), edges), ids)
    }

    /// Connected components of the whole graph.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.n).collect();
        self.components(&all).expect("all vertices are in range")
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson { n: self.n, edges: self.edges().map(|(u, v)| [u, v]).collect() }
    }

    /// Graphviz rendering with nodes labelled by id; `highlight` vertices are filled.
    pub fn to_dot(&self, highlight: &[usize]) -> String {
        let mut marked = vec![false; self.n];
        for &v in highlight {
            if v < self.n {
                marked[v] = true;
            }
        }
        let mut out = String::from("graph G {\n");
        for (v, &m) in marked.iter().enumerate() {
            if m {
                let _ = writeln!(out, "  {v} [label=\"{v}\", style=filled, fillcolor=gray];");
            } else {
                let _ = writeln!(out, "  {v} [label=\"{v}\"];");
            }
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

fn check_vertex(v: usize, n: usize) -> Result<()> {
    if v >= n {
        Err(Error::VertexOutOfRange { vertex: v, n })
    } else {
        Ok(())
    }
}

/// Vertex-disjoint union; the vertices of `gs[i]` are shifted by the sizes of `gs[..i]`.
pub fn disjoint_union(gs: &[Graph]) -> Graph {
    let total: usize = gs.iter().map(Graph::n).sum();
    let mut offset = 0;
    let mut edges = Vec::new();
    for g in gs {
        edges.extend(g.edges().map(|(u, v)| (u + offset, v + offset)));
        offset += g.n();
    }
    Graph::from_edge_set(total, edges)
}

/// Wire format: `{"n": 4, "edges": [[0,1],[1,2]]}` with `u < v` on every edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(json: GraphJson) -> Result<Graph> {
        if let Some(e) = json.edges.iter().find(|e| e[0] > e[1]) {
            return Err(Error::UnorderedEdge(e[0], e[1]));
        }
        let edges: Vec<(usize, usize)> = json.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::new(json.n, &edges)
    }
}

impl Graph {
    pub fn from_json_str(s: &str) -> Result<Graph> {
        let json: GraphJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Graph::try_from(json)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("graph json serializes")
    }
}

/// A vertex set whose clustering bound has been checked against its graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusteredSet {
    c: usize,
    vertices: Vec<usize>,
}

impl ClusteredSet {
    /// Verifies that `vertices` is c-clustered in `g`.
    pub fn new(g: &Graph, mut vertices: Vec<usize>, c: usize) -> Result<Self> {
        if c == 0 {
            return Err(Error::ZeroClusterCap);
        }
        vertices.sort_unstable();
        vertices.dedup();
        let size = g.max_component_size(&vertices)?;
        if size > c {
            return Err(Error::NotClustered { c, size });
        }
        Ok(ClusteredSet { c, vertices })
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn into_vertices(self) -> Vec<usize> {
        self.vertices
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_of_path_split_by_gap() {
        let g = Graph::path(3);
        assert_eq!(g.components(&[0, 2]).unwrap(), vec![vec![0], vec![2]]);
        assert!(g.components(&[]).unwrap().is_empty());
        let tri = Graph::complete(3);
        assert_eq!(tri.components(&[0, 1, 2]).unwrap(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn components_reject_out_of_range() {
        let g = Graph::path(3);
        assert_eq!(g.components(&[5]), Err(Error::VertexOutOfRange { vertex: 5, n: 3 }));
    }

    #[test]
    fn clustered_on_path_of_four() {
        let g = Graph::path(4);
        assert!(g.is_c_clustered(&[0, 1, 3], 2).unwrap());
        assert!(!g.is_c_clustered(&[0, 1, 2], 2).unwrap());
        assert_eq!(g.is_c_clustered(&[0], 0), Err(Error::ZeroClusterCap));
    }

    #[test]
    fn octahedron_matching_pairs_are_two_clustered() {
        // K_{2,2,2}: antipodal pairs {0,1}, {2,3}, {4,5} are the non-edges.
        let edges: Vec<_> = (0..6)
            .flat_map(|u| (u + 1..6).map(move |v| (u, v)))
            .filter(|&(u, v)| u / 2 != v / 2)
            .collect();
        let g = Graph::new(6, &edges).unwrap();
        assert!(g.is_c_clustered(&[0, 2], 2).unwrap());
        assert!(!g.is_c_clustered(&[0, 2, 4], 2).unwrap());
    }

    #[test]
    fn constructor_rejects_bad_edges() {
        assert_eq!(Graph::new(2, &[(0, 0)]), Err(Error::SelfLoop(0)));
        assert_eq!(Graph::new(2, &[(0, 1), (1, 0)]), Err(Error::DuplicateEdge(0, 1)));
        assert_eq!(Graph::new(2, &[(0, 2)]), Err(Error::VertexOutOfRange { vertex: 2, n: 2 }));
    }

    #[test]
    fn json_reader_is_strict() {
        let g = Graph::from_json_str(r#"{"n":3,"edges":[[0,1],[1,2]]}"#).unwrap();
        assert_eq!(g, Graph::path(3));
        assert_eq!(
            Graph::from_json_str(r#"{"n":3,"edges":[[1,0]]}"#),
            Err(Error::UnorderedEdge(1, 0))
        );
        assert!(Graph::from_json_str(r#"{"n":3,"edges":[[0,1],[0,1]]}"#).is_err());
        assert!(Graph::from_json_str(r#"{"n":3,"edges":[[1,1]]}"#).is_err());
        assert_eq!(Graph::from_json_str(&g.to_json_string()).unwrap(), g);
    }

    #[test]
    fn union_offsets_vertices() {
        assert_eq!(disjoint_union(&[]).n(), 0);
        let u = disjoint_union(&[Graph::complete(3), Graph::path(2)]);
        assert_eq!(u.n(), 5);
        assert_eq!(u.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2), (3, 4)]);
    }

    #[test]
    fn induced_relabels() {
        let g = Graph::cycle(5);
        let (h, ids) = g.induced(&[4, 0, 1]);
        assert_eq!(ids, vec![0, 1, 4]);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn dot_lists_every_edge() {
        let dot = Graph::path(3).to_dot(&[1]);
        assert!(dot.contains("0 -- 1;") && dot.contains("1 -- 2;"));
        assert!(dot.contains("fillcolor"));
    }

    #[test]
    fn clustered_set_checks_bound() {
        let g = Graph::path(4);
        assert!(ClusteredSet::new(&g, vec![0, 1, 3], 2).is_ok());
        assert_eq!(
            ClusteredSet::new(&g, vec![0, 1, 2], 2),
            Err(Error::NotClustered { c: 2, size: 3 })
        );
    }
}
