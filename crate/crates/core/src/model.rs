//! k-tree models and rooted 2-trees.
//!
//! A k-tree model of a graph `G` is a rooted tree `T` on `V(G)` with labels in
//! `1..=k+1` such that every edge `uv` joins two differently labelled vertices,
//! one of which is the lowest ancestor of the other carrying its label. The
//! graphs admitting a k-tree model are exactly the graphs of treewidth at most
//! `k`; the *edge-maximal* graph of a model joins every vertex to its lowest
//! ancestor of each other label, and is a k-tree when every non-root vertex
//! has a full set of `k` ancestors below it.
//!
//! A [`RootedTwoTree`] is the construction-sequence view of a 2-tree: a base
//! edge, then vertices attached one by one to the endpoints of an existing edge.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A rooted tree over `0..n` with labels in `1..=k+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KTreeModel {
    k: usize,
    root: usize,
    parent: Vec<Option<usize>>,
    label: Vec<usize>,
}

impl KTreeModel {
    /// Checks the standalone invariants: one root, acyclic parent links, labels in range.
    pub fn new(k: usize, root: usize, parent: Vec<Option<usize>>, label: Vec<usize>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::InvalidModel("model has no vertices".into()));
        }
        if label.len() != n {
            return Err(Error::InvalidModel(format!(
                "{} parent entries but {} labels",
                n,
                label.len()
            )));
        }
        if root >= n || parent[root].is_some() {
            return Err(Error::InvalidModel(format!("root {root} must exist and have no parent")));
        }
        if let Some(v) = (0..n).find(|&v| v != root && parent[v].is_none()) {
            return Err(Error::InvalidModel(format!("vertex {v} has no parent but is not the root")));
        }
        if let Some(v) = (0..n).find(|&v| parent[v].is_some_and(|p| p >= n)) {
            return Err(Error::InvalidModel(format!("parent of {v} out of range")));
        }
        if let Some(v) = (0..n).find(|&v| label[v] == 0 || label[v] > k + 1) {
            return Err(Error::InvalidModel(format!(
                "label {} of vertex {v} outside 1..={}",
                label[v],
                k + 1
            )));
        }
        let m = KTreeModel { k, root, parent, label };
        if m.bfs_order().len() != n {
            return Err(Error::InvalidModel("parent links contain a cycle".into()));
        }
        Ok(m)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn label(&self, v: usize) -> usize {
        self.label[v]
    }

    pub fn parents_slice(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn labels(&self) -> &[usize] {
        &self.label
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.n()];
        for v in 0..self.n() {
            if let Some(p) = self.parent[v] {
                ch[p].push(v);
            }
        }
        ch
    }

    /// Vertices in breadth-first order from the root (ancestors before descendants).
    pub fn bfs_order(&self) -> Vec<usize> {
        let ch = self.children();
        let mut order = Vec::with_capacity(self.n());
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            queue.extend(ch[v].iter().copied());
        }
        order
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.n()];
        for v in self.bfs_order() {
            if let Some(p) = self.parent[v] {
                depth[v] = depth[p] + 1;
            }
        }
        depth
    }

    /// `table[v][l]` is the lowest proper ancestor of `v` with label `l`.
    pub fn lowest_ancestors(&self) -> Vec<Vec<Option<usize>>> {
        let mut table = vec![vec![None; self.k + 2]; self.n()];
        for v in self.bfs_order() {
            if let Some(p) = self.parent[v] {
                let mut row = table[p].clone();
                row[self.label[p]] = Some(p);
                table[v] = row;
            }
        }
        table
    }

    /// Entry/exit times of a DFS; `a` is an ancestor of `d` iff `tin[a] <= tin[d] && tout[d] <= tout[a]`.
    pub(crate) fn euler_times(&self) -> (Vec<usize>, Vec<usize>) {
        let ch = self.children();
        let n = self.n();
        let (mut tin, mut tout) = (vec![0; n], vec![0; n]);
        let mut clock = 0;
        let mut stack = vec![(self.root, false)];
        while let Some((v, done)) = stack.pop() {
            if done {
                tout[v] = clock;
                clock += 1;
                continue;
            }
            tin[v] = clock;
            clock += 1;
            stack.push((v, true));
            for &c in ch[v].iter().rev() {
                stack.push((c, false));
            }
        }
        (tin, tout)
    }

    /// Number of proper descendants of each vertex.
    pub fn descendant_counts(&self) -> Vec<usize> {
        let mut count = vec![0; self.n()];
        for &v in self.bfs_order().iter().rev() {
            if let Some(p) = self.parent[v] {
                count[p] += count[v] + 1;
            }
        }
        count
    }

    pub fn to_json(&self) -> ModelJson {
        ModelJson {
            k: self.k,
            root: self.root,
            parent: self.parent.iter().map(|p| p.map_or(-1, |p| p as i64)).collect(),
            label: self.label.clone(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("model json serializes")
    }
}

/// Why an edge of the graph is not explained by the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationReason {
    EqualLabels,
    NotLowestAncestor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeViolation {
    pub u: usize,
    pub v: usize,
    pub reason: ViolationReason,
}

/// Lists every edge of `g` that breaks the model conditions; empty means valid.
pub fn model_violations(m: &KTreeModel, g: &Graph) -> Result<Vec<EdgeViolation>> {
    if m.n() != g.n() {
        return Err(Error::ModelMismatch(format!(
            "model has {} vertices, graph has {}",
            m.n(),
            g.n()
        )));
    }
    let low = m.lowest_ancestors();
    let mut out = Vec::new();
    for (u, v) in g.edges() {
        let reason = if m.label[u] == m.label[v] {
            Some(ViolationReason::EqualLabels)
        } else if low[v][m.label[u]] == Some(u) || low[u][m.label[v]] == Some(v) {
            None
        } else {
            Some(ViolationReason::NotLowestAncestor)
        };
        if let Some(reason) = reason {
            out.push(EdgeViolation { u, v, reason });
        }
    }
    Ok(out)
}

pub fn validate_model(m: &KTreeModel, g: &Graph) -> Result<()> {
    let bad = model_violations(m, g)?;
    match bad.first() {
        None => Ok(()),
        Some(e) => Err(Error::ModelMismatch(format!(
            "{} violating edge(s), first {}-{}: {:?}",
            bad.len(),
            e.u,
            e.v,
            e.reason
        ))),
    }
}

/// Joins every vertex to its lowest ancestor of each other label.
pub fn edge_maximal_graph(m: &KTreeModel) -> Graph {
    let low = m.lowest_ancestors();
    let edges = (0..m.n()).flat_map(|v| {
        let row = &low[v];
        let own = m.label[v];
        (1..=m.k + 1).filter(move |&l| l != own).filter_map(move |l| row[l].map(|a| (a, v)))
    });
    Graph::from_edge_set(m.n(), edges)
}

/// G-neighbours of each vertex that are its ancestors in the model tree.
pub fn model_parents(m: &KTreeModel, g: &Graph) -> Vec<Vec<usize>> {
    let (tin, tout) = m.euler_times();
    (0..m.n())
        .map(|v| {
            g.neighbors(v)
                .iter()
                .copied()
                .filter(|&u| tin[u] < tin[v] && tout[v] < tout[u])
                .collect()
        })
        .collect()
}

/// Rewrites a valid model of `g` so that no tree edge joins equal labels.
///
/// A child `u` whose tree parent shares its label is re-hung below its lowest
/// ancestor with a different label; when there is none, the labels inside the
/// subtree of `u` are permuted instead. Each step removes one offending tree
/// edge. The loop is capped at `n^2` steps.
pub fn normalize_distinct_tree_edge_labels(m: &KTreeModel, g: &Graph) -> Result<KTreeModel> {
    validate_model(m, g)?;
    let mut parent = m.parent.clone();
    let mut label = m.label.clone();
    let n = m.n();
    let cap = n * n + 1;
    for _ in 0..cap {
        let cur = KTreeModel { k: m.k, root: m.root, parent: parent.clone(), label: label.clone() };
        let bad = cur
            .bfs_order()
            .into_iter()
            .find(|&v| parent[v].is_some_and(|p| label[p] == label[v]));
        let Some(u) = bad else {
            debug_assert!(validate_model(&cur, g).is_ok());
            return Ok(cur);
        };
        let mut w = parent[u];
        while let Some(x) = w {
            if label[x] != label[u] {
                break;
            }
            w = parent[x];
        }
        match w {
            Some(w) => parent[u] = Some(w),
            None => {
                let from = label[u];
                let to = if from == 1 { 2 } else { 1 };
                let ch = cur.children();
                let mut stack = vec![u];
                while let Some(x) = stack.pop() {
                    if label[x] == from {
                        label[x] = to;
                    } else if label[x] == to {
                        label[x] = from;
                    }
                    stack.extend(ch[x].iter().copied());
                }
            }
        }
    }
    Err(Error::CapExceeded(format!("normalization did not settle within {cap} steps")))
}

/// Removes a non-root vertex by hanging its children under its parent; labels are kept.
/// Vertices above `v` keep their ids, the rest shift down by one, matching
/// [`Graph::induced`] on `V - v`.
pub fn contract_discard(m: &KTreeModel, v: usize) -> Result<KTreeModel> {
    if v >= m.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: m.n() });
    }
    let Some(up) = m.parent[v] else {
        return Err(Error::InvalidParameter(format!("cannot contract the root {v}")));
    };
    let shift = |x: usize| if x > v { x - 1 } else { x };
    let mut parent = Vec::with_capacity(m.n() - 1);
    let mut label = Vec::with_capacity(m.n() - 1);
    for x in (0..m.n()).filter(|&x| x != v) {
        let p = m.parent[x].map(|p| if p == v { up } else { p });
        parent.push(p.map(shift));
        label.push(m.label[x]);
    }
    KTreeModel::new(m.k, shift(m.root), parent, label)
}

/// Deterministic random k-tree on `n` vertices together with a model of it.
///
/// Starts from `K_{k+1}` laid out as a labelled path; every further vertex picks
/// a uniform existing vertex `y`, drops one of the parents of `y`, and attaches
/// below `y` to the resulting k-clique, taking the label of the dropped parent.
pub fn random_ktree(k: usize, n: usize, seed: u64) -> Result<(Graph, KTreeModel)> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if n < k + 1 {
        return Err(Error::InvalidParameter(format!("a {k}-tree needs at least {} vertices", k + 1)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parent = vec![None];
    let mut label = vec![1];
    let mut cliques: Vec<Vec<usize>> = vec![Vec::new()];
    for i in 1..=k {
        parent.push(Some(i - 1));
        label.push(i + 1);
        cliques.push((0..i).collect());
    }
    while parent.len() < n {
        let y = rng.gen_range(0..parent.len());
        let (clique, lab) = if cliques[y].len() == k {
            let drop = *cliques[y].choose(&mut rng).expect("k >= 1");
            let mut c: Vec<usize> = cliques[y].iter().copied().filter(|&a| a != drop).collect();
            c.push(y);
            (c, label[drop])
        } else if y + 1 == k {
            let mut c = cliques[y].clone();
            c.push(y);
            (c, k + 1)
        } else {
            continue;
        };
        parent.push(Some(y));
        label.push(lab);
        cliques.push(clique);
    }
    let m = KTreeModel::new(k, 0, parent, label)?;
    let g = edge_maximal_graph(&m);
    Ok((g, m))
}

/// A 2-tree given by its construction sequence from a base edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTwoTree {
    root_edge: (usize, usize),
    attachments: Vec<(usize, usize, usize)>,
}

impl RootedTwoTree {
    /// Checks that ids cover `0..n` exactly once and every attachment uses an existing edge.
    pub fn new(root_edge: (usize, usize), attachments: Vec<(usize, usize, usize)>) -> Result<Self> {
        let n = attachments.len() + 2;
        let (u0, v0) = root_edge;
        if u0 == v0 || u0 >= n || v0 >= n {
            return Err(Error::InvalidTwoTree(format!("bad root edge {u0}-{v0}")));
        }
        let mut seen = vec![false; n];
        seen[u0] = true;
        seen[v0] = true;
        let mut edges = BTreeSet::from([key(u0, v0)]);
        for &(w, a, b) in &attachments {
            if w >= n || seen[w] {
                return Err(Error::InvalidTwoTree(format!("vertex {w} introduced twice or out of range")));
            }
            if a >= n || b >= n || !seen[a] || !seen[b] || !edges.contains(&key(a, b)) {
                return Err(Error::InvalidTwoTree(format!("{w} attached to {a}-{b}, which is not an edge yet")));
            }
            seen[w] = true;
            edges.insert(key(w, a));
            edges.insert(key(w, b));
        }
        Ok(RootedTwoTree { root_edge, attachments })
    }

    pub fn n(&self) -> usize {
        self.attachments.len() + 2
    }

    pub fn root_edge(&self) -> (usize, usize) {
        self.root_edge
    }

    pub fn attachments(&self) -> &[(usize, usize, usize)] {
        &self.attachments
    }

    pub fn graph(&self) -> Graph {
        let (u0, v0) = self.root_edge;
        let edges = std::iter::once((u0, v0))
            .chain(self.attachments.iter().flat_map(|&(w, a, b)| [(w, a), (w, b)]));
        Graph::from_edge_set(self.n(), edges)
    }

    /// Position of each vertex in the construction sequence (root edge first).
    pub fn introduction_positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.n()];
        pos[self.root_edge.1] = 1;
        for (i, &(w, _, _)) in self.attachments.iter().enumerate() {
            pos[w] = i + 2;
        }
        pos
    }

    pub fn to_json(&self) -> TwoTreeJson {
        TwoTreeJson {
            root_edge: [self.root_edge.0, self.root_edge.1],
            attach: self.attachments.iter().map(|&(w, a, b)| [w, a, b]).collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("two-tree json serializes")
    }

    /// Relabels vertices through `map` (old id -> new id).
    pub fn relabel(&self, map: &[usize]) -> RootedTwoTree {
        RootedTwoTree {
            root_edge: (map[self.root_edge.0], map[self.root_edge.1]),
            attachments: self.attachments.iter().map(|&(w, a, b)| (map[w], map[a], map[b])).collect(),
        }
    }
}

pub(crate) fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Completes a connected graph of treewidth at most 2 to a rooted 2-tree.
///
/// Repeatedly eliminates the smallest-id vertex of degree at most 2, joining
/// its two neighbours (a degree-1 vertex borrows a neighbour of its neighbour),
/// and replays the eliminations backwards from the last surviving edge. The
/// result contains `g` as a spanning subgraph. If every remaining vertex has
/// degree at least 3 the graph has treewidth above 2 and the stalled vertex set
/// is returned as the error payload.
pub fn recognize_tw2(g: &Graph) -> Result<RootedTwoTree> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least 2 vertices".into()));
    }
    if g.connected_components().len() != 1 {
        return Err(Error::InvalidParameter("graph must be connected".into()));
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut low: BTreeSet<usize> = (0..n).filter(|&v| adj[v].len() <= 2).collect();
    let mut eliminated = Vec::with_capacity(n - 2);
    while remaining > 2 {
        let Some(&x) = low.iter().next() else {
            let core: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
            return Err(Error::NotTreewidthTwo(core));
        };
        low.remove(&x);
        let nb: Vec<usize> = adj[x].iter().copied().collect();
        let (a, b) = match nb.as_slice() {
            [a, b] => (*a, *b),
            [a] => {
                let b = *adj[*a].iter().find(|&&y| y != x).expect("connected remainder has 3+ vertices");
                (*a, b)
            }
            _ => unreachable!("connected remainder with 3+ vertices has no isolated vertex"),
        };
        for &y in &nb {
            adj[y].remove(&x);
        }
        adj[x].clear();
        alive[x] = false;
        remaining -= 1;
        adj[a].insert(b);
        adj[b].insert(a);
        for y in [a, b] {
            if adj[y].len() <= 2 {
                low.insert(y);
            } else {
                low.remove(&y);
            }
        }
        eliminated.push((x, a, b));
    }
    let rest: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let root_edge = (rest[0], rest[1]);
    eliminated.reverse();
    RootedTwoTree::new(root_edge, eliminated)
}

/// The 2-tree model of a rooted 2-tree: the base edge is a labelled path 1-2,
/// each attached vertex takes the third label and hangs below the later of its
/// two attachment vertices.
pub fn two_tree_to_model(t: &RootedTwoTree) -> KTreeModel {
    let n = t.n();
    let pos = t.introduction_positions();
    let (u0, v0) = t.root_edge;
    let mut parent = vec![None; n];
    let mut label = vec![0; n];
    label[u0] = 1;
    label[v0] = 2;
    parent[v0] = Some(u0);
    for &(w, a, b) in &t.attachments {
        label[w] = 6 - label[a] - label[b];
        parent[w] = Some(if pos[a] > pos[b] { a } else { b });
    }
    KTreeModel::new(2, u0, parent, label).expect("2-tree model is well formed")
}

/// Reads a rooted 2-tree off a 2-tree model whose graph `g` is a 2-tree.
pub fn model_to_two_tree(m: &KTreeModel, g: &Graph) -> Result<RootedTwoTree> {
    if m.k != 2 {
        return Err(Error::InvalidParameter(format!("expected a 2-tree model, got k = {}", m.k)));
    }
    validate_model(m, g)?;
    if g.n() < 2 {
        return Err(Error::InvalidTwoTree("a 2-tree has at least 2 vertices".into()));
    }
    let parents = model_parents(m, g);
    let mut root_edge = None;
    let mut attachments = Vec::new();
    for v in m.bfs_order().into_iter().skip(1) {
        match parents[v].as_slice() {
            [p] if root_edge.is_none() && *p == m.root => root_edge = Some((m.root, v)),
            [a, b] if g.has_edge(*a, *b) && root_edge.is_some() => {
                let (a, b) = if m.label[*a] < m.label[*b] { (*a, *b) } else { (*b, *a) };
                attachments.push((v, a, b));
            }
            other => {
                return Err(Error::InvalidTwoTree(format!(
                    "vertex {v} has parents {other:?}; the graph is not a 2-tree in this model"
                )))
            }
        }
    }
    let root_edge = root_edge.ok_or_else(|| Error::InvalidTwoTree("no base edge".into()))?;
    let t = RootedTwoTree::new(root_edge, attachments)?;
    if t.graph() != *g {
        return Err(Error::InvalidTwoTree("graph is not edge-maximal for the model".into()));
    }
    Ok(t)
}

/// Wire format for models: parents are vertex ids, `-1` marks the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub k: usize,
    pub root: usize,
    pub parent: Vec<i64>,
    pub label: Vec<usize>,
}

impl TryFrom<ModelJson> for KTreeModel {
    type Error = Error;

    fn try_from(json: ModelJson) -> Result<KTreeModel> {
        let parent = json
            .parent
            .iter()
            .map(|&p| match p {
                -1 => Ok(None),
                p if p >= 0 => Ok(Some(p as usize)),
                p => Err(Error::Parse(format!("bad parent id {p}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        KTreeModel::new(json.k, json.root, parent, json.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoTreeJson {
    pub root_edge: [usize; 2],
    pub attach: Vec<[usize; 3]>,
}

impl TryFrom<TwoTreeJson> for RootedTwoTree {
    type Error = Error;

    fn try_from(json: TwoTreeJson) -> Result<RootedTwoTree> {
        RootedTwoTree::new(
            (json.root_edge[0], json.root_edge[1]),
            json.attach.iter().map(|a| (a[0], a[1], a[2])).collect(),
        )
    }
}

/// Either model format, as accepted on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyModel {
    Model(KTreeModel),
    TwoTree(RootedTwoTree),
}

impl AnyModel {
    pub fn from_json_str(s: &str) -> Result<AnyModel> {
        let value: serde_json::Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if value.get("root_edge").is_some() {
            let json: TwoTreeJson = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
            Ok(AnyModel::TwoTree(json.try_into()?))
        } else {
            let json: ModelJson = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
            Ok(AnyModel::Model(json.try_into()?))
        }
    }

    /// The k-tree model, converting 2-trees on the fly.
    pub fn into_model(self) -> KTreeModel {
        match self {
            AnyModel::Model(m) => m,
            AnyModel::TwoTree(t) => two_tree_to_model(&t),
        }
    }
}
