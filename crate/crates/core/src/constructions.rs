//! Extremal graph families used as upper-bound witnesses and regression fixtures.

use crate::error::{Error, Result};
use crate::graph::{disjoint_union, Graph};
use crate::model::{edge_maximal_graph, recognize_tw2, two_tree_to_model, KTreeModel, RootedTwoTree};

/// Largest vertex count any generator will build.
pub const DEFAULT_VERTEX_CAP: usize = 1 << 20;

/// A generated family member: the graph, a model of it, and for treewidth-2
/// families a rooted 2-tree containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub graph: Graph,
    pub model: KTreeModel,
    pub two_tree: Option<RootedTwoTree>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyKind {
    CaryTower { k: usize, c: usize },
    PathClique { k: usize, c: usize },
    GiChain { i: usize },
    DisjointCopies { base: Box<FamilyKind>, copies: usize },
}

impl FamilyKind {
    pub fn generate(&self) -> Result<Family> {
        match self {
            FamilyKind::CaryTower { k, c } => {
                let (graph, model) = cary_tower(*k, *c)?;
                Ok(Family { graph, model, two_tree: None })
            }
            FamilyKind::PathClique { k, c } => {
                let (graph, model) = path_clique(*k, *c)?;
                Ok(Family { graph, model, two_tree: None })
            }
            FamilyKind::GiChain { i } => {
                let (graph, t) = gi_chain(*i)?;
                let model = two_tree_to_model(&t);
                Ok(Family { graph, model, two_tree: Some(t) })
            }
            FamilyKind::DisjointCopies { base, copies } => {
                let base = base.generate()?;
                let (graph, model) = disjoint_copies(&base.graph, &base.model, *copies)?;
                Ok(Family { graph, model, two_tree: None })
            }
        }
    }
}

fn positive(name: &str, x: usize) -> Result<()> {
    if x == 0 {
        Err(Error::InvalidParameter(format!("{name} must be positive")))
    } else {
        Ok(())
    }
}

/// Full c-ary tree of height `k+1` labelled by depth, with its edge-maximal graph.
/// Every vertex is adjacent to all of its ancestors; the clustered chromatic
/// number of the graph is `k+1`.
pub fn cary_tower(k: usize, c: usize) -> Result<(Graph, KTreeModel)> {
    cary_tower_capped(k, c, DEFAULT_VERTEX_CAP)
}

pub fn cary_tower_capped(k: usize, c: usize, cap: usize) -> Result<(Graph, KTreeModel)> {
    positive("k", k)?;
    positive("c", c)?;
    let mut total: usize = 0;
    let mut level: usize = 1;
    for d in 0..=k {
        total = total
            .checked_add(level)
            .filter(|&t| t <= cap)
            .ok_or_else(|| Error::CapExceeded(format!("c-ary tower ({k}, {c}) exceeds {cap} vertices")))?;
        if d < k {
            level = level
                .checked_mul(c)
                .ok_or_else(|| Error::CapExceeded("c-ary tower size overflows".into()))?;
        }
    }
    let mut parent = vec![None; total];
    let mut label = vec![1; total];
    for x in 1..total {
        let p = (x - 1) / c;
        parent[x] = Some(p);
        label[x] = label[p] + 1;
    }
    let model = KTreeModel::new(k, 0, parent, label)?;
    Ok((edge_maximal_graph(&model), model))
}

/// Path `v_1 .. v_{k+c}` rooted at `v_1`, labels `1..k` then `k+1` repeated.
/// The first `k` vertices are universal, so any `c+1` vertices induce a connected graph.
pub fn path_clique(k: usize, c: usize) -> Result<(Graph, KTreeModel)> {
    positive("k", k)?;
    positive("c", c)?;
    let n = k + c;
    let parent = (0..n).map(|v| v.checked_sub(1)).collect();
    let label = (0..n).map(|v| if v < k { v + 1 } else { k + 1 }).collect();
    let model = KTreeModel::new(k, 0, parent, label)?;
    Ok((edge_maximal_graph(&model), model))
}

// Local ids inside one copy of G_1.
const V1: usize = 0;
const V2: usize = 1;
const V5: usize = 4;
const V6: usize = 5;
const WHITE: [usize; 4] = [0, 2, 3, 5];
const GRAY_TRIANGLES: [[usize; 3]; 2] = [[1, 6, 7], [4, 8, 9]];
const G1_EDGES: [(usize, usize); 14] = [
    // gray triangles {v2, g1, g2} and {v5, g3, g4}
    (1, 6),
    (1, 7),
    (6, 7),
    (4, 8),
    (4, 9),
    (8, 9),
    // the square g1 g2 g4 g3 joining the triangles
    (6, 8),
    (7, 9),
    // white ears v3 on g1g3 and v4 on g2g4
    (2, 6),
    (2, 8),
    (3, 7),
    (3, 9),
    // white pendants v1 on v2 and v6 on v5
    (0, 1),
    (4, 5),
];

/// The chain `G_i`, its white (simplicial, independent) vertices, and the gray
/// triangles partitioning the remaining vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GiChain {
    pub graph: Graph,
    pub white: Vec<usize>,
    pub gray_triangles: Vec<[usize; 3]>,
}

/// Builds `G_i` from `i` copies of the 10-vertex gadget `G_1`: copy `j` shares
/// its `v6` with `v1` of copy `j-1`, and its `v5` is joined to `v2` of copy `j-1`.
pub fn gi_chain_parts(i: usize) -> Result<GiChain> {
    positive("i", i)?;
    let mut next = 0;
    let mut ids: Vec<[usize; 10]> = Vec::with_capacity(i);
    for j in 0..i {
        let mut map = [usize::MAX; 10];
        for (local, slot) in map.iter_mut().enumerate() {
            if j > 0 && local == V6 {
                *slot = ids[j - 1][V1];
            } else {
                *slot = next;
                next += 1;
            }
        }
        ids.push(map);
    }
    let mut edges = Vec::new();
    for (j, map) in ids.iter().enumerate() {
        edges.extend(G1_EDGES.iter().map(|&(a, b)| (map[a], map[b])));
        if j > 0 {
            edges.push((map[V5], ids[j - 1][V2]));
        }
    }
    let graph = Graph::from_edge_set(next, edges);
    let mut white: Vec<usize> = ids.iter().flat_map(|map| WHITE.map(|w| map[w])).collect();
    white.sort_unstable();
    white.dedup();
    let gray_triangles = ids
        .iter()
        .flat_map(|map| GRAY_TRIANGLES.map(|t| t.map(|x| map[x])))
        .collect();
    Ok(GiChain { graph, white, gray_triangles })
}

/// `G_i` (on `9i+1` vertices) and a rooted 2-tree completing it.
pub fn gi_chain(i: usize) -> Result<(Graph, RootedTwoTree)> {
    let parts = gi_chain_parts(i)?;
    let t = recognize_tw2(&parts.graph)?;
    Ok((parts.graph, t))
}

/// `copies` disjoint copies of `g`, with a model that hangs the root of each
/// copy below the root of the previous one. This is a valid model of the union
/// but not an edge-maximal one.
pub fn disjoint_copies(g: &Graph, m: &KTreeModel, copies: usize) -> Result<(Graph, KTreeModel)> {
    positive("copies", copies)?;
    let n = g.n();
    let union = disjoint_union(&vec![g.clone(); copies]);
    let mut parent = Vec::with_capacity(n * copies);
    let mut label = Vec::with_capacity(n * copies);
    for j in 0..copies {
        let off = j * n;
        for v in 0..n {
            let p = match m.parent(v) {
                Some(p) => Some(p + off),
                None if j > 0 => Some(m.root() + off - n),
                None => None,
            };
            parent.push(p);
            label.push(m.label(v));
        }
    }
    let model = KTreeModel::new(m.k(), m.root(), parent, label)?;
    Ok((union, model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_model;

    #[test]
    fn tower_sizes() {
        let (g, m) = cary_tower(2, 4).unwrap();
        assert_eq!(g.n(), 21);
        assert!(validate_model(&m, &g).is_ok());
        let (g, _) = cary_tower(1, 1).unwrap();
        assert_eq!(g, Graph::path(2));
        assert_eq!(cary_tower(2, 2).unwrap().0.n(), 7);
        assert!(matches!(cary_tower_capped(3, 10, 100), Err(Error::CapExceeded(_))));
        assert!(cary_tower(0, 2).is_err());
    }

    #[test]
    fn tower_vertices_see_all_ancestors() {
        let (g, m) = cary_tower(3, 2).unwrap();
        for v in 0..g.n() {
            let mut a = m.parent(v);
            while let Some(x) = a {
                assert!(g.has_edge(v, x));
                a = m.parent(x);
            }
        }
    }

    #[test]
    fn path_clique_shapes() {
        let (g, _) = path_clique(1, 1).unwrap();
        assert_eq!(g, Graph::path(2));
        let (g, _) = path_clique(2, 2).unwrap();
        assert_eq!(g.edge_count(), 5);
        assert!(!g.has_edge(2, 3));
        let (g, m) = path_clique(3, 4).unwrap();
        assert_eq!(g.n(), 7);
        assert!(validate_model(&m, &g).is_ok());
        for v in 0..3 {
            assert_eq!(g.degree(v), 6);
        }
    }

    #[test]
    fn gi_chain_counts() {
        for i in 1..=5 {
            let parts = gi_chain_parts(i).unwrap();
            assert_eq!(parts.graph.n(), 9 * i + 1);
            assert_eq!(parts.white.len(), 3 * i + 1);
            assert_eq!(parts.gray_triangles.len(), 2 * i);
        }
        assert!(gi_chain(0).is_err());
    }

    #[test]
    fn copies_model_is_valid() {
        let (g, m) = path_clique(2, 3).unwrap();
        let (u, um) = disjoint_copies(&g, &m, 3).unwrap();
        assert_eq!(u.n(), 15);
        assert!(validate_model(&um, &u).is_ok());
        let fam = FamilyKind::DisjointCopies { base: Box::new(FamilyKind::PathClique { k: 2, c: 3 }), copies: 3 }
            .generate()
            .unwrap();
        assert_eq!(fam.graph, u);
    }

    #[test]
    fn gi_fixture_alphas() {
        use crate::oracle::{alpha_exact_bruteforce, alpha_exact_treedp_two_tree};
        for (i, want) in [(1, 6), (2, 11)] {
            let (g, t) = gi_chain(i).unwrap();
            assert!(g.is_subgraph_of(&t.graph()));
            assert_eq!(alpha_exact_bruteforce(&g, 3, u64::MAX).unwrap().alpha, want);
            assert_eq!(alpha_exact_treedp_two_tree(&t, &g, 3).unwrap().alpha, want);
        }
    }

    #[test]
    fn gi_whites_are_simplicial_and_independent() {
        let parts = gi_chain_parts(3).unwrap();
        let g = &parts.graph;
        for &w in &parts.white {
            let nb = g.neighbors(w);
            for (a, &x) in nb.iter().enumerate() {
                assert!(!parts.white.contains(&x));
                for &y in &nb[a + 1..] {
                    assert!(g.has_edge(x, y), "white {w} is not simplicial");
                }
            }
        }
        let mut covered: Vec<usize> = parts.gray_triangles.iter().flatten().copied().chain(parts.white.iter().copied()).collect();
        covered.sort_unstable();
        assert_eq!(covered, (0..g.n()).collect::<Vec<_>>());
    }

    #[test]
    fn path_clique_small_sets_are_connected() {
        for k in 1..=13 {
            for c in 1..=14 - k {
                let (g, _) = path_clique(k, c).unwrap();
                let n = g.n();
                for mask in 0u32..(1 << n) {
                    if mask.count_ones() as usize == c + 1 {
                        let s: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                        assert_eq!(g.components(&s).unwrap().len(), 1, "k={k} c={c} set {s:?}");
                    }
                }
            }
        }
    }

    /// Searches for a circular order of the vertices in which no two edges cross.
    fn outerplanar(g: &Graph) -> bool {
        fn crosses(pos: &[usize], (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
            let (a, b) = (pos[a].min(pos[b]), pos[a].max(pos[b]));
            let inside = |x: usize| a < pos[x] && pos[x] < b;
            let shared = [c, d].iter().any(|&x| pos[x] == a || pos[x] == b);
            !shared && inside(c) != inside(d)
        }
        fn place(g: &Graph, edges: &[(usize, usize)], pos: &mut Vec<usize>, next: usize) -> bool {
            let n = g.n();
            if next == n {
                return true;
            }
            for v in 0..n {
                if pos[v] != usize::MAX {
                    continue;
                }
                pos[v] = next;
                let done: Vec<_> = edges.iter().copied().filter(|&(a, b)| pos[a] != usize::MAX && pos[b] != usize::MAX).collect();
                let fresh = done.iter().filter(|&&(a, b)| a == v || b == v);
                let ok = fresh.clone().all(|&e| done.iter().all(|&f| !crosses(pos, e, f)));
                if ok && place(g, edges, pos, next + 1) {
                    return true;
                }
                pos[v] = usize::MAX;
            }
            false
        }
        let edges: Vec<_> = g.edges().collect();
        let mut pos = vec![usize::MAX; g.n()];
        pos[0] = 0;
        place(g, &edges, &mut pos, 1)
    }

    #[test]
    fn g1_is_outerplanar() {
        assert!(outerplanar(&gi_chain(1).unwrap().0));
        assert!(!outerplanar(&Graph::complete(4)));
        assert!(!outerplanar(&Graph::new(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap()));
    }
}
