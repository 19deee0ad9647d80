//! Constructive lower bounds for `alpha_c` from a k-tree model.
//!
//! * [`clustered_general`]: `|S| >= ceil(c n / (k + c + 1))` for all `k, c`.
//! * [`clustered_k1`]: `|S| >= ceil(c n / (c + 1))` for forests.
//! * [`clustered_c2_tokens`]: `|S| >= ceil(2 n / (k + 2))` for `c = 2`, via a
//!   token-accounting procedure whose invariants are checked after every step.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ClusteredSet, Graph};
use crate::model::{edge_maximal_graph, normalize_distinct_tree_edge_labels, validate_model, KTreeModel};

/// `ceil(a / b)` for `b > 0`.
pub fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

pub fn general_guarantee(n: usize, k: usize, c: usize) -> usize {
    ceil_div(c * n, k + c + 1)
}

pub fn k1_guarantee(n: usize, c: usize) -> usize {
    ceil_div(c * n, c + 1)
}

pub fn c2_guarantee(n: usize, k: usize) -> usize {
    ceil_div(2 * n, k + 2)
}

/// Repeatedly picks a deepest vertex `v` with at least `c` live descendants,
/// keeps those descendants, and deletes `v`, the descendants, and their live
/// neighbours above `v`. Deleting vertices from a model keeps the ancestor
/// relation among survivors, so the loop works on the original tree with a
/// liveness mask.
fn peel(m: &KTreeModel, g: &Graph, c: usize, expect_no_boundary: bool) -> Result<Vec<usize>> {
    let n = m.n();
    let children = m.children();
    let order = m.bfs_order();
    let depth = m.depths();
    let mut alive = vec![true; n];
    let mut taken = Vec::new();
    loop {
        let mut count = vec![0usize; n];
        for &v in order.iter().rev() {
            if let Some(p) = m.parent(v) {
                count[p] += count[v] + usize::from(alive[v]);
            }
        }
        let pick = (0..n)
            .filter(|&v| alive[v] && count[v] >= c)
            .max_by_key(|&v| (depth[v], std::cmp::Reverse(v)));
        let Some(v) = pick else {
            // Every live tree has at most c vertices and distinct trees are non-adjacent.
            taken.extend((0..n).filter(|&x| alive[x]));
            break;
        };
        let mut a = Vec::new();
        let mut stack: Vec<usize> = children[v].clone();
        while let Some(x) = stack.pop() {
            if alive[x] {
                a.push(x);
            }
            stack.extend(children[x].iter().copied());
        }
        let mut inside = vec![false; n];
        inside[v] = true;
        for &x in &a {
            inside[x] = true;
        }
        // Forest mode: deleting v alone must separate A from the rest.
        let boundary: BTreeSet<usize> = if expect_no_boundary {
            if let Some(&y) = a.iter().find(|&&x| g.neighbors(x).iter().any(|&y| alive[y] && !inside[y])) {
                return Err(Error::InvariantViolation(format!(
                    "descendant {y} of {v} has a neighbour outside the peeled subtree"
                )));
            }
            BTreeSet::new()
        } else {
            a.iter()
                .chain(std::iter::once(&v))
                .flat_map(|&x| g.neighbors(x).iter().copied())
                .filter(|&y| alive[y] && !inside[y])
                .collect()
        };
        for x in boundary.into_iter().chain(a.iter().copied()).chain(std::iter::once(v)) {
            alive[x] = false;
        }
        taken.extend(a);
    }
    taken.sort_unstable();
    Ok(taken)
}

/// General lower bound for any width `k` and cap `c`.
pub fn clustered_general(m: &KTreeModel, g: &Graph, c: usize) -> Result<ClusteredSet> {
    if c == 0 {
        return Err(Error::ZeroClusterCap);
    }
    validate_model(m, g)?;
    let s = peel(m, g, c, false)?;
    ClusteredSet::new(g, s, c)
}

/// Forest bound; normalises the model first so that no tree edge joins equal labels.
pub fn clustered_k1(m: &KTreeModel, g: &Graph, c: usize) -> Result<ClusteredSet> {
    if c == 0 {
        return Err(Error::ZeroClusterCap);
    }
    if m.k() != 1 {
        return Err(Error::InvalidParameter(format!("clustered_k1 needs k = 1, got k = {}", m.k())));
    }
    let normal = normalize_distinct_tree_edge_labels(m, g)?;
    let s = peel(&normal, g, c, true)?;
    ClusteredSet::new(g, s, c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
enum Status {
    Undecided,
    Taken,
    Discarded,
    /// Set aside by a pending surgery frame, or an artificial vertex that has been resolved away.
    Suspended,
}

/// Token bookkeeping. While vertices are undecided, `granted - spent - wasted +
/// surgery_minted - surgery_burned` equals the tokens on undecided vertices.
/// Resolving a surgery grants `k` and spends 2. At the end `granted = k|S|` and `spent = 2|D|`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TokenLedger {
    pub granted: i64,
    pub spent: i64,
    pub wasted: i64,
    pub surgery_minted: i64,
    pub surgery_burned: i64,
}

/// How often each step of the procedure fired.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CaseCounts {
    pub take_leaf: usize,
    pub discard_crowded: usize,
    pub discard_parent_with_token: usize,
    pub discard_parent_of_two: usize,
    pub surgery: usize,
    pub take_parentless: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TokenOutcome {
    #[serde(skip)]
    pub set: ClusteredSet,
    pub discarded: Vec<usize>,
    pub ledger: TokenLedger,
    pub cases: CaseCounts,
    pub steps: usize,
}

struct Frame {
    v: usize,
    w: usize,
    u: usize,
    rest: Vec<usize>,
}

/// Mutable state of the token procedure on the edge-maximal completion.
struct TokenState {
    k: i64,
    status: Vec<Status>,
    tokens: Vec<i64>,
    adj: Vec<BTreeSet<usize>>,
    /// Original vertices: tree parent in the input model.
    tree_parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
    /// Artificial vertices: the tree vertex they hang below.
    anchor: Vec<Option<usize>>,
    n_orig: usize,
    frames: Vec<Frame>,
    ledger: TokenLedger,
    cases: CaseCounts,
    steps: usize,
    trace: Vec<String>,
}

impl TokenState {
    fn new(m: &KTreeModel, h: &Graph) -> Self {
        let n = m.n();
        let (tin, tout) = m.euler_times();
        TokenState {
            k: m.k() as i64,
            status: vec![Status::Undecided; n],
            tokens: vec![0; n],
            adj: (0..n).map(|v| h.neighbors(v).iter().copied().collect()).collect(),
            tree_parent: m.parents_slice().to_vec(),
            depth: m.depths(),
            tin,
            tout,
            anchor: vec![None; n],
            n_orig: n,
            frames: Vec::new(),
            ledger: TokenLedger::default(),
            cases: CaseCounts::default(),
            steps: 0,
            trace: Vec::new(),
        }
    }

    fn orig_ancestor(&self, a: usize, d: usize) -> bool {
        a != d && self.tin[a] <= self.tin[d] && self.tout[d] <= self.tout[a]
    }

    /// Ancestor test in the current model. Contractions keep the ancestor
    /// relation among survivors, and artificial vertices are always leaves.
    fn is_ancestor(&self, a: usize, x: usize) -> bool {
        if a >= self.n_orig {
            return false;
        }
        if x >= self.n_orig {
            return self.anchor[x].is_some_and(|z| z == a || self.orig_ancestor(a, z));
        }
        self.orig_ancestor(a, x)
    }

    fn parents(&self, x: usize) -> Vec<usize> {
        self.adj[x].iter().copied().filter(|&y| self.is_ancestor(y, x)).collect()
    }

    fn children(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[x].iter().copied().filter(move |&y| self.is_ancestor(x, y))
    }

    fn s_count(&self, x: usize) -> usize {
        self.children(x).filter(|&y| self.status[y] == Status::Taken).count()
    }

    fn has_undecided_child(&self, x: usize) -> bool {
        self.children(x).any(|y| self.status[y] == Status::Undecided)
    }

    /// Current tree parent of an original vertex: nearest ancestor still in the model.
    fn current_tree_parent(&self, x: usize) -> Option<usize> {
        let mut p = self.tree_parent[x];
        while let Some(y) = p {
            if matches!(self.status[y], Status::Undecided | Status::Taken) {
                return Some(y);
            }
            p = self.tree_parent[y];
        }
        None
    }

    fn detach(&mut self, x: usize) {
        let nbrs: Vec<usize> = std::mem::take(&mut self.adj[x]).into_iter().collect();
        for y in nbrs {
            self.adj[y].remove(&x);
        }
    }

    fn log(&mut self, msg: String) {
        self.steps += 1;
        self.trace.push(msg);
        if self.trace.len() > 16 {
            self.trace.remove(0);
        }
    }

    fn fail(&self, what: String) -> Error {
        Error::InvariantViolation(format!("{what} after step {}; recent steps: {}", self.steps, self.trace.join("; ")))
    }

    fn take(&mut self, v: usize) {
        self.status[v] = Status::Taken;
        self.ledger.granted += self.k;
    }

    /// Discards `v`, charging 2 tokens split as given by `from`.
    fn discard(&mut self, v: usize, from: &[(usize, i64)]) {
        for &(x, amount) in from {
            self.tokens[x] -= amount;
        }
        self.ledger.spent += 2;
        self.ledger.wasted += self.tokens[v];
        self.tokens[v] = 0;
        self.status[v] = Status::Discarded;
        self.detach(v);
    }

    fn check(&self) -> Result<()> {
        for x in 0..self.status.len() {
            match self.status[x] {
                Status::Taken => {
                    let mut s_children = 0;
                    for y in self.children(x) {
                        match self.status[y] {
                            Status::Undecided => return Err(self.fail(format!("(I1): taken {x} has undecided child {y}"))),
                            Status::Taken => s_children += 1,
                            _ => {}
                        }
                    }
                    if s_children > 1 {
                        return Err(self.fail(format!("(I1): taken {x} has {s_children} taken children")));
                    }
                    if s_children == 1 && !self.parents(x).is_empty() {
                        return Err(self.fail(format!("(I1): taken {x} has a taken child and a live parent")));
                    }
                }
                Status::Undecided => {
                    let t = self.tokens[x];
                    let s = self.s_count(x) as i64;
                    let undecided_child = self.has_undecided_child(x);
                    if (undecided_child || s >= 2) && t < s {
                        return Err(self.fail(format!("(I2): vertex {x} has {t} tokens and {s} taken children")));
                    }
                    let p = self.parents(x).len() as i64;
                    if !undecided_child && t < s + p - self.k {
                        return Err(self.fail(format!("(I3): vertex {x} has {t} tokens, s = {s}, p = {p}")));
                    }
                }
                _ => {}
            }
        }
        let live: i64 = (0..self.status.len())
            .filter(|&x| self.status[x] == Status::Undecided)
            .map(|x| self.tokens[x])
            .sum();
        let l = &self.ledger;
        if l.granted - l.spent - l.wasted + l.surgery_minted - l.surgery_burned != live {
            return Err(self.fail("token conservation".into()));
        }
        Ok(())
    }

    /// One step of the procedure. Returns `false` when nothing is undecided.
    fn step(&mut self) -> Result<bool> {
        let undecided: Vec<usize> =
            (0..self.n_orig).filter(|&x| self.status[x] == Status::Undecided).collect();
        if undecided.is_empty() {
            return Ok(false);
        }
        let mut settled: Vec<usize> =
            undecided.iter().copied().filter(|&x| !self.has_undecided_child(x)).collect();
        settled.sort_by_key(|&x| (std::cmp::Reverse(self.depth[x]), x));
        if settled.is_empty() {
            return Err(self.fail("no undecided vertex without undecided children".into()));
        }

        if let Some(&v) = settled.iter().find(|&&x| self.s_count(x) == 0) {
            // Take v; top v up to zero and put one token on each parent.
            let parents = self.parents(v);
            let p = parents.len() as i64;
            self.take(v);
            self.ledger.wasted += self.tokens[v] + self.k - p;
            self.tokens[v] = 0;
            for y in parents {
                self.tokens[y] += 1;
            }
            self.cases.take_leaf += 1;
            self.log(format!("take {v} (no taken children)"));
            return Ok(true);
        }
        if let Some(&v) = settled.iter().find(|&&x| self.s_count(x) >= 2) {
            self.discard(v, &[(v, 2)]);
            self.cases.discard_crowded += 1;
            self.log(format!("discard {v} (two or more taken children)"));
            return Ok(true);
        }
        // Every settled vertex now has exactly one taken child.
        if let Some(&v) = settled.iter().find(|&&x| self.parents(x).is_empty()) {
            self.take(v);
            self.ledger.wasted += self.tokens[v] + self.k;
            self.tokens[v] = 0;
            self.cases.take_parentless += 1;
            self.log(format!("take {v} (no parents)"));
            return Ok(true);
        }
        let lowest_parent = |st: &Self, x: usize| {
            st.parents(x).into_iter().max_by_key(|&y| st.depth[y]).expect("settled vertices have parents here")
        };
        let v = *settled
            .iter()
            .max_by_key(|&&x| (self.depth[lowest_parent(self, x)], std::cmp::Reverse(x)))
            .expect("non-empty");
        let w = lowest_parent(self, v);
        if self.tokens[w] >= 1 {
            self.discard(w, &[(v, 1), (w, 1)]);
            self.cases.discard_parent_with_token += 1;
            self.log(format!("discard {w} (parent of {v} holding a token)"));
            return Ok(true);
        }
        let other = self.children(w).filter(|&y| y != v && self.status[y] == Status::Undecided).min();
        if let Some(u) = other {
            if self.has_undecided_child(u) {
                return Err(self.fail(format!("second child {u} of {w} still has undecided children")));
            }
            self.discard(w, &[(u, 1), (v, 1)]);
            self.cases.discard_parent_of_two += 1;
            self.log(format!("discard {w} (parent of {v} and {u})"));
            return Ok(true);
        }
        if self.tokens[w] != 0 || self.s_count(w) != 0 {
            return Err(self.fail(format!("surgery precondition fails at w = {w}")));
        }
        self.surgery(v, w)?;
        Ok(true)
    }

    /// Replaces `v` and its lowest parent `w` by an artificial taken leaf `u`
    /// below the tree parent of `w`, adjacent to the other parents of `v`.
    fn surgery(&mut self, v: usize, w: usize) -> Result<()> {
        let parents = self.parents(v);
        let rest: Vec<usize> = parents.iter().copied().filter(|&y| y != w).collect();
        let burned = self.tokens[v] + self.tokens[w];
        let minted = rest.len() as i64;
        if burned - minted < 2 - self.k {
            return Err(self.fail(format!("surgery on {v},{w} is short by more than k - 2 tokens")));
        }
        let z = self.current_tree_parent(w);
        for x in [v, w] {
            self.status[x] = Status::Suspended;
            self.tokens[x] = 0;
            self.detach(x);
        }
        let u = self.status.len();
        self.status.push(Status::Taken);
        self.tokens.push(0);
        self.anchor.push(z);
        self.adj.push(rest.iter().copied().collect());
        for &y in &rest {
            self.adj[y].insert(u);
            self.tokens[y] += 1;
        }
        self.ledger.surgery_burned += burned;
        self.ledger.surgery_minted += minted;
        self.frames.push(Frame { v, w, u, rest });
        self.cases.surgery += 1;
        self.log(format!("merge {v} and {w} into artificial {u}"));
        Ok(())
    }

    /// Unwinds surgery frames last-in first-out once everything is decided.
    fn resolve(&mut self, h: &Graph) -> Result<()> {
        while let Some(Frame { v, w, u, rest }) = self.frames.pop() {
            self.status[u] = Status::Suspended;
            self.detach(u);
            let hit: Vec<usize> = rest.iter().copied().filter(|&y| self.status[y] == Status::Taken).collect();
            let (keep, drop) = if hit.is_empty() { (v, w) } else { (w, v) };
            if let Some(&a) = hit.first() {
                let lonely = h.neighbors(a).iter().all(|&y| y >= self.n_orig || self.status[y] != Status::Taken);
                if hit.len() > 1 || !lonely {
                    return Err(self.fail(format!("resolving {v},{w}: taken parent {a} is not isolated")));
                }
            }
            self.status[keep] = Status::Taken;
            self.status[drop] = Status::Discarded;
            self.ledger.granted += self.k;
            self.ledger.spent += 2;
            self.log(format!("resolve: take {keep}, discard {drop}"));
        }
        Ok(())
    }
}

/// 2-clustered set of size at least `ceil(2n / (k+2))` by the token procedure.
/// The model is completed to its edge-maximal graph first; the result is
/// 2-clustered there and hence in `g`.
pub fn clustered_c2_tokens(m: &KTreeModel, g: &Graph) -> Result<TokenOutcome> {
    validate_model(m, g)?;
    let n = m.n();
    let k = m.k();
    if n <= k + 2 {
        let set: Vec<usize> = (0..n.min(2)).collect();
        let discarded: Vec<usize> = (set.len()..n).collect();
        let ledger = TokenLedger {
            granted: (k * set.len()) as i64,
            spent: 2 * discarded.len() as i64,
            ..TokenLedger::default()
        };
        return Ok(TokenOutcome {
            set: ClusteredSet::new(g, set, 2)?,
            discarded,
            ledger,
            cases: CaseCounts::default(),
            steps: 0,
        });
    }
    let h = edge_maximal_graph(m);
    let mut st = TokenState::new(m, &h);
    st.check()?;
    while st.step()? {
        st.check()?;
    }
    st.resolve(&h)?;
    let taken: Vec<usize> = (0..n).filter(|&x| st.status[x] == Status::Taken).collect();
    let discarded: Vec<usize> = (0..n).filter(|&x| st.status[x] == Status::Discarded).collect();
    if taken.len() + discarded.len() != n {
        return Err(st.fail("some vertex is left undecided".into()));
    }
    let l = &st.ledger;
    if l.granted != k as i64 * taken.len() as i64 || l.spent != 2 * discarded.len() as i64 {
        return Err(st.fail("ledger disagrees with the final partition".into()));
    }
    if l.granted < l.spent {
        return Err(st.fail(format!("k|S| = {} < 2|D| = {}", l.granted, l.spent)));
    }
    if !h.is_c_clustered(&taken, 2)? {
        return Err(st.fail("final set is not 2-clustered in the completion".into()));
    }
    Ok(TokenOutcome {
        set: ClusteredSet::new(g, taken, 2)?,
        discarded,
        ledger: st.ledger,
        cases: st.cases,
        steps: st.steps,
    })
}
