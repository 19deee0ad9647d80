//! Counterexample search: rooted 2-trees whose `c`-clustered independence
//! ratio is strictly below a target `p/q`.
//!
//! A *piece* is everything hanging below an edge `uv`. Its profile records, for
//! each way the endpoints can be used, the best value of `q|S| - p|inner|`:
//!
//! * `OO`: neither endpoint taken,
//! * `IO(a)` / `OI(b)`: only `u` (only `v`) taken, with at most `a` (`b`) inner
//!   vertices in its component, `a, b < c`,
//! * `II(j)`: both taken, at most `j` inner vertices in their shared component, `j < c - 1`.
//!
//! Profiles compose exactly under the child and sibling operations, and a
//! pointwise smaller profile is never worse inside any larger graph, so only
//! pointwise-minimal profiles need to be kept.

use serde::Serialize;

use super::certify::{certify, CertifyOutcome, CombineKind, Derivation, Failure, FailureSeed};
use super::types::Ratio;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::RootedTwoTree;
use crate::oracle::alpha_exact_treedp_two_tree;

/// Default cap on the number of profiles kept by the exhaustive search.
pub const PROFILE_CAP: usize = 400_000;

/// A rooted 2-tree with exact `alpha_c / n` strictly below the refuted ratio.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "two_tree_json")]
    pub two_tree: RootedTwoTree,
    pub n: usize,
    pub alpha: usize,
    /// `alpha / n` as an exact fraction `[alpha, n]`.
    pub ratio: [usize; 2],
    pub method: WitnessMethod,
}

fn two_tree_json<S: serde::Serializer>(t: &RootedTwoTree, s: S) -> std::result::Result<S::Ok, S::Error> {
    t.to_json().serialize(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMethod {
    /// The 2-tree obtained by expanding the failed closure's derivations.
    Derivation,
    /// Copies of the derived piece side by side on one root edge.
    ChainedCopies,
    /// Exhaustive search over minimal profiles.
    ProfileSearch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RefuteOutcome {
    Witness(Box<Witness>),
    NotFound { reason: String },
}

impl RefuteOutcome {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            RefuteOutcome::Witness(w) => Some(w),
            RefuteOutcome::NotFound { .. } => None,
        }
    }
}

/// Shape of a piece below an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Empty,
    /// One new vertex `w` on `uv`; the first piece hangs below `uw`, the second below `vw`.
    Child(usize, usize),
    Sib(usize, usize),
}

#[derive(Debug, Default)]
struct Arena {
    nodes: Vec<Node>,
}

impl Arena {
    fn push(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn two_tree(&self, root: usize) -> Result<RootedTwoTree> {
        let mut attachments = Vec::new();
        let mut next = 2;
        let mut stack = vec![(root, 0usize, 1usize)];
        while let Some((id, u, v)) = stack.pop() {
            match self.nodes[id] {
                Node::Empty => {}
                Node::Sib(a, b) => {
                    stack.push((b, u, v));
                    stack.push((a, u, v));
                }
                Node::Child(x, y) => {
                    let w = next;
                    next += 1;
                    attachments.push((w, u, v));
                    stack.push((y, v, w));
                    stack.push((x, u, w));
                }
            }
        }
        RootedTwoTree::new((0, 1), attachments)
    }
}

/// Profile layout for a fixed `c`.
#[derive(Debug, Clone, Copy)]
struct Layout {
    c: usize,
    p: i64,
    q: i64,
}

impl Layout {
    fn len(&self) -> usize {
        3 * self.c
    }
    fn oo(&self) -> usize {
        0
    }
    fn io(&self, a: usize) -> usize {
        1 + a
    }
    fn oi(&self, b: usize) -> usize {
        1 + self.c + b
    }
    fn ii(&self, j: usize) -> usize {
        1 + 2 * self.c + j
    }

    fn sibling(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let c = self.c;
        let mut out = vec![0; self.len()];
        out[self.oo()] = a[self.oo()] + b[self.oo()];
        let conv = |slot: &dyn Fn(usize) -> usize, top: usize, out: &mut Vec<i64>| {
            for t in 0..top {
                out[slot(t)] = (0..=t).map(|s| a[slot(s)] + b[slot(t - s)]).max().expect("non-empty");
            }
        };
        conv(&|t| self.io(t), c, &mut out);
        conv(&|t| self.oi(t), c, &mut out);
        conv(&|t| self.ii(t), c - 1, &mut out);
        out
    }

    /// Best of `x[sx(i)] + y[sy(k)]` over `i + k <= budget`, `i < nx`, `k < ny`.
    fn split(x: &[i64], sx: impl Fn(usize) -> usize, nx: usize, y: &[i64], sy: impl Fn(usize) -> usize, ny: usize, budget: usize) -> i64 {
        let mut best = i64::MIN;
        for i in 0..nx.min(budget + 1) {
            for k in 0..ny.min(budget - i + 1) {
                best = best.max(x[sx(i)] + y[sy(k)]);
            }
        }
        best
    }

    fn child(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let (c, p, q) = (self.c, self.p, self.q);
        let mut out = vec![0; self.len()];
        let io = |t| self.io(t);
        let oi = |t| self.oi(t);
        let ii = |t| self.ii(t);
        // w excluded: each side sees only its own first endpoint.
        // w included: w joins whichever endpoint components are taken.
        out[self.oo()] = (x[self.oo()] + y[self.oo()] - p).max(q - p + Self::split(x, oi, c, y, oi, c, c - 1));
        for a in 0..c {
            let mut best = x[io(a)] + y[self.oo()] - p;
            if a >= 1 {
                best = best.max(q - p + Self::split(x, ii, c - 1, y, oi, c, a - 1));
            }
            out[io(a)] = best;
            let mut best = x[self.oo()] + y[io(a)] - p;
            if a >= 1 {
                best = best.max(q - p + Self::split(x, oi, c, y, ii, c - 1, a - 1));
            }
            out[oi(a)] = best;
        }
        for j in 0..c - 1 {
            let mut best = Self::split(x, io, c, y, io, c, j) - p;
            if j >= 1 {
                best = best.max(q - p + Self::split(x, ii, c - 1, y, ii, c - 1, j - 1));
            }
            out[ii(j)] = best;
        }
        out
    }

    /// `q * alpha_c - p * (inner + 2)` for the whole graph with this piece on the root edge.
    fn root_margin(&self, g: &[i64]) -> i64 {
        let c = self.c;
        let best = g[self.oo()]
            .max(g[self.io(c - 1)] + self.q)
            .max(g[self.oi(c - 1)] + self.q)
            .max(g[self.ii(c - 2)] + 2 * self.q);
        best - 2 * self.p
    }
}

fn dominates(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

struct Search {
    layout: Layout,
    arena: Arena,
    /// `by_size[n]`: kept pieces with `n` inner vertices, as (node, profile).
    by_size: Vec<Vec<(usize, Vec<i64>)>>,
    kept: usize,
    cap: usize,
}

impl Search {
    fn is_dominated(&self, g: &[i64], fresh: &[(usize, Vec<i64>)]) -> bool {
        self.by_size.iter().flatten().chain(fresh).any(|(_, h)| dominates(h, g))
    }

    fn offer(&mut self, node: Node, g: Vec<i64>, fresh: &mut Vec<(usize, Vec<i64>)>) -> Result<()> {
        if self.is_dominated(&g, fresh) {
            return Ok(());
        }
        fresh.retain(|(_, h)| !dominates(&g, h));
        let id = self.arena.push(node);
        fresh.push((id, g));
        self.kept += 1;
        if self.kept > self.cap {
            return Err(Error::CapExceeded(format!("profile search kept more than {} pieces", self.cap)));
        }
        Ok(())
    }

    /// Generates all minimal pieces with `n` inner vertices.
    fn grow(&mut self, n: usize) -> Result<()> {
        let mut fresh: Vec<(usize, Vec<i64>)> = Vec::new();
        for nx in 0..n {
            let ny = n - 1 - nx;
            let xs = self.by_size[nx].clone();
            let ys = self.by_size[ny].clone();
            for (xi, xg) in &xs {
                for (yi, yg) in &ys {
                    let g = self.layout.child(xg, yg);
                    self.offer(Node::Child(*xi, *yi), g, &mut fresh)?;
                }
            }
        }
        for na in 1..=n / 2 {
            let nb = n - na;
            let as_ = self.by_size[na].clone();
            let bs = self.by_size[nb].clone();
            for (ia, (ai, ag)) in as_.iter().enumerate() {
                let start = if na == nb { ia } else { 0 };
                for (bi, bg) in &bs[start..] {
                    let g = self.layout.sibling(ag, bg);
                    self.offer(Node::Sib(*ai, *bi), g, &mut fresh)?;
                }
            }
        }
        self.by_size.push(fresh);
        Ok(())
    }
}

/// Exhaustive search over rooted 2-trees with at most `max_n` vertices for one
/// with `alpha_c / n < p/q`, smallest `n` first. Each hit is confirmed by the tree DP.
pub fn profile_search(c: usize, ratio: Ratio, max_n: usize, cap: usize) -> Result<Option<Witness>> {
    if c < 2 {
        return Err(Error::InvalidParameter("the profile search needs c >= 2".into()));
    }
    let layout = Layout { c, p: ratio.p, q: ratio.q };
    let mut search = Search { layout, arena: Arena::default(), by_size: Vec::new(), kept: 0, cap };
    let empty = search.arena.push(Node::Empty);
    search.by_size.push(vec![(empty, vec![0; layout.len()])]);
    for inner in 1..=max_n.saturating_sub(2) {
        search.grow(inner)?;
        let hit = search.by_size[inner].iter().find(|(_, g)| layout.root_margin(g) < 0).cloned();
        if let Some((id, g)) = hit {
            let t = search.arena.two_tree(id)?;
            let n = inner + 2;
            // q * alpha = margin + 2p + p * inner = margin + p * n.
            let predicted = layout.root_margin(&g) + ratio.p * n as i64;
            let w = confirm(t, c, ratio, WitnessMethod::ProfileSearch)?
                .ok_or_else(|| Error::InvariantViolation("profile search hit is not below the ratio".into()))?;
            if predicted != ratio.q * w.alpha as i64 {
                return Err(Error::InvariantViolation(format!(
                    "profile predicts q*alpha = {predicted}, tree DP gives alpha = {}",
                    w.alpha
                )));
            }
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Computes `alpha_c` exactly and returns a witness if it is below `ratio`.
fn confirm(t: RootedTwoTree, c: usize, ratio: Ratio, method: WitnessMethod) -> Result<Option<Witness>> {
    let g: Graph = t.graph();
    let n = g.n();
    let res = alpha_exact_treedp_two_tree(&t, &g, c)?;
    let alpha = res.alpha;
    Ok(ratio.exceeds(alpha as i64, n as i64).then_some(Witness { two_tree: t, n, alpha, ratio: [alpha, n], method }))
}

/// Rebuilds the piece behind closure type `idx` from the derivation records.
fn expand(arena: &mut Arena, derivations: &[Option<Derivation>], idx: usize, memo: &mut Vec<Option<usize>>) -> usize {
    if let Some(id) = memo[idx] {
        return id;
    }
    let id = match derivations[idx] {
        None => arena.push(Node::Empty),
        Some(d) => {
            let x = expand(arena, derivations, d.x, memo);
            let y = expand(arena, derivations, d.y, memo);
            arena.push(combine_node(d.kind, x, y))
        }
    };
    memo[idx] = Some(id);
    id
}

fn combine_node(kind: CombineKind, x: usize, y: usize) -> Node {
    match kind {
        CombineKind::Child => Node::Child(x, y),
        CombineKind::Sibling => Node::Sib(x, y),
    }
}

fn seed_piece(arena: &mut Arena, f: &Failure) -> usize {
    let mut memo = vec![None; f.types.len()];
    match f.seed {
        FailureSeed::NoCandidate { kind, x_index, y_index, .. } => {
            let x = expand(arena, &f.derivations, x_index, &mut memo);
            let y = expand(arena, &f.derivations, y_index, &mut memo);
            arena.push(combine_node(kind, x, y))
        }
        FailureSeed::RootCheck { index, .. } => expand(arena, &f.derivations, index, &mut memo),
    }
}

/// Looks for a rooted 2-tree with at most `max_n` vertices whose exact
/// `alpha_c / n` is strictly below `ratio`.
///
/// A certified ratio has no witness, so certification is tried first. On
/// failure the closure's derivations are expanded into a concrete 2-tree, then
/// copies of it are placed side by side on the root edge, and finally all
/// minimal profiles up to `max_n` are enumerated.
pub fn refute(c: usize, ratio: Ratio, max_n: usize) -> Result<RefuteOutcome> {
    refute_with_cap(c, ratio, max_n, PROFILE_CAP)
}

pub fn refute_with_cap(c: usize, ratio: Ratio, max_n: usize, cap: usize) -> Result<RefuteOutcome> {
    let failure = match certify(c, ratio)? {
        CertifyOutcome::Certified(_) => {
            return Ok(RefuteOutcome::NotFound { reason: format!("{ratio} is certified for c = {c}; no witness exists") });
        }
        CertifyOutcome::Failed(f) => f,
    };
    let mut arena = Arena::default();
    let piece = seed_piece(&mut arena, &failure);
    let single = arena.two_tree(piece)?;
    let inner = single.n() - 2;
    if single.n() <= max_n {
        if let Some(w) = confirm(single, c, ratio, WitnessMethod::Derivation)? {
            return Ok(RefuteOutcome::Witness(Box::new(w)));
        }
    }
    if inner > 0 {
        let mut chain = piece;
        let mut copies = 1;
        while 2 + (copies + 1) * inner <= max_n {
            chain = arena.push(Node::Sib(chain, piece));
            copies += 1;
            if let Some(w) = confirm(arena.two_tree(chain)?, c, ratio, WitnessMethod::ChainedCopies)? {
                return Ok(RefuteOutcome::Witness(Box::new(w)));
            }
        }
    }
    Ok(match profile_search(c, ratio, max_n, cap)? {
        Some(w) => RefuteOutcome::Witness(Box::new(w)),
        None => RefuteOutcome::NotFound { reason: format!("no 2-tree on at most {max_n} vertices is below {ratio}") },
    })
}
