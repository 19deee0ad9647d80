use std::collections::HashMap;

use serde::Serialize;

use super::certify::{Certificate, CombineKind, StrategyEntry};
use super::types::{ChildChoice, Params, TypeRecord};
use crate::error::{Error, Result};
use crate::graph::{ClusteredSet, Graph};
use crate::model::{recognize_tw2, RootedTwoTree};

/// Result of running a certificate on a concrete graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecuteOutcome {
    #[serde(skip)]
    pub set: ClusteredSet,
    pub size: usize,
    pub n: usize,
    /// Good sets cut off before recursing on the remainder.
    pub cuts: usize,
    /// Subtrees whose surplus and threats were recomputed from the concrete set.
    pub checked: usize,
}

/// A combine step as executed, for auditing surplus arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CombineStep {
    pub kind: CombineKind,
    pub choice: Option<ChildChoice>,
    pub x: TypeRecord,
    pub y: TypeRecord,
    /// Exact surplus of the combined set, before any good-set cut.
    pub surplus: i64,
}

#[derive(Debug, Clone, Default)]
struct Acc {
    ty: usize,
    set: Vec<usize>,
    inner: Vec<usize>,
}

enum Pass {
    Done(Vec<usize>),
    Cut { keep: Vec<usize>, removed: Vec<usize> },
}

struct Runner<'a> {
    params: Params,
    types: Vec<TypeRecord>,
    strategy: HashMap<(CombineKind, usize, usize), &'a StrategyEntry>,
    root_bonus: &'a [u8],
    checked: usize,
    steps: Vec<CombineStep>,
}

impl Runner<'_> {
    fn entry(&self, kind: CombineKind, x: usize, y: usize) -> Result<&StrategyEntry> {
        let key = match kind {
            CombineKind::Sibling => (kind, x.min(y), x.max(y)),
            CombineKind::Child => (kind, x, y),
        };
        self.strategy
            .get(&key)
            .copied()
            .ok_or_else(|| Error::InvariantViolation(format!("certificate has no strategy for {key:?}")))
    }

    /// Recomputes surplus and capped threats of `set` hanging below edge `uv`.
    fn audit(&mut self, g: &Graph, u: usize, v: usize, acc: &Acc, claimed: &TypeRecord) -> Result<()> {
        let surplus = self.params.q() * acc.set.len() as i64 - self.params.p() * acc.inner.len() as i64;
        let (mut tu, mut tv, mut tm) = (0usize, 0usize, 0usize);
        for comp in g.components(&acc.set)? {
            let sees_u = comp.iter().any(|&x| g.has_edge(x, u));
            let sees_v = comp.iter().any(|&x| g.has_edge(x, v));
            match (sees_u, sees_v) {
                (true, true) => tm += comp.len(),
                (true, false) => tu += comp.len(),
                (false, true) => tv += comp.len(),
                _ => {}
            }
        }
        let c = self.params.c as usize;
        let actual = TypeRecord::new(surplus, tu.min(c) as u8, tv.min(c) as u8, tm.min(c) as u8);
        if actual != *claimed {
            return Err(Error::InvariantViolation(format!(
                "subtree below edge {u}-{v} has type {actual}, bookkeeping says {claimed}"
            )));
        }
        self.checked += 1;
        Ok(())
    }

    fn pass(&mut self, t: &RootedTwoTree) -> Result<Pass> {
        let g = t.graph();
        let pos = t.introduction_positions();
        let orient = |a: usize, b: usize| if pos[a] < pos[b] { (a, b) } else { (b, a) };
        let mut acc: HashMap<(usize, usize), Acc> = HashMap::new();
        let c = self.params.c as usize;
        for &(w, a, b) in t.attachments().iter().rev() {
            let (u, v) = orient(a, b);
            let x = acc.remove(&(u, w)).unwrap_or_default();
            let y = acc.remove(&(v, w)).unwrap_or_default();
            let e = self.entry(CombineKind::Child, x.ty, y.ty)?;
            let (choice, out) = (e.choice, e.out);
            let mut single = Acc { ty: out.unwrap_or(usize::MAX), set: x.set, inner: x.inner };
            single.set.extend(y.set);
            single.inner.extend(y.inner);
            single.inner.push(w);
            if choice == Some(ChildChoice::Include) {
                single.set.push(w);
            }
            let surplus = self.params.q() * single.set.len() as i64 - self.params.p() * single.inner.len() as i64;
            self.steps.push(CombineStep { kind: CombineKind::Child, choice, x: self.types[x.ty], y: self.types[y.ty], surplus });
            let Some(out) = out else {
                return Ok(cut(u, v, single));
            };
            self.audit(&g, u, v, &single, &self.types[out].clone())?;

            let merged = match acc.remove(&(u, v)) {
                None => single,
                Some(prev) => {
                    let e = self.entry(CombineKind::Sibling, prev.ty, single.ty)?;
                    let out = e.out;
                    let mut m = Acc { ty: out.unwrap_or(usize::MAX), set: prev.set, inner: prev.inner };
                    m.set.extend(single.set);
                    m.inner.extend(single.inner);
                    let surplus = self.params.q() * m.set.len() as i64 - self.params.p() * m.inner.len() as i64;
                    self.steps.push(CombineStep {
                        kind: CombineKind::Sibling,
                        choice: None,
                        x: self.types[prev.ty],
                        y: self.types[single.ty],
                        surplus,
                    });
                    let Some(out) = out else {
                        return Ok(cut(u, v, m));
                    };
                    self.audit(&g, u, v, &m, &self.types[out].clone())?;
                    m
                }
            };
            acc.insert((u, v), merged);
        }
        let (u0, v0) = orient(t.root_edge().0, t.root_edge().1);
        let top = acc.remove(&(u0, v0)).unwrap_or_default();
        let ty = self.types[top.ty];
        let mut set = top.set;
        match self.root_bonus[top.ty] {
            2 => set.extend([u0, v0]),
            1 if 1 + ty.threat_u as usize + ty.threat_common as usize <= c => set.push(u0),
            1 => set.push(v0),
            _ => {}
        }
        Ok(Pass::Done(set))
    }
}

fn cut(u: usize, v: usize, acc: Acc) -> Pass {
    let mut removed = acc.inner;
    removed.extend([u, v]);
    Pass::Cut { keep: acc.set, removed }
}

fn pieces(g: &Graph, ids: &[usize]) -> Vec<(Graph, Vec<usize>)> {
    g.connected_components()
        .into_iter()
        .map(|comp| {
            let (h, local) = g.induced(&comp);
            (h, local.iter().map(|&x| ids[x]).collect())
        })
        .collect()
}

/// Runs a certificate on a graph of treewidth at most 2, completing each
/// component to a rooted 2-tree first. Components on at most two vertices are taken whole.
pub fn execute_graph(g: &Graph, cert: &Certificate) -> Result<ExecuteOutcome> {
    let ids: Vec<usize> = (0..g.n()).collect();
    let mut work = Vec::new();
    for (h, map) in pieces(g, &ids) {
        work.push((None, h, map));
    }
    run(g, cert, work)
}

/// Runs a certificate on a rooted 2-tree, cutting good sets as they appear and
/// restarting on what remains. The result is `c`-clustered with `q|S| >= p n`.
pub fn execute(t: &RootedTwoTree, cert: &Certificate) -> Result<ExecuteOutcome> {
    let g = t.graph();
    let ids: Vec<usize> = (0..g.n()).collect();
    run(&g, cert, vec![(Some(t.clone()), g.clone(), ids)])
}

/// Like [`execute`], also returning every combine step taken.
pub fn execute_traced(t: &RootedTwoTree, cert: &Certificate) -> Result<(ExecuteOutcome, Vec<CombineStep>)> {
    let g = t.graph();
    let ids: Vec<usize> = (0..g.n()).collect();
    run_traced(&g, cert, vec![(Some(t.clone()), g.clone(), ids)])
}

type Work = Vec<(Option<RootedTwoTree>, Graph, Vec<usize>)>;

fn run(g: &Graph, cert: &Certificate, work: Work) -> Result<ExecuteOutcome> {
    run_traced(g, cert, work).map(|(o, _)| o)
}

fn run_traced(g: &Graph, cert: &Certificate, mut work: Work) -> Result<(ExecuteOutcome, Vec<CombineStep>)> {
    cert.verify()?;
    let params = cert.params()?;
    let mut runner = Runner {
        params,
        types: cert.type_records()?,
        strategy: cert.strategy_map(),
        root_bonus: &cert.root_bonus,
        checked: 0,
        steps: Vec::new(),
    };
    let mut chosen = Vec::new();
    let mut cuts = 0;
    while let Some((tree, h, ids)) = work.pop() {
        if h.n() <= 2 {
            chosen.extend(ids);
            continue;
        }
        let t = match tree {
            Some(t) => t,
            None => recognize_tw2(&h)?,
        };
        match runner.pass(&t)? {
            Pass::Done(set) => chosen.extend(set.into_iter().map(|x| ids[x])),
            Pass::Cut { keep, removed } => {
                cuts += 1;
                chosen.extend(keep.iter().map(|&x| ids[x]));
                let mut gone = vec![false; h.n()];
                for x in removed {
                    gone[x] = true;
                }
                let rest: Vec<usize> = (0..h.n()).filter(|&x| !gone[x]).collect();
                let (r, local) = h.induced(&rest);
                let mapped: Vec<usize> = local.iter().map(|&x| ids[x]).collect();
                for (piece, map) in pieces(&r, &mapped) {
                    work.push((None, piece, map));
                }
            }
        }
    }
    chosen.sort_unstable();
    let n = g.n();
    let size = chosen.len();
    if params.q() * (size as i64) < params.p() * (n as i64) {
        return Err(Error::InvariantViolation(format!(
            "execute produced {size} of {n} vertices, below {}",
            params.ratio
        )));
    }
    let set = ClusteredSet::new(g, chosen, params.c as usize)?;
    Ok((ExecuteOutcome { set, size, n, cuts, checked: runner.checked }, runner.steps))
}
