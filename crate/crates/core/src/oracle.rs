//! Exact computation of the c-clustered independence number `alpha_c` and the
//! c-clustered chromatic number `chi_c` at desk scale.
//!
//! Two independent routes compute `alpha_c`: a branch-and-bound over vertex
//! subsets ([`alpha_exact_bruteforce`]) and a dynamic program over the bags
//! induced by a k-tree model ([`alpha_exact_treedp`]). They share nothing but
//! [`Graph`], so each is a check on the other.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ClusteredSet, Graph};
use crate::model::{two_tree_to_model, validate_model, KTreeModel, RootedTwoTree};

/// Largest graph the brute-force oracle accepts.
pub const BRUTE_FORCE_MAX_N: usize = 28;
/// Largest graph the exact clustered-chromatic search accepts.
pub const CHI_MAX_N: usize = 12;
/// Default node budget for the branch-and-bound.
pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;
/// Largest DP table (per bag) before the tree DP gives up.
pub const TREEDP_STATE_CAP: usize = 250_000;

/// Value of `alpha_c` together with a set attaining it.
/// `exact == false` means the search ran out of budget and `value` is only a lower bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaResult {
    pub alpha: usize,
    pub witness: Vec<usize>,
    pub exact: bool,
}

impl AlphaResult {
    pub fn clustered_set(&self, g: &Graph, c: usize) -> Result<ClusteredSet> {
        ClusteredSet::new(g, self.witness.clone(), c)
    }
}

struct Search<'a> {
    order: Vec<usize>,
    adj: &'a [u64],
    c: usize,
    best: u64,
    best_len: u32,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn component_size(&self, set: u64, start: usize, cap: usize) -> usize {
        let mut seen = 1u64 << start;
        let mut frontier = seen;
        let mut size = 1;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = self.adj[v] & set & !seen;
            seen |= fresh;
            frontier |= fresh;
            size += fresh.count_ones() as usize;
            if size > cap {
                return size;
            }
        }
        size
    }

    fn run(&mut self, i: usize, set: u64) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let len = set.count_ones();
        if len > self.best_len {
            self.best_len = len;
            self.best = set;
        }
        if i == self.order.len() || len as usize + (self.order.len() - i) <= self.best_len as usize {
            return;
        }
        let v = self.order[i];
        let with = set | (1u64 << v);
        if self.component_size(with, v, self.c) <= self.c {
            self.run(i + 1, with);
        }
        self.run(i + 1, set);
    }
}

/// Branch-and-bound over in/out decisions in descending-degree order, pruning
/// on component size and on `|S| + undecided <= best`.
pub fn alpha_exact_bruteforce(g: &Graph, c: usize, budget: u64) -> Result<AlphaResult> {
    if c == 0 {
        return Err(Error::ZeroClusterCap);
    }
    let n = g.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::CapExceeded(format!(
            "brute force handles at most {BRUTE_FORCE_MAX_N} vertices, got {n}"
        )));
    }
    let adj: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | (1 << u)))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut search = Search { order, adj: &adj, c, best: 0, best_len: 0, nodes: 0, budget, exhausted: false };
    search.run(0, 0);
    let witness: Vec<usize> = (0..n).filter(|&v| search.best >> v & 1 == 1).collect();
    Ok(AlphaResult { alpha: witness.len(), witness, exact: !search.exhausted })
}

const NONE: u8 = u8::MAX;
const MAX_SLOTS: usize = 8;

/// DP state over the bag slots (one slot per label): the block id of each
/// selected slot (`NONE` when unselected or empty) and, per block, how many
/// already-forgotten selected vertices hang in that component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct State {
    block: [u8; MAX_SLOTS],
    forgotten: [u8; MAX_SLOTS],
}

impl State {
    fn empty() -> Self {
        State { block: [NONE; MAX_SLOTS], forgotten: [0; MAX_SLOTS] }
    }

    /// Renumbers blocks by first occurrence so equal partitions compare equal.
    fn canonical(mut self, slots: usize) -> Self {
        let mut map = [NONE; MAX_SLOTS];
        let mut forgotten = [0u8; MAX_SLOTS];
        let mut next = 0u8;
        for s in 0..slots {
            let b = self.block[s];
            if b == NONE {
                continue;
            }
            if map[b as usize] == NONE {
                map[b as usize] = next;
                forgotten[next as usize] = self.forgotten[b as usize];
                next += 1;
            }
            self.block[s] = map[b as usize];
        }
        self.forgotten = forgotten;
        self
    }

    fn block_sizes(&self, slots: usize) -> [usize; MAX_SLOTS] {
        let mut size = [0usize; MAX_SLOTS];
        for s in 0..slots {
            if self.block[s] != NONE {
                size[self.block[s] as usize] += 1;
            }
        }
        for (b, sz) in size.iter_mut().enumerate() {
            *sz += self.forgotten[b] as usize;
        }
        size
    }

    fn selection(&self, slots: usize) -> u16 {
        (0..slots).filter(|&s| self.block[s] != NONE).fold(0, |m, s| m | 1 << s)
    }
}

/// Tiny union-find over block ids.
fn find(parent: &mut [u8; 2 * MAX_SLOTS], x: u8) -> u8 {
    let mut r = x;
    while parent[r as usize] != r {
        r = parent[r as usize];
    }
    let mut y = x;
    while parent[y as usize] != r {
        let next = parent[y as usize];
        parent[y as usize] = r;
        y = next;
    }
    r
}

/// Merges two states over the same slots; blocks sharing a selected slot unite.
/// Returns `None` if some merged block exceeds `c`.
fn merge(a: &State, b: &State, slots: usize, c: usize) -> Option<State> {
    let mut parent = [0u8; 2 * MAX_SLOTS];
    for (i, p) in parent.iter_mut().enumerate() {
        *p = i as u8;
    }
    let off = MAX_SLOTS as u8;
    for s in 0..slots {
        if a.block[s] != NONE && b.block[s] != NONE {
            let x = find(&mut parent, a.block[s]);
            let y = find(&mut parent, b.block[s] + off);
            parent[x as usize] = y;
        }
    }
    let mut out = State::empty();
    let mut forgotten = [0usize; 2 * MAX_SLOTS];
    for blk in 0..MAX_SLOTS {
        let ra = find(&mut parent, blk as u8);
        forgotten[ra as usize] += a.forgotten[blk] as usize;
        let rb = find(&mut parent, blk as u8 + off);
        forgotten[rb as usize] += b.forgotten[blk] as usize;
    }
    let mut slots_in = [0usize; 2 * MAX_SLOTS];
    for s in 0..slots {
        let root = if a.block[s] != NONE {
            find(&mut parent, a.block[s])
        } else if b.block[s] != NONE {
            find(&mut parent, b.block[s] + off)
        } else {
            continue;
        };
        out.block[s] = root;
        slots_in[root as usize] += 1;
    }
    if (0..2 * MAX_SLOTS).any(|r| slots_in[r] > 0 && slots_in[r] + forgotten[r] > c) {
        return None;
    }
    // Union-find roots range over both id spaces; remap them densely.
    let mut dense = [NONE; 2 * MAX_SLOTS];
    let mut next = 0u8;
    let mut result = State::empty();
    for s in 0..slots {
        let r = out.block[s];
        if r == NONE {
            continue;
        }
        if dense[r as usize] == NONE {
            dense[r as usize] = next;
            result.forgotten[next as usize] = forgotten[r as usize] as u8;
            next += 1;
        }
        result.block[s] = dense[r as usize];
    }
    Some(result)
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    value: usize,
    /// Predecessor state at this vertex and the child's full state that produced this entry.
    back: Option<(State, State)>,
}

type Table = BTreeMap<State, Entry>;

/// Exact `alpha_c` by dynamic programming over the tree decomposition whose bag
/// at `v` is `v` together with its lowest ancestor of every other label.
pub fn alpha_exact_treedp(m: &KTreeModel, g: &Graph, c: usize) -> Result<AlphaResult> {
    if c == 0 {
        return Err(Error::ZeroClusterCap);
    }
    validate_model(m, g)?;
    let slots = m.k() + 1;
    if slots > MAX_SLOTS {
        return Err(Error::CapExceeded(format!("tree DP supports k <= {}", MAX_SLOTS - 1)));
    }
    if c > u8::MAX as usize / 2 {
        return Err(Error::CapExceeded("cluster cap too large for the tree DP".into()));
    }
    let low = m.lowest_ancestors();
    let children = m.children();
    let n = m.n();
    let bag = |v: usize| -> [Option<usize>; MAX_SLOTS] {
        let mut b = [None; MAX_SLOTS];
        for l in 1..=slots {
            b[l - 1] = if l == m.label(v) { Some(v) } else { low[v][l] };
        }
        b
    };

    // steps[v] holds the tables after the initial bag and after each child merge.
    let mut steps: Vec<Vec<Table>> = vec![Vec::new(); n];
    let mut final_table: Vec<Option<Table>> = vec![None; n];
    let order = m.bfs_order();
    for &v in order.iter().rev() {
        let b = bag(v);
        let own = m.label(v) - 1;
        let present: Vec<usize> = (0..slots).filter(|&s| b[s].is_some()).collect();
        let mut table = Table::new();
        for mask in 0u32..(1 << present.len()) {
            let mut st = State::empty();
            let mut next = 0u8;
            for (i, &s) in present.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    st.block[s] = next;
                    next += 1;
                }
            }
            if st.block[own] != NONE {
                for (s, bs) in b.iter().enumerate().take(slots) {
                    if s != own && st.block[s] != NONE && g.has_edge(v, bs.unwrap()) {
                        let (keep, gone) = (st.block[own], st.block[s]);
                        for x in st.block.iter_mut().take(slots) {
                            if *x == gone {
                                *x = keep;
                            }
                        }
                    }
                }
            }
            let st = st.canonical(slots);
            if st.block_sizes(slots).iter().any(|&sz| sz > c) {
                continue;
            }
            let value = usize::from(st.block[own] != NONE);
            table.insert(st, Entry { value, back: None });
        }
        let mut history = vec![table.clone()];
        for &ch in &children[v] {
            let child = final_table[ch].take().expect("children are processed first");
            let cslot = m.label(ch) - 1;
            // Forget the child vertex, keeping the best full child state per projection.
            let mut projected: BTreeMap<State, (usize, State)> = BTreeMap::new();
            for (cs, e) in &child {
                let mut p = *cs;
                let b = p.block[cslot];
                if b != NONE {
                    p.block[cslot] = NONE;
                    if p.block[..slots].contains(&b) {
                        p.forgotten[b as usize] += 1;
                    } else {
                        p.forgotten[b as usize] = 0;
                    }
                }
                let p = p.canonical(slots);
                let better = projected.get(&p).is_none_or(|&(val, _)| e.value > val);
                if better {
                    projected.insert(p, (e.value, *cs));
                }
            }
            let mut by_sel: BTreeMap<u16, Vec<(State, usize, State)>> = BTreeMap::new();
            for (p, (val, cs)) in projected {
                by_sel.entry(p.selection(slots)).or_default().push((p, val, cs));
            }
            let shared_mask: u16 = (0..slots).filter(|&s| s != cslot).fold(0, |m, s| m | 1 << s);
            let mut merged = Table::new();
            for (vs, ve) in &table {
                let want = vs.selection(slots) & shared_mask;
                let Some(list) = by_sel.get(&want) else { continue };
                for (p, val, cs) in list {
                    let Some(st) = merge(vs, p, slots, c) else { continue };
                    let st = st.canonical(slots);
                    let value = ve.value + val;
                    let better = merged.get(&st).is_none_or(|e| value > e.value);
                    if better {
                        merged.insert(st, Entry { value, back: Some((*vs, *cs)) });
                    }
                }
            }
            if merged.len() > TREEDP_STATE_CAP {
                return Err(Error::CapExceeded(format!("tree DP table exceeded {TREEDP_STATE_CAP} states")));
            }
            table = merged;
            history.push(table.clone());
        }
        steps[v] = history;
        final_table[v] = Some(table);
    }

    let root = m.root();
    let root_table = final_table[root].take().expect("root processed");
    let (&best_state, best) = root_table
        .iter()
        .fold(None, |acc: Option<(&State, &Entry)>, (s, e)| match acc {
            Some((_, be)) if be.value >= e.value => acc,
            _ => Some((s, e)),
        })
        .expect("the empty selection is always feasible");

    let mut selected = vec![false; n];
    let mut stack = vec![(root, best_state)];
    while let Some((v, mut st)) = stack.pop() {
        let hist = &steps[v];
        for (i, &ch) in children[v].iter().enumerate().rev() {
            let entry = hist[i + 1][&st];
            let (prev, child_state) = entry.back.expect("merged entries carry back-pointers");
            stack.push((ch, child_state));
            st = prev;
        }
        selected[v] = st.block[m.label(v) - 1] != NONE;
    }
    let witness: Vec<usize> = (0..n).filter(|&v| selected[v]).collect();
    debug_assert_eq!(witness.len(), best.value);
    debug_assert!(g.is_c_clustered(&witness, c).unwrap_or(false));
    Ok(AlphaResult { alpha: best.value, witness, exact: true })
}

/// Tree DP on a rooted 2-tree completion of `g` (pass `t.graph()` when `g` is the 2-tree itself).
pub fn alpha_exact_treedp_two_tree(t: &RootedTwoTree, g: &Graph, c: usize) -> Result<AlphaResult> {
    alpha_exact_treedp(&two_tree_to_model(t), g, c)
}

/// Minimum number of colours in a colouring whose colour classes are all c-clustered.
pub fn chi_clustered_exact(g: &Graph, c: usize) -> Result<usize> {
    if c == 0 {
        return Err(Error::ZeroClusterCap);
    }
    let n = g.n();
    if n > CHI_MAX_N {
        return Err(Error::CapExceeded(format!("exact chi_c handles at most {CHI_MAX_N} vertices, got {n}")));
    }
    if n == 0 {
        return Ok(0);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    for t in 1..=n {
        let mut colour = vec![usize::MAX; n];
        if colour_from(g, c, t, &order, 0, 0, &mut colour) {
            return Ok(t);
        }
    }
    unreachable!("n colours always suffice")
}

fn colour_from(g: &Graph, c: usize, t: usize, order: &[usize], i: usize, used: usize, colour: &mut [usize]) -> bool {
    if i == order.len() {
        return true;
    }
    let v = order[i];
    // New colours are only opened in increasing order, which removes colour permutations.
    for col in 0..t.min(used + 1) {
        colour[v] = col;
        if class_component(g, colour, v) <= c
            && colour_from(g, c, t, order, i + 1, used.max(col + 1), colour)
        {
            return true;
        }
    }
    colour[v] = usize::MAX;
    false
}

fn class_component(g: &Graph, colour: &[usize], start: usize) -> usize {
    let col = colour[start];
    let mut seen = vec![false; g.n()];
    seen[start] = true;
    let mut stack = vec![start];
    let mut size = 0;
    while let Some(x) = stack.pop() {
        size += 1;
        for &y in g.neighbors(x) {
            if !seen[y] && colour[y] == col {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    size
}
