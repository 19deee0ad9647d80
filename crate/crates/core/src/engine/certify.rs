use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::types::{combine_child, combine_sibling, passes_root_check, root_bonus, ChildChoice, Params, Ratio, TypeRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombineKind {
    Child,
    Sibling,
}

/// One resolved pair: combining types `x` and `y` (indices into the closure)
/// yields `out`, or a good set when `out` is `None`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub kind: CombineKind,
    pub x: usize,
    pub y: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choice: Option<ChildChoice>,
    pub out: Option<usize>,
}

/// How a closure type was first produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub kind: CombineKind,
    pub x: usize,
    pub y: usize,
}

/// A closed, root-safe set of types with a strategy for every pair. Index 0 is the base type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub c: usize,
    pub p: i64,
    pub q: i64,
    pub types: Vec<[i64; 4]>,
    pub strategy: Vec<StrategyEntry>,
    pub root_bonus: Vec<u8>,
    #[serde(default)]
    pub derivations: Vec<Option<Derivation>>,
}

/// Why certification stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum FailureSeed {
    /// Combining these two closure types has no admissible outcome.
    NoCandidate { kind: CombineKind, x: TypeRecord, y: TypeRecord, x_index: usize, y_index: usize },
    /// This closure type cannot be completed at the root edge.
    RootCheck { t: TypeRecord, index: usize },
}

/// Search state kept on failure so the caller can expand derivations into graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub seed: FailureSeed,
    pub types: Vec<TypeRecord>,
    pub derivations: Vec<Option<Derivation>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertifyOutcome {
    Certified(Certificate),
    Failed(Box<Failure>),
}

impl CertifyOutcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            CertifyOutcome::Certified(c) => Some(c),
            CertifyOutcome::Failed(_) => None,
        }
    }
}

/// Orders candidates: already-known types first, then larger surplus, then
/// smaller common threat, then smaller side threats.
fn preference(known: bool, t: &TypeRecord) -> (bool, i64, u8, u16, TypeRecord) {
    (!known, -t.surplus, t.threat_common, t.threat_u as u16 + t.threat_v as u16, *t)
}

struct Closure {
    params: Params,
    types: Vec<TypeRecord>,
    index: HashMap<TypeRecord, usize>,
    derivations: Vec<Option<Derivation>>,
    queue: VecDeque<(CombineKind, usize, usize)>,
    strategy: Vec<StrategyEntry>,
}

impl Closure {
    fn add(&mut self, t: TypeRecord, from: Option<Derivation>) -> std::result::Result<usize, Box<Failure>> {
        let id = self.types.len();
        self.types.push(t);
        self.index.insert(t, id);
        self.derivations.push(from);
        if !passes_root_check(&t, &self.params) {
            return Err(self.fail(FailureSeed::RootCheck { t, index: id }));
        }
        for j in 0..=id {
            self.queue.push_back((CombineKind::Child, id, j));
            if j != id {
                self.queue.push_back((CombineKind::Child, j, id));
            }
            self.queue.push_back((CombineKind::Sibling, j, id));
        }
        Ok(id)
    }

    fn fail(&self, seed: FailureSeed) -> Box<Failure> {
        Box::new(Failure { seed, types: self.types.clone(), derivations: self.derivations.clone() })
    }

    fn resolve(&mut self, kind: CombineKind, x: usize, y: usize) -> std::result::Result<(), Box<Failure>> {
        let (tx, ty) = (self.types[x], self.types[y]);
        let candidates: Vec<(Option<ChildChoice>, TypeRecord)> = match kind {
            CombineKind::Child => {
                combine_child(&tx, &ty, &self.params).into_iter().map(|(ch, t)| (Some(ch), t)).collect()
            }
            CombineKind::Sibling => vec![(None, combine_sibling(&tx, &ty, &self.params))],
        };
        if candidates.is_empty() {
            return Err(self.fail(FailureSeed::NoCandidate { kind, x: tx, y: ty, x_index: x, y_index: y }));
        }
        if let Some(&(choice, _)) = candidates.iter().find(|(_, t)| t.is_good(&self.params)) {
            self.strategy.push(StrategyEntry { kind, x, y, choice, out: None });
            return Ok(());
        }
        let &(choice, best) = candidates
            .iter()
            .min_by_key(|(_, t)| preference(self.index.contains_key(t), t))
            .expect("non-empty");
        let out = match self.index.get(&best) {
            Some(&id) => id,
            None => self.add(best, Some(Derivation { kind, x, y }))?,
        };
        self.strategy.push(StrategyEntry { kind, x, y, choice, out: Some(out) });
        Ok(())
    }
}

/// Greedy closure search for a certificate that every 2-tree has a
/// `c`-clustered set of at least `p/q` of its vertices.
///
/// Pairs are resolved in a fixed FIFO order, so the outcome is deterministic.
/// Failure is a lead for refutation, not a proof that the ratio is false.
pub fn certify(c: usize, ratio: Ratio) -> Result<CertifyOutcome> {
    let params = Params::new(c, ratio)?;
    let mut cl = Closure {
        params,
        types: Vec::new(),
        index: HashMap::new(),
        derivations: Vec::new(),
        queue: VecDeque::new(),
        strategy: Vec::new(),
    };
    let run = |cl: &mut Closure| -> std::result::Result<(), Box<Failure>> {
        cl.add(TypeRecord::BASE, None)?;
        while let Some((kind, x, y)) = cl.queue.pop_front() {
            cl.resolve(kind, x, y)?;
        }
        Ok(())
    };
    if let Err(f) = run(&mut cl) {
        return Ok(CertifyOutcome::Failed(f));
    }
    let mut strategy = cl.strategy;
    strategy.sort_by_key(|e| (e.kind, e.x, e.y));
    Ok(CertifyOutcome::Certified(Certificate {
        c,
        p: ratio.p,
        q: ratio.q,
        root_bonus: cl.types.iter().map(|t| root_bonus(t, params.c)).collect(),
        types: cl.types.iter().map(TypeRecord::as_array).collect(),
        strategy,
        derivations: cl.derivations,
    }))
}

impl Certificate {
    pub fn params(&self) -> Result<Params> {
        Params::new(self.c, Ratio::new(self.p, self.q)?)
    }

    pub fn type_records(&self) -> Result<Vec<TypeRecord>> {
        self.types.iter().map(|&a| TypeRecord::from_array(a)).collect()
    }

    /// Lookup table `(kind, x, y) -> entry`.
    pub fn strategy_map(&self) -> HashMap<(CombineKind, usize, usize), &StrategyEntry> {
        self.strategy.iter().map(|e| ((e.kind, e.x, e.y), e)).collect()
    }

    /// Re-checks the certificate from scratch: base type present, every type
    /// admissible and root-safe, and every ordered child pair and unordered
    /// sibling pair resolved to a good set or a listed type by a legal move.
    pub fn verify(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(format!("certificate rejected: {msg}")));
        let params = self.params()?;
        let types = self.type_records()?;
        if types.first() != Some(&TypeRecord::BASE) {
            return bad("type 0 must be the base type".into());
        }
        let mut seen = HashMap::new();
        for (i, t) in types.iter().enumerate() {
            if t.surplus < 0 || t.is_good(&params) {
                return bad(format!("type {i} has surplus {} outside [0, 2p)", t.surplus));
            }
            if [t.threat_u, t.threat_v, t.threat_common].iter().any(|&x| x > params.c) {
                return bad(format!("type {i} has a threat above c"));
            }
            if !passes_root_check(t, &params) {
                return bad(format!("type {i} fails the root check"));
            }
            if self.root_bonus.get(i) != Some(&root_bonus(t, params.c)) {
                return bad(format!("root bonus of type {i} is wrong"));
            }
            if seen.insert(*t, i).is_some() {
                return bad(format!("type {i} is listed twice"));
            }
        }
        let map = self.strategy_map();
        if map.len() != self.strategy.len() {
            return bad("strategy lists a pair twice".into());
        }
        let n = types.len();
        let expected = n * n + n * (n + 1) / 2;
        if self.strategy.len() != expected {
            return bad(format!("strategy has {} entries, expected {expected}", self.strategy.len()));
        }
        for e in &self.strategy {
            if e.x >= n || e.y >= n || (e.kind == CombineKind::Sibling && e.x > e.y) {
                return bad(format!("strategy entry {e:?} refers to an invalid pair"));
            }
            let (tx, ty) = (types[e.x], types[e.y]);
            let produced = match e.kind {
                CombineKind::Child => {
                    let Some(choice) = e.choice else { return bad(format!("child entry {e:?} has no choice")) };
                    match combine_child(&tx, &ty, &params).into_iter().find(|(ch, _)| *ch == choice) {
                        Some((_, t)) => t,
                        None => return bad(format!("entry {e:?} uses an inadmissible move")),
                    }
                }
                CombineKind::Sibling => combine_sibling(&tx, &ty, &params),
            };
            let ok = match e.out {
                None => produced.is_good(&params),
                Some(o) => o < n && types[o] == produced,
            };
            if !ok {
                return bad(format!("entry {e:?} does not produce its claimed outcome {produced}"));
            }
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("certificates serialise")
    }

    pub fn from_json_str(s: &str) -> Result<Certificate> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}
