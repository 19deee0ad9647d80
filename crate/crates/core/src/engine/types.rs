use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A positive rational `p/q` in lowest terms with `0 < p < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ratio {
    pub p: i64,
    pub q: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Ratio {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p <= 0 || q <= p {
            return Err(Error::InvalidParameter(format!("ratio {p}/{q} must satisfy 0 < p < q")));
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidParameter(format!("ratio {p}/{q} is not in lowest terms")));
        }
        Ok(Ratio { p, q })
    }

    /// `a/b < p/q`, exactly.
    pub fn exceeds(&self, a: i64, b: i64) -> bool {
        a * self.q < self.p * b
    }

    pub fn mediant(&self, other: &Ratio) -> (i64, i64) {
        (self.p + other.p, self.q + other.q)
    }

    /// Smallest fraction above `self` whose denominator is at most `max_q`.
    pub fn farey_successor(&self, max_q: i64) -> Option<Ratio> {
        // Solve q a - p b = 1 with the largest b <= max_q.
        let (p, q) = (self.p, self.q);
        let b0 = (1..=q).find(|&b| (1 + p * b) % q == 0)?;
        if b0 > max_q {
            return None;
        }
        let b = b0 + (max_q - b0) / q * q;
        let a = (1 + p * b) / q;
        (a < b).then_some(Ratio { p: a, q: b })
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once('/').ok_or_else(|| Error::Parse(format!("expected P/Q, got {s:?}")))?;
        let p = a.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let q = b.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        Ratio::new(p, q)
    }
}

/// Engine parameters: cluster cap `c` and target ratio `p/q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub c: u8,
    pub ratio: Ratio,
}

impl Params {
    pub fn new(c: usize, ratio: Ratio) -> Result<Self> {
        if c < 2 {
            return Err(Error::InvalidParameter("the type engine needs c >= 2".into()));
        }
        if c > 60 {
            return Err(Error::CapExceeded(format!("c = {c} is beyond the engine's range")));
        }
        Ok(Params { c: c as u8, ratio })
    }

    pub fn p(&self) -> i64 {
        self.ratio.p
    }

    pub fn q(&self) -> i64 {
        self.ratio.q
    }

    /// Surplus at which a set is good and gets cut.
    pub fn good_level(&self) -> i64 {
        2 * self.ratio.p
    }

    fn cap(&self, x: u32) -> u8 {
        x.min(self.c as u32) as u8
    }
}

/// Surplus and threats of a child set `W` of an edge `uv`, `u` the parent of `v`.
///
/// `threat_u` counts stored vertices in components seeing `u` but not `v`,
/// `threat_v` the converse, and `threat_common` those in components seeing
/// both. Threats saturate at `c`: a parent touched by `c` stored vertices can
/// never be added, so larger values behave identically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeRecord {
    pub surplus: i64,
    pub threat_u: u8,
    pub threat_v: u8,
    pub threat_common: u8,
}

impl TypeRecord {
    pub const BASE: TypeRecord = TypeRecord { surplus: 0, threat_u: 0, threat_v: 0, threat_common: 0 };

    pub fn new(surplus: i64, threat_u: u8, threat_v: u8, threat_common: u8) -> Self {
        TypeRecord { surplus, threat_u, threat_v, threat_common }
    }

    pub fn is_good(&self, params: &Params) -> bool {
        self.surplus >= params.good_level()
    }

    /// Two-threat view `(alpha, s, beta)`: total threat at `u`, surplus, total threat at `v`.
    pub fn projection(&self) -> (u8, i64, u8) {
        (self.threat_u + self.threat_common, self.surplus, self.threat_v + self.threat_common)
    }

    pub fn as_array(&self) -> [i64; 4] {
        [self.surplus, self.threat_u as i64, self.threat_v as i64, self.threat_common as i64]
    }

    pub fn from_array(a: [i64; 4]) -> Result<Self> {
        let t = |x: i64| u8::try_from(x).map_err(|_| Error::Parse(format!("threat {x} out of range")));
        Ok(TypeRecord { surplus: a[0], threat_u: t(a[1])?, threat_v: t(a[2])?, threat_common: t(a[3])? })
    }
}

impl fmt::Display for TypeRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {},{},{})", self.surplus, self.threat_u, self.threat_v, self.threat_common)
    }
}

/// Union of two disjoint child sets of the same edge.
pub fn combine_sibling(a: &TypeRecord, b: &TypeRecord, params: &Params) -> TypeRecord {
    TypeRecord {
        surplus: a.surplus + b.surplus,
        threat_u: params.cap(a.threat_u as u32 + b.threat_u as u32),
        threat_v: params.cap(a.threat_v as u32 + b.threat_v as u32),
        threat_common: params.cap(a.threat_common as u32 + b.threat_common as u32),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChildChoice {
    Include,
    Exclude,
}

/// Candidate types for the single child `w` of `uv`, given the type `x` of all
/// children of `uw` and `y` of all children of `vw`. Candidates with negative
/// surplus, and including `w` when its component would exceed `c`, are dropped.
pub fn combine_child(x: &TypeRecord, y: &TypeRecord, params: &Params) -> Vec<(ChildChoice, TypeRecord)> {
    let (p, q, c) = (params.p(), params.q(), params.c as u32);
    let mut out = Vec::with_capacity(2);
    let merged = 1 + x.threat_v as u32 + x.threat_common as u32 + y.threat_v as u32 + y.threat_common as u32;
    if merged <= c {
        let s = x.surplus + y.surplus + (q - p);
        if s >= 0 {
            out.push((ChildChoice::Include, TypeRecord::new(s, x.threat_u, y.threat_u, merged as u8)));
        }
    }
    let s = x.surplus + y.surplus - p;
    if s >= 0 {
        out.push((
            ChildChoice::Exclude,
            TypeRecord::new(
                s,
                params.cap(x.threat_u as u32 + x.threat_common as u32),
                params.cap(y.threat_u as u32 + y.threat_common as u32),
                0,
            ),
        ));
    }
    out
}

/// How many root-edge endpoints can join the stored set: 2 if both fit, 1 if one does.
pub fn root_bonus(t: &TypeRecord, c: u8) -> u8 {
    let (u, v, m) = (t.threat_u as u32, t.threat_v as u32, t.threat_common as u32);
    let c = c as u32;
    if 2 + u + v + m <= c {
        2
    } else if 1 + u + m <= c || 1 + v + m <= c {
        1
    } else {
        0
    }
}

/// `sp + q * bonus >= 2p`: the stored set plus the bonus endpoints meets the ratio on the whole graph.
pub fn passes_root_check(t: &TypeRecord, params: &Params) -> bool {
    t.surplus + params.q() * root_bonus(t, params.c) as i64 >= params.good_level()
}
