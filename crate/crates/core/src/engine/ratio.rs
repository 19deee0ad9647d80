use serde::Serialize;

use super::certify::{certify, Certificate, CertifyOutcome};
use super::types::Ratio;
use crate::error::Result;

/// Outcome of a Stern–Brocot descent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioSearch {
    pub c: usize,
    pub best: Ratio,
    /// Smallest failing mediant seen above `best`, if any.
    pub frontier: Option<Ratio>,
    #[serde(skip)]
    pub certificate: Certificate,
    pub probes: Vec<(Ratio, bool)>,
}

/// Best accepted ratio, first rejected one, and every probe in order.
pub type Descent = (Option<Ratio>, Option<Ratio>, Vec<(Ratio, bool)>);

/// Descends the Stern–Brocot tree between `0/1` and `1/1`, moving the lower
/// end up on success and the upper end down on failure, until the next
/// mediant's denominator exceeds `q_max`.
pub fn stern_brocot_max(q_max: i64, mut accept: impl FnMut(Ratio) -> Result<bool>) -> Result<Descent> {
    let (mut lo, mut hi) = ((0i64, 1i64), (1i64, 1i64));
    let mut best = None;
    let mut frontier = None;
    let mut probes = Vec::new();
    loop {
        let (p, q) = (lo.0 + hi.0, lo.1 + hi.1);
        if q > q_max {
            break;
        }
        let r = Ratio::new(p, q)?;
        let ok = accept(r)?;
        probes.push((r, ok));
        if ok {
            lo = (p, q);
            best = Some(r);
        } else {
            hi = (p, q);
            frontier = Some(r);
        }
    }
    Ok((best, frontier, probes))
}

/// Largest `p/q` with `q <= q_max` reached by the descent for which [`certify`] succeeds.
pub fn find_ratio(c: usize, q_max: i64) -> Result<Option<RatioSearch>> {
    let mut last = None;
    let (best, frontier, probes) = stern_brocot_max(q_max, |r| {
        Ok(match certify(c, r)? {
            CertifyOutcome::Certified(cert) => {
                last = Some(cert);
                true
            }
            CertifyOutcome::Failed(_) => false,
        })
    })?;
    Ok(best.map(|best| RatioSearch {
        c,
        best,
        frontier,
        certificate: last.expect("a certified ratio has a certificate"),
        probes,
    }))
}
