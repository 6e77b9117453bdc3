//! Free rank-one direct summands of `A^2`, `A = F_{q^m}[eps]/eps^2`, and
//! the relative position of `(L, F(L))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfield::ambient_tower;
use crate::trunc::{RingElement, TruncRing};

/// A line, stored by its canonical generator `(1, y)` or `(x, 1)` with
/// `x` in `eps A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlagLine(pub RingElement, pub RingElement);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelPosition {
    /// `L = L'`.
    Same,
    /// `L cap L' = eps L = eps L'`.
    Close,
    /// `L cap L' = 0`.
    Transverse,
}

impl FlagLine {
    /// The line spanned by a unimodular vector.
    pub fn through(ring: &TruncRing, v: (RingElement, RingElement)) -> Result<FlagLine> {
        if let Some(inv) = ring.inv(&v.0) {
            Ok(FlagLine(ring.one(), ring.mul(&v.1, &inv)))
        } else if let Some(inv) = ring.inv(&v.1) {
            Ok(FlagLine(ring.mul(&v.0, &inv), ring.one()))
        } else {
            Err(Error::InvalidInput(format!("{v:?} is not unimodular")))
        }
    }

    pub fn frobenius(&self, ring: &TruncRing) -> FlagLine {
        FlagLine(ring.frobenius(&self.0), ring.frobenius(&self.1))
    }

    /// Classifies the pair by `det(v, v')`: zero, a nonzero multiple of
    /// `eps`, or a unit.
    pub fn position(&self, other: &FlagLine, ring: &TruncRing) -> RelPosition {
        let det = ring.sub(&ring.mul(&self.0, &other.1), &ring.mul(&self.1, &other.0));
        if det.is_zero() {
            RelPosition::Same
        } else if ring.is_unit(&det) {
            RelPosition::Transverse
        } else {
            RelPosition::Close
        }
    }
}

/// All lines over the given ring.
pub fn all_lines(ring: &TruncRing) -> Vec<FlagLine> {
    let one = ring.one();
    let mut out: Vec<FlagLine> = ring.elements().into_iter().map(|y| FlagLine(one, y)).collect();
    out.extend(ring.elements_with_valuation(1).into_iter().map(|x| FlagLine(x, one)));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagReport {
    pub q: u64,
    pub m: u32,
    pub lines: usize,
    /// Lines with `(L, F(L))` in each relative position.
    pub same: usize,
    pub close: usize,
    pub transverse: usize,
}

/// Classifies `(L, F(L))` for every line over `F_{q^m}[eps]/eps^2`.
pub fn flag_positions(q: u64, m: u32) -> Result<FlagReport> {
    if !(1..=4).contains(&m) {
        return Err(Error::InvalidInput(format!("extension degree m={m} outside 1..=4")));
    }
    let tower = ambient_tower(q)?;
    let d = tower.subfield_degree(q)?;
    if !tower.contains_subfield(d * m) {
        return Err(Error::Budget(format!("F_{{{q}^{m}}} is outside the ambient field")));
    }
    let ring = TruncRing::new(tower, 2, q, d * m)?;
    let lines = all_lines(&ring);
    let mut report = FlagReport { q, m, lines: lines.len(), same: 0, close: 0, transverse: 0 };
    for l in &lines {
        match l.position(&l.frobenius(&ring), &ring) {
            RelPosition::Same => report.same += 1,
            RelPosition::Close => report.close += 1,
            RelPosition::Transverse => report.transverse += 1,
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn ring(q: u64, m: u32) -> TruncRing {
        let t = ambient_tower(q).unwrap();
        let d = t.subfield_degree(q).unwrap();
        TruncRing::new(t, 2, q, d * m).unwrap()
    }

    /// `|L cap L'|` by listing multiples.
    fn meet_size(r: &TruncRing, a: &FlagLine, b: &FlagLine) -> usize {
        let span = |l: &FlagLine| -> HashSet<(RingElement, RingElement)> {
            r.elements().iter().map(|s| (r.mul(s, &l.0), r.mul(s, &l.1))).collect()
        };
        span(a).intersection(&span(b)).count()
    }

    #[test]
    fn classification_matches_intersections() {
        let r = ring(2, 2);
        let lines = all_lines(&r);
        assert_eq!(lines.len(), 16 + 4);
        let size_a = r.cardinality() as usize;
        let eps_l = size_a / 4;
        for a in lines.iter().step_by(3) {
            for b in &lines {
                let want = match meet_size(&r, a, b) {
                    n if n == size_a => RelPosition::Same,
                    n if n == eps_l => RelPosition::Close,
                    1 => RelPosition::Transverse,
                    n => panic!("unexpected intersection size {n}"),
                };
                assert_eq!(a.position(b, &r), want);
            }
        }
    }

    #[test]
    fn rational_lines() {
        let rep = flag_positions(3, 1).unwrap();
        assert_eq!((rep.lines, rep.same), (12, 12));
        let rep = flag_positions(2, 2).unwrap();
        assert_eq!(rep.same + rep.close + rep.transverse, rep.lines);
        assert_eq!(rep.same, 6);
        let r = ring(3, 1);
        for l in all_lines(&r) {
            assert_eq!(l.position(&l, &r), RelPosition::Same);
        }
        assert!(flag_positions(3, 5).is_err());
    }
}
