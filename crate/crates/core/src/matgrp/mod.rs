//! `SL_n` (n = 2, 3) over truncated rings: arithmetic, enumeration of the
//! Frobenius-fixed group, the congruence filtration, root subgroups and the
//! commutator calculus behind the regularity arguments.

mod lemmas;
mod roots;
mod suite;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gfield::{Fe, FieldTower};
use crate::trunc::{RingElement, TruncRing};

pub use lemmas::{
    decompose_commutator, decompose_level_product, factor_unipotent, level_cell, level_partition,
    random_level_product_input, CommutatorCertificate, LevelCell, LevelPartition, TorusUnipotentSplit,
};
pub use roots::{Root, RootSystem};
pub use suite::{exhaustive_uniqueness, run_lemma_suite, LemmaCheck, LemmaSuiteReport, PartitionCheck};

/// Largest scan `(q^r)^(n^2)` enumeration accepts.
pub const SCAN_BUDGET: u64 = 1_000_000_000;
/// Largest group enumeration will materialize.
pub const ORDER_BUDGET: u64 = 2_000_000;

/// An `n x n` matrix over a truncated ring, `n <= 3`, row-major. Entries
/// beyond `n x n` are the default (empty) ring element.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    n: u8,
    e: [RingElement; 9],
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n as usize;
        write!(f, "[")?;
        for i in 0..n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..n {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:?}", self.e[i * 3 + j])?;
            }
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &RingElement {
        &self.e[i * 3 + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: RingElement) {
        self.e[i * 3 + j] = v;
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<RingElement> {
        (0..self.n()).map(|i| *self.get(i, j)).collect()
    }
}

/// Arithmetic context for `SL_n` over one truncated ring.
#[derive(Clone, Debug)]
pub struct MatGroup {
    ring: TruncRing,
    n: usize,
}

impl MatGroup {
    pub fn new(ring: TruncRing, n: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidInput(format!("matrix size {n} not in 1..=3")));
        }
        Ok(MatGroup { ring, n })
    }

    pub fn ring(&self) -> &TruncRing {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Truncation length `r`.
    pub fn level(&self) -> usize {
        self.ring.len()
    }

    pub fn from_fn(&self, f: impl Fn(usize, usize) -> RingElement) -> Mat {
        let mut m = Mat { n: self.n as u8, e: [RingElement::default(); 9] };
        for i in 0..self.n {
            for j in 0..self.n {
                m.e[i * 3 + j] = f(i, j);
            }
        }
        m
    }

    /// Matrix from rows of field-valued coefficient lists.
    pub fn from_rows(&self, rows: &[&[RingElement]]) -> Mat {
        self.from_fn(|i, j| rows[i][j])
    }

    pub fn identity(&self) -> Mat {
        self.from_fn(|i, j| if i == j { self.ring.one() } else { self.ring.zero() })
    }

    pub fn scalar(&self, s: &RingElement) -> Mat {
        self.from_fn(|i, j| if i == j { *s } else { self.ring.zero() })
    }

    pub fn diag(&self, d: &[RingElement]) -> Mat {
        self.from_fn(|i, j| if i == j { d[i] } else { self.ring.zero() })
    }

    pub fn mul(&self, a: &Mat, b: &Mat) -> Mat {
        let r = &self.ring;
        self.from_fn(|i, j| {
            let mut acc = r.zero();
            for k in 0..self.n {
                acc = r.add(&acc, &r.mul(a.get(i, k), b.get(k, j)));
            }
            acc
        })
    }

    pub fn mul_all(&self, factors: &[&Mat]) -> Mat {
        factors.iter().fold(self.identity(), |acc, m| self.mul(&acc, m))
    }

    pub fn add(&self, a: &Mat, b: &Mat) -> Mat {
        self.from_fn(|i, j| self.ring.add(a.get(i, j), b.get(i, j)))
    }

    pub fn det(&self, a: &Mat) -> RingElement {
        let r = &self.ring;
        let g = |i: usize, j: usize| *a.get(i, j);
        match self.n {
            1 => g(0, 0),
            2 => r.sub(&r.mul(&g(0, 0), &g(1, 1)), &r.mul(&g(0, 1), &g(1, 0))),
            _ => {
                let minor = |i0: usize, i1: usize, j0: usize, j1: usize| {
                    r.sub(&r.mul(&g(i0, j0), &g(i1, j1)), &r.mul(&g(i0, j1), &g(i1, j0)))
                };
                let t0 = r.mul(&g(0, 0), &minor(1, 2, 1, 2));
                let t1 = r.mul(&g(0, 1), &minor(1, 2, 0, 2));
                let t2 = r.mul(&g(0, 2), &minor(1, 2, 0, 1));
                r.add(&r.sub(&t0, &t1), &t2)
            }
        }
    }

    /// Adjugate; equals the inverse when `det = 1`.
    pub fn adjugate(&self, a: &Mat) -> Mat {
        let r = &self.ring;
        let g = |i: usize, j: usize| *a.get(i, j);
        match self.n {
            1 => self.from_fn(|_, _| r.one()),
            2 => self.from_rows(&[&[g(1, 1), r.neg(&g(0, 1))], &[r.neg(&g(1, 0)), g(0, 0)]]),
            _ => self.from_fn(|i, j| {
                // cofactor of (j, i)
                let rows: Vec<usize> = (0..3).filter(|&k| k != j).collect();
                let cols: Vec<usize> = (0..3).filter(|&k| k != i).collect();
                let m = r.sub(
                    &r.mul(&g(rows[0], cols[0]), &g(rows[1], cols[1])),
                    &r.mul(&g(rows[0], cols[1]), &g(rows[1], cols[0])),
                );
                if (i + j) % 2 == 0 {
                    m
                } else {
                    r.neg(&m)
                }
            }),
        }
    }

    /// Inverse of an invertible matrix.
    pub fn inv(&self, a: &Mat) -> Mat {
        let d = self.det(a);
        let dinv = self.ring.inv(&d).expect("matrix is invertible");
        let adj = self.adjugate(a);
        self.from_fn(|i, j| self.ring.mul(&dinv, adj.get(i, j)))
    }

    pub fn is_special(&self, a: &Mat) -> bool {
        self.det(a) == self.ring.one()
    }

    /// Entrywise `x -> x^q`.
    pub fn frobenius(&self, a: &Mat) -> Mat {
        self.from_fn(|i, j| self.ring.frobenius(a.get(i, j)))
    }

    pub fn frobenius_pow(&self, a: &Mat, k: u32) -> Mat {
        self.from_fn(|i, j| self.ring.frobenius_pow(a.get(i, j), k))
    }

    /// `g x g^-1`.
    pub fn conj(&self, g: &Mat, x: &Mat) -> Mat {
        self.mul(&self.mul(g, x), &self.inv(g))
    }

    /// `a^-1 b^-1 a b`.
    pub fn commutator(&self, a: &Mat, b: &Mat) -> Mat {
        self.mul_all(&[&self.inv(a), &self.inv(b), a, b])
    }

    pub fn apply(&self, a: &Mat, v: &[RingElement]) -> Vec<RingElement> {
        let r = &self.ring;
        (0..self.n).map(|i| (0..self.n).fold(r.zero(), |acc, k| r.add(&acc, &r.mul(a.get(i, k), &v[k])))).collect()
    }

    /// Entrywise truncation into the group over `F[eps]/(eps^r2)`.
    pub fn reduce(&self, a: &Mat, r2: usize) -> Result<(MatGroup, Mat)> {
        let target = MatGroup::new(self.ring.with_len(r2), self.n)?;
        let mut out = target.identity();
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.ring.reduce(a.get(i, j), r2)?);
            }
        }
        Ok((target, out))
    }

    /// Does `a` reduce to the identity modulo `eps^k`?
    pub fn is_identity_mod(&self, a: &Mat, k: usize) -> bool {
        let id = self.identity();
        (0..self.n).all(|i| (0..self.n).all(|j| self.ring.congruent(a.get(i, j), id.get(i, j), k)))
    }

    /// The index `i` of the stratum `G^{i,*} = G^i - G^{i+1}` containing
    /// `a`, with `r` for the identity.
    pub fn stratum_index(&self, a: &Mat) -> usize {
        (0..=self.level()).rev().find(|&k| self.is_identity_mod(a, k)).unwrap_or(0)
    }

    pub fn is_frobenius_fixed(&self, a: &Mat) -> bool {
        self.frobenius(a) == *a
    }

    /// Canonical bytes: entries row-major, coefficients low degree first.
    pub fn encode(&self, a: &Mat) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.n * self.n * self.level() * 4);
        for i in 0..self.n {
            for j in 0..self.n {
                self.ring.encode(a.get(i, j), &mut out);
            }
        }
        out
    }

    /// Entries as nested `[row][col][eps-coefficient]` packed integers.
    pub fn to_nested(&self, a: &Mat) -> Vec<Vec<Vec<u32>>> {
        (0..self.n).map(|i| (0..self.n).map(|j| a.get(i, j).coeffs().iter().map(|x| x.0).collect()).collect()).collect()
    }

    pub fn from_nested(&self, v: &[Vec<Vec<u32>>]) -> Result<Mat> {
        if v.len() != self.n || v.iter().any(|row| row.len() != self.n) {
            return Err(Error::InvalidInput("matrix shape mismatch".into()));
        }
        Ok(self.from_fn(|i, j| {
            let c: Vec<Fe> = v[i][j].iter().map(|&x| Fe(x)).collect();
            self.ring.from_coeffs(&c)
        }))
    }

    /// Order of `a` in the group.
    pub fn element_order(&self, a: &Mat) -> u64 {
        let id = self.identity();
        let mut cur = *a;
        let mut k = 1u64;
        while cur != id {
            cur = self.mul(&cur, a);
            k += 1;
        }
        k
    }
}

/// `|SL_n(F_q)|`.
pub fn sl_order_over_field(n: usize, q: u64) -> u64 {
    let mut order = 1u64;
    for k in 0..n as u32 {
        order *= q.pow(n as u32) - q.pow(k);
    }
    order / (q - 1)
}

/// `|SL_n(F_q[eps]/(eps^r))| = q^((n^2-1)(r-1)) |SL_n(F_q)|`.
pub fn sl_order(n: usize, q: u64, r: usize) -> u64 {
    if r == 0 {
        return 1;
    }
    q.pow(((n * n - 1) * (r - 1)) as u32) * sl_order_over_field(n, q)
}

/// The group context over `F_q[eps]/(eps^r)` inside the given tower.
pub fn fixed_group(tower: Arc<FieldTower>, n: usize, q: u64, r: usize) -> Result<MatGroup> {
    let d = tower.subfield_degree(q)?;
    MatGroup::new(TruncRing::new(tower, r, q, d)?, n)
}

/// All of `SL_n(F_q[eps]/(eps^r))`, sorted by canonical encoding.
///
/// Every entry but the last is enumerated; `det` is affine in the last
/// entry, so it is solved for when its cofactor is a unit and scanned
/// otherwise.
pub fn enumerate_sl_fixed(group: &MatGroup) -> Result<Vec<Mat>> {
    let ring = group.ring();
    let n = group.n();
    let card = ring.cardinality();
    let scan = (card as f64).powi((n * n) as i32);
    if scan > SCAN_BUDGET as f64 {
        return Err(Error::Budget(format!("scan of {scan:.0} matrices exceeds {SCAN_BUDGET}")));
    }
    let q = (ring.field().characteristic() as u64).pow(ring.coeff_degree());
    let expected = sl_order(n, q, ring.len());
    if expected > ORDER_BUDGET {
        return Err(Error::Budget(format!("group of order {expected} exceeds {ORDER_BUDGET}")));
    }
    let elems = ring.elements();
    let m = elems.len();
    let slots = n * n - 1;
    let mut out = Vec::with_capacity(expected as usize);
    let mut idx = vec![0usize; slots];
    let one = ring.one();
    loop {
        let mut g = group.from_fn(|i, j| {
            let s = i * n + j;
            if s < slots {
                elems[idx[s]]
            } else {
                ring.zero()
            }
        });
        // det(g with last entry x) = det(g with last 0) + x * cofactor
        let base = group.det(&g);
        let mut unit_entry = g;
        unit_entry.set(n - 1, n - 1, one);
        let cof = ring.sub(&group.det(&unit_entry), &base);
        if let Some(ci) = ring.inv(&cof) {
            let x = ring.mul(&ring.sub(&one, &base), &ci);
            g.set(n - 1, n - 1, x);
            out.push(g);
        } else {
            for x in &elems {
                let val = ring.add(&base, &ring.mul(x, &cof));
                if val == one {
                    let mut h = g;
                    h.set(n - 1, n - 1, *x);
                    out.push(h);
                }
            }
        }
        let mut k = 0;
        loop {
            if k == slots {
                out.sort_by_key(|a| group.encode(a));
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(p: u32, n: usize, r: usize) -> MatGroup {
        fixed_group(Arc::new(FieldTower::new(p, 1).unwrap()), n, p as u64, r).unwrap()
    }

    #[test]
    fn enumeration_orders() {
        assert_eq!(enumerate_sl_fixed(&group(2, 2, 2)).unwrap().len(), 48);
        assert_eq!(enumerate_sl_fixed(&group(3, 2, 1)).unwrap().len(), 24);
        assert_eq!(enumerate_sl_fixed(&group(3, 2, 2)).unwrap().len(), 648);
        assert_eq!(enumerate_sl_fixed(&group(2, 3, 1)).unwrap().len(), 168);
        for (q, r) in [(2u64, 1usize), (2, 2), (3, 1), (3, 2)] {
            assert_eq!(sl_order(2, q, r), q.pow(3 * (r as u32 - 1)) * (q * q * q - q));
        }
    }

    #[test]
    fn enumeration_over_budget() {
        let g = group(2, 3, 4);
        assert!(matches!(enumerate_sl_fixed(&g), Err(Error::Budget(_))));
    }

    #[test]
    fn group_axioms_small() {
        let g = group(2, 2, 2);
        let all = enumerate_sl_fixed(&g).unwrap();
        let set: std::collections::HashSet<_> = all.iter().copied().collect();
        for a in &all {
            assert!(g.is_special(a));
            assert!(g.is_frobenius_fixed(a));
            let ai = g.inv(a);
            assert_eq!(g.mul(a, &ai), g.identity());
            for b in &all {
                assert!(set.contains(&g.mul(a, b)));
            }
        }
        let mut enc: Vec<_> = all.iter().map(|a| g.encode(a)).collect();
        let sorted = enc.clone();
        enc.dedup();
        assert_eq!(enc, sorted);
    }

    #[test]
    fn inverse_sl3() {
        let g = group(3, 3, 1);
        for a in enumerate_sl_fixed(&g).unwrap().iter().step_by(37) {
            assert_eq!(g.mul(&g.inv(a), a), g.identity());
        }
    }

    #[test]
    fn strata_partition() {
        let g = group(2, 2, 2);
        let all = enumerate_sl_fixed(&g).unwrap();
        let mut sizes = [0usize; 3];
        for a in &all {
            let i = g.stratum_index(a);
            sizes[i] += 1;
            for k in 0..=2 {
                let (h, red) = g.reduce(a, k).unwrap();
                assert_eq!(red == h.identity(), i >= k);
            }
        }
        assert_eq!(sizes, [40, 7, 1]);
        assert_eq!(g.stratum_index(&g.identity()), 2);
        let rs = RootSystem::new(2);
        let x = rs.root_element(&g, Root::new(0, 1), &g.ring().eps());
        assert_eq!(g.stratum_index(&x), 1);
    }

    #[test]
    fn nested_roundtrip() {
        let g = group(3, 2, 2);
        for a in enumerate_sl_fixed(&g).unwrap().iter().step_by(11) {
            assert_eq!(g.from_nested(&g.to_nested(a)).unwrap(), *a);
        }
    }
}
