//! Finite groups given by a multiplication oracle, and their conjugacy
//! classes.

use std::collections::{HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::matgrp::{Mat, MatGroup};

/// Largest group the engine will handle.
pub const GROUP_BUDGET: usize = 100_000;

/// Multiplication oracle for a group.
pub trait GroupOps {
    type Elem: Clone + Eq + Hash + Debug;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Injective byte encoding; defines the canonical element order.
    fn encode(&self, a: &Self::Elem) -> Vec<u8>;
    /// Coefficient arrays for reports.
    fn nested(&self, a: &Self::Elem) -> Vec<Vec<Vec<u32>>>;
}

impl GroupOps for MatGroup {
    type Elem = Mat;

    fn identity(&self) -> Mat {
        MatGroup::identity(self)
    }

    fn mul(&self, a: &Mat, b: &Mat) -> Mat {
        MatGroup::mul(self, a, b)
    }

    fn inv(&self, a: &Mat) -> Mat {
        MatGroup::inv(self, a)
    }

    fn encode(&self, a: &Mat) -> Vec<u8> {
        MatGroup::encode(self, a)
    }

    fn nested(&self, a: &Mat) -> Vec<Vec<Vec<u32>>> {
        self.to_nested(a)
    }
}

/// `Z/n`, written additively as residues.
#[derive(Clone, Copy, Debug)]
pub struct CyclicGroup(pub u64);

impl GroupOps for CyclicGroup {
    type Elem = u64;

    fn identity(&self) -> u64 {
        0
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.0
    }

    fn inv(&self, a: &u64) -> u64 {
        (self.0 - a) % self.0
    }

    fn encode(&self, a: &u64) -> Vec<u8> {
        a.to_be_bytes().to_vec()
    }

    fn nested(&self, a: &u64) -> Vec<Vec<Vec<u32>>> {
        vec![vec![vec![*a as u32]]]
    }
}

/// An enumerated group: elements sorted by encoding, with index lookup.
pub struct FiniteGroup<O: GroupOps> {
    ops: O,
    elems: Vec<O::Elem>,
    index: HashMap<O::Elem, usize>,
    generators: Vec<usize>,
}

impl<O: GroupOps> FiniteGroup<O> {
    /// Checks closure while choosing a generating set.
    pub fn new(ops: O, elems: Vec<O::Elem>) -> Result<Self> {
        if elems.len() > GROUP_BUDGET {
            return Err(Error::Budget(format!("group of order {} exceeds {GROUP_BUDGET}", elems.len())));
        }
        let mut keyed: Vec<(Vec<u8>, O::Elem)> = elems.into_iter().map(|e| (ops.encode(&e), e)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        let elems: Vec<O::Elem> = keyed.into_iter().map(|(_, e)| e).collect();
        let index: HashMap<O::Elem, usize> = elems.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let id = ops.identity();
        let id_idx = *index.get(&id).ok_or_else(|| Error::InvalidInput("element list lacks the identity".into()))?;

        // Greedy generators; the span of each prefix is grown by BFS.
        let mut in_span = vec![false; elems.len()];
        in_span[id_idx] = true;
        let mut span = vec![id_idx];
        let mut generators: Vec<usize> = Vec::new();
        for cand in 0..elems.len() {
            if in_span[cand] {
                continue;
            }
            generators.push(cand);
            let mut queue: VecDeque<usize> = span.iter().copied().collect();
            while let Some(x) = queue.pop_front() {
                for &g in &generators {
                    let y = ops.mul(&elems[x], &elems[g]);
                    let yi =
                        *index.get(&y).ok_or_else(|| Error::InvalidInput(format!("element list not closed: {y:?}")))?;
                    if !in_span[yi] {
                        in_span[yi] = true;
                        span.push(yi);
                        queue.push_back(yi);
                    }
                }
            }
        }
        Ok(FiniteGroup { ops, elems, index, generators })
    }

    pub fn ops(&self) -> &O {
        &self.ops
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn elements(&self) -> &[O::Elem] {
        &self.elems
    }

    pub fn element(&self, i: usize) -> &O::Elem {
        &self.elems[i]
    }

    pub fn index_of(&self, e: &O::Elem) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn element_order(&self, e: &O::Elem) -> u64 {
        let id = self.ops.identity();
        let mut cur = e.clone();
        let mut k = 1;
        while cur != id {
            cur = self.ops.mul(&cur, e);
            k += 1;
        }
        k
    }

    pub fn pow(&self, e: &O::Elem, mut k: u64) -> O::Elem {
        let mut base = e.clone();
        let mut acc = self.ops.identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.ops.mul(&acc, &base);
            }
            base = self.ops.mul(&base, &base);
            k >>= 1;
        }
        acc
    }
}

/// One conjugacy class; `rep` is its member of least encoding.
#[derive(Clone, Debug)]
pub struct ConjClass {
    pub rep: usize,
    pub members: Vec<usize>,
    pub size: u64,
    pub order: u64,
}

/// The conjugacy classes of a [`FiniteGroup`], ordered by element order,
/// then size, then representative encoding. Class 0 is the identity.
#[derive(Clone, Debug)]
pub struct ConjClassSet {
    pub classes: Vec<ConjClass>,
    pub class_of: Vec<usize>,
    /// `powers[l][s]` is the class of `rep_l^s`, `s < order_l`.
    pub powers: Vec<Vec<usize>>,
    pub group_order: u64,
    pub exponent: u64,
}

impl ConjClassSet {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.classes.iter().map(|c| c.size).collect()
    }

    /// The class of inverses.
    pub fn inverse_class(&self, l: usize) -> usize {
        let o = self.classes[l].order as usize;
        self.powers[l][(o - 1) % o]
    }

    pub fn centralizer_order(&self, l: usize) -> u64 {
        self.group_order / self.classes[l].size
    }
}

/// Orbits under conjugation by the generators.
pub fn conjugacy_classes<O: GroupOps>(group: &FiniteGroup<O>) -> ConjClassSet {
    let ops = group.ops();
    let n = group.order();
    let gens: Vec<(O::Elem, O::Elem)> = group
        .generators()
        .iter()
        .map(|&g| {
            let e = group.element(g).clone();
            (ops.inv(&e), e)
        })
        .collect();
    let mut class_of = vec![usize::MAX; n];
    let mut raw: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if class_of[start] != usize::MAX {
            continue;
        }
        let id = raw.len();
        class_of[start] = id;
        let mut members = vec![start];
        let mut head = 0;
        while head < members.len() {
            let x = group.element(members[head]).clone();
            head += 1;
            for (gi, g) in &gens {
                let y = ops.mul(&ops.mul(gi, &x), g);
                let yi = group.index_of(&y).expect("group is closed");
                if class_of[yi] == usize::MAX {
                    class_of[yi] = id;
                    members.push(yi);
                }
            }
        }
        members.sort_unstable();
        raw.push(members);
    }
    let mut classes: Vec<ConjClass> = raw
        .into_iter()
        .map(|members| {
            let rep = members[0];
            ConjClass { rep, size: members.len() as u64, order: group.element_order(group.element(rep)), members }
        })
        .collect();
    classes.sort_by_key(|c| (c.order, c.size, c.rep));
    for (l, c) in classes.iter().enumerate() {
        for &m in &c.members {
            class_of[m] = l;
        }
    }
    let powers = classes
        .iter()
        .map(|c| {
            let rep = group.element(c.rep);
            let mut cur = ops.identity();
            (0..c.order)
                .map(|_| {
                    let l = class_of[group.index_of(&cur).expect("group is closed")];
                    cur = ops.mul(&cur, rep);
                    l
                })
                .collect()
        })
        .collect();
    let exponent = classes.iter().fold(1u64, |acc, c| num::integer::lcm(acc, c.order));
    ConjClassSet { classes, class_of, powers, group_order: n as u64, exponent }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::gfield::FieldTower;
    use crate::matgrp::{enumerate_sl_fixed, fixed_group};

    fn sl2(p: u32, r: usize) -> FiniteGroup<MatGroup> {
        let g = fixed_group(Arc::new(FieldTower::new(p, 1).unwrap()), 2, p as u64, r).unwrap();
        let elems = enumerate_sl_fixed(&g).unwrap();
        FiniteGroup::new(g, elems).unwrap()
    }

    /// Classes by brute force: `x ~ y` iff some `g` has `g^-1 x g = y`.
    fn brute_class_sizes<O: GroupOps>(g: &FiniteGroup<O>) -> Vec<u64> {
        let ops = g.ops();
        let mut seen = vec![false; g.order()];
        let mut sizes = Vec::new();
        for x in 0..g.order() {
            if seen[x] {
                continue;
            }
            let mut count = 0;
            for h in g.elements() {
                let y = ops.mul(&ops.mul(&ops.inv(h), g.element(x)), h);
                let yi = g.index_of(&y).unwrap();
                if !seen[yi] {
                    seen[yi] = true;
                    count += 1;
                }
            }
            sizes.push(count);
        }
        sizes.sort_unstable();
        sizes
    }

    #[test]
    fn class_counts_match_brute_force() {
        for (p, r, k) in [(2, 1, 3), (3, 1, 7), (2, 2, 10)] {
            let g = sl2(p, r);
            let cls = conjugacy_classes(&g);
            assert_eq!(cls.len(), k);
            let mut sizes = cls.sizes();
            sizes.sort_unstable();
            assert_eq!(sizes, brute_class_sizes(&g));
            assert_eq!(cls.sizes().iter().sum::<u64>(), g.order() as u64);
            assert!(cls.sizes().iter().all(|s| (g.order() as u64).is_multiple_of(*s)));
            assert_eq!(cls.classes[0].size, 1);
            assert_eq!(cls.classes[0].order, 1);
        }
        let s3 = conjugacy_classes(&sl2(2, 1));
        assert_eq!(s3.sizes(), vec![1, 3, 2]);
    }

    #[test]
    fn power_map_and_inverses() {
        let g = sl2(3, 1);
        let cls = conjugacy_classes(&g);
        for (l, c) in cls.classes.iter().enumerate() {
            let inv = g.ops().inv(g.element(c.rep));
            assert_eq!(cls.class_of[g.index_of(&inv).unwrap()], cls.inverse_class(l));
            assert_eq!(cls.powers[l][0], 0);
            assert_eq!(cls.powers[l][1 % c.order as usize], if c.order == 1 { 0 } else { l });
        }
        assert_eq!(cls.exponent, 12);
    }

    #[test]
    fn rejects_non_closed_sets() {
        let r = FiniteGroup::new(CyclicGroup(6), vec![0, 1]);
        assert!(matches!(r, Err(Error::InvalidInput(_))));
        let z6 = FiniteGroup::new(CyclicGroup(6), (0..6).collect()).unwrap();
        assert_eq!(conjugacy_classes(&z6).len(), 6);
    }
}
