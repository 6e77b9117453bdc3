//! Frobenius-stable maximal tori of `SL_2` over truncated rings: the split
//! diagonal torus and the nonsplit torus `gamma T gamma^-1` with
//! `gamma^-1 F(gamma) = nu`, their character groups, norm maps, Weyl
//! cosets and the regularity and norm-orbit predicates.

mod abelian;

use std::collections::HashMap;
use std::sync::Arc;

use num::rational::Ratio;
use serde::{Deserialize, Serialize};

pub use abelian::AbelianDecomposition;

use crate::charkit::Cyclotomic;
use crate::error::{Error, Result};
use crate::gfield::{ambient_tower, Fe, FieldTower};
use crate::matgrp::{Mat, MatGroup};
use crate::trunc::{RingElement, TruncRing};

/// Largest extension degree over `F_q` searched for `gamma`.
pub const GAMMA_SEARCH_DEGREE: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TorusKind {
    Split,
    Nonsplit,
}

/// A character of `T^F`, as exponents against the cyclic decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusCharacter {
    pub exps: Vec<u64>,
}

/// A value `zeta^k` stored as the angle `k/e` in `Q/Z`.
pub type Angle = Ratio<u64>;

fn angle(k: u64, e: u64) -> Angle {
    Ratio::new(k % e, e)
}

/// The ambient `SL_2` over `F_{p^K}[eps]/eps^r` with Frobenius `x -> x^q`.
pub fn ambient_group(q: u64, r: usize) -> Result<MatGroup> {
    let tower = ambient_tower(q)?;
    let k = tower.degree();
    MatGroup::new(TruncRing::new(tower, r, q, k)?, 2)
}

/// `nu`: `e -> e'`, `e' -> -e`.
pub fn nu(g: &MatGroup) -> Mat {
    let ring = g.ring();
    g.from_rows(&[&[ring.zero(), ring.neg(&ring.one())], &[ring.one(), ring.zero()]])
}

pub struct TorusData {
    kind: TorusKind,
    q: u64,
    r: usize,
    group: MatGroup,
    gamma: Mat,
    gamma_inv: Mat,
    gamma_degree: u32,
    elements: Vec<Mat>,
    index: HashMap<Mat, usize>,
    decomposition: AbelianDecomposition,
    ct: Vec<usize>,
}

impl std::fmt::Debug for TorusData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TorusData({:?}, q={}, r={}, |T^F|={})", self.kind, self.q, self.r, self.elements.len())
    }
}

/// Finds `gamma` in `SL_2(F_{q^m})`, `m` minimal, with `F(gamma) = gamma nu`.
///
/// Rows `(x, y)` of such a `gamma` satisfy `y = x^q` and `y^q = -x`.
fn find_gamma(g: &MatGroup, q: u64) -> Result<(Mat, u32)> {
    let ring = g.ring();
    let f = ring.field();
    let d = f.subfield_degree(q)?;
    for m in 1..=GAMMA_SEARCH_DEGREE {
        if !f.contains_subfield(d * m) {
            continue;
        }
        let rows: Vec<(Fe, Fe)> = f
            .subfield_elements(d * m)?
            .into_iter()
            .filter_map(|x| {
                let y = f.pow(x, q);
                (f.pow(y, q) == f.neg(x) && !x.is_zero()).then_some((x, y))
            })
            .collect();
        for &(a, b) in &rows {
            for &(c, e) in &rows {
                if f.sub(f.mul(a, e), f.mul(b, c)) == Fe::ONE {
                    let gamma = g.from_rows(&[
                        &[ring.from_field(a), ring.from_field(b)],
                        &[ring.from_field(c), ring.from_field(e)],
                    ]);
                    debug_assert_eq!(g.frobenius(&gamma), g.mul(&gamma, &nu(g)));
                    return Ok((gamma, m));
                }
            }
        }
    }
    Err(Error::Consistency(format!("no gamma with gamma^-1 F(gamma) = nu up to degree {GAMMA_SEARCH_DEGREE}")))
}

impl TorusData {
    /// Builds `T_r^F` for `q in {2, 3, 5}`, `r in {1, 2}`.
    pub fn build(kind: TorusKind, q: u64, r: usize) -> Result<Self> {
        if ![2, 3, 5].contains(&q) || !(1..=2).contains(&r) {
            return Err(Error::InvalidInput(format!("torus needs q in {{2,3,5}} and r in {{1,2}}, got q={q}, r={r}")));
        }
        let group = ambient_group(q, r)?;
        let (gamma, gamma_degree) = match kind {
            TorusKind::Split => (group.identity(), 1),
            TorusKind::Nonsplit => find_gamma(&group, q)?,
        };
        let gamma_inv = group.inv(&gamma);
        let ring = group.ring();
        let d = ring.field().subfield_degree(q)?;
        let mut elements: Vec<Mat> = ring
            .with_coeff_degree(2 * d)?
            .units()
            .iter()
            .map(|l| conj_diag(&group, &gamma, &gamma_inv, l))
            .filter(|t| group.is_frobenius_fixed(t))
            .collect();
        elements.sort_by_key(|m| group.encode(m));
        let index: HashMap<Mat, usize> = elements.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let id = index[&group.identity()];
        let decomposition =
            AbelianDecomposition::compute(elements.len(), id, |a, b| index[&group.mul(&elements[a], &elements[b])])?;
        let level = r.saturating_sub(1);
        let ct = (0..elements.len()).filter(|&i| group.is_identity_mod(&elements[i], level)).collect();
        Ok(TorusData { kind, q, r, group, gamma, gamma_inv, gamma_degree, elements, index, decomposition, ct })
    }

    pub fn kind(&self) -> TorusKind {
        self.kind
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn group(&self) -> &MatGroup {
        &self.group
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        self.group.ring().tower()
    }

    pub fn gamma(&self) -> &Mat {
        &self.gamma
    }

    /// Degree over `F_q` of the field `gamma` was found in.
    pub fn gamma_degree(&self) -> u32 {
        self.gamma_degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elements
    }

    pub fn index_of(&self, t: &Mat) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn decomposition(&self) -> &AbelianDecomposition {
        &self.decomposition
    }

    /// Indices of `ct^F = (T_r^(r-1))^F`.
    pub fn ct(&self) -> &[usize] {
        &self.ct
    }

    /// The diagonal parameter `lambda` of `t = gamma diag(lambda, lambda^-1) gamma^-1`.
    pub fn lambda(&self, t: &Mat) -> RingElement {
        *self.group.mul_all(&[&self.gamma_inv, t, &self.gamma]).get(0, 0)
    }

    pub fn exponent(&self) -> u64 {
        self.decomposition.exponent()
    }

    /// All characters of `T^F`, in lexicographic exponent order.
    pub fn characters(&self) -> Vec<TorusCharacter> {
        self.decomposition.dual_vectors().into_iter().map(|exps| TorusCharacter { exps }).collect()
    }

    pub fn trivial_character(&self) -> TorusCharacter {
        TorusCharacter { exps: vec![0; self.decomposition.invariants.len()] }
    }

    /// `theta(t_i)` as a power of `zeta_e`, `e` the exponent.
    pub fn value_exp(&self, theta: &TorusCharacter, i: usize) -> u64 {
        self.decomposition.pairing(&theta.exps, i)
    }

    pub fn value_angle(&self, theta: &TorusCharacter, i: usize) -> Angle {
        angle(self.value_exp(theta, i), self.exponent())
    }

    pub fn value(&self, theta: &TorusCharacter, i: usize) -> Cyclotomic {
        Cyclotomic::root_of_unity(self.exponent() as u32, self.value_exp(theta, i) as i64)
    }

    /// `theta^-1`.
    pub fn inverse(&self, theta: &TorusCharacter) -> TorusCharacter {
        TorusCharacter {
            exps: theta.exps.iter().zip(&self.decomposition.invariants).map(|(a, d)| (d - a) % d).collect(),
        }
    }

    /// The character with the given angle on every element; fails if the
    /// values are not a character.
    pub fn character_from_angles(&self, values: &[Angle]) -> Result<TorusCharacter> {
        let exps = self
            .decomposition
            .generators
            .iter()
            .zip(&self.decomposition.invariants)
            .map(|(&g, &d)| {
                let a = values[g] * d;
                if !a.is_integer() {
                    return Err(Error::Consistency(format!("value {} at a generator of order {d}", values[g])));
                }
                Ok(a.to_integer() % d)
            })
            .collect::<Result<Vec<_>>>()?;
        let theta = TorusCharacter { exps };
        if (0..self.order()).any(|i| self.value_angle(&theta, i) != values[i]) {
            return Err(Error::Consistency("values are not multiplicative".into()));
        }
        Ok(theta)
    }

    /// The `F^n`-fixed points of `ct`, `t = gamma diag(1 + eps^(r-1) s, ..) gamma^-1`.
    pub fn ct_fixed(&self, n: u32) -> Result<Vec<Mat>> {
        if self.r < 2 {
            return Err(Error::Precondition("ct is only defined here for r >= 2".into()));
        }
        let ring = self.group.ring();
        let f = ring.field();
        let d = f.subfield_degree(self.q)?;
        let span = match (self.kind, n % 2) {
            (TorusKind::Nonsplit, 1) => 2 * n,
            _ => n,
        };
        if !f.contains_subfield(d * span) {
            return Err(Error::Budget(format!("F_{{q^{span}}} is outside the ambient field")));
        }
        let top = ring.eps_pow(self.r - 1);
        let out: Vec<Mat> = f
            .subfield_elements(d * span)?
            .into_iter()
            .map(|s| {
                let l = ring.add(&ring.one(), &ring.scale(s, &top));
                conj_diag(&self.group, &self.gamma, &self.gamma_inv, &l)
            })
            .filter(|t| self.group.frobenius_pow(t, n) == *t)
            .collect();
        let expected = self.q.pow(n);
        if out.len() as u64 != expected {
            return Err(Error::Consistency(format!("|ct^(F^{n})| = {} != {expected}", out.len())));
        }
        Ok(out)
    }

    /// `N(t) = t F(t) .. F^(n-1)(t)` for `F^n(t) = t`.
    pub fn norm_map(&self, t: &Mat, n: u32) -> Result<Mat> {
        let g = &self.group;
        if n == 0 || g.frobenius_pow(t, n) != *t {
            return Err(Error::Precondition(format!("{t:?} is not F^{n}-fixed")));
        }
        let mut acc = *t;
        let mut cur = *t;
        for _ in 1..n {
            cur = g.frobenius(&cur);
            acc = g.mul(&acc, &cur);
        }
        if !g.is_frobenius_fixed(&acc) {
            return Err(Error::Consistency("norm is not F-fixed".into()));
        }
        Ok(acc)
    }

    /// `theta(N(t))` for `t` in `T^(F^n)`.
    pub fn pullback(&self, theta: &TorusCharacter, t: &Mat, n: u32) -> Result<Angle> {
        let nt = self.norm_map(t, n)?;
        let i = self.index_of(&nt).ok_or_else(|| Error::Consistency(format!("norm {nt:?} not in T^F")))?;
        Ok(self.value_angle(theta, i))
    }

    /// Least `n` with `F^n(ct^alpha) = ct^alpha` for every root; the
    /// Frobenius of `SL_2` preserves both root subgroups' coroot tori up to
    /// the torus itself, so this is 1.
    pub fn regularity_period(&self) -> u32 {
        1
    }

    /// Nontrivial on `ct^F` (after the norm pullback of period 1).
    pub fn is_regular(&self, theta: &TorusCharacter) -> Result<bool> {
        if self.r < 2 {
            return Err(Error::Precondition("regularity needs r >= 2".into()));
        }
        Ok(self.ct.iter().any(|&i| self.value_exp(theta, i) != 0))
    }
}

fn conj_diag(g: &MatGroup, gamma: &Mat, gamma_inv: &Mat, l: &RingElement) -> Mat {
    let ring = g.ring();
    let d = g.diag(&[*l, ring.inv(l).expect("unit parameter")]);
    g.mul_all(&[gamma, &d, gamma_inv])
}

fn same_ambient(a: &TorusData, b: &TorusData) -> Result<()> {
    if a.q != b.q || a.r != b.r || !Arc::ptr_eq(a.tower(), b.tower()) {
        return Err(Error::InvalidInput("tori live in different ambient groups".into()));
    }
    Ok(())
}

/// A coset of `T` in `N(T, T')`: `rep = gamma_T m gamma_T'^-1`, `m in {1, nu}`,
/// so that `rep^-1 T rep = T'`.
#[derive(Clone, Debug)]
pub struct WeylCoset {
    pub rep: Mat,
    pub nontrivial: bool,
}

/// The two cosets of `W(T, T')`.
pub fn weyl_cosets(t: &TorusData, t2: &TorusData) -> Result<Vec<WeylCoset>> {
    same_ambient(t, t2)?;
    let g = &t.group;
    Ok([(g.identity(), false), (nu(g), true)]
        .into_iter()
        .map(|(m, nontrivial)| WeylCoset { rep: g.mul_all(&[&t.gamma, &m, &t2.gamma_inv]), nontrivial })
        .collect())
}

/// Is the coset `rep T'` stable under `F^n`, i.e. `rep^-1 F^n(rep)` in `T'`?
pub fn coset_is_stable(t2: &TorusData, coset: &WeylCoset, n: u32) -> bool {
    let g = &t2.group;
    let h = g.mul(&g.inv(&coset.rep), &g.frobenius_pow(&coset.rep, n));
    let d = g.mul_all(&[&t2.gamma_inv, &h, &t2.gamma]);
    d.get(0, 1).is_zero() && d.get(1, 0).is_zero()
}

/// `t' -> rep t' rep^-1` from `T'^F` to `T^F`, for an `F`-stable coset.
pub fn ad_map(t: &TorusData, t2: &TorusData, coset: &WeylCoset) -> Result<Vec<usize>> {
    let g = &t.group;
    let rep_inv = g.inv(&coset.rep);
    t2.elements
        .iter()
        .map(|x| {
            let y = g.mul_all(&[&coset.rep, x, &rep_inv]);
            t.index_of(&y).ok_or_else(|| Error::Consistency(format!("Ad image {y:?} not in T^F")))
        })
        .collect()
}

/// `theta o Ad(rep)` as a character of `T'^F`.
pub fn transport(t: &TorusData, t2: &TorusData, coset: &WeylCoset, theta: &TorusCharacter) -> Result<TorusCharacter> {
    let map = ad_map(t, t2, coset)?;
    let values: Vec<Angle> = map.iter().map(|&i| t.value_angle(theta, i)).collect();
    t2.character_from_angles(&values)
}

/// `#{w in W(T,T')^F : theta o Ad(w) = theta'}`.
pub fn predicted_gram(t: &TorusData, theta: &TorusCharacter, t2: &TorusData, theta2: &TorusCharacter) -> Result<usize> {
    let mut count = 0;
    for coset in weyl_cosets(t, t2)? {
        if coset_is_stable(t2, &coset, 1) && transport(t, t2, &coset, theta)? == *theta2 {
            count += 1;
        }
    }
    Ok(count)
}

/// The element of `W(T,T')` and the `n` witnessing norm-orbit equivalence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormWitness {
    pub n: u32,
    pub nontrivial: bool,
}

/// Searches `n <= n_max` and `F^n`-stable cosets `g T'` of `N(T,T')` with
/// `theta o N o Ad(g) = theta' o N` on `ct'^(F^n)`.
///
/// `Ad(g)` on `T'` depends only on the coset, and an `F^n`-stable coset of
/// the connected group `T'` holds an `F^n`-fixed point, so cosets stand in
/// for the fixed points of `N(T,T')^(F^n)`.
pub fn norm_orbit_equivalent(
    t: &TorusData,
    theta: &TorusCharacter,
    t2: &TorusData,
    theta2: &TorusCharacter,
    n_max: u32,
) -> Result<Option<NormWitness>> {
    let g = &t.group;
    let cosets = weyl_cosets(t, t2)?;
    for n in 1..=n_max {
        let ct2 = t2.ct_fixed(n)?;
        let rhs: Vec<Angle> = ct2.iter().map(|x| t2.pullback(theta2, x, n)).collect::<Result<_>>()?;
        for coset in &cosets {
            if !coset_is_stable(t2, coset, n) {
                continue;
            }
            let rep_inv = g.inv(&coset.rep);
            let mut ok = true;
            for (x, want) in ct2.iter().zip(&rhs) {
                let y = g.mul_all(&[&coset.rep, x, &rep_inv]);
                if t.pullback(theta, &y, n)? != *want {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(Some(NormWitness { n, nontrivial: coset.nontrivial }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_at_level_two_and_one() {
        assert_eq!(TorusData::build(TorusKind::Split, 3, 2).unwrap().order(), 6);
        assert_eq!(TorusData::build(TorusKind::Nonsplit, 3, 2).unwrap().order(), 12);
        assert_eq!(TorusData::build(TorusKind::Nonsplit, 3, 1).unwrap().order(), 4);
        assert_eq!(TorusData::build(TorusKind::Split, 2, 2).unwrap().order(), 2);
        assert_eq!(TorusData::build(TorusKind::Nonsplit, 2, 2).unwrap().order(), 6);
        assert_eq!(TorusData::build(TorusKind::Nonsplit, 5, 2).unwrap().order(), 30);
        assert!(TorusData::build(TorusKind::Split, 4, 2).is_err());
    }

    #[test]
    fn gamma_solves_lang_equation() {
        for q in [2, 3, 5] {
            let t = TorusData::build(TorusKind::Nonsplit, q, 2).unwrap();
            let g = t.group();
            assert_eq!(g.mul(&g.inv(t.gamma()), &g.frobenius(t.gamma())), nu(g));
            assert!(g.is_special(t.gamma()));
            assert_eq!(t.ct().len() as u64, q);
        }
    }

    #[test]
    fn regular_counts() {
        let ns = TorusData::build(TorusKind::Nonsplit, 3, 2).unwrap();
        assert_eq!(ns.decomposition().invariants, vec![12]);
        assert_eq!(ns.characters().iter().filter(|c| ns.is_regular(c).unwrap()).count(), 8);
        assert!(!ns.is_regular(&ns.trivial_character()).unwrap());
        let sp = TorusData::build(TorusKind::Split, 3, 2).unwrap();
        assert_eq!(sp.characters().iter().filter(|c| sp.is_regular(c).unwrap()).count(), 4);
        let r1 = TorusData::build(TorusKind::Nonsplit, 3, 1).unwrap();
        assert!(r1.is_regular(&r1.trivial_character()).is_err());
    }

    #[test]
    fn characters_are_homomorphisms_and_separate() {
        let t = TorusData::build(TorusKind::Nonsplit, 3, 2).unwrap();
        let g = t.group();
        let chars = t.characters();
        assert_eq!(chars.len(), t.order());
        let e = t.exponent();
        for th in &chars {
            for (i, a) in t.elements().iter().enumerate() {
                for (j, b) in t.elements().iter().enumerate() {
                    let k = t.index_of(&g.mul(a, b)).unwrap();
                    assert_eq!(t.value_exp(th, k), (t.value_exp(th, i) + t.value_exp(th, j)) % e);
                }
            }
        }
        for i in 1..t.order() {
            let id = t.index_of(&g.identity()).unwrap();
            if i != id {
                assert!(chars.iter().any(|c| t.value_exp(c, i) != 0));
            }
        }
    }

    #[test]
    fn norm_map_behaviour() {
        let t = TorusData::build(TorusKind::Nonsplit, 3, 2).unwrap();
        for x in t.elements() {
            assert_eq!(t.norm_map(x, 1).unwrap(), *x);
        }
        let ct2 = t.ct_fixed(2).unwrap();
        assert_eq!(ct2.len(), 9);
        let mut image: Vec<usize> = ct2.iter().map(|x| t.index_of(&t.norm_map(x, 2).unwrap()).unwrap()).collect();
        image.sort_unstable();
        image.dedup();
        let mut ct = t.ct().to_vec();
        ct.sort_unstable();
        assert_eq!(image, ct);
        let g = t.group();
        let outside = g.diag(&[
            g.ring().from_field(t.tower().primitive()),
            g.ring().from_field(t.tower().inv(t.tower().primitive()).unwrap()),
        ]);
        assert!(t.norm_map(&outside, 1).is_err());
    }

    #[test]
    fn weyl_action_on_nonsplit() {
        let t = TorusData::build(TorusKind::Nonsplit, 3, 2).unwrap();
        let cosets = weyl_cosets(&t, &t).unwrap();
        assert_eq!(cosets.len(), 2);
        assert!(cosets.iter().all(|c| coset_is_stable(&t, c, 1)));
        let w = ad_map(&t, &t, &cosets[1]).unwrap();
        for i in 0..t.order() {
            assert_eq!(w[w[i]], i);
        }
        for th in t.characters() {
            let moved = transport(&t, &t, &cosets[1], &th).unwrap();
            assert_eq!(moved, t.inverse(&th));
            if t.is_regular(&th).unwrap() {
                assert_ne!(moved, th);
                assert!(t.is_regular(&moved).unwrap());
                assert_eq!(predicted_gram(&t, &th, &t, &th).unwrap(), 1);
                assert_eq!(predicted_gram(&t, &th, &t, &moved).unwrap(), 1);
            }
        }
    }

    #[test]
    fn split_and_nonsplit_have_no_rational_weyl_elements() {
        let s = TorusData::build(TorusKind::Split, 3, 2).unwrap();
        let ns = TorusData::build(TorusKind::Nonsplit, 3, 2).unwrap();
        for c in weyl_cosets(&s, &ns).unwrap() {
            assert!(!coset_is_stable(&ns, &c, 1));
            assert!(coset_is_stable(&ns, &c, 2));
        }
        assert_eq!(predicted_gram(&s, &s.trivial_character(), &ns, &ns.trivial_character()).unwrap(), 0);
    }

    #[test]
    fn norm_orbit_relation() {
        let t = TorusData::build(TorusKind::Nonsplit, 3, 2).unwrap();
        let chars = t.characters();
        let c = weyl_cosets(&t, &t).unwrap();
        for th in &chars {
            assert!(norm_orbit_equivalent(&t, th, &t, th, 1).unwrap().is_some());
            let moved = transport(&t, &t, &c[1], th).unwrap();
            assert!(norm_orbit_equivalent(&t, th, &t, &moved, 2).unwrap().is_some());
        }
        // Regular characters whose restrictions to ct^F are neither equal
        // nor inverse are never related.
        let reg: Vec<_> = chars.iter().filter(|c| t.is_regular(c).unwrap()).collect();
        let restrict = |th: &TorusCharacter| -> Vec<u64> { t.ct().iter().map(|&i| t.value_exp(th, i)).collect() };
        for a in &reg {
            for b in &reg {
                let (ra, rb, rbi) = (restrict(a), restrict(b), restrict(&t.inverse(b)));
                if ra != rb && ra != rbi {
                    assert_eq!(norm_orbit_equivalent(&t, a, &t, b, 4).unwrap(), None);
                }
            }
        }
    }
}
