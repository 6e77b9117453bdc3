//! The surface `S = {x in V_2 : x ^ F(x) = e ^ e'}` modelling `X~''`, its
//! rational stratum `S00`, and the Lefschetz numbers of `G_2^F x Gamma''`
//! on `S`.
//!
//! Points are written `x = x0 + eps x1`. Over a point `x0` of
//! `S00 = {x0 ^ F(x0) = 1, F^2(x0) = -x0}`, `x1 = a0 x0 + a1 F(x0)`, and the
//! stratum `S_*` is a line bundle (coordinate `a1`) over
//! `S00 x K0`, `K0 = {a0 : a0 + a0^q = 0}`. The rest, `S_**`, is a line
//! bundle over `S01 = S0 - S00`. Hence
//! `L(s, S) = #Fix(s | S00 x K0) - #Fix(s0 | S00) + L(s0, S0)`
//! with `S0` the curve `{x0 ^ F(x0) = 1}` and `s0` the reduction of `s`.

use serde::{Deserialize, Serialize};

use super::gset::FiniteGSet;
use crate::charkit::{conjugacy_classes, FiniteGroup, SlTable};
use crate::error::{Error, Result};
use crate::gfield::{ambient_tower, Fe, FieldTower};
use crate::matgrp::{enumerate_sl_fixed, fixed_group, Mat};
use crate::torus::{TorusData, TorusKind};
use crate::trunc::RingElement;

pub type Vec2 = [Fe; 2];
type Mat2 = [[Fe; 2]; 2];

/// Degree over `F_q` of the field holding `S00`.
pub const S00_DEGREE: u32 = 4;

fn wedge(k: &FieldTower, x: &Vec2, y: &Vec2) -> Fe {
    k.sub(k.mul(x[0], y[1]), k.mul(x[1], y[0]))
}

fn frob(k: &FieldTower, q: u64, x: &Vec2) -> Vec2 {
    [k.pow(x[0], q), k.pow(x[1], q)]
}

fn apply(k: &FieldTower, m: &Mat2, x: &Vec2) -> Vec2 {
    [k.add(k.mul(m[0][0], x[0]), k.mul(m[0][1], x[1])), k.add(k.mul(m[1][0], x[0]), k.mul(m[1][1], x[1]))]
}

fn scale(k: &FieldTower, s: Fe, x: &Vec2) -> Vec2 {
    [k.mul(s, x[0]), k.mul(s, x[1])]
}

/// The `eps^i` coefficient matrix of a level-two matrix.
fn layer(g: &Mat, i: usize) -> Mat2 {
    [[g.get(0, 0).coeff(i), g.get(0, 1).coeff(i)], [g.get(1, 0).coeff(i), g.get(1, 1).coeff(i)]]
}

pub struct Surface00 {
    pub q: u64,
    pub points: Vec<Vec2>,
    /// `SL_2(F_q)` acting on the left, `mu_(q+1)` by scalars on the right.
    pub gset: FiniteGSet,
    /// Fixed-point counts of every non-identity group element.
    pub nontrivial_fixed_points: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surface00Report {
    pub q: u64,
    pub points: usize,
    pub group_order: usize,
    pub orbits: usize,
    pub simply_transitive: bool,
    pub extension_degree: u32,
}

impl Surface00 {
    pub fn report(&self) -> Surface00Report {
        let group_order = (self.q * (self.q * self.q - 1)) as usize;
        let orbits = self.gset.left_orbits();
        Surface00Report {
            q: self.q,
            points: self.points.len(),
            group_order,
            orbits,
            simply_transitive: orbits == 1 && self.nontrivial_fixed_points == 0 && self.points.len() == group_order,
            extension_degree: S00_DEGREE,
        }
    }
}

/// `S00` from `c` in `F_{q^2} - F_q` and `a^(q+1) = (c^q - c)^-1`, the
/// point being `a e + c a e'`.
pub fn enumerate_s00(q: u64) -> Result<Surface00> {
    let tower = ambient_tower(q)?;
    let k: &FieldTower = &tower;
    let d = k.subfield_degree(q)?;
    if !k.contains_subfield(d * S00_DEGREE) {
        return Err(Error::Budget(format!("F_{{{q}^4}} is outside the ambient field")));
    }
    let big = k.subfield_elements(d * S00_DEGREE)?;
    let mut points = Vec::new();
    for c in k.subfield_elements(2 * d)? {
        if k.is_in_subfield(c, d) {
            continue;
        }
        let target = k.inv(k.sub(k.pow(c, q), c)).unwrap();
        for &a in &big {
            if k.pow(a, q + 1) == target {
                points.push([a, k.mul(c, a)]);
            }
        }
    }
    points.sort();
    let minus_one = k.neg(Fe::ONE);
    for x in &points {
        let fx = frob(k, q, x);
        if wedge(k, x, &fx) != Fe::ONE || frob(k, q, &fx) != scale(k, minus_one, x) {
            return Err(Error::Consistency(format!("{x:?} is not in S00")));
        }
    }
    let sl = fixed_group(tower.clone(), 2, q, 1)?;
    let group = FiniteGroup::new(sl.clone(), enumerate_sl_fixed(&sl)?)?;
    let classes = conjugacy_classes(&group);
    let gens: Vec<Mat> = group.generators().iter().map(|&i| *group.element(i)).collect();
    let reps: Vec<Mat> = classes.classes.iter().map(|c| *group.element(c.rep)).collect();
    let scalars: Vec<Fe> = k.subfield_elements(2 * d)?.into_iter().filter(|&s| k.pow(s, q + 1) == Fe::ONE).collect();
    let gset = FiniteGSet::from_actions(
        &points,
        &gens,
        &reps,
        scalars.len(),
        |g, x| Ok(apply(k, &layer(g, 0), x)),
        |x, t| Ok(scale(k, scalars[t], x)),
    )?;
    let identity = sl.identity();
    let nontrivial_fixed_points = group
        .elements()
        .iter()
        .filter(|g| **g != identity)
        .map(|g| points.iter().filter(|x| apply(k, &layer(g, 0), x) == **x).count())
        .sum();
    Ok(Surface00 { q, points, gset, nontrivial_fixed_points })
}

/// Lefschetz numbers of `x -> lambda g x` on `S`.
pub struct LefschetzEngine {
    q: u64,
    tower: std::sync::Arc<FieldTower>,
    s00: Vec<Vec2>,
}

impl LefschetzEngine {
    pub fn new(q: u64) -> Result<Self> {
        let s00 = enumerate_s00(q)?;
        Ok(LefschetzEngine { q, tower: ambient_tower(q)?, s00: s00.points })
    }

    /// `L(x -> lambda g x, S)` for `g` in `G_2^F` and `lambda F(lambda) = 1`.
    pub fn value(&self, g: &Mat, lambda: &RingElement) -> Result<i64> {
        let k: &FieldTower = &self.tower;
        let q = self.q;
        let (g0, g1) = (layer(g, 0), layer(g, 1));
        let (l0, l1) = (lambda.constant(), lambda.coeff(1));
        let shift = k.div(l1, l0).ok_or_else(|| Error::InvalidInput("lambda is not a unit".into()))?;
        let mut base_fixed = 0i64;
        let mut total_fixed = 0i64;
        for x0 in &self.s00 {
            let gx = apply(k, &g0, x0);
            if scale(k, l0, &gx) != *x0 {
                continue;
            }
            base_fixed += 1;
            // g1 x0 = alpha g0 x0 + beta F(g0 x0); a0 moves by alpha + l1/l0.
            let gfx = apply(k, &g0, &frob(k, q, x0));
            let alpha = k
                .div(wedge(k, &apply(k, &g1, x0), &gfx), wedge(k, &gx, &gfx))
                .ok_or_else(|| Error::Consistency("degenerate frame at a point of S00".into()))?;
            let delta = k.add(alpha, shift);
            if !k.add(delta, k.pow(delta, q)).is_zero() {
                return Err(Error::Consistency(format!("shift {delta:?} leaves K0 over {x0:?}")));
            }
            if delta.is_zero() {
                total_fixed += q as i64;
            }
        }
        Ok(total_fixed - base_fixed + self.curve_term(&g0, l0)?)
    }

    /// `L(x -> l0 g0 x, S0)` on the curve `x ^ F(x) = 1`.
    ///
    /// Semisimple maps contribute the Euler characteristic of their fixed
    /// set. A non-semisimple `g0 = s u` contributes `L(u, S0)` when `l0 s = 1`
    /// and `0` otherwise, and `L(u, S0) = q + 1`.
    fn curve_term(&self, g0: &Mat2, l0: Fe) -> Result<i64> {
        let k: &FieldTower = &self.tower;
        let q = self.q as i64;
        let zeta = k.inv(l0).ok_or_else(|| Error::InvalidInput("lambda is not a unit".into()))?;
        let trace = k.add(g0[0][0], g0[1][1]);
        let char_poly = k.add(k.sub(k.mul(zeta, zeta), k.mul(trace, zeta)), Fe::ONE);
        if !char_poly.is_zero() {
            return Ok(0);
        }
        let scalar = g0[0][1].is_zero() && g0[1][0].is_zero() && g0[0][0] == g0[1][1];
        if scalar {
            return Ok(1 - q * q);
        }
        let disc = k.sub(k.mul(trace, trace), k.from_int(4));
        if disc.is_zero() {
            return Ok(q + 1);
        }
        let a = k.sub(g0[0][0], zeta);
        let v =
            if !g0[0][1].is_zero() || !a.is_zero() { [g0[0][1], k.neg(a)] } else { [k.sub(zeta, g0[1][1]), g0[1][0]] };
        if v[0].is_zero() && v[1].is_zero() {
            return Err(Error::Consistency("eigenline search found no vector".into()));
        }
        Ok(if wedge(k, &v, &frob(k, self.q, &v)).is_zero() { 0 } else { q + 1 })
    }
}

/// `lambda(t)`: `t` acts on `S` through `g -> g t^-1`, which sends the
/// probe `e'` to `lambda e'`.
pub fn scalar_of(nonsplit: &TorusData, t: &Mat) -> Result<RingElement> {
    let g = nonsplit.group();
    let ring = g.ring();
    let diag = g.mul_all(&[&g.inv(nonsplit.gamma()), t, nonsplit.gamma()]);
    let probe = [ring.zero(), ring.one()];
    let image = g.apply(&g.inv(&diag), &probe);
    if !image[0].is_zero() {
        return Err(Error::Consistency("torus element does not preserve the line through e'".into()));
    }
    let lambda = image[1];
    if ring.mul(&lambda, &ring.frobenius(&lambda)) != ring.one() {
        return Err(Error::Consistency("lambda F(lambda) != 1".into()));
    }
    Ok(lambda)
}

/// `L(g, t)` for every class representative `g` of `G_2^F` and every
/// element `t` of the nonsplit torus.
pub fn lefschetz_xtilpp(table: &SlTable, nonsplit: &TorusData) -> Result<Vec<Vec<i64>>> {
    if nonsplit.kind() != TorusKind::Nonsplit || nonsplit.r() != 2 || table.r != 2 || table.n != 2 {
        return Err(Error::Precondition("needs the nonsplit torus and SL_2 at r=2".into()));
    }
    let engine = LefschetzEngine::new(table.q)?;
    let lambdas = nonsplit.elements().iter().map(|t| scalar_of(nonsplit, t)).collect::<Result<Vec<_>>>()?;
    table
        .classes
        .classes
        .iter()
        .map(|c| {
            let g = table.group.element(c.rep);
            lambdas.iter().map(|l| engine.value(g, l)).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s00_is_a_torsor() {
        for q in [2, 3] {
            let s = enumerate_s00(q).unwrap();
            let rep = s.report();
            assert_eq!(rep.points as u64, (q + 1) * (q * q - q));
            assert!(rep.simply_transitive);
            assert!(s.gset.actions_commute());
        }
    }

    #[test]
    fn identity_lefschetz_number() {
        let t = TorusData::build(TorusKind::Nonsplit, 3, 2).unwrap();
        let e = LefschetzEngine::new(3).unwrap();
        let g = t.group();
        let one = g.ring().one();
        assert_eq!(e.value(&g.identity(), &one).unwrap(), 72 - 24 - 8);
        // -1 acts on S0 like the identity up to the scalar -1.
        let minus = g.ring().neg(&one);
        assert_eq!(e.value(&g.scalar(&minus), &minus).unwrap(), 40);
    }

    #[test]
    fn scalars_form_the_norm_one_group() {
        for q in [2, 3] {
            let t = TorusData::build(TorusKind::Nonsplit, q, 2).unwrap();
            let mut ls: Vec<RingElement> = t.elements().iter().map(|x| scalar_of(&t, x).unwrap()).collect();
            ls.sort();
            ls.dedup();
            assert_eq!(ls.len(), t.order());
        }
    }
}
