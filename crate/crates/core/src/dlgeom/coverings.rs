//! Finite models of the coverings `X~` and `X~'` of `SL_2(F_q[eps]/eps^2)`.
//!
//! Matrices act on columns: `g e = a e + b e'`, `g e' = c e + d e'` for
//! `g = [[a, c], [b, d]]`.

use serde::{Deserialize, Serialize};

use super::gset::{FiniteGSet, GammaDual};
use crate::charkit::SlTable;
use crate::error::{Error, Result};
use crate::gfield::{Fe, FieldTower};
use crate::matgrp::{Mat, MatGroup};
use crate::torus::{ambient_group, AbelianDecomposition, TorusData, TorusKind};
use crate::trunc::TruncRing;

fn check_level_two(table: &SlTable) -> Result<()> {
    if table.n != 2 || table.r != 2 {
        return Err(Error::Precondition(format!("needs SL_2 at r=2, got n={} r={}", table.n, table.r)));
    }
    Ok(())
}

fn class_reps(table: &SlTable) -> Vec<Mat> {
    table.classes.classes.iter().map(|c| *table.group.element(c.rep)).collect()
}

fn generators(table: &SlTable) -> Vec<Mat> {
    table.group.generators().iter().map(|&i| *table.group.element(i)).collect()
}

/// Representative of `g U` with `U = {[[1, 0], [x, 1]]}` acting on the
/// right: clears the top-left entry against a unit `c`, else the
/// bottom-left entry against `d`.
fn lower_coset_key(ring: &TruncRing, g: &Mat) -> Mat {
    let (a, b, c, d) = (*g.get(0, 0), *g.get(1, 0), *g.get(0, 1), *g.get(1, 1));
    let x = match ring.inv(&c) {
        Some(ci) => ring.neg(&ring.mul(&a, &ci)),
        None => ring.neg(&ring.mul(&b, &ring.inv(&d).expect("columns of SL_2 are unimodular"))),
    };
    let mut out = *g;
    out.set(0, 0, ring.add(&a, &ring.mul(&c, &x)));
    out.set(1, 0, ring.add(&b, &ring.mul(&d, &x)));
    out
}

/// `X~ = G_2^F / U_2^F` with the split torus acting on the right.
pub struct Xtil {
    pub points: Vec<Mat>,
    pub gset: FiniteGSet,
    pub gamma: GammaDual,
}

/// Builds `X~` and checks `|X~| = q^4 - q^2`.
pub fn build_xtil(table: &SlTable, split: &TorusData) -> Result<Xtil> {
    check_level_two(table)?;
    if split.kind() != TorusKind::Split || split.r() != 2 || split.q() != table.q {
        return Err(Error::Precondition("X~ needs the split torus at r=2 over the same q".into()));
    }
    let g: &MatGroup = table.group.ops();
    let ring = g.ring();
    let mut points: Vec<Mat> = table.group.elements().iter().map(|m| lower_coset_key(ring, m)).collect();
    points.sort_by_key(|m| g.encode(m));
    points.dedup();
    let q = table.q;
    if points.len() as u64 != q.pow(4) - q * q {
        return Err(Error::Consistency(format!(
            "|G^F/U^F| = {} but q^4 - q^2 = {}: F-fixed coset representatives are not unique",
            points.len(),
            q.pow(4) - q * q
        )));
    }
    let torus = split.elements();
    let gset = FiniteGSet::from_actions(
        &points,
        &generators(table),
        &class_reps(table),
        torus.len(),
        |h, x| Ok(lower_coset_key(ring, &g.mul(h, x))),
        |x, t| Ok(lower_coset_key(ring, &g.mul(x, &torus[t]))),
    )?;
    Ok(Xtil { points, gset, gamma: GammaDual { decomposition: split.decomposition().clone() } })
}

/// A component of `X~'`: `(c0, d0)` a nonzero rational vector and
/// `f^q - f = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentLabel {
    pub c0: Fe,
    pub d0: Fe,
    pub f: Fe,
}

/// `Gamma'`: `(s, k)` with `s = +-1` and `k` in `F_q`, acting on labels by
/// `(c0, d0, f) -> (s c0, s d0, f + k)`, i.e. right translation by
/// `s [[1, k eps], [0, 1]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GammaPrimeElement {
    pub sign: i8,
    pub shift: u32,
}

pub struct XtilPrime {
    pub labels: Vec<ComponentLabel>,
    pub gamma_elements: Vec<GammaPrimeElement>,
    pub gset: FiniteGSet,
    pub gamma: GammaDual,
    /// Degree over `F_q` of the field holding `f`.
    pub extension_degree: u32,
}

/// One point of the component `(c0, d0, f)`: `g = [[a0 + eps a1, c0 + eps c1], [b0 + eps b1, d0 + eps d1]]`
/// with `c1 d0 - d1 c0 = f`, `c1^q = c1 + a0`, `d1^q = d1 + b0`,
/// `a0 d0 - b0 c0 = 1` and `a0 d1 + a1 d0 - b0 c1 - b1 c0 = 0`.
pub fn component_point(g: &MatGroup, label: &ComponentLabel) -> Result<Mat> {
    let ring = g.ring();
    let k = ring.field();
    let q = ring.q();
    let ComponentLabel { c0, d0, f } = *label;
    let (c1, d1) = if !d0.is_zero() {
        (k.div(f, d0).unwrap(), Fe::ZERO)
    } else if !c0.is_zero() {
        (Fe::ZERO, k.neg(k.div(f, c0).unwrap()))
    } else {
        return Err(Error::InvalidInput("(c0, d0) must be nonzero".into()));
    };
    let a0 = k.sub(k.pow(c1, q), c1);
    let b0 = k.sub(k.pow(d1, q), d1);
    let rest = k.sub(k.mul(b0, c1), k.mul(a0, d1));
    let (a1, b1) =
        if !d0.is_zero() { (k.div(rest, d0).unwrap(), Fe::ZERO) } else { (Fe::ZERO, k.neg(k.div(rest, c0).unwrap())) };
    let e = |x: Fe, y: Fe| ring.from_coeffs(&[x, y]);
    let m = g.from_rows(&[&[e(a0, a1), e(c0, c1)], &[e(b0, b1), e(d0, d1)]]);
    if !g.is_special(&m) {
        return Err(Error::Consistency(format!("component point for {label:?} is not in SL_2")));
    }
    Ok(m)
}

/// `g^-1 F(g)` lies in `h U` with `h = [[1, eps], [0, 1]]`.
pub fn in_xtil_prime(g: &MatGroup, m: &Mat) -> bool {
    let ring = g.ring();
    let h_inv = g.from_rows(&[&[ring.one(), ring.neg(&ring.eps())], &[ring.zero(), ring.one()]]);
    let u = g.mul_all(&[&h_inv, &g.inv(m), &g.frobenius(m)]);
    *u.get(0, 0) == ring.one() && u.get(0, 1).is_zero() && *u.get(1, 1) == ring.one()
}

/// Reads the component of a point.
pub fn component_of(g: &MatGroup, m: &Mat) -> ComponentLabel {
    let k = g.ring().field();
    let (c, d) = (m.get(0, 1), m.get(1, 1));
    let f = k.sub(k.mul(c.coeff(1), d.constant()), k.mul(d.coeff(1), c.constant()));
    ComponentLabel { c0: c.constant(), d0: d.constant(), f }
}

fn gamma_prime_elements(k: &FieldTower, q: u64) -> Vec<GammaPrimeElement> {
    let signs: &[i8] = if k.characteristic() == 2 { &[1] } else { &[1, -1] };
    signs.iter().flat_map(|&sign| (0..q as u32).map(move |shift| GammaPrimeElement { sign, shift })).collect()
}

impl GammaPrimeElement {
    fn shift_fe(&self, k: &FieldTower) -> Fe {
        k.from_int(i64::from(self.shift))
    }

    pub fn act(&self, k: &FieldTower, l: &ComponentLabel) -> ComponentLabel {
        let s = k.from_int(i64::from(self.sign));
        ComponentLabel { c0: k.mul(s, l.c0), d0: k.mul(s, l.d0), f: k.add(l.f, self.shift_fe(k)) }
    }
}

/// Builds the component set of `X~'` with its `G_2^F` and `Gamma'` actions.
pub fn build_xtil_prime(table: &SlTable) -> Result<XtilPrime> {
    check_level_two(table)?;
    let q = table.q;
    if q != 2 && q != 3 {
        return Err(Error::InvalidInput(format!("X~' is modelled for q in {{2,3}}, got {q}")));
    }
    let amb = ambient_group(q, 2)?;
    let k = amb.ring().field();
    let d = k.subfield_degree(q)?;
    let extension_degree = q as u32;
    if !k.contains_subfield(d * extension_degree) {
        return Err(Error::Budget("Artin-Schreier extension outside the ambient field".into()));
    }
    let one = Fe::ONE;
    let fs: Vec<Fe> =
        k.subfield_elements(d * extension_degree)?.into_iter().filter(|&f| k.sub(k.pow(f, q), f) == one).collect();
    let rational = k.subfield_elements(d)?;
    let mut labels = Vec::new();
    for &c0 in &rational {
        for &d0 in &rational {
            if c0.is_zero() && d0.is_zero() {
                continue;
            }
            labels.extend(fs.iter().map(|&f| ComponentLabel { c0, d0, f }));
        }
    }
    labels.sort();
    if labels.len() as u64 != q * (q * q - 1) {
        return Err(Error::Consistency(format!("{} components, expected q(q^2-1)", labels.len())));
    }
    let points = labels.iter().map(|l| component_point(&amb, l)).collect::<Result<Vec<_>>>()?;
    for (l, p) in labels.iter().zip(&points) {
        if !in_xtil_prime(&amb, p) || component_of(&amb, p) != *l {
            return Err(Error::Consistency(format!("explicit point for {l:?} is off its component")));
        }
    }
    let point_of: std::collections::HashMap<ComponentLabel, Mat> = labels.iter().copied().zip(points).collect();
    let gamma_elements = gamma_prime_elements(k, q);
    let gset = FiniteGSet::from_actions(
        &labels,
        &generators(table),
        &class_reps(table),
        gamma_elements.len(),
        |h, l| {
            let moved = amb.mul(h, &point_of[l]);
            if !in_xtil_prime(&amb, &moved) {
                return Err(Error::Consistency("left translate left X~'".into()));
            }
            Ok(component_of(&amb, &moved))
        },
        |l, t| Ok(gamma_elements[t].act(k, l)),
    )?;
    let index: std::collections::HashMap<GammaPrimeElement, usize> =
        gamma_elements.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let decomposition = AbelianDecomposition::compute(gamma_elements.len(), 0, |a, b| {
        let (x, y) = (gamma_elements[a], gamma_elements[b]);
        let prod = GammaPrimeElement { sign: x.sign * y.sign, shift: (x.shift + y.shift) % q as u32 };
        index[&prod]
    })?;
    Ok(XtilPrime { labels, gamma_elements, gset, gamma: GammaDual { decomposition }, extension_degree })
}
