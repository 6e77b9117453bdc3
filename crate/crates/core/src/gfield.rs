//! Finite field towers `F_{p^K}` with every subfield `F_{p^d}`, `d | K`, embedded.
//!
//! Elements are packed integers `sum c_i p^i` over the power basis of the
//! defining modulus. Multiplication goes through discrete log tables built
//! once per tower, so the ambient field must stay small (at most 2^22
//! elements).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest ambient field the tower is willing to tabulate.
pub const MAX_FIELD_SIZE: u64 = 1 << 22;

/// An element of a [`FieldTower`], stored as packed base-`p` digits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, serde::Serialize, serde::Deserialize)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({})", self.0)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Degree over `F_p` of the single ambient field used for experiments
/// over `F_q`: it holds every extension those experiments touch.
pub fn ambient_degree(q: u64) -> Result<u32> {
    match q {
        2 | 3 => Ok(12),
        5 => Ok(4),
        _ => Err(Error::InvalidInput(format!("base field order {q} not in {{2, 3, 5}}"))),
    }
}

/// The shared ambient tower for base field `F_q`, built once per process.
pub fn ambient_tower(q: u64) -> Result<Arc<FieldTower>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<FieldTower>>>> = OnceLock::new();
    let degree = ambient_degree(q)?;
    let mut cache = CACHE.get_or_init(Default::default).lock().unwrap();
    if let Some(t) = cache.get(&q) {
        return Ok(t.clone());
    }
    let p = (2..=q as u32).find(|d| q.is_multiple_of(*d as u64)).expect("q > 1");
    let tower = Arc::new(FieldTower::new(p, degree)?);
    cache.insert(q, tower.clone());
    Ok(tower)
}

/// The ambient field `F_{p^K}` together with its subfield lattice.
pub struct FieldTower {
    p: u32,
    degree: u32,
    size: u32,
    modulus: Vec<u32>,
    pow_p: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldTower")
            .field("p", &self.p)
            .field("degree", &self.degree)
            .field("modulus", &self.modulus)
            .finish()
    }
}

// Dense polynomials over F_p, coefficients low degree first.
fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = r[top] * lead_inv % p;
        let shift = top - dm;
        for (i, &mc) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - c * mc % p) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

fn mod_inv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn digits(mut v: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for d in out.iter_mut() {
        *d = (v % p as u64) as u32;
        v /= p as u64;
    }
    out
}

/// Irreducibility over `F_p` by trial division against every monic
/// polynomial of degree `1..=deg/2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut div = digits(low, p, d);
            div.push(1);
            if poly_rem(poly, &div, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FieldTower {
    /// Builds `F_{p^K}` over the lexicographically least irreducible monic
    /// modulus (lower coefficients read as a base-`p` integer, constant term
    /// least significant).
    pub fn new(p: u32, degree: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if !(1..=16).contains(&degree) {
            return Err(Error::InvalidInput(format!("extension degree {degree} outside 1..=16")));
        }
        let size64 = (p as u64).pow(degree);
        if size64 > MAX_FIELD_SIZE {
            return Err(Error::Budget(format!("F_{{{p}^{degree}}} has {size64} elements")));
        }
        let size = size64 as u32;
        let k = degree as usize;
        let modulus = (0..size64)
            .map(|low| {
                let mut m = digits(low, p, k);
                m.push(1);
                m
            })
            .find(|m| is_irreducible(m, p))
            .expect("irreducible polynomials exist in every degree");

        let mut pow_p = vec![1u32; k + 1];
        for i in 1..=k {
            pow_p[i] = pow_p[i - 1] * p;
        }
        let mut tower = FieldTower { p, degree, size, modulus, pow_p, exp: Vec::new(), log: Vec::new() };
        tower.build_tables();
        Ok(tower)
    }

    fn unpack(&self, x: u32) -> Vec<u32> {
        digits(x as u64, self.p, self.degree as usize)
    }

    fn pack(&self, c: &[u32]) -> u32 {
        c.iter().enumerate().map(|(i, &d)| d * self.pow_p[i]).sum()
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let prod = poly_mul(&self.unpack(a), &self.unpack(b), self.p);
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.degree as usize, 0);
        self.pack(&r)
    }

    fn slow_pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&mut self) {
        let order = (self.size - 1) as u64;
        let factors = prime_factors(order);
        let generator = (1..self.size)
            .find(|&g| factors.iter().all(|&l| self.slow_pow(g, order / l) != 1))
            .expect("multiplicative group is cyclic");
        let n = order as usize;
        let mut exp = vec![0u32; n.max(1)];
        let mut log = vec![0u32; self.size as usize];
        let mut cur = 1u32;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = cur;
            log[cur as usize] = i as u32;
            cur = self.slow_mul(cur, generator);
        }
        self.exp = exp;
        self.log = log;
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The canonical image of an integer in the prime field.
    pub fn from_int(&self, v: i64) -> Fe {
        Fe(v.rem_euclid(self.p as i64) as u32)
    }

    /// A fixed generator of the multiplicative group.
    pub fn primitive(&self) -> Fe {
        Fe(self.exp[1 % self.exp.len()])
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        while x > 0 || y > 0 {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        Fe(out)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 {
            return a;
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        while x > 0 {
            let d = x % self.p;
            out += ((self.p - d) % self.p) * place;
            place *= self.p;
            x /= self.p;
        }
        Fe(out)
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let n = self.exp.len();
        let s = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        Fe(self.exp[if s >= n { s - n } else { s }])
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        let n = self.exp.len();
        let l = self.log[a.0 as usize] as usize;
        Some(Fe(self.exp[(n - l) % n]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let n = self.exp.len() as u64;
        let l = self.log[a.0 as usize] as u64;
        Fe(self.exp[((l % n) * (e % n) % n) as usize])
    }

    /// Signed exponent, negative powers of nonzero elements allowed.
    pub fn pow_i(&self, a: Fe, e: i64) -> Option<Fe> {
        if e >= 0 {
            Some(self.pow(a, e as u64))
        } else {
            self.inv(a).map(|ai| self.pow(ai, e.unsigned_abs()))
        }
    }

    /// Discrete logarithm against [`FieldTower::primitive`].
    pub fn log(&self, a: Fe) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.0 as usize])
    }

    /// Returns `d` with `q = p^d`, if `d` divides the ambient degree.
    pub fn subfield_degree(&self, q: u64) -> Result<u32> {
        let mut d = 0u32;
        let mut v = 1u64;
        while v < q {
            v *= self.p as u64;
            d += 1;
        }
        if v != q || d == 0 || !self.degree.is_multiple_of(d) {
            return Err(Error::InvalidInput(format!(
                "{q} is not the order of a subfield of F_{{{}^{}}}",
                self.p, self.degree
            )));
        }
        Ok(d)
    }

    /// `x -> x^q` for a subfield order `q`.
    pub fn frobenius(&self, x: Fe, q: u64) -> Result<Fe> {
        self.subfield_degree(q)?;
        Ok(self.pow(x, q))
    }

    /// `x -> x^q` without re-validating `q`; callers hold a checked order.
    #[inline]
    pub fn frob_unchecked(&self, x: Fe, q: u64) -> Fe {
        self.pow(x, q)
    }

    pub fn contains_subfield(&self, d: u32) -> bool {
        d >= 1 && self.degree.is_multiple_of(d)
    }

    /// All elements of `F_{p^d}`, zero first, then increasing discrete log.
    pub fn subfield_elements(&self, d: u32) -> Result<Vec<Fe>> {
        if !self.contains_subfield(d) {
            return Err(Error::InvalidInput(format!(
                "F_{{{}^{d}}} is not a subfield of F_{{{}^{}}}",
                self.p, self.p, self.degree
            )));
        }
        let sub = self.p.pow(d) - 1;
        let step = (self.size - 1) / sub;
        let mut out = Vec::with_capacity(sub as usize + 1);
        out.push(Fe::ZERO);
        for k in 0..sub {
            out.push(Fe(self.exp[(k * step) as usize]));
        }
        Ok(out)
    }

    pub fn is_in_subfield(&self, x: Fe, d: u32) -> bool {
        self.pow(x, self.p.pow(d) as u64) == x
    }

    /// Every element of the ambient field in packed order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.size).map(Fe)
    }

    /// Base-`p` digits of an element, low degree first.
    pub fn coefficients(&self, x: Fe) -> Vec<u32> {
        self.unpack(x.0)
    }

    pub fn from_coefficients(&self, c: &[u32]) -> Fe {
        let mut v = c.to_vec();
        v.resize(self.degree as usize, 0);
        Fe(self.pack(&v.iter().map(|d| d % self.p).collect::<Vec<_>>()))
    }

    /// Little-endian packed digits as bytes; injective on the ambient field.
    pub fn encode(&self, x: Fe) -> [u8; 4] {
        x.0.to_le_bytes()
    }

    /// Solutions `c` in `F_{p^d}` of `a*c^q + b*c = rhs`.
    pub fn solve_additive(&self, a: Fe, b: Fe, q: u64, rhs: Fe, d: u32) -> Result<Vec<Fe>> {
        Ok(self
            .subfield_elements(d)?
            .into_iter()
            .filter(|&c| self.add(self.mul(a, self.pow(c, q)), self.mul(b, c)) == rhs)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_two() {
        let f = FieldTower::new(2, 1).unwrap();
        assert_eq!(f.size(), 2);
        assert_eq!(f.mul(Fe::ONE, Fe::ONE), Fe::ONE);
        assert_eq!(f.add(Fe::ONE, Fe::ONE), Fe::ZERO);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(FieldTower::new(4, 2).is_err());
        assert!(FieldTower::new(3, 0).is_err());
        assert!(FieldTower::new(3, 17).is_err());
    }

    #[test]
    fn subfield_counts_by_scan() {
        let f = FieldTower::new(3, 2).unwrap();
        assert_eq!(f.size(), 9);
        let fixed = f.elements().filter(|&x| f.pow(x, 3) == x).count();
        assert_eq!(fixed, 3);

        let f = FieldTower::new(2, 4).unwrap();
        let fixed = f.elements().filter(|&x| f.pow(x, 4) == x).count();
        assert_eq!(fixed, 4);
        for d in [1, 2, 4] {
            let scan = f.elements().filter(|&x| f.is_in_subfield(x, d)).count();
            assert_eq!(scan as u32, 2u32.pow(d));
            assert_eq!(f.subfield_elements(d).unwrap().len() as u32, 2u32.pow(d));
        }
    }

    #[test]
    fn lexicographically_least_modulus() {
        assert_eq!(FieldTower::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FieldTower::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(FieldTower::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn frobenius_fixes_prime_field_and_is_additive() {
        let f = FieldTower::new(3, 2).unwrap();
        assert_eq!(f.frobenius(Fe::ZERO, 3).unwrap(), Fe::ZERO);
        assert!(f.frobenius(Fe::ONE, 2).is_err());
        let fixed = f.elements().filter(|&x| f.frobenius(x, 3).unwrap() == x).count();
        assert_eq!(fixed, 3);
        for x in f.elements() {
            for y in f.elements() {
                assert_eq!(f.pow(f.add(x, y), 3), f.add(f.pow(x, 3), f.pow(y, 3)));
                assert_eq!(f.pow(f.mul(x, y), 3), f.mul(f.pow(x, 3), f.pow(y, 3)));
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, k) in [(2, 3), (3, 2), (5, 1)] {
            let f = FieldTower::new(p, k).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
                if let Some(ai) = f.inv(a) {
                    assert_eq!(f.mul(a, ai), Fe::ONE);
                }
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), Fe(f.slow_mul(a.0, b.0)));
                    for c in f.elements() {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn additive_equation_counts() {
        // c -> a c^q + b c is F_p-linear; with a nonzero kernel of size q the
        // fibres all have size 0 or q.
        let f = FieldTower::new(3, 2).unwrap();
        let q = 3u64;
        for a in f.elements().filter(|a| !a.is_zero()) {
            for b in f.elements() {
                let kernel = f.solve_additive(a, b, q, Fe::ZERO, 2).unwrap().len();
                for d in f.elements() {
                    let n = f.solve_additive(a, b, q, d, 2).unwrap().len();
                    assert!(n == 0 || n == kernel, "a={a:?} b={b:?} d={d:?}: {n}");
                    if kernel == 3 {
                        assert!(n == 0 || n == 3);
                    }
                }
            }
        }
    }

    #[test]
    fn subfield_degree_checks() {
        let f = FieldTower::new(2, 4).unwrap();
        assert_eq!(f.subfield_degree(4).unwrap(), 2);
        assert!(f.subfield_degree(8).is_err());
        assert!(f.subfield_degree(6).is_err());
    }

    #[test]
    fn ambient_towers_hold_needed_extensions() {
        for (q, degs) in [(2u64, vec![2u32, 3, 4, 6, 12]), (3, vec![1, 2, 3, 4, 6, 12])] {
            let t = ambient_tower(q).unwrap();
            for d in degs {
                assert!(t.contains_subfield(d));
            }
            assert!(Arc::ptr_eq(&t, &ambient_tower(q).unwrap()));
        }
        assert_eq!(ambient_tower(5).unwrap().size(), 625);
        assert!(ambient_tower(7).is_err());
    }
}
