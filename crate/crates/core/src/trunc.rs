//! Truncated polynomial rings `F_{q^m}[eps]/(eps^r)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gfield::{Fe, FieldTower};

/// Largest supported truncation length.
pub const MAX_LEN: usize = 4;

/// `sum c_i eps^i`, coefficient of `eps^i` at index `i`. Entries past `len`
/// are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RingElement {
    c: [Fe; MAX_LEN],
    len: u8,
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs().iter().map(|x| x.0.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl RingElement {
    pub fn coeffs(&self) -> &[Fe] {
        &self.c[..self.len as usize]
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.c[i]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// Least `i` with a nonzero coefficient; `len` for zero.
    pub fn valuation(&self) -> usize {
        self.coeffs().iter().position(|x| !x.is_zero()).unwrap_or(self.len())
    }

    pub fn constant(&self) -> Fe {
        self.c[0]
    }
}

/// The ring `F_{q^m}[eps]/(eps^r)` inside a fixed ambient tower.
///
/// `q` is the order of the base field whose Frobenius the ring carries;
/// `coeff_degree` is the degree over `F_p` of the field the coefficients are
/// enumerated from (it only matters for enumeration).
#[derive(Clone)]
pub struct TruncRing {
    tower: Arc<FieldTower>,
    len: usize,
    q: u64,
    coeff_degree: u32,
}

impl fmt::Debug for TruncRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}[eps]/(eps^{})", self.tower.characteristic(), self.coeff_degree, self.len)
    }
}

impl TruncRing {
    pub fn new(tower: Arc<FieldTower>, len: usize, q: u64, coeff_degree: u32) -> Result<Self> {
        if len > MAX_LEN {
            return Err(Error::InvalidInput(format!("truncation length {len} > {MAX_LEN}")));
        }
        tower.subfield_degree(q)?;
        if !tower.contains_subfield(coeff_degree) {
            return Err(Error::InvalidInput(format!("coefficient field of degree {coeff_degree} not in the tower")));
        }
        Ok(TruncRing { tower, len, q, coeff_degree })
    }

    /// Same tower, Frobenius and coefficients, different truncation length.
    pub fn with_len(&self, len: usize) -> TruncRing {
        assert!(len <= MAX_LEN);
        TruncRing { len, ..self.clone() }
    }

    /// Same tower and length, coefficients enumerated from `F_{p^d}`.
    pub fn with_coeff_degree(&self, d: u32) -> Result<TruncRing> {
        TruncRing::new(self.tower.clone(), self.len, self.q, d)
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn field(&self) -> &FieldTower {
        &self.tower
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn coeff_degree(&self) -> u32 {
        self.coeff_degree
    }

    /// Number of elements enumerated by [`TruncRing::elements`].
    pub fn cardinality(&self) -> u64 {
        (self.tower.characteristic() as u64).pow(self.coeff_degree).pow(self.len as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[Fe]) -> RingElement {
        let mut c = [Fe::ZERO; MAX_LEN];
        for (i, &x) in coeffs.iter().take(self.len).enumerate() {
            c[i] = x;
        }
        RingElement { c, len: self.len as u8 }
    }

    pub fn from_field(&self, x: Fe) -> RingElement {
        self.from_coeffs(&[x])
    }

    pub fn from_int(&self, v: i64) -> RingElement {
        self.from_field(self.tower.from_int(v))
    }

    pub fn zero(&self) -> RingElement {
        self.from_coeffs(&[])
    }

    pub fn one(&self) -> RingElement {
        self.from_field(Fe::ONE)
    }

    /// `eps^k` (zero once `k >= r`).
    pub fn eps_pow(&self, k: usize) -> RingElement {
        let mut c = [Fe::ZERO; MAX_LEN];
        if k < self.len {
            c[k] = Fe::ONE;
        }
        RingElement { c, len: self.len as u8 }
    }

    pub fn eps(&self) -> RingElement {
        self.eps_pow(1)
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let f = &self.tower;
        let mut c = [Fe::ZERO; MAX_LEN];
        for i in 0..self.len {
            c[i] = f.add(a.c[i], b.c[i]);
        }
        RingElement { c, len: self.len as u8 }
    }

    pub fn neg(&self, a: &RingElement) -> RingElement {
        let f = &self.tower;
        let mut c = [Fe::ZERO; MAX_LEN];
        for i in 0..self.len {
            c[i] = f.neg(a.c[i]);
        }
        RingElement { c, len: self.len as u8 }
    }

    pub fn sub(&self, a: &RingElement, b: &RingElement) -> RingElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let f = &self.tower;
        let mut c = [Fe::ZERO; MAX_LEN];
        for i in 0..self.len {
            if a.c[i].is_zero() {
                continue;
            }
            for j in 0..self.len - i {
                c[i + j] = f.add(c[i + j], f.mul(a.c[i], b.c[j]));
            }
        }
        RingElement { c, len: self.len as u8 }
    }

    pub fn scale(&self, s: Fe, a: &RingElement) -> RingElement {
        self.mul(&self.from_field(s), a)
    }

    pub fn is_unit(&self, a: &RingElement) -> bool {
        self.len > 0 && !a.c[0].is_zero()
    }

    /// Inverse of a unit via the geometric series in the nilpotent part.
    pub fn inv(&self, a: &RingElement) -> Option<RingElement> {
        if !self.is_unit(a) {
            return None;
        }
        let c0inv = self.tower.inv(a.c[0])?;
        let u = self.scale(c0inv, a);
        let n = self.sub(&self.one(), &u);
        let mut acc = self.one();
        let mut term = self.one();
        for _ in 1..self.len {
            term = self.mul(&term, &n);
            acc = self.add(&acc, &term);
        }
        Some(self.scale(c0inv, &acc))
    }

    pub fn pow(&self, a: &RingElement, mut e: u64) -> RingElement {
        let mut base = *a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Coefficientwise `x -> x^q`.
    pub fn frobenius(&self, a: &RingElement) -> RingElement {
        self.frobenius_pow(a, 1)
    }

    /// Coefficientwise `x -> x^(q^k)`.
    pub fn frobenius_pow(&self, a: &RingElement, k: u32) -> RingElement {
        let f = &self.tower;
        let e = self.q.pow(k);
        let mut c = [Fe::ZERO; MAX_LEN];
        for i in 0..self.len {
            c[i] = f.pow(a.c[i], e);
        }
        RingElement { c, len: self.len as u8 }
    }

    /// Truncation to length `r2 <= r`; a ring homomorphism.
    pub fn reduce(&self, a: &RingElement, r2: usize) -> Result<RingElement> {
        if r2 > self.len {
            return Err(Error::Precondition(format!("cannot reduce length {} to {r2}", self.len)));
        }
        let mut c = [Fe::ZERO; MAX_LEN];
        c[..r2].copy_from_slice(&a.c[..r2]);
        Ok(RingElement { c, len: r2 as u8 })
    }

    /// Is `a` congruent to `b` modulo `eps^k`?
    pub fn congruent(&self, a: &RingElement, b: &RingElement, k: usize) -> bool {
        (0..k.min(self.len)).all(|i| a.c[i] == b.c[i])
    }

    /// All elements with coefficients in `F_{p^coeff_degree}`, in packed order.
    pub fn elements(&self) -> Vec<RingElement> {
        let coeffs = self.tower.subfield_elements(self.coeff_degree).expect("validated at construction");
        self.elements_from(&coeffs, 0)
    }

    /// Elements of valuation at least `min_val`.
    pub fn elements_with_valuation(&self, min_val: usize) -> Vec<RingElement> {
        let coeffs = self.tower.subfield_elements(self.coeff_degree).expect("validated at construction");
        self.elements_from(&coeffs, min_val)
    }

    fn elements_from(&self, coeffs: &[Fe], min_val: usize) -> Vec<RingElement> {
        let mut out = vec![self.zero()];
        for i in min_val..self.len {
            let mut next = Vec::with_capacity(out.len() * coeffs.len());
            for &x in coeffs {
                for e in &out {
                    let mut e2 = *e;
                    e2.c[i] = x;
                    next.push(e2);
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// The unit group, `(q^m - 1) q^(m(r-1))` elements.
    pub fn units(&self) -> Vec<RingElement> {
        self.elements().into_iter().filter(|x| self.is_unit(x)).collect()
    }

    pub fn encode(&self, a: &RingElement, out: &mut Vec<u8>) {
        for x in a.coeffs() {
            out.extend_from_slice(&self.tower.encode(*x));
        }
    }
}
