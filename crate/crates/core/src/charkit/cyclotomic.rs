//! Exact arithmetic in cyclotomic fields `Q(zeta_m)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num::integer::Integer;
use num::{BigInt, BigRational, One, Signed, Zero};

/// `Phi_m` as integer coefficients, lowest degree first.
pub fn cyclotomic_polynomial(m: u32) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    assert!(m >= 1);
    // x^m - 1 divided by Phi_d for every proper divisor d.
    let mut poly = vec![BigInt::zero(); m as usize + 1];
    poly[0] = -BigInt::one();
    poly[m as usize] = BigInt::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            poly = exact_div(&poly, &cyclotomic_polynomial(d));
        }
    }
    let poly = Arc::new(poly);
    cache.lock().unwrap().insert(m, poly.clone());
    poly
}

fn exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

pub fn euler_phi(m: u32) -> u32 {
    (1..=m).filter(|k| k.gcd(&m) == 1).count() as u32
}

fn divisors(m: u32) -> Vec<u32> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

/// An element of `Q(zeta_m)` in the power basis `1, zeta, .., zeta^(phi(m)-1)`.
///
/// Values are not automatically moved to their smallest field; call
/// [`Cyclotomic::minimize`] before comparing representations.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    m: u32,
    c: Vec<BigRational>,
}

impl Cyclotomic {
    /// Reduces a polynomial in `zeta_m` (any length) modulo `Phi_m`.
    pub fn from_poly(m: u32, mut poly: Vec<BigRational>) -> Self {
        let phi = cyclotomic_polynomial(m);
        let deg = phi.len() - 1;
        for k in (deg..poly.len()).rev() {
            let lead = std::mem::take(&mut poly[k]);
            if lead.is_zero() {
                continue;
            }
            for (i, a) in phi.iter().enumerate().take(deg) {
                poly[k - deg + i] -= &lead * BigRational::from_integer(a.clone());
            }
        }
        poly.resize(deg, BigRational::zero());
        Cyclotomic { m, c: poly }
    }

    pub fn from_rational(x: BigRational) -> Self {
        Cyclotomic { m: 1, c: vec![x] }
    }

    pub fn from_int(x: i64) -> Self {
        Self::from_rational(BigRational::from_integer(x.into()))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `zeta_m^k`.
    pub fn root_of_unity(m: u32, k: i64) -> Self {
        let mut poly = vec![BigRational::zero(); m as usize];
        poly[k.rem_euclid(m as i64) as usize] = BigRational::one();
        Self::from_poly(m, poly)
    }

    pub fn conductor(&self) -> u32 {
        self.m
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.c
    }

    /// Builds from stored coefficients; fails if the length is not `phi(m)`.
    pub fn from_coefficients(m: u32, c: Vec<BigRational>) -> Option<Self> {
        (m >= 1 && c.len() == euler_phi(m) as usize).then_some(Cyclotomic { m, c })
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// The same number written over `Q(zeta_m2)`; `m` must divide `m2`.
    pub fn lift(&self, m2: u32) -> Self {
        assert_eq!(m2 % self.m, 0, "conductor {} does not divide {m2}", self.m);
        if m2 == self.m {
            return self.clone();
        }
        let step = (m2 / self.m) as usize;
        let mut poly = vec![BigRational::zero(); m2 as usize];
        for (i, a) in self.c.iter().enumerate() {
            poly[(i * step) % m2 as usize] += a;
        }
        Self::from_poly(m2, poly)
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let m = self.m.lcm(&other.m);
        (self.lift(m), other.lift(m))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        Cyclotomic { m: a.m, c: a.c.iter().zip(&b.c).map(|(x, y)| x + y).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Cyclotomic { m: self.m, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let mut poly = vec![BigRational::zero(); (a.c.len() + b.c.len()).max(1)];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                poly[i + j] += x * y;
            }
        }
        Self::from_poly(a.m, poly)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Cyclotomic { m: self.m, c: self.c.iter().map(|x| x * s).collect() }
    }

    /// The automorphism `zeta -> zeta^a`, `gcd(a, m) = 1`.
    pub fn galois(&self, a: i64) -> Self {
        let m = self.m as i64;
        let mut poly = vec![BigRational::zero(); self.m as usize];
        for (i, x) in self.c.iter().enumerate() {
            poly[(i as i64 * a).rem_euclid(m) as usize] += x;
        }
        Self::from_poly(self.m, poly)
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// Rewrites the value over the smallest `Q(zeta_d)`, `d | m`, containing it.
    pub fn minimize(&self) -> Self {
        for d in divisors(self.m) {
            if let Some(c) = self.coordinates_in(d) {
                return Cyclotomic { m: d, c };
            }
        }
        unreachable!("every value lies in its own field")
    }

    /// Solves `sum y_i zeta_d^i = self` over `Q`.
    fn coordinates_in(&self, d: u32) -> Option<Vec<BigRational>> {
        let cols: Vec<Vec<BigRational>> =
            (0..euler_phi(d)).map(|i| Cyclotomic::root_of_unity(d, i as i64).lift(self.m).c).collect();
        let rows = self.c.len();
        let ncols = cols.len();
        // Augmented matrix, one row per coordinate of Q(zeta_m).
        let mut a: Vec<Vec<BigRational>> = (0..rows)
            .map(|r| {
                let mut row: Vec<BigRational> = cols.iter().map(|col| col[r].clone()).collect();
                row.push(self.c[r].clone());
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..ncols {
            let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(row, p);
            let inv = a[row][col].recip();
            for x in a[row].iter_mut() {
                *x *= &inv;
            }
            for r in 0..rows {
                if r != row && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for k in 0..=ncols {
                        let t = &f * &a[row][k];
                        a[r][k] -= t;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if a[row..].iter().any(|r| !r[ncols].is_zero()) {
            return None;
        }
        let mut y = vec![BigRational::zero(); ncols];
        for (r, &col) in pivots.iter().enumerate() {
            y[col] = a[r][ncols].clone();
        }
        Some(y)
    }

    /// The rational value, if the number is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        let min = self.minimize();
        (min.m == 1).then(|| min.c[0].clone())
    }

    /// The integer value, if the number is a rational integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|x| x.is_integer()).map(|x| x.to_integer())
    }

    /// A sort key; equal numbers give equal keys.
    pub fn key(&self) -> (u32, Vec<BigRational>) {
        let min = self.minimize();
        (min.m, min.c)
    }

    /// Approximate complex value, for display only.
    pub fn to_complex(&self) -> (f64, f64) {
        use num::ToPrimitive;
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, x) in self.c.iter().enumerate() {
            let v = x.to_f64().unwrap_or(f64::NAN);
            let ang = 2.0 * std::f64::consts::PI * i as f64 / self.m as f64;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re, im)
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl Eq for Cyclotomic {}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let min = self.minimize();
        if min.m == 1 {
            return write!(f, "{}", min.c[0]);
        }
        let mut first = true;
        for (i, x) in min.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let mag = x.abs();
            let sign = if x.is_negative() {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let coef = if mag.is_one() && i > 0 { String::new() } else { mag.to_string() };
            let sep = if coef.is_empty() || i == 0 { "" } else { "*" };
            let power = match i {
                0 => String::new(),
                1 => format!("z{}", min.m),
                _ => format!("z{}^{i}", min.m),
            };
            write!(f, "{sign}{coef}{sep}{power}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
