//! Character tables by simultaneous diagonalization of the class
//! multiplication matrices over a prime field, lifted to exact values.

use num::{BigRational, Zero};

use super::cyclotomic::Cyclotomic;
use super::group::{ConjClassSet, FiniteGroup, GroupOps};
use super::table::{CharacterTable, ClassFunction, ClassShape};
use crate::error::{Error, Result};
use crate::gfield::is_prime;

/// Largest group exponent accepted.
pub const EXPONENT_BUDGET: u64 = 10_000;
const PRIME_ATTEMPTS: usize = 8;

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
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

fn primitive_root(p: u64) -> u64 {
    let fs = prime_factors(p - 1);
    (2..p).find(|&g| fs.iter().all(|f| pow_mod(g, (p - 1) / f, p) != 1)).expect("prime fields are cyclic")
}

/// Primes `p = 1 mod e` above `2 sqrt(|G|)`, in increasing order.
fn candidate_primes(group_order: u64, e: u64) -> impl Iterator<Item = u64> {
    let bound = 2 * ((group_order as f64).sqrt().ceil() as u64) + 1;
    (1u64..).map(move |k| k * e + 1).filter(move |&p| p > bound && is_prime(p as u32))
}

/// Characteristic polynomial (lowest degree first, monic) via Hessenberg form.
fn charpoly(mut a: Vec<Vec<u64>>, p: u64) -> Vec<u64> {
    let n = a.len();
    for c in 0..n.saturating_sub(2) {
        let Some(piv) = (c + 1..n).find(|&i| a[i][c] != 0) else {
            continue;
        };
        if piv != c + 1 {
            a.swap(piv, c + 1);
            for row in a.iter_mut() {
                row.swap(piv, c + 1);
            }
        }
        let inv = inv_mod(a[c + 1][c], p);
        for i in c + 2..n {
            let u = a[i][c] * inv % p;
            if u == 0 {
                continue;
            }
            for k in 0..n {
                a[i][k] = (a[i][k] + p - u * a[c + 1][k] % p) % p;
            }
            for row in a.iter_mut() {
                row[c + 1] = (row[c + 1] + u * row[i]) % p;
            }
        }
    }
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for k in 0..n {
        // (x - h_kk) p_k
        let prev = &polys[k];
        let mut next = vec![0u64; k + 2];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] = (next[i + 1] + c) % p;
            next[i] = (next[i] + p - a[k][k] * c % p) % p;
        }
        let mut prod = 1u64;
        for i in (0..k).rev() {
            prod = prod * a[i + 1][i] % p;
            let f = prod * a[i][k] % p;
            if f == 0 {
                continue;
            }
            for (t, &c) in polys[i].iter().enumerate() {
                next[t] = (next[t] + p - f * c % p) % p;
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

fn roots_mod(poly: &[u64], p: u64) -> Vec<u64> {
    (0..p).filter(|&x| poly.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p) == 0).collect()
}

/// Row-reduced basis of the null space of `m` (rows x cols).
fn kernel(mut m: Vec<Vec<u64>>, cols: usize, p: u64) -> Vec<Vec<u64>> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = inv_mod(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for k in 0..cols {
                    m[i][k] = (m[i][k] + p - f * m[r][k] % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[row][f]) % p;
            }
            v
        })
        .collect()
}

/// Reduced row echelon form of a basis; returns rows and pivot columns.
fn echelon(mut basis: Vec<Vec<u64>>, p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let cols = basis.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..basis.len()).find(|&i| basis[i][c] != 0) else {
            continue;
        };
        basis.swap(r, piv);
        let inv = inv_mod(basis[r][c], p);
        for x in basis[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..basis.len() {
            if i != r && basis[i][c] != 0 {
                let f = basis[i][c];
                for k in 0..cols {
                    basis[i][k] = (basis[i][k] + p - f * basis[r][k] % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    basis.truncate(r);
    (basis, pivots)
}

/// `mats[j][k][l] = #{x in C_j : x^-1 z_l in C_k}`.
fn class_matrices<O: GroupOps>(group: &FiniteGroup<O>, classes: &ConjClassSet) -> Vec<Vec<Vec<u64>>> {
    let ops = group.ops();
    let k = classes.len();
    let reps: Vec<&O::Elem> = classes.classes.iter().map(|c| group.element(c.rep)).collect();
    classes
        .classes
        .iter()
        .map(|cj| {
            let mut m = vec![vec![0u64; k]; k];
            for &x in &cj.members {
                let xi = ops.inv(group.element(x));
                for (l, z) in reps.iter().enumerate() {
                    let y = ops.mul(&xi, z);
                    let kk = classes.class_of[group.index_of(&y).expect("group is closed")];
                    m[kk][l] += 1;
                }
            }
            m
        })
        .collect()
}

/// Computes the character table, verifying orthogonality before returning.
pub fn character_table<O: GroupOps>(group: &FiniteGroup<O>, classes: &ConjClassSet) -> Result<CharacterTable> {
    let e = classes.exponent;
    if e > EXPONENT_BUDGET {
        return Err(Error::Budget(format!("exponent {e} exceeds {EXPONENT_BUDGET}")));
    }
    let mats = class_matrices(group, classes);
    let mut last_err = None;
    for p in candidate_primes(classes.group_order, e).take(PRIME_ATTEMPTS) {
        match table_mod_prime(classes, &mats, p) {
            Ok(table) => return Ok(table),
            Err(err @ Error::ModularPrime(_)) => last_err = Some(err),
            Err(err) => return Err(err),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::ModularPrime("no candidate prime".into())))
}

fn table_mod_prime(classes: &ConjClassSet, mats: &[Vec<Vec<u64>>], p: u64) -> Result<CharacterTable> {
    let k = classes.len();
    let g_order = classes.group_order;
    let mats: Vec<Vec<Vec<u64>>> =
        mats.iter().map(|m| m.iter().map(|row| row.iter().map(|x| x % p).collect()).collect()).collect();

    // Split F_p^k into common eigenspaces of all class matrices.
    let identity: Vec<Vec<u64>> = (0..k).map(|i| (0..k).map(|j| u64::from(i == j)).collect()).collect();
    let mut spaces = vec![identity];
    for a in &mats {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut next = Vec::new();
        for basis in spaces {
            if basis.len() == 1 {
                next.push(basis);
                continue;
            }
            let (basis, pivots) = echelon(basis, p);
            let d = basis.len();
            // Restriction: A b_i = sum_t R[t][i] b_t, read off at pivots.
            let mut restricted = vec![vec![0u64; d]; d];
            for (i, b) in basis.iter().enumerate() {
                for (t, &pc) in pivots.iter().enumerate() {
                    restricted[t][i] = (0..k).fold(0u64, |acc, l| (acc + a[pc][l] * b[l]) % p);
                }
            }
            let roots = roots_mod(&charpoly(restricted.clone(), p), p);
            let mut found = 0;
            for lam in roots {
                let mut shifted = restricted.clone();
                for (i, row) in shifted.iter_mut().enumerate() {
                    row[i] = (row[i] + p - lam) % p;
                }
                let vecs: Vec<Vec<u64>> = kernel(shifted, d, p)
                    .iter()
                    .map(|y| {
                        (0..k).map(|l| basis.iter().zip(y).fold(0u64, |acc, (b, c)| (acc + b[l] * c) % p)).collect()
                    })
                    .collect();
                found += vecs.len();
                next.push(vecs);
            }
            if found != d {
                return Err(Error::ModularPrime(format!("class matrix not split over F_{p}")));
            }
        }
        spaces = next;
    }
    if spaces.iter().any(|s| s.len() != 1) {
        return Err(Error::ModularPrime(format!("eigenspaces did not separate over F_{p}")));
    }

    let zeta = pow_mod(primitive_root(p), (p - 1) / classes.exponent, p);
    let sizes = classes.sizes();
    let mut irreducibles = Vec::with_capacity(k);
    for space in spaces {
        let v = &space[0];
        let inv0 = inv_mod(v[0], p);
        let omega: Vec<u64> = v.iter().map(|x| x * inv0 % p).collect();
        // chi(1)^2 = |G| / sum_l omega_l omega_{l*} / |C_l|.
        let s = (0..k)
            .fold(0u64, |acc, l| (acc + omega[l] * omega[classes.inverse_class(l)] % p * inv_mod(sizes[l] % p, p)) % p);
        if s == 0 {
            return Err(Error::ModularPrime(format!("degenerate norm over F_{p}")));
        }
        let deg_sq = (g_order % p) * inv_mod(s, p) % p;
        let degree = (1..)
            .take_while(|d: &u64| d * d <= g_order)
            .find(|d| d * d % p == deg_sq)
            .ok_or_else(|| Error::ModularPrime(format!("no degree for square {deg_sq} mod {p}")))?;
        let chi_mod: Vec<u64> = (0..k).map(|l| omega[l] * (degree % p) % p * inv_mod(sizes[l] % p, p) % p).collect();
        let values = (0..k).map(|l| lift_value(classes, l, &chi_mod, degree, zeta, p)).collect::<Result<Vec<_>>>()?;
        irreducibles.push(ClassFunction { values });
    }
    irreducibles.sort_by_cached_key(|chi| {
        let deg = chi.degree().as_integer().unwrap_or_default();
        (deg, chi.values.iter().map(|v| v.key()).collect::<Vec<_>>())
    });
    let table = CharacterTable {
        shape: ClassShape::of(classes),
        class_orders: classes.classes.iter().map(|c| c.order).collect(),
        irreducibles,
    };
    table.verify()?;
    Ok(table)
}

/// `chi(z_l) = sum_i m_i zeta_o^i` with `m_i = (1/o) sum_s chi(z_l^s) zeta_o^-is`.
fn lift_value(
    classes: &ConjClassSet,
    l: usize,
    chi_mod: &[u64],
    degree: u64,
    zeta_e: u64,
    p: u64,
) -> Result<Cyclotomic> {
    let o = classes.classes[l].order;
    let e = classes.exponent;
    let zeta_o = pow_mod(zeta_e, e / o, p);
    let inv_o = inv_mod(o % p, p);
    let mut poly = vec![BigRational::zero(); e as usize];
    for i in 0..o {
        let mut m = 0u64;
        for s in 0..o {
            let chi_s = chi_mod[classes.powers[l][s as usize]];
            let w = pow_mod(zeta_o, (o - (i * s) % o) % o, p);
            m = (m + chi_s * w) % p;
        }
        m = m * inv_o % p;
        if m > degree {
            return Err(Error::ModularPrime(format!("eigenvalue multiplicity {m} exceeds degree {degree} mod {p}")));
        }
        poly[(i * (e / o)) as usize] = BigRational::from_integer(m.into());
    }
    Ok(Cyclotomic::from_poly(e as u32, poly).minimize())
}
