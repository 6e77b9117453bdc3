//! Cyclic decomposition of a finite abelian group from a multiplication
//! oracle on element indices.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// `A = Z/d_1 x .. x Z/d_k`, `d_1 | d_2 | ..`, every `d_i > 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianDecomposition {
    pub invariants: Vec<u64>,
    /// Coordinates of every element, `coords[x][i]` mod `invariants[i]`.
    pub coords: Vec<Vec<u64>>,
    /// Element index of each cyclic generator.
    pub generators: Vec<usize>,
}

impl AbelianDecomposition {
    /// `mul(a, b)` must be a commutative group law on `0..n` with identity `id`.
    pub fn compute(n: usize, id: usize, mul: impl Fn(usize, usize) -> usize) -> Result<Self> {
        // Greedy generators and BFS words in them.
        let mut word: Vec<Option<Vec<i128>>> = vec![None; n];
        word[id] = Some(Vec::new());
        let mut reached = vec![id];
        let mut gens: Vec<usize> = Vec::new();
        for cand in 0..n {
            if word[cand].is_some() {
                continue;
            }
            gens.push(cand);
            let k = gens.len();
            for w in word.iter_mut().flatten() {
                w.resize(k, 0);
            }
            let mut queue: VecDeque<usize> = reached.iter().copied().collect();
            while let Some(x) = queue.pop_front() {
                for (j, &g) in gens.iter().enumerate() {
                    let y = mul(x, g);
                    if word[y].is_none() {
                        let mut w = word[x].clone().unwrap();
                        w[j] += 1;
                        word[y] = Some(w);
                        reached.push(y);
                        queue.push_back(y);
                    }
                }
            }
        }
        if reached.len() != n {
            return Err(Error::InvalidInput("multiplication does not generate the set".into()));
        }
        let k = gens.len();
        let word: Vec<Vec<i128>> = word.into_iter().map(|w| w.unwrap()).collect();
        // Relations word(x) + e_j - word(x g_j) generate the kernel.
        let mut rel: Vec<Vec<i128>> = Vec::new();
        for x in 0..n {
            for (j, &g) in gens.iter().enumerate() {
                let y = mul(x, g);
                let row: Vec<i128> = (0..k).map(|i| word[x][i] + i128::from(i == j) - word[y][i]).collect();
                if row.iter().any(|&v| v != 0) {
                    rel.push(row);
                }
            }
        }
        let (diag, v) = smith(rel, k);
        let vinv = unimodular_inverse(&v);
        let mut invariants = Vec::new();
        let mut keep = Vec::new();
        for (i, &d) in diag.iter().enumerate() {
            if d != 1 {
                if d == 0 {
                    return Err(Error::Consistency("infinite factor in a finite group".into()));
                }
                invariants.push(d as u64);
                keep.push(i);
            }
        }
        let coords: Vec<Vec<u64>> = word
            .iter()
            .map(|w| {
                keep.iter()
                    .zip(&invariants)
                    .map(|(&i, &d)| {
                        let c: i128 = (0..k).map(|t| w[t] * v[t][i]).sum();
                        c.rem_euclid(d as i128) as u64
                    })
                    .collect()
            })
            .collect();
        // Generator i is the word given by row i of V^-1.
        let pow = |x: usize, e: i128| -> usize {
            let g = x;
            let mut acc = id;
            for _ in 0..e.rem_euclid(n as i128) {
                acc = mul(acc, g);
            }
            acc
        };
        let generators = keep.iter().map(|&i| (0..k).fold(id, |acc, t| mul(acc, pow(gens[t], vinv[i][t])))).collect();
        let dec = AbelianDecomposition { invariants, coords, generators };
        dec.check(n, id, &mul)?;
        Ok(dec)
    }

    fn check(&self, n: usize, id: usize, mul: &impl Fn(usize, usize) -> usize) -> Result<()> {
        let size: u64 = self.invariants.iter().product();
        if size != n as u64 {
            return Err(Error::Consistency(format!("invariants {:?} for a group of order {n}", self.invariants)));
        }
        for w in self.invariants.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::Consistency(format!("invariants {:?} not a divisor chain", self.invariants)));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for x in 0..n {
            if !seen.insert(&self.coords[x]) {
                return Err(Error::Consistency("coordinates not injective".into()));
            }
        }
        for (i, &g) in self.generators.iter().enumerate() {
            let want: Vec<u64> = (0..self.invariants.len()).map(|j| u64::from(i == j)).collect();
            if self.coords[g] != want {
                return Err(Error::Consistency(format!("generator {i} has coordinates {:?}", self.coords[g])));
            }
        }
        for x in (0..n).step_by(1.max(n / 16)) {
            for y in 0..n {
                let z = mul(x, y);
                let sum: Vec<u64> = (0..self.invariants.len())
                    .map(|i| (self.coords[x][i] + self.coords[y][i]) % self.invariants[i])
                    .collect();
                if self.coords[z] != sum {
                    return Err(Error::Consistency("coordinates are not a homomorphism".into()));
                }
            }
        }
        let _ = id;
        Ok(())
    }

    pub fn order(&self) -> u64 {
        self.invariants.iter().product()
    }

    /// Least common multiple of the invariants.
    pub fn exponent(&self) -> u64 {
        self.invariants.last().copied().unwrap_or(1)
    }

    /// All exponent vectors `a`, `0 <= a_i < d_i`, in lexicographic order.
    pub fn dual_vectors(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &d in &self.invariants {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..d).map(move |a| {
                        let mut w = v.clone();
                        w.push(a);
                        w
                    })
                })
                .collect();
        }
        out
    }

    /// `sum_i a_i c_i(x) e/d_i mod e`: the character `a` at `x` as a power
    /// of `zeta_e`, `e` the exponent.
    pub fn pairing(&self, a: &[u64], x: usize) -> u64 {
        let e = self.exponent();
        self.invariants.iter().enumerate().map(|(i, &d)| a[i] * self.coords[x][i] % d * (e / d)).sum::<u64>() % e
    }
}

/// Diagonal of the Smith form of `rows` (k columns) and the column
/// transform `V` with `U A V = D`.
fn smith(mut a: Vec<Vec<i128>>, k: usize) -> (Vec<i128>, Vec<Vec<i128>>) {
    let mut v: Vec<Vec<i128>> = (0..k).map(|i| (0..k).map(|j| i128::from(i == j)).collect()).collect();
    let rows = a.len();
    let mut diag = Vec::new();
    for t in 0..k {
        if t >= rows {
            diag.push(0);
            continue;
        }
        loop {
            // Smallest nonzero entry of the remaining block to (t, t).
            let Some((pi, pj)) = (t..rows)
                .flat_map(|i| (t..k).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].abs())
            else {
                break;
            };
            a.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v, t, pj);
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let f = a[i][t] / p;
                if f != 0 {
                    for j in t..k {
                        a[i][j] -= f * a[t][j];
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..k {
                let f = a[t][j] / p;
                if f != 0 {
                    for row in a.iter_mut() {
                        row[j] -= f * row[t];
                    }
                    for row in v.iter_mut() {
                        row[j] -= f * row[t];
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into row t and retry.
            if let Some(i) = (t + 1..rows).find(|&i| (t + 1..k).any(|j| a[i][j] % p != 0)) {
                for j in t..k {
                    let x = a[i][j];
                    a[t][j] += x;
                }
                continue;
            }
            break;
        }
        diag.push(if t < rows { a[t][t].abs() } else { 0 });
    }
    (diag, v)
}

fn swap_cols(m: &mut [Vec<i128>], a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

/// Inverse of an integer matrix with determinant +-1.
fn unimodular_inverse(m: &[Vec<i128>]) -> Vec<Vec<i128>> {
    use num::{BigRational, One, Zero};
    let k = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> = row.iter().map(|&x| BigRational::from_integer(x.into())).collect();
            r.extend((0..k).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for c in 0..k {
        let p = (c..k).find(|&i| !a[i][c].is_zero()).expect("unimodular");
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..k {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * k {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    a.into_iter()
        .map(|row| {
            row[k..]
                .iter()
                .map(|x| {
                    assert!(x.is_integer(), "inverse of a unimodular matrix is integral");
                    i128::try_from(x.to_integer()).expect("small entries")
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    /// Product of cyclic groups, elements as mixed-radix indices.
    fn product(orders: &[u64]) -> (usize, impl Fn(usize, usize) -> usize + '_) {
        let n: u64 = orders.iter().product();
        let mul = move |a: usize, b: usize| {
            let (mut a, mut b) = (a as u64, b as u64);
            let mut out = 0;
            let mut radix = 1;
            for &d in orders {
                out += ((a % d + b % d) % d) * radix;
                radix *= d;
                a /= d;
                b /= d;
            }
            out as usize
        };
        (n as usize, mul)
    }

    #[test]
    fn known_invariants() {
        for (orders, want) in [
            (vec![6u64], vec![6u64]),
            (vec![2, 3], vec![6]),
            (vec![2, 2], vec![2, 2]),
            (vec![4, 6], vec![2, 12]),
            (vec![3, 3, 4], vec![3, 12]),
        ] {
            let (n, mul) = product(&orders);
            let d = AbelianDecomposition::compute(n, 0, mul).unwrap();
            assert_eq!(d.invariants, want, "{orders:?}");
            assert_eq!(d.dual_vectors().len(), n);
        }
        let (n, mul) = product(&[1]);
        let d = AbelianDecomposition::compute(n, 0, mul).unwrap();
        assert!(d.invariants.is_empty());
        assert_eq!(d.dual_vectors(), vec![Vec::<u64>::new()]);
    }

    proptest! {
        #[test]
        fn characters_separate_points(orders in proptest::collection::vec(1u64..7, 1..4)) {
            let (n, mul) = product(&orders);
            prop_assume!(n <= 60);
            let d = AbelianDecomposition::compute(n, 0, &mul).unwrap();
            let chars = d.dual_vectors();
            prop_assert_eq!(chars.len(), n);
            for x in 1..n {
                prop_assert!(chars.iter().any(|a| d.pairing(a, x) != 0));
            }
            for a in &chars {
                for x in 0..n {
                    for y in 0..n {
                        let e = d.exponent();
                        prop_assert_eq!(d.pairing(a, mul(x, y)), (d.pairing(a, x) + d.pairing(a, y)) % e);
                    }
                }
            }
        }
    }
}
