//! Commutator decompositions in root subgroups and the level partition of
//! the unipotent congruence kernel.
//!
//! Every decomposition is checked by exact multiplication before it is
//! returned; a failed check is reported as [`Error::Consistency`].

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::trunc::RingElement;

use super::{Mat, MatGroup, Root, RootSystem};

/// Outcome of rewriting `x x' = x' x (rest)` for root elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommutatorCertificate {
    /// `b + c >= r`: the two elements commute.
    Commute,
    /// `alpha alpha' != 1`: `rest` is an ordered product of root elements
    /// for the roots `alpha^i alpha'^i'`.
    RootProduct { factors: Vec<(Root, RingElement)> },
    /// `alpha' = alpha^-1`: `rest = tau u` with `tau` in the deep coroot
    /// torus and `u` in the deep root subgroup of `alpha`.
    TorusUnipotent(TorusUnipotentSplit),
}

/// `tau` (coroot parameter `t`) and a unipotent part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusUnipotentSplit {
    pub tau: Mat,
    pub tau_param: RingElement,
    pub unipotent: Mat,
}

fn check_val(x: &RingElement, v: usize, what: &str) -> Result<()> {
    if x.valuation() < v {
        return Err(Error::Precondition(format!("{what} has valuation {} < {v}", x.valuation())));
    }
    Ok(())
}

/// Decomposes the commutator of `x_alpha(u)` (`v(u) >= b`) and
/// `x_alpha2(u2)` (`v(u2) >= c`).
pub fn decompose_commutator(
    g: &MatGroup,
    alpha: Root,
    u: &RingElement,
    b: usize,
    alpha2: Root,
    u2: &RingElement,
    c: usize,
) -> Result<CommutatorCertificate> {
    let r = g.level();
    if b > r || c > r {
        return Err(Error::Precondition(format!("levels b={b}, c={c} outside [0,{r}]")));
    }
    check_val(u, b, "x")?;
    check_val(u2, c, "x'")?;
    let rs = RootSystem::new(g.n());
    let x = rs.root_element(g, alpha, u);
    let x2 = rs.root_element(g, alpha2, u2);
    let lhs = g.mul(&x, &x2);
    let rest = g.commutator(&x, &x2);

    if b + c >= r {
        if rest != g.identity() {
            return Err(Error::Consistency(format!("{alpha:?},{alpha2:?} at b={b}, c={c} do not commute")));
        }
        return Ok(CommutatorCertificate::Commute);
    }
    if alpha2 != alpha.inverse() {
        let mut factors = Vec::new();
        if let Some(gamma) = alpha.compose(alpha2) {
            let s = *rest.get(gamma.i, gamma.j);
            if s.valuation() < b + c {
                return Err(Error::Consistency(format!(
                    "factor for {gamma:?} has valuation {} < {}",
                    s.valuation(),
                    b + c
                )));
            }
            factors.push((gamma, s));
        }
        let prod = factors.iter().fold(g.identity(), |acc, (gm, s)| g.mul(&acc, &rs.root_element(g, *gm, s)));
        if g.mul_all(&[&x2, &x, &prod]) != lhs {
            return Err(Error::Consistency("root-product decomposition failed".into()));
        }
        return Ok(CommutatorCertificate::RootProduct { factors });
    }
    if b + c + 1 < r || b + 2 * c < r {
        return Err(Error::Precondition(format!("opposite roots need b+c >= r-1 and b+2c >= r (b={b}, c={c}, r={r})")));
    }
    let split = split_torus_unipotent(g, alpha, &rest, alpha)?;
    if g.mul_all(&[&x2, &x, &split.tau, &split.unipotent]) != lhs {
        return Err(Error::Consistency("torus/unipotent decomposition failed".into()));
    }
    Ok(CommutatorCertificate::TorusUnipotent(split))
}

/// Writes `m = tau * x_beta(w)` with `tau` in the deep coroot torus of
/// `alpha` and `v(w) >= r-1`.
fn split_torus_unipotent(g: &MatGroup, alpha: Root, m: &Mat, beta: Root) -> Result<TorusUnipotentSplit> {
    let ring = g.ring();
    let r = g.level();
    let rs = RootSystem::new(g.n());
    let t = *m.get(alpha.i, alpha.i);
    if !ring.congruent(&t, &ring.one(), r - 1) {
        return Err(Error::Consistency(format!("torus part {t:?} not congruent to 1 mod eps^{}", r - 1)));
    }
    let tau = rs.coroot_element(g, alpha, &t);
    let rem = g.mul(&g.inv(&tau), m);
    let w = *rem.get(beta.i, beta.j);
    let unipotent = rs.root_element(g, beta, &w);
    if w.valuation() < r - 1 || g.mul(&tau, &unipotent) != *m {
        return Err(Error::Consistency(format!("{m:?} is not tau * x_{beta:?}(deep)")));
    }
    Ok(TorusUnipotentSplit { tau, tau_param: t, unipotent })
}

/// Root-subgroup coordinates of a unipotent upper triangular `z` for the
/// given order of positive roots: `z = prod x_beta(s_beta)`.
///
/// Height-`h` entries of a product are the sum of the height-`h`
/// parameters plus a polynomial in lower heights, so the parameters are
/// solved height by height.
pub fn factor_unipotent(g: &MatGroup, z: &Mat, order: &[Root]) -> Result<Vec<(Root, RingElement)>> {
    let ring = g.ring();
    let rs = RootSystem::new(g.n());
    let n = g.n();
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { ring.one() } else { ring.zero() };
            if (i >= j) && *z.get(i, j) != expected {
                return Err(Error::Precondition(format!("{z:?} is not upper unitriangular")));
            }
        }
    }
    let mut params: Vec<(Root, RingElement)> = order.iter().map(|&b| (b, ring.zero())).collect();
    let max_h = order.iter().map(|b| b.height()).max().unwrap_or(0);
    for h in 1..=max_h {
        let prod = params.iter().fold(g.identity(), |acc, (b, s)| g.mul(&acc, &rs.root_element(g, *b, s)));
        for (b, s) in params.iter_mut() {
            if b.height() == h {
                *s = ring.sub(z.get(b.i, b.j), prod.get(b.i, b.j));
            }
        }
    }
    let prod = params.iter().fold(g.identity(), |acc, (b, s)| g.mul(&acc, &rs.root_element(g, *b, s)));
    if prod != *z {
        return Err(Error::Precondition(format!("{z:?} is not a product over {order:?}")));
    }
    Ok(params)
}

/// For `alpha` negative, `a in [1, r-1]`, `xi = x_alpha(s)` with
/// `v(s) >= r-a-1` and `z` upper unitriangular of level `a` whose factors
/// of height above `ht(alpha^-1)` lie one level deeper, returns `(tau,
/// omega)` with `xi z = z xi tau omega`, `tau` in the deep coroot torus of
/// `alpha` and `omega` lower unitriangular of level `r-1`.
pub fn decompose_level_product(
    g: &MatGroup,
    alpha: Root,
    a: usize,
    s: &RingElement,
    z: &Mat,
    order: &[Root],
) -> Result<TorusUnipotentSplit> {
    let r = g.level();
    let ring = g.ring();
    let rs = RootSystem::new(g.n());
    if alpha.is_positive() {
        return Err(Error::Precondition(format!("{alpha:?} is not negative")));
    }
    if a < 1 || a + 1 > r {
        return Err(Error::Precondition(format!("level a={a} outside [1, {}]", r - 1)));
    }
    check_val(s, r - a - 1, "xi")?;
    for (beta, p) in factor_unipotent(g, z, order)? {
        let need = if beta.height() > alpha.height() { a + 1 } else { a };
        check_val(&p, need, &format!("factor of z at {beta:?}"))?;
    }
    let xi = rs.root_element(g, alpha, s);
    let lhs = g.mul(&xi, z);
    let m = g.mul(&g.inv(&g.mul(z, &xi)), &lhs);

    let t = *m.get(alpha.i, alpha.i);
    if !ring.congruent(&t, &ring.one(), r - 1) {
        return Err(Error::Consistency(format!("torus part {t:?} not deep")));
    }
    let tau = rs.coroot_element(g, alpha, &t);
    let omega = g.mul(&g.inv(&tau), &m);
    for i in 0..g.n() {
        for j in 0..g.n() {
            let e = omega.get(i, j);
            let ok = match i.cmp(&j) {
                std::cmp::Ordering::Equal => *e == ring.one(),
                std::cmp::Ordering::Less => e.is_zero(),
                std::cmp::Ordering::Greater => e.valuation() >= r - 1,
            };
            if !ok {
                return Err(Error::Consistency(format!("omega = {omega:?} is not deep lower unitriangular")));
            }
        }
    }
    if g.mul_all(&[z, &xi, &tau, &omega]) != lhs {
        return Err(Error::Consistency("xi z != z xi tau omega".into()));
    }
    Ok(TorusUnipotentSplit { tau, tau_param: t, unipotent: omega })
}

fn random_element<R: Rng>(g: &MatGroup, min_val: usize, rng: &mut R) -> RingElement {
    let ring = g.ring();
    let coeffs = ring.field().subfield_elements(ring.coeff_degree()).expect("coefficient field is in the tower");
    let c: Vec<_> =
        (0..ring.len()).map(|i| if i < min_val { coeffs[0] } else { coeffs[rng.gen_range(0..coeffs.len())] }).collect();
    ring.from_coeffs(&c)
}

/// A random upper unitriangular element of level `a`, deeper by one at
/// heights above `height_cap`.
fn random_level_unipotent<R: Rng>(g: &MatGroup, a: usize, height_cap: usize, order: &[Root], rng: &mut R) -> Mat {
    let rs = RootSystem::new(g.n());
    order.iter().fold(g.identity(), |acc, &beta| {
        let v = if beta.height() > height_cap { a + 1 } else { a };
        g.mul(&acc, &rs.root_element(g, beta, &random_element(g, v, rng)))
    })
}

/// An admissible random input `(alpha, a, xi parameter, z)` for
/// [`decompose_level_product`].
pub fn random_level_product_input<R: Rng>(g: &MatGroup, rng: &mut R) -> (Root, usize, RingElement, Mat) {
    let rs = RootSystem::new(g.n());
    let neg = rs.negative();
    let alpha = neg[rng.gen_range(0..neg.len())];
    let r = g.level();
    let a = rng.gen_range(1..r);
    let s = random_element(g, r - a - 1, rng);
    let z = random_level_unipotent(g, a, alpha.height(), &rs.positive(), rng);
    (alpha, a, s, z)
}

/// The cell `(a, I_z)` of a nontrivial `z` in `Z^1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelCell {
    pub level: usize,
    pub roots: Vec<Root>,
}

/// Computes `(a, I_z)` for `z` in `Z^1 - {1}`, `Z` the product of the root
/// subgroups in `z_roots` (a closed subset of the positive roots).
pub fn level_cell(g: &MatGroup, z: &Mat, z_roots: &[Root], order: &[Root]) -> Result<LevelCell> {
    let r = g.level();
    if *z == g.identity() {
        return Err(Error::Precondition("z = 1".into()));
    }
    if !g.is_identity_mod(z, 1) {
        return Err(Error::Precondition(format!("{z:?} is not in the first congruence kernel")));
    }
    let factors = factor_unipotent(g, z, order)?;
    for (beta, s) in &factors {
        if !z_roots.contains(beta) && !s.is_zero() {
            return Err(Error::Precondition(format!("{z:?} has a factor outside Z at {beta:?}")));
        }
    }
    let level = g.stratum_index(z);
    debug_assert!((1..r).contains(&level));
    let val = |beta: Root| factors.iter().find(|(b, _)| *b == beta).map(|(_, s)| s.valuation()).unwrap_or(r);
    let roots: Vec<Root> = z_roots
        .iter()
        .copied()
        .filter(|&a2| {
            val(a2) == level && factors.iter().all(|(b, s)| b.height() <= a2.height() || s.valuation() > level)
        })
        .collect();
    let mut roots = roots;
    roots.sort();
    if roots.is_empty() {
        return Err(Error::Consistency(format!("empty I_z for {z:?}")));
    }
    if roots.iter().any(|b| b.height() != roots[0].height()) {
        return Err(Error::Consistency(format!("I_z = {roots:?} has mixed heights")));
    }
    Ok(LevelCell { level, roots })
}

/// The level partition of `Z^1 - {1}` by exhaustive enumeration.
#[derive(Clone, Debug)]
pub struct LevelPartition {
    pub cells: BTreeMap<LevelCell, Vec<Mat>>,
    pub kernel_size: usize,
}

impl LevelPartition {
    pub fn covered(&self) -> usize {
        self.cells.values().map(|v| v.len()).sum()
    }
}

/// Enumerates `Z^1` for `Z` spanned by `z_roots` and assigns each
/// nontrivial element its cell.
pub fn level_partition(g: &MatGroup, z_roots: &[Root], order: &[Root]) -> Result<LevelPartition> {
    let rs = RootSystem::new(g.n());
    let deep = g.ring().elements_with_valuation(1);
    let mut kernel = vec![g.identity()];
    for &beta in z_roots {
        let mut next = Vec::with_capacity(kernel.len() * deep.len());
        for z in &kernel {
            for s in &deep {
                next.push(g.mul(z, &rs.root_element(g, beta, s)));
            }
        }
        kernel = next;
    }
    kernel.sort_by_key(|m| g.encode(m));
    kernel.dedup();
    let mut cells: BTreeMap<LevelCell, Vec<Mat>> = BTreeMap::new();
    for z in kernel.iter().filter(|z| **z != g.identity()) {
        cells.entry(level_cell(g, z, z_roots, order)?).or_default().push(*z);
    }
    Ok(LevelPartition { cells, kernel_size: kernel.len() })
}
