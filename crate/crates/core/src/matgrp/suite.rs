//! Seeded randomized checks of the commutator decompositions and the
//! level partition, plus the exhaustive uniqueness scan for `SL_2`.

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lemmas::{
    decompose_commutator, decompose_level_product, level_cell, level_partition, random_level_product_input,
    CommutatorCertificate,
};
use super::{fixed_group, Mat, MatGroup, Root, RootSystem};
use crate::error::{Error, Result};
use crate::gfield::FieldTower;
use crate::trunc::RingElement;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    pub first_failure: Option<String>,
}

impl LemmaCheck {
    fn run(name: &str, trials: usize, mut trial: impl FnMut() -> Result<()>) -> Self {
        let mut passed = 0;
        let mut first_failure = None;
        for _ in 0..trials {
            match trial() {
                Ok(()) => passed += 1,
                Err(e) => {
                    first_failure.get_or_insert_with(|| e.to_string());
                }
            }
        }
        LemmaCheck { name: name.into(), trials, passed, first_failure }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.trials
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionCheck {
    pub kernel_size: usize,
    pub covered: usize,
    pub cells: usize,
    pub disjoint: bool,
    pub order_free: bool,
}

impl PartitionCheck {
    pub fn ok(&self) -> bool {
        self.disjoint && self.order_free && self.covered + 1 == self.kernel_size
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaSuiteReport {
    pub n: usize,
    pub q: u64,
    pub r: usize,
    pub seed: u64,
    pub checks: Vec<LemmaCheck>,
    pub partition: PartitionCheck,
}

impl LemmaSuiteReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(LemmaCheck::ok) && self.partition.ok()
    }
}

fn prime_group(n: usize, q: u64, r: usize) -> Result<MatGroup> {
    if ![2, 3, 5].contains(&q) {
        return Err(Error::InvalidInput(format!("q={q} must be one of 2, 3, 5")));
    }
    fixed_group(Arc::new(FieldTower::new(q as u32, 1)?), n, q, r)
}

fn random_with_valuation<R: Rng>(g: &MatGroup, v: usize, rng: &mut R) -> RingElement {
    let ring = g.ring();
    let pool = ring.elements_with_valuation(v);
    pool[rng.gen_range(0..pool.len())]
}

fn pick<R: Rng>(roots: &[Root], rng: &mut R) -> Root {
    roots[rng.gen_range(0..roots.len())]
}

/// `x x' = x' x rest` for the pair and certificate.
fn certificate_holds(g: &MatGroup, x: &Mat, y: &Mat, cert: &CommutatorCertificate) -> bool {
    let rs = RootSystem::new(g.n());
    let rest = match cert {
        CommutatorCertificate::Commute => g.identity(),
        CommutatorCertificate::RootProduct { factors } => {
            factors.iter().fold(g.identity(), |acc, (beta, s)| g.mul(&acc, &rs.root_element(g, *beta, s)))
        }
        CommutatorCertificate::TorusUnipotent(split) => g.mul(&split.tau, &split.unipotent),
    };
    g.mul(x, y) == g.mul_all(&[y, x, &rest])
}

/// Runs `trials` seeded trials of each decomposition on `SL_n(F_q[eps]/eps^r)`
/// and the level partition of the unipotent congruence kernel.
pub fn run_lemma_suite(n: usize, q: u64, r: usize, trials: usize, seed: u64) -> Result<LemmaSuiteReport> {
    if r < 2 {
        return Err(Error::InvalidInput("the lemmas need r >= 2".into()));
    }
    let g = prime_group(n, q, r)?;
    let rs = RootSystem::new(n);
    let roots = rs.roots();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    checks.push(LemmaCheck::run("commutation when b + c >= r", trials, || {
        let (a, a2) = (pick(&roots, &mut rng), pick(&roots, &mut rng));
        let b = rng.gen_range(0..=r);
        let c = rng.gen_range(r - b..=r);
        let (u, v) = (random_with_valuation(&g, b, &mut rng), random_with_valuation(&g, c, &mut rng));
        let (x, y) = (rs.root_element(&g, a, &u), rs.root_element(&g, a2, &v));
        match decompose_commutator(&g, a, &u, b, a2, &v, c)? {
            CommutatorCertificate::Commute if g.mul(&x, &y) == g.mul(&y, &x) => Ok(()),
            other => Err(Error::Consistency(format!("{a:?},{a2:?} b={b} c={c}: {other:?}"))),
        }
    }));

    checks.push(LemmaCheck::run("root product for non-opposite roots", trials, || {
        let a = pick(&roots, &mut rng);
        let others: Vec<Root> = roots.iter().copied().filter(|&x| x != a.inverse()).collect();
        let a2 = pick(&others, &mut rng);
        let b = rng.gen_range(0..r);
        let c = rng.gen_range(0..r - b);
        let (u, v) = (random_with_valuation(&g, b, &mut rng), random_with_valuation(&g, c, &mut rng));
        let cert = decompose_commutator(&g, a, &u, b, a2, &v, c)?;
        let (x, y) = (rs.root_element(&g, a, &u), rs.root_element(&g, a2, &v));
        match cert {
            CommutatorCertificate::RootProduct { .. } if certificate_holds(&g, &x, &y, &cert) => Ok(()),
            other => Err(Error::Consistency(format!("{a:?},{a2:?} b={b} c={c}: {other:?}"))),
        }
    }));

    checks.push(LemmaCheck::run("torus times unipotent for opposite roots", trials, || {
        let a = pick(&roots, &mut rng);
        let c = rng.gen_range(1..r);
        let b = r - 1 - c;
        let (u, v) = (random_with_valuation(&g, b, &mut rng), random_with_valuation(&g, c, &mut rng));
        let cert = decompose_commutator(&g, a, &u, b, a.inverse(), &v, c)?;
        let (x, y) = (rs.root_element(&g, a, &u), rs.root_element(&g, a.inverse(), &v));
        match cert {
            CommutatorCertificate::TorusUnipotent(_) if certificate_holds(&g, &x, &y, &cert) => Ok(()),
            other => Err(Error::Consistency(format!("{a:?} b={b} c={c}: {other:?}"))),
        }
    }));

    let order = rs.positive();
    checks.push(LemmaCheck::run("level decomposition xi z = z xi tau omega", trials, || {
        let (alpha, a, s, z) = random_level_product_input(&g, &mut rng);
        decompose_level_product(&g, alpha, a, &s, &z, &order).map(|_| ())
    }));

    let part = level_partition(&g, &order, &order)?;
    let mut seen = HashSet::new();
    let disjoint = part.cells.values().flatten().all(|z| seen.insert(*z));
    let reversed: Vec<Root> = order.iter().rev().copied().collect();
    let mut order_free = true;
    for (cell, zs) in &part.cells {
        for z in zs {
            order_free &= level_cell(&g, z, &order, &reversed)? == *cell;
        }
    }
    let partition = PartitionCheck {
        kernel_size: part.kernel_size,
        covered: part.covered(),
        cells: part.cells.len(),
        disjoint,
        order_free,
    };
    Ok(LemmaSuiteReport { n, q, r, seed, checks, partition })
}

/// Exhaustively checks on `SL_2(F_q[eps]/eps^r)` that the opposite-root
/// split and the level decomposition have exactly one solution among deep
/// torus times deep unipotent pairs. Returns the number of cases.
pub fn exhaustive_uniqueness(q: u64, r: usize) -> Result<usize> {
    if r < 2 {
        return Err(Error::InvalidInput("needs r >= 2".into()));
    }
    let g = prime_group(2, q, r)?;
    let ring = g.ring();
    let rs = RootSystem::new(2);
    let up = Root::new(0, 1);
    let down = up.inverse();
    let mut cases = 0;
    let unique = |ct: &[Mat], deep: &[Mat], lhs: &Mat, prefix: &[&Mat], want: (&Mat, &Mat)| -> Result<()> {
        let sols: Vec<(&Mat, &Mat)> = ct
            .iter()
            .flat_map(|t| deep.iter().map(move |w| (t, w)))
            .filter(|(t, w)| {
                let mut f: Vec<&Mat> = prefix.to_vec();
                f.push(t);
                f.push(w);
                g.mul_all(&f) == *lhs
            })
            .collect();
        if sols.len() != 1 || sols[0] != want {
            return Err(Error::Consistency(format!("{} solutions", sols.len())));
        }
        Ok(())
    };
    let deep_of = |a: Root| -> Vec<Mat> {
        ring.elements_with_valuation(r - 1).iter().map(|w| rs.root_element(&g, a, w)).collect()
    };
    let ct_up = rs.deep_coroot_elements(&g, up);
    let deep_up = deep_of(up);
    for c in 1..r {
        let b = r - 1 - c;
        for u in ring.elements_with_valuation(b) {
            for v in ring.elements_with_valuation(c) {
                let CommutatorCertificate::TorusUnipotent(split) = decompose_commutator(&g, up, &u, b, down, &v, c)?
                else {
                    return Err(Error::Consistency("opposite roots did not split".into()));
                };
                let (x, y) = (rs.root_element(&g, up, &u), rs.root_element(&g, down, &v));
                unique(&ct_up, &deep_up, &g.mul(&x, &y), &[&y, &x], (&split.tau, &split.unipotent))?;
                cases += 1;
            }
        }
    }
    let ct_down = rs.deep_coroot_elements(&g, down);
    let deep_down = deep_of(down);
    for a in 1..r {
        for s in ring.elements_with_valuation(r - a - 1) {
            for zs in ring.elements_with_valuation(a) {
                let z = rs.root_element(&g, up, &zs);
                let xi = rs.root_element(&g, down, &s);
                let split = decompose_level_product(&g, down, a, &s, &z, &[up])?;
                unique(&ct_down, &deep_down, &g.mul(&xi, &z), &[&z, &xi], (&split.tau, &split.unipotent))?;
                cases += 1;
            }
        }
    }
    Ok(cases)
}
