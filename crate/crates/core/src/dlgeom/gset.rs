//! Finite sets with a left action of a finite group and a commuting right
//! action of a finite abelian group, stored as permutation tables.

use std::collections::HashMap;
use std::hash::Hash;

use crate::charkit::Cyclotomic;
use crate::error::{Error, Result};
use crate::matgrp::Mat;
use crate::torus::{AbelianDecomposition, TorusCharacter};

pub type Perm = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGSet {
    /// Left action of each group generator.
    pub generators: Vec<Perm>,
    /// Left action of each conjugacy class representative.
    pub class_reps: Vec<Perm>,
    /// `right[t][x] = x . t`.
    pub right: Vec<Perm>,
}

impl FiniteGSet {
    /// Tabulates the actions on `points`; fails if an image leaves the set.
    pub fn from_actions<P: Clone + Eq + Hash>(
        points: &[P],
        generators: &[Mat],
        class_reps: &[Mat],
        gamma_order: usize,
        left: impl Fn(&Mat, &P) -> Result<P>,
        right: impl Fn(&P, usize) -> Result<P>,
    ) -> Result<Self> {
        let index: HashMap<&P, u32> = points.iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
        if index.len() != points.len() {
            return Err(Error::Consistency("repeated points".into()));
        }
        let lookup =
            |p: &P| index.get(p).copied().ok_or_else(|| Error::Consistency("action leaves the point set".into()));
        let table = |g: &Mat| -> Result<Perm> { points.iter().map(|p| lookup(&left(g, p)?)).collect() };
        let generators = generators.iter().map(table).collect::<Result<Vec<_>>>()?;
        let class_reps = class_reps.iter().map(table).collect::<Result<Vec<_>>>()?;
        let right = (0..gamma_order)
            .map(|t| points.iter().map(|p| lookup(&right(p, t)?)).collect())
            .collect::<Result<Vec<_>>>()?;
        let set = FiniteGSet { generators, class_reps, right };
        for p in set.generators.iter().chain(&set.class_reps).chain(&set.right) {
            if !is_permutation(p) {
                return Err(Error::Consistency("an action is not a bijection".into()));
            }
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.right.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(g x) t = g (x t)` for every generator `g` and every `t`.
    pub fn actions_commute(&self) -> bool {
        self.generators
            .iter()
            .chain(&self.class_reps)
            .all(|g| self.right.iter().all(|t| (0..self.len()).all(|x| t[g[x] as usize] == g[t[x] as usize])))
    }

    /// No `t != 1` fixes a point. The identity of the right group must be
    /// among the `right` tables.
    pub fn right_action_is_free(&self) -> bool {
        self.right
            .iter()
            .filter(|t| t.iter().enumerate().any(|(x, &y)| x as u32 != y))
            .all(|t| t.iter().enumerate().all(|(x, &y)| x as u32 != y))
    }

    /// Number of left orbits.
    pub fn left_orbits(&self) -> usize {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut orbits = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            orbits += 1;
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for g in &self.generators {
                    let y = g[x] as usize;
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        orbits
    }

    /// `fixed[c][t] = #{x : g_c x t^-1 = x}`: the permutation character of
    /// `G x Gamma` on class representatives.
    pub fn fixed_counts(&self) -> Vec<Vec<i64>> {
        self.class_reps
            .iter()
            .map(|g| self.right.iter().map(|t| (0..self.len()).filter(|&x| g[x] == t[x]).count() as i64).collect())
            .collect()
    }
}

fn is_permutation(p: &[u32]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&y| (y as usize) < p.len() && !std::mem::replace(&mut seen[y as usize], true))
}

/// The character group of a finite abelian group with listed elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaDual {
    pub decomposition: AbelianDecomposition,
}

impl GammaDual {
    pub fn order(&self) -> usize {
        self.decomposition.coords.len()
    }

    pub fn characters(&self) -> Vec<TorusCharacter> {
        self.decomposition.dual_vectors().into_iter().map(|exps| TorusCharacter { exps }).collect()
    }

    pub fn values(&self, chi: &TorusCharacter) -> Vec<Cyclotomic> {
        let e = self.decomposition.exponent();
        (0..self.order())
            .map(|t| Cyclotomic::root_of_unity(e as u32, self.decomposition.pairing(&chi.exps, t) as i64))
            .collect()
    }

    /// Index of the identity element.
    pub fn identity(&self) -> usize {
        self.decomposition.coords.iter().position(|c| c.iter().all(|&x| x == 0)).expect("identity present")
    }

    pub fn is_trivial(&self, chi: &TorusCharacter) -> bool {
        chi.exps.iter().all(|&a| a == 0)
    }

    /// `chi^2 = 1`.
    pub fn squares_to_one(&self, chi: &TorusCharacter) -> bool {
        chi.exps.iter().zip(&self.decomposition.invariants).all(|(&a, &d)| 2 * a % d == 0)
    }

    /// `chi` is trivial on every listed element.
    pub fn trivial_on(&self, chi: &TorusCharacter, subset: &[usize]) -> bool {
        subset.iter().all(|&t| self.decomposition.pairing(&chi.exps, t) == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_check() {
        assert!(is_permutation(&[2, 0, 1]));
        assert!(!is_permutation(&[0, 0, 1]));
        assert!(!is_permutation(&[0, 3]));
    }

    #[test]
    fn cyclic_dual() {
        let dec = AbelianDecomposition::compute(6, 0, |a, b| (a + b) % 6).unwrap();
        let dual = GammaDual { decomposition: dec };
        let chars = dual.characters();
        assert_eq!(chars.len(), 6);
        assert_eq!(chars.iter().filter(|c| dual.squares_to_one(c)).count(), 2);
        assert!(dual.is_trivial(&chars[0]));
        assert_eq!(dual.values(&chars[0]), vec![Cyclotomic::one(); 6]);
    }
}
