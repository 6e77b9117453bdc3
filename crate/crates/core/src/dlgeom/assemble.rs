//! Isotypic projection of the three coverings, decomposition against the
//! character table, Gram matrices and the span computation.

use std::cell::OnceCell;
use std::collections::BTreeMap;

use num::{BigInt, BigRational, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::coverings::{build_xtil, build_xtil_prime, Xtil, XtilPrime};
use super::gset::GammaDual;
use super::surface::lefschetz_xtilpp;
use crate::charkit::{isotypic_component, ClassFunction, Cyclotomic, SlTable};
use crate::error::{Error, Result};
use crate::gfield::ambient_tower;
use crate::torus::{norm_orbit_equivalent, predicted_gram, TorusCharacter, TorusData, TorusKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variety {
    /// `X~`, right action of the split torus, cohomology in degree 0.
    Xtil,
    /// `X~'`, the component permutation module in degree 2.
    XtilPrime,
    /// `X~''`, the nonsplit torus, via Lefschetz numbers on the surface.
    XtilPp,
}

impl Variety {
    pub const ALL: [Variety; 3] = [Variety::Xtil, Variety::XtilPrime, Variety::XtilPp];

    pub fn name(self) -> &'static str {
        match self {
            Variety::Xtil => "xtil",
            Variety::XtilPrime => "xtil-prime",
            Variety::XtilPp => "xtil-pp",
        }
    }

    pub fn parse(s: &str) -> Result<Variety> {
        Variety::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown variety {s:?} (xtil, xtil-prime, xtil-pp)")))
    }
}

/// A class function of `G_2^F` cut out of a covering by a character of its
/// right group, with its multiplicities against the table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualCharacter {
    pub variety: Variety,
    pub character: TorusCharacter,
    pub values: ClassFunction,
    pub multiplicities: Vec<i64>,
}

impl VirtualCharacter {
    pub fn degree(&self) -> i64 {
        self.values.degree().as_integer().and_then(|d| d.to_i64()).expect("integral degree")
    }

    /// `Some((sign, index))` if this is plus or minus one irreducible.
    pub fn as_signed_irreducible(&self) -> Option<(i64, usize)> {
        let nonzero: Vec<usize> = (0..self.multiplicities.len()).filter(|&i| self.multiplicities[i] != 0).collect();
        match nonzero[..] {
            [i] if self.multiplicities[i].abs() == 1 => Some((self.multiplicities[i], i)),
            _ => None,
        }
    }

    pub fn inner_product(&self, other: &VirtualCharacter) -> i64 {
        self.multiplicities.iter().zip(&other.multiplicities).map(|(a, b)| a * b).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionTerm {
    pub index: usize,
    pub degree: u64,
    pub multiplicity: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub variety: Variety,
    pub q: u64,
    pub character: Vec<u64>,
    pub virtual_degree: i64,
    pub terms: Vec<DecompositionTerm>,
}

/// The level-two group with its table, tori and lazily built coverings.
pub struct DlContext {
    pub q: u64,
    pub table: SlTable,
    pub split: TorusData,
    pub nonsplit: TorusData,
    xtil: OnceCell<Xtil>,
    xtil_prime: OnceCell<XtilPrime>,
    lefschetz: OnceCell<Vec<Vec<i64>>>,
}

fn cached<T>(cell: &OnceCell<T>, build: impl FnOnce() -> Result<T>) -> Result<&T> {
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let v = build()?;
    Ok(cell.get_or_init(|| v))
}

impl DlContext {
    pub fn new(q: u64) -> Result<Self> {
        let table = SlTable::compute(ambient_tower(q)?, 2, q, 2)?;
        Self::with_table(table)
    }

    pub fn with_table(table: SlTable) -> Result<Self> {
        if table.n != 2 || table.r != 2 {
            return Err(Error::Precondition("coverings need the SL_2 table at r=2".into()));
        }
        let q = table.q;
        Ok(DlContext {
            q,
            split: TorusData::build(TorusKind::Split, q, 2)?,
            nonsplit: TorusData::build(TorusKind::Nonsplit, q, 2)?,
            table,
            xtil: OnceCell::new(),
            xtil_prime: OnceCell::new(),
            lefschetz: OnceCell::new(),
        })
    }

    pub fn xtil(&self) -> Result<&Xtil> {
        cached(&self.xtil, || build_xtil(&self.table, &self.split))
    }

    pub fn xtil_prime(&self) -> Result<&XtilPrime> {
        cached(&self.xtil_prime, || build_xtil_prime(&self.table))
    }

    /// `L(g, t)` over class representatives and `Gamma''`.
    pub fn lefschetz(&self) -> Result<&Vec<Vec<i64>>> {
        cached(&self.lefschetz, || lefschetz_xtilpp(&self.table, &self.nonsplit))
    }

    pub fn gamma(&self, variety: Variety) -> Result<GammaDual> {
        Ok(match variety {
            Variety::Xtil => self.xtil()?.gamma.clone(),
            Variety::XtilPrime => self.xtil_prime()?.gamma.clone(),
            Variety::XtilPp => GammaDual { decomposition: self.nonsplit.decomposition().clone() },
        })
    }

    /// The alternating trace of `x -> g x t^-1` on cohomology, per class and `t`.
    pub fn pair_table(&self, variety: Variety) -> Result<Vec<Vec<i64>>> {
        Ok(match variety {
            Variety::Xtil => self.xtil()?.gset.fixed_counts(),
            Variety::XtilPrime => self.xtil_prime()?.gset.fixed_counts(),
            Variety::XtilPp => self.lefschetz()?.clone(),
        })
    }

    /// The `theta`-isotypic part of the covering's alternating cohomology.
    pub fn assemble(&self, variety: Variety, theta: &TorusCharacter) -> Result<VirtualCharacter> {
        let pairs = self.pair_table(variety)?;
        self.project(variety, &pairs, &self.gamma(variety)?, theta)
    }

    fn project(
        &self,
        variety: Variety,
        pairs: &[Vec<i64>],
        gamma: &GammaDual,
        theta: &TorusCharacter,
    ) -> Result<VirtualCharacter> {
        let values: Vec<Vec<Cyclotomic>> =
            pairs.iter().map(|row| row.iter().map(|&v| Cyclotomic::from_int(v)).collect()).collect();
        let values = isotypic_component(&values, &gamma.values(theta))?;
        let multiplicities = self
            .table
            .table
            .decompose(&values)?
            .into_iter()
            .map(|m| m.to_i64().ok_or_else(|| Error::Consistency("multiplicity overflow".into())))
            .collect::<Result<Vec<_>>>()?;
        let vc = VirtualCharacter { variety, character: theta.clone(), values, multiplicities };
        let degrees = self.table.table.degrees();
        let from_terms: i64 = vc.multiplicities.iter().zip(&degrees).map(|(m, &d)| m * d as i64).sum();
        if from_terms != vc.degree() {
            return Err(Error::Consistency("degree disagrees with the decomposition".into()));
        }
        Ok(vc)
    }

    /// Every isotypic piece of one covering, in character order.
    pub fn assemble_all(&self, variety: Variety) -> Result<Vec<VirtualCharacter>> {
        let pairs = self.pair_table(variety)?;
        let gamma = self.gamma(variety)?;
        gamma.characters().iter().map(|th| self.project(variety, &pairs, &gamma, th)).collect()
    }

    pub fn report(&self, vc: &VirtualCharacter) -> DecompositionReport {
        let degrees = self.table.table.degrees();
        DecompositionReport {
            variety: vc.variety,
            q: self.q,
            character: vc.character.exps.clone(),
            virtual_degree: vc.degree(),
            terms: vc
                .multiplicities
                .iter()
                .enumerate()
                .filter(|(_, &m)| m != 0)
                .map(|(index, &multiplicity)| DecompositionTerm { index, degree: degrees[index], multiplicity })
                .collect(),
        }
    }

    /// `Gamma`-dimension total of the isotypic pieces against `|X|`.
    pub fn isotypic_dimensions(&self, variety: Variety) -> Result<(i64, i64)> {
        let id = self.gamma(variety)?.identity();
        let total = self.pair_table(variety)?[0][id];
        let sum = self.assemble_all(variety)?.iter().map(VirtualCharacter::degree).sum();
        Ok((sum, total))
    }
}

/// Gram matrix of virtual characters.
pub fn gram(chars: &[VirtualCharacter]) -> Vec<Vec<i64>> {
    chars.iter().map(|a| chars.iter().map(|b| a.inner_product(b)).collect()).collect()
}

/// How one isotypic piece compares with the predicted constituents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemizationRow {
    pub character: Vec<u64>,
    pub case: String,
    /// Degrees of the predicted constituents, negative for those entering
    /// with sign -1.
    pub expected: Vec<i64>,
    pub found: Vec<i64>,
    /// For pieces predicted to contain `sum H^2(X~')_{omega'}`: whether
    /// that exact sum is a summand with the listed remainder.
    pub literal_match: Option<bool>,
    pub pass: bool,
}

fn signed_degrees(mults: &[i64], degrees: &[u64]) -> Vec<i64> {
    let mut out = Vec::new();
    for (&m, &d) in mults.iter().zip(degrees) {
        for _ in 0..m.abs() {
            out.push(m.signum() * d as i64);
        }
    }
    out.sort();
    out
}

impl DlContext {
    /// `H^0(X~)_omega` against the predicted list: a single irreducible of
    /// degree `q^2 + q`, two of degree `(q^2 + q)/2`, or a part coming from
    /// `H^2(X~')` plus a short list of further irreducibles.
    ///
    /// The part from `H^2(X~')` is predicted as `sum_{omega'^2 = 1} H^2(X~')_{omega'}`
    /// (`omega' = 1` for even `q`). Since `H^2(X~')_1` holds the constant
    /// functions on components, that sum contains the trivial representation
    /// and can never fit; `pass` therefore reads the part as that many
    /// constituents of `H^2(X~')` of degree `(q^2-1)/2` (`q^2 - 1` for even
    /// `q`), and `literal_match` records the literal comparison.
    pub fn xtil_itemization(&self) -> Result<Vec<ItemizationRow>> {
        let q = self.q as i64;
        let odd = q % 2 == 1;
        let gamma = self.gamma(Variety::Xtil)?;
        let level_one = self.split.ct().to_vec();
        let prime = self.assemble_all(Variety::XtilPrime)?;
        let prime_gamma = self.gamma(Variety::XtilPrime)?;
        let degrees = self.table.table.degrees();
        let k = degrees.len();
        let literal_pick: Vec<&VirtualCharacter> =
            prime
                .iter()
                .filter(|vc| {
                    if odd {
                        prime_gamma.squares_to_one(&vc.character)
                    } else {
                        prime_gamma.is_trivial(&vc.character)
                    }
                })
                .collect();
        let mut literal = vec![0; k];
        for vc in &literal_pick {
            for (a, m) in literal.iter_mut().zip(&vc.multiplicities) {
                *a += m;
            }
        }
        let in_cover: Vec<bool> = (0..k).map(|i| prime.iter().any(|vc| vc.multiplicities[i] != 0)).collect();
        let cover_degree = if odd { (q * q - 1) / 2 } else { q * q - 1 };
        let cover_count = literal_pick.len();
        let mut rows = Vec::new();
        for vc in self.assemble_all(Variety::Xtil)? {
            let w = &vc.character;
            let on_level_one = gamma.trivial_on(w, &level_one);
            let sq = gamma.squares_to_one(w);
            let triv = gamma.is_trivial(w);
            let (case, with_cover, extras): (&str, bool, Vec<i64>) = if odd {
                if !on_level_one {
                    ("nontrivial on level one", false, vec![q * q + q])
                } else if !sq {
                    ("order > 2", true, vec![q + 1])
                } else if !triv {
                    ("order 2", true, vec![(q + 1) / 2, (q + 1) / 2])
                } else {
                    ("trivial", true, vec![1, q])
                }
            } else if !on_level_one && !sq {
                ("nontrivial on level one, order > 2", false, vec![q * q + q])
            } else if sq && !triv {
                ("order 2", false, vec![(q * q + q) / 2, (q * q + q) / 2])
            } else if !triv {
                ("trivial on level one", true, vec![q + 1])
            } else {
                ("trivial", true, vec![1, q])
            };
            let mut expected = extras.clone();
            if with_cover {
                expected.extend(std::iter::repeat_n(cover_degree, cover_count));
            }
            expected.sort();
            let found = signed_degrees(&vc.multiplicities, &degrees);
            let from_cover = (0..k)
                .filter(|&i| vc.multiplicities[i] != 0 && in_cover[i] && degrees[i] as i64 == cover_degree)
                .count();
            let pass = found == expected
                && vc.multiplicities.iter().all(|m| (0..=1).contains(m))
                && (!with_cover || from_cover >= cover_count);
            let literal_match = with_cover && {
                let residual: Vec<i64> = vc.multiplicities.iter().zip(&literal).map(|(a, b)| a - b).collect();
                let mut want = extras.clone();
                want.sort();
                residual.iter().all(|&m| m >= 0) && signed_degrees(&residual, &degrees) == want
            };
            rows.push(ItemizationRow {
                character: w.exps.clone(),
                case: case.into(),
                expected,
                found,
                literal_match: if with_cover { Some(literal_match) } else { None },
                pass,
            });
        }
        Ok(rows)
    }

    /// `R^theta` from `X~''` against the predicted signed constituents.
    pub fn xtilpp_itemization(&self) -> Result<Vec<ItemizationRow>> {
        let q = self.q as i64;
        let odd = q % 2 == 1;
        let gamma = self.gamma(Variety::XtilPp)?;
        let level_one = self.nonsplit.ct().to_vec();
        let degrees = self.table.table.degrees();
        let mut rows = Vec::new();
        for vc in self.assemble_all(Variety::XtilPp)? {
            let w = &vc.character;
            let on_level_one = gamma.trivial_on(w, &level_one);
            let sq = gamma.squares_to_one(w);
            let triv = gamma.is_trivial(w);
            let (case, expected): (&str, Vec<i64>) = if triv {
                ("trivial", vec![1, -q])
            } else if odd {
                if !on_level_one {
                    ("nontrivial on level one", vec![q * q - q])
                } else if !sq {
                    ("order > 2", vec![-(q - 1)])
                } else {
                    ("order 2", vec![-(q - 1) / 2, -(q - 1) / 2])
                }
            } else if !on_level_one && !sq {
                ("nontrivial on level one, order > 2", vec![q * q - q])
            } else if sq {
                ("order 2", vec![(q * q - q) / 2, (q * q - q) / 2])
            } else {
                ("trivial on level one", vec![-(q - 1)])
            };
            let found = signed_degrees(&vc.multiplicities, &degrees);
            let mut want = expected.clone();
            want.sort();
            rows.push(ItemizationRow {
                character: w.exps.clone(),
                case: case.into(),
                pass: found == want && vc.multiplicities.iter().all(|m| m.abs() <= 1),
                expected,
                found,
                literal_match: None,
            });
        }
        Ok(rows)
    }

    /// `H^2(X~')_omega'` against "irreducible of degree `(q^2-1)/2`
    /// (`q^2 - 1` for even `q`), a different one for each `omega'`". A
    /// repeated irreducible fails on its second occurrence.
    pub fn xtil_prime_itemization(&self) -> Result<Vec<ItemizationRow>> {
        let q = self.q as i64;
        let d = if q % 2 == 1 { (q * q - 1) / 2 } else { q * q - 1 };
        let degrees = self.table.table.degrees();
        let mut seen = std::collections::BTreeSet::new();
        let mut rows = Vec::new();
        for vc in self.assemble_all(Variety::XtilPrime)? {
            let single = matches!(vc.as_signed_irreducible(), Some((1, i)) if degrees[i] as i64 == d && seen.insert(i));
            rows.push(ItemizationRow {
                character: vc.character.exps.clone(),
                case: "irreducible, distinct".into(),
                expected: vec![d],
                found: signed_degrees(&vc.multiplicities, &degrees),
                literal_match: None,
                pass: single,
            });
        }
        Ok(rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanReport {
    pub q: u64,
    pub family_size: usize,
    pub num_irreducibles: usize,
    pub rank: usize,
    /// Irreducibles orthogonal to every member of the family.
    pub outside: Vec<usize>,
    /// Irreducibles whose indicator vector is not in the rational span.
    pub not_in_span: Vec<usize>,
    /// Coefficients of the regular character over the family, if it lies
    /// in the span; rationals as `"a/b"` strings.
    pub regular_solution: Option<Vec<String>>,
}

/// Rank of the family `{R_X~(omega), R_X~'(omega'), R_X~''(omega'')}` and
/// what its rational span reaches.
pub fn span_check(ctx: &DlContext) -> Result<SpanReport> {
    let mut family = Vec::new();
    for v in Variety::ALL {
        family.extend(ctx.assemble_all(v)?);
    }
    let k = ctx.table.table.num_classes();
    let rows: Vec<Vec<BigRational>> = family
        .iter()
        .map(|vc| vc.multiplicities.iter().map(|&m| BigRational::from_integer(m.into())).collect())
        .collect();
    let rank = rank_of(&rows);
    let outside = (0..k).filter(|&i| family.iter().all(|vc| vc.multiplicities[i] == 0)).collect();
    let not_in_span = (0..k)
        .filter(|&i| {
            let target: Vec<BigRational> =
                (0..k).map(|j| BigRational::from_integer(BigInt::from(i64::from(i == j)))).collect();
            solve_combination(&rows, &target).is_none()
        })
        .collect();
    let regular: Vec<BigRational> =
        ctx.table.table.degrees().iter().map(|&d| BigRational::from_integer(BigInt::from(d))).collect();
    let regular_solution = solve_combination(&rows, &regular).map(|c| c.iter().map(|x| x.to_string()).collect());
    Ok(SpanReport {
        q: ctx.q,
        family_size: family.len(),
        num_irreducibles: k,
        rank,
        outside,
        not_in_span,
        regular_solution,
    })
}

/// Reduced row echelon form without the zero rows.
fn echelon(rows: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

fn rank_of(rows: &[Vec<BigRational>]) -> usize {
    echelon(rows).len()
}

/// Some `c` with `sum_i c_i rows[i] = target`, if one exists.
fn solve_combination(rows: &[Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigRational>> {
    // Columns are family members: solve the transposed system.
    let n = rows.len();
    let k = target.len();
    let aug: Vec<Vec<BigRational>> = (0..k)
        .map(|j| {
            let mut row: Vec<BigRational> = (0..n).map(|i| rows[i][j].clone()).collect();
            row.push(target[j].clone());
            row
        })
        .collect();
    let red = echelon(&aug);
    let mut sol = vec![BigRational::zero(); n];
    for row in &red {
        let lead = row.iter().position(|x| !x.is_zero())?;
        if lead == n {
            return None;
        }
        sol[lead] = row[n].clone();
    }
    Some(sol)
}

/// Degree multiset of the table as `degree -> count`.
pub fn degree_counts(table: &SlTable) -> BTreeMap<u64, usize> {
    let mut out = BTreeMap::new();
    for d in table.table.degrees() {
        *out.entry(d).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_solver() {
        let r = |v: &[i64]| v.iter().map(|&x| BigRational::from_integer(x.into())).collect::<Vec<_>>();
        let rows = vec![r(&[1, 0, 1]), r(&[0, 1, 1])];
        assert_eq!(rank_of(&rows), 2);
        let sol = solve_combination(&rows, &r(&[2, 3, 5])).unwrap();
        assert_eq!(sol, r(&[2, 3]));
        assert!(solve_combination(&rows, &r(&[1, 0, 0])).is_none());
        assert_eq!(rank_of(&[r(&[1, 2]), r(&[2, 4])]), 1);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramMember {
    pub torus: TorusKind,
    pub character: Vec<u64>,
    pub regular: bool,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramEntry {
    pub row: usize,
    pub col: usize,
    pub found: i64,
    pub predicted: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramReport {
    pub q: u64,
    pub n_max: u32,
    pub members: Vec<GramMember>,
    pub matrix: Vec<Vec<i64>>,
    /// Pairs of regular characters where the matrix differs from the
    /// Weyl-orbit count.
    pub predicted_mismatches: Vec<GramEntry>,
    pub nonequivalent_pairs: usize,
    /// Pairs with no norm-orbit witness up to `n_max` that still pair
    /// nontrivially.
    pub nonorthogonal: Vec<GramEntry>,
}

impl GramReport {
    pub fn pass(&self) -> bool {
        self.predicted_mismatches.is_empty() && self.nonorthogonal.is_empty()
    }
}

/// `R(theta)` for every character of both tori: the Gram matrix, the
/// orbit-count prediction on regular pairs and orthogonality of pairs that
/// are not norm-orbit equivalent.
pub fn gram_check(ctx: &DlContext, n_max: u32) -> Result<GramReport> {
    let mut family = Vec::new();
    for (torus, variety) in [(&ctx.split, Variety::Xtil), (&ctx.nonsplit, Variety::XtilPp)] {
        for theta in torus.characters() {
            let vc = ctx.assemble(variety, &theta)?;
            let regular = torus.is_regular(&theta)?;
            family.push((torus, theta, regular, vc));
        }
    }
    let chars: Vec<VirtualCharacter> = family.iter().map(|f| f.3.clone()).collect();
    let matrix = gram(&chars);
    let mut predicted_mismatches = Vec::new();
    let mut nonorthogonal = Vec::new();
    let mut nonequivalent_pairs = 0;
    for (i, (ta, a, reg_a, _)) in family.iter().enumerate() {
        for (j, (tb, b, reg_b, _)) in family.iter().enumerate() {
            let found = matrix[i][j];
            if *reg_a && *reg_b {
                let predicted = predicted_gram(ta, a, tb, b)? as i64;
                if predicted != found {
                    predicted_mismatches.push(GramEntry { row: i, col: j, found, predicted });
                }
            }
            if norm_orbit_equivalent(ta, a, tb, b, n_max)?.is_none() {
                nonequivalent_pairs += 1;
                if found != 0 {
                    nonorthogonal.push(GramEntry { row: i, col: j, found, predicted: 0 });
                }
            }
        }
    }
    let members = family
        .iter()
        .map(|(t, theta, regular, vc)| GramMember {
            torus: t.kind(),
            character: theta.exps.clone(),
            regular: *regular,
            degree: vc.degree(),
        })
        .collect();
    Ok(GramReport { q: ctx.q, n_max, members, matrix, predicted_mismatches, nonequivalent_pairs, nonorthogonal })
}
