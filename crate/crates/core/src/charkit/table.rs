//! Class functions, character tables and their JSON form.

use num::{BigInt, BigRational, One};
use serde::{Deserialize, Serialize};

use super::cyclotomic::Cyclotomic;
use super::group::{ConjClassSet, FiniteGroup, GroupOps};
use crate::error::{Error, Result};

/// Bumped whenever the table JSON layout or class ordering changes.
pub const TABLE_FORMAT_VERSION: u32 = 1;

/// Cyclotomic values, one per conjugacy class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunction {
    pub values: Vec<Cyclotomic>,
}

impl ClassFunction {
    pub fn from_integers(values: impl IntoIterator<Item = i64>) -> Self {
        ClassFunction { values: values.into_iter().map(Cyclotomic::from_int).collect() }
    }

    pub fn zero(k: usize) -> Self {
        ClassFunction { values: vec![Cyclotomic::zero(); k] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        ClassFunction { values: self.values.iter().zip(&other.values).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scale(&self, s: &Cyclotomic) -> Self {
        ClassFunction { values: self.values.iter().map(|a| a.mul(s)).collect() }
    }

    /// The value at the identity class.
    pub fn degree(&self) -> &Cyclotomic {
        &self.values[0]
    }

    pub fn minimize(&self) -> Self {
        ClassFunction { values: self.values.iter().map(|v| v.minimize()).collect() }
    }
}

/// Class sizes and group order: what the inner product needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassShape {
    pub group_order: u64,
    pub sizes: Vec<u64>,
}

impl ClassShape {
    pub fn of(classes: &ConjClassSet) -> Self {
        ClassShape { group_order: classes.group_order, sizes: classes.sizes() }
    }

    /// `(1/|G|) sum_c |c| f(c) conj(g(c))`.
    pub fn inner_product(&self, f: &ClassFunction, g: &ClassFunction) -> Result<Cyclotomic> {
        if f.len() != self.sizes.len() || g.len() != self.sizes.len() {
            return Err(Error::InvalidInput(format!(
                "class functions of length {} and {} on a group with {} classes",
                f.len(),
                g.len(),
                self.sizes.len()
            )));
        }
        let mut acc = Cyclotomic::zero();
        for ((a, b), &s) in f.values.iter().zip(&g.values).zip(&self.sizes) {
            acc = acc.add(&a.mul(&b.conj()).scale(&BigRational::from_integer(s.into())));
        }
        Ok(acc.scale(&BigRational::new(BigInt::one(), self.group_order.into())).minimize())
    }
}

/// Irreducible characters, rows sorted by degree then values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterTable {
    pub shape: ClassShape,
    pub class_orders: Vec<u64>,
    pub irreducibles: Vec<ClassFunction>,
}

impl CharacterTable {
    pub fn num_classes(&self) -> usize {
        self.shape.sizes.len()
    }

    pub fn degrees(&self) -> Vec<u64> {
        self.irreducibles
            .iter()
            .map(|chi| {
                let d = chi.degree().as_integer().expect("degrees are integers");
                u64::try_from(d).expect("degrees are positive")
            })
            .collect()
    }

    pub fn inner_product(&self, f: &ClassFunction, g: &ClassFunction) -> Result<Cyclotomic> {
        self.shape.inner_product(f, g)
    }

    /// Multiplicities of each irreducible in `f`; fails unless all are integers.
    pub fn decompose(&self, f: &ClassFunction) -> Result<Vec<BigInt>> {
        self.irreducibles
            .iter()
            .enumerate()
            .map(|(i, chi)| {
                let m = self.inner_product(f, chi)?;
                m.as_integer().ok_or_else(|| {
                    Error::Consistency(format!("multiplicity of irreducible {i} is {m}, not an integer"))
                })
            })
            .collect()
    }

    /// Rational multiplicities; fails if some inner product is irrational.
    pub fn decompose_rational(&self, f: &ClassFunction) -> Result<Vec<BigRational>> {
        self.irreducibles
            .iter()
            .map(|chi| {
                let m = self.inner_product(f, chi)?;
                m.as_rational().ok_or_else(|| Error::Consistency(format!("inner product {m} is not rational")))
            })
            .collect()
    }

    /// `sum_chi deg(chi) chi`.
    pub fn regular_character(&self) -> ClassFunction {
        let mut v = vec![Cyclotomic::zero(); self.num_classes()];
        v[0] = Cyclotomic::from_int(self.shape.group_order as i64);
        ClassFunction { values: v }
    }

    /// Row orthonormality, column orthogonality and `sum deg^2 = |G|`.
    pub fn verify(&self) -> Result<()> {
        let k = self.num_classes();
        if self.irreducibles.len() != k {
            return Err(Error::Consistency(format!("{} irreducibles for {k} classes", self.irreducibles.len())));
        }
        let sum_sq: u64 = self.degrees().iter().map(|d| d * d).sum();
        if sum_sq != self.shape.group_order {
            return Err(Error::Consistency(format!("sum of squared degrees {sum_sq} != {}", self.shape.group_order)));
        }
        for (i, a) in self.irreducibles.iter().enumerate() {
            for (j, b) in self.irreducibles.iter().enumerate().skip(i) {
                let ip = self.inner_product(a, b)?;
                let want = if i == j { Cyclotomic::one() } else { Cyclotomic::zero() };
                if ip != want {
                    return Err(Error::Consistency(format!("<chi_{i}, chi_{j}> = {ip}")));
                }
            }
        }
        for c in 0..k {
            for c2 in c..k {
                let s = self
                    .irreducibles
                    .iter()
                    .fold(Cyclotomic::zero(), |acc, chi| acc.add(&chi.values[c].mul(&chi.values[c2].conj())));
                let want = if c == c2 {
                    Cyclotomic::from_int((self.shape.group_order / self.shape.sizes[c]) as i64)
                } else {
                    Cyclotomic::zero()
                };
                if s != want {
                    return Err(Error::Consistency(format!("column orthogonality fails at classes {c}, {c2}")));
                }
            }
        }
        Ok(())
    }
}

/// Projects `chi` on `G x Gamma` (`values[class][t]`, Gamma abelian and
/// listed elementwise) to the `omega`-isotypic part:
/// `g -> (1/|Gamma|) sum_t omega(t)^-1 chi(g, t)`.
pub fn isotypic_component(values: &[Vec<Cyclotomic>], omega: &[Cyclotomic]) -> Result<ClassFunction> {
    let n = omega.len();
    if n == 0 || values.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput("character and omega disagree on |Gamma|".into()));
    }
    let inv_n = BigRational::new(BigInt::one(), BigInt::from(n));
    let inverses: Vec<Cyclotomic> = omega.iter().map(|w| w.conj()).collect();
    let values = values
        .iter()
        .map(|row| {
            row.iter()
                .zip(&inverses)
                .fold(Cyclotomic::zero(), |acc, (x, w)| acc.add(&x.mul(w)))
                .scale(&inv_n)
                .minimize()
        })
        .collect();
    Ok(ClassFunction { values })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicJson {
    pub conductor: u32,
    pub coefficients: Vec<String>,
}

impl From<&Cyclotomic> for CyclotomicJson {
    fn from(x: &Cyclotomic) -> Self {
        let m = x.minimize();
        CyclotomicJson {
            conductor: m.conductor(),
            coefficients: m.coefficients().iter().map(|c| c.to_string()).collect(),
        }
    }
}

impl TryFrom<&CyclotomicJson> for Cyclotomic {
    type Error = Error;

    fn try_from(j: &CyclotomicJson) -> Result<Self> {
        let coeffs = j
            .coefficients
            .iter()
            .map(|s| s.parse::<BigRational>().map_err(|e| Error::InvalidInput(format!("bad rational {s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Cyclotomic::from_coefficients(j.conductor, coeffs)
            .ok_or_else(|| Error::InvalidInput(format!("wrong coefficient count for conductor {}", j.conductor)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupMeta {
    pub n: usize,
    pub q: u64,
    pub r: usize,
    pub order: u64,
    pub num_classes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassJson {
    pub size: u64,
    pub element_order: u64,
    pub representative: Vec<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrreducibleJson {
    pub degree: u64,
    pub values: Vec<CyclotomicJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterTableJson {
    pub format_version: u32,
    pub group: GroupMeta,
    pub classes: Vec<ClassJson>,
    pub irreducibles: Vec<IrreducibleJson>,
}

impl CharacterTableJson {
    pub fn build<O: GroupOps>(
        table: &CharacterTable,
        group: &FiniteGroup<O>,
        classes: &ConjClassSet,
        n: usize,
        q: u64,
        r: usize,
    ) -> Self {
        CharacterTableJson {
            format_version: TABLE_FORMAT_VERSION,
            group: GroupMeta { n, q, r, order: table.shape.group_order, num_classes: table.num_classes() },
            classes: classes
                .classes
                .iter()
                .map(|c| ClassJson {
                    size: c.size,
                    element_order: c.order,
                    representative: group.ops().nested(group.element(c.rep)),
                })
                .collect(),
            irreducibles: table
                .irreducibles
                .iter()
                .zip(table.degrees())
                .map(|(chi, degree)| IrreducibleJson {
                    degree,
                    values: chi.values.iter().map(CyclotomicJson::from).collect(),
                })
                .collect(),
        }
    }

    pub fn to_table(&self) -> Result<CharacterTable> {
        if self.format_version != TABLE_FORMAT_VERSION {
            return Err(Error::InvalidInput(format!("table format {} != {TABLE_FORMAT_VERSION}", self.format_version)));
        }
        let irreducibles = self
            .irreducibles
            .iter()
            .map(|irr| {
                Ok(ClassFunction { values: irr.values.iter().map(Cyclotomic::try_from).collect::<Result<Vec<_>>>()? })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CharacterTable {
            shape: ClassShape { group_order: self.group.order, sizes: self.classes.iter().map(|c| c.size).collect() },
            class_orders: self.classes.iter().map(|c| c.element_order).collect(),
            irreducibles,
        })
    }
}
