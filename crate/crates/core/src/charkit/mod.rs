//! Finite groups, conjugacy classes and exact character tables.

pub mod cyclotomic;
mod dixon;
mod group;
mod table;

pub use cyclotomic::Cyclotomic;
pub use dixon::{character_table, EXPONENT_BUDGET};
pub use group::{conjugacy_classes, ConjClass, ConjClassSet, CyclicGroup, FiniteGroup, GroupOps, GROUP_BUDGET};
pub use table::{
    isotypic_component, CharacterTable, CharacterTableJson, ClassFunction, ClassJson, ClassShape, CyclotomicJson,
    GroupMeta, IrreducibleJson, TABLE_FORMAT_VERSION,
};

use std::sync::Arc;

use crate::error::Result;
use crate::gfield::FieldTower;
use crate::matgrp::{enumerate_sl_fixed, fixed_group, MatGroup};

/// `SL_n(F_q[eps]/eps^r)` with its classes and table.
pub struct SlTable {
    pub group: FiniteGroup<MatGroup>,
    pub classes: ConjClassSet,
    pub table: CharacterTable,
    pub n: usize,
    pub q: u64,
    pub r: usize,
}

impl SlTable {
    /// Enumerates the group and computes its classes and character table.
    pub fn compute(tower: Arc<FieldTower>, n: usize, q: u64, r: usize) -> Result<Self> {
        let (group, classes) = sl_group_with_classes(tower, n, q, r)?;
        let table = character_table(&group, &classes)?;
        Ok(SlTable { group, classes, table, n, q, r })
    }

    /// Attaches a previously computed table after checking it against the
    /// recomputed classes.
    pub fn with_table(tower: Arc<FieldTower>, n: usize, q: u64, r: usize, json: &CharacterTableJson) -> Result<Self> {
        let (group, classes) = sl_group_with_classes(tower, n, q, r)?;
        let table = json.to_table()?;
        let expected = CharacterTableJson::build(&table, &group, &classes, n, q, r);
        if expected.classes != json.classes || expected.group != json.group {
            return Err(crate::Error::Consistency("stored table does not match the group's classes".into()));
        }
        table.verify()?;
        Ok(SlTable { group, classes, table, n, q, r })
    }

    pub fn json(&self) -> CharacterTableJson {
        CharacterTableJson::build(&self.table, &self.group, &self.classes, self.n, self.q, self.r)
    }

    /// The class of a group element.
    pub fn class_of(&self, m: &crate::matgrp::Mat) -> Option<usize> {
        self.group.index_of(m).map(|i| self.classes.class_of[i])
    }
}

fn sl_group_with_classes(
    tower: Arc<FieldTower>,
    n: usize,
    q: u64,
    r: usize,
) -> Result<(FiniteGroup<MatGroup>, ConjClassSet)> {
    let g = fixed_group(tower, n, q, r)?;
    let elems = enumerate_sl_fixed(&g)?;
    let group = FiniteGroup::new(g, elems)?;
    let classes = conjugacy_classes(&group);
    Ok((group, classes))
}

#[cfg(test)]
mod tests {
    use num::BigInt;

    use super::*;

    fn tower(p: u32) -> Arc<FieldTower> {
        Arc::new(FieldTower::new(p, 1).unwrap())
    }

    #[test]
    fn cyclic_six_is_linear() {
        let g = FiniteGroup::new(CyclicGroup(6), (0..6).collect()).unwrap();
        let cls = conjugacy_classes(&g);
        let t = character_table(&g, &cls).unwrap();
        assert_eq!(t.degrees(), vec![1; 6]);
        // Every value is a sixth root of unity.
        for chi in &t.irreducibles {
            for v in &chi.values {
                assert!((0..6).any(|k| *v == Cyclotomic::root_of_unity(6, k)));
            }
        }
    }

    #[test]
    fn small_sl2_tables() {
        let s3 = SlTable::compute(tower(2), 2, 2, 1).unwrap();
        assert_eq!(s3.table.degrees(), vec![1, 1, 2]);
        let sl23 = SlTable::compute(tower(3), 2, 3, 1).unwrap();
        assert_eq!(sl23.table.degrees(), vec![1, 1, 1, 2, 2, 2, 3]);
        for a in &sl23.table.irreducibles {
            for b in &sl23.table.irreducibles {
                let ip = sl23.table.inner_product(a, b).unwrap();
                assert_eq!(ip, Cyclotomic::from_int(i64::from(a == b)));
            }
        }
    }

    #[test]
    fn level_two_table_q2() {
        let t = SlTable::compute(tower(2), 2, 2, 2).unwrap();
        assert_eq!(t.table.degrees(), vec![1, 1, 1, 1, 2, 2, 3, 3, 3, 3]);
        let reg = t.table.regular_character();
        let degs: Vec<BigInt> = t.table.degrees().into_iter().map(BigInt::from).collect();
        assert_eq!(t.table.decompose(&reg).unwrap(), degs);
    }

    #[test]
    fn json_roundtrip() {
        let t = SlTable::compute(tower(3), 2, 3, 1).unwrap();
        let j = t.json();
        assert_eq!(j.to_table().unwrap(), t.table);
        let again = SlTable::with_table(tower(3), 2, 3, 1, &j).unwrap();
        assert_eq!(again.table, t.table);
    }

    #[test]
    fn isotypic_pieces_sum_back() {
        // Z/3 acting on itself; chi(g, t) = [g = t] style data on one class.
        let omegas: Vec<Vec<Cyclotomic>> =
            (0..3).map(|a| (0..3).map(|t| Cyclotomic::root_of_unity(3, a * t)).collect()).collect();
        let chi = vec![vec![Cyclotomic::from_int(3), Cyclotomic::zero(), Cyclotomic::zero()]];
        let total = omegas
            .iter()
            .map(|w| isotypic_component(&chi, w).unwrap())
            .fold(ClassFunction::zero(1), |acc, f| acc.add(&f));
        assert_eq!(total.values[0], Cyclotomic::from_int(3));
        let triv = vec![vec![Cyclotomic::from_int(2); 3]];
        assert_eq!(isotypic_component(&triv, &omegas[0]).unwrap().values[0], Cyclotomic::from_int(2));
        assert!(isotypic_component(&triv, &omegas[0][..2]).is_err());
    }
}
