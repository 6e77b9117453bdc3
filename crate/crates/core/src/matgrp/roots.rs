use std::fmt;

use crate::trunc::RingElement;

use super::{Mat, MatGroup};

/// A root `(i, j)`, `i != j`, of type `A_{n-1}` (0-based indices).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root {
    pub i: usize,
    pub j: usize,
}

impl fmt::Debug for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i + 1, self.j + 1)
    }
}

impl Root {
    pub fn new(i: usize, j: usize) -> Root {
        assert_ne!(i, j);
        Root { i, j }
    }

    pub fn inverse(self) -> Root {
        Root { i: self.j, j: self.i }
    }

    pub fn is_positive(self) -> bool {
        self.i < self.j
    }

    /// Height of a positive root; the height of the inverse for negative ones.
    pub fn height(self) -> usize {
        self.i.abs_diff(self.j)
    }

    /// The product of two roots when it is again a root.
    pub fn compose(self, other: Root) -> Option<Root> {
        if self.j == other.i && self.i != other.j {
            Some(Root::new(self.i, other.j))
        } else if other.j == self.i && other.i != self.j {
            Some(Root::new(other.i, self.j))
        } else {
            None
        }
    }
}

/// Roots of `SL_n` with their subgroups, heights and coroot tori.
#[derive(Clone, Debug)]
pub struct RootSystem {
    n: usize,
}

impl RootSystem {
    pub fn new(n: usize) -> Self {
        RootSystem { n }
    }

    pub fn rank(&self) -> usize {
        self.n - 1
    }

    pub fn roots(&self) -> Vec<Root> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    out.push(Root::new(i, j));
                }
            }
        }
        out
    }

    /// Positive roots in lexicographic order on `(i, j)`.
    pub fn positive(&self) -> Vec<Root> {
        self.roots().into_iter().filter(|a| a.is_positive()).collect()
    }

    pub fn negative(&self) -> Vec<Root> {
        self.roots().into_iter().filter(|a| !a.is_positive()).collect()
    }

    /// `x_alpha(u) = 1 + u E_{ij}`.
    pub fn root_element(&self, g: &MatGroup, a: Root, u: &RingElement) -> Mat {
        let mut m = g.identity();
        m.set(a.i, a.j, *u);
        m
    }

    /// The coroot image: `t` at `i`, `t^-1` at `j`.
    pub fn coroot_element(&self, g: &MatGroup, a: Root, t: &RingElement) -> Mat {
        let r = g.ring();
        let mut m = g.identity();
        m.set(a.i, a.i, *t);
        m.set(a.j, a.j, r.inv(t).expect("coroot parameter is a unit"));
        m
    }

    /// The level-`(r-1)` part of the coroot torus: `t = 1 + eps^(r-1) s`,
    /// `s` over the coefficient field of the group's ring.
    pub fn deep_coroot_elements(&self, g: &MatGroup, a: Root) -> Vec<Mat> {
        let r = g.ring();
        let top = r.eps_pow(g.level() - 1);
        r.field()
            .subfield_elements(r.coeff_degree())
            .expect("coefficient field is in the tower")
            .into_iter()
            .map(|s| self.coroot_element(g, a, &r.add(&r.one(), &r.scale(s, &top))))
            .collect()
    }

    /// If `m` is in the root subgroup of `a`, its parameter.
    pub fn root_parameter(&self, g: &MatGroup, a: Root, m: &Mat) -> Option<RingElement> {
        let u = *m.get(a.i, a.j);
        (self.root_element(g, a, &u) == *m).then_some(u)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::gfield::FieldTower;
    use crate::matgrp::fixed_group;

    #[test]
    fn heights_and_additivity() {
        let rs = RootSystem::new(3);
        assert_eq!(rs.positive(), vec![Root::new(0, 1), Root::new(0, 2), Root::new(1, 2)]);
        assert!(rs.positive().iter().all(|a| a.height() >= 1));
        assert_eq!(Root::new(0, 2).height(), 2);
        let g = fixed_group(Arc::new(FieldTower::new(2, 1).unwrap()), 3, 2, 2).unwrap();
        let r = g.ring();
        let elems = r.elements();
        for a in rs.roots() {
            for u in &elems {
                for v in &elems {
                    assert_eq!(
                        g.mul(&rs.root_element(&g, a, u), &rs.root_element(&g, a, v)),
                        rs.root_element(&g, a, &r.add(u, v))
                    );
                }
            }
            assert_eq!(rs.deep_coroot_elements(&g, a).len(), 2);
        }
    }

    #[test]
    fn deep_coroot_size_over_extension() {
        let tower = Arc::new(FieldTower::new(2, 2).unwrap());
        let g = fixed_group(tower, 2, 4, 2).unwrap();
        let rs = RootSystem::new(2);
        let ct = rs.deep_coroot_elements(&g, Root::new(0, 1));
        assert_eq!(ct.len(), 4);
        let set: std::collections::HashSet<_> = ct.iter().collect();
        assert_eq!(set.len(), 4);
    }

    #[test]
    fn compose_roots() {
        assert_eq!(Root::new(0, 1).compose(Root::new(1, 2)), Some(Root::new(0, 2)));
        assert_eq!(Root::new(1, 2).compose(Root::new(0, 1)), Some(Root::new(0, 2)));
        assert_eq!(Root::new(0, 1).compose(Root::new(1, 0)), None);
        assert_eq!(Root::new(0, 1).compose(Root::new(0, 2)), None);
    }
}
