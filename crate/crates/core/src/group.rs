//! Finite groups given by multiplication table, plus the left/right multiplication and
//! projection operators on a `|G|`-dimensional qudit.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{GadgetError, Result};
use crate::op::LocalOp;

/// Built-in groups.
///
/// Element orderings:
/// * `Cyclic(n)`: `k` is `k mod n` under addition.
/// * `S3`: permutations of `(0,1,2)` in lexicographic order of their images
///   (`0 = 012, 1 = 021, 2 = 102, 3 = 120, 4 = 201, 5 = 210`), composed as `(ab)(x) = a(b(x))`.
/// * `D4`: `r^k s^e` has index `k + 4e`, with `s r s = r^{-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupPreset {
    Cyclic(usize),
    S3,
    D4,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupDescriptor {
    Preset(GroupPreset),
    Table(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    name: String,
    order: usize,
    mult: Vec<usize>,
    inverse: Vec<usize>,
    generators: Vec<usize>,
}

fn preset_table(p: &GroupPreset) -> Result<(String, Vec<Vec<usize>>)> {
    match *p {
        GroupPreset::Cyclic(n) => {
            if n == 0 {
                return Err(GadgetError::InvalidGroup("Z_0 is not a group".into()));
            }
            let t = (0..n)
                .map(|a| (0..n).map(|b| (a + b) % n).collect())
                .collect();
            Ok((format!("Z{n}"), t))
        }
        GroupPreset::S3 => {
            let perms: Vec<[usize; 3]> = vec![
                [0, 1, 2],
                [0, 2, 1],
                [1, 0, 2],
                [1, 2, 0],
                [2, 0, 1],
                [2, 1, 0],
            ];
            let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
            let t = perms
                .iter()
                .map(|a| {
                    perms
                        .iter()
                        .map(|b| index([a[b[0]], a[b[1]], a[b[2]]]))
                        .collect()
                })
                .collect();
            Ok(("S3".into(), t))
        }
        GroupPreset::D4 => {
            let t = (0..8)
                .map(|x| {
                    (0..8)
                        .map(|y| {
                            let (a, e) = (x % 4, x / 4);
                            let (b, f) = (y % 4, y / 4);
                            let k = if e == 0 { a + b } else { a + 4 - b };
                            k % 4 + 4 * ((e + f) % 2)
                        })
                        .collect()
                })
                .collect();
            Ok(("D4".into(), t))
        }
    }
}

impl GroupTable {
    pub fn build(descriptor: &GroupDescriptor, generators: &[usize]) -> Result<Self> {
        let (name, table) = match descriptor {
            GroupDescriptor::Preset(p) => preset_table(p)?,
            GroupDescriptor::Table(t) => ("explicit".to_string(), t.clone()),
        };
        GroupTable::from_table(name, table, generators)
    }

    pub fn cyclic(n: usize, generators: &[usize]) -> Result<Self> {
        GroupTable::build(&GroupDescriptor::Preset(GroupPreset::Cyclic(n)), generators)
    }

    pub fn s3(generators: &[usize]) -> Result<Self> {
        GroupTable::build(&GroupDescriptor::Preset(GroupPreset::S3), generators)
    }

    pub fn d4(generators: &[usize]) -> Result<Self> {
        GroupTable::build(&GroupDescriptor::Preset(GroupPreset::D4), generators)
    }

    pub fn from_table(name: String, table: Vec<Vec<usize>>, generators: &[usize]) -> Result<Self> {
        let n = table.len();
        let bad = |m: String| Err(GadgetError::InvalidGroup(m));
        if n == 0 {
            return bad("empty table".into());
        }
        if n > u8::MAX as usize {
            return bad(format!("order {n} exceeds the supported maximum of 255"));
        }
        if table
            .iter()
            .any(|row| row.len() != n || row.iter().any(|&v| v >= n))
        {
            return bad("table must be square with entries below the order".into());
        }
        let mult: Vec<usize> = table.into_iter().flatten().collect();
        let m = |a: usize, b: usize| mult[a * n + b];
        if (0..n).any(|a| m(0, a) != a || m(a, 0) != a) {
            return bad("element 0 is not the identity".into());
        }
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            match (0..n).find(|&b| m(a, b) == 0 && m(b, a) == 0) {
                Some(b) => inverse.push(b),
                None => return bad(format!("element {a} has no inverse")),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        return bad(format!("not associative at ({a},{b},{c})"));
                    }
                }
            }
        }
        let g = GroupTable {
            name,
            order: n,
            mult,
            inverse,
            generators: generators.to_vec(),
        };
        g.check_generators()?;
        Ok(g)
    }

    fn check_generators(&self) -> Result<()> {
        let gens = &self.generators;
        let mut seen = BTreeSet::new();
        for &g in gens {
            if g >= self.order {
                return Err(GadgetError::InvalidGroup(format!(
                    "generator {g} out of range"
                )));
            }
            if g == 0 {
                return Err(GadgetError::InvalidGroup(
                    "the identity may not be a generator".into(),
                ));
            }
            if !seen.insert(g) {
                return Err(GadgetError::InvalidGroup(format!("generator {g} repeated")));
            }
        }
        if self.closure(gens).len() != self.order {
            return Err(GadgetError::InvalidGroup(format!(
                "generators {gens:?} do not generate the group"
            )));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::from([0]);
        let mut frontier = vec![0];
        while let Some(a) = frontier.pop() {
            for &g in gens {
                let b = self.mul(g, a);
                if set.insert(b) {
                    frontier.push(b);
                }
            }
        }
        set
    }

    fn check(&self, g: usize) -> Result<()> {
        if g >= self.order {
            return Err(GadgetError::IndexOutOfRange {
                kind: "group element",
                index: g,
                limit: self.order,
            });
        }
        Ok(())
    }

    /// `L₊^g |z⟩ = |g z⟩`.
    pub fn l_plus(&self, g: usize) -> Result<LocalOp> {
        self.check(g)?;
        let perm: Vec<usize> = (0..self.order).map(|z| self.mul(g, z)).collect();
        Ok(LocalOp::permutation(&perm))
    }

    /// `L₋^g |z⟩ = |z g⁻¹⟩`.
    pub fn l_minus(&self, g: usize) -> Result<LocalOp> {
        self.check(g)?;
        let gi = self.inv(g);
        let perm: Vec<usize> = (0..self.order).map(|z| self.mul(z, gi)).collect();
        Ok(LocalOp::permutation(&perm))
    }

    /// `T₊^h |z⟩ = δ_{h,z} |z⟩`.
    pub fn t_plus(&self, h: usize) -> Result<LocalOp> {
        self.check(h)?;
        Ok(LocalOp::projector(self.order, h))
    }

    /// `T₋^h |z⟩ = δ_{h⁻¹,z} |z⟩`.
    pub fn t_minus(&self, h: usize) -> Result<LocalOp> {
        self.check(h)?;
        Ok(LocalOp::projector(self.order, self.inv(h)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2() {
        let g = GroupTable::cyclic(2, &[1]).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.inv(1), 1);
        assert_eq!(g.l_plus(1).unwrap().apply(0), Some((1, 1.0)));
    }

    #[test]
    fn s3_is_nonabelian() {
        let g = GroupTable::s3(&[1, 3]).unwrap();
        assert!(!g.is_abelian());
        // the 3-cycle 120 has order 3
        assert_eq!(g.mul(3, g.mul(3, 3)), 0);
    }

    #[test]
    fn d4_relations() {
        let g = GroupTable::d4(&[1, 4]).unwrap();
        let (r, s) = (1, 4);
        assert_eq!(g.mul(s, g.mul(r, s)), g.inv(r));
        assert!(!g.is_abelian());
    }

    #[test]
    fn rejects_bad_tables() {
        // Not associative: a Latin square with identity 0 on 5 elements that is not a group.
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(GroupTable::from_table("bad".into(), t, &[1]).is_err());
        assert!(GroupTable::cyclic(4, &[2]).is_err());
        assert!(GroupTable::cyclic(3, &[0]).is_err());
        assert!(GroupTable::s3(&[1, 1]).is_err());
    }
}
