//! Configuration keys and the monomial operators every Hamiltonian term is built from.
//!
//! A basis configuration is a digit per site (gadget sites first, then qubit or qudit
//! sites) packed into a `u128`. Every term used by the models maps a configuration to
//! at most one configuration, so a term is stored as a monomial: a permutation-like
//! action with a real amplitude.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GadgetError, Result};

pub type Key = u128;

/// Real monomial on one site: `map[v] = Some((w, a))` sends `|v⟩` to `a|w⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalOp(pub Vec<Option<(u8, f64)>>);

impl LocalOp {
    pub fn identity(dim: usize) -> Self {
        LocalOp((0..dim).map(|v| Some((v as u8, 1.0))).collect())
    }

    pub fn permutation(perm: &[usize]) -> Self {
        LocalOp(perm.iter().map(|&w| Some((w as u8, 1.0))).collect())
    }

    pub fn diagonal(values: &[f64]) -> Self {
        LocalOp(
            values
                .iter()
                .enumerate()
                .map(|(v, &a)| (a != 0.0).then_some((v as u8, a)))
                .collect(),
        )
    }

    /// `|to⟩⟨from|`.
    pub fn transition(dim: usize, from: usize, to: usize) -> Self {
        let mut m = vec![None; dim];
        m[from] = Some((to as u8, 1.0));
        LocalOp(m)
    }

    pub fn projector(dim: usize, onto: usize) -> Self {
        LocalOp::transition(dim, onto, onto)
    }

    pub fn pauli_x() -> Self {
        LocalOp::permutation(&[1, 0])
    }

    pub fn pauli_z() -> Self {
        LocalOp::diagonal(&[1.0, -1.0])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, v: u8) -> Option<(u8, f64)> {
        self.0.get(v as usize).copied().flatten()
    }

    pub fn is_diagonal(&self) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(v, e)| e.is_none_or(|(w, _)| w as usize == v))
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &LocalOp) -> LocalOp {
        LocalOp(
            other
                .0
                .iter()
                .map(|e| e.and_then(|(w, a)| self.apply(w).map(|(u, b)| (u, a * b))))
                .collect(),
        )
    }

    pub fn adjoint(&self) -> LocalOp {
        let mut m = vec![None; self.dim()];
        for (v, e) in self.0.iter().enumerate() {
            if let Some((w, a)) = *e {
                m[w as usize] = Some((v as u8, a));
            }
        }
        LocalOp(m)
    }

    /// Dense matrix with `M[w, v] = a` for every `v ↦ a|w⟩`.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (v, e) in self.0.iter().enumerate() {
            if let Some((w, a)) = *e {
                m[(w as usize, v)] += a;
            }
        }
        m
    }
}

/// Digit positions of every site inside a packed key.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteLayout {
    dims: Vec<u8>,
    offsets: Vec<u8>,
    widths: Vec<u8>,
    n_gadget: usize,
}

impl SiteLayout {
    pub fn new(gadget_dims: &[u8], qudit_dims: &[u8]) -> Result<Self> {
        let dims: Vec<u8> = gadget_dims.iter().chain(qudit_dims).copied().collect();
        let widths: Vec<u8> = dims
            .iter()
            .map(|&d| (u8::BITS - d.saturating_sub(1).leading_zeros()).max(1) as u8)
            .collect();
        let bits: u32 = widths.iter().map(|&w| w as u32).sum();
        if bits > 128 {
            return Err(GadgetError::LayoutTooWide { bits });
        }
        let offsets = widths
            .iter()
            .scan(0u8, |acc, &w| {
                let o = *acc;
                *acc += w;
                Some(o)
            })
            .collect();
        Ok(SiteLayout {
            dims,
            offsets,
            widths,
            n_gadget: gadget_dims.len(),
        })
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn n_gadget(&self) -> usize {
        self.n_gadget
    }

    pub fn n_qudit(&self) -> usize {
        self.dims.len() - self.n_gadget
    }

    /// Global site index of qubit/qudit `q`.
    pub fn qudit(&self, q: usize) -> usize {
        self.n_gadget + q
    }

    pub fn dim(&self, site: usize) -> u8 {
        self.dims[site]
    }

    pub fn dims(&self) -> &[u8] {
        &self.dims
    }

    #[inline]
    pub fn get(&self, key: Key, site: usize) -> u8 {
        let mask = (1u128 << self.widths[site]) - 1;
        ((key >> self.offsets[site]) & mask) as u8
    }

    #[inline]
    pub fn set(&self, key: Key, site: usize, v: u8) -> Key {
        let mask = ((1u128 << self.widths[site]) - 1) << self.offsets[site];
        (key & !mask) | ((v as u128) << self.offsets[site])
    }

    pub fn encode(&self, digits: &[u8]) -> Result<Key> {
        if digits.len() != self.n_sites() {
            return Err(GadgetError::SiteCountMismatch {
                left: self.n_sites(),
                right: digits.len(),
            });
        }
        digits.iter().enumerate().try_fold(0u128, |k, (s, &v)| {
            if v >= self.dims[s] {
                return Err(GadgetError::IndexOutOfRange {
                    kind: "digit",
                    index: v as usize,
                    limit: self.dims[s] as usize,
                });
            }
            Ok(self.set(k, s, v))
        })
    }

    pub fn decode(&self, key: Key) -> Vec<u8> {
        (0..self.n_sites()).map(|s| self.get(key, s)).collect()
    }

    /// Qudit digits only.
    pub fn qudits(&self, key: Key) -> Vec<u8> {
        (self.n_gadget..self.n_sites())
            .map(|s| self.get(key, s))
            .collect()
    }

    pub fn gadgets(&self, key: Key) -> Vec<u8> {
        (0..self.n_gadget).map(|s| self.get(key, s)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteMap {
    pub site: usize,
    pub op: LocalOp,
}

impl SiteMap {
    pub fn new(site: usize, op: LocalOp) -> Self {
        SiteMap { site, op }
    }
}

/// A monomial operator on packed configurations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Op {
    /// Tensor product of single-site monomials.
    Product(Vec<SiteMap>),
    /// `Σ_v |v⟩⟨v|_control ⊗ branches[v]`.
    Controlled {
        control: usize,
        branches: Vec<Vec<SiteMap>>,
    },
    /// Diagonal function of several sites; `table` is indexed with the first site fastest.
    Diagonal {
        sites: Vec<usize>,
        dims: Vec<u8>,
        table: Vec<f64>,
    },
}

fn apply_product(maps: &[SiteMap], layout: &SiteLayout, key: Key) -> Option<(Key, f64)> {
    let mut k = key;
    let mut amp = 1.0;
    for m in maps {
        let (w, a) = m.op.apply(layout.get(k, m.site))?;
        k = layout.set(k, m.site, w);
        amp *= a;
    }
    Some((k, amp))
}

impl Op {
    pub fn diagonal_from_fn<F>(sites: Vec<usize>, layout: &SiteLayout, f: F) -> Op
    where
        F: Fn(&[u8]) -> f64,
    {
        let dims: Vec<u8> = sites.iter().map(|&s| layout.dim(s)).collect();
        let size: usize = dims.iter().map(|&d| d as usize).product();
        let mut digits = vec![0u8; sites.len()];
        let table = (0..size)
            .map(|mut idx| {
                for (d, &dim) in digits.iter_mut().zip(&dims) {
                    *d = (idx % dim as usize) as u8;
                    idx /= dim as usize;
                }
                f(&digits)
            })
            .collect();
        Op::Diagonal { sites, dims, table }
    }

    #[inline]
    pub fn apply(&self, layout: &SiteLayout, key: Key) -> Option<(Key, f64)> {
        match self {
            Op::Product(maps) => apply_product(maps, layout, key),
            Op::Controlled { control, branches } => {
                let v = layout.get(key, *control) as usize;
                apply_product(branches.get(v)?, layout, key)
            }
            Op::Diagonal { sites, dims, table } => {
                let mut idx = 0usize;
                let mut stride = 1usize;
                for (&s, &d) in sites.iter().zip(dims) {
                    idx += layout.get(key, s) as usize * stride;
                    stride *= d as usize;
                }
                let a = table[idx];
                (a != 0.0).then_some((key, a))
            }
        }
    }

    pub fn is_diagonal(&self) -> bool {
        match self {
            Op::Product(maps) => maps.iter().all(|m| m.op.is_diagonal()),
            Op::Controlled { branches, .. } => branches
                .iter()
                .all(|b| b.iter().all(|m| m.op.is_diagonal())),
            Op::Diagonal { .. } => true,
        }
    }

    /// Sites the operator reads or writes.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = match self {
            Op::Product(maps) => maps.iter().map(|m| m.site).collect(),
            Op::Controlled { control, branches } => std::iter::once(*control)
                .chain(branches.iter().flatten().map(|m| m.site))
                .collect(),
            Op::Diagonal { sites, .. } => sites.clone(),
        };
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Adjoint of a product monomial.
    pub fn adjoint(&self) -> Result<Op> {
        match self {
            Op::Product(maps) => Ok(Op::Product(
                maps.iter()
                    .rev()
                    .map(|m| SiteMap::new(m.site, m.op.adjoint()))
                    .collect(),
            )),
            Op::Diagonal { .. } => Ok(self.clone()),
            Op::Controlled { control, branches } => Ok(Op::Controlled {
                control: *control,
                branches: branches
                    .iter()
                    .map(|b| {
                        b.iter()
                            .rev()
                            .map(|m| SiteMap::new(m.site, m.op.adjoint()))
                            .collect()
                    })
                    .collect(),
            }),
        }
    }

    /// Applies to a sparse vector.
    pub fn apply_vec(&self, layout: &SiteLayout, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&k, &a) in v {
            if let Some((k2, b)) = self.apply(layout, k) {
                *out.entry(k2).or_insert(0.0) += a * b;
            }
        }
        out
    }
}

/// Sparse state over packed configurations; ordered so reductions are deterministic.
pub type SparseVec = BTreeMap<Key, f64>;

pub fn sparse_norm(v: &SparseVec) -> f64 {
    v.values().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn sparse_dot(a: &SparseVec, b: &SparseVec) -> f64 {
    a.iter().filter_map(|(k, x)| b.get(k).map(|y| x * y)).sum()
}

/// `a + c·b`.
pub fn sparse_axpy(a: &mut SparseVec, c: f64, b: &SparseVec) {
    for (&k, &y) in b {
        *a.entry(k).or_insert(0.0) += c * y;
    }
}

pub fn sparse_scale(v: &mut SparseVec, c: f64) {
    v.values_mut().for_each(|a| *a *= c);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_round_trip() {
        let l = SiteLayout::new(&[4, 4, 3], &[2, 2, 6]).unwrap();
        let digits = vec![3, 1, 2, 1, 0, 5];
        let k = l.encode(&digits).unwrap();
        assert_eq!(l.decode(k), digits);
        assert_eq!(l.get(l.set(k, 5, 2), 5), 2);
        assert_eq!(l.qudits(k), vec![1, 0, 5]);
    }

    #[test]
    fn layout_too_wide() {
        assert!(SiteLayout::new(&[], &[2; 129]).is_err());
        assert!(SiteLayout::new(&[], &[2; 128]).is_ok());
    }

    #[test]
    fn compose_and_adjoint() {
        let up = LocalOp::transition(4, 0, 1);
        let down = up.adjoint();
        let p0 = down.compose(&up);
        assert_eq!(p0, LocalOp::projector(4, 0));
        let x = LocalOp::pauli_x();
        let z = LocalOp::pauli_z();
        // XZ|1> = -|0>
        assert_eq!(x.compose(&z).apply(1), Some((0, -1.0)));
    }

    #[test]
    fn diagonal_table() {
        let l = SiteLayout::new(&[4, 4], &[]).unwrap();
        let op = Op::diagonal_from_fn(vec![0, 1], &l, |d| (d[0] * 10 + d[1]) as f64);
        let k = l.encode(&[2, 3]).unwrap();
        assert_eq!(op.apply(&l, k), Some((k, 23.0)));
        assert_eq!(op.apply(&l, 0), None);
    }
}
