//! Exhaustive audit of the qubit cosets of a small square torus: which stabilizers each
//! non-ground subspace violates, and the lowest levels of chosen subspaces.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GadgetError, Result};
use crate::lattice::{LatticeKind, TorusLattice};
use crate::model::{build_logicals, TermSet};
use crate::spectral::{eigensolve, SolverConfig};
use crate::subspace::{assemble_restricted, enumerate_subspace, DEFAULT_BUDGET};

/// Largest qubit count for which every configuration is visited.
const MAX_AUDIT_QUBITS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetInfo {
    /// Lexicographically smallest qubit configuration of the coset, bit `q` = slot `q`.
    pub rep: u64,
    pub violated_edges: Vec<usize>,
    pub violated_plaquettes: Vec<usize>,
    /// Stars touching at least one violated edge.
    pub disturbed_stars: Vec<usize>,
}

impl CosetInfo {
    pub fn is_ground(&self) -> bool {
        self.violated_edges.is_empty() && self.violated_plaquettes.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityAudit {
    pub lx: usize,
    pub ly: usize,
    pub n_cosets: usize,
    pub ground: Vec<u64>,
    pub with_plaquette: usize,
    pub three_or_more_stars: usize,
    /// Non-ground cosets with no violated plaquette and fewer than three disturbed stars.
    pub exceptions: Vec<CosetInfo>,
    #[serde(skip)]
    pub cosets: Vec<CosetInfo>,
}

struct Masks {
    n: usize,
    star_group: Vec<u64>,
    edges: Vec<(u64, usize, usize)>,
    plaquettes: Vec<u64>,
}

fn bits(slots: &[usize]) -> u64 {
    slots.iter().fold(0, |m, &q| m | 1 << q)
}

fn masks(l: &TorusLattice) -> Result<Masks> {
    if l.kind() != LatticeKind::Square {
        return Err(GadgetError::Unsupported(
            "the coset audit is for square tori".into(),
        ));
    }
    let n = l.n_qubits();
    if n > MAX_AUDIT_QUBITS {
        return Err(GadgetError::Unsupported(format!(
            "{n} qubits is too many to audit exhaustively (limit {MAX_AUDIT_QUBITS})"
        )));
    }
    let mut group = BTreeSet::from([0u64]);
    for s in 0..l.n_stars() {
        let a = bits(&l.star_slots(s).all());
        let next: Vec<u64> = group.iter().map(|g| g ^ a).collect();
        group.extend(next);
    }
    let edges = (0..l.n_edges())
        .map(|e| {
            let (a, b) = l.endpoints(e);
            (bits(&[2 * e, 2 * e + 1]), a, b)
        })
        .collect();
    let plaquettes = (0..l.n_plaquettes())
        .map(|p| l.plaquette_qubits(p).map(|q| bits(&q)))
        .collect::<Result<_>>()?;
    Ok(Masks {
        n,
        star_group: group.into_iter().collect(),
        edges,
        plaquettes,
    })
}

impl Masks {
    fn canonical(&self, c: u64) -> u64 {
        self.star_group
            .iter()
            .map(|g| c ^ g)
            .min()
            .expect("group has the identity")
    }

    fn info(&self, rep: u64) -> CosetInfo {
        let mut stars = BTreeSet::new();
        let mut violated_edges = Vec::new();
        for (e, &(m, a, b)) in self.edges.iter().enumerate() {
            if (rep & m).count_ones() == 1 {
                violated_edges.push(e);
                stars.extend([a, b]);
            }
        }
        let violated_plaquettes = self
            .plaquettes
            .iter()
            .enumerate()
            .filter(|(_, &m)| (rep & m).count_ones() % 2 == 1)
            .map(|(p, _)| p)
            .collect();
        CosetInfo {
            rep,
            violated_edges,
            violated_plaquettes,
            disturbed_stars: stars.into_iter().collect(),
        }
    }
}

/// Visits every qubit configuration once and classifies its star-group coset.
pub fn multiplicity_audit(l: &TorusLattice) -> Result<MultiplicityAudit> {
    let m = masks(l)?;
    let cosets: Vec<CosetInfo> = (0..1u64 << m.n)
        .into_par_iter()
        .filter(|&c| m.canonical(c) == c)
        .map(|c| m.info(c))
        .collect();
    let ground = cosets
        .iter()
        .filter(|c| c.is_ground())
        .map(|c| c.rep)
        .collect();
    let excited = || cosets.iter().filter(|c| !c.is_ground());
    let with_plaquette = excited()
        .filter(|c| !c.violated_plaquettes.is_empty())
        .count();
    let three_or_more_stars = excited().filter(|c| c.disturbed_stars.len() >= 3).count();
    let exceptions = excited()
        .filter(|c| c.violated_plaquettes.is_empty() && c.disturbed_stars.len() < 3)
        .cloned()
        .collect();
    Ok(MultiplicityAudit {
        lx: l.lx(),
        ly: l.ly(),
        n_cosets: cosets.len(),
        ground,
        with_plaquette,
        three_or_more_stars,
        exceptions,
        cosets,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetClass {
    pub rep: u64,
    /// Number of cosets in the orbit.
    pub size: usize,
}

/// Orbits of the cosets under lattice translations and the `X̄` logicals, which all
/// commute with the gadget Hamiltonian.
pub fn coset_classes(l: &TorusLattice, audit: &MultiplicityAudit) -> Result<Vec<CosetClass>> {
    let m = masks(l)?;
    let logicals = build_logicals(l, 0, 0)?;
    let xs: Vec<u64> = logicals
        .iter()
        .map(|p| {
            (0..m.n)
                .filter(|&q| p.x.x_mask().get(q))
                .fold(0, |a, q| a | 1 << q)
        })
        .collect();
    let flips = [0, xs[0], xs[1], xs[0] ^ xs[1]];
    let perms: Vec<Vec<usize>> = (0..l.lx() as isize)
        .flat_map(|dx| (0..l.ly() as isize).map(move |dy| (dx, dy)))
        .map(|(dx, dy)| {
            (0..m.n)
                .map(|q| {
                    let (edge, side) = TorusLattice::slot_edge(q);
                    let (s, axis) = (edge / 2, edge % 2);
                    TorusLattice::slot(2 * l.translate(s, dx, dy) + axis, side)
                })
                .collect()
        })
        .collect();
    let mut seen = BTreeSet::new();
    let mut classes = Vec::new();
    for c in &audit.cosets {
        if seen.contains(&c.rep) {
            continue;
        }
        let mut orbit = BTreeSet::new();
        for p in &perms {
            let moved = (0..m.n)
                .filter(|&q| c.rep >> q & 1 == 1)
                .fold(0u64, |a, q| a | 1 << p[q]);
            for f in flips {
                orbit.insert(m.canonical(moved ^ f));
            }
        }
        classes.push(CosetClass {
            rep: *orbit.first().expect("orbit contains the coset"),
            size: orbit.len(),
        });
        seen.extend(orbit);
    }
    Ok(classes)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceLevel {
    pub rep: u64,
    pub states: usize,
    pub levels: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// The `k` lowest levels of `M(d)` for each qubit configuration `d`.
pub fn lowest_levels(
    ts: &TermSet,
    reps: &[u64],
    k: usize,
    cfg: &SolverConfig,
) -> Result<Vec<SubspaceLevel>> {
    let n = ts.layout.n_qudit();
    reps.par_iter()
        .map(|&rep| {
            let digits: Vec<u8> = (0..n).map(|q| (rep >> q & 1) as u8).collect();
            let basis = enumerate_subspace(ts, ts.reference(&digits)?, DEFAULT_BUDGET)?;
            let h = assemble_restricted(ts, &basis)?;
            let spec = eigensolve(&h, k, cfg)?;
            Ok(SubspaceLevel {
                rep,
                states: basis.len(),
                levels: spec.eigenvalues,
                residuals: spec.residuals,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_coset_count() {
        let l = TorusLattice::square(2, 2).unwrap();
        let a = multiplicity_audit(&l).unwrap();
        assert_eq!(a.n_cosets, 1 << 13);
        assert_eq!(a.ground.len(), 4);
        let classes = coset_classes(&l, &a).unwrap();
        assert_eq!(classes.iter().map(|c| c.size).sum::<usize>(), a.n_cosets);
    }

    #[test]
    fn refuses_large_tori() {
        let l = TorusLattice::square(3, 3).unwrap();
        assert!(multiplicity_audit(&l).is_err());
    }
}
