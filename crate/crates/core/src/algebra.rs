//! Exact operator identities of a built model: stabilizer commutation, hop-cycle powers,
//! the star product and gadget-number conservation. Every check is integer or bitmask
//! arithmetic; nothing here has a tolerance.

use serde::{Deserialize, Serialize};

use crate::double::check_four_cycle;
use crate::error::{GadgetError, Result};
use crate::model::{LabelStep, TermSet, Variant};
use crate::op::Key;
use crate::pauli::PauliOperator;
use crate::subspace::pauli_to_op;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    /// Pairs among stars, plaquettes and edges.
    pub stabilizer_pairs: usize,
    pub noncommuting_pairs: usize,
    /// Pairs of a scheduled two-qubit flip with a plaquette.
    pub schedule_pairs: usize,
    pub schedule_violations: usize,
    /// `(D_s†)^{n/2} = A_s` for `n` the label-cycle length, from every point of the cycle.
    pub half_cycle_checks: usize,
    pub half_cycle_failures: usize,
    /// `(D_s†)^n = 1`.
    pub full_cycle_failures: usize,
    /// `∏_s A_s = 1`; `None` without a torus.
    pub star_product_identity: Option<bool>,
    /// Terms that change some star's particle number; `None` when the model has one
    /// gadget site per star.
    pub number_violations: Option<usize>,
}

impl AlgebraReport {
    pub fn passed(&self) -> bool {
        self.noncommuting_pairs == 0
            && self.schedule_violations == 0
            && self.half_cycle_failures == 0
            && self.full_cycle_failures == 0
            && self.star_product_identity != Some(false)
            && self.number_violations.is_none_or(|n| n == 0)
    }
}

fn count_noncommuting<'a, I>(pairs: I) -> Result<(usize, usize)>
where
    I: Iterator<Item = (&'a PauliOperator, &'a PauliOperator)>,
{
    let mut n = 0;
    let mut bad = 0;
    for (a, b) in pairs {
        n += 1;
        bad += !a.commutes(b)? as usize;
    }
    Ok((n, bad))
}

/// The image of `key` under the unique forward move of star `s` that acts on it.
fn forward_once(ts: &TermSet, s: usize, key: Key) -> Option<Key> {
    let mut hits = ts
        .moves
        .iter()
        .filter(|m| m.star == s && m.step == LabelStep::Forward)
        .filter_map(|m| m.op.apply(&ts.layout, key));
    match (hits.next(), hits.next()) {
        (Some((k, _)), None) => Some(k),
        _ => None,
    }
}

fn forward_power(ts: &TermSet, s: usize, key: Key, n: usize) -> Option<Key> {
    (0..n).try_fold(key, |k, _| forward_once(ts, s, k))
}

/// A fixed scrambled qubit configuration, so flips are checked away from `|0…0⟩`.
fn generic_reference(ts: &TermSet) -> Key {
    let layout = &ts.layout;
    (0..layout.n_qudit()).fold(ts.rest, |key, q| {
        let site = layout.qudit(q);
        layout.set(
            key,
            site,
            ((q * 7 + 3) % 5 % layout.dim(site) as usize) as u8,
        )
    })
}

/// Walks the whole hop cycle of every star and checks both powers at each point.
fn cycle_checks(ts: &TermSet, stars: &[PauliOperator]) -> Result<(usize, usize, usize)> {
    let n = ts.labels.radix() as usize;
    let start = generic_reference(ts);
    let (mut checks, mut half_bad, mut full_bad) = (0, 0, 0);
    for (s, a) in stars.iter().enumerate() {
        let a = pauli_to_op(&ts.layout, a)?;
        let mut key = start;
        for _ in 0..n / 2 {
            checks += 1;
            let want = a.apply(&ts.layout, key).map(|(k, _)| k);
            half_bad += (forward_power(ts, s, key, n / 2) != want) as usize;
            full_bad += (forward_power(ts, s, key, n) != Some(key)) as usize;
            key = forward_once(ts, s, key).ok_or_else(|| {
                GadgetError::Validation(format!("hop cycle of star {s} is not a single chain"))
            })?;
        }
    }
    Ok((checks, half_bad, full_bad))
}

/// Number of corners of each star with a particle.
fn occupations(ts: &TermSet, key: Key) -> Vec<usize> {
    ts.gadget_sites
        .iter()
        .map(|sites| {
            sites
                .iter()
                .filter(|&&c| ts.layout.get(key, c) != 0)
                .count()
        })
        .collect()
}

/// Counts terms that change some `n_s`, over every assignment of each term's support.
pub fn number_violations(ts: &TermSet) -> usize {
    let layout = &ts.layout;
    ts.terms
        .iter()
        .filter(|term| {
            let sites = term.op.support();
            let dims: Vec<usize> = sites.iter().map(|&s| layout.dim(s) as usize).collect();
            let total: usize = dims.iter().product();
            (0..total).any(|mut idx| {
                let mut key = ts.rest;
                for (&s, &d) in sites.iter().zip(&dims) {
                    key = layout.set(key, s, (idx % d) as u8);
                    idx /= d;
                }
                term.op
                    .apply(layout, key)
                    .is_some_and(|(k2, _)| occupations(ts, k2) != occupations(ts, key))
            })
        })
        .count()
}

pub fn algebra_suite(ts: &TermSet) -> Result<AlgebraReport> {
    if let Variant::QuantumDouble { .. } = ts.variant {
        let ok = check_four_cycle(ts)?;
        return Ok(AlgebraReport {
            stabilizer_pairs: 0,
            noncommuting_pairs: 0,
            schedule_pairs: 0,
            schedule_violations: 0,
            half_cycle_checks: ts.n_stars,
            half_cycle_failures: (!ok) as usize,
            full_cycle_failures: 0,
            star_product_identity: None,
            number_violations: None,
        });
    }
    let p = ts
        .pauli
        .as_ref()
        .ok_or_else(|| GadgetError::Validation("model has no Pauli stabilizers".into()))?;
    let all: Vec<&PauliOperator> = p
        .stars
        .iter()
        .chain(&p.plaquettes)
        .chain(&p.edges)
        .collect();
    let (stabilizer_pairs, noncommuting_pairs) = count_noncommuting(
        all.iter()
            .enumerate()
            .flat_map(|(i, a)| all[i + 1..].iter().map(move |b| (*a, *b))),
    )?;
    let (schedule_pairs, schedule_violations) = count_noncommuting(
        p.schedule
            .iter()
            .flatten()
            .flat_map(|a| p.plaquettes.iter().map(move |b| (a, b))),
    )?;
    let (half_cycle_checks, half_cycle_failures, full_cycle_failures) = cycle_checks(ts, &p.stars)?;
    let star_product_identity = match ts.torus() {
        Some(_) => {
            let n = p.stars[0].n_sites();
            Some(PauliOperator::product(n, p.stars.iter())?.is_identity())
        }
        None => None,
    };
    let number_violations = ts
        .gadget_sites
        .iter()
        .any(|g| g.len() > 1)
        .then(|| number_violations(ts));
    Ok(AlgebraReport {
        stabilizer_pairs,
        noncommuting_pairs,
        schedule_pairs,
        schedule_violations,
        half_cycle_checks,
        half_cycle_failures,
        full_cycle_failures,
        star_product_identity,
        number_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TorusLattice;
    use crate::model::{build_toric, Couplings, SquareGeometry};

    #[test]
    fn toric_two_by_two() {
        let g = SquareGeometry::torus(&TorusLattice::square(2, 2).unwrap());
        let ts = build_toric(&g, Couplings::default(), &Default::default()).unwrap();
        let r = algebra_suite(&ts).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.half_cycle_checks, 16);
        assert_eq!(r.stabilizer_pairs, (4 + 4 + 8) * 15 / 2);
    }

    #[test]
    fn broken_hop_is_detected() {
        let g = SquareGeometry::one_star();
        let mut ts = build_toric(&g, Couplings::default(), &Default::default()).unwrap();
        let i = ts
            .moves
            .iter()
            .position(|m| m.step == LabelStep::Forward)
            .unwrap();
        ts.moves.remove(i);
        assert!(algebra_suite(&ts).is_err());
    }
}
