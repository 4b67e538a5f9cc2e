//! Finite-group quantum-double gadget model on square geometries.
//!
//! Gadget digit `m + 4·gi` holds the hop counter `m` and the generator index `gi`.

use serde::{Deserialize, Serialize};

use super::square::SquareGeometry;
use super::toric::push_stabilizer_terms;
use super::{
    validate_moves_commute_with_plaquettes, Coupling, Couplings, GroupOps, LabelSpace, LabelStep,
    Move, Orientation, ShieldPair, Term, TermKind, TermSet, Variant, TERMSET_SCHEMA,
};
use crate::error::{GadgetError, Result};
use crate::group::GroupTable;
use crate::op::{LocalOp, Op, SiteLayout, SiteMap};

use super::toric::{t_down, t_left, t_right, t_up, TdProfile};

/// Whether each slot of `A_s(m)` belongs to an edge leaving the star (`L₊`) or entering it
/// (`L₋`).
const LEAVING: [[bool; 2]; 4] = [[false, true], [true, true], [true, false], [false, false]];

fn a_maps(
    geom: &SquareGeometry,
    layout: &SiteLayout,
    group: &GroupTable,
    s: usize,
    g: usize,
    m: usize,
) -> Result<Vec<SiteMap>> {
    let pair = geom.schedule_slots(s)[m];
    pair.iter()
        .zip(LEAVING[m])
        .map(|(&q, leaving)| {
            let op = if leaving {
                group.l_plus(g)?
            } else {
                group.l_minus(g)?
            };
            Ok(SiteMap::new(layout.qudit(q), op))
        })
        .collect()
}

fn adjoint_maps(maps: &[SiteMap]) -> Vec<SiteMap> {
    maps.iter()
        .rev()
        .map(|m| SiteMap::new(m.site, m.op.adjoint()))
        .collect()
}

/// How the shield compares the generators `g, g′` of the two stars of an edge in the
/// configurations where both stars have flipped one slot of it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoubleShield {
    /// `g = g′` on horizontal edges and `g·g′ = e` on vertical ones. The two stars of a
    /// vertical edge flip different slots with opposite `L` species.
    #[default]
    Derived,
    /// `g = g′` on both orientations.
    Literal,
}

pub fn build_quantum_double(
    geom: &SquareGeometry,
    group: &GroupTable,
    couplings: Couplings,
) -> Result<TermSet> {
    build_quantum_double_with(geom, group, couplings, DoubleShield::Derived)
}

pub fn build_quantum_double_with(
    geom: &SquareGeometry,
    group: &GroupTable,
    couplings: Couplings,
    shield_rule: DoubleShield,
) -> Result<TermSet> {
    couplings.validate(false)?;
    let n_gen = group.generators().len();
    let gdim = 4 * n_gen;
    if gdim > u8::MAX as usize || group.order() > u8::MAX as usize {
        return Err(GadgetError::InvalidGroup(
            "gadget dimension exceeds 255".into(),
        ));
    }
    let order = group.order() as u8;
    let layout = SiteLayout::new(&vec![gdim as u8; geom.n_stars], &vec![order; geom.n_slots])?;
    let holonomy = |z: &[u8]| {
        let (b, r, t, l) = (z[0] as usize, z[1] as usize, z[2] as usize, z[3] as usize);
        let h = group.mul(group.mul(b, r), group.mul(group.inv(t), group.inv(l)));
        (h == 0) as u8 as f64
    };
    let plaquette_ops: Vec<Op> = geom
        .plaquettes
        .iter()
        .map(|p| {
            let sites = p.iter().map(|&q| layout.qudit(q)).collect();
            Op::diagonal_from_fn(sites, &layout, holonomy)
        })
        .collect();
    let edge_ops: Vec<Op> = geom
        .edges
        .iter()
        .map(|e| {
            let sites = e.slots.iter().map(|&q| layout.qudit(q)).collect();
            Op::diagonal_from_fn(sites, &layout, |z| (z[0] == z[1]) as u8 as f64)
        })
        .collect();

    let mut terms = Vec::new();
    let edge_terms = push_stabilizer_terms(&mut terms, plaquette_ops.clone(), edge_ops.clone());
    let mut moves = Vec::new();
    let mut schedule = Vec::with_capacity(geom.n_stars);
    let mut star_ops = Vec::with_capacity(geom.n_stars);
    let mut connector = Vec::with_capacity(geom.n_stars);
    let at_rest: Vec<f64> = (0..gdim).map(|d| (d % 4 == 0) as u8 as f64).collect();

    for s in 0..geom.n_stars {
        terms.push(Term {
            kind: TermKind::Onsite,
            coupling: Coupling::U,
            factor: -1.0,
            star: Some(s),
            op: Op::Product(vec![SiteMap::new(s, LocalOp::diagonal(&at_rest))]),
        });
        let mut per_gen = Vec::with_capacity(n_gen);
        let mut branches = vec![Vec::new(); gdim];
        for (gi, &g) in group.generators().iter().enumerate() {
            let mut sched = Vec::with_capacity(4);
            let mut prefix: Vec<SiteMap> = Vec::new();
            for m in 0..4 {
                branches[m + 4 * gi] = prefix.clone();
                let maps = a_maps(geom, &layout, group, s, g, m)?;
                prefix.extend(adjoint_maps(&maps));
                let mut hop = vec![SiteMap::new(
                    s,
                    LocalOp::transition(gdim, m + 4 * gi, (m + 1) % 4 + 4 * gi),
                )];
                hop.extend(maps.iter().cloned());
                let fwd = Op::Product(hop);
                for op in [fwd.adjoint()?, fwd.clone()] {
                    terms.push(Term {
                        kind: TermKind::Hop,
                        coupling: Coupling::T,
                        factor: -1.0,
                        star: Some(s),
                        op,
                    });
                }
                moves.push(Move {
                    star: s,
                    step: LabelStep::Forward,
                    op: fwd,
                });
                sched.push(Op::Product(maps));
            }
            per_gen.push(sched);
            for gj in 0..n_gen {
                let op = Op::Product(vec![SiteMap::new(
                    s,
                    LocalOp::transition(gdim, 4 * gj, 4 * gi),
                )]);
                terms.push(Term {
                    kind: TermKind::Mixing,
                    coupling: Coupling::T,
                    factor: -1.0,
                    star: Some(s),
                    op: op.clone(),
                });
                if gi != gj {
                    moves.push(Move {
                        star: s,
                        step: LabelStep::Switch { to: gi as u16 },
                        op,
                    });
                }
            }
        }
        schedule.push(per_gen);
        star_ops.push(
            (0..group.order())
                .map(|g| {
                    let maps = (0..4)
                        .map(|m| a_maps(geom, &layout, group, s, g, m))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Op::Product(maps.concat()))
                })
                .collect::<Result<Vec<_>>>()?,
        );
        connector.push(Op::Controlled {
            control: s,
            branches,
        });
    }

    let shield = geom
        .edges
        .iter()
        .zip(edge_terms)
        .map(|(e, edge_term)| {
            let horizontal = e.orientation == Orientation::Horizontal;
            let op = Op::diagonal_from_fn(vec![e.tail, e.head], &layout, |d| {
                let (m, m2) = (d[0] % 4, d[1] % 4);
                let (a, b) = if horizontal {
                    (t_left(m), t_right(m2))
                } else {
                    (t_down(m, TdProfile::Derived), t_up(m2))
                };
                let gens = group.generators();
                let (g, g2) = (gens[d[0] as usize / 4], gens[d[1] as usize / 4]);
                let matched = match (horizontal, shield_rule) {
                    (false, DoubleShield::Derived) => group.mul(g, g2) == 0,
                    _ => g == g2,
                };
                let same = matched as u8 as f64;
                (1.0 + a) * (1.0 + b) + same * (1.0 - a) * (1.0 - b)
            });
            terms.push(Term {
                kind: TermKind::Shield,
                coupling: Coupling::J,
                factor: 0.25,
                star: None,
                op,
            });
            ShieldPair {
                edge: e.id,
                tail: e.tail,
                head: e.head,
                orientation: e.orientation,
                term: terms.len() - 1,
                edge_term,
            }
        })
        .collect();

    let ts = TermSet {
        schema_version: TERMSET_SCHEMA,
        variant: Variant::QuantumDouble {
            group: group.clone(),
        },
        geometry: geom.geometry.clone(),
        couplings,
        layout,
        n_stars: geom.n_stars,
        gadget_sites: (0..geom.n_stars).map(|s| vec![s]).collect(),
        labels: LabelSpace::Double {
            group: group.clone(),
        },
        terms,
        moves,
        shield,
        pauli: None,
        group_ops: Some(GroupOps {
            stars: star_ops,
            plaquettes: plaquette_ops,
            edges: edge_ops,
            schedule,
        }),
        connector,
        rest: 0,
    };
    validate_group_ops(&ts, group)?;
    validate_moves_commute_with_plaquettes(&ts)?;
    Ok(ts)
}

/// `A^g_s A^h_s = A^{gh}_s` and every `A^g_s` preserves every plaquette projector.
fn validate_group_ops(ts: &TermSet, group: &GroupTable) -> Result<()> {
    let ops = ts.group_ops.as_ref().expect("quantum double has group ops");
    let layout = &ts.layout;
    for (s, stars) in ops.stars.iter().enumerate() {
        for g in 0..group.order() {
            for h in 0..group.order() {
                let gh = group.mul(g, h);
                let mut key = 0;
                for q in 0..layout.n_qudit() {
                    key = layout.set(key, layout.qudit(q), (q % group.order()) as u8);
                }
                let two = stars[h]
                    .apply(layout, key)
                    .and_then(|(k, _)| stars[g].apply(layout, k));
                if two != stars[gh].apply(layout, key) {
                    return Err(GadgetError::Validation(format!(
                        "star {s}: A^{g} A^{h} differs from A^{gh}"
                    )));
                }
            }
            for p in &ops.plaquettes {
                if !super::commute_on_support(layout, &stars[g], p, &p.support()) {
                    return Err(GadgetError::Validation(format!(
                        "A^{g}_{s} does not preserve a plaquette projector"
                    )));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TorusLattice;

    #[test]
    fn z2_schedule_is_pauli_x() {
        let g = GroupTable::cyclic(2, &[1]).unwrap();
        let geom = SquareGeometry::one_star();
        let ts = build_quantum_double(&geom, &g, Couplings::default()).unwrap();
        let ops = ts.group_ops.unwrap();
        for op in &ops.schedule[0][0] {
            match op {
                Op::Product(maps) => {
                    assert!(maps.iter().all(|m| m.op == LocalOp::pauli_x()));
                }
                _ => panic!("schedule entries are products"),
            }
        }
    }

    #[test]
    fn plaquette_rank() {
        for (g, want) in [
            (GroupTable::cyclic(2, &[1]).unwrap(), 8usize),
            (GroupTable::s3(&[1, 3]).unwrap(), 216),
        ] {
            let geom = SquareGeometry::torus(&TorusLattice::square(2, 2).unwrap());
            let ts = build_quantum_double(&geom, &g, Couplings::default()).unwrap();
            let p = &ts.group_ops.unwrap().plaquettes[0];
            match p {
                Op::Diagonal { table, .. } => {
                    assert_eq!(table.iter().filter(|&&v| v == 1.0).count(), want);
                }
                _ => panic!("plaquette is diagonal"),
            }
        }
    }

    #[test]
    fn s3_gadget_dimension() {
        let g = GroupTable::s3(&[1, 3]).unwrap();
        let ts =
            build_quantum_double(&SquareGeometry::one_star(), &g, Couplings::default()).unwrap();
        assert_eq!(ts.layout.dim(0), 8);
        assert_eq!(ts.labels.radix(), 48);
    }
}
