//! Square-lattice toric gadget model.

use serde::{Deserialize, Serialize};

use super::square::SquareGeometry;
use super::{
    validate_moves_commute_with_plaquettes, Coupling, Couplings, LabelSpace, LabelStep,
    LogicalPair, Move, Orientation, PauliSet, ShieldPair, Term, TermKind, TermSet, Variant,
    TERMSET_SCHEMA,
};
use crate::error::{GadgetError, Result};
use crate::lattice::TorusLattice;
use crate::op::{LocalOp, Op, SiteLayout, SiteMap};
use crate::pauli::PauliOperator;

/// Which lower-star vertical shield profile to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TdProfile {
    /// `1 − 2δ_{m,1}`, the profile that cancels `C_e` on the ground subspace.
    #[default]
    Derived,
    /// `1 − 2δ_{m,3}`.
    Literal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToricOptions {
    pub td: TdProfile,
    /// Column `i₀` of `X̄₁` / `Z̄₂`.
    pub logical_col: usize,
    /// Row `j₀` of `Z̄₁` / `X̄₂`.
    pub logical_row: usize,
}

fn delta(a: u8, b: u8) -> f64 {
    (a == b) as u8 as f64
}

pub fn t_left(m: u8) -> f64 {
    1.0 - 2.0 * delta(m % 4, 2)
}

pub fn t_right(m: u8) -> f64 {
    2.0 * delta(m % 4, 0) - 1.0
}

pub fn t_down(m: u8, profile: TdProfile) -> f64 {
    match profile {
        TdProfile::Derived => 1.0 - 2.0 * delta(m % 4, 1),
        TdProfile::Literal => 1.0 - 2.0 * delta(m % 4, 3),
    }
}

pub fn t_up(m: u8) -> f64 {
    1.0 - 2.0 * delta(m % 4, 3)
}

/// `A_s`, `B_p`, `C_e`, the hop schedule and (on a torus) the logicals, validated.
pub fn build_modified_toric(geom: &SquareGeometry, opts: &ToricOptions) -> Result<PauliSet> {
    let n = geom.n_slots;
    let stars = geom
        .stars
        .iter()
        .map(|st| PauliOperator::x_on(n, &st.all()))
        .collect::<Result<Vec<_>>>()?;
    let plaquettes = geom
        .plaquettes
        .iter()
        .map(|p| PauliOperator::z_on(n, p))
        .collect::<Result<Vec<_>>>()?;
    let edges = geom
        .edges
        .iter()
        .map(|e| PauliOperator::z_on(n, &e.slots))
        .collect::<Result<Vec<_>>>()?;
    let logicals = match geom.torus_lattice() {
        Some(l) => build_logicals(l, opts.logical_col, opts.logical_row)?,
        None => vec![],
    };
    let set = PauliSet {
        stars,
        plaquettes,
        edges,
        schedule: build_hop_schedule(geom)?,
        logicals,
    };
    validate_pauli(&set, geom.torus_lattice().is_some())?;
    Ok(set)
}

pub fn build_hop_schedule(geom: &SquareGeometry) -> Result<Vec<Vec<PauliOperator>>> {
    (0..geom.n_stars)
        .map(|s| {
            geom.schedule_slots(s)
                .iter()
                .map(|pair| PauliOperator::x_on(geom.n_slots, pair))
                .collect()
        })
        .collect()
}

pub fn build_logicals(l: &TorusLattice, i0: usize, j0: usize) -> Result<Vec<LogicalPair>> {
    let n = l.n_qubits();
    let (i0, j0) = (i0 as isize, j0 as isize);
    let (lx, ly) = (l.lx() as isize, l.ly() as isize);
    let z1: Vec<usize> = (0..lx).map(|i| l.hu(i, j0)).collect();
    let x1: Vec<usize> = (0..ly).flat_map(|j| [l.hu(i0, j), l.hd(i0, j)]).collect();
    let z2: Vec<usize> = (0..ly).map(|j| l.vl(i0, j)).collect();
    let x2: Vec<usize> = (0..lx).flat_map(|i| [l.vl(i, j0), l.vr(i, j0)]).collect();
    Ok(vec![
        LogicalPair {
            x: PauliOperator::x_on(n, &x1)?,
            z: PauliOperator::z_on(n, &z1)?,
        },
        LogicalPair {
            x: PauliOperator::x_on(n, &x2)?,
            z: PauliOperator::z_on(n, &z2)?,
        },
    ])
}

fn fail(msg: String) -> Result<()> {
    Err(GadgetError::Validation(msg))
}

/// Every invariant of the stabilizer-level data.
pub(crate) fn validate_pauli(p: &PauliSet, torus: bool) -> Result<()> {
    let stabs: Vec<&PauliOperator> = p
        .stars
        .iter()
        .chain(&p.plaquettes)
        .chain(&p.edges)
        .collect();
    for (a, x) in stabs.iter().enumerate() {
        for y in &stabs[a + 1..] {
            if !x.commutes(y)? {
                return fail(format!("stabilizers {x} and {y} anticommute"));
            }
        }
    }
    for (s, sched) in p.schedule.iter().enumerate() {
        for a in sched {
            if a.weight() != 2 || !a.z_mask().is_zero() {
                return fail(format!("A_{s}(m) = {a} is not a two-site X product"));
            }
            for b in &p.plaquettes {
                if !a.commutes(b)? {
                    return fail(format!("A_{s}(m) = {a} anticommutes with {b}"));
                }
            }
        }
        let prod = PauliOperator::product(p.stars[s].n_sites(), sched)?;
        if prod != p.stars[s] {
            return fail(format!("schedule of star {s} multiplies to {prod}"));
        }
    }
    if torus {
        let n = p.stars.first().map_or(0, |a| a.n_sites());
        if !PauliOperator::product(n, &p.stars)?.is_identity() {
            return fail("product of all star operators is not the identity".into());
        }
        for (k, lp) in p.logicals.iter().enumerate() {
            for op in [&lp.x, &lp.z] {
                for st in &stabs {
                    if !op.commutes(st)? {
                        return fail(format!("logical {op} anticommutes with {st}"));
                    }
                }
            }
            for (k2, other) in p.logicals.iter().enumerate() {
                let want = k != k2;
                if lp.x.commutes(&other.z)? != want {
                    return fail(format!("logical pair {k} vs {k2} has wrong commutation"));
                }
                if !lp.x.commutes(&other.x)? || !lp.z.commutes(&other.z)? {
                    return fail(format!("logicals {k} and {k2} of one species anticommute"));
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn x_maps(layout: &SiteLayout, slots: &[usize]) -> Vec<SiteMap> {
    slots
        .iter()
        .map(|&q| SiteMap::new(layout.qudit(q), LocalOp::pauli_x()))
        .collect()
}

/// Per interior edge, the diagonal gadget-gadget factor `T(tail)·T(head)`.
pub fn build_shield(geom: &SquareGeometry, layout: &SiteLayout, td: TdProfile) -> Vec<Op> {
    geom.edges
        .iter()
        .map(|e| {
            let horizontal = e.orientation == Orientation::Horizontal;
            Op::diagonal_from_fn(vec![e.tail, e.head], layout, |d| {
                if horizontal {
                    t_left(d[0]) * t_right(d[1])
                } else {
                    t_down(d[0], td) * t_up(d[1])
                }
            })
        })
        .collect()
}

/// `U_s = Σ_m |m⟩⟨m| ⊗ ∏_{m'<m} A_s(m')`.
pub fn build_connector(geom: &SquareGeometry, layout: &SiteLayout) -> Vec<Op> {
    (0..geom.n_stars)
        .map(|s| {
            let sched = geom.schedule_slots(s);
            Op::Controlled {
                control: s,
                branches: (0..4)
                    .map(|m| x_maps(layout, sched[..m].as_flattened()))
                    .collect(),
            }
        })
        .collect()
}

pub(crate) fn push_stabilizer_terms(
    terms: &mut Vec<Term>,
    plaquettes: impl IntoIterator<Item = Op>,
    edges: impl IntoIterator<Item = Op>,
) -> Vec<usize> {
    for op in plaquettes {
        terms.push(Term {
            kind: TermKind::Plaquette,
            coupling: Coupling::J,
            factor: -1.0,
            star: None,
            op,
        });
    }
    edges
        .into_iter()
        .map(|op| {
            terms.push(Term {
                kind: TermKind::Edge,
                coupling: Coupling::J,
                factor: -1.0,
                star: None,
                op,
            });
            terms.len() - 1
        })
        .collect()
}

pub(crate) fn z_product(layout: &SiteLayout, slots: &[usize]) -> Op {
    Op::Product(
        slots
            .iter()
            .map(|&q| SiteMap::new(layout.qudit(q), LocalOp::pauli_z()))
            .collect(),
    )
}

pub fn build_toric(
    geom: &SquareGeometry,
    couplings: Couplings,
    opts: &ToricOptions,
) -> Result<TermSet> {
    couplings.validate(false)?;
    let pauli = build_modified_toric(geom, opts)?;
    let layout = SiteLayout::new(&vec![4; geom.n_stars], &vec![2; geom.n_slots])?;
    let mut terms = Vec::new();
    let edge_terms = push_stabilizer_terms(
        &mut terms,
        geom.plaquettes.iter().map(|p| z_product(&layout, p)),
        geom.edges.iter().map(|e| z_product(&layout, &e.slots)),
    );
    let mut moves = Vec::new();
    for s in 0..geom.n_stars {
        terms.push(Term {
            kind: TermKind::Onsite,
            coupling: Coupling::U,
            factor: -1.0,
            star: Some(s),
            op: Op::Product(vec![SiteMap::new(s, LocalOp::projector(4, 0))]),
        });
        for (m, pair) in geom.schedule_slots(s).iter().enumerate() {
            let mut maps = vec![SiteMap::new(s, LocalOp::transition(4, m, (m + 1) % 4))];
            maps.extend(x_maps(&layout, pair));
            let fwd = Op::Product(maps);
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
        }
    }
    let shield = build_shield(geom, &layout, opts.td)
        .into_iter()
        .zip(geom.edges.iter().zip(edge_terms))
        .map(|(op, (e, edge_term))| {
            terms.push(Term {
                kind: TermKind::Shield,
                coupling: Coupling::J,
                factor: 1.0,
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
        variant: Variant::Toric,
        geometry: geom.geometry.clone(),
        couplings,
        connector: build_connector(geom, &layout),
        gadget_sites: (0..geom.n_stars).map(|s| vec![s]).collect(),
        layout,
        n_stars: geom.n_stars,
        labels: LabelSpace::Cycle { period: 8 },
        terms,
        moves,
        shield,
        pauli: Some(pauli),
        group_ops: None,
        rest: 0,
    };
    validate_moves_commute_with_plaquettes(&ts)?;
    Ok(ts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus(l: usize) -> SquareGeometry {
        SquareGeometry::torus(&TorusLattice::square(l, l).unwrap())
    }

    #[test]
    fn default_schedule_entry() {
        let l = TorusLattice::square(3, 3).unwrap();
        let g = SquareGeometry::torus(&l);
        let sched = build_hop_schedule(&g).unwrap();
        let s = l.star(1, 2);
        let want = PauliOperator::x_on(36, &[l.hu(1, 2), l.vr(1, 2)]).unwrap();
        assert_eq!(sched[s][1], want);
    }

    #[test]
    fn schedule_overlaps_with_plaquettes_are_even() {
        for n in 2..=4 {
            let g = torus(n);
            let p = build_modified_toric(&g, &ToricOptions::default()).unwrap();
            for a in p.schedule.iter().flatten() {
                for b in &p.plaquettes {
                    assert!(matches!(a.x_mask().overlap(b.z_mask()), 0 | 2));
                }
            }
        }
    }

    #[test]
    fn two_by_two_counts() {
        let p = build_modified_toric(&torus(2), &ToricOptions::default()).unwrap();
        assert_eq!(
            (p.stars.len(), p.plaquettes.len(), p.edges.len()),
            (4, 4, 8)
        );
    }

    #[test]
    fn shield_profiles() {
        assert_eq!(t_left(2), -1.0);
        assert_eq!(t_left(0) * t_right(0), 1.0);
        assert_eq!(t_left(2) * t_right(0), -1.0);
        assert_eq!(t_down(1, TdProfile::Derived), -1.0);
        assert_eq!(t_down(3, TdProfile::Literal), -1.0);
    }

    #[test]
    fn connector_m0_is_identity() {
        let g = torus(2);
        let ts = build_toric(&g, Couplings::default(), &ToricOptions::default()).unwrap();
        match &ts.connector[0] {
            Op::Controlled { branches, .. } => {
                assert!(branches[0].is_empty());
                assert_eq!(branches[3].len(), 6);
            }
            _ => panic!("connector is controlled"),
        }
    }

    #[test]
    fn rejects_r_for_toric() {
        let g = torus(2);
        let c = Couplings::default().with_r(1.0);
        assert!(build_toric(&g, c, &ToricOptions::default()).is_err());
    }
}
