//! Triangular-lattice gadget model with six three-state corner particles per star.
//!
//! Corner `i` of star `s` is gadget site `6s+i`. With one particle per star the label
//! `λ = 2i` means `m_i = 1` and `λ = 2i+1` means `m_i = 2`; sector `i` is the triangle whose
//! two slots `A_s(i)` flips.

use super::toric::{push_stabilizer_terms, validate_pauli, x_maps, z_product};
use super::{
    validate_moves_commute_with_plaquettes, Coupling, Couplings, Geometry, LabelSpace, LabelStep,
    LogicalPair, Move, Orientation, PauliSet, ShieldPair, Term, TermKind, TermSet, Variant,
    TERMSET_SCHEMA,
};
use crate::error::{GadgetError, Result};
use crate::lattice::{LatticeKind, TorusLattice};
use crate::op::{LocalOp, Op, SiteLayout, SiteMap};
use crate::pauli::PauliOperator;

fn p(v: u8, want: u8) -> f64 {
    (v == want) as u8 as f64
}

/// Corners read by the shield factor of the star at the tail of an axis-`k` edge.
pub fn tri_tail_corners(k: usize) -> [usize; 2] {
    match k {
        0 => [2, 3],
        1 => [1, 2],
        _ => [0, 1],
    }
}

/// Corners read by the shield factor of the star at the head of an axis-`k` edge.
pub fn tri_head_corners(k: usize) -> [usize; 2] {
    match k {
        0 => [5, 0],
        1 => [4, 5],
        _ => [3, 4],
    }
}

/// Tail factor from the two corners `[a, a+1]` of [`tri_tail_corners`].
pub fn tri_t_minus(_k: usize, m: [u8; 2]) -> f64 {
    1.0 - 2.0 * (p(m[0], 2) + p(m[1], 1))
}

/// Head factor from the two corners of [`tri_head_corners`]; axis 0 straddles the
/// corner-5 / corner-0 wrap of the cycle.
pub fn tri_t_plus(k: usize, m: [u8; 2]) -> f64 {
    let v = p(m[0], 2) + p(m[1], 1);
    if k == 0 {
        2.0 * v - 1.0
    } else {
        1.0 - 2.0 * v
    }
}

fn corner(s: usize, i: usize) -> usize {
    6 * s + i
}

fn logicals(l: &TorusLattice, i0: isize, j0: isize) -> Result<Vec<LogicalPair>> {
    let n = l.n_qubits();
    let (lx, ly) = (l.lx() as isize, l.ly() as isize);
    let s0 = l.star(0, 0);
    let both = |di, dj, axis| {
        [
            l.tri_slot(s0, di, dj, axis, 0),
            l.tri_slot(s0, di, dj, axis, 1),
        ]
    };
    let x1: Vec<usize> = (0..ly)
        .flat_map(|j| [both(i0, j, 0), both(i0 + 1, j, 2)])
        .flatten()
        .collect();
    let z1: Vec<usize> = (0..lx).map(|i| l.tri_slot(s0, i, j0, 0, 0)).collect();
    let x2: Vec<usize> = (0..lx)
        .flat_map(|i| [both(i, j0, 1), both(i, j0, 2)])
        .flatten()
        .collect();
    let z2: Vec<usize> = (0..ly).map(|j| l.tri_slot(s0, i0, j, 1, 0)).collect();
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

/// `logical` is `(i₀, j₀)` for the logical strings.
pub fn build_triangular(
    l: &TorusLattice,
    couplings: Couplings,
    logical: (usize, usize),
) -> Result<TermSet> {
    if l.kind() != LatticeKind::Triangular {
        return Err(GadgetError::Validation(
            "the triangular variant needs a triangular lattice".into(),
        ));
    }
    couplings.validate(true)?;
    let (n, nq) = (l.n_stars(), l.n_qubits());
    let layout = SiteLayout::new(&vec![3; 6 * n], &vec![2; nq])?;

    let stars = (0..n)
        .map(|s| PauliOperator::x_on(nq, l.tri_sector_slots(s).as_flattened()))
        .collect::<Result<Vec<_>>>()?;
    let plaquette_slots: Vec<Vec<usize>> = (0..l.n_plaquettes())
        .map(|p| l.plaquette_qubits(p))
        .collect::<Result<_>>()?;
    let plaquettes = plaquette_slots
        .iter()
        .map(|q| PauliOperator::z_on(nq, q))
        .collect::<Result<Vec<_>>>()?;
    let edges = (0..l.n_edges())
        .map(|e| PauliOperator::z_on(nq, &[2 * e, 2 * e + 1]))
        .collect::<Result<Vec<_>>>()?;
    let schedule = (0..n)
        .map(|s| {
            l.tri_sector_slots(s)
                .iter()
                .map(|pair| PauliOperator::x_on(nq, pair))
                .collect()
        })
        .collect::<Result<Vec<Vec<_>>>>()?;
    let pauli = PauliSet {
        stars,
        plaquettes,
        edges,
        schedule,
        logicals: logicals(l, logical.0 as isize, logical.1 as isize)?,
    };
    validate_pauli(&pauli, true)?;

    let mut terms = Vec::new();
    let edge_terms = push_stabilizer_terms(
        &mut terms,
        plaquette_slots.iter().map(|q| z_product(&layout, q)),
        (0..l.n_edges()).map(|e| z_product(&layout, &[2 * e, 2 * e + 1])),
    );
    let mut moves = Vec::new();
    for s in 0..n {
        let corners: Vec<usize> = (0..6).map(|i| corner(s, i)).collect();
        terms.push(Term {
            kind: TermKind::Onsite,
            coupling: Coupling::U,
            factor: -1.0,
            star: Some(s),
            op: Op::Product(vec![SiteMap::new(corner(s, 0), LocalOp::projector(3, 1))]),
        });
        terms.push(Term {
            kind: TermKind::Penalty,
            coupling: Coupling::R,
            factor: 1.0,
            star: Some(s),
            op: Op::diagonal_from_fn(corners, &layout, |m| {
                let n_s = m.iter().filter(|&&v| v != 0).count() as f64;
                (1.0 - n_s).powi(2)
            }),
        });
        let sectors = l.tri_sector_slots(s);
        for (i, sector) in sectors.iter().enumerate().take(6) {
            let mut a = vec![SiteMap::new(corner(s, i), LocalOp::transition(3, 1, 2))];
            a.extend(x_maps(&layout, sector));
            let b = vec![
                SiteMap::new(corner(s, i), LocalOp::transition(3, 2, 0)),
                SiteMap::new(corner(s, (i + 1) % 6), LocalOp::transition(3, 0, 1)),
            ];
            for fwd in [Op::Product(a), Op::Product(b)] {
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
    }

    let shield = (0..l.n_edges())
        .zip(edge_terms)
        .map(|(e, edge_term)| {
            let (tail, head) = l.endpoints(e);
            let k = l.edge_axis(e);
            let [a, b] = tri_tail_corners(k);
            let [c, d] = tri_head_corners(k);
            let sites = vec![
                corner(tail, a),
                corner(tail, b),
                corner(head, c),
                corner(head, d),
            ];
            let op = Op::diagonal_from_fn(sites, &layout, |m| {
                tri_t_minus(k, [m[0], m[1]]) * tri_t_plus(k, [m[2], m[3]])
            });
            terms.push(Term {
                kind: TermKind::Shield,
                coupling: Coupling::J,
                factor: 1.0,
                star: None,
                op,
            });
            ShieldPair {
                edge: e,
                tail,
                head,
                orientation: Orientation::Axis(k as u8),
                term: terms.len() - 1,
                edge_term,
            }
        })
        .collect();

    let rest = (0..n).fold(0, |key, s| layout.set(key, corner(s, 0), 1));
    let ts = TermSet {
        schema_version: TERMSET_SCHEMA,
        variant: Variant::Triangular,
        geometry: Geometry::Torus(*l),
        couplings,
        layout,
        n_stars: n,
        gadget_sites: (0..n)
            .map(|s| (0..6).map(|i| corner(s, i)).collect())
            .collect(),
        labels: LabelSpace::Cycle { period: 24 },
        terms,
        moves,
        shield,
        pauli: Some(pauli),
        group_ops: None,
        connector: vec![],
        rest,
    };
    validate_moves_commute_with_plaquettes(&ts)?;
    Ok(ts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_profile() {
        // λ = 0 (m0 = 1) and λ = 11 (m5 = 2) leave the wrap boundary unflipped
        assert_eq!(tri_t_plus(0, [0, 1]), 1.0);
        assert_eq!(tri_t_plus(0, [2, 0]), 1.0);
        assert_eq!(tri_t_plus(0, [0, 0]), -1.0);
        assert_eq!(tri_t_minus(1, [0, 0]), 1.0);
    }

    #[test]
    fn requires_r() {
        let l = TorusLattice::triangular(2, 2).unwrap();
        assert!(build_triangular(&l, Couplings::default(), (0, 0)).is_err());
        assert!(build_triangular(&l, Couplings::default().with_r(1.0), (0, 0)).is_ok());
    }

    #[test]
    fn rejects_square_lattice() {
        let l = TorusLattice::square(2, 2).unwrap();
        assert!(build_triangular(&l, Couplings::default().with_r(1.0), (0, 0)).is_err());
    }
}
