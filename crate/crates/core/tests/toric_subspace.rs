use gadget_core::algebra::algebra_suite;
use gadget_core::lattice::TorusLattice;
use gadget_core::model::{build_toric, Couplings, SquareGeometry, TermSet, ToricOptions};
use gadget_core::op::sparse_dot;
use gadget_core::spectral::{eigensolve, SolverConfig};
use gadget_core::subspace::*;
use nalgebra::DMatrix;

fn model(l: usize) -> TermSet {
    let g = SquareGeometry::torus(&TorusLattice::square(l, l).unwrap());
    build_toric(&g, Couplings::default(), &ToricOptions::default()).unwrap()
}

/// The one-body ring written out by hand: hops `−t` around eight labels, `−U` where the
/// gadget is at rest.
fn ring_oracle(u: f64, t: f64) -> (f64, f64) {
    let mut h = DMatrix::zeros(8, 8);
    for l in 0..8 {
        h[(l, (l + 1) % 8)] = -t;
        h[((l + 1) % 8, l)] = -t;
    }
    h[(0, 0)] = -u;
    h[(4, 4)] = -u;
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    (ev[0], ev[1])
}

#[test]
fn algebra_holds_on_three_tori() {
    for l in [2, 3, 4] {
        let r = algebra_suite(&model(l)).unwrap();
        assert!(r.passed(), "{l}x{l}: {r:?}");
        assert_eq!(r.half_cycle_checks, 4 * l * l);
        assert_eq!(r.star_product_identity, Some(true));
    }
}

#[test]
fn shield_tables_match_closed_form() {
    let ts = model(2);
    let b = enumerate_subspace(&ts, ts.rest, DEFAULT_BUDGET).unwrap();
    let tables = verify_shield_cancellation(&ts, &b).unwrap();
    assert_eq!(tables.len(), 8);
    let sign = |x: bool| if x { -1.0 } else { 1.0 };
    for t in &tables {
        assert_eq!(t.rows.len(), 64);
        assert_eq!(t.mismatches, 0);
        for r in &t.rows {
            let (a, b) = (r.lambda, r.lambda2);
            let want = match t.orientation {
                gadget_core::model::Orientation::Horizontal => sign(a % 4 == 2) * -sign(b % 4 == 0),
                gadget_core::model::Orientation::Vertical => sign(a % 4 == 1) * sign(b % 4 == 3),
                gadget_core::model::Orientation::Axis(_) => unreachable!(),
            };
            assert_eq!(r.edge_value, want, "{:?} ({a},{b})", t.orientation);
        }
    }
}

#[test]
fn ground_subspace_matches_product_formula() {
    let ts = model(2);
    let b = enumerate_subspace(&ts, ts.rest, DEFAULT_BUDGET).unwrap();
    assert_eq!(b.len(), 2048);
    assert_eq!(b.alias_histogram().get(&2), Some(&2048));
    let h = assemble_restricted(&ts, &b).unwrap();
    let red = lambda_reduce(&ts, &b).unwrap();
    assert!(red.max_abs_residual() < 1e-14);
    assert!(reduction_deviation(&b, &red, &h).unwrap() < 1e-13);
    let gs = build_ground_state(&b, &red, &h).unwrap();
    let (e0, _) = ring_oracle(1.0, 0.375);
    let plaquettes = -0.09 * 4.0;
    assert!((gs.energy - (4.0 * e0 + plaquettes)).abs() < 1e-10);
    assert!(gs.residual < 1e-10, "{}", gs.residual);
    let lz = eigensolve(&h, 2, &SolverConfig::iterative()).unwrap();
    assert!((lz.eigenvalues[0] - gs.energy).abs() < 1e-10);
    // the next level is two odd stars, not one
    let odd = gs.sectors[0].odd_gap();
    assert!((lz.eigenvalues[1] - gs.energy - 2.0 * odd).abs() < 1e-9);
}

#[test]
fn product_state_agrees_with_direct_construction() {
    let ts = model(2);
    let b = enumerate_subspace(&ts, ts.rest, DEFAULT_BUDGET).unwrap();
    let h = assemble_restricted(&ts, &b).unwrap();
    let red = lambda_reduce(&ts, &b).unwrap();
    let gs = build_ground_state(&b, &red, &h).unwrap();
    let a0 = gs.sectors[0].alpha0();
    let psi = b.to_sparse(&gs.vector);
    let oracle = ground_state_oracle(&ts, ts.rest, &a0).unwrap();
    assert!((sparse_dot(&oracle, &psi).abs() - 1.0).abs() < 1e-12);
    let u = apply_connector(&ts, &psi, false).unwrap();
    assert!((factorization_fidelity(&ts, &u) - 1.0).abs() < 1e-10);
    assert!((toric_factorized_overlap(&ts, &u, &a0).unwrap() - 1.0).abs() < 1e-10);
    for l in &ts.pauli.as_ref().unwrap().logicals {
        assert!(logical_commutator(&ts, &l.x, &psi).unwrap() < 1e-10);
        assert!(logical_commutator(&ts, &l.z, &psi).unwrap() < 1e-10);
    }
}

#[test]
fn localized_excitations_are_eigenstates() {
    let ts = model(2);
    let b = enumerate_subspace(&ts, ts.rest, DEFAULT_BUDGET).unwrap();
    let h = assemble_restricted(&ts, &b).unwrap();
    let red = lambda_reduce(&ts, &b).unwrap();
    let gs = build_ground_state(&b, &red, &h).unwrap();
    let (e0, e1) = ring_oracle(1.0, 0.375);
    let vortex = e1 - e0;
    let j = 0.09;
    let cases = [
        (ExcitationKind::VortexPair { a: 0, b: 3 }, 2.0 * vortex),
        (
            ExcitationKind::ChargePair {
                row: 0,
                start: 0,
                len: 1,
            },
            2.0 * vortex,
        ),
        (
            ExcitationKind::FluxPair {
                col: 0,
                start: 0,
                len: 1,
            },
            4.0 * j,
        ),
        // a charge string around the whole torus has no end points
        (
            ExcitationKind::ChargePair {
                row: 0,
                start: 0,
                len: 2,
            },
            0.0,
        ),
    ];
    for (kind, de) in cases {
        let e = create_excitation(&ts, &b, &gs, kind).unwrap();
        assert!(e.residual < 1e-10, "{kind:?}: {}", e.residual);
        assert!(
            (e.rayleigh - gs.energy - de).abs() < 1e-10,
            "{kind:?}: {}",
            e.rayleigh
        );
    }
    let single = create_excitation(&ts, &b, &gs, ExcitationKind::SingleOdd { star: 1 }).unwrap();
    assert!(single.raw_norm.abs() < 1e-12);
}
