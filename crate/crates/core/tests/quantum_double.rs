use gadget_core::double::*;
use gadget_core::group::GroupTable;
use gadget_core::lattice::TorusLattice;
use gadget_core::model::*;
use gadget_core::op::sparse_dot;
use gadget_core::subspace::*;
use gadget_core::GadgetError;

fn torus() -> SquareGeometry {
    SquareGeometry::torus(&TorusLattice::square(2, 2).unwrap())
}

fn solve(
    ts: &TermSet,
) -> (
    SubspaceBasis,
    QdReduction,
    Result<QdGroundState, GadgetError>,
) {
    let b = qd_ground_subspace(ts, DEFAULT_BUDGET).unwrap();
    let r = qd_lambda_reduce(ts, &b).unwrap();
    let h = assemble_restricted(ts, &b).unwrap();
    let gs = qd_ground_state(ts, &b, &r.reduction, &h);
    (b, r, gs)
}

fn mismatches(ts: &TermSet, b: &SubspaceBasis) -> Vec<(Orientation, usize)> {
    verify_shield_cancellation(ts, b)
        .unwrap()
        .iter()
        .map(|t| (t.orientation, t.mismatches))
        .collect()
}

#[test]
fn z2_reproduces_the_toric_gadget() {
    let ts = build_quantum_double(
        &torus(),
        &GroupTable::cyclic(2, &[1]).unwrap(),
        Couplings::default(),
    )
    .unwrap();
    let (b, r, gs) = solve(&ts);
    assert_eq!(b.len(), 2048);
    assert_eq!(b.alias_histogram().get(&2), Some(&2048));
    assert!(mismatches(&ts, &b).iter().all(|m| m.1 == 0));
    assert!(r.reduction.max_abs_residual() < 1e-14);
    assert!(r.deviation.iter().all(|d| d.max() < 1e-12));
    assert!(check_four_cycle(&ts).unwrap());
    assert!(moves_commute(&ts, &b));
    let gs = gs.unwrap();
    assert!(gs.residual < 1e-10);
    assert!((gs.fidelity - 1.0).abs() < 1e-10);
    assert!(gs.plaquettes.iter().all(|p| (p - 1.0).abs() < 1e-12));

    // the generator switch on a one-element set adds −t to the rest label
    let c = Couplings::new(0.09, 1.0 + 0.375, 0.375);
    let toric = build_toric(&torus(), c, &ToricOptions::default()).unwrap();
    let tb = enumerate_subspace(&toric, toric.rest, DEFAULT_BUDGET).unwrap();
    let th = assemble_restricted(&toric, &tb).unwrap();
    let tred = lambda_reduce(&toric, &tb).unwrap();
    let tgs = build_ground_state(&tb, &tred, &th).unwrap();
    assert!(
        (gs.energy - tgs.energy).abs() < 1e-10,
        "{} vs {}",
        gs.energy,
        tgs.energy
    );
    let overlap = sparse_dot(&b.to_sparse(&gs.vector), &tb.to_sparse(&tgs.vector));
    assert!((overlap.abs() - 1.0).abs() < 1e-10, "{overlap}");
}

#[test]
fn s3_one_star() {
    let ts = build_quantum_double(
        &SquareGeometry::one_star(),
        &GroupTable::s3(&[1, 3]).unwrap(),
        Couplings::default(),
    )
    .unwrap();
    assert_eq!(ts.labels.radix(), 4 * 2 * 6);
    let (b, r, gs) = solve(&ts);
    assert_eq!(b.len(), 48);
    assert!(r.deviation[0].max() < 1e-12, "{:?}", r.deviation[0]);
    // a lone star has no edges, so there is nothing to cancel
    assert!(mismatches(&ts, &b).is_empty());
    assert!(r.reduction.max_abs_residual() < 1e-14);
    let gs = gs.unwrap();
    assert!(gs.residual < 1e-10);
    assert!(gs.profile_spread < 1e-10);
    assert!((gs.fidelity - 1.0).abs() < 1e-10);
}

#[test]
fn z3_torus_needs_the_inverse_rule_on_vertical_edges() {
    let g = GroupTable::cyclic(3, &[1]).unwrap();
    let ts = build_quantum_double(&torus(), &g, Couplings::default()).unwrap();
    let (b, _, gs) = solve(&ts);
    assert_eq!(b.len(), 6912);
    assert_eq!(b.alias_histogram().get(&3), Some(&6912));
    assert!(mismatches(&ts, &b).iter().all(|m| m.1 == 0));
    let gs = gs.unwrap();
    assert!(gs.residual < 1e-10);
    assert!((gs.fidelity - 1.0).abs() < 1e-10);

    let literal =
        build_quantum_double_with(&torus(), &g, Couplings::default(), DoubleShield::Literal)
            .unwrap();
    let lb = qd_ground_subspace(&literal, DEFAULT_BUDGET).unwrap();
    for (o, m) in mismatches(&literal, &lb) {
        match o {
            Orientation::Horizontal => assert_eq!(m, 0),
            Orientation::Vertical => assert_eq!(m, 9),
            Orientation::Axis(_) => unreachable!(),
        }
    }
}

#[test]
fn s3_patch_has_no_two_body_cancellation() {
    let ts = build_quantum_double(
        &SquareGeometry::patch_2x1(),
        &GroupTable::s3(&[1, 3]).unwrap(),
        Couplings::default(),
    )
    .unwrap();
    let (b, r, gs) = solve(&ts);
    assert!(r.deviation.iter().all(|d| d.max() < 1e-12));
    assert!(mismatches(&ts, &b).iter().any(|m| m.1 > 0));
    assert!(matches!(gs, Err(GadgetError::NonDiagonalResidual(_))));
}
