use gadget_core::algebra::algebra_suite;
use gadget_core::lattice::TorusLattice;
use gadget_core::model::{build_triangular, Couplings, TermSet};
use gadget_core::subspace::*;

fn model() -> TermSet {
    let l = TorusLattice::triangular(2, 2).unwrap();
    build_triangular(&l, Couplings::default().with_r(1.0), (0, 0)).unwrap()
}

#[test]
fn hop_cycle_and_number_conservation() {
    let ts = model();
    let r = algebra_suite(&ts).unwrap();
    assert_eq!(ts.labels.radix(), 24);
    assert_eq!(r.number_violations, Some(0));
    assert_eq!(r.half_cycle_failures, 0);
    assert_eq!(r.full_cycle_failures, 0);
    assert_eq!(r.half_cycle_checks, 4 * 12);
    assert!(r.passed(), "{r:?}");
}

#[test]
fn breaking_a_corner_changes_the_particle_number() {
    use gadget_core::op::{LocalOp, Op, SiteMap};
    let mut ts = model();
    let site = ts.gadget_sites[0][0];
    let mut bad = ts.terms[0].clone();
    bad.op = Op::Product(vec![SiteMap::new(site, LocalOp::transition(3, 0, 1))]);
    ts.terms.push(bad);
    assert_eq!(algebra_suite(&ts).unwrap().number_violations, Some(1));
}

#[test]
fn ground_subspace_is_a_product_of_rings() {
    let ts = model();
    let b = enumerate_subspace(&ts, ts.rest, DEFAULT_BUDGET).unwrap();
    // 24 labels per star, halved by the global shift
    assert_eq!(b.len(), 24usize.pow(4) / 2);
    assert_eq!(b.alias_histogram().get(&2), Some(&b.len()));
    let tables = verify_shield_cancellation(&ts, &b).unwrap();
    assert_eq!(tables.len(), 12);
    assert!(tables
        .iter()
        .all(|t| t.mismatches == 0 && t.rows.len() == 576));
    let red = lambda_reduce(&ts, &b).unwrap();
    assert!(red.max_abs_residual() < 1e-14);
    let h = assemble_restricted(&ts, &b).unwrap();
    let gs = build_ground_state(&b, &red, &h).unwrap();
    assert!(gs.residual < 1e-10, "{}", gs.residual);
    let e0 = gs.sectors[0].e0();
    let expected = 4.0 * e0 + red.plaquette_constant().unwrap();
    assert!((gs.energy - expected).abs() < 1e-12);
}
