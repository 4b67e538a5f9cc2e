use gadget_core::certify::*;
use gadget_core::model::TdProfile;
use nalgebra::DMatrix;

fn ring(u: f64, t: f64) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(8, 8);
    for l in 0..8 {
        h[(l, (l + 1) % 8)] = -t;
        h[((l + 1) % 8, l)] = -t;
    }
    h[(0, 0)] = -u;
    h[(4, 4)] = -u;
    h
}

fn sorted_eigenvalues(h: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[test]
fn certificate_at_the_reference_point() {
    let p = GapParams::default();
    let c = certify_patterns(&p, TdProfile::Derived).unwrap();
    let ev = sorted_eigenvalues(ring(1.0, 0.375));
    assert!((c.e0 - ev[0]).abs() < 1e-12);
    assert!((c.vortex_gap - (ev[1] - ev[0])).abs() < 1e-12);
    assert!(c.vortex_gap > 0.0375 + 1e-6);
    assert!((c.intra_bound - 2.0 * c.vortex_gap).abs() < 1e-15);

    // every pattern minimum from a dense 8×8 built here
    for pm in &c.pattern_minima {
        let mut h = ring(p.u, p.t);
        for l in 0..8 {
            h[(l, l)] += pattern_correction(&p, pm.pattern, l as u8 % 4, TdProfile::Derived);
        }
        let lowest = sorted_eigenvalues(h)[0];
        assert!(
            (pm.min_eigenvalue - lowest).abs() < 1e-12,
            "{:?}",
            pm.pattern
        );
        assert!((pm.margin - (lowest - ev[0])).abs() < 1e-12);
    }
    let worst = c
        .pattern_minima
        .iter()
        .map(|m| m.margin)
        .fold(f64::INFINITY, f64::min);
    assert_eq!(c.per_star_margin, worst);
    assert!((c.inter_bound - 3.0 * worst).abs() < 1e-15);
    assert_eq!(c.certified_gap, c.inter_bound.min(c.intra_bound));
    // neither reading of the stated per-star threshold holds
    assert!(c.margin_readings.iter().all(|r| !r.holds));
    assert!(c.verdict);
}

#[test]
fn coarse_chain() {
    for (ratio, pass) in [(13.0, true), (11.0, false)] {
        let t = 1.0 / ratio;
        let b = coarse_bound(1.0, t, 0.125);
        // three decoupled cosine rings, each bottoming out at −2t
        assert!((b.h1_min + 6.0 * t).abs() < 1e-12);
        assert_eq!(b.h2_min, -2.5);
        assert_eq!(b.h2_formula, -2.5);
        assert_eq!(b.pass, pass, "U = {ratio}t");
        assert_eq!(b.u_over_12t, pass);
    }
}

#[test]
fn weak_regime_gap_is_of_order_1e_4() {
    let hs = hs_spectrum(1.0, 1.0 / 16.0);
    let ev = sorted_eigenvalues(ring(1.0, 1.0 / 16.0));
    assert!((hs.intra_gap - 2.0 * (ev[1] - ev[0])).abs() < 1e-14);
    assert!(
        hs.intra_gap > 1e-4 / 3.0 && hs.intra_gap < 3e-4,
        "{}",
        hs.intra_gap
    );
}

#[test]
fn small_grid_argmax_is_the_landscape_maximum() {
    let g: GridSpec = "J=0.07:0.11:0.01;t=0.3:0.45:0.075;blr=0:0.5:0.25;bdu=-0.1:0.1:0.05"
        .parse()
        .unwrap();
    let o = optimize_params(&g).unwrap();
    assert_eq!(o.landscape.len(), 5 * 3 * 3 * 5);
    let max = o
        .landscape
        .iter()
        .map(|r| r.certified_gap)
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(o.best.certified_gap, max);
    for r in o.landscape.iter().step_by(17) {
        let p = GapParams {
            u: 1.0,
            t: r.t,
            j: r.j,
            beta_lr: r.beta_lr,
            beta_du: r.beta_du,
        };
        let c = certify_patterns(&p, TdProfile::Derived).unwrap();
        assert!((c.certified_gap - r.certified_gap).abs() < 1e-12);
    }
    let mut csv = Vec::new();
    write_landscape_csv(&o.landscape, &mut csv).unwrap();
    assert_eq!(
        String::from_utf8(csv).unwrap().lines().count(),
        o.landscape.len() + 1
    );
}

#[test]
fn two_by_two_coset_audit() {
    let l = gadget_core::lattice::TorusLattice::square(2, 2).unwrap();
    let a = multiplicity_audit(&l).unwrap();
    assert_eq!(a.n_cosets, 8192);
    assert_eq!(a.ground, vec![0, 204, 771, 975]);
    // every exception disturbs exactly two stars across a doubly violated edge pair
    assert_eq!(a.exceptions.len(), 16);
    assert!(a
        .exceptions
        .iter()
        .all(|e| e.disturbed_stars.len() == 2 && e.violated_edges.len() == 2));
    assert_eq!(coset_classes(&l, &a).unwrap().len(), 560);
}
