use gadget_core::certify::{hs_spectrum, pattern_correction, pattern_minima, GapParams};
use gadget_core::group::GroupTable;
use gadget_core::model::TdProfile;
use gadget_core::pauli::{BitMask, PauliOperator, Phase};
use gadget_core::sparse::CsrMatrix;
use gadget_core::spectral::{eigensolve, symmetric_eigenvalues, SolverConfig};
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;

const N: usize = 3;

fn pauli() -> impl Strategy<Value = PauliOperator> {
    (0u8..1 << N, 0u8..1 << N, 0u8..4).prop_map(|(x, z, k)| {
        let bits = |m: u8| (0..N).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>();
        PauliOperator::new(
            BitMask::from_indices(N, &bits(x)).unwrap(),
            BitMask::from_indices(N, &bits(z)).unwrap(),
            Phase::from_exponent(k),
        )
        .unwrap()
    })
}

fn config(c: u8) -> BitMask {
    BitMask::from_indices(N, &(0..N).filter(|i| c >> i & 1 == 1).collect::<Vec<_>>()).unwrap()
}

fn index(m: &BitMask) -> usize {
    (0..N).filter(|&i| m.get(i)).map(|i| 1 << i).sum()
}

fn unit(p: Phase) -> Complex<f64> {
    [
        Complex::new(1.0, 0.0),
        Complex::new(0.0, 1.0),
        Complex::new(-1.0, 0.0),
        Complex::new(0.0, -1.0),
    ][p.exponent() as usize]
}

/// The 8×8 matrix of a Pauli string built from single-qubit matrices.
fn dense(p: &PauliOperator) -> DMatrix<Complex<f64>> {
    let zero = Complex::new(0.0, 0.0);
    let one = Complex::new(1.0, 0.0);
    let x = DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]);
    let z = DMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]);
    let mut m = DMatrix::from_element(1, 1, unit(p.phase()));
    for q in (0..N).rev() {
        let mut f = DMatrix::identity(2, 2);
        if p.x_mask().get(q) {
            f = &f * &x;
        }
        if p.z_mask().get(q) {
            f = &f * &z;
        }
        m = m.kronecker(&f);
    }
    m
}

fn group() -> impl Strategy<Value = GroupTable> {
    prop_oneof![
        (2usize..8).prop_map(|n| GroupTable::cyclic(n, &[1]).unwrap()),
        Just(GroupTable::s3(&[1, 3]).unwrap()),
        Just(GroupTable::d4(&[1, 4]).unwrap()),
    ]
}

proptest! {
    #[test]
    fn pauli_product_is_associative(a in pauli(), b in pauli(), c in pauli()) {
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn product_acts_like_sequential_application(a in pauli(), b in pauli(), c in 0u8..1 << N) {
        let (c1, ph1) = b.apply_to_config(&config(c)).unwrap();
        let (c2, ph2) = a.apply_to_config(&c1).unwrap();
        let (c3, ph3) = a.multiply(&b).unwrap().apply_to_config(&config(c)).unwrap();
        prop_assert_eq!(c2.clone(), c3);
        prop_assert_eq!(unit(ph1) * unit(ph2), unit(ph3));
        // and both agree with the dense matrix
        let col = dense(&a.multiply(&b).unwrap()).column(c as usize).into_owned();
        prop_assert_eq!(col[index(&c2)], unit(ph3));
    }

    #[test]
    fn commutation_matches_dense_matrices(a in pauli(), b in pauli()) {
        let (da, db) = (dense(&a), dense(&b));
        let diff = &da * &db - &db * &da;
        prop_assert_eq!(a.commutes(&b).unwrap(), diff.norm() < 1e-12);
    }

    #[test]
    fn left_multiplication_is_a_faithful_representation(g in group(), a in 0usize..8, b in 0usize..8) {
        let (a, b) = (a % g.order(), b % g.order());
        let la = g.l_plus(a).unwrap().to_dense();
        let lb = g.l_plus(b).unwrap().to_dense();
        let lab = g.l_plus(g.mul(a, b)).unwrap().to_dense();
        prop_assert_eq!(&la * &lb, lab);
        prop_assert_eq!(la == DMatrix::identity(g.order(), g.order()), a == 0);
        let rm = g.l_minus(a).unwrap().to_dense();
        let rb = g.l_minus(b).unwrap().to_dense();
        prop_assert_eq!(&rm * &rb, g.l_minus(g.mul(a, b)).unwrap().to_dense());
    }

    #[test]
    fn lanczos_matches_dense(n in 20usize..90, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut rows = vec![Vec::new(); n];
        for i in 0..n {
            rows[i].push((i, rng.random_range(-2.0..2.0)));
            for _ in 0..3 {
                let j = rng.random_range(0..n);
                if j != i {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    rows[i].push((j, v));
                    rows[j].push((i, v));
                }
            }
        }
        let m = CsrMatrix::from_rows(rows).unwrap();
        let dense = symmetric_eigenvalues(m.to_dense());
        let it = eigensolve(&m, 3, &SolverConfig::iterative()).unwrap();
        let scale = m.norm_bound().max(1.0);
        for (k, (a, b)) in it.eigenvalues.iter().zip(&dense).take(3).enumerate() {
            prop_assert!((a - b).abs() <= 1e-9 * scale, "{k}: {a} vs {b}");
        }
    }

    #[test]
    fn redistribution_cancels_across_an_edge(
        j in 0.01f64..0.3, blr in -0.5f64..0.5, bdu in -0.5f64..0.5,
        m1 in 0u8..4, m2 in 0u8..4,
    ) {
        let p = GapParams { u: 1.0, t: 0.3, j, beta_lr: blr, beta_du: bdu };
        let p0 = GapParams { beta_lr: 0.0, beta_du: 0.0, ..p };
        let td = TdProfile::Derived;
        // right side of the tail star with left side of the head star, then down with up
        let pair = |p: &GapParams, a: [u8; 4], b: [u8; 4]| {
            pattern_correction(p, a, m1, td) + pattern_correction(p, b, m2, td)
        };
        for (a, b) in [([0, 1, 0, 0], [1, 0, 0, 0]), ([0, 0, 0, 1], [0, 0, 1, 0])] {
            prop_assert!((pair(&p, a, b) - pair(&p0, a, b)).abs() < 1e-14);
        }
    }

    #[test]
    fn no_coupling_no_margin(t in 0.05f64..0.6, blr in -0.5f64..0.5, bdu in -0.5f64..0.5) {
        let p = GapParams { u: 1.0, t, j: 0.0, beta_lr: blr, beta_du: bdu };
        let e0 = hs_spectrum(1.0, t).e0;
        for (_, m) in pattern_minima(&p, TdProfile::Derived) {
            prop_assert!((m - e0).abs() < 1e-12);
        }
    }
}
