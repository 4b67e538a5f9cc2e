//! Quantum-double specifics: enumeration with invariance, the `(λ, g, f)` one-body
//! blocks, the product ground state and its disentangling.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GadgetError, Result};
use crate::model::{LabelSpace, LabelStep, TermSet, Variant};
use crate::op::{Key, Op};
use crate::sparse::CsrMatrix;
use crate::spectral::symmetric_eigen;
use crate::subspace::{
    apply_connector, enumerate_subspace, factorization_fidelity, lambda_reduce, product_state,
    verify_invariance, LambdaReduction, SubspaceBasis,
};

fn require_double(ts: &TermSet) -> Result<()> {
    match ts.variant {
        Variant::QuantumDouble { .. } => Ok(()),
        _ => Err(GadgetError::Unsupported(
            "needs a quantum-double model".into(),
        )),
    }
}

/// `M(d)` from `reference`, closed under every `(D^g_s)†` and generator switch, with every
/// term checked to stay inside.
pub fn qd_enumerate(ts: &TermSet, reference: Key, budget: usize) -> Result<SubspaceBasis> {
    require_double(ts)?;
    let basis = enumerate_subspace(ts, reference, budget)?;
    verify_invariance(ts, &basis)?;
    Ok(basis)
}

/// `h_s` from the label algebra alone: `−U` on `λ = 0`, `−t` ring hops with the
/// `|λ+4, g, f⟩ = |λ, g, g·f⟩` rewrite, and `−t` generator mixing at `λ = 0`.
pub fn expected_one_body(labels: &LabelSpace, u: f64, t: f64) -> DMatrix<f64> {
    let n = labels.radix() as usize;
    let n_gen = labels.n_gen() as u16;
    let mut h = DMatrix::zeros(n, n);
    for l in 0..n as u16 {
        let (lambda, _, f) = labels.decode_double(l);
        let to = labels.act(l, LabelStep::Forward) as usize;
        h[(to, l as usize)] -= t;
        h[(l as usize, to)] -= t;
        if lambda == 0 {
            h[(l as usize, l as usize)] -= u;
            for g2 in 0..n_gen {
                h[(labels.encode_double(0, g2, f) as usize, l as usize)] -= t;
            }
        }
    }
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDeviation {
    pub onsite: f64,
    pub ring: f64,
    pub mixing: f64,
    /// Entries that belong to none of the three blocks.
    pub other: f64,
}

impl BlockDeviation {
    pub fn max(&self) -> f64 {
        self.onsite.max(self.ring).max(self.mixing).max(self.other)
    }
}

#[derive(Clone, Debug)]
pub struct QdReduction {
    pub reduction: LambdaReduction,
    pub expected: DMatrix<f64>,
    /// Per star, `h_s` from term application against the label algebra.
    pub deviation: Vec<BlockDeviation>,
}

pub fn qd_lambda_reduce(ts: &TermSet, basis: &SubspaceBasis) -> Result<QdReduction> {
    require_double(ts)?;
    let reduction = lambda_reduce(ts, basis)?;
    let labels = &ts.labels;
    let expected = expected_one_body(labels, ts.couplings.u, ts.couplings.t);
    let n = expected.nrows();
    let deviation = reduction
        .h
        .iter()
        .map(|h| {
            let mut d = BlockDeviation {
                onsite: 0.0,
                ring: 0.0,
                mixing: 0.0,
                other: 0.0,
            };
            for from in 0..n as u16 {
                let fwd = labels.act(from, LabelStep::Forward);
                for to in 0..n as u16 {
                    let (l1, _, f1) = labels.decode_double(from);
                    let (l2, _, f2) = labels.decode_double(to);
                    let err = (h[(to as usize, from as usize)]
                        - expected[(to as usize, from as usize)])
                        .abs();
                    let slot = if to == fwd || labels.act(to, LabelStep::Forward) == from {
                        &mut d.ring
                    } else if l1 == 0 && l2 == 0 && f1 == f2 && from != to {
                        &mut d.mixing
                    } else if from == to {
                        &mut d.onsite
                    } else {
                        &mut d.other
                    };
                    *slot = slot.max(err);
                }
            }
            d
        })
        .collect();
    Ok(QdReduction {
        reduction,
        expected,
        deviation,
    })
}

#[derive(Clone, Debug)]
pub struct QdGroundState {
    pub energy: f64,
    pub vector: Vec<f64>,
    /// `α₀` on the full label alphabet of star 0.
    pub alpha0: Vec<f64>,
    /// Largest spread of `α₀(λ, g, f)` over `(g, f)` at fixed `λ`.
    pub profile_spread: f64,
    /// `‖(H − E)ψ‖`.
    pub residual: f64,
    /// Largest Schmidt weight of `Uψ` across the gadget | qudit cut.
    pub fidelity: f64,
    /// `⟨B_p⟩` per plaquette.
    pub plaquettes: Vec<f64>,
}

/// `⊗_s |α₀⟩` with `α₀` the lowest eigenvector of `h_s`; needs a constant residual.
pub fn qd_ground_state(
    ts: &TermSet,
    basis: &SubspaceBasis,
    red: &LambdaReduction,
    h: &CsrMatrix,
) -> Result<QdGroundState> {
    require_double(ts)?;
    let shift = red.residual[0] + red.plaquette[0];
    let spread = red
        .residual
        .iter()
        .zip(&red.plaquette)
        .map(|(r, p)| (r + p - shift).abs())
        .fold(0.0, f64::max);
    if spread > 1e-12 {
        return Err(GadgetError::NonDiagonalResidual(format!(
            "edge and shield terms vary by {spread:e} on the subspace"
        )));
    }
    let mut amps = Vec::with_capacity(red.h.len());
    let mut energy = shift;
    for hs in &red.h {
        let (vals, vecs) = symmetric_eigen(hs.clone());
        if vals.len() > 1 && vals[1] - vals[0] < 1e-9 {
            return Err(GadgetError::Validation(
                "one-body ground level is degenerate".into(),
            ));
        }
        let mut a: Vec<f64> = vecs.column(0).iter().copied().collect();
        if a.iter().sum::<f64>() < 0.0 {
            a.iter_mut().for_each(|x| *x = -*x);
        }
        energy += vals[0];
        amps.push(a);
    }
    let labels = &ts.labels;
    let alpha0 = amps[0].clone();
    let mut profile_spread: f64 = 0.0;
    for (l, &a) in alpha0.iter().enumerate() {
        let (lambda, _, _) = labels.decode_double(l as u16);
        let reference = alpha0[lambda as usize];
        profile_spread = profile_spread.max((a - reference).abs());
    }
    let mut vector = product_state(basis, &amps);
    let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(GadgetError::Validation(
            "product ground state vanishes".into(),
        ));
    }
    vector.iter_mut().for_each(|x| *x /= norm);
    let mut hv = vec![0.0; vector.len()];
    h.matvec(&vector, &mut hv);
    let residual = hv
        .iter()
        .zip(&vector)
        .map(|(a, b)| (a - energy * b).powi(2))
        .sum::<f64>()
        .sqrt();
    let psi = basis.to_sparse(&vector);
    let fidelity = factorization_fidelity(ts, &apply_connector(ts, &psi, false)?);
    let ops = ts.group_ops.as_ref().expect("quantum double has group ops");
    let plaquettes = ops
        .plaquettes
        .iter()
        .map(|p| {
            psi.iter()
                .map(|(&k, &a)| a * a * p.apply(&ts.layout, k).map_or(0.0, |(_, v)| v))
                .sum()
        })
        .collect();
    Ok(QdGroundState {
        energy,
        vector,
        alpha0,
        profile_spread,
        residual,
        fidelity,
        plaquettes,
    })
}

fn forward_image(ts: &TermSet, s: usize, key: Key) -> Option<Key> {
    ts.moves
        .iter()
        .filter(|m| m.star == s && m.step == LabelStep::Forward)
        .find_map(|m| m.op.apply(&ts.layout, key))
        .map(|(k, _)| k)
}

/// `((D^g_s)†)⁴ = A^g_s` on a generic qudit configuration, for every star and generator.
pub fn check_four_cycle(ts: &TermSet) -> Result<bool> {
    require_double(ts)?;
    let Variant::QuantumDouble { group } = &ts.variant else {
        unreachable!()
    };
    let ops = ts.group_ops.as_ref().expect("quantum double has group ops");
    let layout = &ts.layout;
    let mut key = ts.rest;
    for q in 0..layout.n_qudit() {
        key = layout.set(key, layout.qudit(q), ((q * 5 + 1) % group.order()) as u8);
    }
    for s in 0..ts.n_stars {
        let site = ts.gadget_sites[s][0];
        for (gi, &g) in group.generators().iter().enumerate() {
            let start = layout.set(key, site, 4 * gi as u8);
            let mut k = start;
            for _ in 0..4 {
                match forward_image(ts, s, k) {
                    Some(next) => k = next,
                    None => return Ok(false),
                }
            }
            let want = ops.stars[s][g].apply(layout, start).map(|(k, _)| k);
            if Some(k) != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether every pair of forward moves commutes on every basis state where both apply.
pub fn moves_commute(ts: &TermSet, basis: &SubspaceBasis) -> bool {
    let fwd: Vec<&Op> = ts
        .moves
        .iter()
        .filter(|m| m.step == LabelStep::Forward)
        .map(|m| &m.op)
        .collect();
    let layout = &ts.layout;
    basis.states.iter().all(|&k| {
        fwd.iter().enumerate().all(|(i, a)| {
            fwd[i + 1..].iter().all(|b| {
                let ab = b
                    .apply(layout, k)
                    .and_then(|(k2, x)| a.apply(layout, k2).map(|(k3, y)| (k3, x * y)));
                let ba = a
                    .apply(layout, k)
                    .and_then(|(k2, x)| b.apply(layout, k2).map(|(k3, y)| (k3, x * y)));
                match (ab, ba) {
                    (Some(p), Some(q)) => p == q,
                    _ => true,
                }
            })
        })
    })
}

/// `M(0)` for the model's rest reference.
pub fn qd_ground_subspace(ts: &TermSet, budget: usize) -> Result<SubspaceBasis> {
    qd_enumerate(ts, ts.rest, budget)
}
