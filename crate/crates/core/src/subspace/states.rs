//! Ground states, the connecting unitary, conjugated logicals and localized excitations.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::reduce::{ring_sectors, LambdaReduction, RingSectors};
use super::{eigen_residual, SubspaceBasis};
use crate::error::{GadgetError, Result};
use crate::model::{LabelStep, TermSet};
use crate::op::{
    sparse_axpy, sparse_norm, sparse_scale, Key, LocalOp, Op, SiteLayout, SiteMap, SparseVec,
};
use crate::pauli::PauliOperator;
use crate::sparse::CsrMatrix;

/// `Σ_{labels of each state} ∏_s a_s(λ_s)` over the basis, unnormalized.
pub fn product_state(basis: &SubspaceBasis, amps: &[Vec<f64>]) -> Vec<f64> {
    let codec = &basis.codec;
    basis
        .state_codes
        .iter()
        .map(|codes| {
            codes
                .iter()
                .map(|&c| {
                    amps.iter()
                        .enumerate()
                        .map(|(s, a)| a[codec.digit(c, s) as usize])
                        .product::<f64>()
                })
                .sum()
        })
        .collect()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

#[derive(Clone, Debug)]
pub struct GroundState {
    /// `Σ_s E₀(h_s) + ⟨H_p⟩ + residual`.
    pub energy: f64,
    pub vector: Vec<f64>,
    pub sectors: Vec<RingSectors>,
    /// `‖(H − E)ψ‖` against the assembled matrix.
    pub residual: f64,
}

/// `⊗_s |α₀⟩` in λ-coordinates. The residual must be constant on the subspace.
pub fn build_ground_state(
    basis: &SubspaceBasis,
    red: &LambdaReduction,
    h: &CsrMatrix,
) -> Result<GroundState> {
    let sectors = red.h.iter().map(ring_sectors).collect::<Result<Vec<_>>>()?;
    let shift = red.residual[0] + red.plaquette[0];
    if red
        .residual
        .iter()
        .zip(&red.plaquette)
        .any(|(r, p)| (r + p - shift).abs() > 1e-12)
    {
        return Err(GadgetError::Validation(
            "diagonal residual is not constant; the ground state is not a product".into(),
        ));
    }
    let amps: Vec<Vec<f64>> = sectors.iter().map(|s| s.alpha0()).collect();
    let mut vector = product_state(basis, &amps);
    if normalize(&mut vector) == 0.0 {
        return Err(GadgetError::Validation(
            "product ground state vanishes".into(),
        ));
    }
    let energy = sectors.iter().map(|s| s.e0()).sum::<f64>() + shift;
    let mut hv = vec![0.0; vector.len()];
    h.matvec(&vector, &mut hv);
    let residual = hv
        .iter()
        .zip(&vector)
        .map(|(a, b)| (a - energy * b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(GroundState {
        energy,
        vector,
        sectors,
        residual,
    })
}

fn forward_ops(ts: &TermSet, s: usize) -> Vec<&Op> {
    ts.moves
        .iter()
        .filter(|m| m.star == s && m.step == LabelStep::Forward)
        .map(|m| &m.op)
        .collect()
}

fn apply_sum(ops: &[&Op], layout: &SiteLayout, v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for op in ops {
        sparse_axpy(&mut out, 1.0, &op.apply_vec(layout, v));
    }
    out
}

/// `∏_s (I + A_s) Σ_λ α₀(λ) (D_s†)^λ |reference⟩`, normalized, by direct operator
/// application.
pub fn ground_state_oracle(ts: &TermSet, reference: Key, alpha0: &[f64]) -> Result<SparseVec> {
    let pauli = ts
        .pauli
        .as_ref()
        .ok_or_else(|| GadgetError::Unsupported("oracle needs Pauli star operators".into()))?;
    let mut v = SparseVec::from([(reference, 1.0)]);
    for s in 0..ts.n_stars {
        let d = forward_ops(ts, s);
        let mut acc = SparseVec::new();
        let mut cur = v;
        for &a in alpha0 {
            sparse_axpy(&mut acc, a, &cur);
            cur = apply_sum(&d, &ts.layout, &cur);
        }
        v = acc;
    }
    for star in &pauli.stars {
        let op = pauli_to_op(&ts.layout, star)?;
        let flipped = op.apply_vec(&ts.layout, &v);
        sparse_axpy(&mut v, 1.0, &flipped);
    }
    v.retain(|_, a| *a != 0.0);
    let n = sparse_norm(&v);
    sparse_scale(&mut v, 1.0 / n);
    Ok(v)
}

/// A real Pauli operator as a monomial on the qudit sites of `layout`.
pub fn pauli_to_op(layout: &SiteLayout, p: &PauliOperator) -> Result<Op> {
    let phase = p
        .phase()
        .real()
        .ok_or_else(|| GadgetError::NotReal(p.to_string()))?;
    let mut maps: Vec<SiteMap> = p
        .support()
        .into_iter()
        .map(|q| {
            let mut op = LocalOp::identity(2);
            if p.z_mask().get(q) {
                op = LocalOp::pauli_z();
            }
            if p.x_mask().get(q) {
                op = LocalOp::pauli_x().compose(&op);
            }
            SiteMap::new(layout.qudit(q), op)
        })
        .collect();
    if phase < 0.0 {
        match maps.first_mut() {
            Some(m) => m.op = LocalOp::diagonal(&[-1.0, -1.0]).compose(&m.op),
            None => maps.push(SiteMap::new(
                layout.qudit(0),
                LocalOp::diagonal(&[-1.0, -1.0]),
            )),
        }
    }
    Ok(Op::Product(maps))
}

/// `U = ∏_s U_s` (or its adjoint) applied to `v`.
pub fn apply_connector(ts: &TermSet, v: &SparseVec, adjoint: bool) -> Result<SparseVec> {
    if ts.connector.is_empty() {
        return Err(GadgetError::Unsupported(
            "this variant has no connecting unitary".into(),
        ));
    }
    let mut out = v.clone();
    for u in &ts.connector {
        let op = if adjoint { u.adjoint()? } else { u.clone() };
        out = op.apply_vec(&ts.layout, &out);
    }
    Ok(out)
}

/// Bits of every gadget digit in a packed key.
fn gadget_bits(layout: &SiteLayout) -> Key {
    (0..layout.n_gadget()).fold(0, |k, s| {
        let d = layout.dim(s).saturating_sub(1);
        let w = (u8::BITS - d.leading_zeros()).max(1);
        layout.set(k, s, ((1u16 << w) - 1) as u8)
    })
}

/// Largest Schmidt weight `σ₁² / ‖v‖²` across the gadget | qudit cut.
pub fn factorization_fidelity(ts: &TermSet, v: &SparseVec) -> f64 {
    let full = gadget_bits(&ts.layout);
    let mut rows: HashMap<Key, usize> = HashMap::new();
    let mut cols: HashMap<Key, usize> = HashMap::new();
    let mut entries = Vec::with_capacity(v.len());
    for (&k, &a) in v {
        let g = k & full;
        let q = k & !full;
        let nr = rows.len();
        let r = *rows.entry(g).or_insert(nr);
        let nc = cols.len();
        let c = *cols.entry(q).or_insert(nc);
        entries.push((r, c, a));
    }
    let total: f64 = entries.iter().map(|e| e.2 * e.2).sum();
    // generic deterministic start so no singular vector is missed by symmetry
    let mut x: Vec<f64> = (0..cols.len())
        .map(|c| 1.0 + (c as f64 * 0.618_034).fract())
        .collect();
    normalize(&mut x);
    let mut sigma2 = 0.0;
    for _ in 0..200 {
        let mut u = vec![0.0; rows.len()];
        for &(r, c, a) in &entries {
            u[r] += a * x[c];
        }
        let mut y = vec![0.0; cols.len()];
        for &(r, c, a) in &entries {
            y[c] += a * u[r];
        }
        let s2 = u.iter().map(|a| a * a).sum::<f64>();
        let n = normalize(&mut y);
        x = y;
        let done = (s2 - sigma2).abs() <= 1e-15 * total;
        sigma2 = s2;
        if done || n == 0.0 {
            break;
        }
    }
    sigma2 / total
}

/// `|⟨α̃₀^{⊗N} ⊗ ψ_toric(0)|v⟩|` with `α̃₀ = α₀` restricted to one half-period and
/// `ψ_toric(0) ∝ ∏_s (I + A_s)|0⟩`.
pub fn toric_factorized_overlap(ts: &TermSet, v: &SparseVec, alpha0: &[f64]) -> Result<f64> {
    let pauli = ts
        .pauli
        .as_ref()
        .ok_or_else(|| GadgetError::Unsupported("needs Pauli star operators".into()))?;
    let half = alpha0.len() / 2;
    let norm = alpha0[..half].iter().map(|a| a * a).sum::<f64>().sqrt();
    let tilde: Vec<f64> = alpha0[..half].iter().map(|a| a / norm).collect();
    let mut code: BTreeSet<Key> = BTreeSet::from([0]);
    let mut frontier = vec![0u128];
    let star_ops = pauli
        .stars
        .iter()
        .map(|p| pauli_to_op(&ts.layout, p))
        .collect::<Result<Vec<_>>>()?;
    while let Some(k) = frontier.pop() {
        for op in &star_ops {
            let (k2, _) = op.apply(&ts.layout, k).expect("X products always apply");
            if code.insert(k2) {
                frontier.push(k2);
            }
        }
    }
    let amp = 1.0 / (code.len() as f64).sqrt();
    let gadget_bits = gadget_bits(&ts.layout);
    let overlap: f64 = v
        .iter()
        .map(|(&k, &a)| {
            let q = k & !gadget_bits;
            if !code.contains(&q) {
                return 0.0;
            }
            let g: f64 = (0..ts.n_stars)
                .map(|s| tilde[ts.layout.get(k, s) as usize])
                .product();
            a * g * amp
        })
        .sum();
    Ok(overlap.abs())
}

/// `‖[H, U† L U] v‖` by direct operator application.
pub fn logical_commutator(ts: &TermSet, logical: &PauliOperator, v: &SparseVec) -> Result<f64> {
    let l = pauli_to_op(&ts.layout, logical)?;
    let conj = |x: &SparseVec| -> Result<SparseVec> {
        let y = apply_connector(ts, x, false)?;
        apply_connector(ts, &l.apply_vec(&ts.layout, &y), true)
    };
    let a = super::apply_hamiltonian(ts, &conj(v)?);
    let mut b = conj(&super::apply_hamiltonian(ts, v))?;
    sparse_axpy(&mut b, -1.0, &a);
    Ok(sparse_norm(&b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ExcitationKind {
    /// Odd one-body state on two stars.
    VortexPair { a: usize, b: usize },
    /// Odd one-body state on one star only.
    SingleOdd { star: usize },
    /// `U† Z U` along `len` horizontal edges of row `row` starting at column `start`,
    /// then the odd one-body projector at both end stars.
    ChargePair {
        row: usize,
        start: usize,
        len: usize,
    },
    /// `X` on both slots of `len` horizontal edges of column `col` starting at row `start`.
    FluxPair {
        col: usize,
        start: usize,
        len: usize,
    },
}

#[derive(Clone, Debug)]
pub struct Excitation {
    pub kind: ExcitationKind,
    pub state: SparseVec,
    /// Norm before normalization; zero means the construction annihilates the state.
    pub raw_norm: f64,
    pub expected_energy: f64,
    pub rayleigh: f64,
    pub residual: f64,
}

/// `Σ_{k<n} (D_s†)^k C_k(m_s)` with `C_k(m) = a(m+k) a(m)`: the projector onto the
/// one-body state `a` at star `s` in λ-coordinates.
fn one_body_projector(ts: &TermSet, s: usize, a: &[f64], v: &SparseVec) -> SparseVec {
    let n = a.len();
    let d = forward_ops(ts, s);
    let site = ts.gadget_sites[s][0];
    let mut out = SparseVec::new();
    for k in 0..n {
        let mut w: SparseVec = v
            .iter()
            .map(|(&key, &x)| {
                let m = ts.layout.get(key, site) as usize;
                (key, x * a[(m + k) % n] * a[m])
            })
            .filter(|e| e.1 != 0.0)
            .collect();
        for _ in 0..k {
            w = apply_sum(&d, &ts.layout, &w);
        }
        sparse_axpy(&mut out, 1.0, &w);
    }
    out
}

pub fn create_excitation(
    ts: &TermSet,
    basis: &SubspaceBasis,
    gs: &GroundState,
    kind: ExcitationKind,
) -> Result<Excitation> {
    let lattice = ts.torus().copied();
    let alpha0: Vec<Vec<f64>> = gs.sectors.iter().map(|s| s.alpha0()).collect();
    let odd_gap = |s: usize| gs.sectors[s].odd_gap();
    let (state, expected) = match kind {
        ExcitationKind::VortexPair { a, b } | ExcitationKind::SingleOdd { star: a @ b } => {
            for s in [a, b] {
                if s >= ts.n_stars {
                    return Err(GadgetError::IndexOutOfRange {
                        kind: "star",
                        index: s,
                        limit: ts.n_stars,
                    });
                }
            }
            let mut amps = alpha0.clone();
            amps[a] = gs.sectors[a].alpha_odd();
            let mut e = gs.energy + odd_gap(a);
            if a != b {
                amps[b] = gs.sectors[b].alpha_odd();
                e += odd_gap(b);
            }
            (basis.to_sparse(&product_state(basis, &amps)), e)
        }
        ExcitationKind::ChargePair { row, start, len } => {
            let l = lattice.ok_or_else(|| GadgetError::Unsupported("needs a torus".into()))?;
            let slots: Vec<usize> = (0..len)
                .map(|k| l.hu((start + k) as isize, row as isize))
                .collect();
            let z = PauliOperator::z_on(l.n_qubits(), &slots)?;
            let zop = pauli_to_op(&ts.layout, &z)?;
            let psi = basis.to_sparse(&gs.vector);
            let mut v = apply_connector(ts, &psi, false)?;
            v = zop.apply_vec(&ts.layout, &v);
            v = apply_connector(ts, &v, true)?;
            let mut e = gs.energy;
            if len % l.lx() != 0 {
                let ends = [
                    l.star(start as isize, row as isize),
                    l.star((start + len) as isize, row as isize),
                ];
                for s in ends {
                    v = one_body_projector(ts, s, &gs.sectors[s].alpha_odd(), &v);
                    e += odd_gap(s);
                }
            }
            (v, e)
        }
        ExcitationKind::FluxPair { col, start, len } => {
            let l = lattice.ok_or_else(|| GadgetError::Unsupported("needs a torus".into()))?;
            let slots: Vec<usize> = (0..len)
                .flat_map(|k| {
                    let j = (start + k) as isize;
                    [l.hu(col as isize, j), l.hd(col as isize, j)]
                })
                .collect();
            let x = pauli_to_op(&ts.layout, &PauliOperator::x_on(l.n_qubits(), &slots)?)?;
            let psi = basis.to_sparse(&gs.vector);
            let e = if len % l.ly() != 0 {
                gs.energy + 4.0 * ts.couplings.j
            } else {
                gs.energy
            };
            (x.apply_vec(&ts.layout, &psi), e)
        }
    };
    let mut state: SparseVec = state.into_iter().filter(|e| e.1.abs() > 1e-15).collect();
    let raw_norm = sparse_norm(&state);
    if raw_norm < 1e-12 {
        return Ok(Excitation {
            kind,
            state: SparseVec::new(),
            raw_norm,
            expected_energy: expected,
            rayleigh: f64::NAN,
            residual: 0.0,
        });
    }
    sparse_scale(&mut state, 1.0 / raw_norm);
    let (residual, rayleigh) = eigen_residual(ts, &state, expected);
    Ok(Excitation {
        kind,
        state,
        raw_norm,
        expected_energy: expected,
        rayleigh,
        residual,
    })
}
